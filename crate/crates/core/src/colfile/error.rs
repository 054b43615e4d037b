use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    /// Input ended at `offset` while a field starting at `field_offset`
    /// needed `needed` bytes.
    #[error("truncated input at offset {offset} (field at {field_offset} needs {needed} bytes)")]
    Truncated {
        offset: usize,
        field_offset: usize,
        needed: usize,
    },
    #[error("parse error at offset {offset}: {reason}")]
    Parse { offset: usize, reason: String },
    #[error("corrupt file: {0}")]
    Corrupt(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("decompress error: {0}")]
    Decompress(String),
    #[error("{what} index {index} out of range (len {len})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub(crate) fn parse(offset: usize, reason: impl Into<String>) -> Self {
        FormatError::Parse {
            offset,
            reason: reason.into(),
        }
    }

    /// Byte offset named by parse failures, if any.
    pub fn offset(&self) -> Option<usize> {
        match self {
            FormatError::Truncated { offset, .. } | FormatError::Parse { offset, .. } => {
                Some(*offset)
            }
            _ => None,
        }
    }
}

pub(crate) fn check_index(what: &'static str, index: usize, len: usize) -> Result<(), FormatError> {
    if index < len {
        Ok(())
    } else {
        Err(FormatError::OutOfRange { what, index, len })
    }
}

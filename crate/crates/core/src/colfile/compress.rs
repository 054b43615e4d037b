//! Raw DEFLATE (RFC 1951) framing for sections and column chunks.

use super::error::FormatError;

/// Compression level used by the writer unless overridden.
pub const DEFAULT_LEVEL: u8 = 6;

pub fn deflate_section(raw: &[u8]) -> Vec<u8> {
    deflate_section_with_level(raw, DEFAULT_LEVEL)
}

pub fn deflate_section_with_level(raw: &[u8], level: u8) -> Vec<u8> {
    miniz_oxide::deflate::compress_to_vec(raw, level.min(10))
}

pub fn inflate_section(compressed: &[u8]) -> Result<Vec<u8>, FormatError> {
    miniz_oxide::inflate::decompress_to_vec(compressed)
        .map_err(|e| FormatError::Decompress(format!("{:?}", e.status)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_round_trip() {
        let raw = vec![0u8; 1024];
        let c = deflate_section(&raw);
        assert!(c.len() < raw.len());
        assert_eq!(inflate_section(&c).unwrap(), raw);
    }

    #[test]
    fn empty_round_trip() {
        assert_eq!(inflate_section(&deflate_section(b"")).unwrap(), b"");
    }

    #[test]
    fn reserved_block_type_is_rejected() {
        // BFINAL=1, BTYPE=11 (reserved)
        assert!(matches!(
            inflate_section(&[0x07, 0x00, 0x00]),
            Err(FormatError::Decompress(_))
        ));
    }

    #[test]
    fn truncated_stream_is_rejected() {
        let c = deflate_section(b"hello hello hello hello hello");
        assert!(inflate_section(&c[..c.len() / 2]).is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let raw: Vec<u8> = (0..5000u32).map(|i| (i * 7 % 251) as u8).collect();
        assert_eq!(deflate_section(&raw), deflate_section(&raw));
        assert_eq!(inflate_section(&deflate_section_with_level(&raw, 1)).unwrap(), raw);
    }
}

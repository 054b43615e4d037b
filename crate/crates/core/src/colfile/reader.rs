//! Positioned reads of sections from a file image.

use std::fs::File;
use std::io;
use std::os::unix::fs::FileExt;
use std::sync::Arc;

use super::chunk::ColumnChunk;
use super::codec::{parse_footer, parse_stripe_footer, parse_stripe_index};
use super::compress::inflate_section;
use super::error::{check_index, FormatError};
use super::types::{FileFooter, FooterAccess, StripeFooter, StripeFooterAccess, StripeIndex, StripeInfo};
use super::MAGIC;

/// Random-access byte source for a file.
pub trait FileSource: Send + Sync {
    fn len(&self) -> u64;
    fn read_at(&self, offset: u64, len: usize) -> io::Result<Vec<u8>>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FileSource for [u8] {
    fn len(&self) -> u64 {
        <[u8]>::len(self) as u64
    }

    fn read_at(&self, offset: u64, len: usize) -> io::Result<Vec<u8>> {
        let start = usize::try_from(offset).map_err(|_| eof())?;
        self.get(start..start.checked_add(len).ok_or_else(eof)?)
            .map(<[u8]>::to_vec)
            .ok_or_else(eof)
    }
}

impl FileSource for Vec<u8> {
    fn len(&self) -> u64 {
        self.as_slice().len() as u64
    }

    fn read_at(&self, offset: u64, len: usize) -> io::Result<Vec<u8>> {
        self.as_slice().read_at(offset, len)
    }
}

impl FileSource for Arc<[u8]> {
    fn len(&self) -> u64 {
        (**self).len() as u64
    }

    fn read_at(&self, offset: u64, len: usize) -> io::Result<Vec<u8>> {
        (**self).read_at(offset, len)
    }
}

/// A regular file with its length captured at open.
#[derive(Debug)]
pub struct DiskFile {
    file: File,
    len: u64,
}

impl DiskFile {
    pub fn new(file: File, len: u64) -> Self {
        DiskFile { file, len }
    }
}

impl FileSource for DiskFile {
    fn len(&self) -> u64 {
        self.len
    }

    fn read_at(&self, offset: u64, len: usize) -> io::Result<Vec<u8>> {
        let mut buf = vec![0u8; len];
        self.file.read_exact_at(&mut buf, offset)?;
        Ok(buf)
    }
}

fn eof() -> io::Error {
    io::Error::new(io::ErrorKind::UnexpectedEof, "read past end of file")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FooterLocation {
    pub offset: u64,
    pub compressed_len: u32,
}

/// Decodes the 8-byte file tail (`u32 footer length ‖ "OCF1"`).
pub fn locate_footer(tail: &[u8; 8], file_len: u64) -> Result<FooterLocation, FormatError> {
    if &tail[4..] != MAGIC {
        return Err(FormatError::Corrupt(format!("bad trailing magic {:?}", &tail[4..])));
    }
    let compressed_len = u32::from_le_bytes(tail[..4].try_into().unwrap());
    let min_len = MAGIC.len() as u64 + compressed_len as u64 + 8;
    if min_len > file_len {
        return Err(FormatError::Corrupt(format!(
            "footer length {compressed_len} does not fit in a {file_len}-byte file"
        )));
    }
    Ok(FooterLocation {
        offset: file_len - 8 - compressed_len as u64,
        compressed_len,
    })
}

/// Reads the compressed footer section after checking both magics.
pub fn read_footer_section<S: FileSource + ?Sized>(
    src: &S,
) -> Result<(Vec<u8>, FooterLocation), FormatError> {
    let len = src.len();
    if len < (MAGIC.len() + 8) as u64 {
        return Err(FormatError::Corrupt(format!("file of {len} bytes is too short")));
    }
    if src.read_at(0, MAGIC.len())? != MAGIC {
        return Err(FormatError::Corrupt("bad leading magic".into()));
    }
    let tail: [u8; 8] = src.read_at(len - 8, 8)?.try_into().unwrap();
    let loc = locate_footer(&tail, len)?;
    let bytes = src.read_at(loc.offset, loc.compressed_len as usize)?;
    Ok((bytes, loc))
}

fn read_range<S: FileSource + ?Sized>(src: &S, offset: u64, len: u64) -> Result<Vec<u8>, FormatError> {
    let end = offset.checked_add(len).filter(|&e| e <= src.len()).ok_or_else(|| {
        FormatError::Corrupt(format!("section {offset}+{len} beyond end of file"))
    })?;
    let len = usize::try_from(end - offset)
        .map_err(|_| FormatError::Corrupt("section too large".into()))?;
    Ok(src.read_at(offset, len)?)
}

pub fn read_stripe_index_section<S: FileSource + ?Sized>(
    src: &S,
    stripe: &StripeInfo,
) -> Result<Vec<u8>, FormatError> {
    read_range(src, stripe.stripe_offset, stripe.index_len)
}

pub fn read_stripe_footer_section<S: FileSource + ?Sized>(
    src: &S,
    stripe: &StripeInfo,
) -> Result<Vec<u8>, FormatError> {
    read_range(src, stripe.footer_offset(), stripe.footer_len)
}

/// Reads, inflates, parses and validates the file footer.
pub fn read_footer<S: FileSource + ?Sized>(src: &S) -> Result<FileFooter, FormatError> {
    let (compressed, loc) = read_footer_section(src)?;
    let footer = parse_footer(&inflate_section(&compressed)?)?;
    footer.validate(loc.offset)?;
    Ok(footer)
}

pub fn read_stripe_footer<S: FileSource + ?Sized>(
    src: &S,
    footer: &FileFooter,
    stripe_idx: usize,
) -> Result<StripeFooter, FormatError> {
    let stripe = footer.stripe(stripe_idx)?;
    parse_stripe_footer(&inflate_section(&read_stripe_footer_section(src, &stripe)?)?)
}

pub fn read_stripe_index<S: FileSource + ?Sized>(
    src: &S,
    footer: &FileFooter,
    stripe_idx: usize,
) -> Result<StripeIndex, FormatError> {
    let stripe = footer.stripe(stripe_idx)?;
    parse_stripe_index(
        &inflate_section(&read_stripe_index_section(src, &stripe)?)?,
        &footer.column_types(),
    )
}

/// Reads and decompresses one column chunk of one stripe.
pub fn read_column_chunk<S, F, SF>(
    src: &S,
    stripe_idx: usize,
    col_idx: usize,
    footer: &F,
    stripe_footer: &SF,
) -> Result<ColumnChunk, FormatError>
where
    S: FileSource + ?Sized,
    F: FooterAccess + ?Sized,
    SF: StripeFooterAccess + ?Sized,
{
    check_index("column", col_idx, footer.num_columns())?;
    let stripe = footer.stripe(stripe_idx)?;
    let stream = stripe_footer.stream(col_idx)?;
    let in_bounds = stream
        .chunk_offset
        .checked_add(stream.chunk_len)
        .is_some_and(|end| end <= stripe.data_len);
    if !in_bounds {
        return Err(FormatError::Corrupt(format!(
            "chunk {}+{} outside stripe {stripe_idx} data region of {} bytes",
            stream.chunk_offset, stream.chunk_len, stripe.data_len
        )));
    }
    let compressed = read_range(src, stripe.data_offset() + stream.chunk_offset, stream.chunk_len)?;
    let rows = usize::try_from(stripe.num_rows)
        .map_err(|_| FormatError::Corrupt("stripe row count overflows".into()))?;
    ColumnChunk::parse(inflate_section(&compressed)?, footer.column_type(col_idx)?, rows)
}

//! Where scanned files come from.

use std::collections::HashMap;
use std::fs::File;
use std::os::unix::ffi::OsStrExt;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::UNIX_EPOCH;

use parking_lot::RwLock;

use crate::colfile::{DiskFile, FileSource};
use crate::metacache::make_file_id;

/// Version identity of a file: cache keys derive from it, so a rewritten
/// file (new size or mtime) never sees stale metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileIdentity {
    pub path: PathBuf,
    pub size: u64,
    pub mtime_ns: u64,
    pub file_id: u64,
}

impl FileIdentity {
    pub fn new(path: PathBuf, size: u64, mtime_ns: u64) -> Self {
        let file_id = make_file_id(path.as_os_str().as_bytes(), size, mtime_ns);
        FileIdentity {
            path,
            size,
            mtime_ns,
            file_id,
        }
    }
}

pub trait Storage: Send + Sync {
    fn open(&self, path: &Path) -> std::io::Result<(FileIdentity, Arc<dyn FileSource>)>;
}

/// Local filesystem. Paths are canonicalized before identity is computed.
#[derive(Debug, Default, Clone, Copy)]
pub struct FsStorage;

impl Storage for FsStorage {
    fn open(&self, path: &Path) -> std::io::Result<(FileIdentity, Arc<dyn FileSource>)> {
        let path = path.canonicalize()?;
        let file = File::open(&path)?;
        let meta = file.metadata()?;
        let mtime_ns = meta
            .modified()?
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_nanos() as u64);
        let id = FileIdentity::new(path, meta.len(), mtime_ns);
        let src: Arc<dyn FileSource> = Arc::new(DiskFile::new(file, meta.len()));
        Ok((id, src))
    }
}

/// In-memory files. Every insert bumps the stored mtime so replaced
/// contents get a fresh identity.
#[derive(Debug, Default)]
pub struct MemStorage {
    files: RwLock<HashMap<PathBuf, (Arc<[u8]>, u64)>>,
}

impl MemStorage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&self, path: impl Into<PathBuf>, bytes: impl Into<Arc<[u8]>>) {
        let mut files = self.files.write();
        let path = path.into();
        let version = files.get(&path).map_or(1, |(_, v)| v + 1);
        files.insert(path, (bytes.into(), version));
    }
}

impl Storage for MemStorage {
    fn open(&self, path: &Path) -> std::io::Result<(FileIdentity, Arc<dyn FileSource>)> {
        let files = self.files.read();
        let (bytes, version) = files.get(path).ok_or_else(|| {
            std::io::Error::new(std::io::ErrorKind::NotFound, format!("no such file {}", path.display()))
        })?;
        let id = FileIdentity::new(path.to_owned(), bytes.len(), *version);
        Ok((id, Arc::new(bytes.clone())))
    }
}

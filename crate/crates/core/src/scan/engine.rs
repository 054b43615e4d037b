//! Cache-integrated metadata loading and split scans.

use std::cell::Cell;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use log::{debug, warn};
use thiserror::Error;

use crate::colfile::{
    num_row_groups, read_column_chunk, read_footer_section, read_stripe_footer_section,
    read_stripe_index_section, row_group_rows, ColumnChunk, ColumnType, FileFooter, FileSource,
    FooterAccess, FormatError, RowGroupRef, StatsRef, StreamInfo, StripeFooter,
    StripeFooterAccess, StripeIndex, StripeIndexAccess, StripeInfo, ROW_GROUP_ROWS,
};
use crate::metacache::{
    CacheError, CacheKey, CacheStats, CacheValue, FooterView, MetaCache, ObjectBuffer,
    StripeFooterView, StripeIndexView, ValueKind,
};

use super::predicate::{eval_atom, Predicate, Pushdown};
use super::result::{AggValue, Aggregate, ScanResult};
use super::storage::{FileIdentity, Storage};

/// How metadata sections are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CacheMode {
    /// Read, inflate and parse from storage on every access.
    None,
    /// Cache inflated canonical bytes; hits parse them.
    Bytes,
    /// Cache object buffers; hits decode a view.
    Objects,
}

impl CacheMode {
    pub const ALL: [CacheMode; 3] = [CacheMode::None, CacheMode::Bytes, CacheMode::Objects];
}

impl FromStr for CacheMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(CacheMode::None),
            "bytes" => Ok(CacheMode::Bytes),
            "objects" => Ok(CacheMode::Objects),
            other => Err(format!("unknown cache mode {other:?} (expected none, bytes or objects)")),
        }
    }
}

impl fmt::Display for CacheMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheMode::None => "none",
            CacheMode::Bytes => "bytes",
            CacheMode::Objects => "objects",
        })
    }
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid query: {0}")]
    Query(String),
}

fn file_err(path: &Path) -> impl FnOnce(FormatError) -> ScanError + '_ {
    move |source| ScanError::File {
        path: path.to_owned(),
        source,
    }
}

fn corrupt(msg: String) -> FormatError {
    FormatError::Corrupt(msg)
}

/// A metadata section as returned by the loader: owned when it was parsed,
/// a view when it came from a cached object buffer.
#[derive(Debug, Clone)]
pub enum Loaded<P, V> {
    Parsed(P),
    View(V),
}

pub type FooterRef = Loaded<FileFooter, FooterView>;
pub type StripeFooterRef = Loaded<StripeFooter, StripeFooterView>;
pub type StripeIndexRef = Loaded<StripeIndex, StripeIndexView>;

impl<P, V> Loaded<P, V> {
    pub fn is_view(&self) -> bool {
        matches!(self, Loaded::View(_))
    }
}

impl FooterRef {
    pub fn to_footer(&self) -> Result<FileFooter, FormatError> {
        match self {
            Loaded::Parsed(f) => Ok(f.clone()),
            Loaded::View(v) => Ok(v.to_footer()?),
        }
    }
}

impl StripeFooterRef {
    pub fn to_stripe_footer(&self) -> Result<StripeFooter, FormatError> {
        match self {
            Loaded::Parsed(f) => Ok(f.clone()),
            Loaded::View(v) => Ok(v.to_stripe_footer()?),
        }
    }
}

impl StripeIndexRef {
    pub fn to_stripe_index(&self) -> Result<StripeIndex, FormatError> {
        match self {
            Loaded::Parsed(f) => Ok(f.clone()),
            Loaded::View(v) => Ok(v.to_stripe_index()?),
        }
    }
}

impl FooterAccess for FooterRef {
    fn version(&self) -> u32 {
        match self {
            Loaded::Parsed(f) => f.version(),
            Loaded::View(v) => v.version(),
        }
    }

    fn num_rows(&self) -> u64 {
        match self {
            Loaded::Parsed(f) => f.num_rows(),
            Loaded::View(v) => v.num_rows(),
        }
    }

    fn num_columns(&self) -> usize {
        match self {
            Loaded::Parsed(f) => f.num_columns(),
            Loaded::View(v) => v.num_columns(),
        }
    }

    fn column_type(&self, col: usize) -> Result<ColumnType, FormatError> {
        match self {
            Loaded::Parsed(f) => f.column_type(col),
            Loaded::View(v) => v.column_type(col),
        }
    }

    fn num_stripes(&self) -> usize {
        match self {
            Loaded::Parsed(f) => f.num_stripes(),
            Loaded::View(v) => v.num_stripes(),
        }
    }

    fn stripe(&self, idx: usize) -> Result<StripeInfo, FormatError> {
        match self {
            Loaded::Parsed(f) => f.stripe(idx),
            Loaded::View(v) => v.stripe(idx),
        }
    }

    fn file_stats(&self, col: usize) -> Result<StatsRef<'_>, FormatError> {
        match self {
            Loaded::Parsed(f) => f.file_stats(col),
            Loaded::View(v) => v.file_stats(col),
        }
    }
}

impl StripeFooterAccess for StripeFooterRef {
    fn num_streams(&self) -> usize {
        match self {
            Loaded::Parsed(f) => f.num_streams(),
            Loaded::View(v) => v.num_streams(),
        }
    }

    fn stream(&self, col: usize) -> Result<StreamInfo, FormatError> {
        match self {
            Loaded::Parsed(f) => f.stream(col),
            Loaded::View(v) => v.stream(col),
        }
    }
}

impl StripeIndexAccess for StripeIndexRef {
    fn num_columns(&self) -> usize {
        match self {
            Loaded::Parsed(f) => f.num_columns(),
            Loaded::View(v) => v.num_columns(),
        }
    }

    fn num_row_groups(&self) -> usize {
        match self {
            Loaded::Parsed(f) => f.num_row_groups(),
            Loaded::View(v) => v.num_row_groups(),
        }
    }

    fn stripe_stats(&self, col: usize) -> Result<StatsRef<'_>, FormatError> {
        match self {
            Loaded::Parsed(f) => f.stripe_stats(col),
            Loaded::View(v) => v.stripe_stats(col),
        }
    }

    fn row_group(&self, col: usize, group: usize) -> Result<RowGroupRef<'_>, FormatError> {
        match self {
            Loaded::Parsed(f) => f.row_group(col, group),
            Loaded::View(v) => v.row_group(col, group),
        }
    }
}

/// An opened file: its identity, byte source and footer.
pub struct FileHandle {
    identity: FileIdentity,
    src: Arc<dyn FileSource>,
    footer: FooterRef,
    types: Vec<ColumnType>,
}

impl fmt::Debug for FileHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FileHandle")
            .field("identity", &self.identity)
            .field("footer", &self.footer)
            .finish_non_exhaustive()
    }
}

impl FileHandle {
    pub fn identity(&self) -> &FileIdentity {
        &self.identity
    }

    pub fn path(&self) -> &Path {
        &self.identity.path
    }

    pub fn footer(&self) -> &FooterRef {
        &self.footer
    }

    pub fn column_types(&self) -> &[ColumnType] {
        &self.types
    }

    pub fn num_stripes(&self) -> usize {
        self.footer.num_stripes()
    }

    pub fn splits(self: &Arc<Self>) -> Vec<Split> {
        (0..self.num_stripes())
            .map(|stripe| Split {
                file: Arc::clone(self),
                stripe,
            })
            .collect()
    }
}

/// One stripe of one file: the unit of parallel work.
#[derive(Debug, Clone)]
pub struct Split {
    pub file: Arc<FileHandle>,
    pub stripe: usize,
}

#[derive(Debug, Clone)]
pub struct StripeMeta {
    pub footer: StripeFooterRef,
    pub index: StripeIndexRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutput {
    pub result: ScanResult,
    /// Cache statistics delta over the query.
    pub stats: CacheStats,
}

pub struct ScanEngine {
    cache: Arc<MetaCache>,
    mode: CacheMode,
    storage: Arc<dyn Storage>,
    workers: usize,
    pushdown: bool,
}

impl ScanEngine {
    /// The cache handle also carries the cost counters, so it is required in
    /// every mode; mode `None` never reads or writes entries.
    pub fn new(cache: Arc<MetaCache>, mode: CacheMode, storage: Arc<dyn Storage>) -> Self {
        ScanEngine {
            cache,
            mode,
            storage,
            workers: 1,
            pushdown: true,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_pushdown(mut self, enabled: bool) -> Self {
        self.pushdown = enabled;
        self
    }

    pub fn mode(&self) -> CacheMode {
        self.mode
    }

    pub fn cache(&self) -> &Arc<MetaCache> {
        &self.cache
    }

    fn cached(&self, key: &CacheKey, kind: ValueKind) -> Option<Arc<[u8]>> {
        match self.cache.get(key) {
            Ok(Some(v)) if v.kind == kind => Some(v.payload),
            Ok(Some(v)) => {
                warn!("cache entry {key} holds {:?}, expected {kind:?}; reading from storage", v.kind);
                None
            }
            Ok(None) => None,
            Err(e) => {
                warn!("cache lookup for {key} failed, reading from storage: {e}");
                None
            }
        }
    }

    fn store(&self, key: CacheKey, value: CacheValue) {
        match self.cache.put(key, value) {
            Ok(_) => {}
            Err(e @ CacheError::Oversize { .. }) => debug!("not caching {key}: {e}"),
            Err(e) => warn!("cache insert for {key} failed: {e}"),
        }
    }

    /// The mode-dependent read path shared by all three section types.
    /// `fetch` returns the compressed section from storage; `parse` turns
    /// inflated bytes into the checked owned form.
    fn load<P, V>(
        &self,
        key: CacheKey,
        fetch: impl FnOnce() -> Result<Vec<u8>, FormatError>,
        parse: impl Fn(&[u8]) -> Result<P, FormatError>,
        encode: impl FnOnce(&P) -> ObjectBuffer,
        decode: impl FnOnce(Arc<[u8]>) -> Result<V, FormatError>,
    ) -> Result<Loaded<P, V>, FormatError> {
        let counters = self.cache.counters();
        match self.mode {
            CacheMode::None => Ok(Loaded::Parsed(parse(&counters.inflate(&fetch()?)?)?)),
            CacheMode::Bytes => {
                if let Some(raw) = self.cached(&key, ValueKind::RawDecompressed) {
                    match parse(&raw) {
                        Ok(p) => return Ok(Loaded::Parsed(p)),
                        Err(e) => warn!("cached bytes for {key} do not parse, reading from storage: {e}"),
                    }
                }
                let raw = counters.inflate(&fetch()?)?;
                let parsed = parse(&raw)?;
                self.store(key, CacheValue::raw(raw));
                Ok(Loaded::Parsed(parsed))
            }
            CacheMode::Objects => {
                if let Some(buf) = self.cached(&key, ValueKind::ObjectBuffer) {
                    match decode(buf) {
                        Ok(v) => return Ok(Loaded::View(v)),
                        Err(e) => warn!("cached buffer for {key} is invalid, reading from storage: {e}"),
                    }
                }
                let parsed = parse(&counters.inflate(&fetch()?)?)?;
                self.store(key, CacheValue::object(encode(&parsed)));
                Ok(Loaded::Parsed(parsed))
            }
        }
    }

    pub fn open_file(&self, path: &Path) -> Result<Arc<FileHandle>, ScanError> {
        let (identity, src) = self.storage.open(path).map_err(|source| ScanError::Io {
            path: path.to_owned(),
            source,
        })?;
        let counters = self.cache.counters();
        let footer_offset = Cell::new(None);
        let footer = self
            .load(
                CacheKey::footer(identity.file_id),
                || {
                    let (compressed, loc) = read_footer_section(&*src)?;
                    footer_offset.set(Some(loc.offset));
                    Ok(compressed)
                },
                |raw| {
                    let f = counters.parse_footer(raw)?;
                    match footer_offset.get() {
                        Some(offset) => f.validate(offset)?,
                        None if f.columns.is_empty() || f.stripes.is_empty() => {
                            return Err(corrupt("cached footer has no columns or stripes".into()))
                        }
                        None => {}
                    }
                    Ok(f)
                },
                |f| counters.encode_footer(f),
                |buf| Ok(counters.decode_footer(buf)?),
            )
            .map_err(file_err(&identity.path))?;
        if footer.num_columns() == 0 || footer.num_stripes() == 0 {
            return Err(file_err(&identity.path)(corrupt("footer has no columns or stripes".into())));
        }
        let types = (0..footer.num_columns())
            .map(|c| footer.column_type(c))
            .collect::<Result<Vec<_>, _>>()
            .map_err(file_err(&identity.path))?;
        Ok(Arc::new(FileHandle {
            identity,
            src,
            footer,
            types,
        }))
    }

    /// Loads a stripe's footer and index through the cache.
    pub fn load_stripe_metadata(&self, file: &FileHandle, stripe: usize) -> Result<StripeMeta, ScanError> {
        self.load_stripe_inner(file, stripe).map_err(file_err(file.path()))
    }

    fn load_stripe_inner(&self, file: &FileHandle, stripe: usize) -> Result<StripeMeta, FormatError> {
        let info = file.footer.stripe(stripe)?;
        let ordinal = u32::try_from(stripe).map_err(|_| corrupt(format!("stripe ordinal {stripe} too large")))?;
        let ncols = file.types.len();
        let id = file.identity.file_id;
        let counters = self.cache.counters();

        let footer = self.load(
            CacheKey::stripe_footer(id, ordinal),
            || read_stripe_footer_section(&*file.src, &info),
            |raw| {
                let sf = counters.parse_stripe_footer(raw)?;
                check_streams(&sf, ncols, &info)?;
                Ok(sf)
            },
            |sf| counters.encode_stripe_footer(sf),
            |buf| Ok(counters.decode_stripe_footer(buf)?),
        )?;
        if footer.num_streams() != ncols {
            return Err(corrupt(format!(
                "stripe {stripe} footer lists {} streams for {ncols} columns",
                footer.num_streams()
            )));
        }

        let index = self.load(
            CacheKey::stripe_index(id, ordinal),
            || read_stripe_index_section(&*file.src, &info),
            |raw| counters.parse_stripe_index(raw, &file.types),
            |ix| counters.encode_stripe_index(ix, &file.types),
            |buf| Ok(counters.decode_stripe_index(buf)?),
        )?;
        let groups = num_row_groups(info.num_rows);
        if index.num_columns() != ncols || index.num_row_groups() as u64 != groups {
            return Err(corrupt(format!(
                "stripe {stripe} index has {} columns and {} row groups, expected {ncols} and {groups}",
                index.num_columns(),
                index.num_row_groups()
            )));
        }
        Ok(StripeMeta { footer, index })
    }

    /// Scans one stripe, skipping what the stripe and row-group statistics
    /// rule out when pushdown is enabled.
    pub fn scan_split(&self, split: &Split, pred: &Predicate, agg: Aggregate) -> Result<ScanResult, ScanError> {
        let file = &split.file;
        check_query(file.column_types(), pred, agg).map_err(ScanError::Query)?;
        self.scan_inner(split, pred, agg).map_err(file_err(file.path()))
    }

    fn scan_inner(&self, split: &Split, pred: &Predicate, agg: Aggregate) -> Result<ScanResult, FormatError> {
        let file = &split.file;
        let info = file.footer.stripe(split.stripe)?;
        let meta = self.load_stripe_inner(file, split.stripe)?;
        let ngroups = meta.index.num_row_groups();
        let mut out = ScanResult::empty(agg, file.column_types());

        if self.pushdown && self.must_skip(pred, info.num_rows, |c| meta.index.stripe_stats(c))? {
            out.stripes_skipped = 1;
            out.row_groups_skipped = ngroups as u64;
            return Ok(out);
        }

        let mut scan_groups = Vec::with_capacity(ngroups);
        for g in 0..ngroups {
            let rows = row_group_rows(info.num_rows, g);
            let skip = self.pushdown && self.must_skip(pred, rows, |c| Ok(meta.index.row_group(c, g)?.stats))?;
            if skip {
                out.row_groups_skipped += 1;
            } else {
                scan_groups.push(g);
            }
        }
        if scan_groups.is_empty() {
            return Ok(out);
        }

        // predicate columns first, then the aggregate column if not among them
        let mut needed: Vec<usize> = Vec::new();
        for c in pred.columns().chain(agg.column()) {
            if !needed.contains(&c) {
                needed.push(c);
            }
        }
        let chunks = needed
            .iter()
            .map(|&c| read_column_chunk(&*file.src, split.stripe, c, &file.footer, &meta.footer))
            .collect::<Result<Vec<ColumnChunk>, _>>()?;
        for (chunk, &c) in chunks.iter().zip(&needed) {
            if chunk.num_rows() as u64 != info.num_rows {
                return Err(corrupt(format!(
                    "column {c} chunk holds {} rows, stripe has {}",
                    chunk.num_rows(),
                    info.num_rows
                )));
            }
        }
        let slot = |c: usize| needed.iter().position(|&n| n == c).expect("column was requested");
        let atom_slots: Vec<usize> = pred.atoms.iter().map(|a| slot(a.column)).collect();
        let agg_slot = agg.column().map(slot);

        let mut acc = out.value.clone();
        for g in scan_groups {
            let rows = row_group_rows(info.num_rows, g) as usize;
            let first = g * ROW_GROUP_ROWS as usize;
            let decoded = chunks
                .iter()
                .zip(&needed)
                .map(|(chunk, &c)| chunk.decode_range(meta.index.row_group(c, g)?.byte_offset, first, rows))
                .collect::<Result<Vec<_>, _>>()?;
            for r in 0..rows {
                let matched = pred
                    .atoms
                    .iter()
                    .zip(&atom_slots)
                    .all(|(a, &s)| a.matches(decoded[s][r]));
                if matched {
                    out.rows_matched += 1;
                    acc.accumulate(agg_slot.and_then(|s| decoded[s][r]))?;
                }
            }
            out.rows_scanned += rows as u64;
            out.row_groups_scanned += 1;
        }
        out.value = acc;
        Ok(out)
    }

    fn must_skip<'a>(
        &self,
        pred: &Predicate,
        rows: u64,
        mut stats: impl FnMut(usize) -> Result<StatsRef<'a>, FormatError>,
    ) -> Result<bool, FormatError> {
        for atom in &pred.atoms {
            if eval_atom(atom, &stats(atom.column)?, rows) == Pushdown::MustSkip {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Opens every file, scans every split, and folds the per-split results
    /// in file then stripe order.
    pub fn run_query(&self, files: &[PathBuf], pred: &Predicate, agg: Aggregate) -> Result<QueryOutput, ScanError> {
        if files.is_empty() {
            return Err(ScanError::Query("dataset has no files".into()));
        }
        let before = self.cache.stats_snapshot();
        let handles = self.parallel_map(files, |p| self.open_file(p))?;
        let first_types = handles[0].column_types();
        for h in &handles {
            check_query(h.column_types(), pred, agg)
                .map_err(|e| ScanError::Query(format!("{}: {e}", h.path().display())))?;
            if agg.column().is_some() && h.column_types() != first_types {
                return Err(ScanError::Query(format!(
                    "{}: schema differs from {}",
                    h.path().display(),
                    handles[0].path().display()
                )));
            }
        }
        let splits: Vec<Split> = handles.iter().flat_map(|h| h.splits()).collect();
        let parts = self.parallel_map(&splits, |s| self.scan_split(s, pred, agg))?;
        let mut result = ScanResult::empty(agg, first_types);
        for p in &parts {
            result.merge(p);
        }
        Ok(QueryOutput {
            result,
            stats: self.cache.stats_snapshot().delta_since(&before),
        })
    }

    /// Maps `f` over `items` on the configured workers, preserving order.
    /// The error of the lowest-indexed failing item wins.
    fn parallel_map<T: Sync, R: Send>(
        &self,
        items: &[T],
        f: impl Fn(&T) -> Result<R, ScanError> + Sync,
    ) -> Result<Vec<R>, ScanError> {
        let workers = self.workers.min(items.len());
        if workers <= 1 {
            return items.iter().map(f).collect();
        }
        let next = AtomicUsize::new(0);
        let mut results: Vec<(usize, Result<R, ScanError>)> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    s.spawn(|| {
                        let mut local = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            let Some(item) = items.get(i) else { break };
                            local.push((i, f(item)));
                        }
                        local
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("scan worker panicked"))
                .collect()
        });
        results.sort_by_key(|(i, _)| *i);
        results.into_iter().map(|(_, r)| r).collect()
    }
}

fn check_streams(sf: &StripeFooter, ncols: usize, info: &StripeInfo) -> Result<(), FormatError> {
    if sf.streams.len() != ncols {
        return Err(corrupt(format!("stripe footer lists {} streams for {ncols} columns", sf.streams.len())));
    }
    let mut expected = 0u64;
    for (i, s) in sf.streams.iter().enumerate() {
        if s.chunk_offset != expected {
            return Err(corrupt(format!("stream {i} starts at {} instead of {expected}", s.chunk_offset)));
        }
        expected = expected
            .checked_add(s.chunk_len)
            .ok_or_else(|| corrupt(format!("stream {i} length overflow")))?;
    }
    if expected != info.data_len {
        return Err(corrupt(format!("streams cover {expected} bytes of a {}-byte data region", info.data_len)));
    }
    Ok(())
}

fn check_query(types: &[ColumnType], pred: &Predicate, agg: Aggregate) -> Result<(), String> {
    pred.check(types)?;
    if let Some(c) = agg.column() {
        let ty = types
            .get(c)
            .ok_or_else(|| format!("aggregate column {c} out of range ({} columns)", types.len()))?;
        if matches!(agg, Aggregate::Sum(_)) && !ty.is_numeric() {
            return Err(format!("sum over non-numeric column {c}"));
        }
    }
    Ok(())
}

impl AggValue {
    fn accumulate(&mut self, v: Option<crate::colfile::ValueRef<'_>>) -> Result<(), FormatError> {
        self.add_row(v)
            .map_err(|e| corrupt(format!("invalid utf-8 in string value: {e}")))
    }
}

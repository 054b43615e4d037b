//! Deterministic dataset generation and the on-disk manifest.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stripecache::colfile::{write_file, Column, ColumnType, Row, Value, WrittenFile};

use crate::BenchError;

pub const MANIFEST_NAME: &str = "manifest.json";

/// Generator over the splitmix64 stream seeded with `seed` as its state.
pub fn splitmix64(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Parses a column spec: either a count of Int64 columns (`"4"`) or one
/// letter per column, `i` Int64, `f` Float64, `s` Utf8 (`"iifs"`).
pub fn parse_cols(spec: &str) -> Result<Vec<ColumnType>, BenchError> {
    let usage = || BenchError::Usage(format!("bad column spec {spec:?}: use a count or letters from i/f/s"));
    if let Ok(n) = spec.parse::<usize>() {
        return if n == 0 { Err(usage()) } else { Ok(vec![ColumnType::Int64; n]) };
    }
    if spec.is_empty() {
        return Err(usage());
    }
    spec.chars()
        .map(|c| match c {
            'i' => Ok(ColumnType::Int64),
            'f' => Ok(ColumnType::Float64),
            's' => Ok(ColumnType::Utf8),
            _ => Err(usage()),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub files: usize,
    pub stripes: usize,
    pub rows: usize,
    pub cols: String,
}

impl GenSpec {
    pub fn validate(&self) -> Result<Vec<ColumnType>, BenchError> {
        if self.files == 0 || self.stripes == 0 || self.rows == 0 {
            return Err(BenchError::Usage("files, stripes and rows must all be at least 1".into()));
        }
        parse_cols(&self.cols)
    }

    pub fn schema(&self) -> Result<Vec<Column>, BenchError> {
        Ok(self
            .validate()?
            .into_iter()
            .enumerate()
            .map(|(i, ty)| Column::new(format!("c{i}"), ty))
            .collect())
    }

    pub fn file_name(index: usize) -> String {
        format!("part-{index:05}.ocf")
    }

    /// Builds file `index`. Values are drawn row-major from a stream seeded
    /// with `seed ^ index`.
    pub fn generate_file(&self, index: usize) -> Result<WrittenFile, BenchError> {
        let schema = self.schema()?;
        let mut rng = splitmix64(self.seed ^ index as u64);
        let rows: Vec<Row> = (0..self.stripes * self.rows)
            .map(|_| schema.iter().map(|c| Some(draw(&mut rng, c.ty))).collect())
            .collect();
        Ok(write_file(&schema, &rows, self.rows)?)
    }
}

fn draw(rng: &mut SplitMix64, ty: ColumnType) -> Value {
    match ty {
        ColumnType::Int64 => Value::Int64((rng.next_u64() % 1_000_000) as i64),
        ColumnType::Float64 => Value::Float64(rng.next_u64() as f64 / 2f64.powi(64)),
        ColumnType::Utf8 => {
            let len = 8 + (rng.next_u64() % 9) as usize;
            let s = (0..len).map(|_| (b'a' + (rng.next_u64() % 26) as u8) as char).collect();
            Value::Utf8(s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFile {
    /// Relative to the dataset directory.
    pub path: String,
    pub size: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: GenSpec,
    pub files: Vec<ManifestFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes the dataset described by `spec` into `out`, which must be empty
/// or absent.
pub fn cmd_gen(spec: &GenSpec, out: &Path) -> Result<Manifest, BenchError> {
    spec.validate()?;
    match fs::read_dir(out) {
        Ok(mut entries) => {
            if entries.next().is_some() {
                return Err(BenchError::Usage(format!(
                    "output directory {} is not empty",
                    out.display()
                )));
            }
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(BenchError::io(out, e)),
    }
    fs::create_dir_all(out).map_err(|e| BenchError::io(out, e))?;

    let mut files = Vec::with_capacity(spec.files);
    for i in 0..spec.files {
        let written = spec.generate_file(i)?;
        let name = GenSpec::file_name(i);
        let path = out.join(&name);
        fs::write(&path, &written.bytes).map_err(|e| BenchError::io(&path, e))?;
        files.push(ManifestFile {
            path: name,
            size: written.bytes.len() as u64,
            sha256: sha256_hex(&written.bytes),
        });
    }
    let manifest = Manifest {
        spec: spec.clone(),
        files,
    };
    let path = out.join(MANIFEST_NAME);
    let mut f = fs::File::create(&path).map_err(|e| BenchError::io(&path, e))?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n").map_err(|e| BenchError::io(&path, e))?;
    Ok(manifest)
}

/// A verified dataset on disk.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub paths: Vec<PathBuf>,
}

/// Loads the manifest and checks every file's size and checksum.
pub fn load_dataset(dir: &Path) -> Result<Dataset, BenchError> {
    let mpath = dir.join(MANIFEST_NAME);
    let text = fs::read_to_string(&mpath).map_err(|e| BenchError::io(&mpath, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    if manifest.files.is_empty() {
        return Err(BenchError::StaleDataset(format!("{} lists no files", mpath.display())));
    }
    let mut paths = Vec::with_capacity(manifest.files.len());
    for f in &manifest.files {
        let path = dir.join(&f.path);
        let bytes = fs::read(&path).map_err(|e| BenchError::io(&path, e))?;
        if bytes.len() as u64 != f.size || sha256_hex(&bytes) != f.sha256 {
            return Err(BenchError::StaleDataset(format!(
                "{} does not match its manifest checksum",
                path.display()
            )));
        }
        paths.push(path);
    }
    Ok(Dataset {
        dir: dir.to_owned(),
        manifest,
        paths,
    })
}

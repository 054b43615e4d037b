use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stripecache::metacache::Policy;
use stripecache::scan::CacheMode;
use stripecache_bench::gen::{cmd_gen, GenSpec};
use stripecache_bench::report::{cmd_report, REPORT_ERROR};
use stripecache_bench::run::{cmd_run, RunConfig};
use stripecache_bench::stress::{cmd_stress, StressConfig};
use stripecache_bench::workload::Workload;
use stripecache_bench::BenchError;

/// Worker threads per query unless BENCH_WORKERS says otherwise.
const DEFAULT_WORKERS: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "bench", about = "Cold/warm metadata cache benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Write a deterministic dataset and its manifest into an empty directory.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        files: usize,
        #[arg(long)]
        stripes: usize,
        #[arg(long)]
        rows: usize,
        /// Column count (all Int64) or letters from i/f/s, e.g. "iifs".
        #[arg(long)]
        cols: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// One cold pass and REPS warm passes of a workload; rows appended to CSV.
    Run {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        workload: Workload,
        #[arg(long)]
        mode: CacheMode,
        #[arg(long)]
        capacity: u64,
        #[arg(long, default_value = "lru")]
        policy: Policy,
        #[arg(long, default_value_t = 5)]
        reps: u32,
        #[arg(long)]
        csv: PathBuf,
        /// Keep the cache on disk under this directory instead of in memory.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Compare modes per scenario from one or more CSV files.
    Report {
        #[arg(long = "csv", required = true, num_args = 1..)]
        csv: Vec<PathBuf>,
        /// Also write the summary table as CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Warm passes with a cache smaller than the metadata working set.
    Stress {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        capacity: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "lru")]
        policy: Policy,
        #[arg(long, default_value = "objects")]
        mode: CacheMode,
        #[arg(long, default_value = "W3")]
        workload: Workload,
        #[arg(long, default_value_t = 5)]
        reps: u32,
    },
}

fn workers() -> Result<usize, BenchError> {
    match std::env::var("BENCH_WORKERS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(BenchError::Usage(format!("BENCH_WORKERS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(DEFAULT_WORKERS),
    }
}

fn dispatch(cmd: Cmd) -> Result<i32, BenchError> {
    match cmd {
        Cmd::Gen { seed, files, stripes, rows, cols, out } => {
            let spec = GenSpec { seed, files, stripes, rows, cols };
            let m = cmd_gen(&spec, &out)?;
            let bytes: u64 = m.files.iter().map(|f| f.size).sum();
            println!("wrote {} files ({bytes} bytes) to {}", m.files.len(), out.display());
        }
        Cmd::Run { data, workload, mode, capacity, policy, reps, csv, cache_dir } => {
            let cfg = RunConfig {
                workload,
                mode,
                capacity_bytes: capacity,
                policy,
                reps,
                workers: workers()?,
                cache_dir,
            };
            let out = cmd_run(&data, &cfg, &csv)?;
            for r in &out.rows {
                println!(
                    "{} {} {} run {}: cpu {:.3} ms, hits {}, misses {}",
                    r.scenario, r.mode, r.phase, r.run, r.cpu_ms, r.hits, r.misses
                );
            }
        }
        Cmd::Report { csv, summary } => {
            let out = cmd_report(&csv, summary.as_deref())?;
            print!("{}", out.text);
            return Ok(out.exit_code());
        }
        Cmd::Stress { data, capacity, csv, policy, mode, workload, reps } => {
            let cfg = StressConfig {
                workload,
                mode,
                capacity_bytes: capacity,
                policy,
                reps,
                workers: workers()?,
            };
            let out = cmd_stress(&data, &cfg, &csv)?;
            println!(
                "working set {} B, capacity {capacity} B: hit rate {:.3}, evictions {}",
                out.working_set,
                out.hit_rate(),
                out.evictions
            );
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            REPORT_ERROR
        }
    };
    ExitCode::from(code as u8)
}

//! Per-scenario comparison of the three cache modes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use stripecache::scan::CacheMode;

use crate::run::{read_csv, BenchRow};
use crate::BenchError;

/// Exit-status bits.
pub const WARM_ORDER_NOT_ESTABLISHED: i32 = 1;
pub const COLD_ORDER_NOT_ESTABLISHED: i32 = 2;
pub const REPORT_ERROR: i32 = 16;

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// `(value - base) / base` in percent; 0 when the base is 0.
pub fn relative_pct(value: f64, base: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        (value - base) / base * 100.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub phase: String,
    pub mode: String,
    pub runs: usize,
    pub median_cpu_ms: f64,
    /// Cold: overhead vs none. Warm: reduction vs none. Percent.
    pub vs_none_pct: f64,
    pub inflate_per_pass: f64,
    pub deserialize_per_pass: f64,
    pub encode_per_pass: f64,
    pub decode_per_pass: f64,
    pub hits_per_pass: f64,
    pub misses_per_pass: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ReportOutput {
    pub text: String,
    pub summary: Vec<SummaryRow>,
    pub warm_established: bool,
    pub cold_established: bool,
}

impl ReportOutput {
    pub fn exit_code(&self) -> i32 {
        let mut code = 0;
        if !self.warm_established {
            code |= WARM_ORDER_NOT_ESTABLISHED;
        }
        if !self.cold_established {
            code |= COLD_ORDER_NOT_ESTABLISHED;
        }
        code
    }
}

fn summarize(scenario: &str, phase: &str, mode: &str, rows: &[&BenchRow], base: Option<f64>) -> SummaryRow {
    let n = rows.len() as f64;
    let mean = |f: fn(&BenchRow) -> u64| rows.iter().map(|r| f(r) as f64).sum::<f64>() / n;
    let med = median(&mut rows.iter().map(|r| r.cpu_ms).collect::<Vec<_>>()).unwrap_or(0.0);
    let vs_none = match (phase, base) {
        ("cold", Some(b)) => relative_pct(med, b),
        ("warm", Some(b)) => -relative_pct(med, b),
        _ => 0.0,
    };
    SummaryRow {
        scenario: scenario.to_owned(),
        phase: phase.to_owned(),
        mode: mode.to_owned(),
        runs: rows.len(),
        median_cpu_ms: med,
        vs_none_pct: vs_none,
        inflate_per_pass: mean(|r| r.inflate_count),
        deserialize_per_pass: mean(|r| r.deserialize_count),
        encode_per_pass: mean(|r| r.encode_count),
        decode_per_pass: mean(|r| r.decode_count),
        hits_per_pass: mean(|r| r.hits),
        misses_per_pass: mean(|r| r.misses),
    }
}

fn established(flag: bool) -> &'static str {
    if flag {
        "established"
    } else {
        "not established"
    }
}

/// Builds the comparison. Scenarios named `stress-*` are summarized by hit
/// rate and evictions and take no part in the orderings.
pub fn build_report(rows: &[BenchRow]) -> Result<ReportOutput, BenchError> {
    let mut by_scenario: BTreeMap<&str, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        by_scenario.entry(&r.scenario).or_default().push(r);
    }
    if by_scenario.is_empty() {
        return Err(BenchError::Report("no rows to report".into()));
    }
    let modes = CacheMode::ALL.map(|m| m.to_string());
    let mut gaps = Vec::new();
    let mut out = ReportOutput {
        warm_established: true,
        cold_established: true,
        ..Default::default()
    };
    let mut text = String::new();
    let t = &mut text;
    let mut compared = 0;

    for (scenario, rows) in &by_scenario {
        if scenario.starts_with("stress-") {
            let warm: Vec<_> = rows.iter().filter(|r| r.phase == "warm").collect();
            let (hits, misses, ev) = warm.iter().fold((0, 0, 0), |(h, m, e), r| (h + r.hits, m + r.misses, e + r.evictions));
            let rate = if hits + misses == 0 { 0.0 } else { hits as f64 / (hits + misses) as f64 };
            writeln!(t, "scenario {scenario}: {} warm passes, hit rate {:.3}, evictions {ev}", warm.len(), rate).unwrap();
            continue;
        }
        let mut groups: BTreeMap<(&str, &str), Vec<&BenchRow>> = BTreeMap::new();
        for r in rows {
            groups.entry((r.phase.as_str(), r.mode.as_str())).or_default().push(r);
        }
        let missing: Vec<String> = ["cold", "warm"]
            .iter()
            .flat_map(|p| modes.iter().map(move |m| (*p, m.as_str())))
            .filter(|k| !groups.contains_key(k))
            .map(|(p, m)| format!("{m}/{p}"))
            .collect();
        if !missing.is_empty() {
            gaps.push(format!("{scenario}: missing {}", missing.join(", ")));
            continue;
        }
        compared += 1;
        writeln!(t, "scenario {scenario}").unwrap();
        writeln!(
            t,
            "  {:<5} {:<8} {:>4} {:>14} {:>9} {:>9} {:>11} {:>8} {:>8}",
            "phase", "mode", "runs", "median_cpu_ms", "vs_none", "inflate", "deserialize", "encode", "decode"
        )
        .unwrap();
        for phase in ["cold", "warm"] {
            let none_med = median(&mut groups[&(phase, "none")].iter().map(|r| r.cpu_ms).collect::<Vec<_>>());
            let mut meds = Vec::new();
            for mode in &modes {
                let s = summarize(scenario, phase, mode, &groups[&(phase, mode.as_str())], none_med);
                // signed CPU change vs none: + is overhead, - is reduction
                let label = match none_med {
                    Some(n) if mode != "none" => format!("{:+.1}%", relative_pct(s.median_cpu_ms, n)),
                    _ => "-".to_owned(),
                };
                writeln!(
                    t,
                    "  {:<5} {:<8} {:>4} {:>14.3} {:>9} {:>9.1} {:>11.1} {:>8.1} {:>8.1}",
                    phase, mode, s.runs, s.median_cpu_ms, label,
                    s.inflate_per_pass, s.deserialize_per_pass, s.encode_per_pass, s.decode_per_pass
                )
                .unwrap();
                meds.push(s.median_cpu_ms);
                out.summary.push(s);
            }
            let [none, bytes, objects] = [meds[0], meds[1], meds[2]];
            let (ok, desc) = if phase == "cold" {
                (none < bytes && bytes < objects, "none < bytes < objects")
            } else {
                (objects < bytes && bytes < none, "objects < bytes < none")
            };
            writeln!(t, "  {phase} ordering {desc}: {}", established(ok)).unwrap();
            if phase == "cold" {
                out.cold_established &= ok;
            } else {
                out.warm_established &= ok;
            }
        }
    }
    if !gaps.is_empty() {
        return Err(BenchError::Report(format!("incomplete scenarios: {}", gaps.join("; "))));
    }
    if compared == 0 {
        out.warm_established = false;
        out.cold_established = false;
    }
    out.text = text;
    Ok(out)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))?;
    Ok(())
}

pub fn cmd_report(csvs: &[PathBuf], summary: Option<&Path>) -> Result<ReportOutput, BenchError> {
    let mut rows = Vec::new();
    for p in csvs {
        rows.extend(read_csv(p)?);
    }
    let out = build_report(&rows)?;
    if let Some(path) = summary {
        write_summary(path, &out.summary)?;
    }
    Ok(out)
}

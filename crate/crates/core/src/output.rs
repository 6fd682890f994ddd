//! CSV and line-delimited outputs with fixed, documented schemas.
//!
//! Column orders are stable and all floating-point fields use fixed-precision
//! formatting, so identical reports serialize to identical bytes.
//!
//! - `metrics.csv`: policy, seed, mean_latency_ms, p95_latency_ms, plr,
//!   handovers, approx_error, regret_final, wall_ms_opt, wall_ms_lvq
//! - `latency_cdf.csv`: policy, seed, bin_ms, cum_fraction
//! - `summary.csv`: policy, metric, mean, ci_halfwidth
//! - `samples.jsonl`: one labeled candidate record per line

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{BatchReport, RunReport};

pub const METRICS_HEADER: &str = "policy,seed,mean_latency_ms,p95_latency_ms,plr,handovers,approx_error,regret_final,wall_ms_opt,wall_ms_lvq";
pub const CDF_HEADER: &str = "policy,seed,bin_ms,cum_fraction";
pub const SUMMARY_HEADER: &str = "policy,metric,mean,ci_halfwidth";

pub fn metrics_csv(runs: &[RunReport]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in runs {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{},{:.6},{:.6},{:.3},{:.3}\n",
            r.policy_label,
            r.seed,
            r.mean_latency_s * 1000.0,
            r.p95_latency_ms,
            r.plr,
            r.handovers,
            r.approx_error,
            r.regret_final,
            r.wall_ms_opt,
            r.wall_ms_lvq,
        ));
    }
    out
}

pub fn cdf_csv(runs: &[RunReport]) -> String {
    let mut out = String::from(CDF_HEADER);
    out.push('\n');
    for r in runs {
        for &(bin_ms, frac) in &r.latency_cdf {
            out.push_str(&format!("{},{},{},{:.6}\n", r.policy_label, r.seed, bin_ms, frac));
        }
    }
    out
}

pub fn summary_csv(report: &BatchReport) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in &report.summary {
        out.push_str(&format!(
            "{},{},{:.6},{:.6}\n",
            row.policy_label, row.metric, row.mean, row.ci_halfwidth
        ));
    }
    out
}

pub fn samples_jsonl(runs: &[RunReport]) -> Result<String> {
    let mut out = String::new();
    for r in runs {
        for rec in &r.sample_records {
            let line = serde_json::to_string(rec)
                .map_err(|e| Error::config(format!("sample serialization failed: {e}")))?;
            out.push_str(&line);
            out.push('\n');
        }
    }
    Ok(out)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(contents.as_bytes()).map_err(|e| Error::io(&path, e))?;
    w.flush().map_err(|e| Error::io(&path, e))
}

/// Write the standard output set into `dir`, creating it if needed.
pub fn write_outputs(report: &BatchReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(dir, "metrics.csv", &metrics_csv(&report.runs))?;
    write_file(dir, "latency_cdf.csv", &cdf_csv(&report.runs))?;
    write_file(dir, "summary.csv", &summary_csv(report))?;
    write_file(dir, "samples.jsonl", &samples_jsonl(&report.runs)?)?;
    Ok(())
}

//! Run and batch metric containers, latency histograms, and Student-t
//! confidence intervals.
//!
//! Decision-layer "wall" columns in reports are modeled: deterministic
//! operation counts converted to milliseconds at a fixed nominal rate, so
//! output files are byte-stable across invocations. Real measured timings are
//! carried separately for interactive display only.

use crate::error::{Error, Result};

/// Nominal decision-layer throughput used to convert deterministic operation
/// counts into millisecond-scale figures.
pub const MODELED_OPS_PER_MS: f64 = 100_000.0;

/// One (interval, cell) row of the analytical descriptor trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LittleRecord {
    pub interval: usize,
    pub cell: usize,
    pub lambda: f64,
    pub w: f64,
    pub q: f64,
}

/// One labeled-sample log line: a candidate pair's raw features plus the cell
/// actually chosen for that user.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SampleRecord {
    pub interval: usize,
    pub user: usize,
    pub cell: usize,
    pub chosen: usize,
    pub features: [f64; 5],
    pub source: &'static str,
}

/// Streaming latency statistics over 1 ms bins.
#[derive(Debug, Clone)]
pub struct LatencyHistogram {
    bins: Vec<u64>,
    count: u64,
    sum_s: f64,
}

const MAX_BIN_MS: usize = 120_000;

impl LatencyHistogram {
    pub fn new() -> Self {
        LatencyHistogram { bins: Vec::new(), count: 0, sum_s: 0.0 }
    }

    pub fn record(&mut self, delay_s: f64) {
        let bin = (delay_s * 1000.0).ceil().max(1.0) as usize;
        let bin = bin.min(MAX_BIN_MS);
        if bin >= self.bins.len() {
            self.bins.resize(bin + 1, 0);
        }
        self.bins[bin] += 1;
        self.count += 1;
        self.sum_s += delay_s;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean_s(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum_s / self.count as f64
        }
    }

    /// Interpolated quantile in milliseconds from the 1 ms bins.
    pub fn quantile_ms(&self, q: f64) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        let target = q * self.count as f64;
        let mut cum = 0u64;
        for (bin, &n) in self.bins.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let next = cum + n;
            if next as f64 >= target {
                let within = (target - cum as f64) / n as f64;
                return (bin as f64 - 1.0) + within.clamp(0.0, 1.0);
            }
            cum = next;
        }
        (self.bins.len() - 1) as f64
    }

    /// Non-decreasing CDF rows `(bin_ms, cumulative fraction)` ending at 1.
    pub fn cdf_rows(&self) -> Vec<(u32, f64)> {
        let mut rows = Vec::new();
        if self.count == 0 {
            return rows;
        }
        let mut cum = 0u64;
        let last = self.bins.len() - 1;
        for (bin, &n) in self.bins.iter().enumerate() {
            if bin == 0 {
                continue;
            }
            cum += n;
            if n > 0 || bin == last {
                rows.push((bin as u32, cum as f64 / self.count as f64));
            }
        }
        rows
    }
}

impl Default for LatencyHistogram {
    fn default() -> Self {
        Self::new()
    }
}

/// Everything measured in one simulation run (warm-up excluded unless noted).
#[derive(Debug, Clone)]
pub struct RunReport {
    pub policy_label: String,
    pub seed: u64,
    pub mean_latency_s: f64,
    pub p95_latency_ms: f64,
    pub plr: f64,
    pub handovers: u64,
    /// Mean disagreement between classifier predictions and the optimizer
    /// over hybrid intervals; zero when no classifier ran.
    pub approx_error: f64,
    pub regret_final: f64,
    /// Modeled decision-layer cost (deterministic; see [`MODELED_OPS_PER_MS`]).
    pub wall_ms_opt: f64,
    pub wall_ms_lvq: f64,
    /// Real measured decision-layer timings (not written to CSV outputs).
    pub measured_opt_ms: f64,
    pub measured_lvq_ms: f64,
    pub solver_calls: u64,
    pub solver_iterations_total: u64,
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub conservation_violations: u64,
    pub eq3_violations: u64,
    pub eq4_violations: u64,
    pub samples_emitted: u64,
    pub lvq_fallback_events: u64,
    pub validation_disagreement: Option<f64>,
    pub reopt_events: u64,
    pub trigger_events: u64,
    pub latency_cdf: Vec<(u32, f64)>,
    /// Composite QoS per interval, full run (trigger input).
    pub qos_trace: Vec<f64>,
    /// (interval, per-interval classifier/optimizer disagreement fraction).
    pub approx_trace: Vec<(usize, f64)>,
    /// (interval, objective gap of classifier vs optimizer decision).
    pub regret_increments: Vec<(usize, f64)>,
    pub little_trace: Vec<LittleRecord>,
    pub sample_records: Vec<SampleRecord>,
    /// Applied assignment per interval when recording was enabled.
    pub decisions: Option<Vec<Vec<usize>>>,
    /// Intervals on which the labeler's decision was applied.
    pub labeler_intervals: Vec<usize>,
    /// Fingerprints of policy-independent streams for paired-seed checks.
    pub topology_fingerprint: u64,
    pub mobility_fingerprint: u64,
    pub traffic_fingerprint: u64,
}

/// Per-metric aggregate across the runs of one policy.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub policy_label: String,
    pub metric: &'static str,
    pub mean: f64,
    pub ci_halfwidth: f64,
}

/// A batch of runs plus per-policy aggregates.
#[derive(Debug, Clone)]
pub struct BatchReport {
    pub runs: Vec<RunReport>,
    pub summary: Vec<SummaryRow>,
}

/// Metrics summarized per policy, in fixed output order.
pub const SUMMARY_METRICS: [&str; 6] = [
    "mean_latency_ms",
    "p95_latency_ms",
    "plr",
    "handovers",
    "approx_error",
    "regret_final",
];

pub fn metric_value(run: &RunReport, metric: &str) -> f64 {
    match metric {
        "mean_latency_ms" => run.mean_latency_s * 1000.0,
        "p95_latency_ms" => run.p95_latency_ms,
        "plr" => run.plr,
        "handovers" => run.handovers as f64,
        "approx_error" => run.approx_error,
        "regret_final" => run.regret_final,
        other => panic!("unknown metric {other}"),
    }
}

/// Two-sided 95% t-quantiles, indexed by degrees of freedom 1..=29.
const T_975: [f64; 29] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045,
];

/// 95% confidence halfwidth via the Student t-distribution:
/// `mean ± t · s/√n`. Built-in quantile table for n ≤ 30, normal
/// approximation beyond.
pub fn confidence_interval(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::domain(format!("confidence interval needs >= 2 samples, got {n}")));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let s = var.sqrt();
    let t = if n - 1 <= 29 { T_975[n - 2] } else { 1.96 };
    Ok((mean, t * s / (n as f64).sqrt()))
}

/// Build per-policy summary rows over a slice of runs.
pub fn summarize(runs: &[RunReport]) -> Result<Vec<SummaryRow>> {
    let mut labels: Vec<String> = Vec::new();
    for r in runs {
        if !labels.contains(&r.policy_label) {
            labels.push(r.policy_label.clone());
        }
    }
    let mut out = Vec::new();
    for label in &labels {
        let policy_runs: Vec<&RunReport> =
            runs.iter().filter(|r| &r.policy_label == label).collect();
        for metric in SUMMARY_METRICS {
            let values: Vec<f64> = policy_runs.iter().map(|r| metric_value(r, metric)).collect();
            let (mean, ci) = if values.len() >= 2 {
                confidence_interval(&values)?
            } else {
                (values[0], 0.0)
            };
            out.push(SummaryRow {
                policy_label: label.clone(),
                metric,
                mean,
                ci_halfwidth: ci,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_examples() {
        let (mean, hw) = confidence_interval(&[1.0; 5]).unwrap();
        assert_eq!(mean, 1.0);
        assert_eq!(hw, 0.0);

        let (mean, hw) = confidence_interval(&[0.0, 2.0]).unwrap();
        assert_eq!(mean, 1.0);
        // s = sqrt(2), t_{0.975,1} = 12.706
        assert!((hw - 12.706 * 2f64.sqrt() / 2f64.sqrt()).abs() < 1e-9);

        // n = 20 with unit sample standard deviation
        let samples: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let mean = samples.iter().sum::<f64>() / 20.0;
        let s = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 19.0).sqrt();
        let scaled: Vec<f64> = samples.iter().map(|x| x / s).collect();
        let (_, hw) = confidence_interval(&scaled).unwrap();
        assert!((hw - 2.093 / 20f64.sqrt()).abs() < 1e-6, "hw = {hw}");
    }

    #[test]
    fn ci_rejects_tiny_samples() {
        assert!(confidence_interval(&[]).is_err());
        assert!(confidence_interval(&[1.0]).is_err());
    }

    #[test]
    fn histogram_mean_and_quantile() {
        let mut h = LatencyHistogram::new();
        for i in 1..=100 {
            h.record(i as f64 / 1000.0); // 1..=100 ms
        }
        assert!((h.mean_s() - 0.0505).abs() < 1e-12);
        let p95 = h.quantile_ms(0.95);
        assert!((p95 - 95.0).abs() <= 1.0, "p95 = {p95}");
        let rows = h.cdf_rows();
        assert_eq!(rows.last().unwrap().1, 1.0);
        for pair in rows.windows(2) {
            assert!(pair[1].1 >= pair[0].1);
        }
    }

    #[test]
    fn histogram_empty_is_zero() {
        let h = LatencyHistogram::new();
        assert_eq!(h.mean_s(), 0.0);
        assert_eq!(h.quantile_ms(0.95), 0.0);
        assert!(h.cdf_rows().is_empty());
    }
}

//! G/G/1 congestion descriptors from windowed traffic statistics.
//!
//! Each cell is abstracted as a single-server queue. From a sliding window of
//! arrival timestamps and service durations we estimate the arrival rate λ,
//! the effective service rate μ, and the squared coefficients of variation of
//! both processes. Kingman's approximation then yields the mean wait, and
//! Little's law the mean queue length. These three descriptors (ρ, W, Q) feed
//! the service-cost indicators.

use crate::error::{Error, Result};

/// Utilization is clamped here so the Kingman wait stays finite under
/// overload; the packet-level queues still grow and drop, so overload is
/// additionally penalized through the measured queue state.
pub const RHO_MAX: f64 = 0.99;

/// Windowed traffic statistics for one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficStats {
    /// Arrival rate (packets/s).
    pub lambda: f64,
    /// Effective service rate (packets/s).
    pub mu: f64,
    /// Squared coefficient of variation of inter-arrival times.
    pub ca2: f64,
    /// Squared coefficient of variation of service times.
    pub cs2: f64,
}

/// Analytical congestion descriptors derived from [`TrafficStats`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueDescriptors {
    /// Utilization, clamped to `[0, RHO_MAX]`.
    pub rho: f64,
    /// Mean wait in queue (s).
    pub w: f64,
    /// Mean queue length (packets); always `lambda * w`.
    pub q: f64,
}

impl QueueDescriptors {
    /// Descriptor chain for one cell: utilization, Kingman wait, Little length.
    pub fn from_stats(stats: &TrafficStats) -> Result<Self> {
        let rho = utilization(stats.lambda, stats.mu)?;
        let w = kingman_wait(rho, stats.ca2, stats.cs2, stats.mu)?;
        let q = little_queue_len(stats.lambda, w)?;
        Ok(QueueDescriptors { rho, w, q })
    }
}

fn check_finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be finite, got {v}")))
    }
}

/// Utilization ρ = λ/μ, clamped to [`RHO_MAX`].
pub fn utilization(lambda: f64, mu: f64) -> Result<f64> {
    check_finite("lambda", lambda)?;
    check_finite("mu", mu)?;
    if lambda < 0.0 {
        return Err(Error::domain(format!("lambda must be >= 0, got {lambda}")));
    }
    if mu <= 0.0 {
        return Err(Error::domain(format!("mu must be > 0, got {mu}")));
    }
    Ok((lambda / mu).min(RHO_MAX))
}

/// Kingman mean-wait approximation for a G/G/1 queue:
/// `W = ρ/(1−ρ) · (c_a² + c_s²)/2 · 1/μ`.
///
/// Callers must clamp ρ below 1 first (see [`utilization`]).
pub fn kingman_wait(rho: f64, ca2: f64, cs2: f64, mu: f64) -> Result<f64> {
    for (name, v) in [("rho", rho), ("ca2", ca2), ("cs2", cs2), ("mu", mu)] {
        check_finite(name, v)?;
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain(format!("rho must be in [0, 1), got {rho}")));
    }
    if ca2 < 0.0 || cs2 < 0.0 {
        return Err(Error::domain("ca2 and cs2 must be >= 0".to_string()));
    }
    if mu <= 0.0 {
        return Err(Error::domain(format!("mu must be > 0, got {mu}")));
    }
    Ok(rho / (1.0 - rho) * (ca2 + cs2) / 2.0 * (1.0 / mu))
}

/// Little's law: mean queue length `Q = λ·W`.
pub fn little_queue_len(lambda: f64, w: f64) -> Result<f64> {
    check_finite("lambda", lambda)?;
    check_finite("w", w)?;
    if lambda < 0.0 || w < 0.0 {
        return Err(Error::domain("lambda and w must be >= 0".to_string()));
    }
    Ok(lambda * w)
}

/// Sample variance over squared sample mean (c²) with the unbiased variance
/// estimator. Returns `None` with fewer than two samples.
fn scv(samples: &[f64]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Some(0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some(var / (mean * mean))
}

/// Estimate [`TrafficStats`] from a window of arrival timestamps and service
/// durations.
///
/// `arrivals` must be non-decreasing and already restricted to the window;
/// `window` is the window length in seconds. With fewer than two samples of a
/// process the estimator falls back to the least-informative assumption:
/// c² = 1 (exponential), λ = 0, and `base_mu` for the service rate.
pub fn estimate_stats(
    arrivals: &[f64],
    service_durations: &[f64],
    window: f64,
    base_mu: f64,
) -> Result<TrafficStats> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::domain(format!("window must be > 0, got {window}")));
    }
    if base_mu <= 0.0 || !base_mu.is_finite() {
        return Err(Error::domain(format!("base_mu must be > 0, got {base_mu}")));
    }
    if arrivals.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::domain("arrival timestamps must be non-decreasing".to_string()));
    }

    let (lambda, ca2) = if arrivals.len() < 2 {
        (0.0, 1.0)
    } else {
        let gaps: Vec<f64> = arrivals.windows(2).map(|p| p[1] - p[0]).collect();
        (arrivals.len() as f64 / window, scv(&gaps).unwrap_or(1.0))
    };

    let (mu, cs2) = if service_durations.len() < 2 {
        (base_mu, 1.0)
    } else {
        let mean = service_durations.iter().sum::<f64>() / service_durations.len() as f64;
        let mu = if mean > 0.0 { 1.0 / mean } else { base_mu };
        (mu, scv(service_durations).unwrap_or(1.0))
    };

    Ok(TrafficStats { lambda, mu, ca2, cs2 })
}

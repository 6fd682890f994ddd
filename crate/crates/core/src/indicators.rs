//! Dimensionless service-cost indicators for user–cell pairs.
//!
//! Three indicators summarize how attractive a cell is for a user: a delay
//! indicator D built from queue occupancy and waiting intensity, a packet
//! service degradation indicator P penalizing congested buffers, and an
//! energy cost indicator E coupling pair transmit/receive power with cell
//! congestion. D and P depend only on cell state, so entire columns share
//! them; E varies per pair through the power terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights and shape parameters of the three indicators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndicatorParams {
    /// Weight of the energy indicator in the association objective.
    pub alpha: f64,
    /// Packet-degradation scale.
    pub beta1: f64,
    /// Congestion exponent (>= 1).
    pub gamma: f64,
    /// Energy scale.
    pub beta2: f64,
    /// Congestion–energy coupling (>= 0).
    pub delta: f64,
    /// Queue-occupancy weight of the delay indicator.
    pub eta1: f64,
    /// Waiting-intensity weight of the delay indicator.
    pub eta2: f64,
}

impl Default for IndicatorParams {
    fn default() -> Self {
        // calibrated stable operating point
        IndicatorParams {
            alpha: 0.3,
            beta1: 1.0,
            gamma: 2.0,
            beta2: 0.5,
            delta: 0.5,
            eta1: 0.6,
            eta2: 0.4,
        }
    }
}

impl IndicatorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("delta", self.delta),
            ("eta1", self.eta1),
            ("eta2", self.eta2),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("indicator param {name} must be >= 0, got {v}")));
            }
        }
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return Err(Error::config(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Per-cell capacity descriptors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCapacityDescriptors {
    /// Equivalent service capacity (packets); normalizes queue occupancy.
    pub c_tilde: f64,
    /// Maximum simultaneous associated users.
    pub c_assoc: usize,
}

/// Indicator triple plus the two raw congestion descriptors for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorVector {
    /// Delay indicator.
    pub d: f64,
    /// Packet service degradation indicator.
    pub p: f64,
    /// Energy cost indicator.
    pub e: f64,
    /// Queue occupancy Q/C̃.
    pub occ: f64,
    /// Waiting intensity μ·W.
    pub wi: f64,
}

impl IndicatorVector {
    /// Association cost of this pair: `D + P + α·E`.
    pub fn cost(&self, alpha: f64) -> f64 {
        self.d + self.p + alpha * self.e
    }
}

/// Packet service degradation `P = β₁ (Q/C̃)^γ`.
pub fn packet_degradation(q: f64, c_tilde: f64, beta1: f64, gamma: f64) -> Result<f64> {
    if !(c_tilde.is_finite() && c_tilde > 0.0) {
        return Err(Error::domain(format!("c_tilde must be > 0, got {c_tilde}")));
    }
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::domain(format!("q must be >= 0, got {q}")));
    }
    Ok(beta1 * (q / c_tilde).powf(gamma))
}

/// Energy service cost `E = β₂ (P_tx + P_rx)(1 + δ·Q/C̃)`; powers in mW.
pub fn energy_cost(
    ptx_mw: f64,
    prx_mw: f64,
    q: f64,
    c_tilde: f64,
    beta2: f64,
    delta: f64,
) -> Result<f64> {
    if !(c_tilde.is_finite() && c_tilde > 0.0) {
        return Err(Error::domain(format!("c_tilde must be > 0, got {c_tilde}")));
    }
    if !(ptx_mw.is_finite() && ptx_mw >= 0.0 && prx_mw.is_finite() && prx_mw >= 0.0) {
        return Err(Error::domain("powers must be finite and >= 0".to_string()));
    }
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::domain(format!("q must be >= 0, got {q}")));
    }
    Ok(beta2 * (ptx_mw + prx_mw) * (1.0 + delta * q / c_tilde))
}

/// Delay indicator `D = η₁·Q/C̃ + η₂·μ·W`.
pub fn delay_indicator(
    q: f64,
    c_tilde: f64,
    mu: f64,
    w: f64,
    eta1: f64,
    eta2: f64,
) -> Result<f64> {
    if !(c_tilde.is_finite() && c_tilde > 0.0) {
        return Err(Error::domain(format!("c_tilde must be > 0, got {c_tilde}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::domain(format!("mu must be > 0, got {mu}")));
    }
    if !(q.is_finite() && q >= 0.0 && w.is_finite() && w >= 0.0) {
        return Err(Error::domain("q and w must be finite and >= 0".to_string()));
    }
    Ok(eta1 * (q / c_tilde) + eta2 * (mu * w))
}

/// Cell-side inputs for indicator assembly.
#[derive(Debug, Clone, Copy)]
pub struct CellIndicatorInput {
    pub q: f64,
    pub w: f64,
    pub mu: f64,
    pub c_tilde: f64,
}

/// Assemble the users × cells indicator matrix.
///
/// `ptx_mw[j][i]` and `prx_mw[j][i]` are the pair powers; all users of a cell
/// share D and P since those depend only on cell state.
pub fn indicator_matrix(
    cells: &[CellIndicatorInput],
    ptx_mw: &[Vec<f64>],
    prx_mw: &[Vec<f64>],
    params: &IndicatorParams,
) -> Result<Vec<Vec<IndicatorVector>>> {
    let n_users = ptx_mw.len();
    if prx_mw.len() != n_users {
        return Err(Error::domain("power tables disagree on user count".to_string()));
    }
    let n_cells = cells.len();
    let mut out = Vec::with_capacity(n_users);
    for j in 0..n_users {
        if ptx_mw[j].len() != n_cells || prx_mw[j].len() != n_cells {
            return Err(Error::domain(format!(
                "power table row {j} does not cover all {n_cells} cells"
            )));
        }
        let mut row = Vec::with_capacity(n_cells);
        for (i, cell) in cells.iter().enumerate() {
            row.push(pair_indicators(cell, ptx_mw[j][i], prx_mw[j][i], params)?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Indicators for a single user–cell pair.
pub fn pair_indicators(
    cell: &CellIndicatorInput,
    ptx_mw: f64,
    prx_mw: f64,
    params: &IndicatorParams,
) -> Result<IndicatorVector> {
    let occ = cell.q / cell.c_tilde;
    let wi = cell.mu * cell.w;
    let p = packet_degradation(cell.q, cell.c_tilde, params.beta1, params.gamma)?;
    let e = energy_cost(ptx_mw, prx_mw, cell.q, cell.c_tilde, params.beta2, params.delta)?;
    let d = delay_indicator(cell.q, cell.c_tilde, cell.mu, cell.w, params.eta1, params.eta2)?;
    Ok(IndicatorVector { d, p, e, occ, wi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn packet_degradation_examples() {
        assert_eq!(packet_degradation(0.0, 1000.0, 1.0, 2.0).unwrap(), 0.0);
        assert_eq!(packet_degradation(1000.0, 1000.0, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(packet_degradation(500.0, 1000.0, 1.0, 2.0).unwrap(), 0.25);
        assert!(packet_degradation(1.0, 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn energy_cost_examples() {
        // light load: reduces to beta2 * (ptx + prx)
        assert_eq!(energy_cost(100.0, 50.0, 0.0, 1000.0, 0.5, 0.5).unwrap(), 75.0);
        // delta = 0 removes the congestion term
        assert_eq!(energy_cost(100.0, 50.0, 500.0, 1000.0, 0.5, 0.0).unwrap(), 75.0);
        assert_eq!(energy_cost(100.0, 50.0, 500.0, 1000.0, 0.5, 0.5).unwrap(), 93.75);
        assert!(energy_cost(100.0, 50.0, 1.0, -3.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn delay_indicator_examples() {
        assert_eq!(delay_indicator(0.0, 1000.0, 10.0, 0.0, 0.6, 0.4).unwrap(), 0.0);
        let d = delay_indicator(1000.0, 1000.0, 10.0, 0.1, 0.6, 0.4).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let d = delay_indicator(500.0, 1000.0, 4.0, 1.0, 0.6, 0.4).unwrap();
        assert!((d - 1.9).abs() < 1e-12);
        assert!(delay_indicator(1.0, 1000.0, 0.0, 0.1, 0.6, 0.4).is_err());
    }

    #[test]
    fn zero_load_floor() {
        let params = IndicatorParams::default();
        let cell = CellIndicatorInput { q: 0.0, w: 0.0, mu: 10.0, c_tilde: 1000.0 };
        let v = pair_indicators(&cell, 100.0, 50.0, &params).unwrap();
        assert_eq!(v.d, 0.0);
        assert_eq!(v.p, 0.0);
        assert_eq!(v.e, params.beta2 * 150.0);
    }

    #[test]
    fn matrix_columns_share_cell_terms() {
        let params = IndicatorParams::default();
        let cells = vec![CellIndicatorInput { q: 400.0, w: 0.2, mu: 8.0, c_tilde: 1000.0 }];
        let ptx = vec![vec![10.0], vec![90.0]];
        let prx = vec![vec![100.0], vec![100.0]];
        let m = indicator_matrix(&cells, &ptx, &prx, &params).unwrap();
        // P depends only on cell state
        assert_eq!(m[0][0].p, m[1][0].p);
        assert_eq!(m[0][0].d, m[1][0].d);
        assert_ne!(m[0][0].e, m[1][0].e);
    }

    #[test]
    fn matrix_symmetry_for_identical_cells() {
        let params = IndicatorParams::default();
        let cell = CellIndicatorInput { q: 123.0, w: 0.05, mu: 20.0, c_tilde: 1000.0 };
        let cells = vec![cell, cell];
        let ptx = vec![vec![40.0, 40.0]];
        let prx = vec![vec![100.0, 100.0]];
        let m = indicator_matrix(&cells, &ptx, &prx, &params).unwrap();
        assert_eq!(m[0][0], m[0][1]);
    }

    #[test]
    fn matrix_matches_scalar_ops_bit_exact() {
        let params = IndicatorParams::default();
        let cells = vec![
            CellIndicatorInput { q: 17.0, w: 0.004, mu: 2300.0, c_tilde: 1000.0 },
            CellIndicatorInput { q: 812.0, w: 0.9, mu: 1400.0, c_tilde: 1000.0 },
            CellIndicatorInput { q: 0.0, w: 0.0, mu: 2500.0, c_tilde: 1000.0 },
        ];
        let ptx = vec![vec![12.0, 190.0, 77.0], vec![199.5, 3.0, 42.0]];
        let prx = vec![vec![100.0; 3], vec![100.0; 3]];
        let m = indicator_matrix(&cells, &ptx, &prx, &params).unwrap();
        for j in 0..2 {
            for i in 0..3 {
                let c = &cells[i];
                let p = packet_degradation(c.q, c.c_tilde, params.beta1, params.gamma).unwrap();
                let e = energy_cost(ptx[j][i], prx[j][i], c.q, c.c_tilde, params.beta2, params.delta)
                    .unwrap();
                let d = delay_indicator(c.q, c.c_tilde, c.mu, c.w, params.eta1, params.eta2).unwrap();
                assert_eq!(m[j][i].p.to_bits(), p.to_bits());
                assert_eq!(m[j][i].e.to_bits(), e.to_bits());
                assert_eq!(m[j][i].d.to_bits(), d.to_bits());
            }
        }
    }

    #[test]
    fn matrix_rejects_ragged_tables() {
        let params = IndicatorParams::default();
        let cells = vec![CellIndicatorInput { q: 0.0, w: 0.0, mu: 1.0, c_tilde: 1.0 }; 2];
        let ptx = vec![vec![1.0]];
        let prx = vec![vec![1.0, 2.0]];
        assert!(indicator_matrix(&cells, &ptx, &prx, &params).is_err());
    }

    proptest! {
        // occupancy-ratio invariance: scaling q and c_tilde together is a no-op
        #[test]
        fn degradation_homogeneous(q in 0.0..1e4f64, c in 1.0..1e4f64, k in 0.001..1e3f64) {
            let a = packet_degradation(q, c, 1.0, 2.0).unwrap();
            let b = packet_degradation(k * q, k * c, 1.0, 2.0).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }

        // each indicator is non-decreasing in q
        #[test]
        fn indicators_monotone_in_q(q1 in 0.0..5e3f64, dq in 0.0..5e3f64) {
            let q2 = q1 + dq;
            let p1 = packet_degradation(q1, 1000.0, 1.0, 2.0).unwrap();
            let p2 = packet_degradation(q2, 1000.0, 1.0, 2.0).unwrap();
            prop_assert!(p2 >= p1);
            let e1 = energy_cost(100.0, 100.0, q1, 1000.0, 0.5, 0.5).unwrap();
            let e2 = energy_cost(100.0, 100.0, q2, 1000.0, 0.5, 0.5).unwrap();
            prop_assert!(e2 >= e1);
            let d1 = delay_indicator(q1, 1000.0, 10.0, 0.1, 0.6, 0.4).unwrap();
            let d2 = delay_indicator(q2, 1000.0, 10.0, 0.1, 0.6, 0.4).unwrap();
            prop_assert!(d2 >= d1);
        }
    }
}

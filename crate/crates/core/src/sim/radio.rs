//! Log-distance path loss with log-normal shadowing, and the uplink
//! power-control abstraction feeding the energy indicator.
//!
//! Shadowing follows a per-pair AR(1) process whose correlation between
//! consecutive intervals is `exp(-v·dt/d_corr)` for a user moving at speed v,
//! so faster users see faster channel churn. A decorrelation distance of zero
//! degenerates to independent redraws each interval.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::config::RadioSection;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy)]
pub struct RadioModel {
    pub pl0_db: f64,
    pub exponent: f64,
    pub d0: f64,
    pub sbs_tx_dbm: f64,
    pub mbs_tx_dbm: f64,
    pub ue_max_dbm: f64,
    pub ul_ref_dbm: f64,
    pub rx_mw: f64,
}

impl RadioModel {
    pub fn from_config(r: &RadioSection) -> Self {
        // reference loss: free space at the carrier frequency and d0
        let f_hz = r.carrier_ghz * 1e9;
        let pl0_db = 20.0 * (4.0 * std::f64::consts::PI * r.ref_distance_m * f_hz / SPEED_OF_LIGHT)
            .log10();
        RadioModel {
            pl0_db,
            exponent: r.path_loss_exponent,
            d0: r.ref_distance_m,
            sbs_tx_dbm: r.sbs_tx_power_dbm,
            mbs_tx_dbm: r.mbs_tx_power_dbm,
            ue_max_dbm: r.ue_max_tx_power_dbm,
            ul_ref_dbm: r.ul_power_ref_dbm,
            rx_mw: r.rx_power_mw,
        }
    }

    /// Deterministic log-distance loss, floored at 1 m.
    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(1.0);
        self.pl0_db + 10.0 * self.exponent * (d / self.d0).log10()
    }

    /// Downlink received power at a user (dBm).
    pub fn received_power_dbm(&self, tx_dbm: f64, distance_m: f64, shadow_db: f64) -> f64 {
        tx_dbm - self.path_loss_db(distance_m) - shadow_db
    }

    /// Open-loop uplink transmit power (mW): path-loss compensated up to the
    /// device cap. Uses the deterministic loss so the energy indicator tracks
    /// distance rather than fast channel noise.
    pub fn uplink_tx_mw(&self, distance_m: f64) -> f64 {
        let dbm = (self.ul_ref_dbm + self.path_loss_db(distance_m)).min(self.ue_max_dbm);
        dbm_to_mw(dbm)
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Per-pair AR(1) shadowing field over users × cells.
#[derive(Debug, Clone)]
pub struct ShadowingField {
    values: Vec<Vec<f64>>,
    std_db: f64,
    corr_distance_m: f64,
    frozen: bool,
}

impl ShadowingField {
    pub fn init(
        n_users: usize,
        n_cells: usize,
        r: &RadioSection,
        rng: &mut impl Rng,
    ) -> Self {
        let frozen = r.freeze_shadowing || r.shadowing_std_db == 0.0;
        let mut values = vec![vec![0.0; n_cells]; n_users];
        if !frozen {
            let normal = Normal::new(0.0, r.shadowing_std_db).expect("validated std");
            for row in values.iter_mut() {
                for v in row.iter_mut() {
                    *v = normal.sample(rng);
                }
            }
        }
        ShadowingField {
            values,
            std_db: r.shadowing_std_db,
            corr_distance_m: r.shadowing_corr_distance_m,
            frozen,
        }
    }

    /// Advance one interval; `speeds[j]` is user j's realized speed (m/s).
    pub fn step(&mut self, speeds: &[f64], dt: f64, rng: &mut impl Rng) {
        if self.frozen {
            return;
        }
        let normal = Normal::new(0.0, self.std_db).expect("validated std");
        for (j, row) in self.values.iter_mut().enumerate() {
            let corr = if self.corr_distance_m > 0.0 {
                (-speeds[j] * dt / self.corr_distance_m).exp()
            } else {
                0.0
            };
            let innovation_scale = (1.0 - corr * corr).sqrt();
            for v in row.iter_mut() {
                *v = corr * *v + innovation_scale * normal.sample(rng);
            }
        }
    }

    pub fn get(&self, user: usize, cell: usize) -> f64 {
        self.values[user][cell]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RadioSection;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model() -> RadioModel {
        RadioModel::from_config(&RadioSection::default())
    }

    #[test]
    fn reference_distance_gives_tx_minus_pl0() {
        let m = model();
        let p = m.received_power_dbm(30.0, 1.0, 0.0);
        assert!((p - (30.0 - m.pl0_db)).abs() < 1e-12);
        // free-space loss at 1 m and 3.5 GHz is about 43.3 dB
        assert!((m.pl0_db - 43.33).abs() < 0.05, "pl0 = {}", m.pl0_db);
    }

    #[test]
    fn doubling_distance_drops_ten_and_a_half_db() {
        let m = model();
        let near = m.received_power_dbm(30.0, 100.0, 0.0);
        let far = m.received_power_dbm(30.0, 200.0, 0.0);
        let slope = near - far;
        assert!((slope - 10.0 * 3.5 * 2f64.log10()).abs() < 1e-9, "slope = {slope}");
        assert!((slope - 10.54).abs() < 0.02);
    }

    #[test]
    fn macro_beats_small_cell_by_13_db() {
        let m = model();
        let sbs = m.received_power_dbm(m.sbs_tx_dbm, 150.0, 0.0);
        let mbs = m.received_power_dbm(m.mbs_tx_dbm, 150.0, 0.0);
        assert!((mbs - sbs - 13.0).abs() < 1e-12);
    }

    #[test]
    fn uplink_power_caps_at_device_max() {
        let m = model();
        let near = m.uplink_tx_mw(2.0);
        let mid = m.uplink_tx_mw(100.0);
        let far = m.uplink_tx_mw(500.0);
        assert!(near < mid && mid < far);
        assert!(far <= dbm_to_mw(m.ue_max_dbm) + 1e-12);
        // distance sensitivity holds through typical cell ranges
        assert!(m.uplink_tx_mw(150.0) < dbm_to_mw(m.ue_max_dbm) * 0.999);
    }

    #[test]
    fn frozen_shadowing_is_zero() {
        let mut r = RadioSection::default();
        r.freeze_shadowing = true;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut f = ShadowingField::init(3, 2, &r, &mut rng);
        f.step(&[1.0, 1.0, 1.0], 1.0, &mut rng);
        for j in 0..3 {
            for i in 0..2 {
                assert_eq!(f.get(j, i), 0.0);
            }
        }
    }

    #[test]
    fn faster_users_decorrelate_faster() {
        let r = RadioSection::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut f = ShadowingField::init(2, 1, &r, &mut rng);
        let slow_before = f.get(0, 0);
        let fast_before = f.get(1, 0);
        let mut slow_corr = 0.0;
        let mut fast_corr = 0.0;
        let steps = 2000;
        for _ in 0..steps {
            let sb = f.get(0, 0);
            let fb = f.get(1, 0);
            f.step(&[0.5, 10.0], 1.0, &mut rng);
            slow_corr += sb * f.get(0, 0);
            fast_corr += fb * f.get(1, 0);
        }
        let _ = (slow_before, fast_before);
        // empirical lag-1 autocovariance is higher for the slow user
        assert!(slow_corr / steps as f64 > fast_corr / steps as f64);
    }
}

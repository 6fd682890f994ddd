//! Scenario configuration: a sectioned key=value file (TOML) covering
//! topology, mobility, traffic, radio, queueing, indicator, optimizer,
//! classifier and controller parameters. An empty file yields the default
//! scenario; unknown keys are rejected by name, and cross-field invariants
//! are validated before a run starts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::IndicatorParams;
use crate::policy::{AblationFlags, PolicyKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub area_width_m: f64,
    pub area_height_m: f64,
    pub n_cells: usize,
    pub n_users: usize,
    pub min_cell_separation_m: f64,
    /// Association capacity per cell (max simultaneous users).
    pub cell_capacity: usize,
    pub sim_time_s: f64,
    pub warmup_s: f64,
    pub decision_interval_s: f64,
    pub seed: u64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        ScenarioSection {
            area_width_m: 1000.0,
            area_height_m: 1000.0,
            n_cells: 16,
            n_users: 80,
            min_cell_separation_m: 40.0,
            cell_capacity: 10,
            sim_time_s: 600.0,
            warmup_s: 60.0,
            decision_interval_s: 1.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilitySection {
    pub speed_min_mps: f64,
    pub speed_max_mps: f64,
}

impl Default for MobilitySection {
    fn default() -> Self {
        MobilitySection { speed_min_mps: 0.5, speed_max_mps: 1.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficSection {
    pub packet_size_bytes: u32,
    /// Constant bit rate per user per direction (kbps).
    pub rate_kbps: f64,
}

impl Default for TrafficSection {
    fn default() -> Self {
        TrafficSection { packet_size_bytes: 512, rate_kbps: 200.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    pub carrier_ghz: f64,
    pub sbs_tx_power_dbm: f64,
    pub mbs_tx_power_dbm: f64,
    pub ue_max_tx_power_dbm: f64,
    /// Open-loop uplink power-control reference (dBm); transmit power is
    /// `min(ue_max, ul_power_ref + path_loss)`.
    pub ul_power_ref_dbm: f64,
    /// Fixed receive-chain power (mW) entering the energy indicator.
    pub rx_power_mw: f64,
    pub path_loss_exponent: f64,
    pub ref_distance_m: f64,
    pub shadowing_std_db: f64,
    /// Shadowing decorrelation distance (m); a user moving at speed v keeps
    /// correlation exp(-v*dt/d_corr) between consecutive intervals.
    pub shadowing_corr_distance_m: f64,
    /// Replace shadowing draws with zero (tests).
    pub freeze_shadowing: bool,
}

impl Default for RadioSection {
    fn default() -> Self {
        RadioSection {
            carrier_ghz: 3.5,
            sbs_tx_power_dbm: 30.0,
            mbs_tx_power_dbm: 43.0,
            ue_max_tx_power_dbm: 23.0,
            ul_power_ref_dbm: -100.0,
            rx_power_mw: 100.0,
            path_loss_exponent: 3.5,
            ref_distance_m: 1.0,
            shadowing_std_db: 8.0,
            shadowing_corr_distance_m: 20.0,
            freeze_shadowing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueueingSection {
    pub buffer_packets: usize,
    /// Per-cell service budget in packets/s at the 512-byte reference size;
    /// the effective packet rate scales inversely with the configured size.
    pub base_service_rate_pps: f64,
    /// Equivalent service capacity normalizing queue occupancy (packets).
    pub c_tilde_packets: f64,
    /// Sliding estimation window, in decision intervals.
    pub stats_window_intervals: usize,
    /// Effective number of independent Rayleigh-power draws averaged into one
    /// interval's service budget (gamma shape); larger means steadier service.
    pub fading_shape: f64,
    /// Replace the per-interval service fading draw with 1.0 (tests).
    pub freeze_fading: bool,
}

impl Default for QueueingSection {
    fn default() -> Self {
        QueueingSection {
            buffer_packets: 1000,
            base_service_rate_pps: 2500.0,
            c_tilde_packets: 1000.0,
            stats_window_intervals: 10,
            fading_shape: 50.0,
            freeze_fading: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub max_iterations: usize,
    pub step_a0: f64,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        OptimizerSection { max_iterations: 200, step_a0: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LvqSection {
    pub prototypes_per_cell: usize,
    pub initial_learning_rate: f64,
    pub lr_decay: f64,
    pub initial_epochs: u32,
    pub retrain_epochs: u32,
    pub train_split: f64,
}

impl Default for LvqSection {
    fn default() -> Self {
        LvqSection {
            prototypes_per_cell: 2,
            initial_learning_rate: 0.1,
            lr_decay: 0.95,
            initial_epochs: 30,
            retrain_epochs: 5,
            train_split: 0.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlSection {
    pub policy: PolicyKind,
    /// Intervals during which the optimizer runs every step and labels flow.
    pub bootstrap_intervals: usize,
    /// Nominal re-optimization period in hybrid mode (intervals).
    pub reopt_period: usize,
    /// Relative composite-QoS deviation that forces early re-optimization.
    pub qos_deviation_threshold: f64,
    /// Moving-average window of the deviation trigger (intervals).
    pub qos_ma_window: usize,
    /// Composite QoS weights (latency, packet loss).
    pub qos_weight_latency: f64,
    pub qos_weight_plr: f64,
    /// Decisions are enforced this many intervals after they are computed.
    pub control_delay_intervals: usize,
    /// In-memory labeled-sample retention (intervals); the on-disk log is
    /// never pruned.
    pub sample_window_intervals: usize,
    /// Load-aware heuristic signal/load weight.
    pub lhr_weight: f64,
    /// Run the optimizer alongside the learned policy every interval to
    /// measure approximation error and regret.
    pub track_optimizer_gap: bool,
    /// Keep the per-interval applied assignments in the run report.
    pub record_decisions: bool,
    #[serde(flatten)]
    pub ablation: AblationFlags,
}

impl Default for ControlSection {
    fn default() -> Self {
        ControlSection {
            policy: PolicyKind::Proposed,
            bootstrap_intervals: 50,
            reopt_period: 20,
            qos_deviation_threshold: 0.05,
            qos_ma_window: 10,
            qos_weight_latency: 0.5,
            qos_weight_plr: 0.5,
            control_delay_intervals: 0,
            sample_window_intervals: 100,
            lhr_weight: 0.5,
            track_optimizer_gap: true,
            record_decisions: false,
            ablation: AblationFlags::default(),
        }
    }
}

/// Full scenario description; see the section types for field meanings.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    pub mobility: MobilitySection,
    pub traffic: TrafficSection,
    pub radio: RadioSection,
    pub queueing: QueueingSection,
    pub indicators: IndicatorParams,
    pub optimizer: OptimizerSection,
    pub lvq: LvqSection,
    pub control: ControlSection,
}

impl ScenarioConfig {
    /// Parse from TOML text; an empty string yields the defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn n_intervals(&self) -> usize {
        (self.scenario.sim_time_s / self.scenario.decision_interval_s).round() as usize
    }

    /// Effective per-cell service rate in packets/s at the configured size.
    pub fn cell_packet_rate_pps(&self) -> f64 {
        self.queueing.base_service_rate_pps * 512.0 / self.traffic.packet_size_bytes as f64
    }

    /// Packets per second per direction for one user.
    pub fn user_packet_rate_pps(&self) -> f64 {
        self.traffic.rate_kbps * 1000.0 / (8.0 * self.traffic.packet_size_bytes as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        for (key, v) in [
            ("scenario.area_width_m", s.area_width_m),
            ("scenario.area_height_m", s.area_height_m),
            ("scenario.sim_time_s", s.sim_time_s),
            ("scenario.decision_interval_s", s.decision_interval_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{key} must be positive, got {v}")));
            }
        }
        if s.min_cell_separation_m < 0.0 {
            return Err(Error::config("scenario.min_cell_separation_m must be >= 0".to_string()));
        }
        if s.warmup_s < 0.0 || s.warmup_s >= s.sim_time_s {
            return Err(Error::config(format!(
                "scenario.warmup_s must satisfy 0 <= warmup < sim_time, got {} vs {}",
                s.warmup_s, s.sim_time_s
            )));
        }
        if s.n_cells == 0 || s.n_users == 0 {
            return Err(Error::config("scenario.n_cells and scenario.n_users must be >= 1".to_string()));
        }
        if s.cell_capacity == 0 {
            return Err(Error::config("scenario.cell_capacity must be >= 1".to_string()));
        }
        if s.n_cells * s.cell_capacity < s.n_users {
            return Err(Error::config(format!(
                "capacity infeasible: n_cells*cell_capacity = {} < n_users = {}",
                s.n_cells * s.cell_capacity,
                s.n_users
            )));
        }

        let m = &self.mobility;
        if m.speed_min_mps < 0.0 {
            return Err(Error::config("mobility.speed_min_mps must be >= 0".to_string()));
        }
        if m.speed_max_mps < m.speed_min_mps {
            return Err(Error::config(format!(
                "mobility.speed_max_mps ({}) must be >= speed_min_mps ({})",
                m.speed_max_mps, m.speed_min_mps
            )));
        }

        if self.traffic.packet_size_bytes == 0 {
            return Err(Error::config("traffic.packet_size_bytes must be >= 1".to_string()));
        }
        if self.traffic.rate_kbps < 0.0 {
            return Err(Error::config("traffic.rate_kbps must be >= 0".to_string()));
        }

        let r = &self.radio;
        if r.ref_distance_m <= 0.0 || r.path_loss_exponent <= 0.0 || r.carrier_ghz <= 0.0 {
            return Err(Error::config(
                "radio reference distance, path-loss exponent and carrier must be positive".to_string(),
            ));
        }
        if r.shadowing_std_db < 0.0 || r.rx_power_mw < 0.0 {
            return Err(Error::config("radio.shadowing_std_db and rx_power_mw must be >= 0".to_string()));
        }
        if r.shadowing_corr_distance_m < 0.0 {
            return Err(Error::config("radio.shadowing_corr_distance_m must be >= 0".to_string()));
        }

        let q = &self.queueing;
        if q.buffer_packets == 0 {
            return Err(Error::config("queueing.buffer_packets must be >= 1".to_string()));
        }
        if !(q.base_service_rate_pps.is_finite() && q.base_service_rate_pps > 0.0) {
            return Err(Error::config("queueing.base_service_rate_pps must be positive".to_string()));
        }
        if q.c_tilde_packets <= 0.0 {
            return Err(Error::config("queueing.c_tilde_packets must be positive".to_string()));
        }
        if q.stats_window_intervals == 0 {
            return Err(Error::config("queueing.stats_window_intervals must be >= 1".to_string()));
        }
        if !(q.fading_shape.is_finite() && q.fading_shape > 0.0) {
            return Err(Error::config("queueing.fading_shape must be positive".to_string()));
        }

        self.indicators.validate()?;

        if self.optimizer.max_iterations == 0 {
            return Err(Error::config("optimizer.max_iterations must be >= 1".to_string()));
        }
        if self.optimizer.step_a0 <= 0.0 {
            return Err(Error::config("optimizer.step_a0 must be positive".to_string()));
        }

        let l = &self.lvq;
        if l.prototypes_per_cell == 0 {
            return Err(Error::config("lvq.prototypes_per_cell must be >= 1".to_string()));
        }
        if !(l.initial_learning_rate > 0.0 && l.initial_learning_rate < 1.0) {
            return Err(Error::config("lvq.initial_learning_rate must be in (0, 1)".to_string()));
        }
        if !(l.lr_decay > 0.0 && l.lr_decay < 1.0) {
            return Err(Error::config("lvq.lr_decay must be in (0, 1)".to_string()));
        }
        if !(l.train_split > 0.0 && l.train_split <= 1.0) {
            return Err(Error::config("lvq.train_split must be in (0, 1]".to_string()));
        }

        let c = &self.control;
        if c.bootstrap_intervals == 0 {
            return Err(Error::config("control.bootstrap_intervals must be >= 1".to_string()));
        }
        if c.reopt_period == 0 {
            return Err(Error::config("control.reopt_period must be >= 1".to_string()));
        }
        if c.qos_ma_window == 0 {
            return Err(Error::config("control.qos_ma_window must be >= 1".to_string()));
        }
        if c.qos_deviation_threshold < 0.0 {
            return Err(Error::config("control.qos_deviation_threshold must be >= 0".to_string()));
        }
        if !(0.0..=1.0).contains(&c.lhr_weight) {
            return Err(Error::config(format!(
                "control.lhr_weight must be in [0, 1], got {}",
                c.lhr_weight
            )));
        }
        if c.qos_weight_latency < 0.0 || c.qos_weight_plr < 0.0 {
            return Err(Error::config("composite QoS weights must be >= 0".to_string()));
        }
        if c.sample_window_intervals == 0 {
            return Err(Error::config("control.sample_window_intervals must be >= 1".to_string()));
        }
        Ok(())
    }
}

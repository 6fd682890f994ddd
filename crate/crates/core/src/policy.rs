//! Association policies: strongest-signal, load-aware heuristic, greedy
//! service-aware, and the hybrid optimization–learning controller.
//!
//! The hybrid controller bootstraps by solving the association problem every
//! interval and logging labeled samples, then switches to LVQ inference with
//! periodic re-optimization, either on a fixed cadence or early when the
//! composite QoS trace deviates from its moving average. Decision enforcement
//! timing (control delay) is handled by the simulator's pending queue.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::lvq::{
    self, FeatureVector, LabeledSample, LearningRate, LvqModel, Selection, FEATURE_DIM,
};
use crate::optim::{self, AssociationDecision, CostMatrix, StepSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    MaxRsrp,
    Lhr,
    Gsa,
    Proposed,
}

impl PolicyKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max_rsrp" | "maxrsrp" | "max-rsrp" => Ok(PolicyKind::MaxRsrp),
            "lhr" => Ok(PolicyKind::Lhr),
            "gsa" => Ok(PolicyKind::Gsa),
            "proposed" => Ok(PolicyKind::Proposed),
            other => Err(Error::config(format!(
                "unknown policy '{other}' (expected max_rsrp, lhr, gsa or proposed)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PolicyKind::MaxRsrp => "max_rsrp",
            PolicyKind::Lhr => "lhr",
            PolicyKind::Gsa => "gsa",
            PolicyKind::Proposed => "proposed",
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Component toggles of the hybrid framework; meaningful only for
/// [`PolicyKind::Proposed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AblationFlags {
    /// A1: bypass LVQ, run the optimizer every interval.
    pub disable_lvq: bool,
    /// A2: label training samples with the greedy service-aware rule instead
    /// of the optimizer.
    pub disable_opt_labels: bool,
    /// A3: zero queue occupancy and waiting intensity everywhere.
    pub disable_queue_awareness: bool,
    /// A4: drop the energy term from the association cost.
    pub disable_energy: bool,
    /// A5: zero the delay and packet-degradation indicators.
    pub disable_service_indicators: bool,
}

impl AblationFlags {
    pub fn variant(name: &str) -> Result<Self> {
        let mut f = AblationFlags::default();
        match name.to_ascii_lowercase().as_str() {
            "full" => {}
            "a1" => f.disable_lvq = true,
            "a2" => f.disable_opt_labels = true,
            "a3" => f.disable_queue_awareness = true,
            "a4" => f.disable_energy = true,
            "a5" => f.disable_service_indicators = true,
            other => {
                return Err(Error::config(format!(
                    "unknown ablation variant '{other}' (expected full or a1..a5)"
                )))
            }
        }
        Ok(f)
    }

    pub fn suffix(&self) -> &'static str {
        if self.disable_lvq {
            "_a1"
        } else if self.disable_opt_labels {
            "_a2"
        } else if self.disable_queue_awareness {
            "_a3"
        } else if self.disable_energy {
            "_a4"
        } else if self.disable_service_indicators {
            "_a5"
        } else {
            ""
        }
    }
}

/// What a policy sees at decision time: state as of the interval start.
pub struct Snapshot<'a> {
    /// 1-based interval index.
    pub interval: usize,
    /// Users × cells received downlink power (dBm), shadowing included.
    pub rsrp_dbm: &'a [Vec<f64>],
    /// Users × cells raw feature vectors (ablation-adjusted).
    pub features: &'a [Vec<FeatureVector>],
    /// Users × cells association costs (ablation-adjusted).
    pub costs: &'a CostMatrix,
    /// Current attachment count per cell.
    pub attached: &'a [usize],
    /// Association capacity per cell.
    pub capacities: &'a [usize],
}

/// Strongest received signal wins; ties to the lowest cell index.
pub fn max_rsrp_select(rsrp_row: &[f64]) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &v) in rsrp_row.iter().enumerate() {
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

/// Load-aware heuristic: convex combination of min–max-normalized signal and
/// normalized attachment load, ties to the lowest cell index.
pub fn lhr_select(
    rsrp_row: &[f64],
    attached: &[usize],
    capacities: &[usize],
    weight: f64,
) -> usize {
    let lo = rsrp_row.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rsrp_row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &p) in rsrp_row.iter().enumerate() {
        let rsrp_norm = if span > 0.0 { (p - lo) / span } else { 0.0 };
        let load_norm = (attached[i] as f64 / capacities[i] as f64).clamp(0.0, 1.0);
        let score = weight * rsrp_norm - (1.0 - weight) * load_norm;
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    best
}

/// Greedy service-aware association: users in index order each take the
/// cheapest cell with remaining capacity. Locally efficient, no coordination.
pub fn gsa_select(costs: &CostMatrix, capacities: &[usize]) -> Result<Vec<usize>> {
    let total: usize = capacities.iter().sum();
    if total < costs.n_users() {
        return Err(Error::Infeasible { users: costs.n_users(), capacity: total });
    }
    let mut remaining = capacities.to_vec();
    let mut out = Vec::with_capacity(costs.n_users());
    for row in &costs.entries {
        let mut best = usize::MAX;
        let mut best_c = f64::INFINITY;
        for (i, &c) in row.iter().enumerate() {
            if remaining[i] > 0 && c < best_c {
                best_c = c;
                best = i;
            }
        }
        remaining[best] -= 1;
        out.push(best);
    }
    Ok(out)
}

/// Weighted sum of already-normalized latency and loss components.
pub fn composite_qos(latency_norm: f64, plr_norm: f64, weights: (f64, f64)) -> f64 {
    weights.0 * latency_norm + weights.1 * plr_norm
}

/// Per-interval composite QoS trace with run-so-far min–max normalization.
#[derive(Debug, Clone, Default)]
pub struct QosTracker {
    pub history: Vec<f64>,
    weights: (f64, f64),
    lat_min: f64,
    lat_max: f64,
    plr_min: f64,
    plr_max: f64,
}

impl QosTracker {
    pub fn new(weights: (f64, f64)) -> Self {
        QosTracker {
            history: Vec::new(),
            weights,
            lat_min: f64::INFINITY,
            lat_max: f64::NEG_INFINITY,
            plr_min: f64::INFINITY,
            plr_max: f64::NEG_INFINITY,
        }
    }

    fn norm(v: f64, lo: f64, hi: f64) -> f64 {
        if hi > lo {
            (v - lo) / (hi - lo)
        } else {
            0.0
        }
    }

    /// Record one interval's mean latency and loss ratio; returns the
    /// composite value appended to the trace.
    pub fn push(&mut self, latency_mean: f64, plr: f64) -> f64 {
        self.lat_min = self.lat_min.min(latency_mean);
        self.lat_max = self.lat_max.max(latency_mean);
        self.plr_min = self.plr_min.min(plr);
        self.plr_max = self.plr_max.max(plr);
        let q = composite_qos(
            Self::norm(latency_mean, self.lat_min, self.lat_max),
            Self::norm(plr, self.plr_min, self.plr_max),
            self.weights,
        );
        self.history.push(q);
        q
    }

    /// True when the latest composite deviates from the moving average of the
    /// `window` values preceding it by more than `threshold` (relative).
    pub fn deviation_exceeded(&self, window: usize, threshold: f64) -> bool {
        let n = self.history.len();
        if n < 2 {
            return false;
        }
        let last = self.history[n - 1];
        let start = (n - 1).saturating_sub(window);
        let slice = &self.history[start..n - 1];
        if slice.is_empty() {
            return false;
        }
        let ma = slice.iter().sum::<f64>() / slice.len() as f64;
        if ma <= f64::EPSILON {
            return false;
        }
        ((last - ma) / ma).abs() > threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Bootstrap,
    Hybrid,
}

/// Outcome of one controller step.
pub struct ControllerDecision {
    /// Assignment to apply this interval (pre control-delay).
    pub applied: Vec<usize>,
    /// The classifier's capacity-constrained prediction, when it ran.
    pub lvq_prediction: Option<Vec<usize>>,
    /// The labeler's decision, when a labeling event happened.
    pub labeler_decision: Option<AssociationDecision>,
    /// Labeled samples emitted by this step.
    pub samples: Vec<LabeledSample>,
    /// Whether the early deviation trigger fired this step.
    pub trigger_fired: bool,
}

/// Hybrid optimization–learning controller state.
pub struct Controller {
    pub phase: Phase,
    pub interval_index: usize,
    pub intervals_since_reopt: usize,
    model: Option<LvqModel>,
    store: Vec<LabeledSample>,
    rng: ChaCha8Rng,
    flags: AblationFlags,
    n_cells: usize,
    alpha: f64,
    bootstrap_intervals: usize,
    reopt_period: usize,
    qos_threshold: f64,
    qos_ma_window: usize,
    sample_window: usize,
    max_iter: usize,
    step: StepSchedule,
    k_per_class: usize,
    lr_initial: f64,
    lr_decay: f64,
    initial_epochs: u32,
    retrain_epochs: u32,
    train_split: f64,
    /// Counters for reporting.
    pub fallback_events: u64,
    pub validation_disagreement: Option<f64>,
    pub solver_iterations: Vec<usize>,
    pub opt_ops: u64,
    pub lvq_ops: u64,
    pub opt_wall: Duration,
    pub lvq_wall: Duration,
    pub reopt_events: u64,
    pub trigger_events: u64,
}

impl Controller {
    pub fn new(cfg: &ScenarioConfig, rng: ChaCha8Rng) -> Self {
        let c = &cfg.control;
        Controller {
            phase: Phase::Bootstrap,
            interval_index: 0,
            intervals_since_reopt: 0,
            model: None,
            store: Vec::new(),
            rng,
            flags: c.ablation,
            n_cells: cfg.scenario.n_cells,
            alpha: if c.ablation.disable_energy { 0.0 } else { cfg.indicators.alpha },
            bootstrap_intervals: c.bootstrap_intervals,
            reopt_period: c.reopt_period,
            qos_threshold: c.qos_deviation_threshold,
            qos_ma_window: c.qos_ma_window,
            sample_window: c.sample_window_intervals,
            max_iter: cfg.optimizer.max_iterations,
            step: StepSchedule { a0: cfg.optimizer.step_a0 },
            k_per_class: cfg.lvq.prototypes_per_cell,
            lr_initial: cfg.lvq.initial_learning_rate,
            lr_decay: cfg.lvq.lr_decay,
            initial_epochs: cfg.lvq.initial_epochs,
            retrain_epochs: cfg.lvq.retrain_epochs,
            train_split: cfg.lvq.train_split,
            fallback_events: 0,
            validation_disagreement: None,
            solver_iterations: Vec::new(),
            opt_ops: 0,
            lvq_ops: 0,
            opt_wall: Duration::ZERO,
            lvq_wall: Duration::ZERO,
            reopt_events: 0,
            trigger_events: 0,
        }
    }

    pub fn model(&self) -> Option<&LvqModel> {
        self.model.as_ref()
    }

    /// Run the labeler: the Lagrangian solver, or the greedy rule when
    /// optimizer labels are ablated.
    fn run_labeler(&mut self, snap: &Snapshot) -> Result<AssociationDecision> {
        let t0 = Instant::now();
        let decision = if self.flags.disable_opt_labels {
            let assignment = gsa_select(snap.costs, snap.capacities)?;
            let objective = optim::objective_value(&assignment, snap.costs)?;
            self.opt_ops += (snap.costs.n_users() * snap.costs.n_cells()) as u64;
            AssociationDecision {
                assignment,
                objective,
                duals: optim::DualVariables::zeros(snap.costs.n_users(), snap.costs.n_cells()),
                iterations: 1,
                feasible: true,
            }
        } else {
            let d = optim::solve(snap.costs, snap.capacities, self.max_iter, self.step)?;
            self.opt_ops += (d.iterations * snap.costs.n_users() * snap.costs.n_cells()) as u64;
            d
        };
        self.opt_wall += t0.elapsed();
        self.solver_iterations.push(decision.iterations);
        Ok(decision)
    }

    fn emit_samples(&self, snap: &Snapshot, decision: &[usize]) -> Vec<LabeledSample> {
        let mut out = Vec::with_capacity(snap.features.len() * self.n_cells);
        for (j, row) in snap.features.iter().enumerate() {
            for (i, features) in row.iter().enumerate() {
                out.push(LabeledSample {
                    features: *features,
                    label: decision[j],
                    interval: snap.interval,
                    user: j,
                    cell: i,
                });
            }
        }
        out
    }

    fn split_train_val<'a>(
        &mut self,
        samples: &'a [LabeledSample],
    ) -> (Vec<&'a LabeledSample>, Vec<&'a LabeledSample>) {
        let mut idx: Vec<usize> = (0..samples.len()).collect();
        idx.shuffle(&mut self.rng);
        let n_train = ((samples.len() as f64) * self.train_split).round() as usize;
        let n_train = n_train.clamp(1, samples.len());
        let train = idx[..n_train].iter().map(|&i| &samples[i]).collect();
        let val = idx[n_train..].iter().map(|&i| &samples[i]).collect();
        (train, val)
    }

    fn update_validation(&mut self, val: &[&LabeledSample]) {
        if val.is_empty() {
            return;
        }
        let model = self.model.as_ref().expect("validation runs after training");
        let wrong = val
            .iter()
            .filter(|s| lvq::classify(model, &s.features) != Some(s.label))
            .count();
        self.validation_disagreement = Some(wrong as f64 / val.len() as f64);
    }

    fn initial_training(&mut self) -> Result<()> {
        let t0 = Instant::now();
        let samples = std::mem::take(&mut self.store);
        let (train, val) = {
            // split borrows `samples`; clone the references into owned vecs
            let (t, v) = self.split_train_val(&samples);
            (t.into_iter().copied().collect::<Vec<_>>(), v.into_iter().copied().collect::<Vec<_>>())
        };
        let lr = LearningRate::new(self.lr_initial, self.lr_decay);
        let mut model =
            lvq::init_prototypes(&train, self.n_cells, self.k_per_class, lr, &mut self.rng)?;
        for _ in 0..self.initial_epochs {
            lvq::train_epoch(&mut model, &train, &mut self.rng);
        }
        self.lvq_ops += self.initial_epochs as u64
            * train.len() as u64
            * model.prototypes.len() as u64
            * FEATURE_DIM as u64;
        self.model = Some(model);
        let val_refs: Vec<&LabeledSample> = val.iter().collect();
        self.update_validation(&val_refs);
        self.store = samples;
        self.lvq_wall += t0.elapsed();
        Ok(())
    }

    fn incremental_training(&mut self, new_samples: &[LabeledSample]) {
        let t0 = Instant::now();
        let (train, val) = self.split_train_val(new_samples);
        let train: Vec<LabeledSample> = train.into_iter().copied().collect();
        let val: Vec<LabeledSample> = val.into_iter().copied().collect();
        if let Some(model) = self.model.as_mut() {
            for _ in 0..self.retrain_epochs {
                lvq::train_epoch(model, &train, &mut self.rng);
            }
            self.lvq_ops += self.retrain_epochs as u64
                * train.len() as u64
                * model.prototypes.len() as u64
                * FEATURE_DIM as u64;
        }
        let val_refs: Vec<&LabeledSample> = val.iter().collect();
        self.update_validation(&val_refs);
        self.lvq_wall += t0.elapsed();
    }

    /// Capacity-constrained classifier inference: users in index order take
    /// the candidate cell with the smallest prototype distance among cells
    /// with remaining capacity.
    fn lvq_predict(&mut self, snap: &Snapshot) -> Result<Vec<usize>> {
        let t0 = Instant::now();
        let model = self.model.as_ref().expect("hybrid phase requires a model");
        let mut remaining = snap.capacities.to_vec();
        let mut out = Vec::with_capacity(snap.features.len());
        let mut fallbacks = 0;
        for row in snap.features.iter() {
            let candidates: Vec<(usize, FeatureVector)> = row
                .iter()
                .enumerate()
                .filter(|(i, _)| remaining[*i] > 0)
                .map(|(i, f)| (i, *f))
                .collect();
            let sel = lvq::select_cell(model, &candidates, self.alpha)?;
            if matches!(sel, Selection::CostFallback(_)) {
                fallbacks += 1;
            }
            let cell = sel.cell();
            remaining[cell] -= 1;
            out.push(cell);
        }
        self.fallback_events += fallbacks;
        self.lvq_ops += (snap.features.len()
            * snap.features.first().map_or(0, |r| r.len())
            * self.k_per_class
            * FEATURE_DIM) as u64;
        self.lvq_wall += t0.elapsed();
        Ok(out)
    }

    fn prune_store(&mut self, current_interval: usize) {
        let cutoff = current_interval.saturating_sub(self.sample_window);
        self.store.retain(|s| s.interval > cutoff);
    }

    /// One decision step. `snap` reflects the state at the interval start;
    /// `qos` carries composite feedback for the intervals simulated so far.
    pub fn step(&mut self, snap: &Snapshot, qos: &QosTracker) -> Result<ControllerDecision> {
        self.interval_index = snap.interval;

        // A1: no learning layer at all
        if self.flags.disable_lvq {
            let decision = self.run_labeler(snap)?;
            return Ok(ControllerDecision {
                applied: decision.assignment.clone(),
                lvq_prediction: None,
                labeler_decision: Some(decision),
                samples: Vec::new(),
                trigger_fired: false,
            });
        }

        if snap.interval <= self.bootstrap_intervals {
            self.phase = Phase::Bootstrap;
            let decision = self.run_labeler(snap)?;
            let samples = self.emit_samples(snap, &decision.assignment);
            self.store.extend_from_slice(&samples);
            if snap.interval == self.bootstrap_intervals {
                self.initial_training()?;
                self.phase = Phase::Hybrid;
                self.intervals_since_reopt = 0;
            }
            return Ok(ControllerDecision {
                applied: decision.assignment.clone(),
                lvq_prediction: None,
                labeler_decision: Some(decision),
                samples,
                trigger_fired: false,
            });
        }

        self.phase = Phase::Hybrid;
        let prediction = self.lvq_predict(snap)?;
        self.intervals_since_reopt += 1;
        let due = self.intervals_since_reopt >= self.reopt_period;
        let trigger = qos.deviation_exceeded(self.qos_ma_window, self.qos_threshold);
        if due || trigger {
            if trigger {
                self.trigger_events += 1;
            }
            self.reopt_events += 1;
            let decision = self.run_labeler(snap)?;
            let samples = self.emit_samples(snap, &decision.assignment);
            self.store.extend_from_slice(&samples);
            self.prune_store(snap.interval);
            self.incremental_training(&samples);
            self.intervals_since_reopt = 0;
            return Ok(ControllerDecision {
                applied: decision.assignment.clone(),
                lvq_prediction: Some(prediction),
                labeler_decision: Some(decision),
                samples,
                trigger_fired: trigger,
            });
        }

        Ok(ControllerDecision {
            applied: prediction.clone(),
            lvq_prediction: Some(prediction),
            labeler_decision: None,
            samples: Vec::new(),
            trigger_fired: false,
        })
    }

    pub fn sample_store_len(&self) -> usize {
        self.store.len()
    }
}

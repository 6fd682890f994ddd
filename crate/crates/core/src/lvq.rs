//! Prototype-based classifier that mimics the association optimizer.
//!
//! Every user–cell candidate pair observed during a labeling interval yields
//! a five-component feature vector `[Q/C̃, μW, P, D, E]` labeled with the cell
//! the optimizer picked for that user. Per cell a small set of prototypes is
//! kept in min–max-normalized feature space; training attracts the nearest
//! prototype toward same-label samples and repels it otherwise, under a
//! strictly decreasing learning-rate schedule. At inference the serving cell
//! is the candidate whose prototype set is closest to that candidate's own
//! feature vector.
//!
//! [`approximation_error`] and [`cumulative_regret`] quantify how far the
//! learned decisions drift from the optimizer's.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub const FEATURE_DIM: usize = 5;

/// Feature vector of one user–cell pair, fixed component order
/// `(occ, wi, p, d, e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    pub fn occ(&self) -> f64 {
        self.0[0]
    }

    pub fn wi(&self) -> f64 {
        self.0[1]
    }

    pub fn p(&self) -> f64 {
        self.0[2]
    }

    pub fn d(&self) -> f64 {
        self.0[3]
    }

    pub fn e(&self) -> f64 {
        self.0[4]
    }

    fn dist2(&self, other: &[f64; FEATURE_DIM]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Raw (un-normalized) feature construction from queue descriptors and
/// indicator values.
pub fn build_feature(
    q: f64,
    c_tilde: f64,
    mu: f64,
    w: f64,
    p: f64,
    d: f64,
    e: f64,
) -> Result<FeatureVector> {
    if !(c_tilde.is_finite() && c_tilde > 0.0) {
        return Err(Error::domain(format!("c_tilde must be > 0, got {c_tilde}")));
    }
    let v = [q / c_tilde, mu * w, p, d, e];
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("feature components must be finite".to_string()));
    }
    Ok(FeatureVector(v))
}

/// Per-feature min–max bounds fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBounds {
    pub min: [f64; FEATURE_DIM],
    pub max: [f64; FEATURE_DIM],
}

/// Fit min–max bounds over a sample set.
pub fn fit_normalizer<'a>(samples: impl IntoIterator<Item = &'a FeatureVector>) -> Result<NormBounds> {
    let mut min = [f64::INFINITY; FEATURE_DIM];
    let mut max = [f64::NEG_INFINITY; FEATURE_DIM];
    let mut seen = false;
    for s in samples {
        seen = true;
        for k in 0..FEATURE_DIM {
            min[k] = min[k].min(s.0[k]);
            max[k] = max[k].max(s.0[k]);
        }
    }
    if !seen {
        return Err(Error::domain("cannot fit normalizer on an empty sample set".to_string()));
    }
    Ok(NormBounds { min, max })
}

/// Min–max scale into `[0,1]`, clamping out-of-range queries. A feature with
/// no spread maps to 0.5 so it stays uninformative rather than dividing by
/// zero.
pub fn normalize(v: &FeatureVector, bounds: &NormBounds) -> FeatureVector {
    let mut out = [0.0; FEATURE_DIM];
    for k in 0..FEATURE_DIM {
        let span = bounds.max[k] - bounds.min[k];
        out[k] = if span > 0.0 {
            ((v.0[k] - bounds.min[k]) / span).clamp(0.0, 1.0)
        } else {
            0.5
        };
    }
    FeatureVector(out)
}

/// One labeled training instance: the features of a candidate pair and the
/// cell the labeler actually selected for that user. `cell` identifies the
/// candidate the features describe; `label` is the selected cell (shared by
/// all candidates of one user-decision).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledSample {
    pub features: FeatureVector,
    pub label: usize,
    pub interval: usize,
    pub user: usize,
    pub cell: usize,
}

/// A prototype point in normalized feature space with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct Prototype {
    pub weights: [f64; FEATURE_DIM],
    pub label: usize,
}

/// Exponentially decaying learning-rate schedule; strictly decreasing and
/// converging to zero across epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningRate {
    pub initial: f64,
    pub decay: f64,
    pub epoch: u32,
}

impl LearningRate {
    pub fn new(initial: f64, decay: f64) -> Self {
        LearningRate { initial, decay, epoch: 0 }
    }

    pub fn current(&self) -> f64 {
        self.initial * self.decay.powi(self.epoch as i32)
    }

    pub fn advance(&mut self) {
        self.epoch += 1;
    }
}

/// Prototype sets for all cells plus the normalization state.
#[derive(Debug, Clone, PartialEq)]
pub struct LvqModel {
    pub prototypes: Vec<Prototype>,
    pub bounds: NormBounds,
    pub lr: LearningRate,
    pub k_per_class: usize,
    n_cells: usize,
    has_class: Vec<bool>,
}

impl LvqModel {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn has_prototypes_for(&self, cell: usize) -> bool {
        self.has_class.get(cell).copied().unwrap_or(false)
    }
}

/// Initialize prototypes from normalized training samples: `k` seeded
/// distinct samples per observed class, or `k` copies of the class mean when
/// a class has fewer than `k` samples.
///
/// A class is seeded from the samples where the candidate itself was the
/// selected cell, so each prototype starts at a state under which its cell
/// actually won; the other candidates of those decisions enter only through
/// the attract/repel passes of training.
pub fn init_prototypes(
    samples: &[LabeledSample],
    n_cells: usize,
    k_per_class: usize,
    lr: LearningRate,
    rng: &mut impl Rng,
) -> Result<LvqModel> {
    if samples.is_empty() {
        return Err(Error::domain("cannot initialize prototypes without samples".to_string()));
    }
    if k_per_class == 0 {
        return Err(Error::domain("k_per_class must be >= 1".to_string()));
    }
    let bounds = fit_normalizer(samples.iter().map(|s| &s.features))?;

    let mut by_class: Vec<Vec<FeatureVector>> = vec![Vec::new(); n_cells];
    for s in samples {
        if s.label >= n_cells {
            return Err(Error::domain(format!("sample label {} out of range", s.label)));
        }
        if s.cell == s.label {
            by_class[s.label].push(normalize(&s.features, &bounds));
        }
    }
    // classes observed only through foreign candidates still get prototypes
    for s in samples {
        if by_class[s.label].is_empty() {
            by_class[s.label].push(normalize(&s.features, &bounds));
        }
    }

    let mut prototypes = Vec::new();
    let mut has_class = vec![false; n_cells];
    for (label, class_samples) in by_class.iter().enumerate() {
        if class_samples.is_empty() {
            continue;
        }
        has_class[label] = true;
        if class_samples.len() >= k_per_class {
            let mut idx: Vec<usize> = (0..class_samples.len()).collect();
            idx.shuffle(rng);
            for &i in idx.iter().take(k_per_class) {
                prototypes.push(Prototype { weights: class_samples[i].0, label });
            }
        } else {
            let mut mean = [0.0; FEATURE_DIM];
            for s in class_samples {
                for k in 0..FEATURE_DIM {
                    mean[k] += s.0[k];
                }
            }
            for m in &mut mean {
                *m /= class_samples.len() as f64;
            }
            for _ in 0..k_per_class {
                prototypes.push(Prototype { weights: mean, label });
            }
        }
    }

    Ok(LvqModel { prototypes, bounds, lr, k_per_class, n_cells, has_class })
}

/// One training pass: samples in seeded shuffled order each move their
/// nearest prototype toward them on a label match and away otherwise.
/// Consumes the current learning rate and advances the schedule.
pub fn train_epoch(model: &mut LvqModel, samples: &[LabeledSample], rng: &mut impl Rng) {
    let lr = model.lr.current();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(rng);
    for &si in &order {
        let s = &samples[si];
        let x = normalize(&s.features, &model.bounds);
        let Some(win) = nearest_prototype(&model.prototypes, &x) else {
            continue;
        };
        let proto = &mut model.prototypes[win];
        let sign = if proto.label == s.label { lr } else { -lr };
        for k in 0..FEATURE_DIM {
            proto.weights[k] += sign * (x.0[k] - proto.weights[k]);
        }
    }
    model.lr.advance();
}

fn nearest_prototype(prototypes: &[Prototype], x: &FeatureVector) -> Option<usize> {
    let mut best = None;
    let mut best_d = f64::INFINITY;
    for (i, p) in prototypes.iter().enumerate() {
        let d = x.dist2(&p.weights);
        if d < best_d {
            best_d = d;
            best = Some(i);
        }
    }
    best
}

/// Nearest-prototype class of a single normalized-space query; used for
/// validation monitoring.
pub fn classify(model: &LvqModel, features: &FeatureVector) -> Option<usize> {
    let x = normalize(features, &model.bounds);
    nearest_prototype(&model.prototypes, &x).map(|i| model.prototypes[i].label)
}

/// Outcome of a per-user cell selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    /// Chosen by prototype distances.
    Lvq(usize),
    /// A candidate had no prototypes; fell back to instantaneous cost argmin.
    CostFallback(usize),
}

impl Selection {
    pub fn cell(&self) -> usize {
        match *self {
            Selection::Lvq(c) | Selection::CostFallback(c) => c,
        }
    }
}

/// Pick the serving cell among candidates: per candidate the distance to its
/// own cell's prototype set is minimized, then the cell with the smallest
/// distance wins, ties to the lowest cell index.
///
/// If any candidate cell has no prototypes yet, the whole decision falls back
/// to the instantaneous cost argmin over the candidates (`cost = d + p +
/// alpha*e` on raw features), which mirrors the greedy service-aware rule.
pub fn select_cell(
    model: &LvqModel,
    candidates: &[(usize, FeatureVector)],
    alpha: f64,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::domain("select_cell needs at least one candidate".to_string()));
    }
    if candidates.iter().any(|(cell, _)| !model.has_prototypes_for(*cell)) {
        let mut best = candidates[0].0;
        let mut best_cost = f64::INFINITY;
        for (cell, f) in candidates {
            let cost = f.d() + f.p() + alpha * f.e();
            if cost < best_cost {
                best_cost = cost;
                best = *cell;
            }
        }
        return Ok(Selection::CostFallback(best));
    }

    let mut best = candidates[0].0;
    let mut best_d = f64::INFINITY;
    for (cell, f) in candidates {
        let x = normalize(f, &model.bounds);
        let d = model
            .prototypes
            .iter()
            .filter(|p| p.label == *cell)
            .map(|p| x.dist2(&p.weights))
            .fold(f64::INFINITY, f64::min);
        if d < best_d {
            best_d = d;
            best = *cell;
        }
    }
    Ok(Selection::Lvq(best))
}

/// Fraction of positions where two equal-length decision sequences disagree.
pub fn approximation_error(ml: &[usize], opt: &[usize]) -> Result<f64> {
    if ml.len() != opt.len() {
        return Err(Error::domain(format!(
            "decision sequences differ in length: {} vs {}",
            ml.len(),
            opt.len()
        )));
    }
    if ml.is_empty() {
        return Ok(0.0);
    }
    let disagree = ml.iter().zip(opt).filter(|(a, b)| a != b).count();
    Ok(disagree as f64 / ml.len() as f64)
}

/// Running prefix sums of per-interval objective gaps `J(ml) − J(opt)`.
pub fn cumulative_regret(ml_objectives: &[f64], opt_objectives: &[f64]) -> Result<Vec<f64>> {
    if ml_objectives.len() != opt_objectives.len() {
        return Err(Error::domain(format!(
            "objective sequences differ in length: {} vs {}",
            ml_objectives.len(),
            opt_objectives.len()
        )));
    }
    let mut out = Vec::with_capacity(ml_objectives.len());
    let mut acc = 0.0;
    for (m, o) in ml_objectives.iter().zip(opt_objectives) {
        acc += m - o;
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fv(v: [f64; 5]) -> FeatureVector {
        FeatureVector(v)
    }

    #[test]
    fn build_feature_examples() {
        let idle = build_feature(0.0, 1000.0, 10.0, 0.0, 0.0, 0.0, 75.0).unwrap();
        assert_eq!(idle, fv([0.0, 0.0, 0.0, 0.0, 75.0]));

        let loaded = build_feature(500.0, 1000.0, 4.0, 1.0, 0.25, 1.9, 93.75).unwrap();
        assert_eq!(loaded, fv([0.5, 4.0, 0.25, 1.9, 93.75]));

        assert!(build_feature(1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(build_feature(1.0, 1.0, f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn identical_cells_identical_features() {
        let a = build_feature(10.0, 1000.0, 5.0, 0.1, 0.2, 0.3, 80.0).unwrap();
        let b = build_feature(10.0, 1000.0, 5.0, 0.1, 0.2, 0.3, 80.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normalizer_bounds_and_clamp() {
        let samples = [fv([0.0, 1.0, 2.0, 3.0, 4.0]), fv([1.0, 3.0, 6.0, 9.0, 12.0])];
        let b = fit_normalizer(samples.iter()).unwrap();
        let lo = normalize(&samples[0], &b);
        let hi = normalize(&samples[1], &b);
        assert_eq!(lo, fv([0.0; 5]));
        assert_eq!(hi, fv([1.0; 5]));
        // query at twice the training max clamps to 1
        let big = normalize(&fv([2.0, 6.0, 12.0, 18.0, 24.0]), &b);
        assert_eq!(big, fv([1.0; 5]));
    }

    #[test]
    fn normalizer_constant_feature_maps_to_half() {
        let samples = [fv([5.0, 0.0, 0.0, 0.0, 1.0]), fv([5.0, 1.0, 1.0, 1.0, 2.0])];
        let b = fit_normalizer(samples.iter()).unwrap();
        let n = normalize(&samples[0], &b);
        assert_eq!(n.0[0], 0.5);
    }

    #[test]
    fn normalizer_empty_errors() {
        assert!(fit_normalizer(std::iter::empty()).is_err());
    }

    #[test]
    fn normalize_idempotent_on_unit_bounds() {
        let b = NormBounds { min: [0.0; 5], max: [1.0; 5] };
        let v = fv([0.1, 0.9, 0.5, 0.0, 1.0]);
        let once = normalize(&v, &b);
        let twice = normalize(&once, &b);
        assert_eq!(once, twice);
    }

    fn sample(features: [f64; 5], label: usize) -> LabeledSample {
        LabeledSample { features: fv(features), label, interval: 0, user: 0, cell: label }
    }

    #[test]
    fn init_single_sample_classes() {
        let samples =
            vec![sample([0.0, 0.0, 0.0, 0.0, 0.0], 0), sample([1.0, 1.0, 1.0, 1.0, 1.0], 1)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = init_prototypes(&samples, 2, 1, LearningRate::new(0.1, 0.95), &mut rng).unwrap();
        assert_eq!(m.prototypes.len(), 2);
        // prototypes sit exactly on the (normalized) samples
        assert_eq!(m.prototypes[0].weights, [0.0; 5]);
        assert_eq!(m.prototypes[1].weights, [1.0; 5]);
    }

    #[test]
    fn init_duplicates_class_mean_when_short() {
        let samples =
            vec![sample([0.2, 0.4, 0.0, 0.0, 0.0], 0), sample([1.0, 1.0, 1.0, 1.0, 1.0], 1)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = init_prototypes(&samples, 2, 2, LearningRate::new(0.1, 0.95), &mut rng).unwrap();
        let class0: Vec<_> = m.prototypes.iter().filter(|p| p.label == 0).collect();
        assert_eq!(class0.len(), 2);
        assert_eq!(class0[0].weights, class0[1].weights);
    }

    #[test]
    fn init_deterministic_for_fixed_seed() {
        let samples: Vec<LabeledSample> = (0..20)
            .map(|i| sample([i as f64, (i * 3 % 7) as f64, 0.0, 1.0, i as f64 * 0.5], i % 3))
            .collect();
        let a = init_prototypes(
            &samples,
            3,
            2,
            LearningRate::new(0.1, 0.95),
            &mut ChaCha8Rng::seed_from_u64(9),
        )
        .unwrap();
        let b = init_prototypes(
            &samples,
            3,
            2,
            LearningRate::new(0.1, 0.95),
            &mut ChaCha8Rng::seed_from_u64(9),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn init_rejects_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(init_prototypes(&[], 2, 2, LearningRate::new(0.1, 0.95), &mut rng).is_err());
    }

    /// Model with hand-placed prototypes on identity bounds.
    fn hand_model(protos: &[([f64; 5], usize)], n_cells: usize) -> LvqModel {
        let mut has_class = vec![false; n_cells];
        for (_, label) in protos {
            has_class[*label] = true;
        }
        LvqModel {
            prototypes: protos
                .iter()
                .map(|(w, l)| Prototype { weights: *w, label: *l })
                .collect(),
            bounds: NormBounds { min: [0.0; 5], max: [1.0; 5] },
            lr: LearningRate::new(0.1, 0.95),
            k_per_class: 1,
            n_cells,
            has_class,
        }
    }

    #[test]
    fn train_attract_and_repel() {
        // scalar view along the first feature: w = 0, x = 1
        let samples = vec![sample([1.0, 0.0, 0.0, 0.0, 0.0], 0)];
        let mut m = hand_model(&[([0.0; 5], 0)], 1);
        train_epoch(&mut m, &samples, &mut ChaCha8Rng::seed_from_u64(0));
        assert!((m.prototypes[0].weights[0] - 0.1).abs() < 1e-15);

        let mut m = hand_model(&[([0.0; 5], 1)], 2);
        let samples = vec![sample([1.0, 0.0, 0.0, 0.0, 0.0], 0)];
        train_epoch(&mut m, &samples, &mut ChaCha8Rng::seed_from_u64(0));
        assert!((m.prototypes[0].weights[0] - (-0.1)).abs() < 1e-15);
    }

    #[test]
    fn train_fixed_point_at_exact_prototype() {
        let mut m = hand_model(&[([0.25, 0.5, 0.0, 0.0, 1.0], 0)], 1);
        let samples = vec![sample([0.25, 0.5, 0.0, 0.0, 1.0], 0)];
        train_epoch(&mut m, &samples, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(m.prototypes[0].weights, [0.25, 0.5, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn matched_update_contracts_mismatched_expands() {
        let x = fv([0.8, 0.1, 0.3, 0.9, 0.2]);
        for (proto_label, sample_label) in [(0usize, 0usize), (0, 1)] {
            let mut m = hand_model(&[([0.2, 0.2, 0.2, 0.2, 0.2], proto_label)], 2);
            let before = x.dist2(&m.prototypes[0].weights);
            let s = LabeledSample {
                features: x,
                label: sample_label,
                interval: 0,
                user: 0,
                cell: sample_label,
            };
            train_epoch(&mut m, &[s], &mut ChaCha8Rng::seed_from_u64(0));
            let after = x.dist2(&m.prototypes[0].weights);
            if proto_label == sample_label {
                assert!(after < before, "matched update must contract");
            } else {
                assert!(after > before, "mismatched update must expand");
            }
        }
    }

    #[test]
    fn learning_rate_strictly_decreasing_to_zero() {
        let mut lr = LearningRate::new(0.1, 0.95);
        let mut prev = f64::INFINITY;
        for _ in 0..200 {
            let cur = lr.current();
            assert!(cur < prev);
            prev = cur;
            lr.advance();
        }
        assert!(lr.current() < 1e-4);
    }

    #[test]
    fn select_exact_prototype_match() {
        let m = hand_model(
            &[([0.1; 5], 0), ([0.5; 5], 1), ([0.2; 5], 2), ([0.9; 5], 3)],
            4,
        );
        let candidates: Vec<(usize, FeatureVector)> =
            vec![(0, fv([0.6; 5])), (1, fv([0.6; 5])), (2, fv([0.6; 5])), (3, fv([0.9; 5]))];
        // candidate 3's features sit exactly on cell 3's prototype
        assert_eq!(select_cell(&m, &candidates, 0.3).unwrap(), Selection::Lvq(3));
    }

    #[test]
    fn select_single_candidate() {
        let m = hand_model(&[([0.5; 5], 2)], 3);
        let sel = select_cell(&m, &[(2, fv([0.0; 5]))], 0.3).unwrap();
        assert_eq!(sel.cell(), 2);
    }

    #[test]
    fn select_matches_distance_table() {
        let m = hand_model(&[([0.0; 5], 0), ([0.4; 5], 1), ([1.0; 5], 2)], 3);
        let cands = vec![(0, fv([0.5; 5])), (1, fv([0.45; 5])), (2, fv([0.3; 5]))];
        // distances: cell0: 0.5^2*5, cell1: 0.05^2*5, cell2: 0.7^2*5
        assert_eq!(select_cell(&m, &cands, 0.3).unwrap(), Selection::Lvq(1));
    }

    #[test]
    fn select_fallback_without_prototypes() {
        let m = hand_model(&[([0.0; 5], 0)], 2);
        // cell 1 has no prototypes: instantaneous cost argmin decides
        let cheap = fv([0.0, 0.0, 0.0, 0.1, 10.0]);
        let steep = fv([0.0, 0.0, 0.5, 2.0, 90.0]);
        let sel = select_cell(&m, &[(0, steep), (1, cheap)], 0.3).unwrap();
        assert_eq!(sel, Selection::CostFallback(1));
    }

    #[test]
    fn select_degenerates_to_nearest_prototype_label() {
        // one prototype per cell and a shared query vector: equivalent to 1-NN
        let protos = [([0.1, 0.0, 0.2, 0.0, 0.9], 0), ([0.3, 0.3, 0.3, 0.3, 0.3], 1), ([0.9; 5], 2)];
        let m = hand_model(&protos, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = fv([rng.gen(), rng.gen(), rng.gen(), rng.gen(), rng.gen()]);
            let cands: Vec<(usize, FeatureVector)> = (0..3).map(|c| (c, x)).collect();
            let sel = select_cell(&m, &cands, 0.3).unwrap().cell();
            let nn = protos
                .iter()
                .min_by(|a, b| x.dist2(&a.0).partial_cmp(&x.dist2(&b.0)).unwrap())
                .unwrap()
                .1;
            assert_eq!(sel, nn);
        }
    }

    #[test]
    fn separable_classes_learned_quickly() {
        // two well-separated blobs; >= 99% training accuracy within 20 epochs
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut samples = Vec::new();
        for _ in 0..200 {
            let jitter = |rng: &mut ChaCha8Rng| rng.gen::<f64>() * 0.2;
            samples.push(sample(
                [jitter(&mut rng), jitter(&mut rng), jitter(&mut rng), jitter(&mut rng), jitter(&mut rng)],
                0,
            ));
            samples.push(sample(
                [
                    0.8 + jitter(&mut rng),
                    0.8 + jitter(&mut rng),
                    0.8 + jitter(&mut rng),
                    0.8 + jitter(&mut rng),
                    0.8 + jitter(&mut rng),
                ],
                1,
            ));
        }
        let mut model =
            init_prototypes(&samples, 2, 2, LearningRate::new(0.1, 0.95), &mut rng).unwrap();
        for _ in 0..20 {
            train_epoch(&mut model, &samples, &mut rng);
        }
        let correct = samples
            .iter()
            .filter(|s| classify(&model, &s.features) == Some(s.label))
            .count();
        assert!(correct as f64 >= 0.99 * samples.len() as f64, "{correct}/{}", samples.len());
    }

    #[test]
    fn approximation_error_examples() {
        assert_eq!(approximation_error(&[1, 2, 3], &[1, 2, 3]).unwrap(), 0.0);
        assert_eq!(approximation_error(&[1, 2], &[2, 1]).unwrap(), 1.0);
        assert_eq!(approximation_error(&[1, 1, 2, 2], &[1, 2, 2, 1]).unwrap(), 0.5);
        assert!(approximation_error(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn cumulative_regret_examples() {
        let zeros = cumulative_regret(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(zeros, vec![0.0, 0.0]);
        let r = cumulative_regret(&[1.1; 10], &[1.0; 10]).unwrap();
        assert!((r[9] - 1.0).abs() < 1e-12);
        assert!(cumulative_regret(&[1.0], &[]).is_err());
    }
}

//! Capacity-constrained user association via Lagrangian relaxation.
//!
//! The per-interval problem assigns each user to exactly one cell while no
//! cell exceeds its association capacity, minimizing the summed pair costs
//! `D + P + α·E`. Relaxing the capacity constraints with multipliers ξ ≥ 0
//! decomposes the problem per user: the relaxed minimizer picks, for every
//! user independently, the cell with the smallest adjusted cost
//! `cost + ξ_i`. A projected subgradient step raises ξ on overloaded cells,
//! and a capacity-respecting greedy projection recovers a feasible incumbent
//! each iteration; the best incumbent by raw objective is returned.
//!
//! [`brute_force_oracle`] provides exact minima on small instances for
//! verification.

use crate::error::{Error, Result};

/// Users × cells cost matrix (`entries[user][cell]`).
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub entries: Vec<Vec<f64>>,
    /// Energy weight the entries were built with; carried for bookkeeping.
    pub alpha: f64,
}

impl CostMatrix {
    pub fn new(entries: Vec<Vec<f64>>, alpha: f64) -> Result<Self> {
        let n_cells = entries.first().map_or(0, |r| r.len());
        for (j, row) in entries.iter().enumerate() {
            if row.len() != n_cells {
                return Err(Error::domain(format!("cost row {j} has inconsistent width")));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::domain(format!("cost[{j}] contains invalid entry {v}")));
            }
        }
        Ok(CostMatrix { entries, alpha })
    }

    pub fn n_users(&self) -> usize {
        self.entries.len()
    }

    pub fn n_cells(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }
}

/// Multipliers of the relaxed problem: ν per user (free sign), ξ per cell
/// (projected onto the nonnegative orthant).
#[derive(Debug, Clone, PartialEq)]
pub struct DualVariables {
    pub nu: Vec<f64>,
    pub xi: Vec<f64>,
}

impl DualVariables {
    pub fn zeros(n_users: usize, n_cells: usize) -> Self {
        DualVariables { nu: vec![0.0; n_users], xi: vec![0.0; n_cells] }
    }
}

/// A per-interval association outcome. `assignment[j]` is user j's cell, so
/// each row of the implied binary matrix sums to one by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationDecision {
    pub assignment: Vec<usize>,
    pub objective: f64,
    pub duals: DualVariables,
    pub iterations: usize,
    pub feasible: bool,
}

/// Objective of a binary assignment under `costs`: Σ cost[j][x_j].
pub fn objective_value(assignment: &[usize], costs: &CostMatrix) -> Result<f64> {
    if assignment.len() != costs.n_users() {
        return Err(Error::domain(format!(
            "assignment covers {} users, cost matrix {}",
            assignment.len(),
            costs.n_users()
        )));
    }
    let n_cells = costs.n_cells();
    let mut total = 0.0;
    for (j, &i) in assignment.iter().enumerate() {
        if i >= n_cells {
            return Err(Error::domain(format!("user {j} assigned to invalid cell {i}")));
        }
        total += costs.entries[j][i];
    }
    Ok(total)
}

fn check_capacity_inputs(costs: &CostMatrix, capacities: &[usize]) -> Result<()> {
    if capacities.len() != costs.n_cells() {
        return Err(Error::domain(format!(
            "{} capacities for {} cells",
            capacities.len(),
            costs.n_cells()
        )));
    }
    let total: usize = capacities.iter().sum();
    if total < costs.n_users() {
        return Err(Error::Infeasible { users: costs.n_users(), capacity: total });
    }
    Ok(())
}

/// Argmin over a slice with lowest-index tie-breaking.
fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for (i, v) in values.enumerate() {
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

/// Greedy capacity-respecting projection onto the feasible set.
///
/// Each user should take the cell minimizing its adjusted cost
/// `cost + ξ_i`; when capacity binds the order matters, so users are
/// processed by descending regret gap (second-best adjusted cost minus
/// best) and each takes the cheapest cell with remaining capacity, ties
/// broken by lowest cell index.
pub fn primal_projection(
    costs: &CostMatrix,
    xi: &[f64],
    capacities: &[usize],
) -> Result<Vec<usize>> {
    check_capacity_inputs(costs, capacities)?;
    if xi.len() != costs.n_cells() {
        return Err(Error::domain("xi length must match cell count".to_string()));
    }
    let n_users = costs.n_users();

    // regret gap per user over the full candidate set
    let mut order: Vec<usize> = (0..n_users).collect();
    let gaps: Vec<f64> = costs
        .entries
        .iter()
        .map(|row| {
            let mut best = f64::INFINITY;
            let mut second = f64::INFINITY;
            for (i, c) in row.iter().enumerate() {
                let adj = c + xi[i];
                if adj < best {
                    second = best;
                    best = adj;
                } else if adj < second {
                    second = adj;
                }
            }
            if second.is_finite() { second - best } else { 0.0 }
        })
        .collect();
    // descending gap; stable ascending user index on ties
    order.sort_by(|&a, &b| gaps[b].partial_cmp(&gaps[a]).unwrap().then(a.cmp(&b)));

    let mut remaining = capacities.to_vec();
    let mut assignment = vec![usize::MAX; n_users];
    for &j in &order {
        let mut best = usize::MAX;
        let mut best_adj = f64::INFINITY;
        for (i, c) in costs.entries[j].iter().enumerate() {
            if remaining[i] == 0 {
                continue;
            }
            let adj = c + xi[i];
            if adj < best_adj {
                best_adj = adj;
                best = i;
            }
        }
        debug_assert!(best != usize::MAX, "total capacity checked above");
        assignment[j] = best;
        remaining[best] -= 1;
    }
    Ok(assignment)
}

/// Projected subgradient step on the multipliers given an assignment.
///
/// `ξ_i ← max(0, ξ_i + step·(Σ_j x_ji − C_i))`; ν keeps the analogous rule for
/// the single-association constraint, whose subgradient is zero whenever the
/// assignment already places each user in exactly one cell.
pub fn dual_update(
    duals: &DualVariables,
    assignment: &[usize],
    capacities: &[usize],
    step: f64,
) -> DualVariables {
    let mut counts = vec![0usize; duals.xi.len()];
    for &i in assignment {
        counts[i] += 1;
    }
    let xi = duals
        .xi
        .iter()
        .zip(counts.iter().zip(capacities))
        .map(|(&xi_i, (&n_i, &c_i))| (xi_i + step * (n_i as f64 - c_i as f64)).max(0.0))
        .collect();
    // each user appears exactly once in `assignment`, so the ν subgradient
    // (Σ_i x_ji − 1) vanishes; the rule is retained for generality
    let nu = duals.nu.clone();
    DualVariables { nu, xi }
}

/// Diminishing step sizes `a0/t`, which satisfy Σ step = ∞ and Σ step² < ∞.
#[derive(Debug, Clone, Copy)]
pub struct StepSchedule {
    pub a0: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule { a0: 1.0 }
    }
}

impl StepSchedule {
    pub fn at(&self, iteration: usize) -> f64 {
        self.a0 / iteration as f64
    }
}

/// Solve the capacity-constrained association problem.
///
/// Each iteration solves the relaxed per-user subproblems (plain argmin of
/// adjusted cost, ignoring capacity) to obtain the subgradient, recovers a
/// feasible incumbent by projection, and keeps the best incumbent seen.
/// Terminates early once the multipliers stop moving. Deterministic for
/// fixed inputs.
pub fn solve(
    costs: &CostMatrix,
    capacities: &[usize],
    max_iter: usize,
    schedule: StepSchedule,
) -> Result<AssociationDecision> {
    check_capacity_inputs(costs, capacities)?;
    if max_iter < 1 {
        return Err(Error::domain("max_iter must be >= 1".to_string()));
    }
    let n_users = costs.n_users();
    let n_cells = costs.n_cells();
    let mut duals = DualVariables::zeros(n_users, n_cells);

    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut iterations = 0;
    let mut relaxed = vec![0usize; n_users];

    for t in 1..=max_iter {
        iterations = t;

        // relaxed minimizer: per-user argmin of cost + xi, capacity ignored
        for (j, row) in costs.entries.iter().enumerate() {
            relaxed[j] = argmin(row.iter().zip(&duals.xi).map(|(c, x)| c + x));
        }

        // feasible incumbent under the current prices
        let incumbent = primal_projection(costs, &duals.xi, capacities)?;
        let obj = objective_value(&incumbent, costs)?;
        if best.as_ref().is_none_or(|(_, b)| obj < *b) {
            best = Some((incumbent, obj));
        }

        let next = dual_update(&duals, &relaxed, capacities, schedule.at(t));
        if next.xi == duals.xi {
            // relaxed solution already respects every capacity: converged
            duals = next;
            break;
        }
        duals = next;
    }

    let (assignment, objective) = best.expect("max_iter >= 1 guarantees an incumbent");
    Ok(AssociationDecision { assignment, objective, duals, iterations, feasible: true })
}

/// Maximum number of assignments [`brute_force_oracle`] will enumerate.
pub const ORACLE_ENUM_LIMIT: u128 = 1_000_000;

/// Exhaustive minimum over all capacity-feasible assignments.
///
/// Ties resolve to the lexicographically smallest assignment vector. Guarded
/// by [`ORACLE_ENUM_LIMIT`] on `N^M`.
pub fn brute_force_oracle(
    costs: &CostMatrix,
    capacities: &[usize],
) -> Result<(Vec<usize>, f64)> {
    check_capacity_inputs(costs, capacities)?;
    let n_users = costs.n_users();
    let n_cells = costs.n_cells();
    let combinations = (n_cells as u128)
        .checked_pow(n_users as u32)
        .unwrap_or(u128::MAX);
    if combinations > ORACLE_ENUM_LIMIT {
        return Err(Error::OracleTooLarge { combinations, limit: ORACLE_ENUM_LIMIT });
    }

    let mut current = vec![0usize; n_users];
    let mut counts = vec![0usize; n_cells];
    let mut best: Option<(Vec<usize>, f64)> = None;

    // depth-first enumeration in lexicographic order; the strict `<` on
    // objective keeps the first (lexicographically smallest) minimizer
    fn recurse(
        j: usize,
        costs: &CostMatrix,
        capacities: &[usize],
        current: &mut Vec<usize>,
        counts: &mut Vec<usize>,
        partial: f64,
        best: &mut Option<(Vec<usize>, f64)>,
    ) {
        if j == costs.n_users() {
            if best.as_ref().is_none_or(|(_, b)| partial < *b) {
                *best = Some((current.clone(), partial));
            }
            return;
        }
        for i in 0..costs.n_cells() {
            if counts[i] == capacities[i] {
                continue;
            }
            current[j] = i;
            counts[i] += 1;
            recurse(j + 1, costs, capacities, current, counts, partial + costs.entries[j][i], best);
            counts[i] -= 1;
        }
    }

    recurse(0, costs, capacities, &mut current, &mut counts, 0.0, &mut best);
    best.ok_or_else(|| Error::Infeasible {
        users: n_users,
        capacity: capacities.iter().sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn costs(entries: Vec<Vec<f64>>) -> CostMatrix {
        CostMatrix::new(entries, 0.3).unwrap()
    }

    #[test]
    fn objective_examples() {
        let c = costs(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(objective_value(&[0, 1], &c).unwrap(), 5.0);
        let z = costs(vec![vec![0.0; 3]; 4]);
        assert_eq!(objective_value(&[0, 1, 2, 0], &z).unwrap(), 0.0);
        assert!(objective_value(&[0], &c).is_err());
    }

    #[test]
    fn objective_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let entries: Vec<Vec<f64>> =
            (0..4).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
        let c = costs(entries.clone());
        let x = [2usize, 0, 1, 2];
        let mut expect = 0.0;
        for (j, &i) in x.iter().enumerate() {
            expect += entries[j][i];
        }
        assert_eq!(objective_value(&x, &c).unwrap(), expect);
    }

    #[test]
    fn projection_plain_argmin() {
        let c = costs(vec![vec![1.0, 2.0]]);
        let x = primal_projection(&c, &[0.0, 0.0], &[1, 1]).unwrap();
        assert_eq!(x, vec![0]);
    }

    #[test]
    fn projection_respects_prices() {
        // adjusted costs 2.5 vs 2.0 flip the choice
        let c = costs(vec![vec![1.0, 2.0]]);
        let x = primal_projection(&c, &[1.5, 0.0], &[1, 1]).unwrap();
        assert_eq!(x, vec![1]);
    }

    #[test]
    fn projection_reports_capacity_shortfall() {
        let c = costs(vec![vec![1.0], vec![1.0]]);
        match primal_projection(&c, &[0.0], &[1]) {
            Err(Error::Infeasible { users, capacity }) => {
                assert_eq!((users, capacity), (2, 1));
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn projection_output_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(1..=3);
            let entries: Vec<Vec<f64>> =
                (0..m).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
            let c = costs(entries);
            let mut caps: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
            while caps.iter().sum::<usize>() < m {
                caps[rng.gen_range(0..n)] += 1;
            }
            let x = primal_projection(&c, &vec![0.0; n], &caps).unwrap();
            let mut counts = vec![0usize; n];
            for &i in &x {
                counts[i] += 1;
            }
            assert!(counts.iter().zip(&caps).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn dual_update_examples() {
        let duals = DualVariables::zeros(2, 2);
        // both cells exactly at capacity: zero subgradient
        let d = dual_update(&duals, &[0, 1], &[1, 1], 0.1);
        assert_eq!(d.xi, vec![0.0, 0.0]);

        // cell 0 holds 3 users with capacity 1: subgradient 2
        let duals = DualVariables::zeros(3, 2);
        let d = dual_update(&duals, &[0, 0, 0], &[1, 5], 0.1);
        assert!((d.xi[0] - 0.2).abs() < 1e-15);

        // projection clamps xi at zero
        let duals = DualVariables { nu: vec![0.0], xi: vec![0.05, 0.0] };
        let d = dual_update(&duals, &[1], &[3, 3], 0.1);
        assert_eq!(d.xi[0], 0.0);
    }

    #[test]
    fn solve_dominant_column() {
        let c = costs(vec![vec![0.1, 5.0], vec![0.2, 7.0], vec![0.3, 9.0]]);
        let d = solve(&c, &[3, 3], 200, StepSchedule::default()).unwrap();
        assert_eq!(d.assignment, vec![0, 0, 0]);
        assert!((d.objective - 0.6).abs() < 1e-15);
        assert!(d.feasible);
    }

    #[test]
    fn solve_zero_costs_any_feasible() {
        let c = costs(vec![vec![0.0, 0.0]; 2]);
        let d = solve(&c, &[1, 1], 200, StepSchedule::default()).unwrap();
        assert_eq!(d.objective, 0.0);
        let mut counts = [0usize; 2];
        for &i in &d.assignment {
            counts[i] += 1;
        }
        assert!(counts.iter().all(|&c| c <= 1));
    }

    #[test]
    fn solve_inactive_capacity_is_row_argmin() {
        let c = costs(vec![vec![3.0, 1.0, 2.0], vec![0.5, 4.0, 0.6], vec![9.0, 9.0, 1.0]]);
        let d = solve(&c, &[3, 3, 3], 200, StepSchedule::default()).unwrap();
        assert_eq!(d.assignment, vec![1, 0, 2]);
        // with capacity never binding the duals stay at zero
        assert!(d.duals.xi.iter().all(|&x| x == 0.0));
        assert_eq!(d.iterations, 1);
    }

    #[test]
    fn solve_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let entries: Vec<Vec<f64>> =
            (0..6).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
        let c = costs(entries);
        let a = solve(&c, &[2, 2, 2], 200, StepSchedule::default()).unwrap();
        let b = solve(&c, &[2, 2, 2], 200, StepSchedule::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    #[test]
    fn oracle_examples() {
        let c = costs(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        let (x, obj) = brute_force_oracle(&c, &[1, 1]).unwrap();
        assert_eq!(x, vec![0, 1]);
        assert_eq!(obj, 2.0);

        // single user reduces to plain argmin
        let c = costs(vec![vec![4.0, 1.0, 3.0]]);
        let (x, obj) = brute_force_oracle(&c, &[1, 1, 1]).unwrap();
        assert_eq!(x, vec![1]);
        assert_eq!(obj, 1.0);

        // inactive constraints: per-row argmin
        let c = costs(vec![vec![3.0, 1.0], vec![0.5, 4.0]]);
        let (x, _) = brute_force_oracle(&c, &[2, 2]).unwrap();
        assert_eq!(x, vec![1, 0]);
    }

    #[test]
    fn oracle_size_guard() {
        let c = costs(vec![vec![0.0; 10]; 20]);
        assert!(matches!(
            brute_force_oracle(&c, &[20; 10]),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn solve_never_beats_oracle_and_stays_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut within = 0;
        let total = 60;
        for _ in 0..total {
            let m = rng.gen_range(2..=6);
            let n = rng.gen_range(2..=3);
            let entries: Vec<Vec<f64>> =
                (0..m).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
            let c = costs(entries);
            let mut caps: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
            while caps.iter().sum::<usize>() < m {
                caps[rng.gen_range(0..n)] += 1;
            }
            let d = solve(&c, &caps, 200, StepSchedule::default()).unwrap();
            let (_, oracle_obj) = brute_force_oracle(&c, &caps).unwrap();
            assert!(d.objective >= oracle_obj, "solver below exhaustive minimum");
            if d.objective <= 1.05 * oracle_obj {
                within += 1;
            }
        }
        assert!(within as f64 >= 0.95 * total as f64, "only {within}/{total} within 5%");
    }

    #[test]
    fn raising_a_column_never_attracts_users() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..40 {
            let m = rng.gen_range(2..=6);
            let n = rng.gen_range(2..=3);
            let entries: Vec<Vec<f64>> =
                (0..m).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
            let mut caps: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
            while caps.iter().sum::<usize>() < m {
                caps[rng.gen_range(0..n)] += 1;
            }
            let target = rng.gen_range(0..n);
            let bump = rng.gen_range(0.1..2.0);

            let c1 = costs(entries.clone());
            let mut raised = entries;
            for row in &mut raised {
                row[target] += bump;
            }
            let c2 = costs(raised);

            let count = |d: &AssociationDecision| {
                d.assignment.iter().filter(|&&i| i == target).count()
            };
            let d1 = solve(&c1, &caps, 200, StepSchedule::default()).unwrap();
            let d2 = solve(&c2, &caps, 200, StepSchedule::default()).unwrap();
            assert!(count(&d2) <= count(&d1));
        }
    }
}

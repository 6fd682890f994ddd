//! The discrete-time network simulation: topology, mobility, radio, traffic,
//! per-cell packet queues, and the per-interval decision loop.
//!
//! One interval runs: mobility → shadowing → traffic-statistics estimation →
//! queue descriptors → indicator matrix → policy decision (optionally delayed
//! through the control-plane queue) → handover bookkeeping with lossless
//! queue migration → traffic generation → queue service → metric
//! accumulation. Reported metrics exclude the warm-up window exactly; the
//! composite QoS trace feeding the re-optimization trigger covers the whole
//! run. Everything is deterministic for a fixed seed.

pub mod mobility;
pub mod radio;
pub mod service;
pub mod topology;
pub mod traffic;

use std::collections::VecDeque;

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::indicators::{self, CellIndicatorInput, IndicatorVector};
use crate::lvq::{self, FeatureVector};
use crate::metrics::{
    LatencyHistogram, LittleRecord, RunReport, SampleRecord, MODELED_OPS_PER_MS,
};
use crate::optim::{self, CostMatrix, StepSchedule};
use crate::policy::{Controller, PolicyKind, QosTracker, Snapshot};
use crate::queue::{estimate_stats, QueueDescriptors};
use crate::rng::{stream_rng, Stream};
use crate::sim::mobility::{step_mobility, UserMotion};
use crate::sim::radio::{RadioModel, ShadowingField};
use crate::sim::service::{CellQueue, Delivered, Packet};
use crate::sim::topology::{dist, generate_topology};
use crate::sim::traffic::{CbrSource, Direction};

use rand::Rng;
use rand_distr::{Distribution, Gamma};

/// Per-run execution options not part of the scenario itself.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Collect per-candidate labeled-sample records for the on-disk log.
    pub log_samples: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { log_samples: true }
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<RunReport> {
    run_with_options(cfg, RunOptions::default())
}

fn fnv1a64(acc: u64, bytes: &[u8]) -> u64 {
    let mut h = acc;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn hash_f64s(mut acc: u64, values: impl IntoIterator<Item = f64>) -> u64 {
    for v in values {
        acc = fnv1a64(acc, &v.to_bits().to_le_bytes());
    }
    acc
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;

/// Service fading: one interval's budget aggregates many TTI-scale Rayleigh
/// power samples, so the multiplicative noise is a unit-mean gamma (the
/// average of `shape` unit exponentials), clamped as a guard.
fn draw_fade(gamma: &Gamma<f64>, rng: &mut impl Rng) -> f64 {
    let x: f64 = gamma.sample(rng);
    x.clamp(0.2, 3.0)
}

pub fn run_with_options(cfg: &ScenarioConfig, opts: RunOptions) -> Result<RunReport> {
    cfg.validate()?;
    let seed = cfg.scenario.seed;
    let n_cells = cfg.scenario.n_cells;
    let n_users = cfg.scenario.n_users;
    let dt = cfg.scenario.decision_interval_s;
    let n_intervals = cfg.n_intervals();
    let warmup = cfg.scenario.warmup_s;
    let policy = cfg.control.policy;
    let flags = if policy == PolicyKind::Proposed {
        cfg.control.ablation
    } else {
        Default::default()
    };
    let alpha_eff = if flags.disable_energy { 0.0 } else { cfg.indicators.alpha };
    let capacities = vec![cfg.scenario.cell_capacity; n_cells];
    let c_tilde = cfg.queueing.c_tilde_packets;
    let cell_rate = cfg.cell_packet_rate_pps();
    let user_rate = cfg.user_packet_rate_pps();
    let window_len = cfg.queueing.stats_window_intervals as f64 * dt;
    let track_gap =
        policy == PolicyKind::Proposed && cfg.control.track_optimizer_gap && !flags.disable_lvq;

    let mut topo_rng = stream_rng(seed, Stream::Topology);
    let mut mob_rng = stream_rng(seed, Stream::Mobility);
    let mut traffic_rng = stream_rng(seed, Stream::Traffic);
    let mut shadow_rng = stream_rng(seed, Stream::Shadowing);
    let mut fade_rng = stream_rng(seed, Stream::Fading);

    let topo = generate_topology(
        cfg.scenario.area_width_m,
        cfg.scenario.area_height_m,
        n_cells,
        n_users,
        cfg.scenario.min_cell_separation_m,
        &mut topo_rng,
    )?;
    let topology_fingerprint = hash_f64s(
        FNV_OFFSET,
        topo.cells.iter().chain(topo.users.iter()).flat_map(|p| [p.0, p.1]),
    );

    let radio = RadioModel::from_config(&cfg.radio);
    let mut users: Vec<UserMotion> = topo.users.iter().map(|&p| UserMotion::at(p)).collect();
    let mut shadow = ShadowingField::init(n_users, n_cells, &cfg.radio, &mut shadow_rng);

    // one source per direction per user; phase draws in fixed order
    let mut sources: Vec<(CbrSource, CbrSource)> = (0..n_users)
        .map(|_| {
            (CbrSource::new(user_rate, &mut traffic_rng), CbrSource::new(user_rate, &mut traffic_rng))
        })
        .collect();

    let mut cells: Vec<CellQueue> =
        (0..n_cells).map(|_| CellQueue::new(cfg.queueing.buffer_packets)).collect();

    // initial association: nearest cell by deterministic path loss, identical
    // for every policy so paired runs share their starting point
    let mut current: Vec<usize> = topo
        .users
        .iter()
        .map(|&u| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, &c) in topo.cells.iter().enumerate() {
                let d = dist(u, c);
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best
        })
        .collect();
    let mut attached = vec![0usize; n_cells];
    for &c in &current {
        attached[c] += 1;
    }

    let mut controller = (policy == PolicyKind::Proposed)
        .then(|| Controller::new(cfg, stream_rng(seed, Stream::Lvq)));
    let mut qos = QosTracker::new((cfg.control.qos_weight_latency, cfg.control.qos_weight_plr));
    let mut pending: VecDeque<Vec<usize>> = VecDeque::new();
    let delay = cfg.control.control_delay_intervals;

    // counters
    let mut next_packet_id: u64 = 0;
    let mut generated_per_user = vec![0u64; n_users];
    let mut delivered_per_user = vec![0u64; n_users];
    let mut dropped_per_user = vec![0u64; n_users];
    let mut inflight = vec![0i64; n_users];
    let mut generated_pw = 0u64;
    let mut delivered_pw = 0u64;
    let mut dropped_pw = 0u64;
    let mut hist = LatencyHistogram::new();
    let mut handovers = 0u64;
    let mut eq4_violations = 0u64;
    let mut conservation_violations = 0u64;
    let mut little_trace = Vec::with_capacity(n_intervals * n_cells);
    let mut approx_trace = Vec::new();
    let mut regret_increments = Vec::new();
    let mut labeler_intervals = Vec::new();
    let mut sample_records = Vec::new();
    let mut samples_emitted = 0u64;
    let mut decisions_trace =
        cfg.control.record_decisions.then(|| Vec::with_capacity(n_intervals));
    let mut mobility_fingerprint = FNV_OFFSET;
    let mut traffic_fingerprint = FNV_OFFSET;
    let mut shadow_opt_ops = 0u64;

    let mut delivered_buf: Vec<Delivered> = Vec::new();
    let speed_range = (cfg.mobility.speed_min_mps, cfg.mobility.speed_max_mps);
    let enforce_capacity = matches!(policy, PolicyKind::Gsa | PolicyKind::Proposed);
    let shape = cfg.queueing.fading_shape;
    let fade_gamma = Gamma::new(shape, 1.0 / shape)
        .map_err(|e| crate::error::Error::config(format!("fading shape invalid: {e}")))?;

    for k in 1..=n_intervals {
        let t0 = (k - 1) as f64 * dt;
        let t_end = t0 + dt;
        let post_warmup_decision = t0 >= warmup;

        // mobility and channel evolution
        step_mobility(&mut users, dt, speed_range, cfg.scenario.area_width_m, cfg.scenario.area_height_m, &mut mob_rng);
        mobility_fingerprint =
            hash_f64s(mobility_fingerprint, users.iter().flat_map(|u| [u.pos.0, u.pos.1]));
        let speeds: Vec<f64> = users.iter().map(|u| u.speed).collect();
        shadow.step(&speeds, dt, &mut shadow_rng);

        // analytical descriptors per cell
        let mut cell_inputs = Vec::with_capacity(n_cells);
        for (i, cell) in cells.iter_mut().enumerate() {
            cell.prune_windows(t0 - window_len);
            let stats = estimate_stats(
                cell.arrival_times(),
                cell.service_durations(),
                window_len,
                cell_rate,
            )?;
            let desc = QueueDescriptors::from_stats(&stats)?;
            little_trace.push(LittleRecord {
                interval: k,
                cell: i,
                lambda: stats.lambda,
                w: desc.w,
                q: desc.q,
            });
            cell_inputs.push(CellIndicatorInput { q: desc.q, w: desc.w, mu: stats.mu, c_tilde });
        }

        // pair power tables
        let mut rsrp = vec![vec![0.0f64; n_cells]; n_users];
        let mut ptx = vec![vec![0.0f64; n_cells]; n_users];
        let prx = vec![vec![radio.rx_mw; n_cells]; n_users];
        for (j, u) in users.iter().enumerate() {
            for (i, &c) in topo.cells.iter().enumerate() {
                let d = dist(u.pos, c);
                rsrp[j][i] = radio.received_power_dbm(radio.sbs_tx_dbm, d, shadow.get(j, i));
                ptx[j][i] = radio.uplink_tx_mw(d);
            }
        }

        // ablation view of the cell state
        let effective_inputs: Vec<CellIndicatorInput> = if flags.disable_queue_awareness {
            cell_inputs
                .iter()
                .map(|c| CellIndicatorInput { q: 0.0, w: 0.0, ..*c })
                .collect()
        } else {
            cell_inputs.clone()
        };
        let mut matrix = indicators::indicator_matrix(&effective_inputs, &ptx, &prx, &cfg.indicators)?;
        if flags.disable_service_indicators {
            for row in matrix.iter_mut() {
                for v in row.iter_mut() {
                    v.d = 0.0;
                    v.p = 0.0;
                }
            }
        }
        let features: Vec<Vec<FeatureVector>> = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v: &IndicatorVector| FeatureVector([v.occ, v.wi, v.p, v.d, v.e]))
                    .collect()
            })
            .collect();
        let costs = CostMatrix::new(
            matrix
                .iter()
                .map(|row| row.iter().map(|v| v.cost(alpha_eff)).collect())
                .collect(),
            alpha_eff,
        )?;

        // policy decision
        let mut lvq_prediction: Option<Vec<usize>> = None;
        let mut labeler_decision: Option<optim::AssociationDecision> = None;
        let desired: Vec<usize> = match policy {
            PolicyKind::MaxRsrp => {
                rsrp.iter().map(|row| crate::policy::max_rsrp_select(row)).collect()
            }
            PolicyKind::Lhr => rsrp
                .iter()
                .map(|row| {
                    crate::policy::lhr_select(row, &attached, &capacities, cfg.control.lhr_weight)
                })
                .collect(),
            PolicyKind::Gsa => crate::policy::gsa_select(&costs, &capacities)?,
            PolicyKind::Proposed => {
                let snap = Snapshot {
                    interval: k,
                    rsrp_dbm: &rsrp,
                    features: &features,
                    costs: &costs,
                    attached: &attached,
                    capacities: &capacities,
                };
                let ctrl = controller.as_mut().expect("controller exists for proposed");
                let out = ctrl.step(&snap, &qos)?;
                if out.labeler_decision.is_some() {
                    labeler_intervals.push(k);
                }
                samples_emitted += out.samples.len() as u64;
                if opts.log_samples && !out.samples.is_empty() {
                    let source = if flags.disable_opt_labels { "gsa" } else { "optimizer" };
                    for s in &out.samples {
                        sample_records.push(SampleRecord {
                            interval: s.interval,
                            user: s.user,
                            cell: s.cell,
                            chosen: s.label,
                            features: s.features.0,
                            source,
                        });
                    }
                }
                lvq_prediction = out.lvq_prediction;
                labeler_decision = out.labeler_decision;
                out.applied
            }
        };

        // classifier/optimizer gap on identical state
        if track_gap {
            if let Some(pred) = &lvq_prediction {
                let opt = match (&labeler_decision, flags.disable_opt_labels) {
                    (Some(d), false) => d.clone(),
                    _ => {
                        let d = optim::solve(
                            &costs,
                            &capacities,
                            cfg.optimizer.max_iterations,
                            StepSchedule { a0: cfg.optimizer.step_a0 },
                        )?;
                        shadow_opt_ops += (d.iterations * n_users * n_cells) as u64;
                        d
                    }
                };
                let disagreement = lvq::approximation_error(pred, &opt.assignment)?;
                approx_trace.push((k, disagreement));
                let ml_obj = optim::objective_value(pred, &costs)?;
                regret_increments.push((k, ml_obj - opt.objective));
            }
        }

        // control-plane delay: enforce the decision computed `delay` ago
        pending.push_back(desired);
        let effective = if pending.len() > delay {
            pending.pop_front().expect("nonempty")
        } else {
            current.clone()
        };

        // handovers migrate queued packets losslessly
        for j in 0..n_users {
            let (old, new) = (current[j], effective[j]);
            if old != new {
                let moved = cells[old].take_user_packets(j);
                cells[new].migrate_in(moved);
                if post_warmup_decision {
                    handovers += 1;
                }
            }
        }
        current = effective;
        attached = vec![0; n_cells];
        for &c in &current {
            attached[c] += 1;
        }
        if enforce_capacity {
            for i in 0..n_cells {
                if attached[i] > capacities[i] {
                    eq4_violations += 1;
                }
            }
        }
        if let Some(tr) = decisions_trace.as_mut() {
            tr.push(current.clone());
        }

        // traffic generation, merged across users into arrival-time order so
        // cell queues stay FIFO in time
        let mut gen_interval = 0u64;
        let mut drop_interval = 0u64;
        let mut emit_buf = Vec::new();
        let mut interval_packets: Vec<Packet> = Vec::new();
        for j in 0..n_users {
            for dir in [Direction::Uplink, Direction::Downlink] {
                emit_buf.clear();
                let src = match dir {
                    Direction::Uplink => &mut sources[j].0,
                    Direction::Downlink => &mut sources[j].1,
                };
                src.emit_until(t_end, &mut emit_buf);
                traffic_fingerprint = hash_f64s(traffic_fingerprint, emit_buf.iter().copied());
                for &created in emit_buf.iter() {
                    interval_packets.push(Packet { id: next_packet_id, owner: j, created, dir });
                    next_packet_id += 1;
                }
            }
        }
        interval_packets.sort_by(|a, b| a.created.partial_cmp(&b.created).unwrap().then(a.id.cmp(&b.id)));
        for pkt in interval_packets {
            let j = pkt.owner;
            let created = pkt.created;
            generated_per_user[j] += 1;
            gen_interval += 1;
            let post = created >= warmup;
            if post {
                generated_pw += 1;
            }
            if cells[current[j]].offer(pkt) {
                inflight[j] += 1;
            } else {
                dropped_per_user[j] += 1;
                drop_interval += 1;
                if post {
                    dropped_pw += 1;
                }
            }
        }

        // service
        let mut delivered_interval = 0u64;
        let mut delay_sum_interval = 0.0f64;
        for cell in cells.iter_mut() {
            let fade =
                if cfg.queueing.freeze_fading { 1.0 } else { draw_fade(&fade_gamma, &mut fade_rng) };
            let rate = cell_rate * fade;
            let budget = (rate * dt).round() as usize;
            delivered_buf.clear();
            cell.serve(t0, dt, rate, budget, &mut delivered_buf);
            for d in &delivered_buf {
                inflight[d.owner] -= 1;
                delivered_per_user[d.owner] += 1;
                delivered_interval += 1;
                let delay_s = d.completed - d.created;
                delay_sum_interval += delay_s;
                if d.created >= warmup {
                    delivered_pw += 1;
                    hist.record(delay_s);
                }
            }
        }

        // packet conservation, globally at every interval
        let queued_total: u64 = cells.iter().map(|c| c.len() as u64).sum();
        let gen_total: u64 = generated_per_user.iter().sum();
        let del_total: u64 = delivered_per_user.iter().sum();
        let drop_total: u64 = dropped_per_user.iter().sum();
        if gen_total != del_total + drop_total + queued_total {
            conservation_violations += 1;
        }

        // composite QoS feedback for the deviation trigger
        let lat_mean = if delivered_interval > 0 {
            delay_sum_interval / delivered_interval as f64
        } else {
            0.0
        };
        let plr_interval =
            if gen_interval > 0 { drop_interval as f64 / gen_interval as f64 } else { 0.0 };
        qos.push(lat_mean, plr_interval);
    }

    // per-user conservation against actual queue contents at the end
    let mut queued_per_user = vec![0u64; n_users];
    for cell in &cells {
        for owner in cell.owners() {
            queued_per_user[owner] += 1;
        }
    }
    for j in 0..n_users {
        if generated_per_user[j] != delivered_per_user[j] + dropped_per_user[j] + queued_per_user[j]
            || inflight[j] < 0
            || inflight[j] as u64 != queued_per_user[j]
        {
            conservation_violations += 1;
        }
    }

    // assemble the report
    let (approx_error, regret_final) = {
        let mean = if approx_trace.is_empty() {
            0.0
        } else {
            approx_trace.iter().map(|(_, v)| v).sum::<f64>() / approx_trace.len() as f64
        };
        let total: f64 = regret_increments.iter().map(|(_, v)| v).sum();
        (mean, total)
    };

    let (wall_opt, wall_lvq, measured_opt, measured_lvq, calls, iters_total, fallback, validation, reopts, triggers) =
        match &controller {
            Some(c) => (
                c.opt_ops as f64 / MODELED_OPS_PER_MS,
                c.lvq_ops as f64 / MODELED_OPS_PER_MS,
                c.opt_wall.as_secs_f64() * 1000.0,
                c.lvq_wall.as_secs_f64() * 1000.0,
                c.solver_iterations.len() as u64,
                c.solver_iterations.iter().map(|&x| x as u64).sum(),
                c.fallback_events,
                c.validation_disagreement,
                c.reopt_events,
                c.trigger_events,
            ),
            None => (0.0, 0.0, 0.0, 0.0, 0, 0, 0, None, 0, 0),
        };
    let _ = shadow_opt_ops;

    let plr = if generated_pw > 0 { dropped_pw as f64 / generated_pw as f64 } else { 0.0 };

    Ok(RunReport {
        policy_label: format!("{}{}", policy.label(), flags.suffix()),
        seed,
        mean_latency_s: hist.mean_s(),
        p95_latency_ms: hist.quantile_ms(0.95),
        plr,
        handovers,
        approx_error,
        regret_final,
        wall_ms_opt: wall_opt,
        wall_ms_lvq: wall_lvq,
        measured_opt_ms: measured_opt,
        measured_lvq_ms: measured_lvq,
        solver_calls: calls,
        solver_iterations_total: iters_total,
        generated: generated_pw,
        delivered: delivered_pw,
        dropped: dropped_pw,
        conservation_violations,
        eq3_violations: 0, // one serving cell per user by construction
        eq4_violations,
        samples_emitted,
        lvq_fallback_events: fallback,
        validation_disagreement: validation,
        reopt_events: reopts,
        trigger_events: triggers,
        latency_cdf: hist.cdf_rows(),
        qos_trace: qos.history,
        approx_trace,
        regret_increments,
        little_trace,
        sample_records,
        decisions: decisions_trace,
        labeler_intervals,
        topology_fingerprint,
        mobility_fingerprint,
        traffic_fingerprint,
    })
}

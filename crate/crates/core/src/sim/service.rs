//! Per-cell FIFO packet queues with DropTail admission and a fluid service
//! budget.
//!
//! Within an interval the server drains the queue at a constant packet rate
//! derived from the cell's bandwidth share and a per-interval fading factor.
//! Completion times advance by one service time per packet (never before the
//! packet exists), which gives sub-interval latency resolution: an interval
//! serving k packets spreads their completions across it in FIFO order.

use std::collections::VecDeque;

use crate::sim::traffic::Direction;

#[derive(Debug, Clone, Copy)]
pub struct Packet {
    pub id: u64,
    pub owner: usize,
    pub created: f64,
    pub dir: Direction,
}

/// A delivered packet: completion bookkeeping for metrics.
#[derive(Debug, Clone, Copy)]
pub struct Delivered {
    pub owner: usize,
    pub created: f64,
    pub completed: f64,
    pub service: f64,
}

/// Append-only window of timestamped samples with lazy front compaction;
/// slices stay contiguous without per-interval copying.
#[derive(Debug, Clone, Default)]
struct WindowBuf {
    times: Vec<f64>,
    values: Vec<f64>,
    start: usize,
}

impl WindowBuf {
    fn push(&mut self, t: f64, v: f64) {
        self.times.push(t);
        self.values.push(v);
    }

    fn prune(&mut self, cutoff: f64) {
        while self.start < self.times.len() && self.times[self.start] < cutoff {
            self.start += 1;
        }
        if self.start > 4096 && self.start * 2 > self.times.len() {
            self.times.drain(..self.start);
            self.values.drain(..self.start);
            self.start = 0;
        }
    }

    fn times(&self) -> &[f64] {
        &self.times[self.start..]
    }

    fn values(&self) -> &[f64] {
        &self.values[self.start..]
    }
}

#[derive(Debug, Clone)]
pub struct CellQueue {
    queue: VecDeque<Packet>,
    buffer: usize,
    arrivals: WindowBuf,
    services: WindowBuf,
}

impl CellQueue {
    pub fn new(buffer: usize) -> Self {
        CellQueue {
            queue: VecDeque::new(),
            buffer,
            arrivals: WindowBuf::default(),
            services: WindowBuf::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    /// Offer a packet at its creation time. Records the arrival for the
    /// statistics window whether or not the buffer admits it; returns false
    /// on a DropTail rejection.
    pub fn offer(&mut self, pkt: Packet) -> bool {
        self.arrivals.push(pkt.created, 0.0);
        if self.queue.len() >= self.buffer {
            return false;
        }
        self.queue.push_back(pkt);
        true
    }

    /// Handover migration: queued packets follow their user to the tail of
    /// the new cell. Not subject to DropTail and not counted as fresh
    /// arrivals.
    pub fn migrate_in(&mut self, packets: impl IntoIterator<Item = Packet>) {
        self.queue.extend(packets);
    }

    /// Remove one user's queued packets, preserving FIFO order.
    pub fn take_user_packets(&mut self, owner: usize) -> Vec<Packet> {
        let mut taken = Vec::new();
        let mut kept = VecDeque::with_capacity(self.queue.len());
        for pkt in self.queue.drain(..) {
            if pkt.owner == owner {
                taken.push(pkt);
            } else {
                kept.push_back(pkt);
            }
        }
        self.queue = kept;
        taken
    }

    /// Serve the interval `[t0, t0 + dt)` at `rate_pps`, up to `budget`
    /// packets. Completions are appended to `out`.
    pub fn serve(&mut self, t0: f64, dt: f64, rate_pps: f64, budget: usize, out: &mut Vec<Delivered>) {
        if rate_pps <= 0.0 || budget == 0 {
            return;
        }
        let service = 1.0 / rate_pps;
        let t_end = t0 + dt;
        let mut next_free = t0;
        let mut served = 0;
        while served < budget {
            let Some(head) = self.queue.front() else { break };
            let completed = next_free.max(head.created) + service;
            if completed > t_end {
                break;
            }
            let pkt = self.queue.pop_front().expect("front checked");
            out.push(Delivered {
                owner: pkt.owner,
                created: pkt.created,
                completed,
                service,
            });
            self.services.push(completed, service);
            next_free = completed;
            served += 1;
        }
    }

    /// Owners of all queued packets, in queue order.
    pub fn owners(&self) -> impl Iterator<Item = usize> + '_ {
        self.queue.iter().map(|p| p.owner)
    }

    /// Drop samples older than `cutoff` from both statistics windows.
    pub fn prune_windows(&mut self, cutoff: f64) {
        self.arrivals.prune(cutoff);
        self.services.prune(cutoff);
    }

    /// Arrival timestamps currently inside the window.
    pub fn arrival_times(&self) -> &[f64] {
        self.arrivals.times()
    }

    /// Service-duration samples currently inside the window.
    pub fn service_durations(&self) -> &[f64] {
        self.services.values()
    }
}

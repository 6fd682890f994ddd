//! Constant-bit-rate traffic sources.
//!
//! Each user runs one flow per direction. A source emits a packet every
//! `1/rate` seconds starting from a random phase, carrying fractional
//! remainders across intervals exactly (two one-second intervals emit the
//! same packets as one two-second interval).

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Uplink,
    Downlink,
}

#[derive(Debug, Clone)]
pub struct CbrSource {
    next_emit: f64,
    gap: f64,
}

impl CbrSource {
    /// `rate_pps` packets per second; a zero rate never emits.
    pub fn new(rate_pps: f64, rng: &mut impl Rng) -> Self {
        if rate_pps <= 0.0 {
            return CbrSource { next_emit: f64::INFINITY, gap: f64::INFINITY };
        }
        let gap = 1.0 / rate_pps;
        CbrSource { next_emit: rng.gen::<f64>() * gap, gap }
    }

    /// Emission times strictly before `t_end`, appended to `out`.
    pub fn emit_until(&mut self, t_end: f64, out: &mut Vec<f64>) {
        while self.next_emit < t_end {
            out.push(self.next_emit);
            self.next_emit += self.gap;
        }
    }
}

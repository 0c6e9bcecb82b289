use std::collections::BTreeSet;

use crate::sim::SimTime;

/// Cumulative-ACK receiver without delayed ACKs. Tracks in-order delivery
/// to the application over time.
#[derive(Clone, Debug, Default)]
pub struct Receiver {
    /// Next expected sequence number.
    pub cumack: u64,
    out_of_order: BTreeSet<u64>,
    pub duplicates: u64,
    /// (time, packets delivered in order so far), one entry per advance.
    delivery_log: Vec<(f64, u64)>,
}

impl Receiver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accepts a data packet and returns the cumulative ACK to send back.
    pub fn on_data(&mut self, seq: u64, now: SimTime) -> u64 {
        if seq == self.cumack {
            self.cumack += 1;
            while self.out_of_order.remove(&self.cumack) {
                self.cumack += 1;
            }
            self.delivery_log.push((now.secs(), self.cumack));
        } else if seq > self.cumack {
            if !self.out_of_order.insert(seq) {
                self.duplicates += 1;
            }
        } else {
            self.duplicates += 1;
        }
        self.cumack
    }

    pub fn delivered(&self) -> u64 {
        self.cumack
    }

    pub fn delivery_log(&self) -> &[(f64, u64)] {
        &self.delivery_log
    }

    pub fn buffered(&self) -> usize {
        self.out_of_order.len()
    }

    /// Packets delivered in order by time `t` (inclusive).
    pub fn delivered_by(&self, t: f64) -> u64 {
        let idx = self.delivery_log.partition_point(|&(at, _)| at <= t);
        if idx == 0 {
            0
        } else {
            self.delivery_log[idx - 1].1
        }
    }

    pub fn delivered_between(&self, start: f64, end: f64) -> u64 {
        self.delivered_by(end) - self.delivered_by(start)
    }
}

use std::collections::VecDeque;

use super::Packet;

#[derive(Debug, PartialEq)]
pub enum Enqueue {
    Accepted,
    Dropped(Packet),
}

/// FIFO buffer with a capacity in packets. Arrivals to a full buffer are
/// discarded.
///
/// `enqueued_total` counts every packet offered, so at all times
/// `enqueued_total == delivered_total + drops_total + occupancy()`.
#[derive(Debug)]
pub struct DropTailQueue {
    capacity_pkts: usize,
    buf: VecDeque<Packet>,
    pub drops_total: u64,
    pub enqueued_total: u64,
    pub delivered_total: u64,
}

impl DropTailQueue {
    pub fn new(capacity_pkts: usize) -> Self {
        assert!(capacity_pkts > 0, "queue capacity must be positive");
        Self {
            capacity_pkts,
            buf: VecDeque::new(),
            drops_total: 0,
            enqueued_total: 0,
            delivered_total: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity_pkts
    }

    pub fn occupancy(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn enqueue(&mut self, p: Packet) -> Enqueue {
        self.enqueued_total += 1;
        if self.buf.len() >= self.capacity_pkts {
            self.drops_total += 1;
            Enqueue::Dropped(p)
        } else {
            self.buf.push_back(p);
            Enqueue::Accepted
        }
    }

    pub fn dequeue(&mut self) -> Option<Packet> {
        let p = self.buf.pop_front()?;
        self.delivered_total += 1;
        Some(p)
    }

    pub fn is_conserved(&self) -> bool {
        self.enqueued_total == self.delivered_total + self.drops_total + self.buf.len() as u64
    }
}

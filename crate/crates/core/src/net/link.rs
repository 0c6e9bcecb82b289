use super::{DropTailQueue, Enqueue, NodeId, Packet};
use crate::sim::SimTime;

/// Point-to-point transmission medium: serialization plus propagation.
#[derive(Clone, Debug)]
pub struct Link {
    pub bandwidth_bps: f64,
    pub prop_delay_s: f64,
    pub busy_until: SimTime,
}

impl Link {
    pub fn new(bandwidth_bps: f64, prop_delay_s: f64) -> Self {
        assert!(bandwidth_bps > 0.0 && prop_delay_s >= 0.0);
        Self {
            bandwidth_bps,
            prop_delay_s,
            busy_until: SimTime::ZERO,
        }
    }

    pub fn serialization_s(&self, size_bytes: u32) -> f64 {
        f64::from(size_bytes) * 8.0 / self.bandwidth_bps
    }

    /// Starts sending a packet of `size_bytes` no earlier than `now` and
    /// returns when its last bit reaches the far end.
    pub fn transmit(&mut self, size_bytes: u32, now: SimTime) -> SimTime {
        let start = now.max(self.busy_until);
        let done = start + self.serialization_s(size_bytes);
        self.busy_until = done;
        done + self.prop_delay_s
    }
}

/// An output interface: a link with the droptail buffer feeding it.
///
/// The packet being serialized is held in `in_service`, not in the
/// buffer, so it does not count towards occupancy.
#[derive(Debug)]
pub struct Port {
    pub from: NodeId,
    pub to: NodeId,
    pub link: Link,
    pub queue: DropTailQueue,
    pub in_service: bool,
    pub is_bottleneck: bool,
}

/// Outcome of offering a packet to a port.
#[derive(Debug)]
pub enum Offer {
    /// The link was idle; the packet started serialization immediately.
    Started {
        done_at: SimTime,
        arrive_at: SimTime,
        packet: Packet,
    },
    Queued,
    Dropped(Packet),
}

impl Port {
    pub fn new(from: NodeId, to: NodeId, link: Link, capacity_pkts: usize) -> Self {
        Self {
            from,
            to,
            link,
            queue: DropTailQueue::new(capacity_pkts),
            in_service: false,
            is_bottleneck: false,
        }
    }

    pub fn offer(&mut self, p: Packet, now: SimTime) -> Offer {
        match self.queue.enqueue(p) {
            Enqueue::Dropped(p) => Offer::Dropped(p),
            Enqueue::Accepted if self.in_service => Offer::Queued,
            Enqueue::Accepted => {
                let (done_at, arrive_at, packet) = self.start_next(now).expect("just enqueued");
                Offer::Started {
                    done_at,
                    arrive_at,
                    packet,
                }
            }
        }
    }

    /// Moves the head-of-line packet onto the wire. Returns the
    /// serialization end, the far-end arrival time and the packet.
    pub fn start_next(&mut self, now: SimTime) -> Option<(SimTime, SimTime, Packet)> {
        let mut p = self.queue.dequeue()?;
        if self.is_bottleneck && p.kind != super::PacketKind::Ack {
            p.backlog_sample = Some(self.queue.occupancy() as u32);
        }
        self.in_service = true;
        let arrive_at = self.link.transmit(p.size_bytes, now);
        Some((self.link.busy_until, arrive_at, p))
    }

    pub fn finish_service(&mut self) {
        self.in_service = false;
    }
}

use super::{slowstart_on_ack, CongestionControl, ControllerView, WindowUpdate};
use crate::scalar::Scalar;
use crate::sim::SimTime;

/// Bottleneck bandwidth inferred from the spacing of two ACKs whose data
/// packets left the sender back to back.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PacketPairEstimate<T> {
    pub ack_gap_s: T,
    pub bw_est_bps: T,
    pub ssthresh_est: T,
}

impl<T: Scalar> PacketPairEstimate<T> {
    /// `None` when the gap is not positive; estimation waits for another pair.
    pub fn from_gap(ack_gap_s: T, pkt_bytes: u32) -> Option<Self> {
        if ack_gap_s <= T::zero() {
            return None;
        }
        let bits = T::lit(f64::from(pkt_bytes) * 8.0);
        Some(Self {
            ack_gap_s,
            bw_est_bps: bits / ack_gap_s,
            ssthresh_est: T::zero(),
        })
    }
}

/// Initial ssthresh = estimated bandwidth x base RTT, in packets.
pub fn hoe_init_ssthresh<T: Scalar>(
    pair: &PacketPairEstimate<T>,
    base_rtt_s: T,
    pkt_bytes: u32,
) -> T {
    pair.bw_est_bps * base_rtt_s / T::lit(f64::from(pkt_bytes) * 8.0)
}

/// Hoe's change: slow start whose ssthresh is set once from the first
/// valid packet pair.
#[derive(Clone, Debug)]
pub struct HoeChange<T> {
    blind_ssthresh: T,
    pkt_bytes: u32,
    last_ack: Option<(SimTime, SimTime)>,
    pub estimate: Option<PacketPairEstimate<T>>,
}

impl<T: Scalar> HoeChange<T> {
    pub fn new(blind_ssthresh: T, pkt_bytes: u32) -> Self {
        Self {
            blind_ssthresh,
            pkt_bytes,
            last_ack: None,
            estimate: None,
        }
    }
}

impl<T: Scalar> CongestionControl<T> for HoeChange<T> {
    fn name(&self) -> &'static str {
        "hoe"
    }

    fn initial_ssthresh(&self) -> T {
        self.blind_ssthresh
    }

    fn on_ack_arrival(&mut self, view: &ControllerView<T>) -> WindowUpdate<T> {
        if self.estimate.is_some() {
            return WindowUpdate::hold();
        }
        let Some(sent_at) = view.echo_sent_at else {
            self.last_ack = None;
            return WindowUpdate::hold();
        };
        let prev = self.last_ack.replace((view.now, sent_at));
        let (Some((prev_at, prev_sent)), Some(base)) = (prev, view.base_rtt_s) else {
            return WindowUpdate::hold();
        };
        if prev_sent != sent_at {
            return WindowUpdate::hold();
        }
        match PacketPairEstimate::from_gap(T::lit(view.now - prev_at), self.pkt_bytes) {
            Some(mut pair) => {
                pair.ssthresh_est = hoe_init_ssthresh(&pair, base, self.pkt_bytes);
                self.estimate = Some(pair);
                WindowUpdate::set_ssthresh(pair.ssthresh_est.max(T::lit(2.0)))
            }
            None => WindowUpdate::hold(),
        }
    }

    fn on_ack(&mut self, view: &ControllerView<T>) -> WindowUpdate<T> {
        WindowUpdate::increase(slowstart_on_ack(view))
    }

    fn on_fast_retransmit(&mut self, _view: &ControllerView<T>) {}

    fn on_timeout(&mut self, _view: &ControllerView<T>) {}

    fn in_startup(&self, view: &ControllerView<T>) -> bool {
        view.cwnd < view.ssthresh
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::testutil::{view, with_rtt};

    #[test]
    fn gap_to_bandwidth() {
        let pair = PacketPairEstimate::<f64>::from_gap(0.2e-3, 1000).unwrap();
        assert!((pair.bw_est_bps - 40e6).abs() < 1e-3);
    }

    #[test]
    fn bandwidth_to_ssthresh() {
        let pair = PacketPairEstimate::<f64>::from_gap(0.2e-3, 1000).unwrap();
        let s = hoe_init_ssthresh(&pair, 0.1004, 1000);
        assert!((s - 502.0).abs() < 1e-6);
    }

    #[test]
    fn nonpositive_gap_defers() {
        assert!(PacketPairEstimate::<f64>::from_gap(0.0, 1000).is_none());
        let mut h = HoeChange::<f64>::new(5000.0, 1000);
        let sent = SimTime::from_secs(0.1);
        let mut v = with_rtt(view::<f64>(2.0, 5000.0), 0.1, 0.1);
        v.now = SimTime::from_secs(0.3);
        v.echo_sent_at = Some(sent);
        assert!(h.on_ack_arrival(&v).is_hold());
        assert!(h.on_ack_arrival(&v).is_hold());
        assert!(h.estimate.is_none());
        v.now = SimTime::from_secs(0.3002);
        let up = h.on_ack_arrival(&v);
        assert!((up.set_ssthresh.unwrap() - 500.0).abs() < 1e-6);
    }

    #[test]
    fn side_link_spacing_overestimates() {
        // A pair that never queued behind the bottleneck keeps side-link spacing.
        let side_gap = 1000.0 * 8.0 / 500e6;
        let pair = PacketPairEstimate::<f64>::from_gap(side_gap, 1000).unwrap();
        assert!(hoe_init_ssthresh(&pair, 0.1004, 1000) > 500.0);
    }

    #[test]
    fn estimates_once() {
        let mut h = HoeChange::<f64>::new(5000.0, 1000);
        let mut v = with_rtt(view::<f64>(2.0, 5000.0), 0.1, 0.1);
        v.echo_sent_at = Some(SimTime::ZERO);
        v.now = SimTime::from_secs(0.1);
        h.on_ack_arrival(&v);
        v.now = SimTime::from_secs(0.1002);
        assert!(h.on_ack_arrival(&v).set_ssthresh.is_some());
        v.now = SimTime::from_secs(0.2);
        assert!(h.on_ack_arrival(&v).is_hold());
    }
}

use super::{estimate_backlog, CongestionControl, ControllerView, WindowUpdate};
use crate::scalar::Scalar;

/// Expected minus actual throughput, scaled to packets over one base RTT.
/// Same quantity as the backlog estimate.
pub fn vegas_diff<T: Scalar>(cwnd: T, base_rtt_s: T, rtt_s: T) -> T {
    estimate_backlog(cwnd, base_rtt_s, rtt_s)
}

/// TCP Vegas: doubles cwnd every other RTT and leaves startup once the
/// measured diff exceeds `gamma`. Afterwards adjusts by one packet per RTT
/// to keep the diff between `alpha` and `beta`.
#[derive(Clone, Debug)]
pub struct Vegas<T> {
    gamma: T,
    alpha: T,
    beta: T,
    in_startup: bool,
    growth_round: bool,
    round_end: Option<u64>,
    round_min_rtt: Option<T>,
}

impl<T: Scalar> Vegas<T> {
    pub fn new(gamma: T, alpha: T, beta: T) -> Self {
        Self {
            gamma,
            alpha,
            beta,
            in_startup: true,
            growth_round: true,
            round_end: None,
            round_min_rtt: None,
        }
    }

    pub fn in_vegas_startup(&self) -> bool {
        self.in_startup
    }

    fn round_diff(&self, view: &ControllerView<T>) -> Option<T> {
        let base = view.base_rtt_s?;
        let rtt = self.round_min_rtt.or(view.last_rtt_s)?;
        Some(vegas_diff(view.cwnd, base, rtt))
    }

    /// Decision at the end of an RTT round.
    fn end_round(&mut self, view: &ControllerView<T>) -> WindowUpdate<T> {
        let diff = self.round_diff(view);
        // The next round's boundary is fixed at the next ACK, once the
        // packets released by this one are counted in snd_nxt.
        self.round_end = None;
        self.round_min_rtt = None;

        if self.in_startup {
            if diff.is_some_and(|d| d > self.gamma) {
                self.in_startup = false;
                return WindowUpdate::set_ssthresh(view.cwnd);
            }
            self.growth_round = !self.growth_round;
            return WindowUpdate::hold();
        }
        if view.cwnd < view.ssthresh {
            return WindowUpdate::hold();
        }
        match diff {
            Some(d) if d < self.alpha => WindowUpdate::increase(T::one()),
            Some(d) if d > self.beta && view.cwnd >= T::lit(3.0) => {
                WindowUpdate::increase(-T::one())
            }
            _ => WindowUpdate::hold(),
        }
    }
}

impl<T: Scalar> CongestionControl<T> for Vegas<T> {
    fn name(&self) -> &'static str {
        "vegas"
    }

    fn initial_ssthresh(&self) -> T {
        T::infinity()
    }

    fn on_ack_arrival(&mut self, view: &ControllerView<T>) -> WindowUpdate<T> {
        if let Some(s) = view.rtt_sample_s {
            self.round_min_rtt = Some(self.round_min_rtt.map_or(s, |m| m.min(s)));
        }
        WindowUpdate::hold()
    }

    fn on_ack(&mut self, view: &ControllerView<T>) -> WindowUpdate<T> {
        let round_end = *self.round_end.get_or_insert(view.snd_nxt);
        let mut up = if self.in_startup {
            if self.growth_round {
                WindowUpdate::increase(T::one())
            } else {
                WindowUpdate::hold()
            }
        } else if view.cwnd < view.ssthresh {
            // slow start back up after a timeout
            WindowUpdate::increase(T::one())
        } else {
            WindowUpdate::hold()
        };
        if view.acked_seq + 1 >= round_end {
            let end = self.end_round(view);
            up.increment = up.increment + end.increment;
            up.set_ssthresh = end.set_ssthresh;
        }
        up
    }

    fn on_fast_retransmit(&mut self, _view: &ControllerView<T>) {
        self.in_startup = false;
    }

    fn on_timeout(&mut self, _view: &ControllerView<T>) {
        self.in_startup = false;
        self.round_end = None;
        self.round_min_rtt = None;
    }

    fn in_startup(&self, view: &ControllerView<T>) -> bool {
        self.in_startup || view.cwnd < view.ssthresh
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::testutil::{view, with_rtt};

    /// Feeds one full round of ACKs at a fixed RTT; returns the cwnd after.
    fn run_round(v: &mut Vegas<f64>, cwnd: &mut f64, snd_nxt: &mut u64, rtt: f64, ssthresh: f64) {
        let first = *snd_nxt - cwnd.floor() as u64;
        let round_end = *snd_nxt;
        for seq in first..round_end {
            let mut cv = with_rtt(view::<f64>(*cwnd, ssthresh), 0.1, rtt);
            cv.acked_seq = seq;
            cv.snd_nxt = *snd_nxt;
            v.on_ack_arrival(&cv);
            let up = v.on_ack(&cv);
            *cwnd += up.increment;
            *snd_nxt = seq + 1 + cwnd.floor() as u64;
        }
    }

    #[test]
    fn growth_then_frozen_round() {
        const SS: f64 = f64::INFINITY;
        let mut v = Vegas::new(1.0, 1.0, 3.0);
        let mut cwnd = 8.0;
        let mut snd_nxt = 8;
        v.round_end = Some(8);
        run_round(&mut v, &mut cwnd, &mut snd_nxt, 0.1, SS);
        assert_eq!(cwnd, 16.0);
        run_round(&mut v, &mut cwnd, &mut snd_nxt, 0.1, SS);
        assert_eq!(cwnd, 16.0);
        run_round(&mut v, &mut cwnd, &mut snd_nxt, 0.1, SS);
        assert_eq!(cwnd, 32.0);
        assert!(v.in_vegas_startup());
    }

    #[test]
    fn exits_when_diff_exceeds_gamma() {
        let mut v = Vegas::new(1.0, 1.0, 3.0);
        // cwnd=10, base=0.1: rtt with diff 1.5 is 0.1*10/8.5
        let rtt = 0.1 * 10.0 / 8.5;
        let mut cv = with_rtt(view::<f64>(10.0, f64::INFINITY), 0.1, rtt);
        assert!((vegas_diff(10.0, 0.1, rtt) - 1.5).abs() < 1e-9);
        cv.acked_seq = 9;
        cv.snd_nxt = 20;
        v.round_end = Some(10);
        let up = v.on_ack(&cv);
        assert!(!v.in_vegas_startup());
        assert_eq!(up.set_ssthresh, Some(10.0));
    }

    #[test]
    fn avoidance_adjusts_by_one() {
        const SS: f64 = 2.0;
        let mut v = Vegas::new(1.0, 1.0, 3.0);
        v.in_startup = false;
        let mut cwnd = 100.0;
        let mut snd_nxt = 100;
        v.round_end = Some(100);
        // diff 0 -> +1
        run_round(&mut v, &mut cwnd, &mut snd_nxt, 0.1, SS);
        assert_eq!(cwnd, 101.0);
        // diff ~ 10 -> -1
        run_round(&mut v, &mut cwnd, &mut snd_nxt, 0.111, SS);
        assert_eq!(cwnd, 100.0);
        // diff 2 -> hold
        run_round(&mut v, &mut cwnd, &mut snd_nxt, 0.1 * 100.0 / 98.0, SS);
        assert_eq!(cwnd, 100.0);
    }
}

use crate::scalar::Scalar;

/// Packets this connection has queued at the bottleneck, inferred from
/// the gap between expected and actual throughput over one base RTT:
///
/// `N = (cwnd / base_rtt - cwnd / rtt) * base_rtt`
///
/// RTT samples below the base are clamped to it, so `N >= 0`.
///
/// # Panics
///
/// If either RTT is not strictly positive or `cwnd` is not positive.
pub fn estimate_backlog<T: Scalar>(cwnd: T, base_rtt_s: T, rtt_s: T) -> T {
    assert!(
        base_rtt_s > T::zero() && rtt_s > T::zero(),
        "backlog estimate needs positive RTTs (base={base_rtt_s}, rtt={rtt_s})"
    );
    assert!(
        cwnd > T::zero(),
        "backlog estimate needs a positive cwnd, got {cwnd}"
    );
    let rtt = rtt_s.max(base_rtt_s);
    ((cwnd / base_rtt_s - cwnd / rtt) * base_rtt_s).max(T::zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IncreaseMode {
    /// Backlog at or above the threshold: +1/cwnd per ACK.
    Linear,
    /// Backlog below the threshold: max(1/cwnd, 2^-events) per ACK.
    Adjustive,
}

/// Per-connection backlog tracking: the latest estimate, the switching
/// threshold, whether the last ACK saw congestion, and how many
/// congestive episodes have completed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BacklogProbe<T> {
    pub n_est: T,
    pub beta: T,
    pub congestive_status: bool,
    pub congestion_event_no: u32,
}

impl<T: Scalar> BacklogProbe<T> {
    pub fn new(beta: T) -> Self {
        Self {
            n_est: T::zero(),
            beta,
            congestive_status: false,
            congestion_event_no: 0,
        }
    }

    /// Records a new estimate, updates the congestive status and returns
    /// the mode it selects. An episode completes on the first estimate
    /// below the threshold after one at or above it.
    pub fn observe(&mut self, n_est: T) -> IncreaseMode {
        self.n_est = n_est;
        if n_est >= self.beta {
            self.congestive_status = true;
            IncreaseMode::Linear
        } else {
            if self.congestive_status {
                self.congestion_event_no = self.congestion_event_no.saturating_add(1);
                self.congestive_status = false;
            }
            IncreaseMode::Adjustive
        }
    }

    /// Per-ACK cwnd increment for `mode` at window `cwnd`.
    pub fn increment(&self, mode: IncreaseMode, cwnd: T) -> T {
        let linear = T::one() / cwnd;
        match mode {
            IncreaseMode::Linear => linear,
            IncreaseMode::Adjustive => {
                let k = i32::try_from(self.congestion_event_no).unwrap_or(i32::MAX);
                linear.max(T::lit(0.5).powi(k))
            }
        }
    }

    pub fn reset(&mut self) {
        self.n_est = T::zero();
        self.congestive_status = false;
        self.congestion_event_no = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent algebraic form of the same quantity: cwnd * (rtt - base) / rtt.
    fn oracle(cwnd: f64, base: f64, rtt: f64) -> f64 {
        cwnd * (rtt - base) / rtt
    }

    #[test]
    fn no_queueing_is_zero() {
        assert_eq!(estimate_backlog(100.0, 0.1, 0.1), 0.0);
    }

    #[test]
    fn frozen_values() {
        // (1000 - 800) * 0.1
        assert!((estimate_backlog(100.0_f64, 0.1, 0.125) - 20.0).abs() < 1e-9);
        assert!((oracle(100.0, 0.1, 0.125) - 20.0).abs() < 1e-9);
        assert!((estimate_backlog(500.0_f64, 0.1, 0.15) - 166.666_666_666_7).abs() < 1e-6);
        assert!((oracle(500.0, 0.1, 0.15) - 500.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn single_precision_agrees() {
        assert!((estimate_backlog(100.0_f32, 0.1, 0.125) - 20.0).abs() < 1e-3);
    }

    #[test]
    fn sample_below_base_clamps() {
        assert_eq!(estimate_backlog(100.0, 0.1, 0.09), 0.0);
    }

    #[test]
    #[should_panic(expected = "positive RTTs")]
    fn zero_rtt_is_fatal() {
        estimate_backlog(100.0, 0.0, 0.1);
    }

    #[test]
    fn episode_counting() {
        let mut p = BacklogProbe::new(3.0);
        assert_eq!(p.observe(5.0), IncreaseMode::Linear);
        assert_eq!(p.observe(4.0), IncreaseMode::Linear);
        assert_eq!(p.congestion_event_no, 0);
        assert_eq!(p.observe(1.0), IncreaseMode::Adjustive);
        assert_eq!(p.congestion_event_no, 1);
        assert_eq!(p.observe(0.0), IncreaseMode::Adjustive);
        assert_eq!(p.congestion_event_no, 1);
    }

    proptest::proptest! {
        #[test]
        fn matches_oracle(cwnd in 1.0f64..5000.0, base in 0.001f64..1.0, extra in 0.0f64..2.0) {
            let rtt = base + extra;
            let n = estimate_backlog(cwnd, base, rtt);
            proptest::prop_assert!((n - oracle(cwnd, base, rtt)).abs() <= 1e-9 * cwnd.max(1.0));
            proptest::prop_assert!(n >= 0.0 && n <= cwnd);
        }

        #[test]
        fn increment_bounds(cwnd in 1.0f64..10000.0, events in 0u32..2000, n in 0.0f64..50.0) {
            let mut p = BacklogProbe::new(3.0);
            p.congestion_event_no = events;
            let mode = p.observe(n);
            let inc = p.increment(mode, cwnd);
            proptest::prop_assert!(inc >= 1.0 / cwnd && inc <= 1.0);
        }
    }
}

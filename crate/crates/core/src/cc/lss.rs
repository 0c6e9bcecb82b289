use super::{CongestionControl, ControllerView, WindowUpdate};
use crate::scalar::Scalar;

/// Limited slow start increment. Doubling per RTT up to and including
/// `max_ssthresh`; beyond it `1/K` per ACK with `K = ceil(cwnd / (max_ssthresh/2))`,
/// which adds roughly `max_ssthresh/2` per RTT. Congestion avoidance above
/// ssthresh.
pub fn lss_on_ack<T: Scalar>(view: &ControllerView<T>, max_ssthresh: T) -> T {
    if view.cwnd >= view.ssthresh {
        return T::one() / view.cwnd;
    }
    if view.cwnd <= max_ssthresh {
        T::one()
    } else {
        let k = (view.cwnd / (max_ssthresh / T::lit(2.0))).ceil();
        T::one() / k
    }
}

#[derive(Clone, Debug)]
pub struct LimitedSlowStart<T> {
    ssthresh: T,
    max_ssthresh: T,
}

impl<T: Scalar> LimitedSlowStart<T> {
    pub fn new(ssthresh: T, max_ssthresh: T) -> Self {
        Self {
            ssthresh,
            max_ssthresh,
        }
    }
}

impl<T: Scalar> CongestionControl<T> for LimitedSlowStart<T> {
    fn name(&self) -> &'static str {
        "lss"
    }

    fn initial_ssthresh(&self) -> T {
        self.ssthresh
    }

    fn on_ack(&mut self, view: &ControllerView<T>) -> WindowUpdate<T> {
        WindowUpdate::increase(lss_on_ack(view, self.max_ssthresh))
    }

    fn on_fast_retransmit(&mut self, _view: &ControllerView<T>) {}

    fn on_timeout(&mut self, _view: &ControllerView<T>) {}

    fn in_startup(&self, view: &ControllerView<T>) -> bool {
        view.cwnd < view.ssthresh
    }
}

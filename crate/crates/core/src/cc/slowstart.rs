use super::{CongestionControl, ControllerView, WindowUpdate};
use crate::scalar::Scalar;

/// NewReno window growth: +1 per ACK below ssthresh, +1/cwnd above.
pub fn slowstart_on_ack<T: Scalar>(view: &ControllerView<T>) -> T {
    if view.cwnd < view.ssthresh {
        T::one()
    } else {
        T::one() / view.cwnd
    }
}

/// Traditional slow start with a fixed initial ssthresh.
#[derive(Clone, Debug)]
pub struct SlowStart<T> {
    ssthresh: T,
}

impl<T: Scalar> SlowStart<T> {
    pub fn new(ssthresh: T) -> Self {
        Self { ssthresh }
    }
}

impl<T: Scalar> CongestionControl<T> for SlowStart<T> {
    fn name(&self) -> &'static str {
        "slowstart"
    }

    fn initial_ssthresh(&self) -> T {
        self.ssthresh
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
    use crate::cc::testutil::view;

    #[test]
    fn exponential_below_threshold() {
        assert_eq!(slowstart_on_ack(&view::<f64>(4.0, 500.0)), 1.0);
    }

    #[test]
    fn linear_at_threshold() {
        assert_eq!(slowstart_on_ack(&view::<f64>(500.0, 500.0)), 1.0 / 500.0);
        assert_eq!(slowstart_on_ack(&view::<f32>(32.0, 32.0)), 1.0 / 32.0);
    }

    #[test]
    fn small_ssthresh_enters_avoidance() {
        let mut c = SlowStart::new(32.0_f64);
        let mut cwnd = 1.0;
        while cwnd < 32.0 {
            cwnd += c.on_ack(&view(cwnd, 32.0)).increment;
        }
        assert_eq!(cwnd, 32.0);
        assert!(!c.in_startup(&view(cwnd, 32.0)));
        assert!((c.on_ack(&view(cwnd, 32.0)).increment - 1.0 / 32.0).abs() < 1e-12);
    }
}

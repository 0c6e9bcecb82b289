use super::{
    BacklogProbe, CongestionControl, ControllerView, IncreaseMode, ProbeSnapshot, WindowUpdate,
};
use crate::cc::{estimate_backlog, slowstart_on_ack};
use crate::scalar::Scalar;

/// One ACK of the startup machine: re-estimates the backlog from the
/// view's latest RTT, switches mode, and returns the cwnd increment.
pub fn sls_on_ack<T: Scalar>(probe: &mut BacklogProbe<T>, view: &ControllerView<T>) -> T {
    let n_est = match (view.base_rtt_s, view.last_rtt_s) {
        (Some(base), Some(rtt)) => estimate_backlog(view.cwnd, base, rtt),
        _ => T::zero(),
    };
    let mode = probe.observe(n_est);
    probe.increment(mode, view.cwnd)
}

/// Threshold-free startup: alternates between linear and adjustive
/// increase according to the estimated bottleneck backlog, and hands
/// over to NewReno congestion avoidance at the first triple duplicate ACK.
#[derive(Clone, Debug)]
pub struct SsthreshlessStart<T> {
    pub probe: BacklogProbe<T>,
    mode: IncreaseMode,
    exited: bool,
    /// Keep the episode counter across a timeout during startup instead of
    /// starting over.
    pub preserve_counters_on_timeout: bool,
}

impl<T: Scalar> SsthreshlessStart<T> {
    pub fn new(beta: T) -> Self {
        Self {
            probe: BacklogProbe::new(beta),
            mode: IncreaseMode::Adjustive,
            exited: false,
            preserve_counters_on_timeout: false,
        }
    }

    pub fn has_exited(&self) -> bool {
        self.exited
    }
}

impl<T: Scalar> CongestionControl<T> for SsthreshlessStart<T> {
    fn name(&self) -> &'static str {
        "ssthreshless"
    }

    fn initial_ssthresh(&self) -> T {
        T::infinity()
    }

    fn on_ack(&mut self, view: &ControllerView<T>) -> WindowUpdate<T> {
        if self.exited {
            return WindowUpdate::increase(slowstart_on_ack(view));
        }
        let inc = sls_on_ack(&mut self.probe, view);
        self.mode = if self.probe.congestive_status {
            IncreaseMode::Linear
        } else {
            IncreaseMode::Adjustive
        };
        WindowUpdate::increase(inc)
    }

    fn on_fast_retransmit(&mut self, _view: &ControllerView<T>) {
        self.exited = true;
        self.probe.congestion_event_no = 0;
        self.probe.congestive_status = false;
    }

    fn on_timeout(&mut self, _view: &ControllerView<T>) {
        if !self.exited && !self.preserve_counters_on_timeout {
            self.probe.reset();
        }
    }

    fn in_startup(&self, view: &ControllerView<T>) -> bool {
        !self.exited || view.cwnd < view.ssthresh
    }

    fn probe(&self) -> Option<ProbeSnapshot<T>> {
        (!self.exited).then_some(ProbeSnapshot {
            n_est: self.probe.n_est,
            mode: self.mode,
            congestion_event_no: self.probe.congestion_event_no,
        })
    }
}

//! TCP sender and receiver mechanics: sequencing, cumulative ACKs,
//! NewReno fast recovery, retransmission timeout and RTT sampling.
//! Window growth is delegated to a [`crate::cc::CongestionControl`].

mod receiver;
mod rtt;
mod sender;

use serde::{Deserialize, Serialize};

pub use receiver::Receiver;
pub use rtt::RttEstimator;
pub use sender::{AckRecord, LossEvent, LossKind, Sender, SenderStats};

use crate::error::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Startup,
    CongestionAvoidance,
    FastRecovery,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Startup => "startup",
            Phase::CongestionAvoidance => "congestion_avoidance",
            Phase::FastRecovery => "fast_recovery",
        }
    }
}

/// When a partial ACK during fast recovery restarts the retransmission
/// timer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialAckTimer {
    /// Only the first partial ACK of a recovery episode restarts it.
    #[default]
    Impatient,
    /// Every partial ACK restarts it.
    SlowButSteady,
}

/// Window adjustment on a partial ACK during fast recovery.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialAckWindow {
    /// Deflate by the amount newly acknowledged, then add one packet back.
    Deflate,
    /// Drop all dupACK inflation: cwnd returns to ssthresh.
    #[default]
    Reset,
}

/// Transport knobs shared by every flow of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TcpParams {
    pub initial_cwnd: f64,
    pub min_rto_s: f64,
    pub max_rto_s: f64,
    pub initial_rto_s: f64,
    pub partial_ack_timer: PartialAckTimer,
    pub partial_ack_window: PartialAckWindow,
    /// Clock tick of the RTT samples handed to controllers: each sample
    /// counts whole elapsed ticks (at least one). Zero means exact
    /// samples. The retransmission timer always uses exact samples.
    pub rtt_sample_tick_s: f64,
}

impl Default for TcpParams {
    fn default() -> Self {
        Self {
            initial_cwnd: 1.0,
            min_rto_s: 0.2,
            max_rto_s: 60.0,
            initial_rto_s: 1.0,
            partial_ack_timer: PartialAckTimer::Impatient,
            partial_ack_window: PartialAckWindow::Reset,
            rtt_sample_tick_s: 0.01,
        }
    }
}

impl TcpParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1.0..=4.0).contains(&self.initial_cwnd) {
            return Err(ConfigError::new(
                "tcp.initial_cwnd",
                format!("must be between 1 and 4 packets, got {}", self.initial_cwnd),
            ));
        }
        for (field, v) in [
            ("tcp.min_rto_s", self.min_rto_s),
            ("tcp.max_rto_s", self.max_rto_s),
            ("tcp.initial_rto_s", self.initial_rto_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(
                    field,
                    format!("must be positive, got {v}"),
                ));
            }
        }
        if !(self.rtt_sample_tick_s.is_finite() && self.rtt_sample_tick_s >= 0.0) {
            return Err(ConfigError::new(
                "tcp.rtt_sample_tick_s",
                "must be non-negative",
            ));
        }
        if self.max_rto_s < self.min_rto_s {
            return Err(ConfigError::new(
                "tcp.max_rto_s",
                "must be at least tcp.min_rto_s",
            ));
        }
        Ok(())
    }
}

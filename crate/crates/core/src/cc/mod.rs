//! Congestion controllers.
//!
//! A controller sees a read-only [`ControllerView`] of the sender and
//! answers with a [`WindowUpdate`]. Loss recovery (fast retransmit, fast
//! recovery, timeouts) lives in [`crate::tcp`]; controllers are only
//! notified of those events.

mod backlog;
mod hoe;
mod lss;
mod slowstart;
mod sls;
mod vegas;

use serde::{Deserialize, Serialize};

pub use backlog::{estimate_backlog, BacklogProbe, IncreaseMode};
pub use hoe::{hoe_init_ssthresh, HoeChange, PacketPairEstimate};
pub use lss::{lss_on_ack, LimitedSlowStart};
pub use slowstart::{slowstart_on_ack, SlowStart};
pub use sls::{sls_on_ack, SsthreshlessStart};
pub use vegas::{vegas_diff, Vegas};

use crate::error::ConfigError;
use crate::scalar::Scalar;
use crate::sim::SimTime;
use crate::tcp::Phase;

/// Snapshot of the sender handed to a controller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerView<T> {
    pub now: SimTime,
    pub cwnd: T,
    pub ssthresh: T,
    pub base_rtt_s: Option<T>,
    pub last_rtt_s: Option<T>,
    /// RTT sample taken from the ACK being processed, if it yielded one.
    pub rtt_sample_s: Option<T>,
    pub phase: Phase,
    /// Packets newly acknowledged by the current ACK.
    pub acked_pkts: u64,
    /// Sequence number of the packet being credited (per-packet hook only).
    pub acked_seq: u64,
    /// Next new sequence number the sender will transmit.
    pub snd_nxt: u64,
    /// Send time of the data packet that triggered this ACK, when that
    /// packet was an original transmission.
    pub echo_sent_at: Option<SimTime>,
}

/// Change requested by a controller. Applied as: optional overwrite of
/// cwnd, then `+= increment`, then optional overwrite of ssthresh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowUpdate<T> {
    pub increment: T,
    pub set_cwnd: Option<T>,
    pub set_ssthresh: Option<T>,
}

impl<T: Scalar> WindowUpdate<T> {
    pub fn hold() -> Self {
        Self {
            increment: T::zero(),
            set_cwnd: None,
            set_ssthresh: None,
        }
    }

    pub fn increase(by: T) -> Self {
        Self {
            increment: by,
            ..Self::hold()
        }
    }

    pub fn set_cwnd(cwnd: T) -> Self {
        Self {
            set_cwnd: Some(cwnd),
            ..Self::hold()
        }
    }

    pub fn set_ssthresh(ssthresh: T) -> Self {
        Self {
            set_ssthresh: Some(ssthresh),
            ..Self::hold()
        }
    }

    pub fn is_hold(&self) -> bool {
        self.increment == T::zero() && self.set_cwnd.is_none() && self.set_ssthresh.is_none()
    }
}

/// Backlog-probe state exposed for tracing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeSnapshot<T> {
    pub n_est: T,
    pub mode: IncreaseMode,
    pub congestion_event_no: u32,
}

pub trait CongestionControl<T: Scalar>: Send {
    fn name(&self) -> &'static str;

    fn initial_ssthresh(&self) -> T;

    /// Once per ACK that advances the cumulative acknowledgment, before the
    /// per-packet hooks.
    fn on_ack_arrival(&mut self, _view: &ControllerView<T>) -> WindowUpdate<T> {
        WindowUpdate::hold()
    }

    /// Once per newly acknowledged packet, outside fast recovery.
    fn on_ack(&mut self, view: &ControllerView<T>) -> WindowUpdate<T>;

    /// Triple duplicate ACK. The sender has already halved ssthresh.
    fn on_fast_retransmit(&mut self, view: &ControllerView<T>);

    /// Retransmission timeout. The sender has already reset cwnd.
    fn on_timeout(&mut self, view: &ControllerView<T>);

    fn in_startup(&self, view: &ControllerView<T>) -> bool;

    fn probe(&self) -> Option<ProbeSnapshot<T>> {
        None
    }
}

/// Controller selection as written in a scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum ControllerSpec {
    Slowstart {
        ssthresh: f64,
    },
    Lss {
        #[serde(default = "default_blind_ssthresh")]
        ssthresh: f64,
        #[serde(default = "default_max_ssthresh")]
        max_ssthresh: f64,
    },
    Vegas {
        #[serde(default = "one")]
        gamma: f64,
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default = "three")]
        beta: f64,
    },
    Hoe {
        /// Threshold in force until the packet-pair estimate is available.
        #[serde(default = "default_blind_ssthresh")]
        ssthresh: f64,
    },
    Ssthreshless {
        #[serde(default = "three")]
        beta: f64,
        #[serde(default)]
        preserve_counters_on_timeout: bool,
    },
}

fn default_blind_ssthresh() -> f64 {
    5000.0
}
fn default_max_ssthresh() -> f64 {
    100.0
}
fn one() -> f64 {
    1.0
}
fn three() -> f64 {
    3.0
}

impl ControllerSpec {
    pub fn slowstart(ssthresh: f64) -> Self {
        Self::Slowstart { ssthresh }
    }

    pub fn lss() -> Self {
        Self::Lss {
            ssthresh: default_blind_ssthresh(),
            max_ssthresh: default_max_ssthresh(),
        }
    }

    pub fn vegas() -> Self {
        Self::Vegas {
            gamma: 1.0,
            alpha: 1.0,
            beta: 3.0,
        }
    }

    pub fn hoe() -> Self {
        Self::Hoe {
            ssthresh: default_blind_ssthresh(),
        }
    }

    pub fn ssthreshless(beta: f64) -> Self {
        Self::Ssthreshless {
            beta,
            preserve_counters_on_timeout: false,
        }
    }

    /// Name used in scenario files.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Slowstart { .. } => "slowstart",
            Self::Lss { .. } => "lss",
            Self::Vegas { .. } => "vegas",
            Self::Hoe { .. } => "hoe",
            Self::Ssthreshless { .. } => "ssthreshless",
        }
    }

    pub fn validate(&self, field: &str) -> Result<(), ConfigError> {
        let check = |key: &str, v: f64, allow_inf: bool| {
            if v.is_nan() || v <= 0.0 || (!allow_inf && v.is_infinite()) {
                Err(ConfigError::new(
                    format!("{field}.{key}"),
                    format!("must be positive, got {v}"),
                ))
            } else {
                Ok(())
            }
        };
        match *self {
            Self::Slowstart { ssthresh } => check("ssthresh", ssthresh, true),
            Self::Lss {
                ssthresh,
                max_ssthresh,
            } => {
                check("ssthresh", ssthresh, true)?;
                check("max_ssthresh", max_ssthresh, false)
            }
            Self::Vegas { gamma, alpha, beta } => {
                check("gamma", gamma, false)?;
                check("alpha", alpha, false)?;
                check("beta", beta, false)?;
                if alpha > beta {
                    return Err(ConfigError::new(
                        format!("{field}.alpha"),
                        "must not exceed beta",
                    ));
                }
                Ok(())
            }
            Self::Hoe { ssthresh } => check("ssthresh", ssthresh, true),
            Self::Ssthreshless { beta, .. } => check("beta", beta, true),
        }
    }

    pub fn build<T: Scalar>(&self, pkt_bytes: u32) -> Box<dyn CongestionControl<T>> {
        match *self {
            Self::Slowstart { ssthresh } => Box::new(SlowStart::new(T::lit(ssthresh))),
            Self::Lss {
                ssthresh,
                max_ssthresh,
            } => Box::new(LimitedSlowStart::new(
                T::lit(ssthresh),
                T::lit(max_ssthresh),
            )),
            Self::Vegas { gamma, alpha, beta } => {
                Box::new(Vegas::new(T::lit(gamma), T::lit(alpha), T::lit(beta)))
            }
            Self::Hoe { ssthresh } => Box::new(HoeChange::new(T::lit(ssthresh), pkt_bytes)),
            Self::Ssthreshless {
                beta,
                preserve_counters_on_timeout,
            } => {
                let mut c = SsthreshlessStart::new(T::lit(beta));
                c.preserve_counters_on_timeout = preserve_counters_on_timeout;
                Box::new(c)
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    pub fn view<T: Scalar>(cwnd: f64, ssthresh: f64) -> ControllerView<T> {
        ControllerView {
            now: SimTime::ZERO,
            cwnd: T::lit(cwnd),
            ssthresh: T::lit(ssthresh),
            base_rtt_s: None,
            last_rtt_s: None,
            rtt_sample_s: None,
            phase: Phase::Startup,
            acked_pkts: 1,
            acked_seq: 0,
            snd_nxt: 0,
            echo_sent_at: None,
        }
    }

    pub fn with_rtt<T: Scalar>(
        mut v: ControllerView<T>,
        base: f64,
        last: f64,
    ) -> ControllerView<T> {
        v.base_rtt_s = Some(T::lit(base));
        v.last_rtt_s = Some(T::lit(last));
        v.rtt_sample_s = Some(T::lit(last));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Deserialize)]
    struct Wrap {
        controller: ControllerSpec,
    }

    #[test]
    fn parses_by_name_with_defaults() {
        let w: Wrap = toml::from_str("controller = { name = \"ssthreshless\" }").unwrap();
        assert_eq!(w.controller, ControllerSpec::ssthreshless(3.0));
        let w: Wrap = toml::from_str("controller = { name = \"lss\", max_ssthresh = 50 }").unwrap();
        assert_eq!(
            w.controller,
            ControllerSpec::Lss {
                ssthresh: 5000.0,
                max_ssthresh: 50.0
            }
        );
        let w: Wrap =
            toml::from_str("controller = { name = \"ssthreshless\", beta = inf }").unwrap();
        assert!(w.controller.validate("c").is_ok());
    }

    #[test]
    fn unknown_key_is_error() {
        assert!(toml::from_str::<Wrap>("controller = { name = \"vegas\", ssthresh = 3 }").is_err());
        assert!(toml::from_str::<Wrap>("controller = { name = \"cubic\" }").is_err());
        assert!(toml::from_str::<Wrap>("controller = { name = \"slowstart\" }").is_err());
    }

    #[test]
    fn validation() {
        assert!(ControllerSpec::slowstart(0.0).validate("f").is_err());
        assert!(ControllerSpec::ssthreshless(-1.0).validate("f").is_err());
        let bad = ControllerSpec::Vegas {
            gamma: 1.0,
            alpha: 4.0,
            beta: 3.0,
        };
        assert_eq!(
            bad.validate("flows[0]").unwrap_err().field,
            "flows[0].alpha"
        );
    }

    #[test]
    fn builds_every_kind() {
        for spec in [
            ControllerSpec::slowstart(32.0),
            ControllerSpec::lss(),
            ControllerSpec::vegas(),
            ControllerSpec::hoe(),
            ControllerSpec::ssthreshless(3.0),
        ] {
            let c = spec.build::<f64>(1000);
            assert_eq!(c.name(), spec.name());
            let c32 = spec.build::<f32>(1000);
            assert_eq!(c32.name(), spec.name());
        }
    }
}

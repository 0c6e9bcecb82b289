//! Constant-bit-rate UDP cross traffic.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::sim::SimTime;

/// A UDP source that emits fixed-size packets at a constant rate between
/// `start_s` (inclusive) and `stop_s` (exclusive). It ignores congestion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UdpCbrSource {
    pub rate_bps: f64,
    #[serde(default = "default_pkt_bytes")]
    pub pkt_bytes: u32,
    pub start_s: f64,
    pub stop_s: f64,
}

fn default_pkt_bytes() -> u32 {
    1000
}

impl UdpCbrSource {
    pub fn new(rate_bps: f64, pkt_bytes: u32, start_s: f64, stop_s: f64) -> Self {
        Self {
            rate_bps,
            pkt_bytes,
            start_s,
            stop_s,
        }
    }

    pub fn interval_s(&self) -> f64 {
        self.pkt_bytes as f64 * 8.0 / self.rate_bps
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.rate_bps.is_finite() && self.rate_bps > 0.0) {
            return Err(ConfigError::new(
                "cross_traffic.rate_bps",
                "must be positive",
            ));
        }
        if self.pkt_bytes == 0 {
            return Err(ConfigError::new(
                "cross_traffic.pkt_bytes",
                "must be positive",
            ));
        }
        if !(self.start_s.is_finite() && self.start_s >= 0.0) {
            return Err(ConfigError::new(
                "cross_traffic.start_s",
                "must be non-negative",
            ));
        }
        if !(self.stop_s.is_finite() && self.stop_s > self.start_s) {
            return Err(ConfigError::new(
                "cross_traffic.stop_s",
                "must be after start_s",
            ));
        }
        Ok(())
    }

    /// Emission time of the `k`-th packet, if it falls before `stop_s`.
    pub fn emission_time(&self, k: u64) -> Option<f64> {
        let t = self.start_s + k as f64 * self.interval_s();
        (t < self.stop_s).then_some(t)
    }
}

/// Next emission after `now`. Before the start the first emission is at
/// `start_s`; otherwise one interval later, or `None` once past the stop.
pub fn udp_next_emission(src: &UdpCbrSource, now: SimTime) -> Option<SimTime> {
    let now = now.secs();
    if now < src.start_s {
        return Some(SimTime::from_secs(src.start_s));
    }
    let next = now + src.interval_s();
    (next < src.stop_s).then(|| SimTime::from_secs(next))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src() -> UdpCbrSource {
        UdpCbrSource::new(10e6, 1000, 1.0, 5.0)
    }

    #[test]
    fn interval() {
        assert!((src().interval_s() - 0.0008).abs() < 1e-15);
    }

    #[test]
    fn next_emission() {
        let s = src();
        let at = |x: f64| udp_next_emission(&s, SimTime::from_secs(x)).map(|t| t.secs());
        assert_eq!(at(0.5), Some(1.0));
        assert!((at(1.0).unwrap() - 1.0008).abs() < 1e-12);
        assert_eq!(at(4.9995), None);
    }

    #[test]
    fn emission_count() {
        let s = src();
        let n = (0..).take_while(|&k| s.emission_time(k).is_some()).count();
        assert_eq!(n, 5000);
    }

    #[test]
    fn rejects_bad_window() {
        let mut s = src();
        s.stop_s = 1.0;
        assert_eq!(s.validate().unwrap_err().field, "cross_traffic.stop_s");
    }
}

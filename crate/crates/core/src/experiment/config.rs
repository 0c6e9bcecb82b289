use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cc::ControllerSpec;
use crate::error::{ConfigError, Error, Result};
use crate::net::DumbbellParams;
use crate::tcp::TcpParams;
use crate::traffic::UdpCbrSource;

/// One TCP connection of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub controller: ControllerSpec,
    #[serde(default)]
    pub start_s: f64,
    /// Random extra start delay drawn uniformly from `[0, start_jitter_s)`
    /// with the scenario seed.
    #[serde(default)]
    pub start_jitter_s: f64,
    /// Transfer size in packets; unlimited when absent.
    #[serde(default)]
    pub max_packets: Option<u64>,
}

impl FlowConfig {
    pub fn new(controller: ControllerSpec) -> Self {
        Self {
            controller,
            start_s: 0.0,
            start_jitter_s: 0.0,
            max_packets: None,
        }
    }

    pub fn starting_at(mut self, start_s: f64) -> Self {
        self.start_s = start_s;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasurementConfig {
    /// `[start_s, end_s]` windows to report. Empty means the whole run.
    pub windows: Vec<[f64; 2]>,
    /// Periodic trace sampling interval; 0 disables periodic samples.
    pub trace_interval_s: f64,
    /// Keep a record of every per-packet window update.
    pub record_acks: bool,
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        Self {
            windows: Vec::new(),
            trace_interval_s: 0.01,
            record_acks: false,
        }
    }
}

/// Everything needed to run one simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    #[serde(default)]
    pub seed: u64,
    pub horizon_s: f64,
    #[serde(default)]
    pub topology: DumbbellParams,
    #[serde(default)]
    pub tcp: TcpParams,
    pub flows: Vec<FlowConfig>,
    #[serde(default)]
    pub cross_traffic: Option<UdpCbrSource>,
    #[serde(default)]
    pub measurement: MeasurementConfig,
}

impl ScenarioConfig {
    /// Default topology with the given flows, reporting `[0, horizon_s]`.
    pub fn new(id: impl Into<String>, horizon_s: f64, flows: Vec<FlowConfig>) -> Self {
        Self {
            id: id.into(),
            seed: 1,
            horizon_s,
            topology: DumbbellParams::default(),
            tcp: TcpParams::default(),
            flows,
            cross_traffic: None,
            measurement: MeasurementConfig::default(),
        }
    }

    pub fn single(id: impl Into<String>, horizon_s: f64, controller: ControllerSpec) -> Self {
        Self::new(id, horizon_s, vec![FlowConfig::new(controller)])
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    /// Report windows, defaulting to the whole run.
    pub fn windows(&self) -> Vec<(f64, f64)> {
        if self.measurement.windows.is_empty() {
            vec![(0.0, self.horizon_s)]
        } else {
            self.measurement
                .windows
                .iter()
                .map(|w| (w[0], w[1]))
                .collect()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.id.is_empty() {
            return Err(ConfigError::new("id", "must not be empty"));
        }
        if !(self.horizon_s.is_finite() && self.horizon_s >= 0.0) {
            return Err(ConfigError::new(
                "horizon_s",
                format!("must be finite and non-negative, got {}", self.horizon_s),
            ));
        }
        self.topology.validate()?;
        self.tcp.validate()?;
        if self.flows.is_empty() {
            return Err(ConfigError::new("flows", "at least one flow is required"));
        }
        for (i, f) in self.flows.iter().enumerate() {
            f.controller.validate(&format!("flows[{i}].controller"))?;
            if !(f.start_s.is_finite() && f.start_s >= 0.0) {
                return Err(ConfigError::new(
                    format!("flows[{i}].start_s"),
                    "must be non-negative",
                ));
            }
            if !(f.start_jitter_s.is_finite() && f.start_jitter_s >= 0.0) {
                return Err(ConfigError::new(
                    format!("flows[{i}].start_jitter_s"),
                    "must be non-negative",
                ));
            }
            if f.max_packets == Some(0) {
                return Err(ConfigError::new(
                    format!("flows[{i}].max_packets"),
                    "must be positive",
                ));
            }
        }
        if let Some(udp) = &self.cross_traffic {
            udp.validate()?;
        }
        let m = &self.measurement;
        if !(m.trace_interval_s.is_finite() && m.trace_interval_s >= 0.0) {
            return Err(ConfigError::new(
                "measurement.trace_interval_s",
                "must be non-negative",
            ));
        }
        for (i, w) in m.windows.iter().enumerate() {
            if !(w[0] >= 0.0 && w[1] >= w[0]) {
                return Err(ConfigError::new(
                    format!("measurement.windows[{i}]"),
                    format!("must satisfy 0 <= start <= end, got [{}, {}]", w[0], w[1]),
                ));
            }
            if w[1] > self.horizon_s {
                return Err(ConfigError::new(
                    format!("measurement.windows[{i}]"),
                    format!("ends at {} beyond the horizon {}", w[1], self.horizon_s),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
id = "example"
seed = 7
horizon_s = 10.0

[topology]
bottleneck_bw_bps = 40e6
bottleneck_oneway_delay_s = 0.05
buffer_pkts = 200

[[flows]]
controller = { name = "ssthreshless", beta = 3 }

[[flows]]
controller = { name = "slowstart", ssthresh = 500 }
start_s = 2.0

[cross_traffic]
rate_bps = 10e6
start_s = 1.0
stop_s = 5.0

[measurement]
windows = [[0.0, 10.0], [5.0, 10.0]]
"#;

    #[test]
    fn parses_full_example() {
        let cfg = ScenarioConfig::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.topology.buffer_pkts, 200);
        assert_eq!(cfg.topology.side_bw_bps, 500e6);
        assert_eq!(cfg.flows.len(), 2);
        assert_eq!(cfg.flows[1].start_s, 2.0);
        assert_eq!(cfg.cross_traffic.as_ref().unwrap().pkt_bytes, 1000);
        assert_eq!(cfg.windows(), vec![(0.0, 10.0), (5.0, 10.0)]);
        assert_eq!(cfg.measurement.trace_interval_s, 0.01);
    }

    #[test]
    fn round_trips() {
        let cfg = ScenarioConfig::from_toml_str(EXAMPLE).unwrap();
        let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_key_is_error() {
        let text = EXAMPLE.replace("seed = 7", "seed = 7\ncolour = 1");
        assert!(matches!(
            ScenarioConfig::from_toml_str(&text),
            Err(Error::Parse(_))
        ));
        let text = EXAMPLE.replace("buffer_pkts = 200", "buffer_pkts = 200\nbufer = 3");
        assert!(ScenarioConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn window_beyond_horizon() {
        let text = EXAMPLE.replace("[5.0, 10.0]", "[5.0, 12.0]");
        match ScenarioConfig::from_toml_str(&text) {
            Err(Error::Config(e)) => assert_eq!(e.field, "measurement.windows[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_bandwidth() {
        let text = EXAMPLE.replace("40e6", "-1");
        match ScenarioConfig::from_toml_str(&text) {
            Err(Error::Config(e)) => assert_eq!(e.field, "topology.bottleneck_bw_bps"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn no_flows() {
        let mut cfg = ScenarioConfig::from_toml_str(EXAMPLE).unwrap();
        cfg.flows.clear();
        assert_eq!(cfg.validate().unwrap_err().field, "flows");
    }
}

use std::fmt;
use std::str::FromStr;

use crate::cc::ControllerSpec;
use crate::error::ConfigError;

use super::config::{FlowConfig, ScenarioConfig};
use super::metrics::MetricsRow;
use super::presets::{run_preset, Preset, PresetRun};

/// The startup variants compared throughout the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControllerLabel {
    Sls,
    Hc,
    Lss,
    SsS,
    SsA,
    SsL,
    Vegas,
}

impl ControllerLabel {
    pub const ALL: [ControllerLabel; 7] = [
        ControllerLabel::Sls,
        ControllerLabel::Hc,
        ControllerLabel::Lss,
        ControllerLabel::SsS,
        ControllerLabel::SsA,
        ControllerLabel::SsL,
        ControllerLabel::Vegas,
    ];

    /// Display name used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Self::Sls => "SLS",
            Self::Hc => "HC",
            Self::Lss => "LSS",
            Self::SsS => "SS(S)",
            Self::SsA => "SS(A)",
            Self::SsL => "SS(L)",
            Self::Vegas => "Vegas",
        }
    }

    /// Short name accepted on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Self::Sls => "sls",
            Self::Hc => "hc",
            Self::Lss => "lss",
            Self::SsS => "ss_s",
            Self::SsA => "ss_a",
            Self::SsL => "ss_l",
            Self::Vegas => "vegas",
        }
    }

    /// Controller for a path whose BDP is `bdp_pkts`. Only SS(A) depends
    /// on it: its threshold is the BDP itself.
    pub fn spec(self, bdp_pkts: f64) -> ControllerSpec {
        match self {
            Self::Sls => ControllerSpec::ssthreshless(3.0),
            Self::Hc => ControllerSpec::hoe(),
            Self::Lss => ControllerSpec::lss(),
            Self::SsS => ControllerSpec::slowstart(32.0),
            Self::SsA => ControllerSpec::slowstart(bdp_pkts.round().max(2.0)),
            Self::SsL => ControllerSpec::slowstart(5000.0),
            Self::Vegas => ControllerSpec::vegas(),
        }
    }
}

impl fmt::Display for ControllerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ControllerLabel {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|c| c.key() == lower || c.label().to_ascii_lowercase() == lower)
            .ok_or_else(|| {
                let known: Vec<_> = Self::ALL.iter().map(|c| c.key()).collect();
                ConfigError::new(
                    "controllers",
                    format!("unknown controller `{s}` (known: {})", known.join(", ")),
                )
            })
    }
}

/// Swept parameter. Values are in packets, milliseconds of one-way delay,
/// or Mbps respectively.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Buffer,
    Delay,
    Bandwidth,
}

impl SweepAxis {
    pub fn key(self) -> &'static str {
        match self {
            Self::Buffer => "buffer",
            Self::Delay => "delay",
            Self::Bandwidth => "bandwidth",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Self::Buffer => "pkts",
            Self::Delay => "ms",
            Self::Bandwidth => "Mbps",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "buffer" => Ok(Self::Buffer),
            "delay" => Ok(Self::Delay),
            "bandwidth" => Ok(Self::Bandwidth),
            _ => Err(ConfigError::new(
                "axis",
                format!("expected buffer, delay or bandwidth, got `{s}`"),
            )),
        }
    }
}

/// Scenario for one sweep point. The buffer sweep keeps the template's
/// bandwidth and delay; the delay and bandwidth sweeps size the buffer to
/// half the point's BDP.
pub fn sweep_point(
    template: &ScenarioConfig,
    axis: SweepAxis,
    value: f64,
    label: ControllerLabel,
) -> Result<ScenarioConfig, ConfigError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(ConfigError::new(
            "values",
            format!("sweep values must be positive, got {value}"),
        ));
    }
    let mut cfg = template.clone();
    match axis {
        SweepAxis::Buffer => {
            if value.fract() != 0.0 {
                return Err(ConfigError::new(
                    "values",
                    format!("buffer must be whole packets, got {value}"),
                ));
            }
            cfg.topology.buffer_pkts = value as usize;
        }
        SweepAxis::Delay => {
            cfg.topology.bottleneck_delay_s = value / 1000.0;
            cfg.topology.buffer_pkts = (cfg.topology.bdp_pkts() / 2.0).round().max(1.0) as usize;
        }
        SweepAxis::Bandwidth => {
            cfg.topology.bottleneck_bw_bps = value * 1e6;
            cfg.topology.buffer_pkts = (cfg.topology.bdp_pkts() / 2.0).round().max(1.0) as usize;
        }
    }
    cfg.id = format!("{}_{}{}_{}", template.id, axis.key(), value, label.key());
    cfg.flows = vec![FlowConfig::new(label.spec(cfg.topology.bdp_pkts()))];
    cfg.measurement.windows = vec![[0.0, cfg.horizon_s]];
    cfg.validate()?;
    Ok(cfg)
}

/// Template for sweeps: default dumbbell, 20 s horizon.
pub fn sweep_template(id: &str) -> ScenarioConfig {
    ScenarioConfig::single(id, 20.0, ControllerSpec::ssthreshless(3.0))
}

pub fn sweep_preset(
    name: &str,
    template: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    labels: &[ControllerLabel],
) -> Result<Preset, ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::new("values", "at least one value is required"));
    }
    if labels.is_empty() {
        return Err(ConfigError::new(
            "controllers",
            "at least one controller is required",
        ));
    }
    let mut runs = Vec::new();
    for &v in values {
        for &label in labels {
            runs.push(PresetRun {
                group: format!("{}={}{}", axis.key(), v, axis.unit()),
                label: label.label().to_string(),
                reference: label == ControllerLabel::Sls,
                scenario: sweep_point(template, axis, v, label)?,
            });
        }
    }
    Ok(Preset {
        name: name.to_string(),
        runs,
    })
}

/// One row per (value, controller), in input order. Throughput ratios are
/// SLS throughput over each variant's at the same point; a point that
/// fails to run keeps a row with zero utilization and no ratio.
pub fn sweep(
    template: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    labels: &[ControllerLabel],
) -> Result<Vec<MetricsRow>, ConfigError> {
    let preset = sweep_preset(&template.id, template, axis, values, labels)?;
    Ok(run_preset(&preset).rows())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_parse() {
        for c in ControllerLabel::ALL {
            assert_eq!(c.key().parse::<ControllerLabel>().unwrap(), c);
            assert_eq!(c.label().parse::<ControllerLabel>().unwrap(), c);
        }
        assert!("reno".parse::<ControllerLabel>().is_err());
    }

    #[test]
    fn ss_a_tracks_bdp() {
        let t = sweep_template("t");
        let cfg = sweep_point(&t, SweepAxis::Delay, 100.0, ControllerLabel::SsA).unwrap();
        assert_eq!(cfg.topology.buffer_pkts, 500);
        assert_eq!(cfg.flows[0].controller, ControllerSpec::slowstart(1000.0));
        let cfg = sweep_point(&t, SweepAxis::Bandwidth, 150.0, ControllerLabel::SsA).unwrap();
        assert_eq!(cfg.topology.buffer_pkts, 938);
        let cfg = sweep_point(&t, SweepAxis::Buffer, 100.0, ControllerLabel::SsA).unwrap();
        assert_eq!(cfg.topology.buffer_pkts, 100);
        assert_eq!(cfg.flows[0].controller, ControllerSpec::slowstart(500.0));
        assert_eq!(cfg.horizon_s, 20.0);
    }

    #[test]
    fn buffer_axis_cardinality() {
        let t = sweep_template("t");
        let values = [100.0, 150.0, 200.0, 250.0, 300.0];
        let p = sweep_preset("p", &t, SweepAxis::Buffer, &values, &ControllerLabel::ALL).unwrap();
        assert_eq!(p.runs.len(), 35);
    }

    #[test]
    fn rejects_bad_values() {
        let t = sweep_template("t");
        assert!(sweep_point(&t, SweepAxis::Buffer, 10.5, ControllerLabel::Sls).is_err());
        assert!(sweep_point(&t, SweepAxis::Delay, -1.0, ControllerLabel::Sls).is_err());
        assert!(sweep_preset("p", &t, SweepAxis::Delay, &[], &ControllerLabel::ALL).is_err());
    }
}

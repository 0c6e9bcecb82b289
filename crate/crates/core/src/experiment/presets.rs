use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use crate::cc::ControllerSpec;
use crate::error::{Error, Result};
use crate::traffic::UdpCbrSource;

use super::config::{FlowConfig, ScenarioConfig};
use super::metrics::MetricsRow;
use super::run_scenario;
use super::sweep::{sweep_preset, sweep_template, ControllerLabel, SweepAxis};
use super::world::ScenarioOutcome;

pub const PRESET_NAMES: [&str; 9] = [
    "table1",
    "fig3",
    "table2_beta",
    "table3",
    "table4",
    "table5",
    "table6",
    "table7_udp",
    "fig9_fairness",
];

pub const BUFFER_SWEEP_PKTS: [f64; 5] = [100.0, 150.0, 200.0, 250.0, 300.0];
pub const DELAY_SWEEP_MS: [f64; 6] = [10.0, 20.0, 40.0, 60.0, 80.0, 100.0];
pub const BANDWIDTH_SWEEP_MBPS: [f64; 6] = [10.0, 20.0, 40.0, 80.0, 120.0, 150.0];

/// One scenario of a preset. Runs in the same group are compared against
/// the group's reference run when computing throughput ratios.
#[derive(Clone, Debug)]
pub struct PresetRun {
    pub group: String,
    pub label: String,
    pub reference: bool,
    pub scenario: ScenarioConfig,
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub runs: Vec<PresetRun>,
}

pub struct PresetResults {
    pub name: String,
    pub results: Vec<(PresetRun, std::result::Result<ScenarioOutcome<f64>, String>)>,
}

fn single(
    group: &str,
    label: &str,
    id: &str,
    horizon_s: f64,
    controller: ControllerSpec,
) -> PresetRun {
    PresetRun {
        group: group.to_string(),
        label: label.to_string(),
        reference: label == ControllerLabel::Sls.label(),
        scenario: ScenarioConfig::single(id, horizon_s, controller),
    }
}

fn labelled(
    group: &str,
    prefix: &str,
    horizon_s: f64,
    buffer: usize,
    labels: &[ControllerLabel],
) -> Vec<PresetRun> {
    labels
        .iter()
        .map(|&l| {
            let mut r = single(
                group,
                l.label(),
                &format!("{prefix}_{}", l.key()),
                horizon_s,
                l.spec(500.0),
            );
            r.scenario.topology.buffer_pkts = buffer;
            r
        })
        .collect()
}

/// Builds the named preset.
pub fn preset(name: &str) -> Result<Preset> {
    use ControllerLabel::*;
    let runs = match name {
        "table1" => labelled("table1", "table1", 10.0, 250, &[SsS, SsA, SsL]),
        "fig3" => {
            let mut r = labelled("fig3", "fig3", 10.0, 100, &[SsA]);
            r[0].scenario.measurement.record_acks = true;
            r
        }
        "table2_beta" => [3.0, 10.0, 20.0]
            .into_iter()
            .map(|beta| {
                let mut r = single(
                    &format!("beta={beta}"),
                    &format!("SLS(beta={beta})"),
                    &format!("table2_beta{beta}"),
                    10.0,
                    ControllerSpec::ssthreshless(beta),
                );
                r.scenario.topology.buffer_pkts = 200;
                r
            })
            .collect(),
        "table3" => labelled("table3", "table3", 10.0, 200, &[Sls, SsA, Vegas]),
        "table4" => {
            return Ok(sweep_preset(
                "table4",
                &sweep_template("table4"),
                SweepAxis::Buffer,
                &BUFFER_SWEEP_PKTS,
                &ControllerLabel::ALL,
            )?)
        }
        "table5" => {
            return Ok(sweep_preset(
                "table5",
                &sweep_template("table5"),
                SweepAxis::Delay,
                &DELAY_SWEEP_MS,
                &ControllerLabel::ALL,
            )?)
        }
        "table6" => {
            return Ok(sweep_preset(
                "table6",
                &sweep_template("table6"),
                SweepAxis::Bandwidth,
                &BANDWIDTH_SWEEP_MBPS,
                &ControllerLabel::ALL,
            )?)
        }
        "table7_udp" => labelled(
            "table7_udp",
            "table7_udp",
            10.0,
            250,
            &[Sls, SsS, SsA, Vegas],
        )
        .into_iter()
        .map(|mut r| {
            r.scenario.cross_traffic = Some(UdpCbrSource::new(10e6, 1000, 1.0, 5.0));
            r.scenario.measurement.record_acks = r.label == Sls.label();
            r
        })
        .collect(),
        "fig9_fairness" => {
            let mut flows = vec![
                FlowConfig::new(ControllerSpec::slowstart(32.0)),
                FlowConfig::new(ControllerSpec::slowstart(32.0)),
            ];
            flows.extend((0..3).map(|_| FlowConfig::new(ControllerSpec::ssthreshless(3.0))));
            flows[4].start_s = 30.0;
            let mut scenario = ScenarioConfig::new("fig9_fairness", 60.0, flows);
            scenario.measurement.windows =
                vec![[0.0, 60.0], [50.0, 60.0], [25.0, 30.0], [30.0, 35.0]];
            vec![PresetRun {
                group: "fig9_fairness".into(),
                label: "2xSS(S)+3xSLS".into(),
                reference: false,
                scenario,
            }]
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(Preset {
        name: name.to_string(),
        runs,
    })
}

/// Runs every scenario of a preset in parallel. Results keep preset order.
pub fn run_preset(p: &Preset) -> PresetResults {
    let results = p
        .runs
        .par_iter()
        .map(|run| {
            let outcome = catch_unwind(AssertUnwindSafe(|| run_scenario::<f64>(&run.scenario)))
                .map_err(|panic| {
                    panic
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "simulation panicked".to_string())
                })
                .and_then(|r| r.map_err(|e| e.to_string()));
            (run.clone(), outcome)
        })
        .collect();
    PresetResults {
        name: p.name.clone(),
        results,
    }
}

impl PresetResults {
    /// Metrics rows for every run and window. Single-flow rows are labelled
    /// with the run label and carry the throughput ratio of the group's
    /// reference run over this run, when the group has one.
    pub fn rows(&self) -> Vec<MetricsRow> {
        let mut reference: HashMap<(&str, u64, u64), f64> = HashMap::new();
        for (run, outcome) in &self.results {
            if let (true, Ok(o)) = (run.reference, outcome) {
                for rep in &o.reports {
                    if let [f] = rep.flows.as_slice() {
                        let key = (
                            run.group.as_str(),
                            rep.window_start_s.to_bits(),
                            rep.window_end_s.to_bits(),
                        );
                        reference.insert(key, f.throughput_bps);
                    }
                }
            }
        }
        let mut rows = Vec::new();
        for (run, outcome) in &self.results {
            match outcome {
                Ok(o) => {
                    for rep in &o.reports {
                        let single = rep.flows.len() == 1;
                        for mut row in rep.rows() {
                            if single {
                                row.controller = run.label.clone();
                                let key = (
                                    run.group.as_str(),
                                    rep.window_start_s.to_bits(),
                                    rep.window_end_s.to_bits(),
                                );
                                row.throughput_ratio = reference
                                    .get(&key)
                                    .filter(|_| row.throughput_bps > 0.0)
                                    .map(|r| r / row.throughput_bps);
                            }
                            rows.push(row);
                        }
                    }
                }
                Err(_) => {
                    for (start, end) in run.scenario.windows() {
                        rows.push(MetricsRow {
                            scenario_id: run.scenario.id.clone(),
                            controller: run.label.clone(),
                            window_start_s: start,
                            window_end_s: end,
                            utilization: 0.0,
                            highest_seq_sent: 0,
                            throughput_bps: 0.0,
                            throughput_ratio: None,
                            jain: 1.0,
                            drops: 0,
                        });
                    }
                }
            }
        }
        rows
    }

    pub fn failures(&self) -> Vec<(&str, &str)> {
        self.results
            .iter()
            .filter_map(|(run, o)| {
                o.as_ref()
                    .err()
                    .map(|e| (run.scenario.id.as_str(), e.as_str()))
            })
            .collect()
    }

    /// Outcome of the run whose scenario id is `id`.
    pub fn by_id(&self, id: &str) -> Option<&ScenarioOutcome<f64>> {
        self.results
            .iter()
            .find(|(r, _)| r.scenario.id == id)
            .and_then(|(_, o)| o.as_ref().ok())
    }

    /// Outcome of the run with the given label.
    pub fn outcome(&self, label: &str) -> Option<&ScenarioOutcome<f64>> {
        self.results
            .iter()
            .find(|(r, _)| r.label == label)
            .and_then(|(_, o)| o.as_ref().ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds_and_validates() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert!(!p.runs.is_empty(), "{name}");
            for r in &p.runs {
                r.scenario.validate().unwrap();
            }
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("table9"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn table1_parameters() {
        let p = preset("table1").unwrap();
        let specs: Vec<_> = p
            .runs
            .iter()
            .map(|r| r.scenario.flows[0].controller.clone())
            .collect();
        assert_eq!(
            specs,
            vec![
                ControllerSpec::slowstart(32.0),
                ControllerSpec::slowstart(500.0),
                ControllerSpec::slowstart(5000.0)
            ]
        );
        for r in &p.runs {
            assert_eq!(r.scenario.topology.buffer_pkts, 250);
            assert_eq!(r.scenario.topology.bottleneck_bw_bps, 40e6);
            assert_eq!(r.scenario.topology.bottleneck_delay_s, 0.05);
            assert_eq!(r.scenario.horizon_s, 10.0);
        }
    }

    #[test]
    fn fairness_parameters() {
        let p = preset("fig9_fairness").unwrap();
        let s = &p.runs[0].scenario;
        assert_eq!(s.flows.len(), 5);
        assert_eq!(s.flows[4].start_s, 30.0);
        assert_eq!(s.flows[0].controller, ControllerSpec::slowstart(32.0));
        assert_eq!(s.flows[2].controller, ControllerSpec::ssthreshless(3.0));
        assert_eq!(s.horizon_s, 60.0);
    }

    #[test]
    fn udp_parameters() {
        let p = preset("table7_udp").unwrap();
        for r in &p.runs {
            let u = r.scenario.cross_traffic.as_ref().unwrap();
            assert_eq!((u.rate_bps, u.start_s, u.stop_s), (10e6, 1.0, 5.0));
        }
    }
}

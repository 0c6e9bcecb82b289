//! Scenario configuration, the simulation loop, metrics, traces, presets
//! and parameter sweeps.

mod config;
mod metrics;
mod presets;
mod sweep;
mod trace;
mod world;

pub use config::{FlowConfig, MeasurementConfig, ScenarioConfig};
pub use metrics::{
    compute_link_utilization, jain_index, read_metrics, read_metrics_csv, write_metrics,
    write_metrics_csv, FlowMetrics, MetricsReport, MetricsRow, METRICS_HEADER,
};
pub use presets::{
    preset, run_preset, Preset, PresetResults, PresetRun, BANDWIDTH_SWEEP_MBPS, BUFFER_SWEEP_PKTS,
    DELAY_SWEEP_MS, PRESET_NAMES,
};
pub use sweep::{sweep, sweep_point, sweep_preset, sweep_template, ControllerLabel, SweepAxis};
pub use trace::{emit_trace, write_trace, TraceRecord, TRACE_HEADER};
pub use world::{Conservation, DropRecord, FlowSummary, ScenarioOutcome, Simulation, UdpSummary};

use crate::error::Result;
use crate::scalar::Scalar;

/// Validates `cfg`, runs it to its horizon and returns traces and metrics.
pub fn run_scenario<T: Scalar>(cfg: &ScenarioConfig) -> Result<ScenarioOutcome<T>> {
    Ok(Simulation::<T>::new(cfg)?.run())
}

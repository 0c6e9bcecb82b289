use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Fraction of bottleneck capacity used by `delivered_payload_bits` over
/// `window_s`, clamped to `[0, 1]`. A zero-length window yields 0.
pub fn compute_link_utilization(delivered_payload_bits: u64, bw_bps: f64, window_s: f64) -> f64 {
    assert!(window_s >= 0.0, "negative measurement window {window_s}");
    assert!(bw_bps > 0.0, "bandwidth must be positive, got {bw_bps}");
    if window_s == 0.0 {
        return 0.0;
    }
    (delivered_payload_bits as f64 / (bw_bps * window_s)).clamp(0.0, 1.0)
}

/// Jain's fairness index `(Σx)² / (n·Σx²)`. All-zero or empty input counts
/// as perfectly fair.
pub fn jain_index(xs: &[f64]) -> f64 {
    let sum: f64 = xs.iter().sum();
    let sq: f64 = xs.iter().map(|x| x * x).sum();
    if xs.is_empty() || sq == 0.0 {
        return 1.0;
    }
    (sum * sum / (xs.len() as f64 * sq)).min(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowMetrics {
    pub flow_id: usize,
    pub controller: String,
    /// This flow's delivered payload over bottleneck capacity.
    pub utilization: f64,
    /// Distinct packets released by the end of the window.
    pub highest_seq_sent: u64,
    pub throughput_bps: f64,
    pub drops: u64,
}

/// Metrics for one measurement window of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub scenario_id: String,
    pub window_start_s: f64,
    pub window_end_s: f64,
    /// Aggregate TCP payload delivered over bottleneck capacity.
    pub link_utilization: f64,
    pub jain_fairness: f64,
    pub drops_total: u64,
    pub flows: Vec<FlowMetrics>,
}

impl MetricsReport {
    pub fn rows(&self) -> Vec<MetricsRow> {
        let multi = self.flows.len() > 1;
        self.flows
            .iter()
            .map(|f| MetricsRow {
                scenario_id: self.scenario_id.clone(),
                controller: if multi {
                    format!("{}[{}]", f.controller, f.flow_id)
                } else {
                    f.controller.clone()
                },
                window_start_s: self.window_start_s,
                window_end_s: self.window_end_s,
                utilization: f.utilization,
                highest_seq_sent: f.highest_seq_sent,
                throughput_bps: f.throughput_bps,
                throughput_ratio: None,
                jain: self.jain_fairness,
                drops: f.drops,
            })
            .collect()
    }
}

pub const METRICS_HEADER: &str = "scenario_id,controller,window_start_s,window_end_s,utilization,\
highest_seq_sent,throughput_bps,throughput_ratio,jain,drops";

/// One line of the metrics CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub scenario_id: String,
    pub controller: String,
    pub window_start_s: f64,
    pub window_end_s: f64,
    pub utilization: f64,
    pub highest_seq_sent: u64,
    pub throughput_bps: f64,
    pub throughput_ratio: Option<f64>,
    pub jain: f64,
    pub drops: u64,
}

impl MetricsRow {
    pub fn to_csv_line(&self) -> String {
        let ratio = self
            .throughput_ratio
            .map(|r| format!("{r:.6}"))
            .unwrap_or_default();
        format!(
            "{},{},{:.6},{:.6},{:.6},{},{:.6},{},{:.6},{}",
            self.scenario_id,
            self.controller,
            self.window_start_s,
            self.window_end_s,
            self.utilization,
            self.highest_seq_sent,
            self.throughput_bps,
            ratio,
            self.jain,
            self.drops
        )
    }
}

pub fn write_metrics<W: Write>(rows: &[MetricsRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{METRICS_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.to_csv_line())?;
    }
    w.flush()
}

pub fn write_metrics_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    write_metrics(rows, std::io::BufWriter::new(file)).map_err(io)
}

pub fn read_metrics<R: Read>(r: R) -> Result<Vec<MetricsRow>> {
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    let expected: Vec<&str> = METRICS_HEADER.split(',').collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse(format!(
            "unexpected metrics header: {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let bad = |col: &str| Error::Parse(format!("metrics row {}: bad `{col}`", line + 1));
        let f = |i: usize, col: &str| rec[i].parse::<f64>().map_err(|_| bad(col));
        let u = |i: usize, col: &str| rec[i].parse::<u64>().map_err(|_| bad(col));
        rows.push(MetricsRow {
            scenario_id: rec[0].to_string(),
            controller: rec[1].to_string(),
            window_start_s: f(2, "window_start_s")?,
            window_end_s: f(3, "window_end_s")?,
            utilization: f(4, "utilization")?,
            highest_seq_sent: u(5, "highest_seq_sent")?,
            throughput_bps: f(6, "throughput_bps")?,
            throughput_ratio: if rec[7].is_empty() {
                None
            } else {
                Some(f(7, "throughput_ratio")?)
            },
            jain: f(8, "jain")?,
            drops: u(9, "drops")?,
        });
    }
    Ok(rows)
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_metrics(file)
}

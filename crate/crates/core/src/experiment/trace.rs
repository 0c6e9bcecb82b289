use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tcp::Phase;

pub const TRACE_HEADER: &str =
    "time_s,flow_id,cwnd,ssthresh,phase,highest_seq_sent,highest_acked,queue_pkts,n_est";

/// State of one flow at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub time_s: f64,
    pub flow_id: usize,
    pub cwnd: f64,
    pub ssthresh: f64,
    pub phase: Phase,
    /// Distinct packets released so far.
    pub highest_seq_sent: u64,
    /// Packets cumulatively acknowledged so far.
    pub highest_acked: u64,
    /// Bottleneck queue occupancy, excluding the packet in service.
    pub queue_pkts: u64,
    /// Backlog estimate, for controllers that keep one.
    pub n_est: Option<f64>,
}

impl TraceRecord {
    pub fn to_csv_line(&self) -> String {
        let n_est = self.n_est.map(|n| format!("{n:.6}")).unwrap_or_default();
        format!(
            "{:.6},{},{:.6},{:.6},{},{},{},{},{}",
            self.time_s,
            self.flow_id,
            self.cwnd,
            self.ssthresh,
            self.phase.as_str(),
            self.highest_seq_sent,
            self.highest_acked,
            self.queue_pkts,
            n_est
        )
    }
}

pub fn write_trace<W: Write>(traces: &[TraceRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in traces {
        writeln!(w, "{}", r.to_csv_line())?;
    }
    w.flush()
}

/// Writes the trace CSV to `path`. On failure the records are untouched and
/// the error names the path.
pub fn emit_trace(traces: &[TraceRecord], path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    write_trace(traces, std::io::BufWriter::new(file)).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64) -> TraceRecord {
        TraceRecord {
            time_s: t,
            flow_id: 0,
            cwnd: 12.5,
            ssthresh: f64::INFINITY,
            phase: Phase::Startup,
            highest_seq_sent: 40,
            highest_acked: 30,
            queue_pkts: 3,
            n_est: Some(2.0 / 3.0),
        }
    }

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_trace(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{TRACE_HEADER}\n"));
    }

    #[test]
    fn two_records_three_lines() {
        let mut buf = Vec::new();
        write_trace(&[rec(0.01), rec(0.02)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[1],
            "0.010000,0,12.500000,inf,startup,40,30,3,0.666667"
        );
    }

    #[test]
    fn missing_estimate_is_blank() {
        let mut r = rec(1.0);
        r.n_est = None;
        r.phase = Phase::CongestionAvoidance;
        assert!(r.to_csv_line().ends_with("congestion_avoidance,40,30,3,"));
    }

    #[test]
    fn unwritable_destination() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_trace(&[rec(0.0)], &dir.path().join("missing").join("t.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}

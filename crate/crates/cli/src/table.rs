use ssthreshless::experiment::MetricsRow;

const HEADERS: [&str; 9] = [
    "scenario",
    "controller",
    "window_s",
    "util_%",
    "highest_seq",
    "tput_Mbps",
    "ratio_%",
    "jain",
    "drops",
];

/// Aligned plain-text table: text columns left-aligned, numbers right.
pub fn render(rows: &[MetricsRow]) -> String {
    let cells: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.scenario_id.clone(),
                r.controller.clone(),
                format!("{}-{}", r.window_start_s, r.window_end_s),
                format!("{:.2}", r.utilization * 100.0),
                r.highest_seq_sent.to_string(),
                format!("{:.2}", r.throughput_bps / 1e6),
                r.throughput_ratio
                    .map(|x| format!("{:.2}", x * 100.0))
                    .unwrap_or_else(|| "-".into()),
                format!("{:.3}", r.jain),
                r.drops.to_string(),
            ]
        })
        .collect();
    let mut widths = HEADERS.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |row: &[String]| {
        let parts: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i < 3 {
                    format!("{c:<w$}", w = widths[i])
                } else {
                    format!("{c:>w$}", w = widths[i])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&HEADERS.map(String::from));
    for row in &cells {
        out.push_str(&line(row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligns_columns() {
        let row = MetricsRow {
            scenario_id: "table1_ss_a".into(),
            controller: "SS(A)".into(),
            window_start_s: 0.0,
            window_end_s: 10.0,
            utilization: 0.875,
            highest_seq_sent: 43750,
            throughput_bps: 35e6,
            throughput_ratio: None,
            jain: 1.0,
            drops: 12,
        };
        let text = render(&[row]);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("table1_ss_a  SS(A)       0-10"));
        assert!(lines[1].contains("87.50"));
        assert!(lines[1].ends_with("12"));
    }
}

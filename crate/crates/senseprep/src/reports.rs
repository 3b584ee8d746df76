//! Report documents and flat CSV exports for plotting.

use serde::{Deserialize, Serialize};
use senseprep_core::anomaly::DetectionReport;
use senseprep_core::redundancy::{NodeState, RealtimeReport, RecoveredCell, StaticReport};

use crate::Error;

pub const DETECTION_JSON: &str = "detection.json";
pub const DETECTION_CSV: &str = "detection.csv";
pub const STATIC_JSON: &str = "redundancy_static.json";
pub const STATIC_CSV: &str = "redundancy_static.csv";
pub const STATIC_RECOVERY_CSV: &str = "recovery_static.csv";
pub const REALTIME_JSON: &str = "redundancy_realtime.json";
pub const REALTIME_CSV: &str = "redundancy_realtime.csv";
pub const REALTIME_RECOVERY_CSV: &str = "recovery_realtime.csv";
pub const TRUTH_JSON: &str = "truth.json";
pub const METRICS_JSON: &str = "metrics.json";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, Error> {
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub node: usize,
    pub observed: usize,
    pub predicted: usize,
    pub posterior: Vec<f64>,
    pub inferable: bool,
    pub abnormal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDoc {
    pub row: usize,
    pub q: f64,
    pub t2: f64,
    /// Exceeds a warning limit (stage two ran).
    pub flagged: bool,
    /// Exceeds an alarm limit.
    pub alarm: bool,
    pub nodes: Vec<NodeDoc>,
}

/// Detection run: limits are `null` when disabled (infinite).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionDoc {
    pub node_ids: Vec<String>,
    pub alpha_warning: f64,
    pub alpha_alarm: f64,
    pub q_limit: Option<f64>,
    pub t2_limit: Option<f64>,
    pub alarm_q_limit: Option<f64>,
    pub alarm_t2_limit: Option<f64>,
    pub rows: Vec<RowDoc>,
}

impl DetectionDoc {
    /// `alarms[t]` marks rows exceeding the alarm limits.
    pub fn new(
        node_ids: &[String],
        report: &DetectionReport,
        alphas: (f64, f64),
        alarm_limits: (f64, f64),
        alarms: &[bool],
    ) -> Self {
        let first = report.rows.first();
        Self {
            node_ids: node_ids.to_vec(),
            alpha_warning: alphas.0,
            alpha_alarm: alphas.1,
            q_limit: first.and_then(|r| finite(r.q_limit)),
            t2_limit: first.and_then(|r| finite(r.t2_limit)),
            alarm_q_limit: finite(alarm_limits.0),
            alarm_t2_limit: finite(alarm_limits.1),
            rows: report
                .rows
                .iter()
                .zip(alarms)
                .map(|(r, &alarm)| RowDoc {
                    row: r.row,
                    q: r.q,
                    t2: r.t2,
                    flagged: r.flagged,
                    alarm,
                    nodes: r
                        .nodes
                        .iter()
                        .map(|v| NodeDoc {
                            node: v.node,
                            observed: v.observed,
                            predicted: v.predicted,
                            posterior: v.posterior.clone(),
                            inferable: v.inferable,
                            abnormal: v.abnormal,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn flagged_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().filter(|r| r.flagged).map(|r| r.row)
    }

    /// Flagged rows with at least one node marked abnormal.
    pub fn localized_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows
            .iter()
            .filter(|r| r.nodes.iter().any(|v| v.abnormal))
            .map(|r| r.row)
    }

    pub fn abnormal_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .flat_map(|r| r.nodes.iter().filter(|v| v.abnormal).map(move |v| (r.row, v.node)))
    }

    /// One line per node verdict; unflagged rows get one line with empty
    /// node fields.
    pub fn to_csv(&self) -> Result<Vec<u8>, Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row", "q", "t2", "flagged", "alarm", "node", "observed", "predicted", "inferable", "abnormal"])?;
        for r in &self.rows {
            let head = [r.row.to_string(), r.q.to_string(), r.t2.to_string(), r.flagged.to_string(), r.alarm.to_string()];
            if r.nodes.is_empty() {
                w.write_record(head.iter().cloned().chain(std::iter::repeat_n(String::new(), 5)))?;
            }
            for v in &r.nodes {
                let tail = [
                    v.node.to_string(),
                    v.observed.to_string(),
                    v.predicted.to_string(),
                    v.inferable.to_string(),
                    v.abnormal.to_string(),
                ];
                w.write_record(head.iter().cloned().chain(tail))?;
            }
        }
        finish(w)
    }
}

pub fn static_csv(report: &StaticReport) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["node", "redundant", "criterion"])?;
    for v in &report.nodes {
        w.write_record([v.node.to_string(), v.redundant.to_string(), opt(v.criterion)])?;
    }
    finish(w)
}

pub fn realtime_csv(report: &RealtimeReport) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "node", "state", "max_posterior"])?;
    for s in &report.steps {
        let state = match s.state {
            NodeState::Waking => "waking",
            NodeState::Sleeping => "sleeping",
        };
        w.write_record([s.row.to_string(), s.node.to_string(), state.to_string(), opt(s.max_posterior)])?;
    }
    finish(w)
}

/// `(t, node, estimate, actual)` rows with the absolute error appended.
pub fn recovery_csv(cells: impl IntoIterator<Item = (usize, usize, f64, f64)>) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "node", "estimate", "actual", "abs_error"])?;
    for (t, node, estimate, actual) in cells {
        w.write_record([
            t.to_string(),
            node.to_string(),
            estimate.to_string(),
            actual.to_string(),
            (estimate - actual).abs().to_string(),
        ])?;
    }
    finish(w)
}

pub fn static_cells(cells: &[RecoveredCell]) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
    cells.iter().map(|c| (c.row, c.node, c.estimate, c.actual))
}

pub fn realtime_cells(report: &RealtimeReport) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
    report.steps.iter().filter_map(|s| s.estimate.map(|e| (s.row, s.node, e, s.actual)))
}

/// Ground truth written next to a corrupted table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truth {
    pub node_ids: Vec<String>,
    /// Test rows in the corrupted table, 0-based relative to its first row.
    pub rows: Vec<usize>,
    pub test_rows: usize,
    pub error_pct: f64,
    /// Amount added to each node of every corrupted row.
    pub deltas: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovery_csv_has_abs_error() {
        let text = String::from_utf8(recovery_csv([(3, 1, 1.5, 2.0)]).unwrap()).unwrap();
        assert_eq!(text, "t,node,estimate,actual,abs_error\n3,1,1.5,2,0.5\n");
    }

    #[test]
    fn unflagged_row_has_blank_node_fields() {
        let doc = DetectionDoc {
            node_ids: vec!["a".into()],
            alpha_warning: 0.05,
            alpha_alarm: 0.01,
            q_limit: None,
            t2_limit: Some(1.0),
            alarm_q_limit: None,
            alarm_t2_limit: Some(2.0),
            rows: vec![RowDoc {
                row: 0,
                q: 0.0,
                t2: 0.5,
                flagged: false,
                alarm: false,
                nodes: vec![],
            }],
        };
        let text = String::from_utf8(doc.to_csv().unwrap()).unwrap();
        assert_eq!(text.lines().nth(1), Some("0,0,0.5,false,false,,,,,"));
    }
}

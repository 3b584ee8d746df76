//! Redundant-node detection: static (from a single-slice network), real-time
//! sleep scheduling (from per-slice transition networks), and recovery of
//! redundant readings from parent readings.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::anomaly::normalize;
use crate::bayesnet::{config_states, learn_transition, BayesianNetwork, TransitionNetwork};
use crate::ingest::{discretize, DiscretizationScheme, SensorDataset};
use crate::{Error, Result};

pub const DEFAULT_TAU: f64 = 0.95;

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(tau))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticVerdict {
    pub node: usize,
    pub redundant: bool,
    /// Mean over parent configurations of the largest CPT entry; `None` for
    /// parentless nodes, which are never redundant.
    pub criterion: Option<f64>,
    /// Largest CPT entry per parent configuration.
    pub witnesses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticReport {
    pub tau: f64,
    pub nodes: Vec<StaticVerdict>,
}

impl StaticReport {
    pub fn redundant_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter(|v| v.redundant).map(|v| v.node)
    }
}

/// A node is redundant when its parents nearly determine it: the mean over
/// parent configurations of the CPT row maximum reaches `tau`.
pub fn ssdrda(net: &BayesianNetwork, tau: f64) -> Result<StaticReport> {
    check_tau(tau)?;
    let nodes = net
        .cpts()
        .iter()
        .map(|cpt| {
            if cpt.parents().is_empty() {
                return StaticVerdict {
                    node: cpt.node(),
                    redundant: false,
                    criterion: None,
                    witnesses: Vec::new(),
                };
            }
            let witnesses: Vec<f64> = (0..cpt.configs())
                .map(|h| cpt.row(h).iter().copied().fold(0.0, f64::max))
                .collect();
            let criterion = witnesses.iter().sum::<f64>() / witnesses.len() as f64;
            StaticVerdict {
                node: cpt.node(),
                redundant: criterion >= tau,
                criterion: Some(criterion),
                witnesses,
            }
        })
        .collect();
    Ok(StaticReport { tau, nodes })
}

/// Posterior of `node` at `t` given a distribution over each transition
/// parent's state at `t - 1` (in parent order), summing over all joint parent
/// configurations.
pub fn rsdrda_infer(node: usize, tn: &TransitionNetwork, parent_evidence: &[Vec<f64>]) -> Result<Vec<f64>> {
    if node >= tn.nodes() {
        return Err(Error::InvalidNode {
            index: node,
            nodes: tn.nodes(),
        });
    }
    let cpt = tn.cpt(node);
    let parents = cpt.parents();
    if parents.is_empty() {
        return Err(Error::NoParents(node));
    }
    if parent_evidence.len() != parents.len() {
        return Err(Error::DimensionMismatch {
            expected: parents.len(),
            found: parent_evidence.len(),
        });
    }
    let k = cpt.states();
    for (slot, e) in parent_evidence.iter().enumerate() {
        if e.len() != k || e.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidEvidence {
                parent: parents[slot],
                states: k,
            });
        }
    }
    let mut post = vec![0.0; k];
    for h in 0..cpt.configs() {
        let w: f64 = config_states(h, parents.len(), k)
            .iter()
            .zip(parent_evidence)
            .map(|(&s, e)| e[s])
            .product();
        if w == 0.0 {
            continue;
        }
        for (p, x) in post.iter_mut().zip(cpt.row(h)) {
            *p += w * x;
        }
    }
    Ok(normalize(post))
}

/// Weighted mean of parent readings with weights `1 / d_k`. A single parent,
/// or one with `d_k = 0` (a perfect stand-in), is returned as is.
pub fn recover(values: &[f64], dissimilarity: &[f64]) -> Result<f64> {
    if values.len() != dissimilarity.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: dissimilarity.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&d) = dissimilarity.iter().find(|d| !d.is_finite() || **d < 0.0) {
        return Err(Error::InvalidWeight(d));
    }
    if values.len() == 1 {
        return Ok(values[0]);
    }
    if let Some(i) = dissimilarity.iter().position(|d| *d == 0.0) {
        return Ok(values[i]);
    }
    let w: f64 = dissimilarity.iter().map(|d| 1.0 / d).sum();
    Ok(values.iter().zip(dissimilarity).map(|(v, d)| v / d).sum::<f64>() / w)
}

fn column_scale(col: &[f64]) -> (f64, f64) {
    let m = col.len() as f64;
    let mean = col.iter().sum::<f64>() / m;
    let var = if col.len() > 1 {
        col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let sd = libm::sqrt(var);
    (mean, if sd > 0.0 { sd } else { 1.0 })
}

/// RMS difference between `node` at `t` and `parent` at `t - lag` over rows
/// `start..end`, each side standardized over the aligned rows it contributes.
pub fn dissimilarity(data: &SensorDataset, node: usize, parent: usize, lag: usize, start: usize, end: usize) -> Result<f64> {
    if end > data.rows() || start + lag >= end {
        return Err(Error::TooFewSamples {
            needed: lag + 1,
            found: end.saturating_sub(start),
        });
    }
    let a: Vec<f64> = (start + lag..end).map(|t| data.values()[(t, node)]).collect();
    let b: Vec<f64> = (start..end - lag).map(|t| data.values()[(t, parent)]).collect();
    let (ma, sa) = column_scale(&a);
    let (mb, sb) = column_scale(&b);
    let sq: f64 = a
        .iter()
        .zip(&b)
        .map(|(x, y)| {
            let d = (x - ma) / sa - (y - mb) / sb;
            d * d
        })
        .sum();
    Ok(libm::sqrt(sq / a.len() as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredCell {
    pub row: usize,
    pub node: usize,
    pub estimate: f64,
    pub actual: f64,
}

/// Rebuilds every reading of each statically redundant node from its
/// same-row parents, with dissimilarities measured over all of `data`.
pub fn recover_static(data: &SensorDataset, net: &BayesianNetwork, report: &StaticReport) -> Result<Vec<RecoveredCell>> {
    if data.nodes() != net.nodes() {
        return Err(Error::DimensionMismatch {
            expected: net.nodes(),
            found: data.nodes(),
        });
    }
    let mut cells = Vec::new();
    for node in report.redundant_nodes() {
        let parents = net.dag().parents(node);
        let d = parents
            .iter()
            .map(|&p| dissimilarity(data, node, p, 0, 0, data.rows()))
            .collect::<Result<Vec<_>>>()?;
        for t in 0..data.rows() {
            let values: Vec<f64> = parents.iter().map(|&p| data.values()[(t, p)]).collect();
            cells.push(RecoveredCell {
                row: t,
                node,
                estimate: recover(&values, &d)?,
                actual: data.values()[(t, node)],
            });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub slice_len: usize,
    pub train_frac: f64,
    pub tau: f64,
    pub max_parents: usize,
}

impl ScheduleConfig {
    /// Rows of each slice used for learning (all nodes awake).
    pub fn train_len(&self) -> usize {
        libm::floor(self.slice_len as f64 * self.train_frac + 1e-9) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeState {
    Waking,
    Sleeping,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepVerdict {
    pub row: usize,
    pub node: usize,
    pub state: NodeState,
    /// `None` for nodes without transition parents (always awake).
    pub posterior: Option<Vec<f64>>,
    pub max_posterior: Option<f64>,
    /// Reconstructed reading when sleeping.
    pub estimate: Option<f64>,
    pub actual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSummary {
    pub start: usize,
    pub train_end: usize,
    pub end: usize,
    /// `(parent, child)` transition edges learned in this slice.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealtimeReport {
    pub tau: f64,
    pub slices: Vec<SliceSummary>,
    pub steps: Vec<StepVerdict>,
}

impl RealtimeReport {
    pub fn sleeping(&self) -> impl Iterator<Item = &StepVerdict> + '_ {
        self.steps.iter().filter(|s| s.state == NodeState::Sleeping)
    }
}

/// Slice-by-slice sleep scheduling.
///
/// Each slice learns a transition network on its first `train_len` rows.
/// For every later row, each node with transition parents gets a posterior
/// from the previous row's evidence: a point mass on the observed state for
/// awake parents, the parent's own posterior for sleeping ones. A node sleeps
/// when its largest posterior entry reaches `tau`; its reading is then rebuilt
/// from the parents' previous-row readings (themselves rebuilt if asleep).
/// A trailing partial slice is processed when it extends past its training
/// window.
pub fn rsdrda_schedule(data: &SensorDataset, scheme: &DiscretizationScheme, cfg: &ScheduleConfig) -> Result<RealtimeReport> {
    check_tau(cfg.tau)?;
    if !(cfg.train_frac > 0.0 && cfg.train_frac <= 1.0) {
        return Err(Error::InvalidParameter("train_frac must lie in (0, 1]"));
    }
    let train_len = cfg.train_len();
    if cfg.slice_len == 0 || train_len < 2 {
        return Err(Error::InvalidParameter("each slice needs at least two training rows"));
    }
    if data.rows() < cfg.slice_len {
        return Err(Error::TooFewSamples {
            needed: cfg.slice_len,
            found: data.rows(),
        });
    }
    if scheme.nodes() != data.nodes() {
        return Err(Error::DimensionMismatch {
            expected: data.nodes(),
            found: scheme.nodes(),
        });
    }
    let states = discretize(data, scheme)?;
    let n = data.nodes();
    let k = scheme.states();
    let mut slices = Vec::new();
    let mut steps = Vec::new();
    let mut start = 0;
    while start < data.rows() {
        let end = (start + cfg.slice_len).min(data.rows());
        let train_end = start + train_len;
        if end <= train_end {
            break;
        }
        let tn = learn_transition(&[states.select_rows(start, train_end)], cfg.max_parents)?;
        let d: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                tn.dag()
                    .parents(i)
                    .iter()
                    .map(|&p| dissimilarity(data, i, p, 1, start, train_end))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        // evidence and readings for row t - 1
        let point = |s: usize| {
            let mut e = vec![0.0; k];
            e[s] = 1.0;
            e
        };
        let mut evidence: Vec<Vec<f64>> = states.row(train_end - 1).iter().map(|&s| point(s)).collect();
        let mut readings: Vec<f64> = data.row(train_end - 1).to_vec();
        for t in train_end..end {
            let mut next_evidence = Vec::with_capacity(n);
            let mut next_readings = Vec::with_capacity(n);
            for i in 0..n {
                let actual = data.values()[(t, i)];
                let parents = tn.dag().parents(i);
                if parents.is_empty() {
                    next_evidence.push(point(states.get(t, i)));
                    next_readings.push(actual);
                    steps.push(StepVerdict {
                        row: t,
                        node: i,
                        state: NodeState::Waking,
                        posterior: None,
                        max_posterior: None,
                        estimate: None,
                        actual,
                    });
                    continue;
                }
                let ev: Vec<Vec<f64>> = parents.iter().map(|&p| evidence[p].clone()).collect();
                let post = rsdrda_infer(i, &tn, &ev)?;
                let max = post.iter().copied().fold(0.0, f64::max);
                let (state, estimate) = if max >= cfg.tau {
                    let values: Vec<f64> = parents.iter().map(|&p| readings[p]).collect();
                    (NodeState::Sleeping, Some(recover(&values, &d[i])?))
                } else {
                    (NodeState::Waking, None)
                };
                match estimate {
                    Some(e) => {
                        next_evidence.push(post.clone());
                        next_readings.push(e);
                    }
                    None => {
                        next_evidence.push(point(states.get(t, i)));
                        next_readings.push(actual);
                    }
                }
                steps.push(StepVerdict {
                    row: t,
                    node: i,
                    state,
                    posterior: Some(post),
                    max_posterior: Some(max),
                    estimate,
                    actual,
                });
            }
            evidence = next_evidence;
            readings = next_readings;
        }
        slices.push(SliceSummary {
            start,
            train_end,
            end,
            edges: tn.dag().edges(),
        });
        start = end;
    }
    Ok(RealtimeReport {
        tau: cfg.tau,
        slices,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesnet::{Counts, Cpt, Dag};

    fn tn_one_parent(table: Vec<f64>, k: usize) -> TransitionNetwork {
        let dag = Dag::from_parents(vec![vec![], vec![0]]).unwrap();
        let root = Cpt::from_parts(0, vec![], vec![1.0 / k as f64; k], Counts::zeros(1, k)).unwrap();
        let child = Cpt::from_parts(1, vec![0], table, Counts::zeros(k, k)).unwrap();
        TransitionNetwork::from_parts(dag, vec![root, child], vec![vec![1.0 / k as f64; k]; 2], k).unwrap()
    }

    #[test]
    fn soft_evidence_mixes_rows() {
        let tn = tn_one_parent(vec![0.9, 0.1, 0.2, 0.8], 2);
        let p = rsdrda_infer(1, &tn, &[vec![0.7, 0.3]]).unwrap();
        assert!((p[0] - 0.69).abs() < 1e-12);
        assert!((p[1] - 0.31).abs() < 1e-12);
    }

    #[test]
    fn point_mass_through_identity() {
        let tn = tn_one_parent(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 3);
        assert_eq!(rsdrda_infer(1, &tn, &[vec![0.0, 0.0, 1.0]]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(rsdrda_infer(0, &tn, &[]).unwrap_err(), Error::NoParents(0));
        assert!(matches!(
            rsdrda_infer(1, &tn, &[vec![1.0]]),
            Err(Error::InvalidEvidence { .. })
        ));
    }

    #[test]
    fn weighted_recovery() {
        assert_eq!(recover(&[7.0], &[4.0]).unwrap(), 7.0);
        assert_eq!(recover(&[10.0, 20.0], &[2.0, 2.0]).unwrap(), 15.0);
        assert!((recover(&[10.0, 20.0], &[1.0, 3.0]).unwrap() - 12.5).abs() < 1e-12);
        assert_eq!(recover(&[10.0, 20.0], &[1.0, 0.0]).unwrap(), 20.0);
        assert_eq!(recover(&[], &[]).unwrap_err(), Error::EmptyInput);
        assert_eq!(recover(&[1.0], &[-1.0]).unwrap_err(), Error::InvalidWeight(-1.0));
    }

    #[test]
    fn tau_validation() {
        let s = crate::ingest::StateMatrix::from_columns(&[&[0, 1, 0]], 2).unwrap();
        let net = BayesianNetwork::fit(&[s], Dag::empty(1)).unwrap();
        assert_eq!(ssdrda(&net, 0.0).unwrap_err(), Error::InvalidThreshold(0.0));
        assert_eq!(ssdrda(&net, 1.5).unwrap_err(), Error::InvalidThreshold(1.5));
        let r = ssdrda(&net, 1.0).unwrap();
        assert!(!r.nodes[0].redundant && r.nodes[0].criterion.is_none());
    }

    #[test]
    fn train_len_rounding() {
        let cfg = ScheduleConfig {
            slice_len: 100,
            train_frac: 0.6,
            tau: 0.95,
            max_parents: 3,
        };
        assert_eq!(cfg.train_len(), 60);
    }
}

//! Two-stage detection: Q/T² screening of whole rows, then per-node state
//! prediction from the previous row through the transition network.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::bayesnet::{config_states, TransitionNetwork};
use crate::ingest::{DiscretizationScheme, SensorDataset};
use crate::spectra::{q_statistic, t2_statistic, PcaModel};
use crate::{Error, Result};

/// Stage-one result for one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Screen {
    pub q: f64,
    pub t2: f64,
    pub q_exceeded: bool,
    pub t2_exceeded: bool,
    /// `q_exceeded || t2_exceeded`.
    pub flagged: bool,
}

/// Screens a raw row against the model's own control limits.
pub fn tq_screen(row: &[f64], model: &PcaModel) -> Result<Screen> {
    tq_screen_at(row, model, model.q_limit(), model.t2_limit())
}

/// Screens a raw row against explicit limits.
pub fn tq_screen_at(row: &[f64], model: &PcaModel, q_limit: f64, t2_limit: f64) -> Result<Screen> {
    let xbar = model.standardization().apply(row)?;
    let q = q_statistic(&xbar, model)?;
    let t2 = t2_statistic(&xbar, model)?;
    let q_exceeded = q > q_limit;
    let t2_exceeded = t2 > t2_limit;
    Ok(Screen {
        q,
        t2,
        q_exceeded,
        t2_exceeded,
        flagged: q_exceeded || t2_exceeded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatePrediction {
    pub state: usize,
    pub posterior: Vec<f64>,
    /// False when the node has no transition parents; `state` is then the
    /// prior mode and carries no evidence.
    pub inferable: bool,
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in p.iter().enumerate() {
        if x > p[best] {
            best = i;
        }
    }
    best
}

/// Scales to unit sum; an all-zero vector becomes uniform.
pub(crate) fn normalize(mut p: Vec<f64>) -> Vec<f64> {
    let sum: f64 = p.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        for x in &mut p {
            *x /= sum;
        }
    } else {
        let u = 1.0 / p.len() as f64;
        p.iter_mut().for_each(|x| *x = u);
    }
    p
}

/// `P(X = c | parent at position `slot` = s)` from the joint-parent CPT,
/// weighting each joint configuration by how often it was observed. With no
/// observations the configurations are weighted equally.
pub fn single_parent_factor(tn: &TransitionNetwork, node: usize, slot: usize, parent_state: usize) -> Vec<f64> {
    let cpt = tn.cpt(node);
    let k = cpt.states();
    let arity = cpt.parents().len();
    let mut weighted = vec![0.0; k];
    let mut plain = vec![0.0; k];
    let mut weight = 0.0;
    let mut rows = 0usize;
    for h in 0..cpt.configs() {
        if config_states(h, arity, k)[slot] != parent_state {
            continue;
        }
        let n: u64 = cpt.counts().row(h).iter().sum();
        let row = cpt.row(h);
        for c in 0..k {
            weighted[c] += n as f64 * row[c];
            plain[c] += row[c];
        }
        weight += n as f64;
        rows += 1;
    }
    if weight > 0.0 {
        weighted.iter().map(|x| x / weight).collect()
    } else {
        plain.iter().map(|x| x / rows as f64).collect()
    }
}

fn check_states(states: &[usize], tn: &TransitionNetwork) -> Result<()> {
    if states.len() != tn.nodes() {
        return Err(Error::DimensionMismatch {
            expected: tn.nodes(),
            found: states.len(),
        });
    }
    if let Some(&s) = states.iter().find(|&&s| s >= tn.states()) {
        return Err(Error::StateOutOfRange {
            state: s,
            states: tn.states(),
        });
    }
    Ok(())
}

/// Naive-Bayes prediction of a node's state at `t` from all node states at
/// `t - 1`: `P(c) ∝ prior(c) · Π_j P(c | parent_j)`.
pub fn nb_predict_state(node: usize, prev_states: &[usize], tn: &TransitionNetwork) -> Result<StatePrediction> {
    if node >= tn.nodes() {
        return Err(Error::InvalidNode {
            index: node,
            nodes: tn.nodes(),
        });
    }
    check_states(prev_states, tn)?;
    let prior = tn.prior(node);
    let parents = tn.dag().parents(node);
    if parents.is_empty() {
        return Ok(StatePrediction {
            state: argmax(prior),
            posterior: prior.to_vec(),
            inferable: false,
        });
    }
    let mut score = prior.to_vec();
    for (slot, &p) in parents.iter().enumerate() {
        let f = single_parent_factor(tn, node, slot, prev_states[p]);
        for (s, x) in score.iter_mut().zip(f) {
            *s *= x;
        }
    }
    let posterior = normalize(score);
    Ok(StatePrediction {
        state: argmax(&posterior),
        posterior,
        inferable: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeVerdict {
    pub node: usize,
    pub observed: usize,
    pub predicted: usize,
    pub posterior: Vec<f64>,
    pub inferable: bool,
    /// Inferable and `predicted != observed`.
    pub abnormal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowReport {
    pub row: usize,
    pub q: f64,
    pub t2: f64,
    pub q_limit: f64,
    pub t2_limit: f64,
    pub flagged: bool,
    /// Empty unless `flagged`.
    pub nodes: Vec<NodeVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub rows: Vec<RowReport>,
}

impl DetectionReport {
    pub fn flagged_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().filter(|r| r.flagged).map(|r| r.row)
    }

    /// `(row, node)` cells marked abnormal.
    pub fn abnormal_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .flat_map(|r| r.nodes.iter().filter(|v| v.abnormal).map(move |v| (r.row, v.node)))
    }
}

/// Screens every test row; for flagged rows predicts each node's state from
/// the previous row's observed states and marks disagreements.
///
/// `predecessor` is the raw row preceding the first test row (normally the
/// last training row).
pub fn tqbayes_detect(
    test: &SensorDataset,
    predecessor: &[f64],
    model: &PcaModel,
    tn: &TransitionNetwork,
    scheme: &DiscretizationScheme,
) -> Result<DetectionReport> {
    let n = test.nodes();
    for found in [model.nodes(), tn.nodes(), scheme.nodes(), predecessor.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    if tn.states() != scheme.states() {
        return Err(Error::DimensionMismatch {
            expected: scheme.states(),
            found: tn.states(),
        });
    }
    let mut prev = scheme.discretize_row(predecessor)?;
    let mut rows = Vec::with_capacity(test.rows());
    for t in 0..test.rows() {
        let raw = test.row(t);
        let current = scheme.discretize_row(raw)?;
        let screen = tq_screen(raw, model)?;
        let mut nodes = Vec::new();
        if screen.flagged {
            for i in 0..n {
                let p = nb_predict_state(i, &prev, tn)?;
                nodes.push(NodeVerdict {
                    node: i,
                    observed: current[i],
                    predicted: p.state,
                    abnormal: p.inferable && p.state != current[i],
                    posterior: p.posterior,
                    inferable: p.inferable,
                });
            }
        }
        rows.push(RowReport {
            row: t,
            q: screen.q,
            t2: screen.t2,
            q_limit: model.q_limit(),
            t2_limit: model.t2_limit(),
            flagged: screen.flagged,
            nodes,
        });
        prev = current;
    }
    Ok(DetectionReport { rows })
}

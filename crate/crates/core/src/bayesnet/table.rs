//! Sufficient statistics and conditional probability tables.

use alloc::vec;
use alloc::vec::Vec;

use crate::ingest::StateMatrix;
use crate::{Error, Result};

/// Which slice the parents are read from, relative to the child.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lag {
    /// Parents in the same row (initial / static network).
    Same,
    /// Parents in the previous row (transition network).
    Previous,
}

/// Largest parent-configuration table we are willing to allocate.
pub const MAX_CONFIGS: usize = 1 << 20;

/// Row index of a parent configuration: mixed radix, first parent most
/// significant.
pub fn config_index(parent_states: impl IntoIterator<Item = usize>, states: usize) -> usize {
    parent_states.into_iter().fold(0, |acc, s| acc * states + s)
}

/// Inverse of [`config_index`] for `parents` parents.
pub fn config_states(mut index: usize, parents: usize, states: usize) -> Vec<usize> {
    let mut out = vec![0; parents];
    for slot in out.iter_mut().rev() {
        *slot = index % states;
        index /= states;
    }
    out
}

pub(crate) fn config_count(states: usize, parents: usize) -> Result<usize> {
    u32::try_from(parents)
        .ok()
        .and_then(|p| states.checked_pow(p))
        .filter(|h| *h <= MAX_CONFIGS)
        .ok_or(Error::TableTooLarge { states, parents })
}

/// Checks that all sequences share node count and state count.
pub(crate) fn sequence_shape(seqs: &[StateMatrix]) -> Result<(usize, usize)> {
    let first = seqs.first().ok_or(Error::NoSequences)?;
    let shape = (first.cols(), first.states());
    if seqs.iter().any(|s| (s.cols(), s.states()) != shape) {
        return Err(Error::InconsistentSequences);
    }
    Ok(shape)
}

/// `N[j][k]`: how often the node was in state `k` while its parents were in
/// configuration `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    configs: usize,
    states: usize,
    data: Vec<u64>,
}

impl Counts {
    pub fn zeros(configs: usize, states: usize) -> Self {
        Self {
            configs,
            states,
            data: vec![0; configs * states],
        }
    }

    pub fn from_rows(configs: usize, states: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != configs * states {
            return Err(Error::DimensionMismatch {
                expected: configs * states,
                found: data.len(),
            });
        }
        Ok(Self { configs, states, data })
    }

    pub fn configs(&self) -> usize {
        self.configs
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn get(&self, config: usize, state: usize) -> u64 {
        self.data[config * self.states + state]
    }

    pub fn row(&self, config: usize) -> &[u64] {
        &self.data[config * self.states..(config + 1) * self.states]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn total(&self) -> u64 {
        self.data.iter().sum()
    }

    fn bump(&mut self, config: usize, state: usize) {
        self.data[config * self.states + state] += 1;
    }
}

/// Tallies node states against parent configurations over all sequences.
///
/// With [`Lag::Same`] parents are read from the same row; with
/// [`Lag::Previous`] the node at row `t` is paired with its parents at row
/// `t - 1` for `t >= 1`.
pub fn count_states(seqs: &[StateMatrix], node: usize, parents: &[usize], lag: Lag) -> Result<Counts> {
    let (n, k) = sequence_shape(seqs)?;
    for &i in core::iter::once(&node).chain(parents) {
        if i >= n {
            return Err(Error::InvalidNode { index: i, nodes: n });
        }
    }
    for (i, p) in parents.iter().enumerate() {
        if parents[..i].contains(p) {
            return Err(Error::DuplicateParent(*p));
        }
    }
    if lag == Lag::Same && parents.contains(&node) {
        return Err(Error::SelfParent(node));
    }
    let mut counts = Counts::zeros(config_count(k, parents.len())?, k);
    for seq in seqs {
        match lag {
            Lag::Same => {
                for t in 0..seq.rows() {
                    let row = seq.row(t);
                    counts.bump(config_index(parents.iter().map(|&p| row[p]), k), row[node]);
                }
            }
            Lag::Previous => {
                if seq.rows() < 2 {
                    return Err(Error::TooFewSamples {
                        needed: 2,
                        found: seq.rows(),
                    });
                }
                for t in 1..seq.rows() {
                    let prev = seq.row(t - 1);
                    counts.bump(config_index(parents.iter().map(|&p| prev[p]), k), seq.get(t, node));
                }
            }
        }
    }
    Ok(counts)
}

/// Maximum-likelihood CPT `N[j][k] / sum_k N[j][k]`; rows without data are uniform.
pub fn estimate_cpt(counts: &Counts) -> Vec<f64> {
    let k = counts.states();
    let mut table = Vec::with_capacity(counts.configs() * k);
    for j in 0..counts.configs() {
        let row = counts.row(j);
        let total: u64 = row.iter().sum();
        if total == 0 {
            table.extend(core::iter::repeat(1.0 / k as f64).take(k));
        } else {
            table.extend(row.iter().map(|&c| c as f64 / total as f64));
        }
    }
    table
}

/// `sum_j sum_k N log(N / N_j)`; empty cells contribute nothing.
pub fn family_log_likelihood(counts: &Counts) -> f64 {
    let mut ll = 0.0;
    for j in 0..counts.configs() {
        let row = counts.row(j);
        let total: u64 = row.iter().sum();
        if total == 0 {
            continue;
        }
        let total = total as f64;
        for &c in row {
            if c > 0 {
                let c = c as f64;
                ll += c * libm::log(c / total);
            }
        }
    }
    ll
}

/// Log likelihood minus the BIC penalty `(free parameters / 2) ln(samples)`.
pub fn family_bic(counts: &Counts) -> f64 {
    let samples = counts.total();
    let params = (counts.configs() * (counts.states() - 1)) as f64;
    let penalty = if samples > 0 {
        0.5 * params * libm::log(samples as f64)
    } else {
        0.0
    };
    family_log_likelihood(counts) - penalty
}

/// Conditional probability table of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    node: usize,
    parents: Vec<usize>,
    states: usize,
    table: Vec<f64>,
    counts: Counts,
}

impl Cpt {
    pub fn estimate(node: usize, parents: Vec<usize>, counts: Counts) -> Self {
        let table = estimate_cpt(&counts);
        Self {
            node,
            parents,
            states: counts.states(),
            table,
            counts,
        }
    }

    /// Rebuilds a stored table, checking shape and normalization.
    pub fn from_parts(node: usize, parents: Vec<usize>, table: Vec<f64>, counts: Counts) -> Result<Self> {
        let states = counts.states();
        let configs = config_count(states, parents.len())?;
        if counts.configs() != configs {
            return Err(Error::DimensionMismatch {
                expected: configs,
                found: counts.configs(),
            });
        }
        if table.len() != configs * states {
            return Err(Error::DimensionMismatch {
                expected: configs * states,
                found: table.len(),
            });
        }
        for row in table.chunks_exact(states) {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter("CPT rows must be probability vectors"));
            }
        }
        Ok(Self {
            node,
            parents,
            states,
            table,
            counts,
        })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn configs(&self) -> usize {
        self.counts.configs()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn counts(&self) -> &Counts {
        &self.counts
    }

    pub fn row(&self, config: usize) -> &[f64] {
        &self.table[config * self.states..(config + 1) * self.states]
    }

    /// CPT row for the parent states found in a full row of node states.
    pub fn row_for(&self, node_states: &[usize]) -> &[f64] {
        self.row(config_index(self.parents.iter().map(|&p| node_states[p]), self.states))
    }
}

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SensorDataset;
use crate::{Error, Result};

/// Equal-width bins per node. States are numbered `0..states`.
///
/// Bins are half-open: a value equal to an edge belongs to the higher state.
/// Values below the first edge map to state 0 and values at or above the last
/// edge map to `states - 1`, so every real has a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationScheme {
    edges: Vec<Vec<f64>>,
    states: usize,
}

impl DiscretizationScheme {
    pub fn new(edges: Vec<Vec<f64>>, states: usize) -> Result<Self> {
        if states < 2 {
            return Err(Error::InvalidStateCount(states));
        }
        for e in &edges {
            if e.len() != states - 1 {
                return Err(Error::DimensionMismatch {
                    expected: states - 1,
                    found: e.len(),
                });
            }
            if e.iter().any(|x| !x.is_finite()) || e.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidParameter("bin edges must be finite and strictly increasing"));
            }
        }
        Ok(Self { edges, states })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn nodes(&self) -> usize {
        self.edges.len()
    }

    /// Interior edges of one node.
    pub fn edges(&self, node: usize) -> &[f64] {
        &self.edges[node]
    }

    pub fn state_of(&self, node: usize, value: f64) -> usize {
        self.edges[node].partition_point(|e| *e <= value)
    }

    pub fn discretize_row(&self, row: &[f64]) -> Result<Vec<usize>> {
        if row.len() != self.nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes(),
                found: row.len(),
            });
        }
        Ok(row.iter().enumerate().map(|(j, x)| self.state_of(j, *x)).collect())
    }
}

/// Discrete sequences: `rows x cols` states, each below `states`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateMatrix {
    rows: usize,
    cols: usize,
    states: usize,
    data: Vec<usize>,
}

impl StateMatrix {
    pub fn new(rows: usize, cols: usize, states: usize, data: Vec<usize>) -> Result<Self> {
        if states < 2 {
            return Err(Error::InvalidStateCount(states));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(&s) = data.iter().find(|s| **s >= states) {
            return Err(Error::StateOutOfRange { state: s, states });
        }
        Ok(Self {
            rows,
            cols,
            states,
            data,
        })
    }

    /// Builds from per-node columns.
    pub fn from_columns<C: AsRef<[usize]>>(columns: &[C], states: usize) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for c in columns {
                let c = c.as_ref();
                if c.len() != rows {
                    return Err(Error::DimensionMismatch {
                        expected: rows,
                        found: c.len(),
                    });
                }
                data.push(c[i]);
            }
        }
        Self::new(rows, cols, states, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<usize> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, start: usize, end: usize) -> Self {
        Self {
            rows: end - start,
            cols: self.cols,
            states: self.states,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }
}

/// Equal-width bins over each training column's `[min, max]`.
pub fn fit_discretization(data: &SensorDataset, states: usize) -> Result<DiscretizationScheme> {
    if states < 2 {
        return Err(Error::InvalidStateCount(states));
    }
    let mut edges = Vec::with_capacity(data.nodes());
    for j in 0..data.nodes() {
        let col = data.column(j);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::DegenerateColumn {
                node: data.node_ids()[j].clone(),
            });
        }
        let width = (hi - lo) / states as f64;
        let e: Vec<f64> = (1..states).map(|i| lo + width * i as f64).collect();
        if e.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateColumn {
                node: data.node_ids()[j].clone(),
            });
        }
        edges.push(e);
    }
    DiscretizationScheme::new(edges, states)
}

pub fn discretize(data: &SensorDataset, scheme: &DiscretizationScheme) -> Result<StateMatrix> {
    if data.nodes() != scheme.nodes() {
        return Err(Error::DimensionMismatch {
            expected: scheme.nodes(),
            found: data.nodes(),
        });
    }
    let mut out = Vec::with_capacity(data.rows() * data.nodes());
    for i in 0..data.rows() {
        out.extend(scheme.discretize_row(data.row(i))?);
    }
    StateMatrix::new(data.rows(), data.nodes(), scheme.states(), out)
}

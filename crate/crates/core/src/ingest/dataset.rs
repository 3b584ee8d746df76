use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

/// `m` uniformly sampled rows by `n` sensor nodes.
///
/// Construction validates the invariants, so every value is finite, node ids
/// are distinct and timestamps (when present) strictly increase.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorDataset {
    values: Matrix,
    node_ids: Vec<String>,
    timestamps: Option<Vec<i64>>,
}

impl SensorDataset {
    pub fn new(values: Matrix, node_ids: Vec<String>, timestamps: Option<Vec<i64>>) -> Result<Self> {
        if values.cols() == 0 {
            return Err(Error::NoNodes);
        }
        if values.rows() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                found: values.rows(),
            });
        }
        if node_ids.len() != values.cols() {
            return Err(Error::DimensionMismatch {
                expected: values.cols(),
                found: node_ids.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for id in &node_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateNode(id.clone()));
            }
        }
        for (i, row) in values.iter_rows().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: i,
                    node: node_ids[j].clone(),
                });
            }
        }
        if let Some(ts) = &timestamps {
            if ts.len() != values.rows() {
                return Err(Error::DimensionMismatch {
                    expected: values.rows(),
                    found: ts.len(),
                });
            }
            if let Some(i) = ts.windows(2).position(|w| w[1] <= w[0]) {
                return Err(Error::NonIncreasingTimestamps { row: i + 1 });
            }
        }
        Ok(Self {
            values,
            node_ids,
            timestamps,
        })
    }

    /// Dataset with generated ids `s0, s1, ...` and no timestamps.
    pub fn from_matrix(values: Matrix) -> Result<Self> {
        let ids = (0..values.cols()).map(|j| format!("s{j}")).collect();
        Self::new(values, ids, None)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn timestamps(&self) -> Option<&[i64]> {
        self.timestamps.as_deref()
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn nodes(&self) -> usize {
        self.values.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j)
    }

    /// Rows `start..end` as a new dataset (needs at least two rows).
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end > self.rows() {
            return Err(Error::RowOutOfRange {
                row: end,
                rows: self.rows(),
            });
        }
        Self::new(
            self.values.select_rows(start, end),
            self.node_ids.clone(),
            self.timestamps.as_ref().map(|t| t[start..end].to_vec()),
        )
    }

    pub(crate) fn with_values(&self, values: Matrix) -> Result<Self> {
        Self::new(values, self.node_ids.clone(), self.timestamps.clone())
    }
}

use alloc::collections::BTreeSet;

use super::SensorDataset;
use crate::{Error, Result};

/// Adds `training_means[j] * pct` to every node of each selected row.
///
/// Duplicate row indices are applied once. Rows not listed are untouched.
pub fn inject_errors(
    data: &SensorDataset,
    rows: &[usize],
    pct: f64,
    training_means: &[f64],
) -> Result<SensorDataset> {
    if rows.is_empty() {
        return Err(Error::EmptyRowSet);
    }
    if training_means.len() != data.nodes() {
        return Err(Error::DimensionMismatch {
            expected: data.nodes(),
            found: training_means.len(),
        });
    }
    if !pct.is_finite() {
        return Err(Error::InvalidParameter("error percentage must be finite"));
    }
    let selected: BTreeSet<usize> = rows.iter().copied().collect();
    if let Some(&bad) = selected.iter().find(|r| **r >= data.rows()) {
        return Err(Error::RowOutOfRange {
            row: bad,
            rows: data.rows(),
        });
    }
    let mut values = data.values().clone();
    for &i in &selected {
        for (x, ave) in values.row_mut(i).iter_mut().zip(training_means) {
            *x += ave * pct;
        }
    }
    data.with_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    fn data() -> SensorDataset {
        SensorDataset::from_matrix(Matrix::from_rows(&[[7.0], [1.0], [2.0]]).unwrap()).unwrap()
    }

    #[test]
    fn adds_scaled_training_mean() {
        let out = inject_errors(&data(), &[0], 0.10, &[10.0]).unwrap();
        assert_eq!(out.column(0), [8.0, 1.0, 2.0]);
    }

    #[test]
    fn zero_percent_is_identity() {
        let d = data();
        assert_eq!(inject_errors(&d, &[0, 1, 2], 0.0, &[10.0]).unwrap(), d);
    }

    #[test]
    fn rejects_bad_rows() {
        assert_eq!(inject_errors(&data(), &[], 0.1, &[1.0]).unwrap_err(), Error::EmptyRowSet);
        assert_eq!(
            inject_errors(&data(), &[3], 0.1, &[1.0]).unwrap_err(),
            Error::RowOutOfRange { row: 3, rows: 3 }
        );
    }
}

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SensorDataset;
use crate::{Error, Matrix, Result};

/// Per-node training means and sample variances (`1/(m-1)` divisor).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    means: Vec<f64>,
    variances: Vec<f64>,
}

impl Standardization {
    pub fn new(means: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        if means.len() != variances.len() {
            return Err(Error::LengthMismatch {
                left: means.len(),
                right: variances.len(),
            });
        }
        if variances.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter("variances must be positive and finite"));
        }
        Ok(Self { means, variances })
    }

    /// Fits means and variances on a dataset; a constant column is an error.
    pub fn fit(data: &SensorDataset) -> Result<Self> {
        let m = data.rows() as f64;
        let mut means = Vec::with_capacity(data.nodes());
        let mut variances = Vec::with_capacity(data.nodes());
        for j in 0..data.nodes() {
            let col = data.column(j);
            let mean = col.iter().sum::<f64>() / m;
            let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
            if !(var > 0.0) {
                return Err(Error::ZeroVariance {
                    node: data.node_ids()[j].clone(),
                });
            }
            means.push(mean);
            variances.push(var);
        }
        Ok(Self { means, variances })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn nodes(&self) -> usize {
        self.means.len()
    }

    /// `(row - v) D^{-1/2}` with the training parameters.
    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                found: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(&self.means)
            .zip(&self.variances)
            .map(|((x, mean), var)| (x - mean) / libm::sqrt(*var))
            .collect())
    }
}

/// Standardizes every column to zero mean and unit sample variance.
pub fn standardize(data: &SensorDataset) -> Result<(Matrix, Standardization)> {
    let std = Standardization::fit(data)?;
    let mut out = Matrix::zeros(data.rows(), data.nodes());
    for i in 0..data.rows() {
        let z = std.apply(data.row(i))?;
        out.row_mut(i).copy_from_slice(&z);
    }
    Ok((out, std))
}

pub fn apply_standardization(row: &[f64], std: &Standardization) -> Result<Vec<f64>> {
    std.apply(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ds(rows: &[&[f64]]) -> SensorDataset {
        SensorDataset::from_matrix(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn unit_column() {
        let (z, std) = standardize(&ds(&[&[1.0], &[2.0], &[3.0]])).unwrap();
        assert_eq!(std.means(), &[2.0]);
        assert_eq!(std.variances(), &[1.0]);
        assert_eq!(z.column(0), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn constant_column_names_node() {
        let err = standardize(&ds(&[&[1.0, 5.0], &[2.0, 5.0], &[3.0, 5.0]])).unwrap_err();
        assert_eq!(err, Error::ZeroVariance { node: "s1".into() });
    }

    #[test]
    fn affine_columns_standardize_identically() {
        let (z, _) = standardize(&ds(&[&[0.0, 10.0], &[2.0, 20.0], &[4.0, 30.0]])).unwrap();
        assert_eq!(z.column(0), z.column(1));
    }

    #[test]
    fn apply_uses_training_parameters() {
        let s = Standardization::new(vec![0.0], vec![4.0]).unwrap();
        assert_eq!(apply_standardization(&[2.0], &s).unwrap(), vec![1.0]);
        let s = Standardization::new(vec![1.0, 1.0], vec![1.0, 4.0]).unwrap();
        assert_eq!(s.apply(&[3.0, 5.0]).unwrap(), vec![2.0, 2.0]);
        assert_eq!(s.apply(&[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(
            s.apply(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}

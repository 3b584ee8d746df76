use alloc::vec::Vec;

use super::eigen::{symmetric_eigen, SymmetricEigen};
use super::quantile::{f_quantile, normal_quantile};
use crate::ingest::{standardize, SensorDataset, Standardization};
use crate::{Error, Matrix, Result};

/// Eigenvalues in `(-NEGATIVE_CLAMP, 0)` are rounding noise and become 0.
pub const NEGATIVE_CLAMP: f64 = 1e-9;

/// Eigenpairs of the sample correlation matrix `C = X'X / (m - 1)` of a
/// standardized matrix, sorted by descending eigenvalue.
pub fn fit_pca(standardized: &Matrix) -> Result<SymmetricEigen> {
    let (m, n) = (standardized.rows(), standardized.cols());
    if m <= n {
        return Err(Error::NotEnoughSamples { samples: m, nodes: n });
    }
    let mut c = standardized.transpose().matmul(standardized)?;
    let denom = (m - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] /= denom;
        }
    }
    let mut eig = symmetric_eigen(&c)?;
    for v in &mut eig.values {
        if *v < 0.0 {
            if *v > -NEGATIVE_CLAMP {
                *v = 0.0;
            } else {
                return Err(Error::NegativeEigenvalue(*v));
            }
        }
    }
    Ok(eig)
}

/// Smallest `k` whose cumulative contribution rate reaches `ratio`.
pub fn select_k(eigenvalues: &[f64], ratio: f64) -> Result<usize> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidRatio(ratio));
    }
    let total: f64 = eigenvalues.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroSpectrum);
    }
    let mut acc = 0.0;
    for (i, v) in eigenvalues.iter().enumerate() {
        acc += v;
        if acc / total >= ratio - 1e-12 {
            return Ok(i + 1);
        }
    }
    Ok(eigenvalues.len())
}

/// Control limit for the Q statistic at test level `alpha`:
///
/// `Q_a = t1 |C_a sqrt(2 t2 h0^2) / t1 + t2 h0 (h0 - 1) / t1^2 + 1|^(1/h0)`
/// with `t_i = sum_{j>k} lambda_j^i` and `h0 = 1 - 2 t1 t3 / (3 t2^2)`.
///
/// Returns `+inf` (Q test disabled) when nothing is discarded or every
/// discarded eigenvalue is zero.
pub fn q_threshold(eigenvalues: &[f64], k: usize, alpha: f64) -> Result<f64> {
    let c_alpha = normal_quantile(alpha)?;
    if k == 0 || k > eigenvalues.len() {
        return Err(Error::InvalidComponentCount {
            k,
            n: eigenvalues.len(),
        });
    }
    let discarded = &eigenvalues[k..];
    let theta = |p: i32| discarded.iter().map(|l| libm::pow(*l, p as f64)).sum::<f64>();
    let (t1, t2, t3) = (theta(1), theta(2), theta(3));
    if !(t1 > 0.0) || !(t2 > 0.0) {
        return Ok(f64::INFINITY);
    }
    let h0 = 1.0 - 2.0 * t1 * t3 / (3.0 * t2 * t2);
    if h0 == 0.0 {
        return Err(Error::DegenerateQThreshold);
    }
    let bracket = c_alpha * libm::sqrt(2.0 * t2 * h0 * h0) / t1 + t2 * h0 * (h0 - 1.0) / (t1 * t1) + 1.0;
    Ok(t1 * libm::pow(bracket.abs(), 1.0 / h0))
}

/// Control limit for T²: `k (m - 1) / (m - k) * F(k, m - 1; alpha)`.
pub fn t2_threshold(k: usize, m: usize, alpha: f64) -> Result<f64> {
    if k == 0 || m <= k {
        return Err(Error::InvalidComponentCount { k, n: m });
    }
    let (kf, mf) = (k as f64, m as f64);
    Ok(kf * (mf - 1.0) / (mf - kf) * f_quantile(kf, mf - 1.0, alpha)?)
}

/// Fitted principal-statistic model: training standardization, spectrum,
/// retained component count and the two control limits at `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    standardization: Standardization,
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
    k: usize,
    training_rows: usize,
    alpha: f64,
    q_limit: f64,
    t2_limit: f64,
}

impl PcaModel {
    /// Standardizes the training data, diagonalizes its correlation matrix,
    /// picks `k` by cumulative contribution `ratio` and computes both limits.
    pub fn fit(train: &SensorDataset, ratio: f64, alpha: f64) -> Result<Self> {
        let (z, standardization) = standardize(train)?;
        let eig = fit_pca(&z)?;
        let k = select_k(&eig.values, ratio)?;
        let q_limit = q_threshold(&eig.values, k, alpha)?;
        let t2_limit = t2_threshold(k, train.rows(), alpha)?;
        Ok(Self {
            standardization,
            eigenvalues: eig.values,
            eigenvectors: eig.vectors,
            k,
            training_rows: train.rows(),
            alpha,
            q_limit,
            t2_limit,
        })
    }

    /// Reassembles a stored model; limits are recomputed from the spectrum.
    pub fn from_parts(
        standardization: Standardization,
        eigenvalues: Vec<f64>,
        eigenvectors: Matrix,
        k: usize,
        training_rows: usize,
        alpha: f64,
    ) -> Result<Self> {
        let n = standardization.nodes();
        if eigenvalues.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: eigenvalues.len(),
            });
        }
        if eigenvectors.rows() != n || eigenvectors.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: eigenvectors.rows() * eigenvectors.cols(),
            });
        }
        if k == 0 || k > n {
            return Err(Error::InvalidComponentCount { k, n });
        }
        if let Some(i) = (0..k).find(|&i| !(eigenvalues[i] > 0.0)) {
            return Err(Error::NonPositiveEigenvalue {
                index: i,
                value: eigenvalues[i],
            });
        }
        let q_limit = q_threshold(&eigenvalues, k, alpha)?;
        let t2_limit = t2_threshold(k, training_rows, alpha)?;
        Ok(Self {
            standardization,
            eigenvalues,
            eigenvectors,
            k,
            training_rows,
            alpha,
            q_limit,
            t2_limit,
        })
    }

    pub fn standardization(&self) -> &Standardization {
        &self.standardization
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nodes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn training_rows(&self) -> usize {
        self.training_rows
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn q_limit(&self) -> f64 {
        self.q_limit
    }

    pub fn t2_limit(&self) -> f64 {
        self.t2_limit
    }

    /// `(Q_alpha, T²_alpha)` at another test level, e.g. the alarm boundary.
    pub fn limits_at(&self, alpha: f64) -> Result<(f64, f64)> {
        Ok((
            q_threshold(&self.eigenvalues, self.k, alpha)?,
            t2_threshold(self.k, self.training_rows, alpha)?,
        ))
    }

    /// Same model with limits at a different `alpha`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let (q_limit, t2_limit) = self.limits_at(alpha)?;
        Ok(Self {
            alpha,
            q_limit,
            t2_limit,
            ..self.clone()
        })
    }

    /// The same model with a forced component count (limits recomputed).
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::from_parts(
            self.standardization.clone(),
            self.eigenvalues.clone(),
            self.eigenvectors.clone(),
            k,
            self.training_rows,
            self.alpha,
        )
    }

    fn scores(&self, xbar: &[f64]) -> Result<Vec<f64>> {
        let n = self.nodes();
        if xbar.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: xbar.len(),
            });
        }
        Ok((0..self.k)
            .map(|c| (0..n).map(|j| self.eigenvectors[(j, c)] * xbar[j]).sum())
            .collect())
    }
}

/// Squared prediction error `Q = ||(I - P_k P_k') x||²` of a standardized row.
pub fn q_statistic(xbar: &[f64], model: &PcaModel) -> Result<f64> {
    let scores = model.scores(xbar)?;
    let p = model.eigenvectors();
    Ok(xbar
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let reconstructed: f64 = scores.iter().enumerate().map(|(c, s)| p[(j, c)] * s).sum();
            (x - reconstructed) * (x - reconstructed)
        })
        .sum())
}

/// Hotelling `T² = x P_k L_k^{-1} P_k' x'` of a standardized row.
pub fn t2_statistic(xbar: &[f64], model: &PcaModel) -> Result<f64> {
    let scores = model.scores(xbar)?;
    let mut t2 = 0.0;
    for (i, s) in scores.iter().enumerate() {
        let lambda = model.eigenvalues()[i];
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveEigenvalue { index: i, value: lambda });
        }
        t2 += s * s / lambda;
    }
    Ok(t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn model_with(eigenvalues: Vec<f64>, vectors: Matrix, k: usize) -> PcaModel {
        let n = eigenvalues.len();
        let std = Standardization::new(vec![0.0; n], vec![1.0; n]).unwrap();
        PcaModel::from_parts(std, eigenvalues, vectors, k, 100, 0.05).unwrap()
    }

    #[test]
    fn identical_columns_give_rank_one_spectrum() {
        let z = Matrix::from_rows(&[[-1.0, -1.0], [0.0, 0.0], [1.0, 1.0]]).unwrap();
        let e = fit_pca(&z).unwrap();
        assert!((e.values[0] - 2.0).abs() < 1e-12);
        assert!(e.values[1].abs() < 1e-12);
    }

    #[test]
    fn fit_needs_more_rows_than_nodes() {
        let z = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(fit_pca(&z).unwrap_err(), Error::NotEnoughSamples { samples: 2, nodes: 2 });
    }

    #[test]
    fn select_k_examples() {
        assert_eq!(select_k(&[3.0, 0.0, 0.0], 0.85).unwrap(), 1);
        assert_eq!(select_k(&[1.0, 1.0, 1.0, 1.0], 0.75).unwrap(), 3);
        assert_eq!(select_k(&[2.5, 0.4, 0.1], 0.85).unwrap(), 2);
        assert_eq!(select_k(&[0.0, 0.0], 0.85).unwrap_err(), Error::ZeroSpectrum);
        assert_eq!(select_k(&[1.0], 0.0).unwrap_err(), Error::InvalidRatio(0.0));
    }

    #[test]
    fn q_and_t2_on_axis_model() {
        let m = model_with(vec![4.0, 1.0], Matrix::identity(2), 1);
        assert_eq!(q_statistic(&[3.0, 4.0], &m).unwrap(), 16.0);
        assert_eq!(t2_statistic(&[2.0, 9.0], &m).unwrap(), 1.0);
        assert_eq!(t2_statistic(&[0.0, 0.0], &m).unwrap(), 0.0);
        assert_eq!(t2_statistic(&[0.0, 5.0], &m).unwrap(), 0.0);
        assert_eq!(q_statistic(&[7.0, 0.0], &m).unwrap(), 0.0);
        assert!(matches!(q_statistic(&[1.0], &m), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn q_threshold_flat_discarded_spectrum() {
        // theta = [2, 2, 2], h0 = 1/3
        let q = q_threshold(&[5.0, 1.0, 1.0], 1, 0.05).unwrap();
        assert!((q - 5.936_869_945_730_966).abs() < 1e-6, "{q}");
    }

    #[test]
    fn q_threshold_disabled_without_residual() {
        assert_eq!(q_threshold(&[2.0, 1.0], 2, 0.05).unwrap(), f64::INFINITY);
        assert_eq!(q_threshold(&[2.0, 0.0], 1, 0.05).unwrap(), f64::INFINITY);
    }

    #[test]
    fn t2_threshold_decomposes() {
        let t = t2_threshold(3, 50, 0.05).unwrap();
        let f = f_quantile(3.0, 49.0, 0.05).unwrap();
        assert!((t - 3.0 * 49.0 / 47.0 * f).abs() < 1e-12);
        assert!(t2_threshold(5, 5, 0.05).is_err());
    }

    #[test]
    fn limits_move_with_alpha() {
        let m = model_with(vec![3.0, 1.0, 0.5, 0.25], Matrix::identity(4), 2);
        let (q1, t1) = m.limits_at(0.01).unwrap();
        let (q5, t5) = (m.q_limit(), m.t2_limit());
        assert!(q1 > q5 && t1 > t5);
        assert_eq!(m.with_alpha(0.01).unwrap().q_limit(), q1);
    }
}

//! Principal-statistic monitoring: PCA, the Q (SPE) and T² statistics and
//! their analytic control limits.

mod eigen;
mod pca;
mod quantile;

pub use eigen::{symmetric_eigen, SymmetricEigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use pca::{fit_pca, q_statistic, q_threshold, select_k, t2_statistic, t2_threshold, PcaModel, NEGATIVE_CLAMP};
pub use quantile::{f_cdf, f_quantile, normal_cdf, normal_quantile, reg_inc_beta, reg_lower_gamma};

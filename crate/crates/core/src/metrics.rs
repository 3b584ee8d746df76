//! Detection and recovery scores.

use alloc::collections::BTreeSet;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub counts: ConfusionCounts,
}

/// Precision `TP/(TP+FP)` and recall `TP/(TP+FN)`.
///
/// An empty denominator yields 1.0 if the truth set is empty too (nothing to
/// find, nothing wrongly found) and 0.0 otherwise.
pub fn precision_recall<T: Ord>(
    truth: &BTreeSet<T>,
    predicted: &BTreeSet<T>,
    universe: &BTreeSet<T>,
) -> Result<PrecisionRecall> {
    if !truth.is_subset(universe) || !predicted.is_subset(universe) {
        return Err(Error::NotSubset);
    }
    let tp = truth.intersection(predicted).count();
    let fp = predicted.len() - tp;
    let fn_ = truth.len() - tp;
    let tn = universe.len() - tp - fp - fn_;
    let counts = ConfusionCounts { tp, fp, fn_, tn };
    let ratio = |num: usize, den: usize| {
        if den > 0 {
            num as f64 / den as f64
        } else if truth.is_empty() {
            1.0
        } else {
            0.0
        }
    };
    Ok(PrecisionRecall {
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        counts,
    })
}

/// Root-mean-square error between paired readings.
pub fn rmse(actual: &[f64], estimated: &[f64]) -> Result<f64> {
    if actual.len() != estimated.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: estimated.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sq: f64 = actual.iter().zip(estimated).map(|(a, e)| (a - e) * (a - e)).sum();
    Ok(libm::sqrt(sq / actual.len() as f64))
}

/// Arithmetic mean of per-node RMSE values.
pub fn mean_rmse(per_node: &[f64]) -> Result<f64> {
    if per_node.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(per_node.iter().sum::<f64>() / per_node.len() as f64)
}

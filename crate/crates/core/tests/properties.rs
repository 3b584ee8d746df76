use std::collections::BTreeSet;

use proptest::prelude::*;
use senseprep_core::bayesnet::{count_states, family_log_likelihood, learn_static, Lag};
use senseprep_core::ingest::{standardize, SensorDataset, StateMatrix};
use senseprep_core::metrics::{precision_recall, rmse};
use senseprep_core::redundancy::{recover, ssdrda};
use senseprep_core::spectra::{fit_pca, q_statistic, symmetric_eigen, t2_statistic, PcaModel};
use senseprep_core::Matrix;

fn dataset(rows: usize, cols: usize) -> impl Strategy<Value = SensorDataset> {
    prop::collection::vec(-50.0..50.0f64, rows * cols).prop_filter_map("constant column", move |v| {
        SensorDataset::from_matrix(Matrix::from_row_major(rows, cols, v).ok()?)
            .ok()
            .filter(|d| standardize(d).is_ok())
    })
}

fn sized_dataset() -> impl Strategy<Value = SensorDataset> {
    (3usize..40, 1usize..6).prop_flat_map(|(extra, cols)| dataset(cols + extra, cols))
}

fn states(rows: usize, cols: usize, k: usize) -> impl Strategy<Value = StateMatrix> {
    prop::collection::vec(0..k, rows * cols).prop_map(move |d| StateMatrix::new(rows, cols, k, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standardized_columns_are_unit(data in sized_dataset()) {
        let (z, _) = standardize(&data).unwrap();
        for j in 0..z.cols() {
            let col = z.column(j);
            let m = col.len() as f64;
            let mean = col.iter().sum::<f64>() / m;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenpairs_reconstruct(data in sized_dataset()) {
        let (z, _) = standardize(&data).unwrap();
        let c = z.transpose().matmul(&z).unwrap();
        let m = (z.rows() - 1) as f64;
        let n = c.rows();
        let c = Matrix::from_row_major(n, n, c.as_slice().iter().map(|x| x / m).collect()).unwrap();
        let eig = symmetric_eigen(&c).unwrap();
        let trace: f64 = (0..n).map(|i| c[(i, i)]).sum();
        prop_assert!((eig.values.iter().sum::<f64>() - trace).abs() < 1e-9);
        for i in 0..n {
            let p = eig.vectors.column(i);
            let cp = c.mul_vec(&p).unwrap();
            for r in 0..n {
                prop_assert!((cp[r] - eig.values[i] * p[r]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn statistics_are_nonnegative(data in (3usize..30).prop_flat_map(|e| dataset(4 + e, 4)), row in prop::collection::vec(-60.0..60.0f64, 4)) {
        let Ok(model) = PcaModel::fit(&data, 0.85, 0.05) else { return Ok(()) };
        let x = model.standardization().apply(&row).unwrap();
        prop_assert!(q_statistic(&x, &model).unwrap() >= 0.0);
        prop_assert!(t2_statistic(&x, &model).unwrap() >= 0.0);
        let full = model.with_k(4).unwrap();
        prop_assert!(q_statistic(&x, &full).unwrap() < 1e-10 * (1.0 + x.iter().map(|v| v * v).sum::<f64>()));
    }

    #[test]
    fn projector_is_idempotent(data in (3usize..30).prop_flat_map(|e| dataset(5 + e, 5)), k in 1usize..5) {
        let (z, _) = standardize(&data).unwrap();
        let Ok(eig) = fit_pca(&z) else { return Ok(()) };
        let n = eig.vectors.rows();
        let mut pi = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                pi[(i, j)] = (0..k).map(|c| eig.vectors[(i, c)] * eig.vectors[(j, c)]).sum();
            }
        }
        let pp = pi.matmul(&pi).unwrap();
        prop_assert!(pp.max_abs_diff(&pi) < 1e-10);
    }

    #[test]
    fn extra_parent_never_lowers_likelihood(s in states(60, 3, 3)) {
        let one = std::slice::from_ref(&s);
        let without = family_log_likelihood(&count_states(one, 0, &[1], Lag::Same).unwrap());
        let with = family_log_likelihood(&count_states(one, 0, &[1, 2], Lag::Same).unwrap());
        prop_assert!(with >= without - 1e-9);
    }

    #[test]
    fn redundant_set_shrinks_with_tau(s in states(80, 4, 3)) {
        let net = learn_static(&[s], 3).unwrap();
        let mut prev: Option<BTreeSet<usize>> = None;
        for tau in [0.5, 0.8, 0.9, 0.95, 0.99, 1.0] {
            let set: BTreeSet<usize> = ssdrda(&net, tau).unwrap().redundant_nodes().collect();
            if let Some(p) = &prev {
                prop_assert!(set.is_subset(p));
            }
            prev = Some(set);
        }
    }

    #[test]
    fn recovery_is_convex(pairs in prop::collection::vec((-100.0..100.0f64, 0.01..10.0f64), 1..6)) {
        let (v, d): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let r = recover(&v, &d).unwrap();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(r >= lo - 1e-9 && r <= hi + 1e-9);
    }

    #[test]
    fn rmse_ignores_joint_order(pairs in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..30), shift in 0usize..30) {
        let (a, e): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let mut rotated = pairs.clone();
        rotated.rotate_left(shift % pairs.len());
        let (ra, re): (Vec<f64>, Vec<f64>) = rotated.into_iter().unzip();
        let x = rmse(&a, &e).unwrap();
        prop_assert!(x >= 0.0);
        prop_assert!((x - rmse(&ra, &re).unwrap()).abs() < 1e-12);
        prop_assert_eq!(rmse(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn precision_recall_bounded(truth in prop::collection::btree_set(0usize..50, 0..20), pred in prop::collection::btree_set(0usize..50, 0..20)) {
        let universe: BTreeSet<usize> = (0..50).collect();
        let pr = precision_recall(&truth, &pred, &universe).unwrap();
        prop_assert!((0.0..=1.0).contains(&pr.precision) && (0.0..=1.0).contains(&pr.recall));
        prop_assert_eq!(pr.counts.total(), 50);
    }
}

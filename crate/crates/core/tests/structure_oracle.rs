//! Greedy search compared with exhaustive enumeration of all 25 DAGs on three
//! nodes, scored by a separate BIC implementation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use senseprep_core::bayesnet::{k2_search, Lag};
use senseprep_core::ingest::StateMatrix;

fn bic(columns: &[Vec<usize>], parents: &[Vec<usize>], k: usize) -> f64 {
    let m = columns[0].len();
    let mut total = 0.0;
    for (node, pa) in parents.iter().enumerate() {
        let mut joint: HashMap<(Vec<usize>, usize), f64> = HashMap::new();
        let mut marg: HashMap<Vec<usize>, f64> = HashMap::new();
        for t in 0..m {
            let cfg: Vec<usize> = pa.iter().map(|&p| columns[p][t]).collect();
            *joint.entry((cfg.clone(), columns[node][t])).or_default() += 1.0;
            *marg.entry(cfg).or_default() += 1.0;
        }
        for ((cfg, _), n) in &joint {
            total += n * (n / marg[cfg]).ln();
        }
        let params = k.pow(pa.len() as u32) * (k - 1);
        total -= 0.5 * params as f64 * (m as f64).ln();
    }
    total
}

fn acyclic(parents: &[Vec<usize>]) -> bool {
    // three nodes: a cycle must pass through every node or be a 2-cycle
    let edge = |a: usize, b: usize| parents[b].contains(&a);
    for a in 0..3 {
        for b in 0..3 {
            if a != b && edge(a, b) && edge(b, a) {
                return false;
            }
        }
    }
    !(edge(0, 1) && edge(1, 2) && edge(2, 0)) && !(edge(0, 2) && edge(2, 1) && edge(1, 0))
}

fn all_dags() -> Vec<Vec<Vec<usize>>> {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut out = Vec::new();
    for code in 0..27 {
        let mut parents = vec![Vec::new(); 3];
        let mut c = code;
        for &(a, b) in &pairs {
            match c % 3 {
                1 => parents[b].push(a),
                2 => parents[a].push(b),
                _ => {}
            }
            c /= 3;
        }
        if acyclic(&parents) {
            out.push(parents);
        }
    }
    out
}

fn skeleton(parents: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut s: Vec<(usize, usize)> = parents
        .iter()
        .enumerate()
        .flat_map(|(c, pa)| pa.iter().map(move |&p| (p.min(c), p.max(c))))
        .collect();
    s.sort_unstable();
    s
}

fn noisy_copy(rng: &mut ChaCha8Rng, src: &[usize], k: usize, flip: f64) -> Vec<usize> {
    src.iter()
        .map(|&s| {
            if rng.random_bool(flip) {
                (s + rng.random_range(1..k)) % k
            } else {
                s
            }
        })
        .collect()
}

fn best_oracle(columns: &[Vec<usize>], k: usize) -> (f64, Vec<Vec<usize>>) {
    let dags = all_dags();
    assert_eq!(dags.len(), 25);
    dags.into_iter()
        .map(|d| (bic(columns, &d, k), d))
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap()
}

fn search(columns: &[Vec<usize>], k: usize, max_parents: usize) -> Vec<Vec<usize>> {
    let s = StateMatrix::from_columns(columns, k).unwrap();
    let dag = k2_search(&[s], max_parents, Lag::Same).unwrap();
    assert!(dag.is_acyclic());
    dag.parent_sets().to_vec()
}

#[test]
fn noisy_chain_matches_exhaustive() {
    let k = 3;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x1: Vec<usize> = (0..5000).map(|_| rng.random_range(0..k)).collect();
        let x2 = noisy_copy(&mut rng, &x1, k, 0.05);
        let x3 = noisy_copy(&mut rng, &x2, k, 0.05);
        let cols = vec![x1, x2, x3];
        let (best, oracle) = best_oracle(&cols, k);
        let got = search(&cols, k, 1);
        assert_eq!(skeleton(&got), vec![(0, 1), (1, 2)], "seed {seed}");
        assert_eq!(skeleton(&got), skeleton(&oracle), "seed {seed}");
        let score = bic(&cols, &got, k);
        assert!((score - best).abs() < 1e-9 * best.abs(), "seed {seed}: {score} vs {best}");
    }
}

#[test]
fn independent_columns_give_empty_graph() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let cols: Vec<Vec<usize>> = (0..5).map(|_| (0..5000).map(|_| rng.random_range(0..3)).collect()).collect();
        let got = search(&cols, 3, 3);
        assert!(got.iter().all(Vec::is_empty), "seed {seed}: {got:?}");
    }
}

/// Samples `rows` rows from a random network on the given DAG.
fn sample_network(rng: &mut ChaCha8Rng, parents: &[Vec<usize>], k: usize, rows: usize) -> Vec<Vec<usize>> {
    let tables: Vec<Vec<Vec<f64>>> = parents
        .iter()
        .map(|pa| {
            (0..k.pow(pa.len() as u32))
                .map(|_| {
                    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|x| x / s).collect()
                })
                .collect()
        })
        .collect();
    let mut order = Vec::new();
    while order.len() < parents.len() {
        for i in 0..parents.len() {
            if !order.contains(&i) && parents[i].iter().all(|p| order.contains(p)) {
                order.push(i);
            }
        }
    }
    let mut cols = vec![vec![0; rows]; parents.len()];
    for t in 0..rows {
        for &i in &order {
            let h = parents[i].iter().fold(0, |acc, &p| acc * k + cols[p][t]);
            let u: f64 = rng.random_range(0.0..1.0);
            let mut acc = 0.0;
            let mut state = k - 1;
            for (c, p) in tables[i][h].iter().enumerate() {
                acc += p;
                if u < acc {
                    state = c;
                    break;
                }
            }
            cols[i][t] = state;
        }
    }
    cols
}

#[test]
fn greedy_usually_reaches_the_optimum() {
    let k = 2;
    let dags = all_dags();
    let mut hits = 0;
    let mut misses = Vec::new();
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let truth = &dags[rng.random_range(0..dags.len())];
        let cols = sample_network(&mut rng, truth, k, 400);
        let (best, _) = best_oracle(&cols, k);
        let got = search(&cols, k, 2);
        let score = bic(&cols, &got, k);
        assert!(score <= best + 1e-9 * best.abs());
        if (score - best).abs() <= 1e-9 * best.abs() {
            hits += 1;
        } else {
            misses.push(format!("seed {seed}: truth {truth:?} got {got:?} gap {:.3}", best - score));
        }
    }
    assert!(hits >= 90, "{hits}/100 optimal\n{}", misses.join("\n"));
}

/// One-parent-at-a-time search cannot see a parity child: each parent alone
/// is uninformative. Documented limitation, asserted so it stays visible.
#[test]
fn parity_child_is_a_known_blind_spot() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a: Vec<usize> = (0..2000).map(|_| rng.random_range(0..2)).collect();
    let b: Vec<usize> = (0..2000).map(|_| rng.random_range(0..2)).collect();
    let c: Vec<usize> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
    let cols = vec![a, b, c];
    let (best, _) = best_oracle(&cols, 2);
    let got = search(&cols, 2, 2);
    assert!(got.iter().all(Vec::is_empty));
    assert!(bic(&cols, &got, 2) < best);
}

//! Scoring, greedy structure search and cycle repair.

use alloc::vec::Vec;

use super::dag::Dag;
use super::table::{count_states, family_bic, family_log_likelihood, sequence_shape, Lag};
use crate::ingest::StateMatrix;
use crate::Result;

/// Default cap on parent-set size.
pub const DEFAULT_MAX_PARENTS: usize = 3;

/// `a` beats `b` by more than floating-point noise.
fn improves(a: f64, b: f64) -> bool {
    a > b + 1e-9 * (1.0 + b.abs())
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Unpenalized log likelihood `sum N log theta` of the whole network.
pub fn score(seqs: &[StateMatrix], dag: &Dag, lag: Lag) -> Result<f64> {
    (0..dag.nodes()).try_fold(0.0, |acc, i| {
        Ok(acc + family_log_likelihood(&count_states(seqs, i, dag.parents(i), lag)?))
    })
}

/// Per-family BIC score of one node with the given parents.
pub fn family_score(seqs: &[StateMatrix], node: usize, parents: &[usize], lag: Lag) -> Result<f64> {
    Ok(family_bic(&count_states(seqs, node, parents, lag)?))
}

/// BIC-penalized score of the whole network; the quantity search maximizes.
pub fn penalized_score(seqs: &[StateMatrix], dag: &Dag, lag: Lag) -> Result<f64> {
    (0..dag.nodes()).try_fold(0.0, |acc, i| Ok(acc + family_score(seqs, i, dag.parents(i), lag)?))
}

/// Greedy per-node parent selection without a node ordering.
///
/// Each node starts with no parents and repeatedly takes the single candidate
/// (any other node) that raises its penalized family score the most, until
/// nothing helps or `max_parents` is reached. Equal gains go to the lowest
/// index. Same-slice results are passed through [`repair_cycles`].
pub fn k2_search(seqs: &[StateMatrix], max_parents: usize, lag: Lag) -> Result<Dag> {
    let (n, _) = sequence_shape(seqs)?;
    let mut parents = Vec::with_capacity(n);
    for node in 0..n {
        let mut chosen: Vec<usize> = Vec::new();
        let mut current = family_score(seqs, node, &chosen, lag)?;
        while chosen.len() < max_parents {
            let mut best: Option<(usize, f64)> = None;
            for cand in 0..n {
                if cand == node || chosen.contains(&cand) {
                    continue;
                }
                chosen.push(cand);
                let s = family_score(seqs, node, &chosen, lag)?;
                chosen.pop();
                if improves(s, best.map_or(current, |(_, b)| b)) {
                    best = Some((cand, s));
                }
            }
            match best {
                Some((cand, s)) => {
                    chosen.push(cand);
                    current = s;
                }
                None => break,
            }
        }
        parents.push(chosen);
    }
    let dag = Dag::from_parents(parents)?;
    match lag {
        Lag::Same => repair_cycles(&dag, seqs),
        Lag::Previous => Ok(dag),
    }
}

/// Breaks cycles by deleting, one cycle at a time, the edge whose removal
/// costs the least penalized score. Ties go to the smallest `(child, parent)`.
pub fn repair_cycles(dag: &Dag, seqs: &[StateMatrix]) -> Result<Dag> {
    let mut dag = dag.clone();
    while let Some(cycle) = dag.find_cycle() {
        let mut pick: Option<(f64, usize, usize)> = None;
        for (parent, child) in cycle {
            let with = family_score(seqs, child, dag.parents(child), Lag::Same)?;
            let without: Vec<usize> = dag.parents(child).iter().copied().filter(|p| *p != parent).collect();
            let loss = with - family_score(seqs, child, &without, Lag::Same)?;
            let better = match pick {
                None => true,
                Some((l, c, p)) => {
                    if near(loss, l) {
                        (child, parent) < (c, p)
                    } else {
                        loss < l
                    }
                }
            };
            if better {
                pick = Some((loss, child, parent));
            }
        }
        if let Some((_, child, parent)) = pick {
            dag.remove_edge(parent, child);
        }
    }
    Ok(dag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn seq(columns: &[&[usize]], k: usize) -> StateMatrix {
        StateMatrix::from_columns(columns, k).unwrap()
    }

    #[test]
    fn zero_parents_gives_empty_graph() {
        let a: &[usize] = &[0, 1, 0, 1, 1, 0];
        let s = seq(&[a, a], 2);
        let dag = k2_search(&[s], 0, Lag::Same).unwrap();
        assert_eq!(dag.edge_count(), 0);
    }

    #[test]
    fn copies_are_linked_without_cycles() {
        let a: Vec<usize> = (0..200).map(|i| (i * 7 + i / 3) % 3).collect();
        let s = seq(&[&a, &a], 3);
        let dag = k2_search(core::slice::from_ref(&s), 3, Lag::Same).unwrap();
        assert!(dag.is_acyclic());
        assert_eq!(dag.edge_count(), 1);
        let empty = Dag::empty(2);
        assert!(penalized_score(&[s.clone()], &dag, Lag::Same).unwrap() > penalized_score(&[s], &empty, Lag::Same).unwrap());
    }

    #[test]
    fn acyclic_input_unchanged() {
        let a: &[usize] = &[0, 1, 0, 1];
        let s = seq(&[a, a, a], 2);
        let dag = Dag::from_parents(vec![vec![], vec![0], vec![1]]).unwrap();
        assert_eq!(repair_cycles(&dag, &[s]).unwrap(), dag);
    }

    #[test]
    fn two_cycle_drops_cheaper_edge() {
        // b is a noisy function of a with 3 states; a given b is less certain
        let a: Vec<usize> = (0..300).map(|i| i % 3).collect();
        let b: Vec<usize> = a.iter().map(|&x| if x == 2 { 1 } else { x }).collect();
        let s = seq(&[&a, &b], 3);
        let dag = Dag::from_parents(vec![vec![1], vec![0]]).unwrap();
        let fixed = repair_cycles(&dag, &[s]).unwrap();
        assert!(fixed.is_acyclic());
        assert_eq!(fixed.edge_count(), 1);
    }

    #[test]
    fn three_cycle_loses_one_edge() {
        let a: Vec<usize> = (0..120).map(|i| i % 2).collect();
        let s = seq(&[&a, &a, &a], 2);
        let dag = Dag::from_parents(vec![vec![2], vec![0], vec![1]]).unwrap();
        let fixed = repair_cycles(&dag, &[s]).unwrap();
        assert!(fixed.is_acyclic());
        assert_eq!(fixed.edge_count(), 2);
        // symmetric losses: smallest (child, parent) = (0, 2) goes
        assert!(!fixed.has_edge(2, 0));
    }

    #[test]
    fn score_is_sum_of_families() {
        let a: &[usize] = &[0, 1, 1, 0, 1, 0, 0];
        let b: &[usize] = &[1, 1, 0, 0, 1, 0, 1];
        let s = seq(&[a, b], 2);
        let one = core::slice::from_ref(&s);
        let dag = Dag::from_parents(vec![vec![], vec![0]]).unwrap();
        let total = score(one, &dag, Lag::Same).unwrap();
        let f0 = family_log_likelihood(&count_states(one, 0, &[], Lag::Same).unwrap());
        let f1 = family_log_likelihood(&count_states(one, 1, &[0], Lag::Same).unwrap());
        assert!((total - f0 - f1).abs() < 1e-12);
    }
}

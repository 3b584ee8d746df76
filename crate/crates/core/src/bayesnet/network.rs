use alloc::vec;
use alloc::vec::Vec;

use super::dag::Dag;
use super::search::k2_search;
use super::table::{count_states, sequence_shape, Cpt, Lag};
use crate::ingest::StateMatrix;
use crate::{Error, Result};

fn check_cpts(dag: &Dag, cpts: &[Cpt], states: usize) -> Result<()> {
    if cpts.len() != dag.nodes() {
        return Err(Error::DimensionMismatch {
            expected: dag.nodes(),
            found: cpts.len(),
        });
    }
    for (i, cpt) in cpts.iter().enumerate() {
        if cpt.node() != i || cpt.parents() != dag.parents(i) || cpt.states() != states {
            return Err(Error::InvalidParameter("CPT does not match the graph"));
        }
    }
    Ok(())
}

fn fit_cpts(seqs: &[StateMatrix], dag: &Dag, lag: Lag) -> Result<Vec<Cpt>> {
    (0..dag.nodes())
        .map(|i| {
            let parents = dag.parents(i).to_vec();
            let counts = count_states(seqs, i, &parents, lag)?;
            Ok(Cpt::estimate(i, parents, counts))
        })
        .collect()
}

/// Static (single-slice) Bayesian network.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    dag: Dag,
    cpts: Vec<Cpt>,
    states: usize,
}

impl BayesianNetwork {
    pub fn from_parts(dag: Dag, cpts: Vec<Cpt>, states: usize) -> Result<Self> {
        if !dag.is_acyclic() {
            return Err(Error::InvalidParameter("static network graph has a cycle"));
        }
        check_cpts(&dag, &cpts, states)?;
        Ok(Self { dag, cpts, states })
    }

    /// Fits CPTs for a given structure.
    pub fn fit(seqs: &[StateMatrix], dag: Dag) -> Result<Self> {
        let (_, states) = sequence_shape(seqs)?;
        let cpts = fit_cpts(seqs, &dag, Lag::Same)?;
        Self::from_parts(dag, cpts, states)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, node: usize) -> &Cpt {
        &self.cpts[node]
    }

    pub fn nodes(&self) -> usize {
        self.dag.nodes()
    }

    pub fn states(&self) -> usize {
        self.states
    }
}

/// Structure search plus CPT estimation within a slice.
pub fn learn_static(seqs: &[StateMatrix], max_parents: usize) -> Result<BayesianNetwork> {
    let dag = k2_search(seqs, max_parents, Lag::Same)?;
    BayesianNetwork::fit(seqs, dag)
}

/// Two-slice network: edges run from slice `t - 1` to slice `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionNetwork {
    dag: Dag,
    cpts: Vec<Cpt>,
    priors: Vec<Vec<f64>>,
    states: usize,
}

impl TransitionNetwork {
    pub fn from_parts(dag: Dag, cpts: Vec<Cpt>, priors: Vec<Vec<f64>>, states: usize) -> Result<Self> {
        check_cpts(&dag, &cpts, states)?;
        if priors.len() != dag.nodes() {
            return Err(Error::DimensionMismatch {
                expected: dag.nodes(),
                found: priors.len(),
            });
        }
        for p in &priors {
            if p.len() != states {
                return Err(Error::DimensionMismatch {
                    expected: states,
                    found: p.len(),
                });
            }
            let sum: f64 = p.iter().sum();
            if p.iter().any(|x| !(0.0..=1.0).contains(x)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter("priors must be probability vectors"));
            }
        }
        Ok(Self {
            dag,
            cpts,
            priors,
            states,
        })
    }

    /// Fits transition CPTs and single-slice priors for a given structure.
    pub fn fit(seqs: &[StateMatrix], dag: Dag) -> Result<Self> {
        let (n, states) = sequence_shape(seqs)?;
        let cpts = fit_cpts(seqs, &dag, Lag::Previous)?;
        let mut priors = vec![vec![0.0; states]; n];
        let rows: usize = seqs.iter().map(StateMatrix::rows).sum();
        for seq in seqs {
            for t in 0..seq.rows() {
                for (i, &s) in seq.row(t).iter().enumerate() {
                    priors[i][s] += 1.0;
                }
            }
        }
        for p in &mut priors {
            for x in p.iter_mut() {
                *x /= rows as f64;
            }
        }
        Self::from_parts(dag, cpts, priors, states)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, node: usize) -> &Cpt {
        &self.cpts[node]
    }

    pub fn priors(&self) -> &[Vec<f64>] {
        &self.priors
    }

    pub fn prior(&self, node: usize) -> &[f64] {
        &self.priors[node]
    }

    pub fn nodes(&self) -> usize {
        self.dag.nodes()
    }

    pub fn states(&self) -> usize {
        self.states
    }
}

/// Structure search over `t - 1 -> t` edges plus CPTs and priors.
pub fn learn_transition(seqs: &[StateMatrix], max_parents: usize) -> Result<TransitionNetwork> {
    if let Some(short) = seqs.iter().find(|s| s.rows() < 2) {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: short.rows(),
        });
    }
    let dag = k2_search(seqs, max_parents, Lag::Previous)?;
    TransitionNetwork::fit(seqs, dag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_are_frequencies() {
        let s = StateMatrix::from_columns(&[&[0, 0, 1, 1]], 2).unwrap();
        let tn = TransitionNetwork::fit(&[s], Dag::empty(1)).unwrap();
        assert_eq!(tn.prior(0), &[0.5, 0.5]);
    }

    #[test]
    fn lagged_copy_gives_identity_transition() {
        let parent: Vec<usize> = (0..300u64).map(|i| ((i * 2654435761) >> 7) as usize % 3).collect();
        let mut child = vec![0];
        child.extend_from_slice(&parent[..parent.len() - 1]);
        let s = StateMatrix::from_columns(&[&parent, &child], 3).unwrap();
        let tn = learn_transition(&[s], 3).unwrap();
        assert_eq!(tn.dag().parents(1), &[0]);
        let cpt = tn.cpt(1);
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(cpt.row(j)[k], if j == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn transition_needs_two_rows() {
        let s = StateMatrix::from_columns(&[&[0]], 2).unwrap();
        assert!(matches!(learn_transition(&[s], 1), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn rejects_mismatched_cpts() {
        let s = StateMatrix::from_columns(&[&[0, 1, 0], &[1, 0, 1]], 2).unwrap();
        let net = BayesianNetwork::fit(core::slice::from_ref(&s), Dag::empty(2)).unwrap();
        let other = Dag::from_parents(vec![vec![], vec![0]]).unwrap();
        assert!(BayesianNetwork::from_parts(other, net.cpts().to_vec(), 2).is_err());
    }
}

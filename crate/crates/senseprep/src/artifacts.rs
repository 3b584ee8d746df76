//! JSON documents for fitted models.
//!
//! Every document goes through `serde_json::Value`, whose object map is
//! ordered, so keys come out sorted and files are byte-stable. Non-finite
//! numbers (a disabled Q limit) are written as `null`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use senseprep_core::bayesnet::{BayesianNetwork, Counts, Cpt, Dag, TransitionNetwork};
use senseprep_core::ingest::{DiscretizationScheme, Standardization};
use senseprep_core::spectra::PcaModel;
use senseprep_core::Matrix;

use crate::io::{read_file, write_file};
use crate::Error;

pub const PCA_FILE: &str = "pca_model.json";
pub const STATIC_FILE: &str = "static_network.json";
pub const TRANSITION_FILE: &str = "transition_network.json";
pub const DISCRETIZATION_FILE: &str = "discretization.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Serializes with sorted keys and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, Error> {
    let mut out = serde_json::to_vec_pretty(&serde_json::to_value(value)?)?;
    out.push(b'\n');
    Ok(out)
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    write_file(path, &to_json(value)?)
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaDoc {
    pub node_ids: Vec<String>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// Row-major `n x n`; column `i` is the `i`-th principal direction.
    pub eigenvectors: Vec<f64>,
    pub k: usize,
    pub training_rows: usize,
    pub alpha: f64,
    /// `null` when the Q test is disabled (infinite limit).
    pub q_limit: Option<f64>,
    pub t2_limit: Option<f64>,
}

impl PcaDoc {
    pub fn new(model: &PcaModel, node_ids: &[String]) -> Self {
        Self {
            node_ids: node_ids.to_vec(),
            means: model.standardization().means().to_vec(),
            variances: model.standardization().variances().to_vec(),
            eigenvalues: model.eigenvalues().to_vec(),
            eigenvectors: model.eigenvectors().as_slice().to_vec(),
            k: model.k(),
            training_rows: model.training_rows(),
            alpha: model.alpha(),
            q_limit: finite(model.q_limit()),
            t2_limit: finite(model.t2_limit()),
        }
    }

    pub fn model(&self) -> Result<PcaModel, Error> {
        let n = self.node_ids.len();
        let std = Standardization::new(self.means.clone(), self.variances.clone())?;
        let vectors = Matrix::from_row_major(n, n, self.eigenvectors.clone())?;
        Ok(PcaModel::from_parts(
            std,
            self.eigenvalues.clone(),
            vectors,
            self.k,
            self.training_rows,
            self.alpha,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationDoc {
    pub node_ids: Vec<String>,
    pub states: usize,
    /// Interior bin edges per node; a value equal to an edge falls in the
    /// upper bin, values outside the training range clamp to the end bins.
    pub edges: Vec<Vec<f64>>,
}

impl DiscretizationDoc {
    pub fn new(scheme: &DiscretizationScheme, node_ids: &[String]) -> Self {
        Self {
            node_ids: node_ids.to_vec(),
            states: scheme.states(),
            edges: (0..scheme.nodes()).map(|j| scheme.edges(j).to_vec()).collect(),
        }
    }

    pub fn scheme(&self) -> Result<DiscretizationScheme, Error> {
        Ok(DiscretizationScheme::new(self.edges.clone(), self.states)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptDoc {
    pub node: usize,
    pub parents: Vec<usize>,
    /// Row-major, one row per parent configuration (first parent most
    /// significant), one column per state.
    pub table: Vec<f64>,
    pub counts: Vec<u64>,
}

impl CptDoc {
    fn new(cpt: &Cpt) -> Self {
        Self {
            node: cpt.node(),
            parents: cpt.parents().to_vec(),
            table: cpt.table().to_vec(),
            counts: cpt.counts().as_slice().to_vec(),
        }
    }

    fn cpt(&self, states: usize) -> Result<Cpt, Error> {
        let configs = self.counts.len() / states.max(1);
        let counts = Counts::from_rows(configs, states, self.counts.clone())?;
        Ok(Cpt::from_parts(self.node, self.parents.clone(), self.table.clone(), counts)?)
    }
}

fn parent_lists(dag: &Dag) -> Vec<Vec<usize>> {
    dag.parent_sets().to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticNetworkDoc {
    pub node_ids: Vec<String>,
    pub states: usize,
    pub parents: Vec<Vec<usize>>,
    pub cpts: Vec<CptDoc>,
    /// Unpenalized training log likelihood.
    pub log_likelihood: f64,
    /// BIC-penalized training score used by the search.
    pub penalized_score: f64,
}

impl StaticNetworkDoc {
    pub fn new(net: &BayesianNetwork, node_ids: &[String], log_likelihood: f64, penalized_score: f64) -> Self {
        Self {
            node_ids: node_ids.to_vec(),
            states: net.states(),
            parents: parent_lists(net.dag()),
            cpts: net.cpts().iter().map(CptDoc::new).collect(),
            log_likelihood,
            penalized_score,
        }
    }

    pub fn network(&self) -> Result<BayesianNetwork, Error> {
        let dag = Dag::from_parents(self.parents.clone())?;
        let cpts = self.cpts.iter().map(|c| c.cpt(self.states)).collect::<Result<_, _>>()?;
        Ok(BayesianNetwork::from_parts(dag, cpts, self.states)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionNetworkDoc {
    pub node_ids: Vec<String>,
    pub states: usize,
    /// `parents[i]` are read at `t - 1`, node `i` at `t`.
    pub parents: Vec<Vec<usize>>,
    pub cpts: Vec<CptDoc>,
    pub priors: Vec<Vec<f64>>,
}

impl TransitionNetworkDoc {
    pub fn new(tn: &TransitionNetwork, node_ids: &[String]) -> Self {
        Self {
            node_ids: node_ids.to_vec(),
            states: tn.states(),
            parents: parent_lists(tn.dag()),
            cpts: tn.cpts().iter().map(CptDoc::new).collect(),
            priors: tn.priors().to_vec(),
        }
    }

    pub fn network(&self) -> Result<TransitionNetwork, Error> {
        let dag = Dag::from_parents(self.parents.clone())?;
        let cpts = self.cpts.iter().map(|c| c.cpt(self.states)).collect::<Result<_, _>>()?;
        Ok(TransitionNetwork::from_parts(dag, cpts, self.priors.clone(), self.states)?)
    }
}

/// Ties the artifacts of one `learn` run together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub node_ids: Vec<String>,
    pub training_rows: usize,
    /// Raw last training row; predecessor of the first test row.
    pub last_training_row: Vec<f64>,
    pub contribution_ratio: f64,
    pub alpha_warning: f64,
    pub alpha_alarm: f64,
    pub states: usize,
    pub max_parents: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use senseprep_core::ingest::synth::{synth_generate, SynthProfile};

    #[test]
    fn keys_are_sorted_and_infinity_is_null() {
        let doc = DiscretizationDoc {
            node_ids: vec!["b".into()],
            states: 2,
            edges: vec![vec![0.5]],
        };
        let text = String::from_utf8(to_json(&doc).unwrap()).unwrap();
        let e = text.find("\"edges\"").unwrap();
        let n = text.find("\"node_ids\"").unwrap();
        let s = text.find("\"states\"").unwrap();
        assert!(e < n && n < s);
        assert_eq!(serde_json::to_string(&finite(f64::INFINITY)).unwrap(), "null");
    }

    #[test]
    fn pca_round_trip() {
        let data = synth_generate(3, 120, 4, &SynthProfile::from_name("correlated-drift").unwrap()).unwrap();
        let model = PcaModel::fit(&data, 0.85, 0.05).unwrap();
        let doc = PcaDoc::new(&model, data.node_ids());
        let back: PcaDoc = serde_json::from_slice(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(back.model().unwrap(), model);
    }
}

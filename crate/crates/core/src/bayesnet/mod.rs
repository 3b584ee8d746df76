//! Discrete Bayesian networks: counting, CPTs, scoring and structure search
//! for static and two-slice (transition) networks.

mod dag;
mod network;
mod search;
mod table;

pub use dag::Dag;
pub use network::{learn_static, learn_transition, BayesianNetwork, TransitionNetwork};
pub use search::{family_score, k2_search, penalized_score, repair_cycles, score, DEFAULT_MAX_PARENTS};
pub use table::{
    config_index, config_states, count_states, estimate_cpt, family_bic, family_log_likelihood, Counts, Cpt, Lag,
    MAX_CONFIGS,
};

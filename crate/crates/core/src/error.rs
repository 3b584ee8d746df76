use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("dataset has no nodes")]
    NoNodes,

    #[error("non-finite value at row {row}, node {node:?}")]
    NonFinite { row: usize, node: String },

    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),

    #[error("timestamps not strictly increasing at row {row}")]
    NonIncreasingTimestamps { row: usize },

    #[error("node {node:?} has zero variance")]
    ZeroVariance { node: String },

    #[error("node {node:?} has a degenerate range (min == max)")]
    DegenerateColumn { node: String },

    #[error("state count must be at least 2, got {0}")]
    InvalidStateCount(usize),

    #[error("state {state} out of range for {states} states")]
    StateOutOfRange { state: usize, states: usize },

    #[error("row set is empty")]
    EmptyRowSet,

    #[error("row index {row} out of range for {rows} rows")]
    RowOutOfRange { row: usize, rows: usize },

    #[error("unknown synthetic profile {0:?}")]
    UnknownProfile(String),

    #[error("PCA needs more samples than nodes (m = {samples}, n = {nodes})")]
    NotEnoughSamples { samples: usize, nodes: usize },

    #[error("eigensolver did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("correlation matrix has a negative eigenvalue {0}")]
    NegativeEigenvalue(f64),

    #[error("eigenvalue spectrum is all zero")]
    ZeroSpectrum,

    #[error("contribution ratio must lie in (0, 1], got {0}")]
    InvalidRatio(f64),

    #[error("component count {k} invalid for {n} nodes")]
    InvalidComponentCount { k: usize, n: usize },

    #[error("Q threshold undefined: h0 = 0")]
    DegenerateQThreshold,

    #[error("selected eigenvalue {index} is not positive ({value})")]
    NonPositiveEigenvalue { index: usize, value: f64 },

    #[error("test level must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("degrees of freedom must be at least 1")]
    InvalidDegreesOfFreedom,

    #[error("node index {index} out of range for {nodes} nodes")]
    InvalidNode { index: usize, nodes: usize },

    #[error("node {0} cannot be its own parent")]
    SelfParent(usize),

    #[error("parent {0} listed twice")]
    DuplicateParent(usize),

    #[error("parent configuration table too large ({states}^{parents})")]
    TableTooLarge { states: usize, parents: usize },

    #[error("training sequences disagree on shape or state count")]
    InconsistentSequences,

    #[error("no training sequences")]
    NoSequences,

    #[error("threshold must lie in (0, 1], got {0}")]
    InvalidThreshold(f64),

    #[error("node {0} has no parents")]
    NoParents(usize),

    #[error("evidence for parent {parent} is not a distribution over {states} states")]
    InvalidEvidence { parent: usize, states: usize },

    #[error("similarity weight must be nonnegative and finite, got {0}")]
    InvalidWeight(f64),

    #[error("input is empty")]
    EmptyInput,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("predicted or truth set is not contained in the universe")]
    NotSubset,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

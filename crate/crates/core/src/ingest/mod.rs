//! Sensor datasets and everything that turns raw readings into model inputs.

mod dataset;
mod discretize;
mod inject;
mod standardize;
pub mod synth;

pub use dataset::SensorDataset;
pub use discretize::{discretize, fit_discretization, DiscretizationScheme, StateMatrix};
pub use inject::inject_errors;
pub use standardize::{apply_standardization, standardize, Standardization};
pub use synth::{synth_generate, SynthProfile};

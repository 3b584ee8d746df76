//! Run configuration: defaults, an optional JSON file, then command-line
//! overrides, in that order of precedence (last wins).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::io::read_file;
use crate::Error;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SENSEPREP_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Training CSVs, one sequence each; when empty, data is synthesized
    /// from `profile`.
    pub train: Vec<PathBuf>,
    /// Test CSV; when absent, the synthesized rows after `train_rows`.
    pub test: Option<PathBuf>,
    /// Full-length CSV for real-time scheduling; when absent, synthesized.
    pub data: Option<PathBuf>,
    pub profile: String,
    pub seed: u64,
    pub nodes: usize,
    pub rows: usize,
    pub train_rows: usize,
    /// Overrides the profile's noise level.
    pub noise: Option<f64>,
    pub alpha_warning: f64,
    pub alpha_alarm: f64,
    pub contribution_ratio: f64,
    pub k_states: usize,
    pub max_parents: usize,
    pub tau: f64,
    pub slice_len: usize,
    pub train_frac: f64,
    /// Explicit test rows to corrupt; takes precedence over `error_count`.
    pub error_rows: Option<Vec<usize>>,
    /// Corrupt this many trailing test rows.
    pub error_count: usize,
    pub error_pct: f64,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            train: Vec::new(),
            test: None,
            data: None,
            profile: "correlated-drift".into(),
            seed: 1,
            nodes: 15,
            rows: 600,
            train_rows: 400,
            noise: None,
            alpha_warning: 0.05,
            alpha_alarm: 0.01,
            contribution_ratio: 0.85,
            k_states: 3,
            max_parents: 3,
            tau: 0.95,
            slice_len: 100,
            train_frac: 0.6,
            error_rows: None,
            error_count: 50,
            error_pct: 0.10,
            output: None,
        }
    }
}

impl RunConfig {
    /// Reads a JSON config; missing keys keep their defaults.
    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let bytes = read_file(path)?;
        serde_json::from_slice(&bytes).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fraction = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")))
            }
        };
        fraction("alpha_warning", self.alpha_warning)?;
        fraction("alpha_alarm", self.alpha_alarm)?;
        fraction("contribution_ratio", self.contribution_ratio)?;
        fraction("tau", self.tau)?;
        fraction("train_frac", self.train_frac)?;
        let positive = |name: &str, v: usize| {
            if v > 0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive")))
            }
        };
        positive("nodes", self.nodes)?;
        positive("rows", self.rows)?;
        positive("train_rows", self.train_rows)?;
        positive("max_parents", self.max_parents)?;
        positive("slice_len", self.slice_len)?;
        positive("error_count", self.error_count)?;
        if self.k_states < 2 {
            return Err(Error::Config("k_states must be at least 2".into()));
        }
        if self.alpha_alarm > self.alpha_warning {
            return Err(Error::Config(format!(
                "alpha_alarm ({}) must not exceed alpha_warning ({})",
                self.alpha_alarm, self.alpha_warning
            )));
        }
        if !self.error_pct.is_finite() {
            return Err(Error::Config("error_pct must be finite".into()));
        }
        if self.noise.is_some_and(|n| !(n >= 0.0 && n.is_finite())) {
            return Err(Error::Config("noise must be a finite non-negative number".into()));
        }
        if self.error_rows.as_ref().is_some_and(Vec::is_empty) {
            return Err(Error::Config("error_rows must not be empty".into()));
        }
        Ok(())
    }

    /// Output directory: configured value, else `$SENSEPREP_OUT`, else `.`.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"tau": 0.9, "seed": 7}"#).unwrap();
        assert_eq!((cfg.tau, cfg.seed, cfg.k_states), (0.9, 7, 3));
        assert!(serde_json::from_str::<RunConfig>(r#"{"taux": 1}"#).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            RunConfig { tau: 0.0, ..Default::default() },
            RunConfig { train_frac: 1.5, ..Default::default() },
            RunConfig { alpha_alarm: 0.1, ..Default::default() },
            RunConfig { k_states: 1, ..Default::default() },
            RunConfig { slice_len: 0, ..Default::default() },
            RunConfig { error_rows: Some(vec![]), ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
    }
}

//! Deterministic synthetic sensor datasets with known structure.
//!
//! Every profile is a pure function of `(seed, rows, nodes, profile)`, so the
//! same arguments always give bit-identical data. Ground truth for the copy
//! profiles comes from [`copy_pairs`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::SensorDataset;
use crate::{Error, Matrix, Result};

/// Sampling interval written into generated timestamps (seconds).
pub const SAMPLE_INTERVAL: i64 = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthProfile {
    /// `latent` smooth signals mixed linearly into every channel, plus
    /// independent channel noise with standard deviation `noise`.
    CorrelatedDrift { latent: usize, noise: f64 },
    /// Roots are independent smooth signals; each child repeats its parent
    /// at the same time step, plus noise of `noise` times the parent's scale.
    CopyChild { noise: f64 },
    /// Roots are i.i.d. readings; each child at `t` repeats its parent at
    /// `t - 1`, plus noise of `noise` times the parent's scale.
    LaggedCopy { noise: f64 },
    /// Independent i.i.d. channels.
    Independent,
}

impl SynthProfile {
    pub const NAMES: [&'static str; 4] = ["correlated-drift", "copy-child", "lagged-copy", "independent"];

    /// Profile with default parameters by CLI name.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "correlated-drift" => Self::CorrelatedDrift {
                latent: 2,
                noise: 0.1,
            },
            "copy-child" => Self::CopyChild { noise: 0.0 },
            "lagged-copy" => Self::LaggedCopy { noise: 0.0 },
            "independent" => Self::Independent,
            other => return Err(Error::UnknownProfile(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CorrelatedDrift { .. } => "correlated-drift",
            Self::CopyChild { .. } => "copy-child",
            Self::LaggedCopy { .. } => "lagged-copy",
            Self::Independent => "independent",
        }
    }

    /// Replaces the noise level; `Independent` has none and is returned as is.
    pub fn with_noise(self, noise: f64) -> Self {
        match self {
            Self::CorrelatedDrift { latent, .. } => Self::CorrelatedDrift { latent, noise },
            Self::CopyChild { .. } => Self::CopyChild { noise },
            Self::LaggedCopy { .. } => Self::LaggedCopy { noise },
            Self::Independent => Self::Independent,
        }
    }
}

/// `(child, parent)` pairs for the copy profiles: the first `ceil(n/2)` nodes
/// are roots and node `j >= ceil(n/2)` copies node `j - ceil(n/2)`.
pub fn copy_pairs(nodes: usize) -> Vec<(usize, usize)> {
    let roots = nodes - nodes / 2;
    (roots..nodes).map(|c| (c, c - roots)).collect()
}

/// Sum of three unit sinusoids with random periods in `[min_period, max_period)`,
/// scaled to unit variance.
struct SmoothSignal {
    periods: [f64; 3],
    phases: [f64; 3],
}

impl SmoothSignal {
    fn random(rng: &mut ChaCha8Rng, min_period: f64, max_period: f64) -> Self {
        let mut periods = [0.0; 3];
        let mut phases = [0.0; 3];
        for (p, ph) in periods.iter_mut().zip(phases.iter_mut()) {
            *p = rng.random_range(min_period..max_period);
            *ph = rng.random_range(0.0..2.0 * PI);
        }
        Self { periods, phases }
    }

    fn at(&self, t: usize) -> f64 {
        let s: f64 = self
            .periods
            .iter()
            .zip(&self.phases)
            .map(|(p, ph)| libm::sin(2.0 * PI * t as f64 / p + ph))
            .sum();
        s / libm::sqrt(1.5)
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn synth_generate(seed: u64, rows: usize, nodes: usize, profile: &SynthProfile) -> Result<SensorDataset> {
    if rows < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: rows });
    }
    if nodes == 0 {
        return Err(Error::NoNodes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Matrix::zeros(rows, nodes);
    match *profile {
        SynthProfile::CorrelatedDrift { latent, noise } => {
            if latent == 0 {
                return Err(Error::InvalidParameter("correlated-drift needs at least one latent signal"));
            }
            let signals: Vec<SmoothSignal> = (0..latent)
                .map(|_| SmoothSignal::random(&mut rng, 40.0, 160.0))
                .collect();
            let mut bases = Vec::with_capacity(nodes);
            let mut loadings = Vec::with_capacity(nodes);
            for _ in 0..nodes {
                bases.push(rng.random_range(15.0..35.0));
                let w: Vec<f64> = (0..latent)
                    .map(|_| {
                        let mag = rng.random_range(0.5..2.0);
                        if rng.random_bool(0.5) {
                            mag
                        } else {
                            -mag
                        }
                    })
                    .collect();
                loadings.push(w);
            }
            for t in 0..rows {
                let s: Vec<f64> = signals.iter().map(|sig| sig.at(t)).collect();
                for j in 0..nodes {
                    let mixed: f64 = loadings[j].iter().zip(&s).map(|(w, x)| w * x).sum();
                    values[(t, j)] = bases[j] + mixed + noise * normal(&mut rng);
                }
            }
        }
        SynthProfile::CopyChild { noise } => {
            let roots = nodes - nodes / 2;
            let signals: Vec<SmoothSignal> = (0..roots)
                .map(|_| SmoothSignal::random(&mut rng, 30.0, 120.0))
                .collect();
            let (bases, scales) = root_levels(&mut rng, roots);
            for t in 0..rows {
                for r in 0..roots {
                    values[(t, r)] = bases[r] + scales[r] * (signals[r].at(t) + 0.02 * normal(&mut rng));
                }
                for (c, p) in copy_pairs(nodes) {
                    values[(t, c)] = values[(t, p)] + noise * scales[p] * normal(&mut rng);
                }
            }
        }
        SynthProfile::LaggedCopy { noise } => {
            let roots = nodes - nodes / 2;
            let (bases, scales) = root_levels(&mut rng, roots);
            for t in 0..rows {
                for r in 0..roots {
                    values[(t, r)] = bases[r] + scales[r] * normal(&mut rng);
                }
                for (c, p) in copy_pairs(nodes) {
                    let source = if t == 0 {
                        bases[p] + scales[p] * normal(&mut rng)
                    } else {
                        values[(t - 1, p)]
                    };
                    values[(t, c)] = source + noise * scales[p] * normal(&mut rng);
                }
            }
        }
        SynthProfile::Independent => {
            let (bases, scales) = root_levels(&mut rng, nodes);
            for t in 0..rows {
                for j in 0..nodes {
                    values[(t, j)] = bases[j] + scales[j] * normal(&mut rng);
                }
            }
        }
    }
    let ids: Vec<String> = (0..nodes).map(|j| format!("s{j}")).collect();
    let timestamps = (0..rows as i64).map(|t| t * SAMPLE_INTERVAL).collect();
    SensorDataset::new(values, ids, Some(timestamps))
}

fn root_levels(rng: &mut ChaCha8Rng, count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut bases = Vec::with_capacity(count);
    let mut scales = Vec::with_capacity(count);
    for _ in 0..count {
        bases.push(rng.random_range(15.0..35.0));
        scales.push(rng.random_range(1.0..3.0));
    }
    (bases, scales)
}

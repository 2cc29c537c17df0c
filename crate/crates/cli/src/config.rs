//! Experiment configuration.
//!
//! A config file is JSON; every field is optional and command-line flags
//! override it field by field. Missing values fall back to per-kind defaults.
//!
//! ```json
//! {
//!   "algebra": { "dim": 2, "commutative": false },
//!   "truncation": 32,
//!   "seed": 42,
//!   "tolerance": 1e-10,
//!   "weights": "geometric:0.5",
//!   "k_max": 12,
//!   "operator": "identity",
//!   "steps": 3,
//!   "horizon": 24,
//!   "epsilon": 0.25,
//!   "samples": [500, 2000],
//!   "point": "basis:1:2",
//!   "points": "basis",
//!   "seminorm": { "kind": "tau", "state": "uniform", "weights": "ones" },
//!   "output": { "format": "json", "path": "report.json" }
//! }
//! ```
//!
//! Value grammars:
//!
//! * `weights`: `geometric:r`, `uniform`, or an explicit list of numbers;
//! * `operator`: `identity`, `zero`, `proj:k`, `theta`, `diag` or `file:PATH`
//!   (an operator in the core JSON format);
//! * `point`: `basis:k:c` (the vector `c·e_k`, one-based `k`) or `random:r`;
//! * `points`: `basis`, `ball:COUNT` or `file:PATH` (a JSON list of vectors).

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hilmod_core::json::SeminormJson;
use hilmod_core::AlgebraDescriptor;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MAX_DIM: usize = 64;
pub const MAX_TRUNCATION: usize = 1024;
pub const MAX_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Counterexample,
    Witness,
    Probe,
    Separation,
    Net,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Counterexample => "counterexample",
            Kind::Witness => "witness",
            Kind::Probe => "probe",
            Kind::Separation => "separation",
            Kind::Net => "net",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Preset(String),
    Values(Vec<f64>),
}

impl WeightsSpec {
    /// A flag value: a preset name, or a comma-separated list of numbers.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
            return Ok(WeightsSpec::Preset(text.to_string()));
        }
        text.split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map(WeightsSpec::Values)
            .map_err(|_| CliError::config("weights", format!("cannot parse `{text}`")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgebraLayer {
    pub dim: Option<usize>,
    pub commutative: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputLayer {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

/// One layer of settings: a config file or the command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    pub algebra: AlgebraLayer,
    pub truncation: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub weights: Option<WeightsSpec>,
    pub k_max: Option<usize>,
    pub operator: Option<String>,
    pub steps: Option<usize>,
    pub horizon: Option<usize>,
    pub epsilon: Option<f64>,
    pub samples: Option<Vec<usize>>,
    pub point: Option<String>,
    pub points: Option<String>,
    pub seminorm: Option<SeminormJson>,
    pub output: OutputLayer,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))
    }

    /// `self` with every value set in `over` replaced.
    pub fn overlay(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            algebra: AlgebraLayer {
                dim: over.algebra.dim.or(self.algebra.dim),
                commutative: over.algebra.commutative.or(self.algebra.commutative),
            },
            truncation: over.truncation.or(self.truncation),
            seed: over.seed.or(self.seed),
            tolerance: over.tolerance.or(self.tolerance),
            weights: over.weights.or(self.weights),
            k_max: over.k_max.or(self.k_max),
            operator: over.operator.or(self.operator),
            steps: over.steps.or(self.steps),
            horizon: over.horizon.or(self.horizon),
            epsilon: over.epsilon.or(self.epsilon),
            samples: over.samples.or(self.samples),
            point: over.point.or(self.point),
            points: over.points.or(self.points),
            seminorm: over.seminorm.or(self.seminorm),
            output: OutputLayer {
                format: over.output.format.or(self.output.format),
                path: over.output.path.or(self.output.path),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub algebra: AlgebraDescriptor,
    pub truncation: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub weights: WeightsSpec,
    pub k_max: usize,
    pub operator: String,
    pub steps: usize,
    pub horizon: usize,
    pub epsilon: f64,
    pub samples: Vec<usize>,
    pub point: String,
    pub points: String,
    pub seminorm: SeminormJson,
    pub output: Output,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

impl ExperimentConfig {
    pub fn defaults(kind: Kind) -> Self {
        let base = ExperimentConfig {
            kind,
            algebra: AlgebraDescriptor::full(2),
            truncation: 32,
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_TOLERANCE,
            weights: WeightsSpec::Preset("geometric:0.5".into()),
            k_max: 12,
            operator: "identity".into(),
            steps: 3,
            horizon: 24,
            epsilon: 0.25,
            samples: vec![500, 2000],
            point: "basis:1:2".into(),
            points: "basis".into(),
            seminorm: SeminormJson::uniform_ones(),
            output: Output {
                format: Format::Json,
                path: None,
            },
        };
        match kind {
            Kind::Counterexample => ExperimentConfig {
                algebra: AlgebraDescriptor::diagonal(16),
                truncation: 16,
                samples: vec![200],
                ..base
            },
            Kind::Witness => base,
            Kind::Probe => ExperimentConfig {
                truncation: 64,
                operator: "theta".into(),
                ..base
            },
            Kind::Separation => ExperimentConfig {
                truncation: 4,
                samples: vec![10_000],
                ..base
            },
            Kind::Net => ExperimentConfig { epsilon: 0.5, ..base },
        }
    }

    /// Defaults for `kind`, then `file`, then `flags`.
    pub fn resolve(kind: Kind, file: ConfigLayer, flags: ConfigLayer) -> Result<Self, CliError> {
        let layer = file.overlay(flags);
        let d = Self::defaults(kind);
        let dim = layer.algebra.dim.unwrap_or(d.algebra.dim);
        let commutative = layer.algebra.commutative.unwrap_or(d.algebra.commutative);
        if dim == 0 || dim > MAX_DIM {
            return Err(CliError::config(
                "algebra.dim",
                format!("{dim} is outside 1..={MAX_DIM}"),
            ));
        }
        let config = ExperimentConfig {
            kind,
            algebra: AlgebraDescriptor::new(dim, commutative)
                .map_err(|e| CliError::config("algebra", e.to_string()))?,
            truncation: layer.truncation.unwrap_or(d.truncation),
            seed: layer.seed.unwrap_or(d.seed),
            tolerance: layer.tolerance.unwrap_or(d.tolerance),
            weights: layer.weights.unwrap_or(d.weights),
            k_max: layer.k_max.unwrap_or(d.k_max),
            operator: layer.operator.unwrap_or(d.operator),
            steps: layer.steps.unwrap_or(d.steps),
            horizon: layer.horizon.unwrap_or(d.horizon),
            epsilon: layer.epsilon.unwrap_or(d.epsilon),
            samples: layer.samples.unwrap_or(d.samples),
            point: layer.point.unwrap_or(d.point),
            points: layer.points.unwrap_or(d.points),
            seminorm: layer.seminorm.unwrap_or(d.seminorm),
            output: Output {
                format: layer.output.format.unwrap_or(d.output.format),
                path: layer.output.path.or(d.output.path),
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let n = self.truncation;
        if n == 0 || n > MAX_TRUNCATION {
            return Err(CliError::config(
                "truncation",
                format!("{n} is outside 1..={MAX_TRUNCATION}"),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::config("tolerance", "must be positive and finite"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CliError::config("epsilon", "must be positive and finite"));
        }
        if self.samples.is_empty() {
            return Err(CliError::config("samples", "at least one sample size is required"));
        }
        if let Some(&s) = self.samples.iter().find(|&&s| s == 0 || s > MAX_SAMPLES) {
            return Err(CliError::config("samples", format!("{s} is outside 1..={MAX_SAMPLES}")));
        }
        match self.kind {
            Kind::Counterexample => {
                if !self.algebra.commutative {
                    return Err(CliError::config(
                        "algebra.commutative",
                        "the counterexample needs the diagonal algebra",
                    ));
                }
                if self.algebra.dim < n {
                    return Err(CliError::config(
                        "algebra.dim",
                        format!("dimension {} is below the truncation {n}", self.algebra.dim),
                    ));
                }
                if self.k_max > n {
                    return Err(CliError::config(
                        "k_max",
                        format!("{} exceeds the truncation {n}", self.k_max),
                    ));
                }
                if self.samples.len() != 1 {
                    return Err(CliError::config(
                        "samples",
                        "the counterexample takes a single sample count",
                    ));
                }
            }
            Kind::Witness => {
                if self.steps == 0 {
                    return Err(CliError::config("steps", "at least one step is required"));
                }
                if self.horizon == 0 || self.horizon >= n {
                    return Err(CliError::config(
                        "horizon",
                        format!("{} is outside 1..{n}", self.horizon),
                    ));
                }
            }
            Kind::Separation => {
                if self.samples.len() != 1 {
                    return Err(CliError::config("samples", "separation takes a single sample count"));
                }
            }
            Kind::Probe | Kind::Net => {}
        }
        Ok(())
    }
}

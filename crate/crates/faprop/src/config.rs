//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dto::{EnsembleDto, GradingDto, SpectrumDto, StateDto};
use crate::error::{FapropError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FaCheck,
    FgCurve,
    TruncationBound,
    TruncationCertificate,
    EnsembleCertificate,
    RobustnessProfile,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::FaCheck => "fa-check",
            ExperimentKind::FgCurve => "fg-curve",
            ExperimentKind::TruncationBound => "truncation-bound",
            ExperimentKind::TruncationCertificate => "truncation-certificate",
            ExperimentKind::EnsembleCertificate => "ensemble-certificate",
            ExperimentKind::RobustnessProfile => "robustness-profile",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shape {
    pub dim_in: usize,
    pub dim_out: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    #[serde(default = "default_shapes")]
    pub shapes: Vec<Shape>,
    #[serde(default = "default_n_seeds")]
    pub n_seeds: u64,
}

fn default_shapes() -> Vec<Shape> {
    vec![
        Shape { dim_in: 8, dim_out: 4, k: 2 },
        Shape { dim_in: 8, dim_out: 8, k: 4 },
    ]
}

fn default_n_seeds() -> u64 {
    200
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            shapes: default_shapes(),
            n_seeds: default_n_seeds(),
        }
    }
}

/// Constants `(C, T, D)` of a class `L(C,T,D)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConstants {
    pub c: f64,
    pub t: f64,
    pub d: f64,
}

impl Default for ClassConstants {
    fn default() -> Self {
        Self { c: 1.0, t: 2f64.ln(), d: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleKindDto {
    #[default]
    Eigen,
    Random { members: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyDto {
    Dephasing { dim: usize },
    Rotation { dim: usize },
    Depolarizing { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetDto {
    MutualInformation { state: StateDto },
    CoherentInformation { state: StateDto },
    OutputEntropy { state: StateDto },
    Holevo { ensemble: EnsembleDto },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessParams {
    #[serde(default = "default_family")]
    pub family: FamilyDto,
    #[serde(default = "default_target")]
    pub target: TargetDto,
    /// Energy budget of the metric estimate, in grading units.
    #[serde(default = "default_energy")]
    pub energy: f64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

fn default_family() -> FamilyDto {
    FamilyDto::Dephasing { dim: 2 }
}

fn default_target() -> TargetDto {
    TargetDto::MutualInformation {
        state: StateDto::MaximallyMixed { dim: 2 },
    }
}

fn default_energy() -> f64 {
    10.0
}

fn default_samples() -> usize {
    64
}

impl Default for RobustnessParams {
    fn default() -> Self {
        Self {
            family: default_family(),
            target: default_target(),
            energy: default_energy(),
            n_samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Standard output when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// One experiment. Every field has a default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    #[serde(default)]
    pub spectrum: SpectrumDto,
    #[serde(default)]
    pub grading: GradingDto,
    #[serde(default)]
    pub channel_params: ChannelParams,
    #[serde(default = "default_r_grid")]
    pub r_grid: Vec<usize>,
    /// Truncation lengths for ensembles; all lengths when empty.
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_eps_grid")]
    pub eps_grid: Vec<f64>,
    #[serde(default = "default_energies")]
    pub energies: Vec<f64>,
    #[serde(default)]
    pub class: ClassConstants,
    /// Certified quantities; all four when absent.
    #[serde(default = "default_quantities")]
    pub quantities: Vec<String>,
    #[serde(default)]
    pub ensemble: EnsembleKindDto,
    /// Final-gap threshold of the ensemble certificate, in nats.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub robustness: RobustnessParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_r_grid() -> Vec<usize> {
    (3..=20).collect()
}

fn default_eps_grid() -> Vec<f64> {
    vec![0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0]
}

fn default_energies() -> Vec<f64> {
    vec![2.0, 4.0, 8.0, 16.0, 64.0, 256.0, 1024.0, 4096.0]
}

fn default_quantities() -> Vec<String> {
    faprop_core::certify::CertifiedQuantity::ALL
        .iter()
        .map(|q| q.name().to_string())
        .collect()
}

fn default_threshold() -> f64 {
    1e-3
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every field has a default")
    }
}

impl ExperimentConfig {
    /// Parses JSON, reporting the path of the offending field on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| FapropError::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FapropError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Checks the fields used by `kind`.
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        if let Some(declared) = self.experiment {
            if declared != kind {
                return Err(config_err(
                    "experiment",
                    format!("config is for {} but {} was requested", declared.name(), kind.name()),
                ));
            }
        }
        let sorted_usize = |name: &str, g: &[usize], allow_empty: bool| -> Result<()> {
            if g.is_empty() && !allow_empty {
                return Err(config_err(name, "grid must not be empty"));
            }
            if g.windows(2).any(|w| w[1] <= w[0]) {
                return Err(config_err(name, "grid must be strictly increasing"));
            }
            Ok(())
        };
        let sorted_f64 = |name: &str, g: &[f64]| -> Result<()> {
            if g.is_empty() {
                return Err(config_err(name, "grid must not be empty"));
            }
            if g.iter().any(|x| !x.is_finite()) || g.windows(2).any(|w| w[1] <= w[0]) {
                return Err(config_err(name, "grid must be finite and strictly increasing"));
            }
            Ok(())
        };
        match kind {
            ExperimentKind::FaCheck => {}
            ExperimentKind::FgCurve => sorted_f64("energies", &self.energies)?,
            ExperimentKind::TruncationBound => sorted_usize("r_grid", &self.r_grid, false)?,
            ExperimentKind::TruncationCertificate => {
                sorted_usize("r_grid", &self.r_grid, false)?;
                self.check_channels()?;
                if self.quantities.is_empty() {
                    return Err(config_err("quantities", "must not be empty"));
                }
                for (i, q) in self.quantities.iter().enumerate() {
                    if faprop_core::certify::CertifiedQuantity::from_name(q).is_none() {
                        return Err(config_err(&format!("quantities[{i}]"), format!("unknown quantity {q:?}")));
                    }
                }
            }
            ExperimentKind::EnsembleCertificate => {
                sorted_usize("n_grid", &self.n_grid, true)?;
                if self.n_grid.first() == Some(&0) {
                    return Err(config_err("n_grid", "lengths start at 1"));
                }
                self.check_channels()?;
            }
            ExperimentKind::RobustnessProfile => {
                sorted_f64("eps_grid", &self.eps_grid)?;
                if !self.robustness.energy.is_finite() {
                    return Err(config_err("robustness.energy", "must be finite"));
                }
            }
        }
        Ok(())
    }

    fn check_channels(&self) -> Result<()> {
        let c = &self.channel_params;
        if c.shapes.is_empty() {
            return Err(config_err("channel_params.shapes", "must not be empty"));
        }
        if c.n_seeds == 0 {
            return Err(config_err("channel_params.n_seeds", "must be positive"));
        }
        for (i, s) in c.shapes.iter().enumerate() {
            if s.dim_in == 0 || s.dim_out == 0 || s.k == 0 || s.dim_out * s.k < s.dim_in {
                return Err(config_err(
                    &format!("channel_params.shapes[{i}]"),
                    "need positive dimensions with dim_out * k >= dim_in",
                ));
            }
        }
        Ok(())
    }
}

fn config_err(path: &str, message: impl Into<String>) -> FapropError {
    FapropError::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

//! JSON shapes of spectra, gradings, states and ensembles.

use faprop_core::ensembles::Ensemble;
use faprop_core::spectra::{Grading, GradingKind, Spectrum, SpectrumKind};
use faprop_core::{CMatrix, DensityMatrix};
use serde::{Deserialize, Serialize};

/// `{"kind": "geometric", "ratio": 0.5}` and friends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumDto {
    Finite { values: Vec<f64> },
    Geometric { ratio: f64 },
    PowerLog { exponent: f64 },
}

impl SpectrumDto {
    pub fn build(&self) -> faprop_core::Result<Spectrum> {
        match self {
            SpectrumDto::Finite { values } => Spectrum::finite_unsorted(values.clone()),
            SpectrumDto::Geometric { ratio } => Spectrum::geometric(*ratio),
            SpectrumDto::PowerLog { exponent } => Spectrum::power_log(*exponent),
        }
    }
}

impl From<&Spectrum> for SpectrumDto {
    fn from(s: &Spectrum) -> Self {
        match s.kind() {
            SpectrumKind::Finite(v) => SpectrumDto::Finite { values: v.clone() },
            SpectrumKind::Geometric { ratio } => SpectrumDto::Geometric { ratio: *ratio },
            SpectrumKind::PowerLog { exponent } => SpectrumDto::PowerLog { exponent: *exponent },
        }
    }
}

impl Default for SpectrumDto {
    fn default() -> Self {
        SpectrumDto::Geometric { ratio: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GradingDto {
    Linear {
        #[serde(default)]
        offset: f64,
    },
    PolyLog {
        exponent: f64,
        #[serde(default)]
        offset: f64,
    },
    Explicit {
        levels: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
}

impl GradingDto {
    pub fn build(&self) -> faprop_core::Result<Grading> {
        match self {
            GradingDto::Linear { offset } => Grading::linear().with_offset(*offset),
            GradingDto::PolyLog { exponent, offset } => Grading::poly_log(*exponent)?.with_offset(*offset),
            GradingDto::Explicit { levels, offset } => Grading::explicit(levels.clone())?.with_offset(*offset),
        }
    }
}

impl From<&Grading> for GradingDto {
    fn from(g: &Grading) -> Self {
        let offset = g.offset();
        match g.kind() {
            GradingKind::Linear => GradingDto::Linear { offset },
            GradingKind::PolyLog { exponent } => GradingDto::PolyLog { exponent: *exponent, offset },
            GradingKind::Explicit(levels) => GradingDto::Explicit { levels: levels.clone(), offset },
        }
    }
}

impl Default for GradingDto {
    fn default() -> Self {
        GradingDto::Linear { offset: 0.0 }
    }
}

/// A density matrix. `Matrix` takes row-major real and (optional) imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateDto {
    MaximallyMixed {
        dim: usize,
    },
    Basis {
        dim: usize,
        index: usize,
    },
    Diagonal {
        values: Vec<f64>,
    },
    /// Normalized on load.
    Pure {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Vec<Vec<f64>>,
    },
}

impl StateDto {
    pub fn build(&self) -> faprop_core::Result<DensityMatrix> {
        use faprop_core::Error;
        match self {
            StateDto::MaximallyMixed { dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidState("dimension must be positive".into()));
                }
                Ok(DensityMatrix::maximally_mixed(*dim))
            }
            StateDto::Basis { dim, index } => {
                if index >= dim {
                    return Err(Error::InvalidState(format!("index {index} outside dimension {dim}")));
                }
                Ok(DensityMatrix::basis_state(*dim, *index))
            }
            StateDto::Diagonal { values } => DensityMatrix::from_diagonal(values),
            StateDto::Pure { re, im } => {
                if !im.is_empty() && im.len() != re.len() {
                    return Err(Error::InvalidState("re and im lengths differ".into()));
                }
                let amp = faprop_core::CVector::from_fn(re.len(), |i, _| {
                    num_complex_new(re[i], im.get(i).copied().unwrap_or(0.0))
                });
                Ok(faprop_core::PureStateVector::normalize(amp)?.to_density())
            }
            StateDto::Matrix { re, im } => {
                let n = re.len();
                if re.iter().any(|row| row.len() != n)
                    || (!im.is_empty() && (im.len() != n || im.iter().any(|row| row.len() != n)))
                {
                    return Err(Error::InvalidState("matrix must be square".into()));
                }
                let m = CMatrix::from_fn(n, n, |i, j| {
                    num_complex_new(re[i][j], im.get(i).map_or(0.0, |row| row[j]))
                });
                DensityMatrix::new(m)
            }
        }
    }
}

fn num_complex_new(re: f64, im: f64) -> faprop_core::qcore::Complex64 {
    faprop_core::qcore::Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberDto {
    pub p: f64,
    pub state: StateDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDto {
    pub members: Vec<MemberDto>,
}

impl EnsembleDto {
    pub fn build(&self) -> faprop_core::Result<Ensemble> {
        Ensemble::new(
            self.members
                .iter()
                .map(|m| Ok((m.p, m.state.build()?)))
                .collect::<faprop_core::Result<Vec<_>>>()?,
        )
    }
}

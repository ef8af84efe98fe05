//! Discretization of parametrized continuous ensembles: sample the family on a
//! midpoint grid, cover the samples greedily by trace-distance balls of radius
//! `1/(2n)` and replace each cell by its weighted barycenter.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use super::{barycenter, Ensemble};
use crate::error::{domain, Result};
use crate::qcore::{trace_norm_hermitian, CMatrix, DensityMatrix};

/// Weight on the circle parameter `θ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleDensity {
    Uniform,
    /// Proportional to `1 + κ cos θ`, `|κ| ≤ 1`.
    Cosine { kappa: f64 },
}

/// Parametrized family of states with a probability density.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    PointMass(DensityMatrix),
    /// Finitely many atoms.
    Discrete(Vec<(f64, DensityMatrix)>),
    /// Qubit pure states `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`, a great circle of the Bloch sphere.
    PureCircle { density: CircleDensity },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousEnsembleSpec {
    pub family: Family,
    /// Cells have trace-norm diameter below `1/n`.
    pub n: usize,
}

impl ContinuousEnsembleSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self { family, n }
    }

    /// Number of grid points used for continuous families.
    pub fn sample_count(&self) -> usize {
        (16 * self.n).max(64)
    }
}

struct Sample {
    weight: f64,
    state: CMatrix,
    /// Set for pure samples, which allows the cheap overlap distance.
    vector: Option<DVector<Complex64>>,
}

fn samples(spec: &ContinuousEnsembleSpec) -> Result<Vec<Sample>> {
    let mixed = |weight: f64, rho: &DensityMatrix| Sample {
        weight,
        state: rho.matrix().clone(),
        vector: None,
    };
    let out = match &spec.family {
        Family::PointMass(rho) => alloc::vec![mixed(1.0, rho)],
        Family::Discrete(atoms) => {
            let total: f64 = atoms.iter().map(|(p, _)| p).sum();
            if atoms.is_empty() || atoms.iter().any(|(p, _)| !(*p >= 0.0)) || !(total > 0.0) {
                return Err(domain("discrete family", "weights must be nonnegative and not all zero"));
            }
            atoms
                .iter()
                .filter(|(p, _)| *p > 0.0)
                .map(|(p, r)| mixed(p / total, r))
                .collect()
        }
        Family::PureCircle { density } => {
            let kappa = match *density {
                CircleDensity::Uniform => 0.0,
                CircleDensity::Cosine { kappa } => kappa,
            };
            if !(kappa.abs() <= 1.0) {
                return Err(domain("circle density", format!("κ = {kappa} outside [-1, 1]")));
            }
            let ns = spec.sample_count();
            let raw: Vec<(f64, f64)> = (0..ns)
                .map(|j| {
                    let theta = 2.0 * PI * (j as f64 + 0.5) / ns as f64;
                    (theta, 1.0 + kappa * theta.cos())
                })
                .collect();
            let total: f64 = raw.iter().map(|(_, w)| w).sum();
            raw.into_iter()
                .filter(|(_, w)| *w > 0.0)
                .map(|(theta, w)| {
                    let v = DVector::from_vec(alloc::vec![
                        Complex64::new((theta / 2.0).cos(), 0.0),
                        Complex64::new((theta / 2.0).sin(), 0.0),
                    ]);
                    Sample {
                        weight: w / total,
                        state: &v * v.adjoint(),
                        vector: Some(v),
                    }
                })
                .collect()
        }
    };
    Ok(out)
}

fn distance(a: &Sample, b: &Sample) -> f64 {
    match (&a.vector, &b.vector) {
        (Some(x), Some(y)) => (1.0 - x.dotc(y).norm_sqr()).max(0.0).sqrt(),
        _ => 0.5 * trace_norm_hermitian(&(&a.state - &b.state)),
    }
}

/// The family itself as a (fine) discrete ensemble, one member per sample.
pub fn sampled_family(spec: &ContinuousEnsembleSpec) -> Result<Ensemble> {
    Ensemble::new(
        samples(spec)?
            .into_iter()
            .map(|s| (s.weight, DensityMatrix::from_matrix_unchecked(s.state)))
            .collect(),
    )
}

/// Greedy ball covering of the sampled family; each cell becomes one member
/// with the cell's weight and barycenter.
pub fn discretize_continuous(spec: &ContinuousEnsembleSpec) -> Result<Ensemble> {
    if spec.n == 0 {
        return Err(domain("resolution", "n must be positive"));
    }
    let s = samples(spec)?;
    let radius = 0.5 / spec.n as f64;
    let dim = s[0].state.nrows();
    let mut assigned = alloc::vec![false; s.len()];
    let mut members = Vec::new();
    for c in 0..s.len() {
        if assigned[c] {
            continue;
        }
        let cell: Vec<usize> = (c..s.len())
            .filter(|&j| !assigned[j] && distance(&s[c], &s[j]) < radius)
            .collect();
        let mass: f64 = cell.iter().map(|&j| s[j].weight).sum();
        let w: Vec<f64> = cell.iter().map(|&j| s[j].weight / mass).collect();
        let states: Vec<&CMatrix> = cell.iter().map(|&j| &s[j].state).collect();
        for &j in &cell {
            assigned[j] = true;
        }
        members.push((mass, DensityMatrix::from_matrix_unchecked(barycenter(&w, &states, dim))));
    }
    Ensemble::new(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::kantorovich_distance;
    use crate::qcore::max_abs_entry;
    use crate::qcore::random::{random_density, seeded};

    #[test]
    fn point_mass_is_single_member() {
        let rho = random_density(3, 2, &mut seeded(1));
        for n in [1, 4, 50] {
            let e = discretize_continuous(&ContinuousEnsembleSpec::new(Family::PointMass(rho.clone()), n)).unwrap();
            assert_eq!(e.len(), 1);
            assert!(max_abs_entry(&(e.members()[0].1.matrix() - rho.matrix())) < 1e-15);
        }
    }

    #[test]
    fn two_point_family_is_exact() {
        let a = DensityMatrix::basis_state(2, 0);
        let b = DensityMatrix::basis_state(2, 1);
        let fam = Family::Discrete(alloc::vec![(0.3, a.clone()), (0.7, b.clone())]);
        for n in [1, 2, 10] {
            let e = discretize_continuous(&ContinuousEnsembleSpec::new(fam.clone(), n)).unwrap();
            assert_eq!(e.len(), 2);
            assert!((e.members()[0].0 - 0.3).abs() < 1e-15);
            assert!(max_abs_entry(&(e.members()[1].1.matrix() - b.matrix())) < 1e-15);
        }
    }

    #[test]
    fn average_is_preserved() {
        for density in [CircleDensity::Uniform, CircleDensity::Cosine { kappa: 0.8 }] {
            let fam = Family::PureCircle { density };
            for n in [2, 8, 16] {
                let spec = ContinuousEnsembleSpec::new(fam.clone(), n);
                let e = discretize_continuous(&spec).unwrap();
                let fine = sampled_family(&spec).unwrap();
                assert!(max_abs_entry(&(e.average().matrix() - fine.average().matrix())) < 1e-12);
            }
        }
        // uniform circle averages to the maximally mixed qubit
        let e = discretize_continuous(&ContinuousEnsembleSpec::new(
            Family::PureCircle { density: CircleDensity::Uniform },
            8,
        ))
        .unwrap();
        assert!(max_abs_entry(&(e.average().matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-12);
    }

    #[test]
    fn cells_are_small() {
        let spec = ContinuousEnsembleSpec::new(Family::PureCircle { density: CircleDensity::Uniform }, 8);
        let e = discretize_continuous(&spec).unwrap();
        // the circle has trace-norm circumference π, so at least about πn/… cells
        assert!(e.len() >= 8);
        let fine = samples(&spec).unwrap();
        // each fine sample lies within 1/n of the barycenter of some cell
        for s in &fine {
            let near = e
                .members()
                .iter()
                .any(|(_, m)| 0.5 * trace_norm_hermitian(&(m.matrix() - &s.state)) < 1.0 / 8.0);
            assert!(near);
        }
    }

    #[test]
    fn circle_refinement_converges() {
        for density in [CircleDensity::Uniform, CircleDensity::Cosine { kappa: 0.5 }] {
            let fam = Family::PureCircle { density };
            let at = |n| discretize_continuous(&ContinuousEnsembleSpec::new(fam.clone(), n)).unwrap();
            let reference = at(32);
            let d8 = kantorovich_distance(&at(8), &reference).unwrap();
            let d16 = kantorovich_distance(&at(16), &reference).unwrap();
            assert!(d16 < d8, "{d16} !< {d8}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let fam = Family::PureCircle { density: CircleDensity::Cosine { kappa: 2.0 } };
        assert!(discretize_continuous(&ContinuousEnsembleSpec::new(fam, 4)).is_err());
        let fam = Family::PureCircle { density: CircleDensity::Uniform };
        assert!(discretize_continuous(&ContinuousEnsembleSpec::new(fam, 0)).is_err());
        assert!(discretize_continuous(&ContinuousEnsembleSpec::new(Family::Discrete(alloc::vec![]), 4)).is_err());
    }
}

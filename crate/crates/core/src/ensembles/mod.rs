//! Finite ensembles `{p_k, ρ_k}` of states: Holevo quantity and privacy of their
//! channel images, truncation, the `D₀` and Kantorovich distances, the
//! spectral-projection construction and the decomposition identity used to
//! compare Holevo quantities of an ensemble and its truncation.

mod discretize;
mod transport;

pub use discretize::{discretize_continuous, sampled_family, CircleDensity, ContinuousEnsembleSpec, Family};
pub use transport::{solve_transport, TransportPlan};

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::{complementary, Channel};
use crate::error::{check_dim, Error, Result};
use crate::qcore::{
    h2_unchecked, matrix_entropy, relative_entropy_raw, trace, trace_norm_hermitian,
    von_neumann_entropy, CMatrix, DensityMatrix, STATE_TOLERANCE,
};

/// Tolerance on `Σ p_k = 1`.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;

/// Discrete ensemble with a cached average state. Members with zero weight are
/// kept, so positions stay aligned across constructions.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, DensityMatrix)>,
    average: DensityMatrix,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let dim = members
            .first()
            .map(|(_, r)| r.dim())
            .ok_or_else(|| Error::InvalidEnsemble("no members".into()))?;
        let mut total = 0.0;
        let mut avg = DMatrix::zeros(dim, dim);
        for (p, rho) in &members {
            if !(*p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidEnsemble(format!("probability {p} is not a weight")));
            }
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            if (rho.trace() - 1.0).abs() > STATE_TOLERANCE {
                return Err(Error::InvalidEnsemble("members must have unit trace".into()));
            }
            total += p;
            avg += rho.matrix().scale(*p);
        }
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            members,
            average: DensityMatrix::from_matrix_unchecked(avg),
        })
    }

    /// Orthogonal pure ensemble of the eigenvectors of `rho`.
    pub fn eigen_ensemble(rho: &DensityMatrix) -> Self {
        let e = rho.eigh();
        let members = e
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.0)
            .map(|(j, &l)| {
                let v = e.vector(j);
                (l, DensityMatrix::from_matrix_unchecked(&v * v.adjoint()))
            })
            .collect();
        Self::new(members).expect("eigenvalues of a state form a distribution")
    }

    pub fn members(&self) -> &[(f64, DensityMatrix)] {
        &self.members
    }

    pub fn average(&self) -> &DensityMatrix {
        &self.average
    }

    pub fn dim(&self) -> usize {
        self.average.dim()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.members.iter().map(|(p, _)| *p).collect()
    }
}

// ---------------------------------------------------------------------------
// Holevo quantity and privacy

/// Both formulas for `χ({p_k, Φ(ρ_k)})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoRecord {
    /// `Σ p_k H(Φ(ρ_k)‖Φ(ρ̄))`.
    pub relative_entropy_form: f64,
    /// `H(Φ(ρ̄)) - Σ p_k H(Φ(ρ_k))`.
    pub entropy_form: f64,
}

pub fn holevo_quantity_detailed(phi: &Channel, mu: &Ensemble) -> Result<HolevoRecord> {
    check_dim(phi.dim_in(), mu.dim())?;
    let avg = phi.apply_raw(mu.average().matrix());
    let mut rel = 0.0;
    let mut inner = 0.0;
    for (p, rho) in &mu.members {
        if *p == 0.0 {
            continue;
        }
        let out = phi.apply_raw(rho.matrix());
        let t = trace(&out).re;
        // members are dominated by the average, so their support lies inside it
        rel += p * relative_entropy_raw(&out, t, &avg, true).value;
        inner += p * matrix_entropy(&out);
    }
    Ok(HolevoRecord {
        relative_entropy_form: rel,
        entropy_form: matrix_entropy(&avg) - inner,
    })
}

/// `χ_Φ(μ)`.
pub fn holevo_quantity(phi: &Channel, mu: &Ensemble) -> Result<f64> {
    Ok(holevo_quantity_detailed(phi, mu)?.relative_entropy_form)
}

/// Holevo quantity of the ensemble itself (identity channel).
pub fn holevo_of_ensemble(mu: &Ensemble) -> Result<f64> {
    holevo_quantity(&Channel::identity(mu.dim()), mu)
}

/// `π_Φ(μ) = χ_Φ(μ) - χ_Φ̂(μ)` with the canonical complementary channel.
pub fn privacy(phi: &Channel, mu: &Ensemble) -> Result<f64> {
    Ok(holevo_quantity(phi, mu)? - holevo_quantity(&complementary(phi), mu)?)
}

// ---------------------------------------------------------------------------
// truncation and distances

/// `μ_n = {p_k/c_n, ρ_k}_{k≤n}`, `c_n = Σ_{k≤n} p_k`.
pub fn truncate_ensemble(mu: &Ensemble, n: usize) -> Result<Ensemble> {
    if n == 0 || n > mu.len() {
        return Err(crate::error::domain(
            "truncation length",
            format!("n = {n} must lie in 1..={}", mu.len()),
        ));
    }
    let c: f64 = mu.members[..n].iter().map(|(p, _)| p).sum();
    if !(c > 0.0) {
        return Err(Error::InvalidEnsemble("first members carry no weight".into()));
    }
    Ensemble::new(
        mu.members[..n]
            .iter()
            .map(|(p, r)| (p / c, r.clone()))
            .collect(),
    )
}

/// `c_n` of a truncation.
pub fn head_weight(mu: &Ensemble, n: usize) -> f64 {
    mu.members.iter().take(n).map(|(p, _)| p).sum()
}

/// `D₀(μ,ν) = ½ Σ_k ‖p_kρ_k - q_kσ_k‖₁` over positions; missing positions weigh zero.
pub fn d0_distance(mu: &Ensemble, nu: &Ensemble) -> Result<f64> {
    check_dim(mu.dim(), nu.dim())?;
    let n = mu.len().max(nu.len());
    let mut total = 0.0;
    for k in 0..n {
        total += weighted_difference_norm(mu.members.get(k), nu.members.get(k), mu.dim());
    }
    Ok(0.5 * total)
}

/// `D₀` when member `j` of `nu` sits at position `alignment[j]` of `mu`; members
/// of `mu` that no member of `nu` maps to are paired with zero weight.
pub fn d0_distance_aligned(mu: &Ensemble, nu: &Ensemble, alignment: &[usize]) -> Result<f64> {
    check_dim(mu.dim(), nu.dim())?;
    check_dim(nu.len(), alignment.len())?;
    let mut partner: Vec<Option<usize>> = alloc::vec![None; mu.len()];
    for (j, &k) in alignment.iter().enumerate() {
        if k >= mu.len() || partner[k].is_some() {
            return Err(Error::InvalidEnsemble("alignment must be injective into μ".into()));
        }
        partner[k] = Some(j);
    }
    let mut total = 0.0;
    for (k, m) in mu.members.iter().enumerate() {
        total += weighted_difference_norm(Some(m), partner[k].map(|j| &nu.members[j]), mu.dim());
    }
    Ok(0.5 * total)
}

fn weighted_difference_norm(
    a: Option<&(f64, DensityMatrix)>,
    b: Option<&(f64, DensityMatrix)>,
    dim: usize,
) -> f64 {
    let term = |m: Option<&(f64, DensityMatrix)>| match m {
        Some((p, r)) => r.matrix().scale(*p),
        None => DMatrix::zeros(dim, dim),
    };
    trace_norm_hermitian(&(term(a) - term(b)))
}

/// Kantorovich distance with cost `½‖ρ_i - σ_j‖₁` between members.
pub fn kantorovich_distance(mu: &Ensemble, nu: &Ensemble) -> Result<f64> {
    check_dim(mu.dim(), nu.dim())?;
    let a: Vec<&(f64, DensityMatrix)> = mu.members.iter().filter(|(p, _)| *p > 0.0).collect();
    let b: Vec<&(f64, DensityMatrix)> = nu.members.iter().filter(|(p, _)| *p > 0.0).collect();
    let mut cost = Vec::with_capacity(a.len() * b.len());
    for (_, r) in &a {
        for (_, s) in &b {
            cost.push(0.5 * trace_norm_hermitian(&(r.matrix() - s.matrix())));
        }
    }
    let supply: Vec<f64> = a.iter().map(|(p, _)| *p).collect();
    let demand: Vec<f64> = b.iter().map(|(p, _)| *p).collect();
    Ok(solve_transport(&supply, &demand, &cost)?.cost.max(0.0))
}

// ---------------------------------------------------------------------------
// spectral projection

/// Projector onto the eigenvectors of the `r` largest eigenvalues of `rho`.
pub fn spectral_projector(rho: &DensityMatrix, r: usize) -> Result<CMatrix> {
    if r == 0 || r > rho.dim() {
        return Err(crate::error::domain("projector rank", format!("r = {r} not in 1..={}", rho.dim())));
    }
    let e = rho.eigh();
    let v = e.vectors.columns(0, r);
    Ok(&v * v.adjoint())
}

/// `ρ_r = P_r ρ P_r / Tr P_r ρ`.
pub fn truncate_state(rho: &DensityMatrix, r: usize) -> Result<(DensityMatrix, f64)> {
    let p = spectral_projector(rho, r)?;
    let m = &p * rho.matrix() * &p;
    let c = trace(&m).re;
    if !(c > 0.0) {
        return Err(Error::Precondition("projected state vanishes".into()));
    }
    Ok((DensityMatrix::from_matrix_unchecked(m.unscale(c)), c))
}

/// Ensemble `p̂_k = p_k Tr Pρ_k / Tr Pρ̄`, `ρ̂_k = Pρ_kP / Tr Pρ_k`, with the
/// positions of `mu` that survived.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedEnsemble {
    pub ensemble: Ensemble,
    /// `kept[j]` is the position in `mu` of member `j`.
    pub kept: Vec<usize>,
    /// `Tr P ρ̄`.
    pub head_weight: f64,
}

/// Members with `Tr Pρ_k = 0` are dropped.
pub fn spectral_projection_ensemble(mu: &Ensemble, projector: &CMatrix) -> Result<ProjectedEnsemble> {
    check_dim(mu.dim(), projector.nrows())?;
    let c = trace(&(projector * mu.average().matrix())).re;
    if !(c > 1e-15) {
        return Err(Error::Precondition("Tr P ρ̄ = 0".into()));
    }
    let mut members = Vec::new();
    let mut kept = Vec::new();
    for (k, (p, rho)) in mu.members.iter().enumerate() {
        let m = projector * rho.matrix() * projector;
        let t = trace(&m).re;
        if t <= 1e-15 || *p == 0.0 {
            continue;
        }
        members.push((p * t / c, DensityMatrix::from_matrix_unchecked(m.unscale(t))));
        kept.push(k);
    }
    // renormalize away round-off in the weights
    let s: f64 = members.iter().map(|(p, _)| p).sum();
    members.iter_mut().for_each(|(p, _)| *p /= s);
    Ok(ProjectedEnsemble {
        ensemble: Ensemble::new(members)?,
        kept,
        head_weight: c,
    })
}

// ---------------------------------------------------------------------------
// decomposition of the augmented ensemble

/// Terms of the comparison between `χ` of an ensemble `{p_k, ρ_k}` with average
/// `ρ_r` and `χ` of the augmented ensemble `{1-c_r, ρ̂₀} ∪ {c_r p_k, ρ_k}` with
/// average `ρ`, where `ρ̂₀ = (ρ - c_r ρ_r)/(1 - c_r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DonaldRecord {
    pub c_r: f64,
    /// `χ({p_k, Φ(ρ_k)})`.
    pub chi: f64,
    /// `χ` of the augmented ensemble.
    pub chi_augmented: f64,
    /// `(1-c)H(Φ(ρ̂₀)‖Φ(ρ)) + c H(Φ(ρ_r)‖Φ(ρ)) + c Σ p_k H(Φ(ρ_k)‖Φ(ρ_r))`.
    pub decomposition: f64,
    /// The first two terms of `decomposition`, bounded by `h₂(c_r)`.
    pub head_terms: f64,
    pub h2_c: f64,
    /// `|chi_augmented - decomposition|`.
    pub identity_residual: f64,
    /// `c χ ≤ χ_aug ≤ c χ + h₂(c)` within `1e-8`.
    pub sandwich_holds: bool,
}

/// Outcome of [`donald_decomposition_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DonaldOutcome {
    Checked(DonaldRecord),
    /// `c_r = 1`: the state already has rank at most `r`.
    Skipped { c_r: f64 },
}

/// Builds the augmented ensemble for `rho`, rank `r` and an ensemble `mu` whose
/// average is `ρ_r`, then evaluates both sides of the decomposition identity.
pub fn donald_decomposition_check(
    phi: &Channel,
    rho: &DensityMatrix,
    r: usize,
    mu: &Ensemble,
) -> Result<DonaldOutcome> {
    check_dim(phi.dim_in(), rho.dim())?;
    check_dim(rho.dim(), mu.dim())?;
    let (rho_r, c) = truncate_state(rho, r)?;
    if crate::qcore::max_abs_entry(&(mu.average().matrix() - rho_r.matrix())) > 1e-9 {
        return Err(Error::Precondition("ensemble average differs from ρ_r".into()));
    }
    if 1.0 - c <= 1e-12 {
        return Ok(DonaldOutcome::Skipped { c_r: c });
    }
    let rho0 = DensityMatrix::from_matrix_unchecked(
        (rho.matrix() - rho_r.matrix().scale(c)).unscale(1.0 - c),
    );
    let mut augmented = alloc::vec![(1.0 - c, rho0.clone())];
    augmented.extend(mu.members.iter().map(|(p, s)| (c * p, s.clone())));
    let augmented = Ensemble::new(augmented)?;

    let chi = holevo_quantity(phi, mu)?;
    let chi_aug = holevo_quantity(phi, &augmented)?;
    let out_rho = phi.apply_raw(rho.matrix());
    let out_r = phi.apply_raw(rho_r.matrix());
    let rel = |a: &CMatrix, b: &CMatrix| relative_entropy_raw(a, trace(a).re, b, true).value;
    let head = (1.0 - c) * rel(&phi.apply_raw(rho0.matrix()), &out_rho) + c * rel(&out_r, &out_rho);
    let tail: f64 = mu
        .members
        .iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, s)| p * rel(&phi.apply_raw(s.matrix()), &out_r))
        .sum();
    let decomposition = head + c * tail;
    let h = h2_unchecked(c);
    Ok(DonaldOutcome::Checked(DonaldRecord {
        c_r: c,
        chi,
        chi_augmented: chi_aug,
        decomposition,
        head_terms: head,
        h2_c: h,
        identity_residual: (chi_aug - decomposition).abs(),
        sandwich_holds: c * chi <= chi_aug + 1e-8 && chi_aug <= c * chi + h + 1e-8,
    }))
}

/// Weighted mixture `Σ w_k ρ_k` of raw matrices.
pub(crate) fn barycenter(weights: &[f64], states: &[&CMatrix], dim: usize) -> CMatrix {
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (w, s) in weights.iter().zip(states) {
        m += s.scale(*w);
    }
    m
}

/// Entropy of the average minus the average entropy, for diagnostics.
pub fn ensemble_entropy_gap(mu: &Ensemble) -> f64 {
    von_neumann_entropy(mu.average())
        - mu.members
            .iter()
            .map(|(p, r)| p * von_neumann_entropy(r))
            .sum::<f64>()
}

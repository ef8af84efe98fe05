//! Explicit bounds: the truncation bound `Y_{C,T,D}(r)`, the two-sided
//! envelopes relating constrained capacities of `ρ` and `ρ_r`, the
//! energy-constrained Bures lower estimator and robustness profiles.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;

use crate::channels::{tensor_with_identity, Channel};
use crate::error::{check_dim, domain, Error, Result};
use crate::gibbs::{f_g, gibbs_probabilities};
use crate::qcore::random::{haar_unitary, random_simplex_point, substream};
use crate::qcore::{
    bures_distance, continuity_g_unchecked, h2_unchecked, CVector, DensityMatrix, PureStateVector,
};
use crate::spectra::{pairing_energy, Grading, SeriesVerdict, Spectrum};

// ---------------------------------------------------------------------------
// truncation bound

/// `Y = √(2δ_r)[C F_G(E_ρ/δ_r) + T] + D g(√(2δ_r))` with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBound {
    pub r: usize,
    pub r0: usize,
    /// Tail mass `Σ_{i>r} λ_i`, plus any residual handed in by the caller.
    pub delta_r: f64,
    pub e_rho: f64,
    pub c: f64,
    pub t: f64,
    pub d: f64,
    /// `F_G(E_ρ/δ_r)`; `None` when `δ_r = 0`.
    pub f_g: Option<f64>,
    pub y: f64,
}

/// `r₀ = min{r : g_r > E}`.
pub fn minimal_rank(grad: &Grading, energy: f64) -> Result<usize> {
    if !energy.is_finite() {
        return Err(domain("energy", format!("E = {energy} must be finite")));
    }
    if grad.value(1) > energy {
        return Ok(1);
    }
    // levels are nondecreasing: double, then bisect
    let mut hi: usize = 2;
    while !(grad.value(hi) > energy) {
        if let Some(n) = grad.levels() {
            if hi >= n {
                return Err(domain("energy", format!("no level exceeds E = {energy}")));
            }
        }
        if hi > 1 << 60 {
            return Err(domain("energy", format!("no level below 2^60 exceeds E = {energy}")));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if grad.value(mid) > energy {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn finite_energy(spec: &Spectrum, grad: &Grading) -> Result<f64> {
    let ev = pairing_energy(spec, grad);
    match (ev.verdict, ev.value) {
        (SeriesVerdict::Converges, Some(v)) => Ok(v),
        _ => Err(Error::Divergent("pairing energy Σ λ_i g_i is not finite".into())),
    }
}

/// Truncation bound for `ρ` with spectrum `spec` at rank `r`.
pub fn theorem2_bound(spec: &Spectrum, grad: &Grading, r: usize, c: f64, t: f64, d: f64) -> Result<TruncationBound> {
    theorem2_bound_with_residual(spec, grad, r, c, t, d, 0.0)
}

/// As [`theorem2_bound`] with `residual` added to `δ_r`, for states embedded at
/// finite dimension whose discarded tail should count against the bound.
pub fn theorem2_bound_with_residual(
    spec: &Spectrum,
    grad: &Grading,
    r: usize,
    c: f64,
    t: f64,
    d: f64,
    residual: f64,
) -> Result<TruncationBound> {
    let e = finite_energy(spec, grad)?;
    bound_from_parts(grad, e, r, spec.tail(r) + residual, c, t, d)
}

/// Bound from an energy and a tail mass directly.
pub fn bound_from_parts(grad: &Grading, e_rho: f64, r: usize, delta_r: f64, c: f64, t: f64, d: f64) -> Result<TruncationBound> {
    if [c, t, d].iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(domain("class constants", format!("(C, T, D) = ({c}, {t}, {d}) must be nonnegative")));
    }
    if !(0.0..=1.0).contains(&delta_r) {
        return Err(domain("tail mass", format!("δ_r = {delta_r} not in [0, 1]")));
    }
    let r0 = minimal_rank(grad, e_rho)?;
    if r < r0 {
        return Err(domain("rank", format!("r = {r} is below r₀ = {r0}")));
    }
    if delta_r == 0.0 {
        return Ok(TruncationBound { r, r0, delta_r, e_rho, c, t, d, f_g: None, y: 0.0 });
    }
    let s = (2.0 * delta_r).sqrt();
    let fg = if c > 0.0 { f_g(grad, e_rho / delta_r)?.entropy } else { 0.0 };
    let y = s * (c * fg + t) + d * continuity_g_unchecked(s);
    Ok(TruncationBound { r, r0, delta_r, e_rho, c, t, d, f_g: Some(fg), y })
}

/// Bounds along `rs`; errors if `Y` increases anywhere along the grid, which
/// happens when the grading grows too slowly for `F_G(E)` to be `o(√E)`.
pub fn bound_curve(spec: &Spectrum, grad: &Grading, rs: &[usize], c: f64, t: f64, d: f64) -> Result<Vec<TruncationBound>> {
    let mut sorted = rs.to_vec();
    sorted.sort_unstable();
    let out = sorted
        .iter()
        .map(|&r| theorem2_bound(spec, grad, r, c, t, d))
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = out.windows(2).find(|w| w[1].y > w[0].y * (1.0 + 1e-12)) {
        return Err(Error::Numerical(format!(
            "Y increases from r = {} to r = {}",
            w[0].r, w[1].r
        )));
    }
    Ok(out)
}

/// The spectrum as a `dim × dim` diagonal state, with the tail beyond
/// `dim - 1` folded into the last eigenvalue so that every truncation of
/// rank `< dim` keeps the exact tail mass.
pub fn embedded_state(spec: &Spectrum, dim: usize) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(domain("dimension", "must be positive"));
    }
    let mut p = spec.head(dim - 1);
    p.resize(dim - 1, 0.0);
    p.push(spec.tail(dim - 1));
    DensityMatrix::from_diagonal(&p)
}

// ---------------------------------------------------------------------------
// capacity envelopes

/// Two-sided envelopes for `|C̄(Φ,ρ) - C̄(Φ,ρ_r)|` and its private analogue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEnvelope {
    pub h_rho_r: f64,
    pub c_r: f64,
    pub b_r: f64,
    /// `max(B_r, (1-c_r) H(ρ_r))`.
    pub holevo: f64,
    /// `max(2B_r, (1-c_r) H(ρ_r) + h₂(c_r))`.
    pub private: f64,
}

/// Which of the one-sided inequalities held on supplied values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvelopeCheck {
    pub upper_holevo: bool,
    pub lower_holevo: bool,
    pub lower_private: bool,
    pub upper_private: bool,
}

impl EnvelopeCheck {
    pub fn all(&self) -> bool {
        self.upper_holevo && self.lower_holevo && self.lower_private && self.upper_private
    }
}

pub fn prop2_capacity_bounds(h_rho_r: f64, c_r: f64, b_r: f64) -> Result<CapacityEnvelope> {
    if !(h_rho_r >= 0.0) || !(b_r >= 0.0) || !(c_r > 0.0 && c_r <= 1.0) {
        return Err(domain(
            "envelope inputs",
            format!("H = {h_rho_r}, c = {c_r}, B = {b_r}"),
        ));
    }
    let loss = (1.0 - c_r) * h_rho_r;
    Ok(CapacityEnvelope {
        h_rho_r,
        c_r,
        b_r,
        holevo: b_r.max(loss),
        private: (2.0 * b_r).max(loss + h2_unchecked(c_r)),
    })
}

impl CapacityEnvelope {
    /// Tests the four one-sided inequalities on capacity values of `ρ` and `ρ_r`.
    pub fn check(&self, cbar_rho: f64, cbar_rho_r: f64, cp_rho: f64, cp_rho_r: f64, slack: f64) -> EnvelopeCheck {
        let loss = (1.0 - self.c_r) * self.h_rho_r;
        EnvelopeCheck {
            upper_holevo: cbar_rho <= cbar_rho_r + self.b_r + slack,
            lower_holevo: cbar_rho >= self.c_r * cbar_rho_r - slack
                && self.c_r * cbar_rho_r >= cbar_rho_r - loss - slack,
            lower_private: cp_rho_r <= cp_rho + loss + h2_unchecked(self.c_r) + slack,
            upper_private: cp_rho <= cp_rho_r + 2.0 * self.b_r + slack,
        }
    }
}

/// `‖ρ̂ - ρ̂_r‖₁ = 2√(1 - c_r)` for the canonical purifications of `ρ` and `ρ_r`.
pub fn purification_gap(c_r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c_r) {
        return Err(domain("head weight", format!("c_r = {c_r} not in [0, 1]")));
    }
    Ok(2.0 * (1.0 - c_r).sqrt())
}

// ---------------------------------------------------------------------------
// energy-constrained Bures distance

/// Lower estimate of the energy-constrained Bures distance, realized by a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct EcBuresEstimate {
    pub value: f64,
    pub energy: f64,
    /// Candidate inputs evaluated (Gibbs purifications included).
    pub samples: usize,
    /// Input on `C^d ⊗ C^d`, system first.
    pub best_witness: PureStateVector,
    pub witness_energy: f64,
}

/// Energy `Tr G ρ_A` of a bipartite pure input, `G = diag(g_1..g_d)`.
pub fn input_energy(levels: &[f64], psi: &PureStateVector) -> f64 {
    let d = levels.len();
    let a = psi.amplitudes();
    let mut e = 0.0;
    for i in 0..d {
        for r in 0..psi.dim() / d {
            e += levels[i] * a[i * (psi.dim() / d) + r].norm_sqr();
        }
    }
    e
}

/// `β(Φ⊗Id(ψ), Ψ⊗Id(ψ))` for one input.
pub fn bures_at(phi: &Channel, psi: &Channel, witness: &PureStateVector) -> Result<f64> {
    check_dim(phi.dim_in(), psi.dim_in())?;
    check_dim(phi.dim_out(), psi.dim_out())?;
    let d = phi.dim_in();
    check_dim(d * d, witness.dim())?;
    let input = witness.to_density();
    let a = DensityMatrix::from_matrix_unchecked(tensor_with_identity(phi, d).apply_raw(input.matrix()));
    let b = DensityMatrix::from_matrix_unchecked(tensor_with_identity(psi, d).apply_raw(input.matrix()));
    bures_distance(&a, &b)
}

fn schmidt_state(coeffs: &[f64], u: Option<&DMatrix<Complex64>>, v: Option<&DMatrix<Complex64>>) -> PureStateVector {
    let d = coeffs.len();
    let mut amp = CVector::zeros(d * d);
    for (k, &l) in coeffs.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for i in 0..d {
            let ui = u.map_or(if i == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }, |u| u[(i, k)]);
            if ui == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                let vj = v.map_or(if j == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }, |v| v[(j, k)]);
                amp[i * d + j] += ui * vj * s;
            }
        }
    }
    PureStateVector::normalize(amp).expect("Schmidt coefficients sum to one")
}

/// Number of Gibbs energies tried between the ground level and `E`.
const GIBBS_ENERGIES: usize = 16;

/// Maximizes `β` over purified Gibbs states at energies up to `E` and
/// `n_samples` random pure inputs with `Tr Gρ_A ≤ E`. Sample `i` draws from its
/// own stream, so estimates are nondecreasing in `n_samples` for a fixed seed.
pub fn ecbures_estimate(
    phi: &Channel,
    psi: &Channel,
    grad: &Grading,
    energy: f64,
    n_samples: usize,
    seed: u64,
) -> Result<EcBuresEstimate> {
    check_dim(phi.dim_in(), psi.dim_in())?;
    let d = phi.dim_in();
    let levels: Vec<f64> = (1..=d).map(|i| grad.value(i)).collect();
    let ground = levels.iter().copied().fold(f64::INFINITY, f64::min);
    if !(energy >= ground) || !energy.is_finite() {
        return Err(Error::Infeasible(format!(
            "no input has energy ≤ {energy}; the lowest level is {ground}"
        )));
    }
    let finite = Grading::explicit(levels.clone())?;
    let mut best: Option<(f64, PureStateVector, f64)> = None;
    let mut samples = 0;
    let consider = |psi_in: PureStateVector, best: &mut Option<(f64, PureStateVector, f64)>| -> Result<()> {
        let e = input_energy(&levels, &psi_in);
        let b = bures_at(phi, psi, &psi_in)?;
        if best.as_ref().map_or(true, |(v, _, _)| b > *v) {
            *best = Some((b, psi_in, e));
        }
        Ok(())
    };

    // ground state, then purified Gibbs states
    let g0 = levels.iter().position(|&g| g == ground).unwrap_or(0);
    let mut e0 = alloc::vec![0.0; d];
    e0[g0] = 1.0;
    consider(schmidt_state(&e0, None, None), &mut best)?;
    samples += 1;
    let top = levels.iter().sum::<f64>() / d as f64;
    for j in 1..=GIBBS_ENERGIES {
        let target = ground + (energy.min(top) - ground) * j as f64 / GIBBS_ENERGIES as f64;
        if !(target > ground) {
            break;
        }
        let p = if target >= top {
            alloc::vec![1.0 / d as f64; d]
        } else {
            gibbs_probabilities(&finite, f_g(&finite, target)?.beta, d)?
        };
        consider(schmidt_state(&p, None, None), &mut best)?;
        samples += 1;
    }

    for i in 0..n_samples {
        let mut rng = substream(seed, i as u64);
        let mut lambda = random_simplex_point(d, &mut rng);
        // bias half the draws toward low energy with a Gibbs proposal
        if i % 2 == 1 {
            let beta = rng.gen_range(0.0..4.0) / (top - ground).max(1e-12);
            for (l, g) in lambda.iter_mut().zip(&levels) {
                *l *= (-beta * (g - ground)).exp();
            }
            let s: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= s);
        }
        let u = haar_unitary(d, &mut rng);
        let v = haar_unitary(d, &mut rng);
        // energy is linear in λ for a fixed U: pull toward the cheapest direction if needed
        let diag: Vec<f64> = (0..d)
            .map(|k| (0..d).map(|a| levels[a] * u[(a, k)].norm_sqr()).sum())
            .collect();
        let e: f64 = lambda.iter().zip(&diag).map(|(l, g)| l * g).sum();
        if e > energy {
            let (kmin, gmin) = diag
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (k, g)| if g < acc.1 { (k, g) } else { acc });
            if gmin > energy {
                continue;
            }
            let t = (e - energy) / (e - gmin);
            lambda.iter_mut().for_each(|l| *l *= 1.0 - t);
            lambda[kmin] += t;
        }
        consider(schmidt_state(&lambda, Some(&u), Some(&v)), &mut best)?;
        samples += 1;
    }
    let (value, best_witness, witness_energy) = best.expect("the ground state is always feasible");
    Ok(EcBuresEstimate {
        value,
        energy,
        samples,
        best_witness,
        witness_energy,
    })
}

// ---------------------------------------------------------------------------
// robustness profiles

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessRow {
    pub eps: f64,
    /// Lower estimate of `β_G^E(Φ, Ψ_ε)`.
    pub metric: f64,
    /// `|f(Φ) - f(Ψ_ε)|`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessProfile {
    /// Sorted by `ε`.
    pub rows: Vec<RobustnessRow>,
    /// Both columns nondecreasing in `ε` and vanishing at the smallest `ε`.
    pub pass: bool,
}

/// Settings for the metric column.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSettings {
    pub grading: Grading,
    pub energy: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Values at `ε = 0` must lie below this. The metric is a square root of
    /// a fidelity defect, so rounding shows up near `1e-8`.
    pub zero_tolerance: f64,
    /// Allowed decrease between consecutive rows.
    pub monotone_slack: f64,
}

impl ProfileSettings {
    pub fn new(grading: Grading, energy: f64) -> Self {
        Self {
            grading,
            energy,
            n_samples: 64,
            seed: 0,
            zero_tolerance: 1e-7,
            monotone_slack: 1e-9,
        }
    }
}

/// Profile of a characteristic `f` along a perturbation family `ε ↦ Ψ_ε` of `Φ`.
pub fn robustness_profile<P, F>(
    phi: &Channel,
    family: P,
    f: F,
    eps_grid: &[f64],
    settings: &ProfileSettings,
) -> Result<RobustnessProfile>
where
    P: Fn(f64) -> Result<Channel>,
    F: Fn(&Channel) -> Result<f64>,
{
    if eps_grid.is_empty() {
        return Err(domain("ε grid", "must not be empty"));
    }
    let mut grid = eps_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let base = f(phi)?;
    let rows = grid
        .iter()
        .map(|&eps| {
            let psi = family(eps)?;
            let metric = ecbures_estimate(phi, &psi, &settings.grading, settings.energy, settings.n_samples, settings.seed)?.value;
            Ok(RobustnessRow {
                eps,
                metric,
                gap: (f(&psi)? - base).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RobustnessProfile {
        pass: monotone_trend(&rows, settings),
        rows,
    })
}

fn monotone_trend(rows: &[RobustnessRow], s: &ProfileSettings) -> bool {
    let monotone = rows.windows(2).all(|w| {
        w[1].gap >= w[0].gap - s.monotone_slack && w[1].metric >= w[0].metric - s.monotone_slack
    });
    let first = rows[0];
    let last = rows[rows.len() - 1];
    let vanishes = if first.eps == 0.0 {
        first.gap <= s.zero_tolerance && first.metric <= s.zero_tolerance
    } else {
        rows.len() > 1 && first.gap < last.gap && first.metric < last.metric
    };
    monotone && vanishes
}

//! Finite-dimensional density operators and the entropic quantities built on them.
//!
//! Entropies are evaluated from Hermitian eigendecompositions. Eigenvalues in
//! `[-1e-10, 0)` are treated as round-off: they are clamped to zero and the
//! remaining spectrum is rescaled to the declared trace. Anything more negative is
//! rejected as not positive semidefinite.

mod linalg;
pub mod random;

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{check_dim, domain, Error, Result};

pub use linalg::{eigh, Eigh};
pub use num_complex::Complex64;
pub(crate) use linalg::{
    hermiticity_defect, identity, kron, max_abs_entry, orthonormalize_columns, outer,
    partial_trace_raw, trace, trace_norm_hermitian, ONE, ZERO,
};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for Hermiticity, trace and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// Eigenvalues of `σ` at or below this value count as outside its support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Support eigenvalues below this value mark a relative entropy as near-singular.
pub const NEAR_SINGULAR: f64 = 1e-8;

// ---------------------------------------------------------------------------
// scalar functions

/// `η(x) = -x ln x`, `η(0) = 0`.
pub fn eta(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("eta", format!("x = {x} must be a finite nonnegative number")));
    }
    Ok(eta_unchecked(x))
}

#[inline]
pub(crate) fn eta_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Binary entropy `h₂(p) = η(p) + η(1-p)` in nats.
pub fn h2(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain("h2", format!("p = {p} must lie in [0, 1]")));
    }
    Ok(h2_unchecked(p))
}

#[inline]
pub(crate) fn h2_unchecked(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    eta_unchecked(p) + eta_unchecked(1.0 - p)
}

/// `g(x) = (1+x) h₂(x/(1+x))`, the entropy of a geometric distribution with mean `x`.
pub fn continuity_g(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("g", format!("x = {x} must be a finite nonnegative number")));
    }
    Ok(continuity_g_unchecked(x))
}

#[inline]
pub(crate) fn continuity_g_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (1.0 + x) * h2_unchecked(x / (1.0 + x))
    }
}

/// The three scalar functions evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarValues {
    pub eta: f64,
    pub h2: Option<f64>,
    pub g: f64,
}

/// Evaluates `η`, `h₂` (only when `x ≤ 1`) and `g` at `x`.
pub fn scalar_functions(x: f64) -> Result<ScalarValues> {
    Ok(ScalarValues {
        eta: eta(x)?,
        h2: if x <= 1.0 { Some(h2(x)?) } else { None },
        g: continuity_g(x)?,
    })
}

// ---------------------------------------------------------------------------
// states

/// A Hermitian positive semidefinite operator with trace one (a state) or trace
/// at most one (the output of a trace-non-increasing operation).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    trace: f64,
}

impl DensityMatrix {
    /// Validates a unit-trace state.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::new_subnormalized(matrix)?;
        if (rho.trace - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {} is not 1", rho.trace)));
        }
        Ok(rho)
    }

    /// Validates a positive operator with trace in `[0, 1]`.
    pub fn new_subnormalized(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidState("zero-dimensional matrix".into()));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let tr = trace(&matrix).re;
        if tr < -STATE_TOLERANCE || tr > 1.0 + STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr} outside [0, 1]")));
        }
        let min_eig = eigh(&matrix).values.last().copied().unwrap_or(0.0);
        if min_eig < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self {
            matrix,
            trace: tr.max(0.0),
        })
    }

    /// Builds the operator without validation. Callers guarantee positivity up to
    /// round-off (channel outputs, convex combinations of states).
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let matrix = linalg::hermitian_part(&matrix);
        let trace = trace(&matrix).re.max(0.0);
        Self { matrix, trace }
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        let d = p.len();
        Self::new(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(p[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        Self {
            matrix: identity(dim).scale(w),
            trace: 1.0,
        }
    }

    /// `|k⟩⟨k|` in the computational basis.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Self {
            matrix: m,
            trace: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace - 1.0).abs() <= STATE_TOLERANCE
    }

    /// Eigendecomposition with clamped eigenvalues, sorted nonincreasing.
    pub fn eigh(&self) -> Eigh {
        let mut e = eigh(&self.matrix);
        clamp_spectrum(&mut e.values, self.trace);
        e
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().values
    }

    /// `ρ / Tr ρ`; `None` for the zero operator.
    pub fn normalized(&self) -> Option<DensityMatrix> {
        if self.trace <= 0.0 {
            return None;
        }
        Some(DensityMatrix {
            matrix: self.matrix.unscale(self.trace),
            trace: 1.0,
        })
    }

    /// `p ρ + (1-p) σ`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        check_dim(self.dim(), other.dim())?;
        Ok(DensityMatrix::from_matrix_unchecked(
            self.matrix.scale(p) + other.matrix.scale(1.0 - p),
        ))
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(kron(&self.matrix, &other.matrix))
    }

    /// Conjugation `U ρ U†` by a square unitary (or any contraction).
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        check_dim(self.dim(), u.ncols())?;
        Ok(DensityMatrix::from_matrix_unchecked(u * &self.matrix * u.adjoint()))
    }
}

fn clamp_spectrum(values: &mut [f64], declared_trace: f64) {
    let mut clamped = false;
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
            clamped = true;
        }
    }
    if clamped {
        let s: f64 = values.iter().sum();
        if s > 0.0 {
            let k = declared_trace / s;
            values.iter_mut().for_each(|v| *v *= k);
        }
    }
}

/// A normalized vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector {
    amplitudes: CVector,
}

impl PureStateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("vector norm {n} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes a nonzero vector.
    pub fn normalize(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(n),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = ONE;
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: outer(&self.amplitudes),
            trace: 1.0,
        }
    }
}

// ---------------------------------------------------------------------------
// entropies

/// Von Neumann entropy in nats. For a subnormalized operator `τ` this is
/// `[Tr τ] H(τ / Tr τ)`, which is zero for the zero operator.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues(), rho.trace)
}

pub(crate) fn entropy_of_spectrum(values: &[f64], trace: f64) -> f64 {
    let raw: f64 = values.iter().map(|&v| eta_unchecked(v)).sum();
    // t H(τ/t) = Σ η(λ) - η(t)
    (raw - eta_unchecked(trace)).max(0.0)
}

/// Entropy of a raw Hermitian PSD matrix, subnormalization convention included.
pub(crate) fn matrix_entropy(m: &CMatrix) -> f64 {
    let mut e = eigh(m);
    let tr = trace(m).re.max(0.0);
    clamp_spectrum(&mut e.values, tr);
    entropy_of_spectrum(&e.values, tr)
}

/// Relative entropy together with a support diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeEntropy {
    /// `H(ρ‖σ)` in nats, `+∞` when `supp ρ ⊄ supp σ`.
    pub value: f64,
    /// Set when the support of `σ` has eigenvalues in `(SUPPORT_CUTOFF, NEAR_SINGULAR]`
    /// carrying weight of `ρ`.
    pub near_singular: bool,
}

/// `H(ρ‖σ) = Tr ρ ln ρ - Tr ρ ln σ`, or `+∞` if the support condition fails.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(relative_entropy_detailed(rho, sigma)?.value)
}

pub fn relative_entropy_detailed(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<RelativeEntropy> {
    check_dim(rho.dim(), sigma.dim())?;
    Ok(relative_entropy_raw(rho.matrix(), rho.trace(), sigma.matrix(), false))
}

/// With `support_known` the caller guarantees `supp ρ ⊆ supp σ` (for example
/// `σ` is an ensemble average and `ρ` one of its members); kernel directions of
/// `σ` are then skipped instead of producing `+∞` from round-off weight.
pub(crate) fn relative_entropy_raw(
    rho: &CMatrix,
    rho_trace: f64,
    sigma: &CMatrix,
    support_known: bool,
) -> RelativeEntropy {
    let mut er = eigh(rho);
    clamp_spectrum(&mut er.values, rho_trace);
    let es = eigh(sigma);
    let tr_sigma = trace(sigma).re.max(0.0);
    let mut sigma_values = es.values.clone();
    clamp_spectrum(&mut sigma_values, tr_sigma);

    let neg_entropy: f64 = er.values.iter().map(|&l| -eta_unchecked(l)).sum();
    let mut cross = 0.0;
    let mut near_singular = false;
    let n = sigma_values.len();
    for j in 0..n {
        let v = es.vector(j);
        let weight = (v.adjoint() * rho * &v)[(0, 0)].re;
        let mu = sigma_values[j];
        if mu <= SUPPORT_CUTOFF {
            if weight > SUPPORT_CUTOFF && !support_known {
                return RelativeEntropy {
                    value: f64::INFINITY,
                    near_singular: false,
                };
            }
            continue;
        }
        if mu <= NEAR_SINGULAR && weight > SUPPORT_CUTOFF {
            near_singular = true;
        }
        cross += weight * mu.ln();
    }
    RelativeEntropy {
        value: (neg_entropy - cross).max(0.0),
        near_singular,
    }
}

// ---------------------------------------------------------------------------
// distances

/// `½‖ρ - σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    Ok(0.5 * trace_norm_hermitian(&(rho.matrix() - sigma.matrix())))
}

/// `‖√ρ √σ‖₁ = Tr √(√ρ σ √ρ)`.
pub fn fidelity_norm(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    Ok(fidelity_norm_raw(rho.matrix(), sigma.matrix()))
}

pub(crate) fn fidelity_norm_raw(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    // eigenvalues at rounding level would otherwise enter through their square roots
    let noise = |values: &[f64]| 64.0 * f64::EPSILON * values.len() as f64 * values.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let e = eigh(rho);
    let cut = noise(&e.values);
    let sqrt_rho = e.map(|l| if l > cut { l.sqrt() } else { 0.0 });
    let inner = &sqrt_rho * sigma * &sqrt_rho;
    let values = eigh(&inner).values;
    let cut = noise(&values);
    values.iter().filter(|&&l| l > cut).map(|&l| l.sqrt()).sum()
}

/// Bures distance `β(ρ,σ) = √(2(1 - ‖√ρ√σ‖₁))`, in `[0, √2]`.
pub fn bures_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let b = bures_raw(rho.matrix(), sigma.matrix());
    debug_assert!({
        let t = 0.5 * trace_norm_hermitian(&(rho.matrix() - sigma.matrix()));
        t <= b + 1e-7 && b <= (2.0 * t).sqrt() + 1e-7
    });
    Ok(b)
}

pub(crate) fn bures_raw(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let f = fidelity_norm_raw(rho, sigma).min(1.0);
    (2.0 * (1.0 - f)).max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// bipartite structure

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Traces out one factor of an operator on `C^{dims.0} ⊗ C^{dims.1}`.
pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), trace_out: Factor) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 || da * db != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: da * db,
        });
    }
    let m = partial_trace_raw(rho.matrix(), da, db, trace_out == Factor::First);
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Schmidt purification `Σ √λ_i |φ_i⟩ ⊗ |i⟩` with the reference factor second.
pub fn purify(rho: &DensityMatrix) -> PureStateVector {
    let d = rho.dim();
    let e = rho.eigh();
    let norm = rho.trace().sqrt();
    let mut v = DVector::zeros(d * d);
    for (i, &lam) in e.values.iter().enumerate() {
        let w = lam.max(0.0).sqrt() / norm;
        for a in 0..d {
            v[a * d + i] += e.vectors[(a, i)] * w;
        }
    }
    PureStateVector { amplitudes: v }
}

/// Quantum mutual information `I(A:B)` of a bipartite state.
pub fn mutual_information_bipartite(rho: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let a = partial_trace(rho, dims, Factor::Second)?;
    let b = partial_trace(rho, dims, Factor::First)?;
    Ok(von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(rho))
}

// ---------------------------------------------------------------------------
// verification records

/// Outcome of checking `0 ≤ H(pρ+(1-p)σ) - pH(ρ) - (1-p)H(σ) ≤ h₂(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingRecord {
    pub p: f64,
    pub gap: f64,
    pub h2: f64,
    pub holds: bool,
}

pub const MIXING_SLACK: f64 = 1e-9;

pub fn mixing_inequality_check(rho: &DensityMatrix, sigma: &DensityMatrix, p: f64) -> Result<MixingRecord> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p", format!("{p} must lie in (0, 1)")));
    }
    let mix = rho.mix(sigma, p)?;
    let gap = von_neumann_entropy(&mix) - p * von_neumann_entropy(rho) - (1.0 - p) * von_neumann_entropy(sigma);
    let h = h2_unchecked(p);
    Ok(MixingRecord {
        p,
        gap,
        h2: h,
        holds: gap >= -MIXING_SLACK && gap <= h + MIXING_SLACK,
    })
}

/// Matrix-level check of `2λ^ω_{2i-1} ≤ λ^ρ_i + λ^σ_i` and
/// `2λ^ω_{2i} ≤ λ^ρ_{i+1} + λ^σ_i` for `ω = ½(ρ+σ)` with non-commuting inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylMatrixRecord {
    /// Smallest value of `rhs - lhs` over all checked inequalities.
    pub worst_margin: f64,
    pub holds: bool,
}

pub fn weyl_mixture_check(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<WeylMatrixRecord> {
    check_dim(rho.dim(), sigma.dim())?;
    let lr = rho.eigenvalues();
    let ls = sigma.eigenvalues();
    let lw = rho.mix(sigma, 0.5)?.eigenvalues();
    let d = lr.len();
    let at = |v: &[f64], i: usize| if i < d { v[i] } else { 0.0 };
    let mut worst = f64::INFINITY;
    for i in 0..d {
        let odd = 2.0 * at(&lw, 2 * i);
        let even = 2.0 * at(&lw, 2 * i + 1);
        worst = worst.min(at(&lr, i) + at(&ls, i) - odd);
        worst = worst.min(at(&lr, i + 1) + at(&ls, i) - even);
    }
    Ok(WeylMatrixRecord {
        worst_margin: worst,
        holds: worst >= -1e-10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{LN_2, SQRT_2};

    fn ket(re: &[f64]) -> CVector {
        DVector::from_iterator(re.len(), re.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    #[test]
    fn scalar_function_values() {
        assert_abs_diff_eq!(h2(0.5).unwrap(), LN_2, epsilon = 1e-15);
        assert_eq!(eta(1.0).unwrap(), 0.0);
        assert_eq!(eta(0.0).unwrap(), 0.0);
        assert_eq!(h2(0.0).unwrap(), 0.0);
        assert_eq!(h2(1.0).unwrap(), 0.0);
        assert_eq!(continuity_g(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(continuity_g(1.0).unwrap(), 2.0 * LN_2, epsilon = 1e-15);
        assert!(eta(-0.1).is_err());
        assert!(h2(1.5).is_err());
        assert!(continuity_g(-1.0).is_err());
        let all = scalar_functions(2.0).unwrap();
        assert!(all.h2.is_none());
    }

    #[test]
    fn entropy_examples() {
        let pure = PureStateVector::normalize(ket(&[1.0, 1.0, 0.0])).unwrap().to_density();
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-12);
        for d in 2..6 {
            let m = DensityMatrix::maximally_mixed(d);
            assert_abs_diff_eq!(von_neumann_entropy(&m), (d as f64).ln(), epsilon = 1e-12);
        }
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let expected = -(0.75f64 * 0.75f64.ln()) - 0.25 * 0.25f64.ln();
        assert_abs_diff_eq!(von_neumann_entropy(&rho), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(von_neumann_entropy(&rho), 0.5623351446188083, epsilon = 1e-12);
    }

    #[test]
    fn subnormalized_entropy_convention() {
        let half = DensityMatrix::new_subnormalized(identity(2).scale(0.25)).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&half), 0.5 * LN_2, epsilon = 1e-14);
        let zero = DensityMatrix::new_subnormalized(DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(von_neumann_entropy(&zero), 0.0);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut m = identity(2).scale(0.5);
        m[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
        let neg = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![
            Complex64::new(1.2, 0.0),
            Complex64::new(-0.2, 0.0)
        ]));
        assert!(DensityMatrix::new(neg).is_err());
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.2, 0.1]).unwrap();
        assert_abs_diff_eq!(relative_entropy(&rho, &rho).unwrap(), 0.0, epsilon = 1e-12);
        let zero = DensityMatrix::basis_state(2, 0);
        let one = DensityMatrix::basis_state(2, 1);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(relative_entropy(&zero, &mixed).unwrap(), LN_2, epsilon = 1e-12);
        assert_eq!(relative_entropy(&zero, &one).unwrap(), f64::INFINITY);
        let near = DensityMatrix::from_diagonal(&[1.0 - 1e-9, 1e-9]).unwrap();
        let r = relative_entropy_detailed(&mixed, &near).unwrap();
        assert!(r.near_singular && r.value.is_finite());
    }

    #[test]
    fn bures_examples() {
        let zero = DensityMatrix::basis_state(2, 0);
        let one = DensityMatrix::basis_state(2, 1);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(bures_distance(&zero, &zero).unwrap(), 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(bures_distance(&zero, &one).unwrap(), SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity_norm(&zero, &mixed).unwrap(), 1.0 / SQRT_2, epsilon = 1e-12);
        let b = bures_distance(&zero, &mixed).unwrap();
        assert_abs_diff_eq!(b, (2.0 - SQRT_2).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.7653668647301795, epsilon = 1e-12);
        let t = trace_distance(&zero, &mixed).unwrap();
        assert_abs_diff_eq!(t, 0.5, epsilon = 1e-14);
        assert!(t <= b && b <= (2.0 * t).sqrt());
        assert!(matches!(
            trace_distance(&zero, &DensityMatrix::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn purification_examples() {
        let pure = DensityMatrix::basis_state(2, 1);
        let v = purify(&pure);
        let joint = v.to_density();
        let reference = partial_trace(&joint, (2, 2), Factor::First).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&reference), 0.0, epsilon = 1e-12);

        let mixed = DensityMatrix::maximally_mixed(2);
        let bell = purify(&mixed).to_density();
        let r = partial_trace(&bell, (2, 2), Factor::First).unwrap();
        assert!(max_abs_entry(&(r.matrix() - mixed.matrix())) < 1e-12);

        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let joint = purify(&rho).to_density();
        let spec = partial_trace(&joint, (2, 2), Factor::First).unwrap().eigenvalues();
        assert_abs_diff_eq!(spec[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[1], 0.25, epsilon = 1e-12);
        let back = partial_trace(&joint, (2, 2), Factor::Second).unwrap();
        assert!(max_abs_entry(&(back.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let a = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let b = DensityMatrix::from_diagonal(&[0.1, 0.2, 0.7]).unwrap();
        let ab = a.tensor(&b);
        let back = partial_trace(&ab, (2, 3), Factor::Second).unwrap();
        assert!(max_abs_entry(&(back.matrix() - a.matrix())) < 1e-14);
        let back_b = partial_trace(&ab, (2, 3), Factor::First).unwrap();
        assert!(max_abs_entry(&(back_b.matrix() - b.matrix())) < 1e-14);
        let trivial = partial_trace(&a, (2, 1), Factor::Second).unwrap();
        assert_eq!(trivial.matrix(), a.matrix());
        assert!(partial_trace(&ab, (4, 2), Factor::First).is_err());
    }

    #[test]
    fn mixing_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let r = mixing_inequality_check(&rho, &rho, 0.4).unwrap();
        assert!(r.holds && r.gap.abs() < 1e-12);
        let zero = DensityMatrix::basis_state(2, 0);
        let one = DensityMatrix::basis_state(2, 1);
        let r = mixing_inequality_check(&zero, &one, 0.5).unwrap();
        assert_abs_diff_eq!(r.gap, LN_2, epsilon = 1e-12);
        assert!(r.holds);
        assert!(mixing_inequality_check(&zero, &one, 1.0).is_err());
    }

    #[test]
    fn weyl_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        let sigma = DensityMatrix::basis_state(2, 0);
        assert!(weyl_mixture_check(&rho, &sigma).unwrap().holds);
    }
}

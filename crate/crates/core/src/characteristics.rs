//! Entropic characteristics of a channel at an input state, the classes
//! `L(C,T,D)` they belong to, and randomized verification of class membership.
//!
//! A function `f` is in `L(C,T,D)` with parameters `a_f, b_f, c±_f, t±_f` when
//!
//! ```text
//! -a_f h₂(p) ≤ f(pρ+(1-p)σ) - p f(ρ) - (1-p) f(σ) ≤ b_f h₂(p)
//! -c⁻_f H(ρ) - t⁻_f ≤ f(ρ) ≤ c⁺_f H(ρ) + t⁺_f
//! ```
//!
//! with `C = c⁻ + c⁺`, `T = t⁻ + t⁺`, `D = a + b`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;

use crate::channels::{complementary, qc_channel, tensor_with_identity, Channel, PositiveMap, Povm};
use crate::error::{check_dim, domain, Error, Result};
use crate::qcore::random::{random_density_any_rank, random_pure_state, seeded, haar_isometry};
use crate::qcore::{
    eigh, h2_unchecked, matrix_entropy, mutual_information_bipartite, orthonormalize_columns,
    purify, trace, von_neumann_entropy, CMatrix, DensityMatrix,
};

// ---------------------------------------------------------------------------
// class parameters

/// Parameters of a class `L(C,T,D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassLctd {
    pub a_f: f64,
    pub b_f: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub t_minus: f64,
    pub t_plus: f64,
}

impl ClassLctd {
    pub fn new(a_f: f64, b_f: f64, c_minus: f64, c_plus: f64, t_minus: f64, t_plus: f64) -> Result<Self> {
        let all = [a_f, b_f, c_minus, c_plus, t_minus, t_plus];
        if all.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(domain("class parameters", "must be finite and nonnegative"));
        }
        Ok(Self {
            a_f,
            b_f,
            c_minus,
            c_plus,
            t_minus,
            t_plus,
        })
    }

    pub fn c(&self) -> f64 {
        self.c_minus + self.c_plus
    }

    pub fn t(&self) -> f64 {
        self.t_minus + self.t_plus
    }

    pub fn d(&self) -> f64 {
        self.a_f + self.b_f
    }

    /// `(C, T, D)`.
    pub fn ctd(&self) -> (f64, f64, f64) {
        (self.c(), self.t(), self.d())
    }

    /// Whether a declared triple agrees with the parts.
    pub fn consistent_with(&self, c: f64, t: f64, d: f64) -> bool {
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs());
        close(self.c(), c) && close(self.t(), t) && close(self.d(), d)
    }

    /// The von Neumann entropy: `L(1,0,1)`.
    pub fn entropy() -> Self {
        Self {
            a_f: 0.0,
            b_f: 1.0,
            c_minus: 0.0,
            c_plus: 1.0,
            t_minus: 0.0,
            t_plus: 0.0,
        }
    }

    /// Output entropy or entropy exchange of an operation of Choi rank `k`: `L(1, ln k, 1)`.
    pub fn choi_rank(k: usize) -> Self {
        Self {
            t_plus: (k.max(1) as f64).ln(),
            ..Self::entropy()
        }
    }

    /// Quantum mutual information and information gain: `L(2,0,2)`.
    pub fn mutual_information() -> Self {
        Self {
            a_f: 0.0,
            b_f: 2.0,
            c_minus: 0.0,
            c_plus: 2.0,
            t_minus: 0.0,
            t_plus: 0.0,
        }
    }

    /// Coherent information: `L(2,0,2)` with the weight split between both sides.
    pub fn coherent_information() -> Self {
        Self {
            a_f: 1.0,
            b_f: 1.0,
            c_minus: 1.0,
            c_plus: 1.0,
            t_minus: 0.0,
            t_plus: 0.0,
        }
    }
}

// ---------------------------------------------------------------------------
// evaluators

/// Output entropy `H(Φ(ρ))`, with `H(τ) = [Tr τ] H(τ/Tr τ)` for subnormalized outputs.
pub fn output_entropy(phi: &Channel, rho: &DensityMatrix) -> Result<f64> {
    Ok(von_neumann_entropy(&phi.apply(rho)?))
}

/// Entropy exchange `H(Φ̂(ρ))`.
pub fn entropy_exchange(phi: &Channel, rho: &DensityMatrix) -> Result<f64> {
    check_dim(phi.dim_in(), rho.dim())?;
    Ok(von_neumann_entropy(&complementary(phi).apply(rho)?))
}

/// `I(B:R)` of `Φ⊗Id_R` applied to a purification of `ρ`.
pub fn mutual_information(phi: &Channel, rho: &DensityMatrix) -> Result<f64> {
    check_dim(phi.dim_in(), rho.dim())?;
    let d = rho.dim();
    let joint = tensor_with_identity(phi, d).apply(&purify(rho).to_density())?;
    mutual_information_bipartite(&joint, (phi.dim_out(), d))
}

/// `I_c(Φ,ρ) = I(Φ,ρ) - H(ρ)`.
pub fn coherent_information(phi: &Channel, rho: &DensityMatrix) -> Result<f64> {
    Ok(mutual_information(phi, rho)? - von_neumann_entropy(rho))
}

/// Information gain of a measurement: mutual information of its q-c channel.
pub fn information_gain(povm: &Povm, rho: &DensityMatrix) -> Result<f64> {
    mutual_information(&qc_channel(povm), rho)
}

/// Named characteristics bound to their channel or measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum Characteristic {
    Entropy,
    OutputEntropy(Channel),
    EntropyExchange(Channel),
    MutualInformation(Channel),
    CoherentInformation(Channel),
    InformationGain(Povm),
    ConstrainedHolevo(Channel),
    OneShotPrivacy(Channel),
}

impl Characteristic {
    pub fn name(&self) -> &'static str {
        match self {
            Characteristic::Entropy => "entropy",
            Characteristic::OutputEntropy(_) => "output_entropy",
            Characteristic::EntropyExchange(_) => "entropy_exchange",
            Characteristic::MutualInformation(_) => "mutual_info",
            Characteristic::CoherentInformation(_) => "coherent_info",
            Characteristic::InformationGain(_) => "info_gain",
            Characteristic::ConstrainedHolevo(_) => "constrained_holevo",
            Characteristic::OneShotPrivacy(_) => "one_shot_privacy",
        }
    }

    /// Input dimension, `None` for the entropy (any dimension).
    pub fn dim_in(&self) -> Option<usize> {
        match self {
            Characteristic::Entropy => None,
            Characteristic::InformationGain(m) => Some(m.dim()),
            Characteristic::OutputEntropy(c)
            | Characteristic::EntropyExchange(c)
            | Characteristic::MutualInformation(c)
            | Characteristic::CoherentInformation(c)
            | Characteristic::ConstrainedHolevo(c)
            | Characteristic::OneShotPrivacy(c) => Some(c.dim_in()),
        }
    }

    /// Class membership; the capacity-type characteristics carry none.
    pub fn class_params(&self) -> Option<ClassLctd> {
        match self {
            Characteristic::Entropy => Some(ClassLctd::entropy()),
            Characteristic::OutputEntropy(c) | Characteristic::EntropyExchange(c) => {
                Some(ClassLctd::choi_rank(c.choi_rank()))
            }
            Characteristic::MutualInformation(_) | Characteristic::InformationGain(_) => {
                Some(ClassLctd::mutual_information())
            }
            Characteristic::CoherentInformation(_) => Some(ClassLctd::coherent_information()),
            Characteristic::ConstrainedHolevo(_) | Characteristic::OneShotPrivacy(_) => None,
        }
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        match self {
            Characteristic::Entropy => Ok(von_neumann_entropy(rho)),
            Characteristic::OutputEntropy(c) => output_entropy(c, rho),
            Characteristic::EntropyExchange(c) => entropy_exchange(c, rho),
            Characteristic::MutualInformation(c) => mutual_information(c, rho),
            Characteristic::CoherentInformation(c) => coherent_information(c, rho),
            Characteristic::InformationGain(m) => information_gain(m, rho),
            Characteristic::ConstrainedHolevo(c) => {
                Ok(constrained_holevo(c, rho, &HolevoBudget::default())?.value)
            }
            Characteristic::OneShotPrivacy(c) => {
                Ok(one_shot_privacy(c, rho, &HolevoBudget::default())?.value)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// class verification

/// Slack allowed in both inequality families.
pub const LCTD_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LctdCounterexample {
    pub rho: DensityMatrix,
    pub sigma: Option<DensityMatrix>,
    pub p: Option<f64>,
    pub description: String,
}

/// Worst margins observed; a negative margin is a violation.
#[derive(Debug, Clone, PartialEq)]
pub struct LctdRecord {
    pub trials: usize,
    /// `min (gap + a h₂(p))`.
    pub mixing_lower_margin: f64,
    /// `min (b h₂(p) - gap)`.
    pub mixing_upper_margin: f64,
    /// `min (f(ρ) + c⁻H(ρ) + t⁻)`.
    pub bound_lower_margin: f64,
    /// `min (c⁺H(ρ) + t⁺ - f(ρ))`.
    pub bound_upper_margin: f64,
    pub counterexample: Option<LctdCounterexample>,
    pub holds: bool,
}

/// Samples `trials` random triples `(ρ, σ, p)` and checks both inequality families.
pub fn verify_lctd(
    f: &Characteristic,
    claim: &ClassLctd,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<LctdRecord> {
    if let Some(d) = f.dim_in() {
        check_dim(d, dim)?;
    }
    let mut rng = seeded(seed);
    let mut rec = LctdRecord {
        trials,
        mixing_lower_margin: f64::INFINITY,
        mixing_upper_margin: f64::INFINITY,
        bound_lower_margin: f64::INFINITY,
        bound_upper_margin: f64::INFINITY,
        counterexample: None,
        holds: true,
    };
    for t in 0..trials {
        let rho = sample_state(dim, t, &mut rng);
        let sigma = sample_state(dim, t + 1, &mut rng);
        let p: f64 = rng.gen_range(0.01..0.99);
        let fr = f.evaluate(&rho)?;
        let fs = f.evaluate(&sigma)?;
        let mix = rho.mix(&sigma, p)?;
        let fm = f.evaluate(&mix)?;
        let gap = fm - p * fr - (1.0 - p) * fs;
        let h = h2_unchecked(p);
        let lower = gap + claim.a_f * h;
        let upper = claim.b_f * h - gap;
        rec.mixing_lower_margin = rec.mixing_lower_margin.min(lower);
        rec.mixing_upper_margin = rec.mixing_upper_margin.min(upper);
        if (lower < -LCTD_SLACK || upper < -LCTD_SLACK) && rec.counterexample.is_none() {
            rec.counterexample = Some(LctdCounterexample {
                rho: rho.clone(),
                sigma: Some(sigma.clone()),
                p: Some(p),
                description: format!("mixing inequality: gap {gap:.3e}, h2 {h:.3e}"),
            });
        }
        for (state, value) in [(&rho, fr), (&sigma, fs)] {
            let hs = von_neumann_entropy(state);
            let lo = value + claim.c_minus * hs + claim.t_minus;
            let hi = claim.c_plus * hs + claim.t_plus - value;
            rec.bound_lower_margin = rec.bound_lower_margin.min(lo);
            rec.bound_upper_margin = rec.bound_upper_margin.min(hi);
            if (lo < -LCTD_SLACK || hi < -LCTD_SLACK) && rec.counterexample.is_none() {
                rec.counterexample = Some(LctdCounterexample {
                    rho: state.clone(),
                    sigma: None,
                    p: None,
                    description: format!("entropy bound: f = {value:.6e}, H = {hs:.6e}"),
                });
            }
        }
    }
    rec.holds = rec.counterexample.is_none();
    Ok(rec)
}

/// Every fourth sample is pure, the rest have uniformly drawn rank.
fn sample_state<R: Rng + ?Sized>(dim: usize, t: usize, rng: &mut R) -> DensityMatrix {
    if t % 4 == 3 {
        random_pure_state(dim, rng).to_density()
    } else {
        random_density_any_rank(dim, rng)
    }
}

// ---------------------------------------------------------------------------
// positive maps

/// `f_Φ(ρ) = ‖Φ(ρ)‖₁ f(Φ(ρ)/‖Φ(ρ)‖₁)`, and `0` when `Φ(ρ) = 0`.
pub fn appendix_f_phi<F, M>(f: F, phi: &M, rho: &DensityMatrix) -> Result<f64>
where
    F: Fn(&DensityMatrix) -> Result<f64>,
    M: PositiveMap + ?Sized,
{
    check_dim(phi.dim_in(), rho.dim())?;
    let out = phi.map(rho.matrix());
    // positive output: the trace norm is the trace
    let norm = trace(&out).re;
    if norm <= 1e-14 {
        return Ok(0.0);
    }
    let state = DensityMatrix::from_matrix_unchecked(out.unscale(norm));
    Ok(norm * f(&state)?)
}

// ---------------------------------------------------------------------------
// constrained Holevo capacity and one-shot privacy

/// Settings of the ensemble optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoBudget {
    pub max_iters: usize,
    /// Stop when the objective improved by less than `tolerance` over `window` iterations.
    pub tolerance: f64,
    pub window: usize,
    /// Random restarts in addition to the eigen-ensemble start.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for HolevoBudget {
    fn default() -> Self {
        Self {
            max_iters: 400,
            tolerance: 1e-7,
            window: 25,
            restarts: 2,
            seed: 0,
        }
    }
}

/// Best ensemble found and the optimizer trace.
#[derive(Debug, Clone, PartialEq)]
pub struct HolevoEstimate {
    /// A lower estimate of the supremum: the objective of `ensemble`.
    pub value: f64,
    /// `(p_k, ρ_k)` with `Σ p_k ρ_k = ρ`.
    pub ensemble: Vec<(f64, DensityMatrix)>,
    /// Objective after each accepted step of the best run.
    pub trace: Vec<f64>,
    pub converged: bool,
}

/// `C̄(Φ,ρ)`: the largest Holevo quantity `χ({p_k, Φ(ρ_k)})` over ensembles of
/// pure states with average `ρ` (at most `rank(ρ)²` members).
pub fn constrained_holevo(phi: &Channel, rho: &DensityMatrix, budget: &HolevoBudget) -> Result<HolevoEstimate> {
    check_dim(phi.dim_in(), rho.dim())?;
    let est = optimize_ensemble(alloc::vec![(phi.clone(), 1.0)], rho, 1, budget)?;
    let bound = von_neumann_entropy(rho);
    if est.value > bound + 1e-8 {
        return Err(Error::Numerical(format!(
            "Holevo estimate {} exceeds H(ρ) = {}",
            est.value, bound
        )));
    }
    Ok(est)
}

/// `C̄_p(Φ,ρ)`: the largest `χ({p_k,Φ(ρ_k)}) - χ({p_k,Φ̂(ρ_k)})` over ensembles
/// with average `ρ`.
///
/// For pure-state ensembles the difference does not depend on the ensemble (it
/// equals the coherent information), so members are rank-two mixtures of the
/// optimizer's pure components; the trivial ensemble keeps the estimate `≥ 0`.
pub fn one_shot_privacy(phi: &Channel, rho: &DensityMatrix, budget: &HolevoBudget) -> Result<HolevoEstimate> {
    check_dim(phi.dim_in(), rho.dim())?;
    let maps = alloc::vec![(phi.clone(), 1.0), (complementary(phi), -1.0)];
    let mut best = optimize_ensemble(maps.clone(), rho, 1, budget)?;
    if rho.eigenvalues().iter().filter(|&&l| l > 1e-12).count() > 1 {
        let mixed = optimize_ensemble(maps, rho, 2, budget)?;
        if mixed.value > best.value {
            best = mixed;
        }
    }
    if best.value < 0.0 {
        best = HolevoEstimate {
            value: 0.0,
            ensemble: alloc::vec![(1.0, rho.clone())],
            trace: best.trace,
            converged: true,
        };
    }
    Ok(best)
}

/// Objective `Σ_Ψ sign_Ψ [H(Ψ(ρ)) - Σ_k S(Ψ(σ_k))]` where `σ_k` are the members of
/// the ensemble and `S(τ) = [Tr τ] H(τ/Tr τ)`.
///
/// Ensembles are parametrized by a Stiefel point `W` (`m × r`, `W†W = I`): with
/// `B = Σ √λ_i |φ_i⟩⟨i|` over the support of `ρ`, row `j` gives the vector
/// `ψ̃_j = B wⱼ` (`wⱼ` = transpose of the row), and consecutive groups of `group`
/// rows are summed into one member. `Σ_j ψ̃_j ψ̃_j† = ρ` for every such `W`.
struct EnsembleObjective {
    maps: Vec<(Channel, f64)>,
    b: CMatrix,
    group: usize,
    base: f64,
}

const LOG_REG: f64 = 1e-10;

impl EnsembleObjective {
    fn members(&self, w: &CMatrix) -> Vec<CMatrix> {
        let d = self.b.nrows();
        let psi = &self.b * w.transpose(); // column j = ψ̃_j
        (0..w.nrows() / self.group)
            .map(|k| {
                let cols = psi.columns(k * self.group, self.group);
                let mut s = DMatrix::zeros(d, d);
                s += &cols * cols.adjoint();
                s
            })
            .collect()
    }

    fn value(&self, w: &CMatrix) -> f64 {
        let members = self.members(w);
        let mut v = self.base;
        for (map, sign) in &self.maps {
            for m in &members {
                v -= sign * matrix_entropy(&map.apply_raw(m));
            }
        }
        v
    }

    /// Euclidean gradient with respect to `conj(W)`.
    fn gradient(&self, w: &CMatrix) -> CMatrix {
        let members = self.members(w);
        let (m, r) = w.shape();
        let mut g = DMatrix::zeros(m, r);
        for (map, sign) in &self.maps {
            for (k, sigma) in members.iter().enumerate() {
                let out = map.apply_raw(sigma);
                let t = trace(&out).re;
                if t <= 1e-300 {
                    continue;
                }
                // d/dX of -S(Ψ(BXB†)) is B†Ψ*(ln ω - ln t)B
                let log_out = eigh(&out).map(|l| l.max(LOG_REG).ln() - t.ln());
                let lk = self.b.adjoint() * map.adjoint_apply(&log_out) * &self.b;
                for j in k * self.group..(k + 1) * self.group {
                    let wj = w.row(j).transpose();
                    let gj = (&lk * wj).scale(*sign);
                    for i in 0..r {
                        g[(j, i)] += gj[i];
                    }
                }
            }
        }
        g
    }

    fn ensemble(&self, w: &CMatrix) -> Vec<(f64, DensityMatrix)> {
        self.members(w)
            .into_iter()
            .filter_map(|s| {
                let p = trace(&s).re;
                (p > 1e-14).then(|| (p, DensityMatrix::from_matrix_unchecked(s.unscale(p))))
            })
            .collect()
    }
}

fn optimize_ensemble(
    maps: Vec<(Channel, f64)>,
    rho: &DensityMatrix,
    group: usize,
    budget: &HolevoBudget,
) -> Result<HolevoEstimate> {
    let e = rho.eigh();
    let support: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i] > 1e-12).collect();
    let r = support.len();
    let d = rho.dim();
    let b = DMatrix::from_fn(d, r, |a, i| e.vectors[(a, support[i])] * e.values[support[i]].sqrt());
    let base = maps
        .iter()
        .map(|(map, sign)| sign * matrix_entropy(&map.apply_raw(rho.matrix())))
        .sum();
    let obj = EnsembleObjective { maps, b, group, base };
    let m = (r * r).max(1) * group;

    // eigen-ensemble: W = [I; 0], one eigenvector per member
    let mut w0 = DMatrix::zeros(m, r);
    for i in 0..r {
        w0[(i * group, i)] = Complex64::new(1.0, 0.0);
    }
    let mut starts = alloc::vec![w0.clone()];
    let mut rng = seeded(budget.seed);
    for _ in 0..budget.restarts {
        let mix = haar_isometry(m, r, &mut rng);
        let blend = (&w0 + mix.scale(0.5)).clone();
        starts.push(orthonormalize_columns(&blend).unwrap_or(mix));
    }
    let mut best: Option<(f64, CMatrix, Vec<f64>, bool)> = None;
    for start in starts {
        let (v, w, tr, conv) = stiefel_ascent(&obj, start, budget);
        if best.as_ref().map_or(true, |b| v > b.0) {
            best = Some((v, w, tr, conv));
        }
    }
    let (value, w, trace, converged) = best.expect("at least one start");
    Ok(HolevoEstimate {
        value,
        ensemble: obj.ensemble(&w),
        trace,
        converged,
    })
}

fn stiefel_ascent(obj: &EnsembleObjective, mut w: CMatrix, budget: &HolevoBudget) -> (f64, CMatrix, Vec<f64>, bool) {
    let mut value = obj.value(&w);
    let mut trace = alloc::vec![value];
    let mut step = 1.0;
    let mut converged = false;
    for _ in 0..budget.max_iters {
        let g = obj.gradient(&w);
        let wg = w.adjoint() * &g;
        let sym = (&wg + wg.adjoint()).scale(0.5);
        let xi = &g - &w * sym;
        let norm2 = xi.norm_squared();
        if norm2 < 1e-24 {
            converged = true;
            break;
        }
        let mut s = step;
        let mut accepted = false;
        while s > 1e-14 {
            let cand = &w + xi.scale(s);
            if let Some(q) = orthonormalize_columns(&cand) {
                let v = obj.value(&q);
                if v >= value + 1e-4 * s * norm2 {
                    w = q;
                    value = v;
                    accepted = true;
                    step = (2.0 * s).min(1e3);
                    break;
                }
            }
            s *= 0.5;
        }
        if !accepted {
            converged = true;
            break;
        }
        trace.push(value);
        let n = trace.len();
        if n > budget.window && value - trace[n - 1 - budget.window] < budget.tolerance {
            converged = true;
            break;
        }
    }
    (value, w, trace, converged)
}

/// Holevo quantity `χ({p_k, Ψ(ρ_k)}) = H(Σ p_k Ψ(ρ_k)) - Σ p_k H(Ψ(ρ_k))`.
pub fn holevo_of_images(phi: &Channel, ensemble: &[(f64, DensityMatrix)]) -> Result<f64> {
    let d = phi.dim_out();
    let mut avg = DMatrix::zeros(d, d);
    let mut inner = 0.0;
    for (p, rho) in ensemble {
        let out = phi.apply(rho)?;
        inner += p * von_neumann_entropy(&out);
        avg += out.matrix().scale(*p);
    }
    Ok(matrix_entropy(&avg) - inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{random_channel, random_operation, ScaledTranspose};
    use crate::qcore::random::random_density;
    use crate::qcore::{h2, identity, PureStateVector, ONE};
    use alloc::vec;
    use approx::assert_relative_eq;
    use core::f64::consts::LN_2;

    fn diag(p: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(p).unwrap()
    }

    #[test]
    fn class_parameters() {
        assert_eq!(ClassLctd::entropy().ctd(), (1.0, 0.0, 1.0));
        assert_eq!(ClassLctd::mutual_information().ctd(), (2.0, 0.0, 2.0));
        assert_eq!(ClassLctd::coherent_information().ctd(), (2.0, 0.0, 2.0));
        let k3 = ClassLctd::choi_rank(3);
        assert!(k3.consistent_with(1.0, 3f64.ln(), 1.0));
        assert!(!k3.consistent_with(1.0, 0.0, 1.0));
        assert!(ClassLctd::new(-1.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn output_entropy_examples() {
        let rho = diag(&[0.75, 0.25]);
        assert_relative_eq!(
            output_entropy(&Channel::identity(2), &rho).unwrap(),
            von_neumann_entropy(&rho),
            epsilon = 1e-14
        );
        let c = Channel::constant(&DensityMatrix::maximally_mixed(3), 2);
        assert_relative_eq!(output_entropy(&c, &rho).unwrap(), 3f64.ln(), epsilon = 1e-12);
        let plus = PureStateVector::normalize(nalgebra::DVector::from_vec(vec![ONE, ONE])).unwrap();
        assert_relative_eq!(
            output_entropy(&Channel::dephasing(2), &plus.to_density()).unwrap(),
            LN_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn entropy_exchange_examples() {
        let mut rng = seeded(3);
        let rho = random_density(3, 3, &mut rng);
        assert!(entropy_exchange(&Channel::identity(3), &rho).unwrap() < 1e-12);
        let u = crate::qcore::random::haar_unitary(3, &mut rng);
        assert!(entropy_exchange(&Channel::unitary(u).unwrap(), &rho).unwrap() < 1e-12);
        assert_relative_eq!(
            entropy_exchange(&Channel::dephasing(2), &DensityMatrix::maximally_mixed(2)).unwrap(),
            LN_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn mutual_and_coherent_information_examples() {
        let mut rng = seeded(5);
        let rho = random_density(3, 3, &mut rng);
        let h = von_neumann_entropy(&rho);
        let id = Channel::identity(3);
        assert_relative_eq!(mutual_information(&id, &rho).unwrap(), 2.0 * h, epsilon = 1e-10);
        assert_relative_eq!(coherent_information(&id, &rho).unwrap(), h, epsilon = 1e-10);
        let c = Channel::constant(&random_density(2, 2, &mut rng), 3);
        assert!(mutual_information(&c, &rho).unwrap().abs() < 1e-10);
        assert_relative_eq!(coherent_information(&c, &rho).unwrap(), -h, epsilon = 1e-10);
        let phi = random_channel(3, 3, 2, 1).unwrap();
        let pure = random_pure_state(3, &mut rng).to_density();
        assert!(mutual_information(&phi, &pure).unwrap().abs() < 1e-10);
        assert!(coherent_information(&phi, &pure).unwrap().abs() < 1e-10);
    }

    #[test]
    fn mutual_information_identity_cross_check() {
        let mut rng = seeded(7);
        for t in 0..30 {
            let phi = random_channel(3, 2 + t % 3, 2 + t % 3, t as u64).unwrap();
            let rho = random_density_any_rank(3, &mut rng);
            let direct = mutual_information(&phi, &rho).unwrap();
            let via = von_neumann_entropy(&rho) + output_entropy(&phi, &rho).unwrap()
                - entropy_exchange(&phi, &rho).unwrap();
            assert!((direct - via).abs() < 1e-8);
            assert!(direct >= -1e-10 && direct <= 2.0 * von_neumann_entropy(&rho) + 1e-10);
            let ic = coherent_information(&phi, &rho).unwrap();
            assert!(ic.abs() <= von_neumann_entropy(&rho) + 1e-10);
        }
    }

    #[test]
    fn information_gain_examples() {
        let basis = Povm::computational_basis(2);
        assert_relative_eq!(
            information_gain(&basis, &DensityMatrix::maximally_mixed(2)).unwrap(),
            LN_2,
            epsilon = 1e-12
        );
        let trivial = Povm::new(vec![identity(2)]).unwrap();
        assert!(information_gain(&trivial, &diag(&[0.4, 0.6])).unwrap().abs() < 1e-12);
        let pure = DensityMatrix::basis_state(2, 0);
        assert!(information_gain(&Povm::trine(), &pure).unwrap().abs() < 1e-12);
    }

    #[test]
    fn constrained_holevo_examples() {
        let rho = diag(&[0.5, 0.3, 0.2]);
        let b = HolevoBudget::default();
        let est = constrained_holevo(&Channel::identity(3), &rho, &b).unwrap();
        assert_relative_eq!(est.value, von_neumann_entropy(&rho), epsilon = 1e-9);
        let c = Channel::constant(&DensityMatrix::maximally_mixed(2), 3);
        assert!(constrained_holevo(&c, &rho, &b).unwrap().value.abs() < 1e-9);
        let m = qc_channel(&Povm::computational_basis(2));
        let est = constrained_holevo(&m, &DensityMatrix::maximally_mixed(2), &b).unwrap();
        assert_relative_eq!(est.value, LN_2, epsilon = 1e-7);
        // the reported ensemble averages to ρ and reproduces the value
        let mut avg = DMatrix::zeros(3, 3);
        let id_est = constrained_holevo(&Channel::identity(3), &rho, &b).unwrap();
        for (p, s) in &id_est.ensemble {
            avg += s.matrix().scale(*p);
        }
        assert!(crate::qcore::max_abs_entry(&(avg - rho.matrix())) < 1e-10);
        let chi = holevo_of_images(&Channel::identity(3), &id_est.ensemble).unwrap();
        assert_relative_eq!(chi, id_est.value, epsilon = 1e-9);
    }

    #[test]
    fn constrained_holevo_beats_two_state_brute_force() {
        // q-c channel of a basis measurement at a state that is not diagonal in
        // that basis: compare with a scan over two-member pure ensembles
        let m = qc_channel(&Povm::computational_basis(2));
        let mut rng = seeded(11);
        let rho = random_density(2, 2, &mut rng);
        let est = constrained_holevo(&m, &rho, &HolevoBudget::default()).unwrap();
        assert!(est.value <= von_neumann_entropy(&rho) + 1e-10);
        let e = rho.eigh();
        let b = DMatrix::from_fn(2, 2, |a, i| e.vectors[(a, i)] * e.values[i].sqrt());
        let mut brute: f64 = 0.0;
        let n = 200;
        for i in 0..n {
            for j in 0..n {
                let th = core::f64::consts::PI * i as f64 / n as f64;
                let ph = 2.0 * core::f64::consts::PI * j as f64 / n as f64;
                let u = DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        Complex64::new(th.cos(), 0.0),
                        Complex64::from_polar(th.sin(), ph),
                        -Complex64::from_polar(th.sin(), -ph),
                        Complex64::new(th.cos(), 0.0),
                    ],
                );
                let mut ens = Vec::new();
                for k in 0..2 {
                    let v = &b * u.row(k).transpose();
                    let p = v.norm_squared();
                    if p > 1e-14 {
                        ens.push((p, DensityMatrix::from_matrix_unchecked((&v * v.adjoint()).unscale(p))));
                    }
                }
                brute = brute.max(holevo_of_images(&m, &ens).unwrap());
            }
        }
        assert!(est.value >= brute - 1e-6, "{} < {}", est.value, brute);
    }

    #[test]
    fn one_shot_privacy_examples() {
        let rho = diag(&[0.6, 0.4]);
        let b = HolevoBudget::default();
        let est = one_shot_privacy(&Channel::identity(2), &rho, &b).unwrap();
        assert_relative_eq!(est.value, von_neumann_entropy(&rho), epsilon = 1e-8);
        let c = Channel::constant(&DensityMatrix::maximally_mixed(2), 2);
        assert!(one_shot_privacy(&c, &rho, &b).unwrap().value.abs() < 1e-9);
        // symmetric channel: V|ψ⟩ = (|ψ⟩|0⟩ + |0⟩|ψ⟩)/norm-type dilation with
        // output and environment exchanged by a swap; χ terms cancel
        let sym = symmetric_channel();
        assert!(complementary(&sym).completeness_defect() < 1e-12);
        let est = one_shot_privacy(&sym, &rho, &b).unwrap();
        assert!(est.value.abs() < 1e-7, "{}", est.value);
    }

    /// Qubit channel whose canonical dilation is symmetric under swapping output
    /// and environment, so the complementary channel equals the channel.
    fn symmetric_channel() -> Channel {
        // V = (|00⟩⟨0| + (|01⟩+|10⟩)/√2 ⟨1|)
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let v = DMatrix::from_row_slice(
            4,
            2,
            &[
                ONE,
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let kraus = (0..2)
            .map(|i| DMatrix::from_fn(2, 2, |b, a| v[(b * 2 + i, a)]))
            .collect();
        Channel::new(kraus).unwrap()
    }

    #[test]
    fn privacy_bounded_by_holevo() {
        let rho = diag(&[0.5, 0.3, 0.2]);
        let phi = random_channel(3, 3, 2, 23).unwrap();
        let b = HolevoBudget::default();
        let p = one_shot_privacy(&phi, &rho, &b).unwrap();
        let c = constrained_holevo(&phi, &rho, &b).unwrap();
        assert!(p.value <= c.value + 1e-7);
        assert!(c.value <= von_neumann_entropy(&rho) + 1e-10);
    }

    #[test]
    fn verify_lctd_examples() {
        let r = verify_lctd(&Characteristic::Entropy, &ClassLctd::entropy(), 3, 200, 1).unwrap();
        assert!(r.holds, "{r:?}");
        let phi = random_channel(3, 3, 2, 2).unwrap();
        let f = Characteristic::MutualInformation(phi.clone());
        assert!(verify_lctd(&f, &f.class_params().unwrap(), 3, 100, 2).unwrap().holds);
        let f = Characteristic::CoherentInformation(phi.clone());
        assert!(verify_lctd(&f, &f.class_params().unwrap(), 3, 100, 3).unwrap().holds);
        let f = Characteristic::OutputEntropy(phi.clone());
        assert_eq!(f.class_params().unwrap(), ClassLctd::choi_rank(2));
        assert!(verify_lctd(&f, &f.class_params().unwrap(), 3, 100, 4).unwrap().holds);
        let f = Characteristic::EntropyExchange(phi);
        assert!(verify_lctd(&f, &f.class_params().unwrap(), 3, 100, 5).unwrap().holds);
        let f = Characteristic::InformationGain(Povm::trine());
        assert!(verify_lctd(&f, &f.class_params().unwrap(), 2, 100, 6).unwrap().holds);
        // a false claim is caught
        let tight = ClassLctd::new(0.0, 0.0, 0.0, 0.5, 0.0, 0.0).unwrap();
        let r = verify_lctd(&Characteristic::Entropy, &tight, 3, 50, 7).unwrap();
        assert!(!r.holds && r.counterexample.is_some());
    }

    #[test]
    fn appendix_examples() {
        let mut rng = seeded(8);
        let rho = random_density(3, 3, &mut rng);
        let h = |s: &DensityMatrix| Ok(von_neumann_entropy(s));
        assert_relative_eq!(
            appendix_f_phi(h, &Channel::identity(3), &rho).unwrap(),
            von_neumann_entropy(&rho),
            epsilon = 1e-12
        );
        let half = Channel::new_operation(vec![identity(3).scale(0.5f64.sqrt())]).unwrap();
        assert_relative_eq!(
            appendix_f_phi(h, &half, &rho).unwrap(),
            0.5 * von_neumann_entropy(&rho),
            epsilon = 1e-12
        );
        let mut k = DMatrix::zeros(3, 3);
        k[(0, 0)] = ONE;
        let proj = Channel::new_operation(vec![k]).unwrap();
        assert_eq!(appendix_f_phi(h, &proj, &DensityMatrix::basis_state(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn appendix_mixing_inequality_for_positive_maps() {
        let mut rng = seeded(9);
        let h = |s: &DensityMatrix| Ok(von_neumann_entropy(s));
        for t in 0..200 {
            let rho = random_density_any_rank(3, &mut rng);
            let sigma = random_density_any_rank(3, &mut rng);
            let p: f64 = rng.gen_range(0.01..0.99);
            let gap = |m: &dyn Fn(&DensityMatrix) -> f64| {
                m(&rho.mix(&sigma, p).unwrap()) - p * m(&rho) - (1.0 - p) * m(&sigma)
            };
            let g = if t % 2 == 0 {
                let op = random_operation(3, 3, 2, &mut rng).unwrap();
                gap(&|s| appendix_f_phi(h, &op, s).unwrap())
            } else {
                let tr = ScaledTranspose::new(3, rng.gen_range(0.1..1.0)).unwrap();
                gap(&|s| appendix_f_phi(h, &tr, s).unwrap())
            };
            assert!(g >= -1e-10 && g <= h2(p).unwrap() + 1e-10);
        }
    }

    #[test]
    fn nested_binary_entropy_inequality() {
        let n = 200;
        for i in 1..n {
            for j in 1..n {
                let x = i as f64 / n as f64;
                let y = j as f64 / n as f64;
                if x + y > 1.0 {
                    continue;
                }
                let lhs = (x + y) * h2(x / (x + y)).unwrap();
                assert!(lhs <= h2(x).unwrap() + 1e-12);
            }
        }
    }
}

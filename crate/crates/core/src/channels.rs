//! Quantum channels and operations in Kraus form.
//!
//! The canonical Stinespring dilation is `V|ψ⟩ = Σ_i K_i|ψ⟩ ⊗ |i_E⟩`, with the
//! output factor first and the environment second, so the complementary channel
//! is the partial trace of `VρV†` over the output.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;

use crate::error::{check_dim, domain, Error, Result};
use crate::qcore::random::{gaussian_matrix, haar_isometry, haar_unitary, random_pure_state, seeded};
use crate::qcore::{
    eigh, entropy_of_spectrum, identity, kron, max_abs_entry, partial_trace_raw, trace, CMatrix,
    DensityMatrix, PureStateVector, STATE_TOLERANCE, ONE, ZERO,
};

/// Tolerance of the Kraus completeness relation.
pub const KRAUS_TOLERANCE: f64 = 1e-10;

/// A completely positive map `ρ ↦ Σ_i K_i ρ K_i†` with `Σ K_i†K_i ≤ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    trace_preserving: bool,
}

impl Channel {
    /// A trace-preserving channel; `Σ K_i†K_i = I` to `KRAUS_TOLERANCE`.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let ch = Self::new_operation(kraus)?;
        if !ch.trace_preserving {
            return Err(Error::InvalidChannel(format!(
                "Kraus completeness violated by {:.3e}",
                ch.completeness_defect()
            )));
        }
        Ok(ch)
    }

    /// A trace-non-increasing operation; `Σ K_i†K_i ≤ I`.
    pub fn new_operation(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidChannel("zero dimension".into()));
        }
        for k in &kraus {
            if k.shape() != (dim_out, dim_in) {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operator of shape {:?}, expected {:?}",
                    k.shape(),
                    (dim_out, dim_in)
                )));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidChannel("non-finite Kraus entry".into()));
            }
        }
        let mut ch = Self {
            dim_in,
            dim_out,
            kraus,
            trace_preserving: false,
        };
        let s = ch.kraus_sum();
        let defect = max_abs_entry(&(&s - identity(dim_in)));
        if defect <= KRAUS_TOLERANCE {
            ch.trace_preserving = true;
        } else {
            let top = eigh(&s).values[0];
            if top > 1.0 + KRAUS_TOLERANCE {
                return Err(Error::InvalidChannel(format!(
                    "Σ K†K has eigenvalue {top} > 1"
                )));
            }
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(identity(d)).expect("identity is unitary")
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(alloc::vec![u])
    }

    /// `ρ ↦ Tr(ρ) σ₀`.
    pub fn constant(sigma: &DensityMatrix, dim_in: usize) -> Self {
        let e = sigma.eigh();
        let mut kraus = Vec::new();
        for (j, &l) in e.values.iter().enumerate() {
            if l <= 0.0 {
                continue;
            }
            let v = e.vector(j).scale(l.sqrt());
            for a in 0..dim_in {
                let mut k = DMatrix::zeros(sigma.dim(), dim_in);
                k.set_column(a, &v);
                kraus.push(k);
            }
        }
        let mut ch = Self {
            dim_in,
            dim_out: sigma.dim(),
            kraus,
            trace_preserving: true,
        };
        ch.trace_preserving = max_abs_entry(&(ch.kraus_sum() - identity(dim_in))) <= KRAUS_TOLERANCE;
        ch
    }

    /// Complete dephasing in the computational basis.
    pub fn dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut k = DMatrix::zeros(d, d);
                k[(i, i)] = ONE;
                k
            })
            .collect();
        Self::new(kraus).expect("projectors sum to the identity")
    }

    /// `ρ ↦ (1-p)ρ + p Tr(ρ) I/d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("depolarizing parameter", format!("{p} not in [0, 1]")));
        }
        // (1-p)ρ + p/d Σ_{ab} E_ab ρ E_ab†
        let mut kraus = alloc::vec![identity(d).scale((1.0 - p).sqrt())];
        let w = (p / d as f64).sqrt();
        for a in 0..d {
            for b in 0..d {
                let mut k = DMatrix::zeros(d, d);
                k[(a, b)] = Complex64::new(w, 0.0);
                kraus.push(k);
            }
        }
        Self::new(kraus)
    }

    /// Qubit Pauli channel `(1-px-py-pz)ρ + px XρX + py YρY + pz ZρZ`.
    pub fn pauli(px: f64, py: f64, pz: f64) -> Result<Self> {
        let p0 = 1.0 - px - py - pz;
        if [px, py, pz, p0].iter().any(|&p| !(p >= -1e-15)) {
            return Err(domain("Pauli probabilities", "must be nonnegative and sum to at most 1"));
        }
        let [i, x, y, z] = pauli_matrices();
        let kraus = [(p0, i), (px, x), (py, y), (pz, z)]
            .into_iter()
            .map(|(p, m)| m.scale(p.max(0.0).sqrt()))
            .collect();
        Self::new(kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `Σ K_i†K_i`.
    pub fn kraus_sum(&self) -> CMatrix {
        self.kraus
            .iter()
            .fold(DMatrix::zeros(self.dim_in, self.dim_in), |acc, k| acc + k.adjoint() * k)
    }

    /// `max |Σ K†K - I|`.
    pub fn completeness_defect(&self) -> f64 {
        max_abs_entry(&(self.kraus_sum() - identity(self.dim_in)))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.dim_in, rho.dim())?;
        Ok(DensityMatrix::from_matrix_unchecked(self.apply_raw(rho.matrix())))
    }

    /// `Σ K X K†` for an arbitrary operator `X`.
    pub fn apply_raw(&self, x: &CMatrix) -> CMatrix {
        let mut out = DMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Heisenberg picture `Φ*(Y) = Σ K† Y K`.
    pub fn adjoint_apply(&self, y: &CMatrix) -> CMatrix {
        let mut out = DMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += k.adjoint() * y * k;
        }
        out
    }

    /// Rank of the Choi matrix, from the Gram matrix `Tr K_i†K_j` of the Kraus list.
    pub fn choi_rank(&self) -> usize {
        let n = self.kraus.len();
        let g = DMatrix::from_fn(n, n, |i, j| {
            self.kraus[i]
                .iter()
                .zip(self.kraus[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
        });
        let values = eigh(&g).values;
        let top = values.first().copied().unwrap_or(0.0);
        values.iter().filter(|&&v| v > 1e-10 * top.max(1.0)).count()
    }

    /// Equivalent Kraus list `K'_j = Σ_i W_{ji} K_i` for an isometry `W`
    /// (`rows ≥ #Kraus`); the channel is unchanged.
    pub fn rotate_kraus(&self, w: &CMatrix) -> Result<Self> {
        if w.ncols() != self.kraus.len() || w.nrows() < w.ncols() {
            return Err(Error::InvalidChannel("rotation must be an isometry on the Kraus index".into()));
        }
        if max_abs_entry(&(w.adjoint() * w - identity(w.ncols()))) > 1e-10 {
            return Err(Error::InvalidChannel("rotation is not an isometry".into()));
        }
        let kraus = (0..w.nrows())
            .map(|j| {
                self.kraus
                    .iter()
                    .enumerate()
                    .fold(DMatrix::zeros(self.dim_out, self.dim_in), |acc, (i, k)| acc + k * w[(j, i)])
            })
            .collect();
        Ok(Self {
            kraus,
            ..self.clone()
        })
    }

    /// Sequential composition `other ∘ self`.
    pub fn then(&self, other: &Channel) -> Result<Self> {
        check_dim(other.dim_in, self.dim_out)?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Self::new_operation(kraus)
    }
}

fn pauli_matrices() -> [CMatrix; 4] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        identity(2),
        DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        DMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
        DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)]),
    ]
}

// ---------------------------------------------------------------------------
// dilations

/// Isometry `V : C^{dim_in} → C^{dim_out} ⊗ C^{dim_env}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    pub v: CMatrix,
    pub dim_out: usize,
    pub dim_env: usize,
}

impl Dilation {
    /// `VρV†` on output ⊗ environment.
    pub fn joint(&self, rho: &CMatrix) -> CMatrix {
        &self.v * rho * self.v.adjoint()
    }

    pub fn output(&self, rho: &CMatrix) -> CMatrix {
        partial_trace_raw(&self.joint(rho), self.dim_out, self.dim_env, false)
    }

    pub fn environment(&self, rho: &CMatrix) -> CMatrix {
        partial_trace_raw(&self.joint(rho), self.dim_out, self.dim_env, true)
    }

    /// `V†V - I`, small for an isometry (for an operation it is `Σ K†K - I`).
    pub fn isometry_defect(&self) -> f64 {
        max_abs_entry(&(self.v.adjoint() * &self.v - identity(self.v.ncols())))
    }
}

/// Canonical dilation with environment dimension equal to the number of Kraus operators.
pub fn stinespring(phi: &Channel) -> Dilation {
    let k = phi.kraus.len();
    let v = DMatrix::from_fn(phi.dim_out * k, phi.dim_in, |row, a| {
        let (b, i) = (row / k, row % k);
        phi.kraus[i][(b, a)]
    });
    Dilation {
        v,
        dim_out: phi.dim_out,
        dim_env: k,
    }
}

/// Complementary channel `ρ ↦ Tr_B VρV†` of the canonical dilation.
pub fn complementary(phi: &Channel) -> Channel {
    complementary_of(&stinespring(phi), phi.trace_preserving)
}

/// Complementary channel of an arbitrary dilation.
pub fn complementary_of(dilation: &Dilation, trace_preserving: bool) -> Channel {
    let (dout, denv) = (dilation.dim_out, dilation.dim_env);
    let din = dilation.v.ncols();
    // (F_b)_{i,a} = ⟨b ⊗ i| V |a⟩
    let kraus = (0..dout)
        .map(|b| DMatrix::from_fn(denv, din, |i, a| dilation.v[(b * denv + i, a)]))
        .collect();
    Channel {
        dim_in: din,
        dim_out: denv,
        kraus,
        trace_preserving,
    }
}

/// `Φ ⊗ Id_R`, acting on `C^{dim_in} ⊗ C^{d_r}`.
pub fn tensor_with_identity(phi: &Channel, d_r: usize) -> Channel {
    let id = identity(d_r);
    Channel {
        dim_in: phi.dim_in * d_r,
        dim_out: phi.dim_out * d_r,
        kraus: phi.kraus.iter().map(|k| kron(k, &id)).collect(),
        trace_preserving: phi.trace_preserving,
    }
}

// ---------------------------------------------------------------------------
// measurements

/// Positive operator valued measure on `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let dim = effects
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| Error::InvalidChannel("POVM without effects".into()))?;
        let mut sum = DMatrix::zeros(dim, dim);
        for e in &effects {
            if e.shape() != (dim, dim) {
                return Err(Error::InvalidChannel("effects must share one square shape".into()));
            }
            if crate::qcore::hermiticity_defect(e) > STATE_TOLERANCE {
                return Err(Error::InvalidChannel("effect is not Hermitian".into()));
            }
            if eigh(e).values.last().copied().unwrap_or(0.0) < -STATE_TOLERANCE {
                return Err(Error::InvalidChannel("effect is not positive semidefinite".into()));
            }
            sum += e;
        }
        if max_abs_entry(&(sum - identity(dim))) > KRAUS_TOLERANCE {
            return Err(Error::InvalidChannel("effects do not sum to the identity".into()));
        }
        Ok(Self { dim, effects })
    }

    pub fn computational_basis(d: usize) -> Self {
        let effects = (0..d)
            .map(|i| {
                let mut m = DMatrix::zeros(d, d);
                m[(i, i)] = ONE;
                m
            })
            .collect();
        Self { dim: d, effects }
    }

    /// Three qubit effects `(2/3)|ψ_k⟩⟨ψ_k|` at 120° on a great circle.
    pub fn trine() -> Self {
        let effects = (0..3)
            .map(|k| {
                let t = core::f64::consts::PI * k as f64 / 3.0;
                let v = nalgebra::DVector::from_vec(alloc::vec![
                    Complex64::new(t.cos(), 0.0),
                    Complex64::new(t.sin(), 0.0),
                ]);
                (&v * v.adjoint()).scale(2.0 / 3.0)
            })
            .collect();
        Self { dim: 2, effects }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        check_dim(self.dim, rho.dim())?;
        Ok(self.effects.iter().map(|m| trace(&(m * rho.matrix())).re).collect())
    }
}

/// Quantum-classical channel `ρ ↦ Σ_i Tr(M_i ρ)|i⟩⟨i|`.
pub fn qc_channel(povm: &Povm) -> Channel {
    let n = povm.effects.len();
    let mut kraus = Vec::new();
    for (i, m) in povm.effects.iter().enumerate() {
        let e = eigh(m);
        for (j, &l) in e.values.iter().enumerate() {
            if l <= 1e-14 {
                continue;
            }
            // K = √l |i⟩⟨m_j|
            let row = e.vector(j).adjoint().scale(l.sqrt());
            let mut k = DMatrix::zeros(n, povm.dim);
            k.set_row(i, &row);
            kraus.push(k);
        }
    }
    let mut ch = Channel {
        dim_in: povm.dim,
        dim_out: n,
        kraus,
        trace_preserving: true,
    };
    ch.trace_preserving = ch.completeness_defect() <= KRAUS_TOLERANCE;
    ch
}

// ---------------------------------------------------------------------------
// random channels

/// Channel with `k` Kraus operators cut from a Haar isometry `C^{dim_in} → C^{dim_out·k}`.
///
/// Requires `dim_out·k ≥ dim_in`, the condition for such an isometry to exist.
pub fn random_channel(dim_in: usize, dim_out: usize, k: usize, seed: u64) -> Result<Channel> {
    random_channel_with(dim_in, dim_out, k, &mut seeded(seed))
}

pub fn random_channel_with<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    k: usize,
    rng: &mut R,
) -> Result<Channel> {
    if k == 0 || dim_in == 0 || dim_out == 0 {
        return Err(domain("channel shape", "dimensions and Choi rank must be positive"));
    }
    if dim_out * k < dim_in {
        return Err(domain(
            "channel shape",
            format!("no isometry from dimension {dim_in} into {dim_out}·{k}"),
        ));
    }
    let v = haar_isometry(dim_out * k, dim_in, rng);
    let dil = Dilation {
        v,
        dim_out,
        dim_env: k,
    };
    let kraus = (0..k)
        .map(|i| DMatrix::from_fn(dim_out, dim_in, |b, a| dil.v[(b * k + i, a)]))
        .collect();
    Ok(Channel {
        dim_in,
        dim_out,
        kraus,
        trace_preserving: true,
    })
}

/// Random trace-non-increasing operation with `k` Kraus operators: a Haar
/// channel precomposed with the contraction `W diag(c) W†`, `c_j ∈ [0, 1]`.
pub fn random_operation<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    k: usize,
    rng: &mut R,
) -> Result<Channel> {
    let base = random_channel_with(dim_in, dim_out, k, rng)?;
    let w = haar_unitary(dim_in, rng);
    let c: Vec<f64> = (0..dim_in).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let diag = DMatrix::from_fn(dim_in, dim_in, |i, j| if i == j { Complex64::new(c[i], 0.0) } else { ZERO });
    let contraction = &w * diag * w.adjoint();
    let kraus: Vec<CMatrix> = base.kraus.iter().map(|kk| kk * &contraction).collect();
    let trace_preserving = c.iter().all(|&x| (x - 1.0).abs() < 1e-15);
    Ok(Channel {
        dim_in,
        dim_out,
        kraus,
        trace_preserving,
    })
}

/// `ln k`, the bound on output entropies of pure states for Choi rank `k`.
pub fn choi_rank_entropy_bound(phi: &Channel) -> f64 {
    (phi.choi_rank() as f64).ln()
}

// ---------------------------------------------------------------------------
// maximal output entropy over pure states

/// Best pure input found by [`hp_max_estimate`] and its output entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct HpMaxEstimate {
    /// A lower bound on `sup_ψ H(Φ(|ψ⟩⟨ψ|))`.
    pub value: f64,
    pub argmax: PureStateVector,
}

/// Regularization of `ln ω` at the boundary of the state space.
const LOG_FLOOR: f64 = 1e-14;

fn output_entropy_pure(phi: &Channel, psi: &nalgebra::DVector<Complex64>) -> f64 {
    let w = phi.apply_raw(&(psi * psi.adjoint()));
    let e = eigh(&w);
    let t = trace(&w).re.max(0.0);
    entropy_of_spectrum(&e.values.iter().map(|v| v.max(0.0)).collect::<Vec<_>>(), t)
}

/// Multi-start projected gradient ascent of `H(Φ(|ψ⟩⟨ψ|))` over unit vectors.
///
/// Starts are the computational basis vectors followed by `n_starts` seeded
/// random vectors.
/// The returned value is attained by `argmax`, so it is a certified lower bound.
pub fn hp_max_estimate(phi: &Channel, n_starts: usize, seed: u64) -> HpMaxEstimate {
    let d = phi.dim_in;
    let mut rng = seeded(seed);
    let mut starts: Vec<nalgebra::DVector<Complex64>> = (0..d)
        .map(|k| PureStateVector::basis(d, k).amplitudes().clone())
        .collect();
    for _ in 0..n_starts {
        starts.push(random_pure_state(d, &mut rng).amplitudes().clone());
    }
    let mut best_value = f64::NEG_INFINITY;
    let mut best = starts[0].clone();
    for start in starts {
        let (v, psi) = ascend(phi, start);
        if v > best_value {
            best_value = v;
            best = psi;
        }
    }
    HpMaxEstimate {
        value: best_value.max(0.0),
        argmax: PureStateVector::normalize(best).expect("unit vector"),
    }
}

fn ascend(phi: &Channel, mut psi: nalgebra::DVector<Complex64>) -> (f64, nalgebra::DVector<Complex64>) {
    let mut value = output_entropy_pure(phi, &psi);
    let mut step = 0.5;
    for _ in 0..500 {
        let w = phi.apply_raw(&(&psi * psi.adjoint()));
        let t = trace(&w).re.max(LOG_FLOOR);
        let e = eigh(&w);
        // gradient of Σ η(λ) - η(t): -ln ω + ln t
        let g_out = e.map(|l| -(l.max(LOG_FLOOR)).ln() + t.ln());
        let a = phi.adjoint_apply(&g_out);
        let a_psi = &a * &psi;
        let along = psi.dotc(&a_psi);
        let grad = a_psi - &psi * along;
        let gnorm = grad.norm();
        if gnorm < 1e-12 {
            break;
        }
        let mut improved = false;
        let mut s = step;
        while s > 1e-12 {
            let cand = (&psi + &grad * Complex64::new(s, 0.0)).normalize();
            let v = output_entropy_pure(phi, &cand);
            if v > value + 1e-4 * s * gnorm * gnorm {
                psi = cand;
                let gain = v - value;
                value = v;
                improved = true;
                step = (s * 2.0).min(4.0);
                if gain < 1e-14 {
                    return (value, psi);
                }
                break;
            }
            s *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (value, psi)
}

// ---------------------------------------------------------------------------
// positive maps

/// A positive linear map on operators; not necessarily completely positive.
pub trait PositiveMap {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn map(&self, x: &CMatrix) -> CMatrix;
}

impl PositiveMap for Channel {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn map(&self, x: &CMatrix) -> CMatrix {
        self.apply_raw(x)
    }
}

/// `X ↦ c Xᵀ` with `c ∈ (0, 1]`: positive and trace-non-increasing, not completely positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTranspose {
    pub dim: usize,
    pub scale: f64,
}

impl ScaledTranspose {
    pub fn new(dim: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(domain("transpose scale", format!("{scale} not in (0, 1]")));
        }
        Ok(Self { dim, scale })
    }
}

impl PositiveMap for ScaledTranspose {
    fn dim_in(&self) -> usize {
        self.dim
    }

    fn dim_out(&self) -> usize {
        self.dim
    }

    fn map(&self, x: &CMatrix) -> CMatrix {
        x.transpose().scale(self.scale)
    }
}

/// Random `Ginibre`-type Hermitian test operator, used by linearity checks.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(d, d, rng);
    (&g + g.adjoint()).scale(0.5)
}

//! Eigenvalue sequences of states, gradings, and the series tests that decide
//! whether a state has finite energy with respect to a grading.
//!
//! Sequences are indexed from 1, matching the rank parameter `r` of a truncation:
//! `eigenvalue(1)` is the largest eigenvalue and `tail(r) = Σ_{i>r} λ_i`.
//!
//! Three spectrum families are supported:
//!
//! * `Finite(p)` – an explicit nonincreasing probability vector.
//! * `Geometric(s)` – `λ_i = (1-s) s^{i-1}`, with the closed-form tail `s^r`.
//! * `PowerLog(q)` – `λ_i ∝ 1/(i lnᵠ i)` for `i ≥ 2`. Since `ln 1 = 0`, the first
//!   weight is set equal to the second one (`λ_1 = λ_2`), which keeps the sequence
//!   nonincreasing and lets the normalization constant be absorbed into
//!   `λ_1`. Tails use the integral `∫_a^∞ dx/(x lnᵠ x) = ln^{1-q}(a)/(q-1)` plus
//!   Euler-Maclaurin corrections, so they stay accurate far beyond any prefix that
//!   could be summed directly.
//!
//! Divergence verdicts are two-sided: partial sums up to `DIVERGENCE_PREFIX` terms
//! are reported as evidence, and the verdict itself comes from an integral
//! comparison of the tail. A series the tests cannot classify is reported as
//! inconclusive rather than guessed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{domain, Error, Result};

/// Number of terms summed as evidence for a divergence verdict.
pub const DIVERGENCE_PREFIX: usize = 1_000_000;

/// Number of terms summed directly before switching to an integral tail.
const DIRECT_TERMS: usize = 2000;

/// Tolerance for partial-sum comparisons in majorization checks.
pub const MAJORIZATION_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_PRECISION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumKind {
    Finite(Vec<f64>),
    Geometric { ratio: f64 },
    PowerLog { exponent: f64 },
}

/// A nonincreasing probability sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    kind: SpectrumKind,
    precision: f64,
    // Σ of the unnormalized PowerLog weights (1 for the other kinds).
    normalizer: f64,
}

impl Spectrum {
    /// Validates an explicit spectrum: nonnegative, nonincreasing, summing to one.
    pub fn finite(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(domain("spectrum", "empty probability vector"));
        }
        if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(domain("spectrum", "entries must be finite and nonnegative"));
        }
        if p.windows(2).any(|w| w[1] > w[0]) {
            return Err(domain("spectrum", "entries must be nonincreasing"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(domain("spectrum", format!("entries sum to {total}, not 1")));
        }
        Ok(Self {
            kind: SpectrumKind::Finite(p),
            precision: DEFAULT_PRECISION,
            normalizer: 1.0,
        })
    }

    /// Sorts the entries into nonincreasing order before validating.
    pub fn finite_unsorted(mut p: Vec<f64>) -> Result<Self> {
        p.sort_by(|a, b| b.total_cmp(a));
        Self::finite(p)
    }

    pub fn geometric(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(domain("geometric ratio", format!("{ratio} must lie in (0, 1)")));
        }
        Ok(Self {
            kind: SpectrumKind::Geometric { ratio },
            precision: DEFAULT_PRECISION,
            normalizer: 1.0,
        })
    }

    /// `λ_i ∝ 1/(i lnᵠ i)`; normalizable only for `q > 1`.
    pub fn power_log(exponent: f64) -> Result<Self> {
        if !(exponent > 1.0) || !exponent.is_finite() {
            return Err(domain(
                "power-log exponent",
                format!("{exponent} must exceed 1 for a normalizable spectrum"),
            ));
        }
        let normalizer = log_power_weight(2.0, exponent) + log_power_tail_sum(exponent, 2);
        Ok(Self {
            kind: SpectrumKind::PowerLog { exponent },
            precision: DEFAULT_PRECISION,
            normalizer,
        })
    }

    pub fn with_precision(mut self, precision: f64) -> Self {
        self.precision = precision;
        self
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    /// Number of nonzero entries; `None` for infinite rank.
    pub fn rank(&self) -> Option<usize> {
        match &self.kind {
            SpectrumKind::Finite(p) => Some(p.iter().filter(|&&x| x > 0.0).count()),
            _ => None,
        }
    }

    /// `λ_i` for `i ≥ 1`.
    pub fn eigenvalue(&self, i: usize) -> f64 {
        assert!(i >= 1, "eigenvalues are indexed from 1");
        match &self.kind {
            SpectrumKind::Finite(p) => p.get(i - 1).copied().unwrap_or(0.0),
            SpectrumKind::Geometric { ratio } => (1.0 - ratio) * ratio.powi((i - 1) as i32),
            SpectrumKind::PowerLog { exponent } => {
                log_power_weight(i.max(2) as f64, *exponent) / self.normalizer
            }
        }
    }

    /// The first `n` eigenvalues.
    pub fn head(&self, n: usize) -> Vec<f64> {
        match &self.kind {
            SpectrumKind::Geometric { ratio } => {
                let mut out = Vec::with_capacity(n);
                let mut v = 1.0 - ratio;
                for _ in 0..n {
                    out.push(v);
                    v *= ratio;
                }
                out
            }
            _ => (1..=n).map(|i| self.eigenvalue(i)).collect(),
        }
    }

    /// `Σ_{i>r} λ_i`. `tail(0) = 1`.
    pub fn tail(&self, r: usize) -> f64 {
        if r == 0 {
            return 1.0;
        }
        match &self.kind {
            SpectrumKind::Finite(p) => p.iter().skip(r).sum(),
            SpectrumKind::Geometric { ratio } => ratio.powi(r as i32),
            SpectrumKind::PowerLog { exponent } => {
                log_power_tail_sum(*exponent, r + 1) / self.normalizer
            }
        }
    }

    /// `c_r = Σ_{i≤r} λ_i`.
    pub fn head_mass(&self, r: usize) -> f64 {
        match &self.kind {
            SpectrumKind::Finite(p) => p.iter().take(r).sum(),
            _ => 1.0 - self.tail(r),
        }
    }
}

/// `tail_sum` as a free function.
pub fn tail_sum(spec: &Spectrum, r: usize) -> f64 {
    spec.tail(r)
}

/// Renormalized rank-`r` truncation `λ_i / c_r`, `i ≤ r`.
pub fn truncate(spec: &Spectrum, r: usize) -> Result<Spectrum> {
    if r == 0 {
        return Err(domain("truncation rank", "r must be at least 1"));
    }
    if let Some(rank) = spec.rank() {
        if r > rank {
            return Err(Error::RankExceeded { requested: r, rank });
        }
    }
    let head = spec.head(r);
    let c = spec.head_mass(r);
    if !(c > 0.0) {
        return Err(Error::Numerical(format!("head mass {c} vanishes at r = {r}")));
    }
    let p: Vec<f64> = head.iter().map(|&x| x / c).collect();
    Ok(Spectrum {
        kind: SpectrumKind::Finite(p),
        precision: spec.precision,
        normalizer: 1.0,
    })
}

// ---------------------------------------------------------------------------
// gradings

#[derive(Debug, Clone, PartialEq)]
pub enum GradingKind {
    /// `g_i = i`.
    Linear,
    /// `g_i = lnᵠ i`, so `g_1 = 0`.
    PolyLog { exponent: f64 },
    /// Explicit finite list. Levels beyond the list do not exist: they behave as
    /// `g_i = +∞` (no weight in partition functions, infinite energy if populated).
    Explicit(Vec<f64>),
}

/// A nondecreasing nonnegative sequence `g_i + offset`, the eigenvalues of a
/// diagonal Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Grading {
    kind: GradingKind,
    offset: f64,
}

impl Grading {
    pub fn linear() -> Self {
        Self {
            kind: GradingKind::Linear,
            offset: 0.0,
        }
    }

    pub fn poly_log(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(domain("poly-log exponent", format!("{exponent} must be positive")));
        }
        Ok(Self {
            kind: GradingKind::PolyLog { exponent },
            offset: 0.0,
        })
    }

    pub fn explicit(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(domain("grading", "explicit grading needs at least one level"));
        }
        if levels.iter().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return Err(domain("grading", "levels must be finite and nonnegative"));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("grading", "levels must be nondecreasing"));
        }
        Ok(Self {
            kind: GradingKind::Explicit(levels),
            offset: 0.0,
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Result<Self> {
        if !(offset >= 0.0) || !offset.is_finite() {
            return Err(domain("grading offset", format!("{offset} must be nonnegative")));
        }
        self.offset = offset;
        Ok(self)
    }

    pub fn kind(&self) -> &GradingKind {
        &self.kind
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `g_i` for `i ≥ 1`; `+∞` past the end of an explicit list.
    pub fn value(&self, i: usize) -> f64 {
        assert!(i >= 1, "grading levels are indexed from 1");
        self.base(i) + self.offset
    }

    fn base(&self, i: usize) -> f64 {
        match &self.kind {
            GradingKind::Linear => i as f64,
            GradingKind::PolyLog { exponent } => (i as f64).ln().powf(*exponent),
            GradingKind::Explicit(levels) => levels.get(i - 1).copied().unwrap_or(f64::INFINITY),
        }
    }

    /// Number of levels, `None` when infinite.
    pub fn levels(&self) -> Option<usize> {
        match &self.kind {
            GradingKind::Explicit(levels) => Some(levels.len()),
            _ => None,
        }
    }

    /// The spectral infimum `g_1`.
    pub fn ground(&self) -> f64 {
        self.value(1)
    }

    /// Increments `d_1 = g_1`, `d_n = g_n - g_{n-1}` for `n ≤ count`.
    pub fn increments(&self, count: usize) -> Vec<f64> {
        let mut prev = 0.0;
        (1..=count)
            .map(|n| {
                let g = self.value(n);
                let d = g - prev;
                prev = g;
                d
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// series evidence

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// Result of a two-sided series test.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEvidence {
    pub verdict: SeriesVerdict,
    /// Value of the series when it converges.
    pub value: Option<f64>,
    /// Partial sum over the first `terms` terms.
    pub partial_sum: f64,
    pub terms: usize,
    /// Bounds on the remainder after `terms` terms (`+∞` upper bound on divergence).
    pub tail_lower: f64,
    pub tail_upper: f64,
}

impl SeriesEvidence {
    fn exact(value: f64, terms: usize) -> Self {
        Self {
            verdict: SeriesVerdict::Converges,
            value: Some(value),
            partial_sum: value,
            terms,
            tail_lower: 0.0,
            tail_upper: 0.0,
        }
    }

    fn divergent(partial_sum: f64, terms: usize) -> Self {
        Self {
            verdict: SeriesVerdict::Diverges,
            value: None,
            partial_sum,
            terms,
            tail_lower: f64::INFINITY,
            tail_upper: f64::INFINITY,
        }
    }

    /// The value on the extended real line: `+∞` unless the series converges.
    pub fn extended(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }

    fn shifted(mut self, offset: f64) -> Self {
        if let Some(v) = self.value.as_mut() {
            *v += offset;
        }
        self.partial_sum += offset;
        self
    }
}

/// `1/(x lnᵠ x)`.
fn log_power_weight(x: f64, q: f64) -> f64 {
    1.0 / (x * x.ln().powf(q))
}

/// `∫_a^∞ dx/(x lnᵉ x) = ln^{1-e}(a)/(e-1)` for `e > 1`, `a > 1`.
fn log_power_integral(e: f64, a: f64) -> f64 {
    if e <= 1.0 {
        return f64::INFINITY;
    }
    a.ln().powf(1.0 - e) / (e - 1.0)
}

/// `Σ_{i≥start} 1/(i lnᵉ i)` for `e > 1`, `start ≥ 2`: a direct prefix followed by
/// the integral with two Euler-Maclaurin corrections.
fn log_power_tail_sum(e: f64, start: usize) -> f64 {
    let start = start.max(2);
    let end = start + DIRECT_TERMS;
    let direct: f64 = (start..end).rev().map(|i| log_power_weight(i as f64, e)).sum();
    direct + euler_maclaurin_log_power(e, end as f64)
}

/// `Σ_{i≥a} 1/(i lnᵉ i) ≈ ∫_a^∞ f + f(a)/2 - f'(a)/12`.
fn euler_maclaurin_log_power(e: f64, a: f64) -> f64 {
    let l = a.ln();
    let f = log_power_weight(a, e);
    let df = -(l + e) / (a * a * l.powf(e + 1.0));
    log_power_integral(e, a) + 0.5 * f - df / 12.0
}

/// Sums `term(i)` for `i = from..DIVERGENCE_PREFIX` as divergence evidence.
fn divergence_evidence(from: usize, term: impl Fn(f64) -> f64) -> SeriesEvidence {
    let s: f64 = (from..=DIVERGENCE_PREFIX).map(|i| term(i as f64)).sum();
    SeriesEvidence::divergent(s, DIVERGENCE_PREFIX)
}

/// `Σ_i λ_i g_i` with a convergence verdict.
pub fn pairing_energy(spec: &Spectrum, grad: &Grading) -> SeriesEvidence {
    pairing_base(spec, grad).shifted(grad.offset)
}

fn pairing_base(spec: &Spectrum, grad: &Grading) -> SeriesEvidence {
    if let (Some(levels), rank) = (grad.levels(), spec.rank()) {
        let populated_beyond = match rank {
            Some(_) => spec.head(spec_len(spec)).iter().skip(levels).any(|&x| x > 0.0),
            None => true,
        };
        if populated_beyond {
            let s: f64 = (1..=levels).map(|i| spec.eigenvalue(i) * grad.base(i)).sum();
            return SeriesEvidence::divergent(s, levels);
        }
    }
    match (&spec.kind, &grad.kind) {
        (SpectrumKind::Finite(p), _) => {
            let s = p
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0.0)
                .map(|(i, &x)| x * grad.base(i + 1))
                .sum();
            SeriesEvidence::exact(s, p.len())
        }
        (SpectrumKind::Geometric { ratio }, GradingKind::Linear) => {
            SeriesEvidence::exact(1.0 / (1.0 - ratio), 0)
        }
        (SpectrumKind::Geometric { ratio }, GradingKind::PolyLog { exponent }) => {
            geometric_times_log_power(*ratio, *exponent, 0.0, 1.0)
        }
        (SpectrumKind::PowerLog { exponent: p }, GradingKind::Linear) => {
            let z = spec.normalizer;
            let mut ev = divergence_evidence(2, |x| x * log_power_weight(x, *p) / z);
            ev.partial_sum += spec.eigenvalue(1);
            ev
        }
        (SpectrumKind::PowerLog { exponent: p }, GradingKind::PolyLog { exponent: q }) => {
            // λ_i lnᵠ i = 1/(Z i ln^{p-q} i) for i ≥ 2; the i = 1 term vanishes.
            let z = spec.normalizer;
            let e = p - q;
            if e <= 1.0 {
                divergence_evidence(2, |x| x.ln().powf(*q) * log_power_weight(x, *p) / z)
            } else {
                let n = DIRECT_TERMS + 2;
                let s: f64 = (2..n).map(|i| log_power_weight(i as f64, e)).sum::<f64>() / z;
                let lower = log_power_integral(e, (n + 1) as f64) / z;
                let upper = log_power_integral(e, n as f64) / z + log_power_weight(n as f64, e) / z;
                let tail = euler_maclaurin_log_power(e, n as f64) / z;
                SeriesEvidence {
                    verdict: SeriesVerdict::Converges,
                    value: Some(s + tail),
                    partial_sum: s,
                    terms: n - 1,
                    tail_lower: lower,
                    tail_upper: upper,
                }
            }
        }
        (_, GradingKind::Explicit(_)) => unreachable!("infinite-rank spectra populate every level"),
    }
}

fn spec_len(spec: &Spectrum) -> usize {
    match &spec.kind {
        SpectrumKind::Finite(p) => p.len(),
        _ => 0,
    }
}

/// `Σ_i c (1-s) s^{i-1} (lnᵠ i)^power`, summed until the ratio-test tail bound
/// is negligible. Consecutive ratios `s (ln(i+1)/ln i)^{q·power}` decrease towards
/// `s`, so once a ratio drops below one the remainder is bounded by a geometric
/// series.
fn geometric_times_log_power(s: f64, q: f64, shift: f64, power: f64) -> SeriesEvidence {
    let term = |i: usize| -> f64 {
        let l = (i as f64).ln().powf(q);
        (1.0 - s) * s.powi((i - 1) as i32) * (l + shift).powf(power)
    };
    let mut sum = 0.0;
    let mut i = 1;
    loop {
        let t = term(i);
        sum += t;
        if i >= 3 {
            let next = term(i + 1);
            let after = term(i + 2);
            if next == 0.0 {
                return SeriesEvidence {
                    verdict: SeriesVerdict::Converges,
                    value: Some(sum),
                    partial_sum: sum,
                    terms: i,
                    tail_lower: 0.0,
                    tail_upper: 0.0,
                };
            }
            let ratio = after / next;
            if ratio < 1.0 {
                let bound = next / (1.0 - ratio);
                if bound <= 1e-17 * sum.max(f64::MIN_POSITIVE) || i > 100_000 {
                    return SeriesEvidence {
                        verdict: SeriesVerdict::Converges,
                        value: Some(sum + 0.5 * (next + bound)),
                        partial_sum: sum,
                        terms: i,
                        tail_lower: next,
                        tail_upper: bound,
                    };
                }
            }
        }
        i += 1;
    }
}

// ---------------------------------------------------------------------------
// FA diagnostics

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl From<SeriesVerdict> for Verdict {
    fn from(v: SeriesVerdict) -> Self {
        match v {
            SeriesVerdict::Converges => Verdict::Holds,
            SeriesVerdict::Diverges => Verdict::Fails,
            SeriesVerdict::Inconclusive => Verdict::Inconclusive,
        }
    }
}

/// Finite-energy evidence for a spectrum against a witness grading.
///
/// A failing verdict only says that the energy diverges for `grading_used`; it is
/// never a statement that no admissible grading exists.
#[derive(Debug, Clone, PartialEq)]
pub struct FaReport {
    pub verdict: Verdict,
    pub evidence: SeriesEvidence,
    /// `Σ λ_i g_i`, `+∞` on divergence.
    pub pairing_energy: f64,
    pub grading_used: Grading,
    pub notes: String,
}

/// Tests `Σ λ_i lnᵠ i < ∞` for `q > 2`, which is sufficient for the FA-property.
pub fn check_spcond(spec: &Spectrum, q: f64) -> Result<FaReport> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(domain(
            "log-moment exponent",
            format!("q = {q}; the poly-log grading has a vanishing Gibbs tail only for q > 2"),
        ));
    }
    let grading = Grading::poly_log(q)?;
    Ok(fa_report(spec, grading))
}

/// Finite-energy report for an arbitrary witness grading.
pub fn fa_report(spec: &Spectrum, grading: Grading) -> FaReport {
    let evidence = pairing_energy(spec, &grading);
    let verdict = Verdict::from(evidence.verdict);
    let notes = match verdict {
        Verdict::Holds => format!(
            "energy {:.12e} is finite for the witness grading",
            evidence.extended()
        ),
        Verdict::Fails => format!(
            "energy diverges for this grading (partial sum {:.6} over {} terms); no verdict about other gradings",
            evidence.partial_sum, evidence.terms
        ),
        Verdict::Inconclusive => String::from("series test inconclusive"),
    };
    FaReport {
        verdict,
        pairing_energy: evidence.extended(),
        evidence,
        grading_used: grading,
        notes,
    }
}

/// Outcome of `Σ λ_iᵠ < ∞`, with the cross-check against the log-moment test.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDominatedReport {
    pub verdict: Verdict,
    pub evidence: SeriesEvidence,
    /// Whether a holding verdict is matched by `check_spcond(spec, 3)` holding.
    pub spcond_consistent: bool,
}

/// Tests whether `Tr ρᵠ = Σ λ_iᵠ` is finite for `q ∈ (0, 1)`.
pub fn check_power_dominated(spec: &Spectrum, q: f64) -> Result<PowerDominatedReport> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain("power exponent", format!("q = {q} must lie in (0, 1)")));
    }
    let evidence = match &spec.kind {
        SpectrumKind::Finite(p) => {
            SeriesEvidence::exact(p.iter().filter(|&&x| x > 0.0).map(|x| x.powf(q)).sum(), p.len())
        }
        SpectrumKind::Geometric { ratio } => {
            SeriesEvidence::exact((1.0 - ratio).powf(q) / (1.0 - ratio.powf(q)), 0)
        }
        SpectrumKind::PowerLog { exponent } => {
            // λ_iᵠ = (Z i lnᵖ i)^{-q}; the integral of x^{-q} ln^{-pq} x diverges for q < 1.
            let z = spec.normalizer;
            let mut ev = divergence_evidence(2, |x| (log_power_weight(x, *exponent) / z).powf(q));
            ev.partial_sum += spec.eigenvalue(1).powf(q);
            ev
        }
    };
    let verdict = Verdict::from(evidence.verdict);
    let spcond_consistent = match verdict {
        Verdict::Holds => check_spcond(spec, 3.0)?.verdict == Verdict::Holds,
        _ => true,
    };
    Ok(PowerDominatedReport {
        verdict,
        evidence,
        spcond_consistent,
    })
}

// ---------------------------------------------------------------------------
// majorization

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Majorization {
    Majorizes,
    /// First `n` at which `Σ_{i≤n} a_i < Σ_{i≤n} b_i`.
    FailsAt(usize),
    /// All partial sums up to `checked` agree but the remainder is not decidable.
    Inconclusive { checked: usize },
}

/// Does `a` majorize `b`? Partial sums are compared with `MAJORIZATION_TOLERANCE`.
pub fn majorizes(a: &Spectrum, b: &Spectrum, n_max: usize) -> Majorization {
    let n_full = match (a.rank(), b.rank()) {
        (Some(_), Some(_)) => n_max.min(spec_len(a).max(spec_len(b))),
        _ => n_max,
    };
    let ha = a.head(n_full);
    let hb = b.head(n_full);
    let (mut sa, mut sb) = (0.0, 0.0);
    for n in 0..n_full {
        sa += ha[n];
        sb += hb[n];
        if sa < sb - MAJORIZATION_TOLERANCE {
            return Majorization::FailsAt(n + 1);
        }
    }
    if a == b {
        return Majorization::Majorizes;
    }
    // Beyond n_full: Σ_{i≤n} a ≥ Σ_{i≤n} b  ⟺  tail_a(n) ≤ tail_b(n).
    let a_done = matches!(a.rank(), Some(r) if r <= n_full);
    let b_done = matches!(b.rank(), Some(r) if r <= n_full);
    if a_done || (b_done && a.tail(n_full) <= MAJORIZATION_TOLERANCE) {
        return Majorization::Majorizes;
    }
    if let (SpectrumKind::Geometric { ratio: ra }, SpectrumKind::Geometric { ratio: rb }) = (&a.kind, &b.kind) {
        return if ra <= rb {
            Majorization::Majorizes
        } else {
            // tail ratio^n of a eventually exceeds that of b only if ra > rb
            let mut n = n_full.max(1);
            while ra.powi(n as i32) <= rb.powi(n as i32) + MAJORIZATION_TOLERANCE {
                n += 1;
            }
            Majorization::FailsAt(n)
        };
    }
    Majorization::Inconclusive { checked: n_full }
}

// ---------------------------------------------------------------------------
// mixtures and products

/// One row of the eigenvalue inequalities for `ω = ½(ρ+σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylRow {
    pub i: usize,
    /// `2λ^ω_{2i-1}`.
    pub odd: f64,
    /// `2λ^ω_{2i}`.
    pub even: f64,
    /// `λ^ρ_i + λ^σ_i`.
    pub rhs: f64,
    /// `λ^ρ_{i+1} + λ^σ_i`, the sharper bound for the even entry.
    pub sharp_even_rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylRecord {
    pub rows: Vec<WeylRow>,
    pub holds: bool,
}

/// Eigenvalues of the commuting realization of `½(ρ+σ)`: both states diagonal in
/// a common basis with nonincreasing diagonals, so `λ^ω_j = ½(λ^ρ_j + λ^σ_j)`.
pub fn commuting_mixture(rho: &Spectrum, sigma: &Spectrum, n: usize) -> Vec<f64> {
    rho.head(n)
        .iter()
        .zip(sigma.head(n))
        .map(|(a, b)| 0.5 * (a + b))
        .collect()
}

/// Checks `2λ^ω_{2i-1} ≤ λ^ρ_i + λ^σ_i` and `2λ^ω_{2i} ≤ λ^ρ_{i+1} + λ^σ_i` for
/// `i ≤ i_max` on the commuting realization.
pub fn mixture_spectrum_bound(rho: &Spectrum, sigma: &Spectrum, i_max: usize) -> WeylRecord {
    let omega = commuting_mixture(rho, sigma, 2 * i_max);
    let lr = rho.head(i_max + 1);
    let ls = sigma.head(i_max);
    let rows: Vec<WeylRow> = (1..=i_max)
        .map(|i| WeylRow {
            i,
            odd: 2.0 * omega[2 * i - 2],
            even: 2.0 * omega[2 * i - 1],
            rhs: lr[i - 1] + ls[i - 1],
            sharp_even_rhs: lr[i] + ls[i - 1],
        })
        .collect();
    let tol = 1e-15;
    let holds = rows.iter().all(|r| {
        r.odd <= r.rhs + tol && r.even <= r.sharp_even_rhs + tol && r.sharp_even_rhs <= r.rhs + tol
    });
    WeylRecord { rows, holds }
}

/// Interleaved grading for a mixture together with its energy check.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureGrading {
    /// `g̃_{2i-1} = g̃_{2i}`, taken from the state with the larger `i`-th eigenvalue.
    pub grading: Grading,
    /// Number of pairs `i` represented in `grading`.
    pub pairs: usize,
    /// `Σ_{j≤2·pairs} g̃_j λ^ω_j` on the commuting realization.
    pub mixture_energy: f64,
    /// `2(E_ρ + E_σ)`.
    pub bound: f64,
    /// Eigenvalue mass of `ρ` and `σ` beyond `pairs`.
    pub residual_mass: f64,
    pub holds: bool,
}

const MIXTURE_MAX_PAIRS: usize = 1 << 16;

/// Builds the interleaved grading for `½(ρ+σ)` from finite-energy gradings of `ρ`
/// and `σ`. Ties `λ^ρ_i = λ^σ_i` take `g^ρ_i`.
pub fn mixture_grading(
    rho: &Spectrum,
    g_rho: &Grading,
    sigma: &Spectrum,
    g_sigma: &Grading,
) -> Result<MixtureGrading> {
    let e_rho = pairing_energy(rho, g_rho);
    let e_sigma = pairing_energy(sigma, g_sigma);
    if e_rho.verdict != SeriesVerdict::Converges || e_sigma.verdict != SeriesVerdict::Converges {
        return Err(Error::Precondition(
            "both input pairings must have finite energy".into(),
        ));
    }
    let pairs = match (rho.rank(), sigma.rank()) {
        (Some(_), Some(_)) => spec_len(rho).max(spec_len(sigma)),
        _ => {
            let mut n = 1;
            while n < MIXTURE_MAX_PAIRS && rho.tail(n) + sigma.tail(n) > 1e-15 {
                n *= 2;
            }
            n
        }
    };
    let lr = rho.head(pairs);
    let ls = sigma.head(pairs);
    let mut levels = Vec::with_capacity(2 * pairs);
    for i in 0..pairs {
        let g = if lr[i] >= ls[i] {
            g_rho.value(i + 1)
        } else {
            g_sigma.value(i + 1)
        };
        levels.push(g);
        levels.push(g);
    }
    let omega = commuting_mixture(rho, sigma, 2 * pairs);
    let mixture_energy: f64 = omega
        .iter()
        .zip(&levels)
        .filter(|(&w, _)| w > 0.0)
        .map(|(w, g)| w * g)
        .sum();
    let bound = 2.0 * (e_rho.extended() + e_sigma.extended());
    let grading = Grading::explicit(levels.clone())
        .unwrap_or(Grading { kind: GradingKind::Explicit(levels), offset: 0.0 });
    Ok(MixtureGrading {
        grading,
        pairs,
        mixture_energy,
        bound,
        residual_mass: rho.tail(pairs) + sigma.tail(pairs),
        holds: mixture_energy <= bound * (1.0 + 1e-12),
    })
}

/// Pair grading `g_{ij} = g¹_i + g²_j` of `G₁ ⊗ I + I ⊗ G₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrading {
    pub first: Grading,
    pub second: Grading,
}

pub fn product_grading(g1: &Grading, g2: &Grading) -> ProductGrading {
    ProductGrading {
        first: g1.clone(),
        second: g2.clone(),
    }
}

impl ProductGrading {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.first.value(i) + self.second.value(j)
    }

    /// All `g_{ij}` for `i ≤ n1`, `j ≤ n2`, sorted nondecreasing.
    pub fn sorted_levels(&self, n1: usize, n2: usize) -> Vec<f64> {
        let mut out: Vec<f64> = (1..=n1)
            .flat_map(|i| (1..=n2).map(move |j| (i, j)))
            .map(|(i, j)| self.value(i, j))
            .collect();
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }

    /// Marginal grading `g¹_i = Σ_j λ^{(2)}_j g_{ij}`, which for a sum grading is
    /// `g¹_i + E₂`.
    pub fn marginal_first(&self, second_spectrum: &Spectrum) -> Result<Grading> {
        let e2 = pairing_energy(second_spectrum, &self.second);
        match e2.value {
            Some(e) => self.first.clone().with_offset(self.first.offset + e),
            None => Err(Error::Precondition(
                "second factor has infinite energy".into(),
            )),
        }
    }

    /// `Σ_{ij} λ¹_i λ²_j g_{ij} = E₁ + E₂`.
    pub fn pairing_energy(&self, s1: &Spectrum, s2: &Spectrum) -> f64 {
        pairing_energy(s1, &self.first).extended() + pairing_energy(s2, &self.second).extended()
    }
}

/// Helper for diagnostics: the eigenvalues of a product state, sorted.
pub fn product_spectrum(s1: &Spectrum, s2: &Spectrum, n1: usize, n2: usize) -> Vec<f64> {
    let a = s1.head(n1);
    let b = s2.head(n2);
    let mut out: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn geo(s: f64) -> Spectrum {
        Spectrum::geometric(s).unwrap()
    }

    fn fin(p: &[f64]) -> Spectrum {
        Spectrum::finite(p.to_vec()).unwrap()
    }

    #[test]
    fn truncation_examples() {
        let t = truncate(&geo(0.5), 1).unwrap();
        assert_eq!(t.head(1), vec![1.0]);
        let t = truncate(&geo(0.5), 2).unwrap();
        assert_relative_eq!(t.eigenvalue(1), 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(t.eigenvalue(2), 1.0 / 3.0, max_relative = 1e-15);
        let t = truncate(&fin(&[0.5, 0.3, 0.2]), 2).unwrap();
        assert_relative_eq!(t.eigenvalue(1), 0.625, max_relative = 1e-15);
        assert_relative_eq!(t.eigenvalue(2), 0.375, max_relative = 1e-15);
        assert_eq!(t.tail(2), 0.0);
        assert_eq!(
            truncate(&fin(&[0.5, 0.5, 0.0]), 3),
            Err(Error::RankExceeded { requested: 3, rank: 2 })
        );
        assert!(truncate(&geo(0.5), 0).is_err());
    }

    #[test]
    fn tail_examples() {
        assert_relative_eq!(geo(0.5).tail(10), 2f64.powi(-10), max_relative = 1e-15);
        assert_relative_eq!(geo(0.5).tail(10), 9.765625e-4, max_relative = 1e-15);
        assert_eq!(fin(&[0.5, 0.3, 0.2]).tail(0), 1.0);
        assert_eq!(Spectrum::power_log(3.0).unwrap().tail(0), 1.0);
        assert_relative_eq!(fin(&[0.5, 0.3, 0.2]).tail(2), 0.2, max_relative = 1e-15);
    }

    #[test]
    fn power_log_is_normalized_and_monotone() {
        for q in [1.5, 2.0, 3.0, 5.0] {
            let s = Spectrum::power_log(q).unwrap();
            let h = s.head(5000);
            assert!(h.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(h[0], h[1]);
            let total = h.iter().sum::<f64>() + s.tail(5000);
            assert_relative_eq!(total, 1.0, max_relative = 1e-12);
            // tail consistency across a boundary
            let r = 37;
            assert_relative_eq!(s.tail(r) - s.tail(r + 1), s.eigenvalue(r + 1), max_relative = 1e-9);
        }
        assert!(Spectrum::power_log(1.0).is_err());
    }

    #[test]
    fn pairing_energy_examples() {
        let e = pairing_energy(&geo(0.5), &Grading::linear());
        assert_eq!(e.value, Some(2.0));
        let zero_ground = Grading::explicit(vec![0.0, 1.0]).unwrap();
        assert_eq!(pairing_energy(&fin(&[1.0]), &zero_ground).value, Some(0.0));
        assert_eq!(pairing_energy(&fin(&[1.0]), &Grading::poly_log(2.0).unwrap()).value, Some(0.0));
        let p3 = Spectrum::power_log(3.0).unwrap();
        let ev = pairing_energy(&p3, &Grading::poly_log(3.0).unwrap());
        assert_eq!(ev.verdict, SeriesVerdict::Diverges);
        assert_eq!(ev.extended(), f64::INFINITY);
        // offsets shift by exactly the offset
        let shifted = Grading::linear().with_offset(1.5).unwrap();
        assert_eq!(pairing_energy(&geo(0.5), &shifted).value, Some(3.5));
        // explicit gradings cannot host an infinite-rank state
        let ev = pairing_energy(&geo(0.5), &zero_ground);
        assert_eq!(ev.verdict, SeriesVerdict::Diverges);
    }

    #[test]
    fn geometric_log_moment_matches_direct_sum() {
        let ev = pairing_energy(&geo(0.5), &Grading::poly_log(3.0).unwrap());
        let direct: f64 = (1..400).map(|i| 0.5f64.powi(i) * (i as f64).ln().powi(3)).sum();
        assert_relative_eq!(ev.value.unwrap(), direct, max_relative = 1e-13);
    }

    #[test]
    fn spcond_examples() {
        assert_eq!(check_spcond(&geo(0.5), 3.0).unwrap().verdict, Verdict::Holds);
        assert_eq!(check_spcond(&fin(&[0.6, 0.4]), 7.0).unwrap().verdict, Verdict::Holds);
        let r = check_spcond(&Spectrum::power_log(3.0).unwrap(), 3.0).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.notes.contains("no verdict about other gradings"));
        assert!(matches!(check_spcond(&geo(0.5), 2.0), Err(Error::Domain { .. })));
        // power-log with a steeper exponent does satisfy the log-moment condition
        assert_eq!(check_spcond(&Spectrum::power_log(4.5).unwrap(), 3.0).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn power_dominated_examples() {
        let r = check_power_dominated(&geo(0.5), 0.5).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.spcond_consistent);
        let closed = 0.5f64.sqrt() / (1.0 - 0.5f64.sqrt());
        assert_relative_eq!(r.evidence.value.unwrap(), closed, max_relative = 1e-14);
        assert_eq!(check_power_dominated(&fin(&[0.9, 0.1]), 0.3).unwrap().verdict, Verdict::Holds);
        let r = check_power_dominated(&Spectrum::power_log(3.0).unwrap(), 0.9).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(check_power_dominated(&geo(0.5), 1.0).is_err());
    }

    #[test]
    fn majorization_examples() {
        assert_eq!(majorizes(&fin(&[1.0, 0.0]), &fin(&[0.5, 0.5]), 10), Majorization::Majorizes);
        let g = geo(0.3);
        assert_eq!(majorizes(&g, &g, 10), Majorization::Majorizes);
        assert_eq!(majorizes(&fin(&[0.6, 0.4]), &fin(&[0.7, 0.3]), 10), Majorization::FailsAt(1));
        assert_eq!(majorizes(&geo(0.3), &geo(0.6), 5), Majorization::Majorizes);
        assert!(matches!(majorizes(&geo(0.6), &geo(0.3), 5), Majorization::FailsAt(_)));
        let p = Spectrum::power_log(3.0).unwrap();
        assert!(matches!(majorizes(&p, &Spectrum::power_log(4.0).unwrap(), 50), Majorization::FailsAt(_) | Majorization::Inconclusive { .. }));
    }

    #[test]
    fn majorization_antisymmetry_on_distinct_spectra() {
        let a = fin(&[0.6, 0.3, 0.1]);
        let b = fin(&[0.5, 0.3, 0.2]);
        assert_eq!(majorizes(&a, &b, 3), Majorization::Majorizes);
        assert!(matches!(majorizes(&b, &a, 3), Majorization::FailsAt(1)));
    }

    #[test]
    fn weyl_examples() {
        let rec = mixture_spectrum_bound(&fin(&[0.5, 0.5]), &fin(&[1.0, 0.0]), 1);
        assert!(rec.holds);
        assert_relative_eq!(rec.rows[0].odd, 1.5, max_relative = 1e-15);
        assert_relative_eq!(rec.rows[0].rhs, 1.5, max_relative = 1e-15);
        let g = geo(0.4);
        let rec = mixture_spectrum_bound(&g, &g, 10);
        assert!(rec.holds);
        for row in &rec.rows {
            assert_relative_eq!(row.odd, 2.0 * g.eigenvalue(2 * row.i - 1), max_relative = 1e-14);
        }
    }

    #[test]
    fn mixture_grading_examples() {
        let g = geo(0.5);
        let m = mixture_grading(&g, &Grading::linear(), &g, &Grading::linear()).unwrap();
        let levels = match m.grading.kind() {
            GradingKind::Explicit(l) => l.clone(),
            _ => unreachable!(),
        };
        assert_eq!(&levels[..6], &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        assert_relative_eq!(m.bound, 8.0, max_relative = 1e-15);
        assert!(m.holds && m.mixture_energy <= 8.0);

        let z = Grading::explicit(vec![0.0]).unwrap();
        let one = fin(&[1.0]);
        let m = mixture_grading(&one, &z, &one, &z).unwrap();
        assert_eq!(m.mixture_energy, 0.0);
        assert_eq!(m.pairs, 1);

        let m = mixture_grading(&geo(0.5), &Grading::linear(), &geo(1.0 / 3.0), &Grading::linear()).unwrap();
        assert!(m.holds);
        assert_relative_eq!(m.bound, 2.0 * (2.0 + 1.5), max_relative = 1e-14);

        let p = Spectrum::power_log(3.0).unwrap();
        assert!(matches!(
            mixture_grading(&p, &Grading::linear(), &g, &Grading::linear()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn product_grading_examples() {
        let pg = product_grading(&Grading::linear(), &Grading::linear());
        assert_eq!(pg.value(2, 3), 5.0);
        let zero = Grading::explicit(vec![0.0; 4]).unwrap();
        let pg0 = product_grading(&Grading::linear(), &zero);
        for i in 1..5 {
            assert_eq!(pg0.value(i, 3), i as f64);
        }
        let g = geo(0.5);
        assert_relative_eq!(pg.pairing_energy(&g, &g), 4.0, max_relative = 1e-15);
        // double-sum oracle over the product spectrum
        let mut direct = 0.0;
        for i in 1..80 {
            for j in 1..80 {
                direct += g.eigenvalue(i) * g.eigenvalue(j) * pg.value(i, j);
            }
        }
        assert_relative_eq!(direct, 4.0, max_relative = 1e-12);
        let marginal = pg.marginal_first(&g).unwrap();
        assert_eq!(marginal.value(1), 3.0);
        let sorted = pg.sorted_levels(3, 3);
        assert_eq!(sorted, vec![2.0, 3.0, 3.0, 4.0, 4.0, 4.0, 5.0, 5.0, 6.0]);
    }
}

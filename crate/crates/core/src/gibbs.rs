//! Partition functions of diagonal Hamiltonians and the max-entropy function
//! `F_G(E) = sup {H(ρ) : Tr Gρ ≤ E}`.
//!
//! For `PolyLog(q)` gradings `Z(β) = Σ_i exp(-β lnᵠ i)` is summed directly for a
//! prefix and the remainder is evaluated as `∫ exp(u - β uᵠ) du` in the variable
//! `u = ln x`, in log space, with Euler-Maclaurin end corrections. Because the
//! summand is decreasing in `i`, the remainder after `N` terms lies between the
//! integral from `N` and that integral plus the `N`-th term; the width of that
//! interval is reported as `tail_bound`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::spectra::{Grading, GradingKind};

/// Maximum number of directly summed terms before switching to the integral tail.
const DIRECT_TERMS: usize = 2000;

/// Relative size below which a term ends the direct sum.
const TERM_CUTOFF: f64 = 1e-18;

/// Integration window below the peak of the log-integrand.
const LOG_WINDOW: f64 = 60.0;

const PANELS: usize = 400;

// 10-point Gauss-Legendre rule on [-1, 1] (nodes symmetric about 0).
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// `ln Z(β)` together with the mean energy at the same β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionStats {
    pub beta: f64,
    pub log_partition: f64,
    pub mean_energy: f64,
    /// Number of directly summed terms (0 for closed forms).
    pub truncation_n: usize,
    /// Width of the certified interval for `ln Z` coming from the tail (nats).
    pub tail_bound: f64,
}

/// Result of solving `⟨G⟩_β = E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsSolve {
    pub beta: f64,
    pub log_partition: f64,
    pub mean_energy: f64,
    /// `β·mean_energy + ln Z`, which equals `F_G(E)` at the solution.
    pub entropy: f64,
    pub truncation_n: usize,
    pub tail_bound: f64,
}

impl GibbsSolve {
    fn from_stats(s: PartitionStats) -> Self {
        Self {
            beta: s.beta,
            log_partition: s.log_partition,
            mean_energy: s.mean_energy,
            entropy: s.beta * s.mean_energy + s.log_partition,
            truncation_n: s.truncation_n,
            tail_bound: s.tail_bound,
        }
    }
}

/// `ln Σ_i e^{-β g_i}`.
pub fn log_partition(grad: &Grading, beta: f64) -> Result<f64> {
    partition_stats(grad, beta).map(|s| s.log_partition)
}

/// `ln Z(β)` and `⟨G⟩_β`.
pub fn partition_stats(grad: &Grading, beta: f64) -> Result<PartitionStats> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(domain("inverse temperature", format!("β = {beta} must be positive and finite")));
    }
    let base = match grad.kind() {
        GradingKind::Linear => linear_stats(beta),
        GradingKind::Explicit(levels) => explicit_stats(levels, beta),
        GradingKind::PolyLog { exponent } => poly_log_stats(*exponent, beta)?,
    };
    let o = grad.offset();
    Ok(PartitionStats {
        log_partition: base.log_partition - beta * o,
        mean_energy: base.mean_energy + o,
        ..base
    })
}

fn linear_stats(beta: f64) -> PartitionStats {
    // Σ_{i≥1} e^{-βi} = e^{-β}/(1-e^{-β})
    let one_minus = -(-beta).exp_m1();
    PartitionStats {
        beta,
        log_partition: -beta - one_minus.ln(),
        mean_energy: 1.0 / one_minus,
        truncation_n: 0,
        tail_bound: 0.0,
    }
}

fn explicit_stats(levels: &[f64], beta: f64) -> PartitionStats {
    let g0 = levels[0];
    let (mut z, mut e) = (0.0, 0.0);
    for &g in levels {
        let w = (-beta * (g - g0)).exp();
        z += w;
        e += w * g;
    }
    PartitionStats {
        beta,
        log_partition: -beta * g0 + z.ln(),
        mean_energy: e / z,
        truncation_n: levels.len(),
        tail_bound: 0.0,
    }
}

fn poly_log_stats(q: f64, beta: f64) -> Result<PartitionStats> {
    if q < 1.0 {
        return Err(Error::Divergent(format!(
            "Σ exp(-β ln^{q} i) diverges for every β when q < 1"
        )));
    }
    if q == 1.0 && beta <= 1.0 {
        return Err(Error::Divergent(format!("Σ i^(-β) diverges for β = {beta} ≤ 1")));
    }
    // direct prefix, kept as log-terms
    let mut logs: Vec<(f64, f64)> = Vec::new();
    let mut running_max = f64::NEG_INFINITY;
    let mut running = 0.0; // Σ e^{t - running_max}
    let mut n = 1;
    while n < DIRECT_TERMS {
        let g = (n as f64).ln().powf(q);
        let t = -beta * g;
        if t > running_max {
            running *= (running_max - t).exp();
            running_max = t;
        }
        running += (t - running_max).exp();
        logs.push((t, g));
        n += 1;
        if n > 2 && (t - running_max).exp() < TERM_CUTOFF * running {
            break;
        }
    }
    // tail Σ_{i≥n}
    let big_n = n as f64;
    let l = big_n.ln();
    let t_n = -beta * l.powf(q);
    let (peak, i0, i1) = tail_integrals(q, beta, l);
    let m = logs
        .iter()
        .map(|&(t, _)| t)
        .fold(peak.max(t_n), f64::max);
    let s_n = (t_n - m).exp();
    let s_peak = (peak - m).exp();
    let df_rel = beta * q * l.powf(q - 1.0) / big_n; // -f'(N)/f(N)
    let mut z = 0.0;
    let mut e = 0.0;
    for &(t, g) in &logs {
        let w = (t - m).exp();
        z += w;
        e += w * g;
    }
    z += s_peak * i0 + s_n * (0.5 + df_rel / 12.0);
    let dh = q * l.powf(q - 1.0) / big_n - beta * q * l.powf(2.0 * q - 1.0) / big_n;
    e += s_peak * i1 + s_n * (0.5 * l.powf(q) - dh / 12.0);
    Ok(PartitionStats {
        beta,
        log_partition: m + z.ln(),
        mean_energy: e / z,
        truncation_n: n - 1,
        tail_bound: (s_n / z).ln_1p(),
    })
}

/// With `φ(u) = u - β uᵠ` on `[a, ∞)` returns `(φ_max, ∫e^{φ-φ_max}, ∫uᵠ e^{φ-φ_max})`.
fn tail_integrals(q: f64, beta: f64, a: f64) -> (f64, f64, f64) {
    let phi = |u: f64| u - beta * u.powf(q);
    let slope_at_a = 1.0 - beta * q * a.powf(q - 1.0);
    let peak_u = if slope_at_a > 0.0 && q > 1.0 {
        (1.0 / (beta * q)).powf(1.0 / (q - 1.0)).max(a)
    } else {
        a
    };
    let pm = phi(peak_u);
    let target = pm - LOG_WINDOW;
    // φ is concave, so each side of the peak crosses the target once.
    let mut h = 1.0;
    while phi(peak_u + h) > target {
        h *= 2.0;
    }
    let hi = bisect_level(&phi, peak_u, peak_u + h, target);
    let lo = if phi(a) < target {
        bisect_level(&phi, peak_u, a, target)
    } else {
        a
    };
    let width = (hi - lo) / PANELS as f64;
    let (mut i0, mut i1) = (0.0, 0.0);
    for k in 0..PANELS {
        let mid = lo + (k as f64 + 0.5) * width;
        let half = 0.5 * width;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for u in [mid - half * x, mid + half * x] {
                let f = (phi(u) - pm).exp() * w * half;
                i0 += f;
                i1 += f * u.powf(q);
            }
        }
    }
    (pm, i0, i1)
}

/// Point between `inside` (φ above target) and `outside` (φ below) where φ = target.
fn bisect_level(phi: &impl Fn(f64) -> f64, mut inside: f64, mut outside: f64, target: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if phi(mid) > target {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

/// Gibbs probabilities `e^{-β g_i}/Z` for the first `n` levels.
pub fn gibbs_probabilities(grad: &Grading, beta: f64, n: usize) -> Result<Vec<f64>> {
    let lz = log_partition(grad, beta)?;
    Ok((1..=n)
        .map(|i| (-beta * grad.value(i) - lz).exp())
        .collect())
}

// ---------------------------------------------------------------------------
// (H-cond+) diagnostics

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcondVerdict {
    ConsistentWithOne,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcondSample {
    pub beta: f64,
    /// `β ln Z(β)`; `None` when the partition function diverges.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HcondReport {
    pub samples: Vec<HcondSample>,
    /// Fitted slope of `ln|β ln Z|` against `ln β` over the last three samples.
    pub slope: Option<f64>,
    pub verdict: HcondVerdict,
}

/// `β = 10⁻², …, 10⁻⁸`.
pub fn standard_beta_grid() -> Vec<f64> {
    (2..=8).map(|k| 10f64.powi(-k)).collect()
}

/// Slope at or above which `β ln Z → 0` is accepted.
pub const HCOND_SLOPE_PASS: f64 = 0.1;
/// Slope at or below which `β ln Z` is taken to have a nonzero limit.
pub const HCOND_SLOPE_FAIL: f64 = 0.02;

/// Samples `β ln Z(β)` on a decreasing grid and extrapolates `[Z(β)]^β → 1`.
///
/// The values are extrapolated through a power law `β ln Z ≈ c β^s` fitted on the
/// last three points: a clearly positive exponent with decreasing values means the
/// limit is 0, a flat fit means a nonzero limit.
pub fn check_hcond_plus(grad: &Grading, beta_grid: &[f64]) -> Result<HcondReport> {
    if beta_grid.len() < 3 {
        return Err(domain("β grid", "need at least three points"));
    }
    if beta_grid.iter().any(|&b| !(b > 0.0)) || beta_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain("β grid", "points must be positive and strictly decreasing"));
    }
    let mut samples = Vec::with_capacity(beta_grid.len());
    let mut diverged = false;
    for &beta in beta_grid {
        let value = match log_partition(grad, beta) {
            Ok(lz) => Some(beta * lz),
            Err(Error::Divergent(_)) => {
                diverged = true;
                None
            }
            Err(e) => return Err(e),
        };
        samples.push(HcondSample { beta, value });
    }
    if diverged {
        return Ok(HcondReport {
            samples,
            slope: None,
            verdict: HcondVerdict::Fails,
        });
    }
    let last: Vec<(f64, f64)> = samples[samples.len() - 3..]
        .iter()
        .map(|s| (s.beta, s.value.unwrap_or(0.0).abs()))
        .collect();
    if last.iter().all(|&(_, v)| v < 1e-300) {
        return Ok(HcondReport {
            samples,
            slope: None,
            verdict: HcondVerdict::ConsistentWithOne,
        });
    }
    if last.iter().any(|&(_, v)| v < 1e-300) {
        return Ok(HcondReport {
            samples,
            slope: None,
            verdict: HcondVerdict::Inconclusive,
        });
    }
    let xs: Vec<f64> = last.iter().map(|&(b, _)| b.ln()).collect();
    let ys: Vec<f64> = last.iter().map(|&(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 3.0;
    let my = ys.iter().sum::<f64>() / 3.0;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let decreasing = last.windows(2).all(|w| w[1].1 < w[0].1);
    let verdict = if slope >= HCOND_SLOPE_PASS && decreasing {
        HcondVerdict::ConsistentWithOne
    } else if slope <= HCOND_SLOPE_FAIL {
        HcondVerdict::Fails
    } else {
        HcondVerdict::Inconclusive
    };
    Ok(HcondReport {
        samples,
        slope: Some(slope),
        verdict,
    })
}

// ---------------------------------------------------------------------------
// F_G

/// `F_G(E)`, the maximal entropy of states with `Tr Gρ ≤ E`.
pub fn f_g(grad: &Grading, energy: f64) -> Result<GibbsSolve> {
    f_g_traced(grad, energy).map(|(s, _)| s)
}

/// As [`f_g`], also returning the `(β, mean energy)` pairs visited by the solver.
pub fn f_g_traced(grad: &Grading, energy: f64) -> Result<(GibbsSolve, Vec<(f64, f64)>)> {
    let g1 = grad.ground();
    if !(energy > g1) || !energy.is_finite() {
        return Err(domain(
            "energy",
            format!("E = {energy} must be finite and exceed the ground level {g1}"),
        ));
    }
    if let GradingKind::Explicit(levels) = grad.kind() {
        let d = levels.len() as f64;
        let uniform = levels.iter().sum::<f64>() / d + grad.offset();
        if energy >= uniform {
            let solve = GibbsSolve {
                beta: 0.0,
                log_partition: d.ln(),
                mean_energy: uniform,
                entropy: d.ln(),
                truncation_n: levels.len(),
                tail_bound: 0.0,
            };
            return Ok((solve, Vec::new()));
        }
    }
    if let GradingKind::PolyLog { exponent } = grad.kind() {
        if *exponent < 1.0 {
            return Err(Error::Divergent(format!(
                "poly-log grading with q = {exponent} has a divergent partition function at every β"
            )));
        }
    }
    let mut trace = Vec::new();
    // mean(β) with divergence read as +∞ (β below the convergence threshold)
    let mut mean = |beta: f64| -> Result<Option<PartitionStats>> {
        match partition_stats(grad, beta) {
            Ok(s) => {
                trace.push((beta, s.mean_energy));
                Ok(Some(s))
            }
            Err(Error::Divergent(_)) => {
                trace.push((beta, f64::INFINITY));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };
    let above = |s: &Option<PartitionStats>| s.map_or(true, |s| s.mean_energy > energy);
    // grow the bracket outward from β = 1; extreme β overflow the tail integrals
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while !above(&mean(lo)?) {
        lo /= 4.0;
        if lo < 1e-200 {
            return Err(Error::Numerical(format!(
                "could not bracket β for E = {energy}: mean energy stays below E"
            )));
        }
    }
    loop {
        let s = mean(hi)?;
        if !above(&s) {
            break;
        }
        hi *= 4.0;
        if hi > 1e200 {
            return Err(Error::Numerical(format!(
                "could not bracket β for E = {energy}: mean energy stays above E"
            )));
        }
    }
    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (llo + lhi);
        if mid == llo || mid == lhi {
            break;
        }
        if above(&mean(mid.exp())?) {
            llo = mid;
        } else {
            lhi = mid;
        }
        if lhi - llo < 1e-15 {
            break;
        }
    }
    let beta = (0.5 * (llo + lhi)).exp();
    let stats = partition_stats(grad, beta)?;
    // the constraint is active: report F_G(E) = βE + ln Z at the target energy
    let mut solve = GibbsSolve::from_stats(stats);
    solve.entropy = beta * energy + stats.log_partition;
    Ok((solve, trace))
}

/// One row of the `F_G(E)/√E` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublinearityRow {
    pub energy: f64,
    pub f_g: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SublinearityTable {
    pub rows: Vec<SublinearityRow>,
    /// The last three ratios are strictly decreasing.
    pub decreasing_tail: bool,
}

pub fn f_g_sublinearity_probe(grad: &Grading, energies: &[f64]) -> Result<SublinearityTable> {
    if energies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("energy grid", "must be strictly increasing"));
    }
    let rows = energies
        .iter()
        .map(|&e| {
            let f = f_g(grad, e)?.entropy;
            Ok(SublinearityRow {
                energy: e,
                f_g: f,
                ratio: f / e.sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let decreasing_tail = rows.len() >= 3
        && rows[rows.len() - 3..]
            .windows(2)
            .all(|w| w[1].ratio < w[0].ratio);
    Ok(SublinearityTable {
        rows,
        decreasing_tail,
    })
}

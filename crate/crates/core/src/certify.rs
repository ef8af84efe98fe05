//! Per-seed sweep routines behind the empirical certificates. Each routine
//! handles one channel seed and is deterministic in it, so callers may spread
//! seeds over workers and merge rows in any order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::bounds::{embedded_state, theorem2_bound, TruncationBound};
use crate::channels::{random_channel, Channel};
use crate::characteristics::{coherent_information, entropy_exchange, mutual_information, output_entropy};
use crate::ensembles::{
    d0_distance, head_weight, holevo_quantity, kantorovich_distance, privacy, truncate_ensemble, truncate_state,
    Ensemble,
};
use crate::error::{domain, Result};
use crate::qcore::random::{haar_isometry, seeded};
use crate::qcore::{eigh, identity, DensityMatrix};
use crate::spectra::{Grading, Spectrum};

// ---------------------------------------------------------------------------
// truncation certificates

/// Characteristics covered by the truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertifiedQuantity {
    OutputEntropy,
    EntropyExchange,
    MutualInformation,
    CoherentInformation,
}

impl CertifiedQuantity {
    pub const ALL: [CertifiedQuantity; 4] = [
        CertifiedQuantity::OutputEntropy,
        CertifiedQuantity::EntropyExchange,
        CertifiedQuantity::MutualInformation,
        CertifiedQuantity::CoherentInformation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CertifiedQuantity::OutputEntropy => "output_entropy",
            CertifiedQuantity::EntropyExchange => "entropy_exchange",
            CertifiedQuantity::MutualInformation => "mutual_information",
            CertifiedQuantity::CoherentInformation => "coherent_information",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s)
    }

    /// `(C, T, D)` for channels of Choi rank at most `k`.
    pub fn class_constants(self, k: usize) -> (f64, f64, f64) {
        match self {
            CertifiedQuantity::OutputEntropy | CertifiedQuantity::EntropyExchange => (1.0, (k as f64).ln(), 1.0),
            CertifiedQuantity::MutualInformation | CertifiedQuantity::CoherentInformation => (2.0, 0.0, 2.0),
        }
    }

    pub fn evaluate(self, phi: &Channel, rho: &DensityMatrix) -> Result<f64> {
        match self {
            CertifiedQuantity::OutputEntropy => output_entropy(phi, rho),
            CertifiedQuantity::EntropyExchange => entropy_exchange(phi, rho),
            CertifiedQuantity::MutualInformation => mutual_information(phi, rho),
            CertifiedQuantity::CoherentInformation => coherent_information(phi, rho),
        }
    }
}

/// Shape of a truncation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSweep {
    pub spectrum: Spectrum,
    pub grading: Grading,
    pub dim_in: usize,
    pub dim_out: usize,
    pub k: usize,
    pub r_grid: Vec<usize>,
    pub quantities: Vec<CertifiedQuantity>,
}

/// One certificate row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateRow {
    pub seed: u64,
    pub quantity: CertifiedQuantity,
    pub k: usize,
    pub dim_in: usize,
    pub dim_out: usize,
    pub r: usize,
    pub delta_r: f64,
    pub y: f64,
    pub observed_gap: f64,
    pub pass: bool,
}

/// Test state, its truncations and the bounds, shared across seeds.
#[derive(Debug, Clone)]
pub struct TruncationCertifier {
    sweep: TruncationSweep,
    rho: DensityMatrix,
    truncations: Vec<DensityMatrix>,
    bounds: Vec<Vec<TruncationBound>>,
}

impl TruncationCertifier {
    pub fn new(sweep: TruncationSweep) -> Result<Self> {
        if sweep.r_grid.is_empty() || sweep.quantities.is_empty() {
            return Err(domain("sweep", "r grid and quantity list must not be empty"));
        }
        let rho = embedded_state(&sweep.spectrum, sweep.dim_in)?;
        let truncations = sweep
            .r_grid
            .iter()
            .map(|&r| {
                if r >= sweep.dim_in {
                    Ok(rho.clone())
                } else {
                    truncate_state(&rho, r).map(|(s, _)| s)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let bounds = sweep
            .quantities
            .iter()
            .map(|q| {
                let (c, t, d) = q.class_constants(sweep.k);
                sweep
                    .r_grid
                    .iter()
                    .map(|&r| theorem2_bound(&sweep.spectrum, &sweep.grading, r, c, t, d))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sweep,
            rho,
            truncations,
            bounds,
        })
    }

    pub fn sweep(&self) -> &TruncationSweep {
        &self.sweep
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.rho
    }

    /// Bounds per quantity, aligned with the r grid.
    pub fn bounds(&self) -> &[Vec<TruncationBound>] {
        &self.bounds
    }

    /// Rows for the channel drawn from `seed`.
    pub fn rows(&self, seed: u64) -> Result<Vec<CertificateRow>> {
        let s = &self.sweep;
        let phi = random_channel(s.dim_in, s.dim_out, s.k, seed)?;
        let mut out = Vec::with_capacity(s.quantities.len() * s.r_grid.len());
        for (q, bounds) in s.quantities.iter().zip(&self.bounds) {
            let full = q.evaluate(&phi, &self.rho)?;
            for ((rho_r, b), &r) in self.truncations.iter().zip(bounds).zip(&s.r_grid) {
                let gap = (q.evaluate(&phi, rho_r)? - full).abs();
                out.push(CertificateRow {
                    seed,
                    quantity: *q,
                    k: s.k,
                    dim_in: s.dim_in,
                    dim_out: s.dim_out,
                    r,
                    delta_r: b.delta_r,
                    y: b.y,
                    observed_gap: gap,
                    pass: gap <= b.y,
                });
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// ensemble certificates

/// How the ensemble with the fixed average state is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// Eigenvectors with the eigenvalues as weights.
    Eigen,
    /// `members` pure states `√ρ w_j` from a Haar isometry, sorted by weight.
    Random { members: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSweep {
    pub spectrum: Spectrum,
    pub dim_in: usize,
    pub dim_out: usize,
    pub k: usize,
    pub kind: EnsembleKind,
    /// Truncation lengths; defaults to `1..=len` when empty.
    pub n_grid: Vec<usize>,
}

/// Gaps of one channel at one truncation length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleRow {
    pub seed: u64,
    pub n: usize,
    pub c_n: f64,
    pub d0: f64,
    pub dk: f64,
    pub chi_gap: f64,
    pub privacy_gap: f64,
}

/// Supremum over seeds at one truncation length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSummaryRow {
    pub n: usize,
    pub c_n: f64,
    pub d0: f64,
    pub dk: f64,
    pub sup_chi_gap: f64,
    pub sup_privacy_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub rows: Vec<EnsembleSummaryRow>,
    pub chi_monotone: bool,
    pub privacy_monotone: bool,
    /// Both suprema below the threshold at the largest `n`.
    pub final_below: bool,
    pub pass: bool,
}

/// Ensemble decomposition of a state, truncations and their distances.
#[derive(Debug, Clone)]
pub struct EnsembleCertifier {
    sweep: EnsembleSweep,
    ensemble: Ensemble,
    truncations: Vec<(usize, Ensemble, f64, f64, f64)>,
}

impl EnsembleCertifier {
    pub fn new(sweep: EnsembleSweep) -> Result<Self> {
        let rho = embedded_state(&sweep.spectrum, sweep.dim_in)?;
        let ensemble = match sweep.kind {
            EnsembleKind::Eigen => Ensemble::eigen_ensemble(&rho),
            EnsembleKind::Random { members, seed } => random_decomposition(&rho, members, seed)?,
        };
        let grid: Vec<usize> = if sweep.n_grid.is_empty() {
            (1..=ensemble.len()).collect()
        } else {
            sweep.n_grid.clone()
        };
        let truncations = grid
            .iter()
            .map(|&n| {
                let t = truncate_ensemble(&ensemble, n)?;
                let d0 = d0_distance(&ensemble, &t)?;
                let dk = kantorovich_distance(&ensemble, &t)?;
                Ok((n, t, head_weight(&ensemble, n), d0, dk))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sweep,
            ensemble,
            truncations,
        })
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn rows(&self, seed: u64) -> Result<Vec<EnsembleRow>> {
        let s = &self.sweep;
        let phi = random_channel(s.dim_in, s.dim_out, s.k, seed)?;
        let chi = holevo_quantity(&phi, &self.ensemble)?;
        let pi = privacy(&phi, &self.ensemble)?;
        self.truncations
            .iter()
            .map(|(n, t, c_n, d0, dk)| {
                Ok(EnsembleRow {
                    seed,
                    n: *n,
                    c_n: *c_n,
                    d0: *d0,
                    dk: *dk,
                    chi_gap: (holevo_quantity(&phi, t)? - chi).abs(),
                    privacy_gap: (privacy(&phi, t)? - pi).abs(),
                })
            })
            .collect()
    }
}

/// Suprema over seeds, monotonicity in `n` (slack `1e-12`) and the final threshold.
pub fn summarize_ensemble_rows(rows: &[EnsembleRow], threshold: f64) -> EnsembleSummary {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let summary: Vec<EnsembleSummaryRow> = ns
        .iter()
        .map(|&n| {
            let at: Vec<&EnsembleRow> = rows.iter().filter(|r| r.n == n).collect();
            EnsembleSummaryRow {
                n,
                c_n: at[0].c_n,
                d0: at[0].d0,
                dk: at[0].dk,
                sup_chi_gap: at.iter().map(|r| r.chi_gap).fold(0.0, f64::max),
                sup_privacy_gap: at.iter().map(|r| r.privacy_gap).fold(0.0, f64::max),
            }
        })
        .collect();
    let mono = |f: fn(&EnsembleSummaryRow) -> f64| summary.windows(2).all(|w| f(&w[1]) <= f(&w[0]) + 1e-12);
    let chi_monotone = mono(|r| r.sup_chi_gap);
    let privacy_monotone = mono(|r| r.sup_privacy_gap);
    let final_below = summary
        .last()
        .map_or(false, |r| r.sup_chi_gap < threshold && r.sup_privacy_gap < threshold);
    EnsembleSummary {
        pass: chi_monotone && privacy_monotone && final_below,
        rows: summary,
        chi_monotone,
        privacy_monotone,
        final_below,
    }
}

/// Pure decomposition `{‖√ρ w_j‖², √ρ w_j/‖·‖}` of `rho` for the rows `w_j`
/// of a random `members × dim` isometry, ordered by decreasing weight.
pub fn random_decomposition(rho: &DensityMatrix, members: usize, seed: u64) -> Result<Ensemble> {
    let d = rho.dim();
    if members < d {
        return Err(domain("decomposition", format!("{members} members cannot average to a rank-{d} state")));
    }
    let sqrt_rho = rho.eigh().map(|l| l.max(0.0).sqrt());
    // columns of W† are orthonormal; W†W = I on C^d
    let w = haar_isometry(members, d, &mut seeded(seed));
    let mut out: Vec<(f64, DensityMatrix)> = (0..members)
        .map(|j| {
            let v = &sqrt_rho * w.row(j).adjoint();
            let p = v.norm_squared();
            let state = if p > 0.0 {
                DensityMatrix::from_matrix_unchecked((&v * v.adjoint()).unscale(p))
            } else {
                DensityMatrix::basis_state(d, 0)
            };
            (p, state)
        })
        .collect();
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    let s: f64 = out.iter().map(|(p, _)| p).sum();
    out.iter_mut().for_each(|(p, _)| *p /= s);
    Ensemble::new(out)
}

// ---------------------------------------------------------------------------
// perturbation families

/// One-parameter families `ε ↦ Ψ_ε` with `Ψ_0 = Id`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationFamily {
    /// `(1-ε) Id + ε Δ`, `Δ` the completely dephasing channel.
    Dephasing { dim: usize },
    /// Conjugation by `exp(-iεH)`, `H` the nearest-neighbour hopping matrix.
    Rotation { dim: usize },
    /// `(1-ε) Id + ε I/d Tr`.
    Depolarizing { dim: usize },
}

impl PerturbationFamily {
    pub fn dim(self) -> usize {
        match self {
            PerturbationFamily::Dephasing { dim }
            | PerturbationFamily::Rotation { dim }
            | PerturbationFamily::Depolarizing { dim } => dim,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PerturbationFamily::Dephasing { .. } => "dephasing",
            PerturbationFamily::Rotation { .. } => "rotation",
            PerturbationFamily::Depolarizing { .. } => "depolarizing",
        }
    }

    pub fn channel(self, eps: f64) -> Result<Channel> {
        let d = self.dim();
        if !(0.0..=1.0).contains(&eps) && !matches!(self, PerturbationFamily::Rotation { .. }) {
            return Err(domain("ε", format!("{eps} not in [0, 1]")));
        }
        match self {
            PerturbationFamily::Dephasing { .. } => {
                let mut k = alloc::vec![identity(d).scale((1.0 - eps).sqrt())];
                for i in 0..d {
                    let mut p = DMatrix::zeros(d, d);
                    p[(i, i)] = Complex64::new(eps.sqrt(), 0.0);
                    k.push(p);
                }
                Channel::new(k)
            }
            PerturbationFamily::Depolarizing { .. } => Channel::depolarizing(d, eps),
            PerturbationFamily::Rotation { .. } => {
                let h = DMatrix::from_fn(d, d, |i, j| {
                    if i + 1 == j || j + 1 == i {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                let e = eigh(&h);
                let mut u = DMatrix::zeros(d, d);
                for (j, &l) in e.values.iter().enumerate() {
                    let v = e.vector(j);
                    u += (&v * v.adjoint()) * Complex64::from_polar(1.0, -eps * l);
                }
                Channel::unitary(u)
            }
        }
    }
}

/// Characteristic evaluated along a robustness profile.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileTarget {
    MutualInformation(DensityMatrix),
    CoherentInformation(DensityMatrix),
    OutputEntropy(DensityMatrix),
    Holevo(Ensemble),
}

impl ProfileTarget {
    pub fn name(&self) -> String {
        String::from(match self {
            ProfileTarget::MutualInformation(_) => "mutual_information",
            ProfileTarget::CoherentInformation(_) => "coherent_information",
            ProfileTarget::OutputEntropy(_) => "output_entropy",
            ProfileTarget::Holevo(_) => "holevo",
        })
    }

    pub fn evaluate(&self, phi: &Channel) -> Result<f64> {
        match self {
            ProfileTarget::MutualInformation(r) => mutual_information(phi, r),
            ProfileTarget::CoherentInformation(r) => coherent_information(phi, r),
            ProfileTarget::OutputEntropy(r) => output_entropy(phi, r),
            ProfileTarget::Holevo(mu) => holevo_quantity(phi, mu),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{robustness_profile, ProfileSettings};
    use crate::qcore::max_abs_entry;
    use alloc::vec;

    fn geometric_sweep(quantities: Vec<CertifiedQuantity>) -> TruncationSweep {
        TruncationSweep {
            spectrum: Spectrum::geometric(0.5).unwrap(),
            grading: Grading::linear(),
            dim_in: 8,
            dim_out: 4,
            k: 2,
            r_grid: (3..=20).collect(),
            quantities,
        }
    }

    #[test]
    fn truncation_rows_pass_on_a_few_seeds() {
        let cert = TruncationCertifier::new(geometric_sweep(CertifiedQuantity::ALL.to_vec())).unwrap();
        for seed in 0..5 {
            let rows = cert.rows(seed).unwrap();
            assert_eq!(rows.len(), 4 * 18);
            assert!(rows.iter().all(|r| r.pass), "{:?}", rows.iter().find(|r| !r.pass));
            assert!(rows.iter().filter(|r| r.r >= 8).all(|r| r.observed_gap < 1e-12));
        }
    }

    #[test]
    fn rows_are_deterministic() {
        let cert = TruncationCertifier::new(geometric_sweep(vec![CertifiedQuantity::OutputEntropy])).unwrap();
        assert_eq!(cert.rows(11).unwrap(), cert.rows(11).unwrap());
        assert!(TruncationCertifier::new(geometric_sweep(vec![])).is_err());
    }

    #[test]
    fn random_decomposition_averages_to_state() {
        let rho = embedded_state(&Spectrum::geometric(0.5).unwrap(), 4).unwrap();
        let mu = random_decomposition(&rho, 9, 3).unwrap();
        assert_eq!(mu.len(), 9);
        assert!(max_abs_entry(&(mu.average().matrix() - rho.matrix())) < 1e-12);
        assert!(mu.probabilities().windows(2).all(|w| w[0] >= w[1]));
        assert!(random_decomposition(&rho, 3, 0).is_err());
    }

    #[test]
    fn ensemble_rows_shrink() {
        let cert = EnsembleCertifier::new(EnsembleSweep {
            spectrum: Spectrum::geometric(0.5).unwrap(),
            dim_in: 6,
            dim_out: 3,
            k: 2,
            kind: EnsembleKind::Eigen,
            n_grid: vec![],
        })
        .unwrap();
        let rows: Vec<EnsembleRow> = (0..8).flat_map(|s| cert.rows(s).unwrap()).collect();
        let summary = summarize_ensemble_rows(&rows, 1e-3);
        assert!(summary.pass, "{summary:?}");
        for r in &summary.rows {
            assert!((r.d0 - (1.0 - r.c_n)).abs() < 1e-12);
            assert!(r.dk <= r.d0 + 1e-12);
        }
    }

    #[test]
    fn families_start_at_identity() {
        let rho = crate::qcore::random::random_density(3, 3, &mut seeded(2));
        for fam in [
            PerturbationFamily::Dephasing { dim: 3 },
            PerturbationFamily::Rotation { dim: 3 },
            PerturbationFamily::Depolarizing { dim: 3 },
        ] {
            let out = fam.channel(0.0).unwrap().apply(&rho).unwrap();
            assert!(max_abs_entry(&(out.matrix() - rho.matrix())) < 1e-12, "{}", fam.name());
            assert!(fam.channel(0.4).unwrap().completeness_defect() < 1e-12);
        }
    }

    #[test]
    fn rotation_profile_of_orthogonal_ensemble() {
        let mu = Ensemble::eigen_ensemble(&DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap());
        let target = ProfileTarget::Holevo(mu);
        let fam = PerturbationFamily::Rotation { dim: 2 };
        let settings = ProfileSettings::new(Grading::linear(), 10.0);
        let prof = robustness_profile(
            &Channel::identity(2),
            |e| fam.channel(e),
            |c: &Channel| target.evaluate(c),
            &[0.0, 0.1, 0.2, 0.4],
            &settings,
        )
        .unwrap();
        // a unitary keeps χ of the image ensemble; the gap stays zero while the metric grows
        assert!(prof.rows.iter().all(|r| r.gap < 1e-10));
        assert!(prof.rows.windows(2).all(|w| w[1].metric > w[0].metric));
        assert!(prof.pass);
    }
}

//! Seeded random states, unitaries and isometries.
//!
//! Haar-distributed isometries come from Gram-Schmidt orthonormalization of a
//! complex Gaussian matrix. Gram-Schmidt leaves the triangular factor with a
//! positive diagonal, which is the normalization that makes the result Haar.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use super::{orthonormalize_columns, outer, CMatrix, CVector, DensityMatrix, PureStateVector};

/// The generator used for every seeded routine in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for worker `index` derived from a base seed.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random isometry `C^cols → C^rows` (requires `rows ≥ cols`).
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    loop {
        if let Some(q) = orthonormalize_columns(&gaussian_matrix(rows, cols, rng)) {
            return q;
        }
    }
}

pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    haar_isometry(dim, dim, rng)
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureStateVector {
    let v: CVector = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
    PureStateVector::normalize(v).expect("gaussian vector is nonzero")
}

/// Random state `G G† / Tr(G G†)` with `G` a `dim × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = super::trace(&m).re;
    DensityMatrix::from_matrix_unchecked(m.unscale(tr))
}

/// Random state whose rank is drawn uniformly from `1..=dim`.
pub fn random_density_any_rank<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let rank = rng.gen_range(1..=dim);
    random_density(dim, rank, rng)
}

/// Random state with a prescribed spectrum in a Haar-random eigenbasis.
pub fn random_state_with_spectrum<R: Rng + ?Sized>(spectrum: &[f64], rng: &mut R) -> DensityMatrix {
    let d = spectrum.len();
    let u = haar_unitary(d, rng);
    let mut m = DMatrix::zeros(d, d);
    for (j, &l) in spectrum.iter().enumerate() {
        let col: CVector = u.column(j).into_owned();
        m += outer(&col).scale(l);
    }
    DensityMatrix::from_matrix_unchecked(m)
}

/// Point uniformly distributed on the probability simplex of size `n`.
pub fn random_simplex_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> alloc::vec::Vec<f64> {
    let mut w: alloc::vec::Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            -u.ln()
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

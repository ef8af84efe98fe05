//! Dense complex linear algebra helpers shared by the state and channel code.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CMatrix, CVector};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// nonincreasing order. Column `j` of `vectors` belongs to `values[j]`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation from Hermiticity.
pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub fn eigh(m: &CMatrix) -> Eigh {
    let n = m.nrows();
    if n == 0 {
        return Eigh {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Eigh { values, vectors }
}

impl Eigh {
    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn vector(&self, j: usize) -> CVector {
        self.vectors.column(j).into_owned()
    }
}

pub(crate) fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Trace norm of a Hermitian matrix.
pub(crate) fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigh(m).values.iter().map(|v| v.abs()).sum()
}

pub(crate) fn identity(n: usize) -> CMatrix {
    DMatrix::identity(n, n)
}

/// Kronecker product `a ⊗ b`.
pub(crate) fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Partial trace of an operator on `C^{da} ⊗ C^{db}`. With `trace_out_first`
/// the result lives on the second factor, otherwise on the first.
pub(crate) fn partial_trace_raw(m: &CMatrix, da: usize, db: usize, trace_out_first: bool) -> CMatrix {
    if trace_out_first {
        DMatrix::from_fn(db, db, |i, j| (0..da).map(|a| m[(a * db + i, a * db + j)]).sum())
    } else {
        DMatrix::from_fn(da, da, |i, j| (0..db).map(|b| m[(i * db + b, j * db + b)]).sum())
    }
}

pub(crate) fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Returns the
/// orthonormalized columns; fails if the columns are numerically dependent.
pub(crate) fn orthonormalize_columns(m: &CMatrix) -> Option<CMatrix> {
    let (rows, cols) = m.shape();
    let mut q = m.clone();
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let qk = q.column(k).into_owned();
                let proj = qk.dotc(&q.column(j));
                let mut col = q.column_mut(j);
                col -= qk * proj;
            }
        }
        let norm = q.column(j).norm();
        if !(norm > 1e-12) {
            return None;
        }
        let mut col = q.column_mut(j);
        col /= Complex64::new(norm, 0.0);
    }
    debug_assert_eq!(q.nrows(), rows);
    Some(q)
}

pub(crate) fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

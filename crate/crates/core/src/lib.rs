//! Numerical toolkit for spectral truncation of quantum states.
//!
//! The crate works with eigenvalue sequences of (possibly infinite-rank) states,
//! diagonal "Hamiltonians" used as gradings of those sequences, finite-dimensional
//! density matrices and channels, and ensembles of states. On top of these it
//! provides the explicit truncation error bound `Y_{C,T,D}(r)` for functions in the
//! classes `L(C,T,D)`, the Gibbs max-entropy function `F_G(E)`, and sweep routines
//! that certify uniform convergence over randomized channel families.
//!
//! All logarithms are natural, so every entropy is in nats.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the command
//! line front-end live in the `faprop` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod certify;
pub mod channels;
pub mod characteristics;
pub mod ensembles;
mod error;
pub mod gibbs;
pub mod qcore;
pub mod spectra;

pub use error::{Error, Result};
pub use qcore::{CMatrix, CVector, DensityMatrix, PureStateVector};

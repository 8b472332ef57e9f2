//! One-shot quantum divergences on explicit finite-dimensional states.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! - [`linalg`]: dense complex Hermitian matrices, a Jacobi eigensolver,
//!   spectral functions, Moore–Penrose powers and state distances.
//! - [`sdp`]: a small dense primal-dual interior-point SDP solver with
//!   duality-gap certificates, plus builders for the smoothing balls.
//! - [`divergences`]: max-divergence and its smoothed variants, the sandwiched
//!   Rényi family, relative entropy, hypothesis-testing and
//!   information-spectrum divergences.
//! - [`smoothing`]: constructive smoothing procedures (gentle projection,
//!   Rényi-threshold and information-spectrum smoothers, joint smoothing of
//!   bipartite marginals) that emit re-checkable certificates.
//!
//! All logarithms are base 2; divergences are reported in bits.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod divergences;
mod error;
pub mod linalg;
pub(crate) mod math;
pub mod sdp;
pub mod smoothing;
pub mod tol;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};

pub use divergences::{DivergenceValue, SmoothingBall};
pub use linalg::{CMatrix, EigenDecomposition, HermitianOperator, Normalization, PositiveOperator, QuantumState};

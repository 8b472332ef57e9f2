//! Entropic divergences in bits.
//!
//! Closed forms are used where they exist ([`dmax`], [`renyi`],
//! [`rel_entropy`]); [`dh`] and [`ds`] are evaluated through the spectral
//! structure of `ρ` and `σ`, and [`dmax_smooth`] solves a semidefinite program.

mod basic;
pub mod classical;
mod hypothesis;
mod smooth;
mod spectrum;

use core::cmp::Ordering;
use core::fmt;

use crate::linalg::{eig, CMatrix, EigenDecomposition, HermitianOperator, PositiveOperator, QuantumState};
use crate::tol::{RANK_TOL, SUPPORT_TOL};
use crate::{Error, Result};

pub use basic::{dmax, rel_entropy, renyi};
pub use hypothesis::{dh, dh_sdp, dh_with_test, HypothesisTest};
pub use smooth::{dmax_dual_witness, dmax_smooth, SmoothDmax};
pub use spectrum::{ds, SpectrumValue};

/// Extended real number of bits: finite or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DivergenceValue {
    Finite(f64),
    Infinite,
}

impl DivergenceValue {
    pub fn is_finite(self) -> bool {
        matches!(self, DivergenceValue::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            DivergenceValue::Finite(v) => Some(v),
            DivergenceValue::Infinite => None,
        }
    }

    /// The value as an `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Adds a finite offset; `+∞` stays `+∞`.
    pub fn offset(self, by: f64) -> DivergenceValue {
        match self {
            DivergenceValue::Finite(v) => DivergenceValue::Finite(v + by),
            DivergenceValue::Infinite => DivergenceValue::Infinite,
        }
    }

    /// `rhs − self` in extended arithmetic: `+∞` when only `rhs` is infinite,
    /// `−∞` when only `self` is, and `0` when both are.
    pub fn slack_to(self, rhs: DivergenceValue) -> f64 {
        match (self, rhs) {
            (DivergenceValue::Finite(a), DivergenceValue::Finite(b)) => b - a,
            (DivergenceValue::Finite(_), DivergenceValue::Infinite) => f64::INFINITY,
            (DivergenceValue::Infinite, DivergenceValue::Finite(_)) => f64::NEG_INFINITY,
            (DivergenceValue::Infinite, DivergenceValue::Infinite) => 0.0,
        }
    }
}

impl PartialOrd for DivergenceValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (DivergenceValue::Finite(a), DivergenceValue::Finite(b)) => a.partial_cmp(b),
            (DivergenceValue::Finite(_), DivergenceValue::Infinite) => Some(Ordering::Less),
            (DivergenceValue::Infinite, DivergenceValue::Finite(_)) => Some(Ordering::Greater),
            (DivergenceValue::Infinite, DivergenceValue::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for DivergenceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceValue::Finite(v) => write!(f, "{v}"),
            DivergenceValue::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BallKind {
    Purified,
    Trace,
}

/// Neighbourhood of a state: purified-distance ball over sub-normalized
/// states or trace-distance ball over normalized states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingBall {
    kind: BallKind,
    radius: f64,
}

impl SmoothingBall {
    pub fn new(kind: BallKind, radius: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&radius) {
            return Err(Error::domain("ball radius must lie in [0, 1)"));
        }
        Ok(SmoothingBall { kind, radius })
    }

    pub fn purified(radius: f64) -> Result<Self> {
        Self::new(BallKind::Purified, radius)
    }

    pub fn trace(radius: f64) -> Result<Self> {
        Self::new(BallKind::Trace, radius)
    }

    pub fn kind(&self) -> BallKind {
        self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

pub(crate) fn check_dims(rho: &QuantumState, sigma: &PositiveOperator) -> Result<()> {
    rho.op().check_same_dim(sigma.op())
}

/// Eigendecomposition of `σ` with its support basis.
pub(crate) struct Support {
    pub eig: EigenDecomposition,
    pub basis: CMatrix,
}

impl Support {
    pub fn of(sigma: &HermitianOperator) -> Result<Self> {
        let e = eig(sigma)?;
        let cut = RANK_TOL * e.max_value().max(0.0);
        let basis = e.basis_where(|l| l > cut);
        Ok(Support { eig: e, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// `tr ρ (1 − Π_σ)`.
    pub fn outside_mass(&self, rho: &HermitianOperator) -> f64 {
        let inside: f64 = rho.diagonal_in(&self.basis).iter().sum();
        (rho.trace() - inside).max(0.0)
    }

    /// Whether `supp ρ ⊆ supp σ` under the `SUPPORT_TOL` rule.
    pub fn contains(&self, rho: &HermitianOperator) -> Result<bool> {
        let scale = eig(rho)?.max_value().max(f64::MIN_POSITIVE);
        Ok(self.outside_mass(rho) <= SUPPORT_TOL * scale)
    }
}

pub(crate) fn check_eps(eps: f64, lo_open: bool) -> Result<()> {
    let ok = if lo_open { eps > 0.0 && eps < 1.0 } else { (0.0..1.0).contains(&eps) };
    if !ok {
        return Err(Error::domain(if lo_open { "ε must lie in (0, 1)" } else { "ε must lie in [0, 1)" }));
    }
    Ok(())
}

pub(crate) fn require_normalized(rho: &QuantumState) -> Result<()> {
    if !rho.is_normalized() {
        return Err(Error::domain("this divergence requires a normalized ρ"));
    }
    Ok(())
}

#[cfg(test)]
mod tests;

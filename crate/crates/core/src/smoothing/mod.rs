//! Constructive smoothing.
//!
//! Every smoother removes a projector `P` from `ρ` by the gentle projection
//! `ρ ↦ (1 − P)ρ(1 − P)/(1 − tr Pρ)`, whose purified distance from `ρ` is
//! exactly `√(tr Pρ)`, and returns a [`SmoothingCertificate`] listing the
//! inequalities the construction guarantees.

mod joint;
mod single;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::divergences::DivergenceValue;
use crate::linalg::{eig, generalized_fidelity, CMatrix, EigenDecomposition, HermitianOperator, PositiveOperator, QuantumState};
use crate::math;
use crate::tol::PSD_TOL;
use crate::{Error, Result};

pub use joint::{joint_smoother_feasibility, joint_smoother_response, JointMode, JointResponse, JointSmoothingResult, MarginalProjection,
    FEASIBILITY_TOL,};
pub use single::{hypothesis_smoother, renyi_smoother, verify_dmax_lower_bound, LowerBoundCheck};

/// Idempotency tolerance for projectors, relative to `1 + ‖P‖`.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Removed mass at which a projection counts as degenerate.
pub const DEGENERATE_MASS: f64 = 1e-12;
/// Relative tolerance of the checks a smoother performs on itself.
pub const SELF_CHECK_TOL: f64 = 1e-9;

/// One inequality `lhs ≤ rhs` of a certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        BoundCheck { name: name.into(), lhs, rhs }
    }

    /// `rhs − lhs`; `+∞` when only `rhs` is infinite.
    pub fn slack(&self) -> f64 {
        if self.lhs == self.rhs {
            0.0
        } else {
            self.rhs - self.lhs
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack() >= -tol
    }
}

/// Output of a smoother.
///
/// `projector` is the projector that was removed, so `smoothed_state` is the
/// gentle projection of the input by `projector`, and `distance` is
/// `√(tr projector · ρ)`. `witness_value` and `claimed_bound` are the two
/// sides of the bound the smoother certifies, in bits.
#[derive(Clone, Debug)]
pub struct SmoothingCertificate {
    pub smoothed_state: QuantumState,
    pub projector: HermitianOperator,
    pub distance: f64,
    pub claimed_bound: DivergenceValue,
    pub witness_value: f64,
    pub inequalities: Vec<BoundCheck>,
}

impl SmoothingCertificate {
    /// Worst slack over `witness_value ≤ claimed_bound` and the listed inequalities.
    pub fn worst_slack(&self) -> f64 {
        let main = DivergenceValue::Finite(self.witness_value).slack_to(self.claimed_bound);
        self.inequalities.iter().map(BoundCheck::slack).fold(main, f64::min)
    }

    /// Re-derives the smoothed state from `original` and the projector and
    /// checks the certificate against it. Returns the recomputed checks.
    pub fn verify(&self, original: &QuantumState, tol: f64) -> Result<Vec<BoundCheck>> {
        original.op().check_same_dim(&self.projector)?;
        let p = &self.projector;
        let idem = (&p.matrix().matmul(p.matrix()) - p.matrix()).max_abs();
        let removed = p.inner(original.op());
        let keep = HermitianOperator::identity(p.dim()).sub(p);
        let expected = keep.sandwich(original.op()).scale(1.0 / (1.0 - removed));
        let state_defect = expected.sub(self.smoothed_state.op()).matrix().max_abs();
        let fid = generalized_fidelity(original, &self.smoothed_state)?;
        let mut out = Vec::with_capacity(self.inequalities.len() + 5);
        out.push(BoundCheck::new("‖P² − P‖ ≤ tol", idem, PROJECTOR_TOL * (1.0 + p.matrix().max_abs())));
        out.push(BoundCheck::new("‖ρ̃ − gentle(ρ, P)‖ ≤ tol", state_defect, 1e-9));
        out.push(BoundCheck::new("|distance² − tr Pρ| ≤ tol", (self.distance * self.distance - removed).abs(), 1e-12));
        out.push(BoundCheck::new("|F̄(ρ, ρ̃) − (1 − tr Pρ)| ≤ tol", (fid - (1.0 - removed)).abs(), 1e-9));
        out.push(BoundCheck::new(
            "witness ≤ claimed bound",
            self.witness_value,
            self.claimed_bound.to_f64() + tol,
        ));
        for c in &self.inequalities {
            out.push(BoundCheck::new(c.name.clone(), c.lhs, c.rhs + tol * (1.0 + c.rhs.abs().min(1e12))));
        }
        if let Some(bad) = out.iter().find(|c| !c.holds(0.0)) {
            return Err(Error::CertificateViolation(format!("{}: {} > {}", bad.name, bad.lhs, bad.rhs)));
        }
        Ok(out)
    }
}

/// Gentle-projection smoothing: `ρ̃ = (1 − P)ρ(1 − P)/(1 − tr Pρ)` with purified
/// distance `√(tr Pρ)` from `ρ`.
pub fn gentle_projection(rho: &QuantumState, p: &HermitianOperator) -> Result<(QuantumState, f64)> {
    rho.op().check_same_dim(p)?;
    let idem = (&p.matrix().matmul(p.matrix()) - p.matrix()).max_abs();
    if idem > PROJECTOR_TOL * (1.0 + p.matrix().max_abs()) {
        return Err(Error::domain(format!("not a projector: ‖P² − P‖ = {idem:.3e}")));
    }
    let removed = p.inner(rho.op()).max(0.0);
    let kept = rho.trace() - removed;
    if removed >= 1.0 - DEGENERATE_MASS || kept <= DEGENERATE_MASS {
        return Err(Error::DegenerateProjection { removed_mass: removed });
    }
    let keep = HermitianOperator::identity(p.dim()).sub(p);
    let tilde = keep.sandwich(rho.op()).scale(1.0 / (1.0 - removed));
    let state = QuantumState::new(tilde, rho.normalization())?;
    Ok((state, math::sqrt(removed)))
}

/// Clips negative eigenvalues of `m` and rescales it so that `tr Mσ ≤ 1`.
pub fn admissible_witness(m: &HermitianOperator, sigma: &PositiveOperator) -> Result<HermitianOperator> {
    m.check_same_dim(sigma.op())?;
    let clipped = eig(m)?.map(|l| l.max(0.0));
    let norm = clipped.inner(sigma.op());
    Ok(if norm > 1.0 { clipped.scale(1.0 / norm) } else { clipped })
}

/// Clips the spectrum of `m` to `[0, 1]`.
pub fn unit_witness(m: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(eig(m)?.map(|l| l.clamp(0.0, 1.0)))
}

/// `M ⪰ 0` and `tr Mσ ≤ 1`.
pub(crate) fn check_trace_witness(m: &HermitianOperator, sigma: &PositiveOperator) -> Result<EigenDecomposition> {
    m.check_same_dim(sigma.op())?;
    let e = eig(m)?;
    if e.min_value() < -PSD_TOL * (1.0 + e.spectral_norm()) {
        return Err(Error::domain("witness must be positive semidefinite"));
    }
    let norm = m.inner(sigma.op());
    if norm > 1.0 + SELF_CHECK_TOL {
        return Err(Error::domain(format!("witness has tr Mσ = {norm} > 1")));
    }
    Ok(e)
}

/// `0 ⪯ M ⪯ 1`.
pub(crate) fn check_unit_witness(m: &HermitianOperator) -> Result<EigenDecomposition> {
    let e = eig(m)?;
    let tol = PSD_TOL * (1.0 + e.spectral_norm());
    if e.min_value() < -tol || e.max_value() > 1.0 + tol {
        return Err(Error::domain("witness must satisfy 0 ⪯ M ⪯ 1"));
    }
    Ok(e)
}

/// Outcome distributions of measuring `ρ` and `σ` in the eigenbasis of `M`.
pub(crate) fn measured(e: &EigenDecomposition, rho: &HermitianOperator, sigma: &HermitianOperator) -> (Vec<f64>, Vec<f64>) {
    let clip = |v: Vec<f64>| v.into_iter().map(|x| x.max(0.0)).collect();
    (clip(rho.diagonal_in(&e.vectors)), clip(sigma.diagonal_in(&e.vectors)))
}

/// `Σ_{i ∈ idx} |v_i⟩⟨v_i|` for the eigenvectors of `e`.
pub(crate) fn projector_on(e: &EigenDecomposition, idx: &[usize]) -> HermitianOperator {
    let cols: CMatrix = e.vectors.select_columns(idx);
    HermitianOperator::identity(idx.len()).congruence(&cols)
}

/// `log₂ x` with `log₂ 0 = −∞`.
pub(crate) fn log2_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        math::log2(x)
    } else {
        f64::NEG_INFINITY
    }
}

pub(crate) fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests;

use alloc::vec::Vec;

use super::eig::{eig, singular_values, EigenDecomposition};
use super::matrix::CMatrix;
use super::operators::{HermitianOperator, QuantumState};
use crate::tol::SQRT_CUT;
use crate::math;
use crate::Result;

/// `T(ρ, σ) = ½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    rho.op().check_same_dim(sigma.op())?;
    trace_norm(&rho.op().sub(sigma.op())).map(|n| 0.5 * n)
}

/// `‖X‖₁ = Σ |λᵢ(X)|`.
pub fn trace_norm(x: &HermitianOperator) -> Result<f64> {
    Ok(eig(x)?.values.iter().map(|l| l.abs()).sum())
}

/// `‖√ρ √σ‖₁`, computed as the sum of the singular values of
/// `diag(√λ) U†V diag(√μ)` for `ρ = U diag(λ) U†` and `σ = V diag(μ) V†`.
/// Eigenvalues below `SQRT_CUT · λ_max` are treated as zero.
pub fn root_fidelity(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    rho.check_same_dim(sigma)?;
    let (er, es) = (eig(rho)?, eig(sigma)?);
    let roots = |e: &EigenDecomposition| -> Vec<f64> {
        let cut = SQRT_CUT * e.max_value().max(0.0);
        e.values.iter().map(|&l| if l > cut { math::sqrt(l) } else { 0.0 }).collect()
    };
    let (a, b) = (roots(&er), roots(&es));
    let overlap = er.vectors.adjoint().matmul(&es.vectors);
    let n = rho.dim();
    let core = CMatrix::from_fn(n, n, |i, j| overlap[(i, j)] * (a[i] * b[j]));
    Ok(singular_values(&core)?.iter().sum())
}

/// Generalized fidelity for sub-normalized states,
/// `F̄ = (‖√ρ√σ‖₁ + √((1 − tr ρ)(1 − tr σ)))²`, clamped to `[0, 1]`.
pub fn generalized_fidelity(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    let overlap = root_fidelity(rho.op(), sigma.op())?;
    let defect = if rho.is_normalized() || sigma.is_normalized() {
        0.0
    } else {
        ((1.0 - rho.trace()) * (1.0 - sigma.trace())).max(0.0)
    };
    let root = overlap + math::sqrt(defect);
    Ok((root * root).clamp(0.0, 1.0))
}

/// Purified distance `P = √(1 − F̄)`.
pub fn purified_distance(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    Ok(math::sqrt((1.0 - generalized_fidelity(rho, sigma)?).max(0.0)))
}

use super::{check_dims, DivergenceValue, Support};
use crate::linalg::{eig, mp_power_from, PositiveOperator, QuantumState};
use crate::math;
use crate::{Error, Result};

/// `D_max(ρ‖σ) = log₂ ‖σ^{-1/2} ρ σ^{-1/2}‖_∞`, or `+∞` when `supp ρ ⊄ supp σ`.
pub fn dmax(rho: &QuantumState, sigma: &PositiveOperator) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let sup = Support::of(sigma.op())?;
    if !sup.contains(rho.op())? {
        return Ok(DivergenceValue::Infinite);
    }
    let s = mp_power_from(&sup.eig, -0.5)?;
    let top = eig(&s.sandwich(rho.op()))?.max_value();
    if !(top > 0.0) {
        return Err(Error::NumericalFailure("σ^{-1/2}ρσ^{-1/2} has no positive eigenvalue".into()));
    }
    Ok(DivergenceValue::Finite(math::log2(top)))
}

/// Sandwiched Rényi divergence of order `α ∈ [1/2, 1) ∪ (1, ∞)`.
pub fn renyi(rho: &QuantumState, sigma: &PositiveOperator, alpha: f64) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    if alpha == 1.0 {
        return Err(Error::domain("α = 1 is the relative entropy; use rel_entropy"));
    }
    if !(alpha >= 0.5 && alpha.is_finite()) {
        return Err(Error::domain("α must lie in [1/2, 1) ∪ (1, ∞)"));
    }
    let sup = Support::of(sigma.op())?;
    if alpha > 1.0 && !sup.contains(rho.op())? {
        return Ok(DivergenceValue::Infinite);
    }
    let s = mp_power_from(&sup.eig, (1.0 - alpha) / (2.0 * alpha))?;
    let inner = eig(&s.sandwich(rho.op()))?;
    let cut = crate::tol::RANK_TOL * inner.max_value().max(0.0);
    let q: f64 = inner.values.iter().filter(|&&l| l > cut).map(|&l| math::powf(l, alpha)).sum();
    if !(q > 0.0) {
        return Ok(DivergenceValue::Infinite);
    }
    Ok(DivergenceValue::Finite(math::log2(q / rho.trace()) / (alpha - 1.0)))
}

/// `D(ρ‖σ) = tr ρ (log₂ ρ − log₂ σ) / tr ρ`, or `+∞` when `supp ρ ⊄ supp σ`.
pub fn rel_entropy(rho: &QuantumState, sigma: &PositiveOperator) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    let sup = Support::of(sigma.op())?;
    if !sup.contains(rho.op())? {
        return Ok(DivergenceValue::Infinite);
    }
    let er = eig(rho.op())?;
    let cut = crate::tol::RANK_TOL * er.max_value();
    let self_term: f64 = er.values.iter().filter(|&&l| l > cut).map(|&l| l * math::log2(l)).sum();
    let diag = rho.op().diagonal_in(&sup.basis);
    let scut = crate::tol::RANK_TOL * sup.eig.max_value();
    let sig: alloc::vec::Vec<f64> = sup.eig.values.iter().copied().filter(|&l| l > scut).collect();
    let cross: f64 = diag.iter().zip(&sig).map(|(p, s)| p * math::log2(*s)).sum();
    Ok(DivergenceValue::Finite((self_term - cross) / rho.trace()))
}

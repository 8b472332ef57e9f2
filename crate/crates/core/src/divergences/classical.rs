//! Divergences of probability vectors, i.e. of commuting `ρ` and `σ` written
//! in a common eigenbasis.

use alloc::vec::Vec;

use super::DivergenceValue;
use crate::math;
use crate::{Error, Result};

fn check(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    if p.is_empty() || p.iter().chain(q).any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::domain("distributions must be non-empty and nonnegative"));
    }
    Ok(())
}

/// `log₂ max_i p_i / q_i`.
pub fn dmax(p: &[f64], q: &[f64]) -> Result<DivergenceValue> {
    check(p, q)?;
    let mut best = f64::NEG_INFINITY;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi == 0.0 {
                return Ok(DivergenceValue::Infinite);
            }
            best = best.max(pi / qi);
        }
    }
    Ok(DivergenceValue::Finite(math::log2(best)))
}

/// `(1/(α−1)) log₂ (Σ p_i^α q_i^{1−α} / Σ p_i)`.
pub fn renyi(p: &[f64], q: &[f64], alpha: f64) -> Result<DivergenceValue> {
    check(p, q)?;
    if alpha == 1.0 || !(alpha >= 0.5 && alpha.is_finite()) {
        return Err(Error::domain("α must lie in [1/2, 1) ∪ (1, ∞)"));
    }
    let mut s = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            if alpha > 1.0 {
                return Ok(DivergenceValue::Infinite);
            }
            continue;
        }
        s += math::powf(pi, alpha) * math::powf(qi, 1.0 - alpha);
    }
    if !(s > 0.0) {
        return Ok(DivergenceValue::Infinite);
    }
    let tp: f64 = p.iter().sum();
    Ok(DivergenceValue::Finite(math::log2(s / tp) / (alpha - 1.0)))
}

/// `Σ p_i log₂(p_i/q_i) / Σ p_i`.
pub fn rel_entropy(p: &[f64], q: &[f64]) -> Result<DivergenceValue> {
    check(p, q)?;
    let mut s = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(DivergenceValue::Infinite);
        }
        s += pi * math::log2(pi / qi);
    }
    Ok(DivergenceValue::Finite(s / p.iter().sum::<f64>()))
}

/// Optimal randomized test of type-I error `ε`: accept atoms in decreasing
/// order of `p_i/q_i`, the last one fractionally. Returns the test weights
/// and `−log₂ Σ t_i q_i`.
pub fn dh_test(p: &[f64], q: &[f64], eps: f64) -> Result<(Vec<f64>, DivergenceValue)> {
    check(p, q)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::domain("ε must lie in [0, 1)"));
    }
    let target = 1.0 - eps;
    let mut order: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    // Decreasing p/q, comparing p_i q_j against p_j q_i so that q = 0 sorts first.
    order.sort_by(|&i, &j| (p[j] * q[i]).total_cmp(&(p[i] * q[j])).then(i.cmp(&j)));
    let mut t = alloc::vec![0.0; p.len()];
    let mut mass = 0.0;
    let mut k = 0;
    while k < order.len() && mass < target {
        // Atoms with equal ratio share one weight.
        let mut end = k + 1;
        while end < order.len() && p[order[k]] * q[order[end]] == p[order[end]] * q[order[k]] {
            end += 1;
        }
        let group: f64 = order[k..end].iter().map(|&i| p[i]).sum();
        let w = ((target - mass) / group).min(1.0);
        for &i in &order[k..end] {
            t[i] = w;
        }
        mass += w * group;
        k = end;
    }
    let beta: f64 = t.iter().zip(q).map(|(a, b)| a * b).sum();
    let value = if beta > 0.0 { DivergenceValue::Finite(-math::log2(beta)) } else { DivergenceValue::Infinite };
    Ok((t, value))
}

/// Hypothesis-testing divergence of distributions.
pub fn dh(p: &[f64], q: &[f64], eps: f64) -> Result<DivergenceValue> {
    dh_test(p, q, eps).map(|r| r.1)
}

/// `sup{λ : Σ_{i : 2^λ q_i > p_i} p_i ≤ ε}`: the largest atom of the
/// log-likelihood ratio at which its distribution function first exceeds
/// `ε`, or `+∞` if the atoms with `q_i > 0` carry mass at most `ε`.
pub fn ds(p: &[f64], q: &[f64], eps: f64) -> Result<DivergenceValue> {
    check(p, q)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain("ε must lie in (0, 1)"));
    }
    let mut atoms: Vec<(f64, f64)> = p
        .iter()
        .zip(q)
        .filter(|(&pi, &qi)| pi > 0.0 && qi > 0.0)
        .map(|(&pi, &qi)| (math::log2(pi / qi), pi))
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cum = 0.0;
    for (lam, mass) in atoms {
        cum += mass;
        if cum > eps {
            return Ok(DivergenceValue::Finite(lam));
        }
    }
    Ok(DivergenceValue::Infinite)
}

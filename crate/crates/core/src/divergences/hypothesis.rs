use alloc::vec;

use super::{check_dims, check_eps, require_normalized, DivergenceValue, Support};
use crate::linalg::{eig, positive_part_from, HermitianOperator, PositiveOperator, QuantumState};
use crate::math;
use crate::sdp::{self, LinMap, SdpBuilder, SdpSolution, Sense};
use crate::{Error, Result};

const MAX_BISECTIONS: usize = 120;
const LOG_RANGE: f64 = 96.0;

/// An optimal test `0 ⪯ Λ ⪯ 1` with `tr Λρ = 1 − ε`.
#[derive(Clone, Debug)]
pub struct HypothesisTest {
    pub value: DivergenceValue,
    pub test: HermitianOperator,
    /// `tr Λσ`.
    pub type_two_error: f64,
    /// Threshold `t` of the Neyman–Pearson test `{ρ − tσ}_+`; `None` when
    /// the test lives outside the support of `σ`.
    pub threshold: Option<f64>,
}

/// `D_h^ε(ρ‖σ) = −log₂ min{tr Λσ : tr Λρ ≥ 1 − ε, 0 ⪯ Λ ⪯ 1}`.
pub fn dh(rho: &QuantumState, sigma: &PositiveOperator, eps: f64) -> Result<DivergenceValue> {
    dh_with_test(rho, sigma, eps).map(|t| t.value)
}

/// Evaluates [`dh`] and returns the Neyman–Pearson test that attains it.
///
/// The threshold is bisected in log-space on `s = 1/t` for the projectors
/// `Λ(s) = {sρ − σ}_+`, whose overlap `tr Λ(s)ρ` is nondecreasing in `s`. The
/// final test mixes the bracketing projectors so that `tr Λρ = 1 − ε`.
pub fn dh_with_test(rho: &QuantumState, sigma: &PositiveOperator, eps: f64) -> Result<HypothesisTest> {
    check_dims(rho, sigma)?;
    check_eps(eps, false)?;
    require_normalized(rho)?;
    let target = 1.0 - eps;
    let r = rho.op();
    let s_op = sigma.op();

    // Mass of ρ on ker σ can be accepted at no type-II cost.
    let sup = Support::of(s_op)?;
    let outside = sup.outside_mass(r);
    if outside >= target - 1e-12 {
        let kernel = HermitianOperator::identity(r.dim()).sub(&HermitianOperator::identity(sup.rank()).congruence(&sup.basis));
        let test = kernel.scale((target / outside).min(1.0));
        let beta = test.inner(s_op).max(0.0);
        return Ok(HypothesisTest { value: DivergenceValue::Infinite, test, type_two_error: beta, threshold: None });
    }

    let proj = |log_s: f64| -> Result<(HermitianOperator, f64)> {
        let x = r.scale(math::exp2(log_s)).sub(s_op);
        let p = positive_part_from(&eig(&x)?);
        let g = p.inner(r);
        Ok((p, g))
    };

    let mut lo = -LOG_RANGE;
    let mut hi = LOG_RANGE;
    let (mut p_lo, mut g_lo) = proj(lo)?;
    let (mut p_hi, mut g_hi) = proj(hi)?;
    if g_hi < target {
        // Only the support projector of ρ reaches the level (ε → 0).
        let er = eig(r)?;
        let cut = crate::tol::RANK_TOL * er.max_value();
        p_hi = er.projector_where(|l| l > cut);
        g_hi = p_hi.inner(r);
    } else if g_lo >= target {
        // Cannot happen once the kernel mass is below the level; keep the bracket sane.
        p_lo = HermitianOperator::zeros(r.dim());
        g_lo = 0.0;
    } else {
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= 1e-13 * (1.0 + hi.abs().max(lo.abs())) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let (p, g) = proj(mid)?;
            if g < target {
                lo = mid;
                p_lo = p;
                g_lo = g;
            } else {
                hi = mid;
                p_hi = p;
                g_hi = g;
            }
        }
    }
    let w = if g_hi > g_lo { ((target - g_lo) / (g_hi - g_lo)).clamp(0.0, 1.0) } else { 1.0 };
    let test = p_lo.scale(1.0 - w).add(&p_hi.scale(w));
    let beta = test.inner(s_op);
    let value = if beta > 0.0 { DivergenceValue::Finite(-math::log2(beta)) } else { DivergenceValue::Infinite };
    Ok(HypothesisTest { value, test, type_two_error: beta.max(0.0), threshold: Some(math::exp2(-0.5 * (lo + hi))) })
}

/// [`dh`] evaluated by the SDP solver, for cross-checking.
pub fn dh_sdp(rho: &QuantumState, sigma: &PositiveOperator, eps: f64) -> Result<(DivergenceValue, SdpSolution)> {
    check_dims(rho, sigma)?;
    check_eps(eps, false)?;
    let d = rho.dim();
    let mut b = SdpBuilder::new();
    let lam = b.add_block(d);
    b.add_objective(lam, sigma.op().matrix());
    b.add_linear(&[(lam, rho.op().matrix().clone())], Sense::Ge, 1.0 - eps);
    b.add_matrix_constraint(vec![(lam, LinMap::Identity(1.0))], Sense::Le, &HermitianOperator::identity(d));
    let p = b.build();
    let sol = sdp::solve(&p)?;
    if !sol.is_optimal() {
        return Err(Error::SdpNotSolved { status: sol.status, problem: alloc::boxed::Box::new(p) });
    }
    let beta = sol.primal_value;
    let value = if beta > 0.0 { DivergenceValue::Finite(-math::log2(beta)) } else { DivergenceValue::Infinite };
    Ok((value, sol))
}

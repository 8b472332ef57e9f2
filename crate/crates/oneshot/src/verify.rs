//! Numerical checks of the one-shot inequalities on explicit instances.
//!
//! Every verifier returns named slacks `rhs − lhs` in bits (or in the natural
//! unit of the inequality); an inequality holds when its slack is
//! nonnegative. `+∞` slacks mark vacuous inequalities.

use oneshot_core::divergences::{dh, dmax_smooth, ds, renyi, DivergenceValue, SmoothingBall};
use oneshot_core::linalg::{generalized_fidelity, loewner_margin, purified_distance};
use oneshot_core::smoothing::{
    admissible_witness, hypothesis_smoother, joint_smoother_feasibility, renyi_smoother, verify_dmax_lower_bound,
    BoundCheck, JointMode, JointSmoothingResult, SmoothingCertificate,
};
use oneshot_core::tol::DEFAULT_ETA;
use oneshot_core::{HermitianOperator, PositiveOperator, QuantumState};
use serde::Serialize;

use crate::channel::Channel;
use crate::Result;

/// One named slack.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "crate::io::ext_f64::serialize")]
    pub slack: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, slack: f64) -> Self {
        Check { name: name.into(), slack }
    }
}

/// `b − a` in extended arithmetic.
fn slack(a: DivergenceValue, b: DivergenceValue) -> f64 {
    a.slack_to(b)
}

fn slack_f64(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        b - a
    }
}

fn worst(checks: &[BoundCheck]) -> f64 {
    checks.iter().map(BoundCheck::slack).fold(f64::INFINITY, f64::min)
}

/// `D_s^ε ≤ D_h^ε` and `D_h^ε ≤ D_s^{ε+δ} + log₂(1/δ)`.
pub fn verify_eq9(rho: &QuantumState, sigma: &PositiveOperator, eps: f64, delta: f64) -> Result<Vec<Check>> {
    let h = dh(rho, sigma, eps)?.to_f64();
    let s_lo = ds(rho, sigma, eps)?.to_f64();
    let s_hi = ds(rho, sigma, eps + delta)?.to_f64() + (1.0 / delta).log2();
    Ok(vec![Check::new("D_s^ε ≤ D_h^ε", slack_f64(s_lo, h)), Check::new("D_h^ε ≤ D_s^{ε+δ} + log₂(1/δ)", slack_f64(h, s_hi))])
}

/// `D(E(ρ)‖E(σ)) ≤ D(ρ‖σ)` for `D_h^ε`, `D̃_α` and `D_max^ε` on the purified ball.
pub fn verify_data_processing(
    rho: &QuantumState,
    sigma: &PositiveOperator,
    channel: &Channel,
    eps: f64,
    alpha: f64,
) -> Result<Vec<Check>> {
    let (er, es) = (channel.apply_state(rho)?, channel.apply_positive(sigma)?);
    let ball = SmoothingBall::purified(eps)?;
    Ok(vec![
        Check::new("D_h^ε(E(ρ)‖E(σ)) ≤ D_h^ε(ρ‖σ)", slack(dh(&er, &es, eps)?, dh(rho, sigma, eps)?)),
        Check::new("D̃_α(E(ρ)‖E(σ)) ≤ D̃_α(ρ‖σ)", slack(renyi(&er, &es, alpha)?, renyi(rho, sigma, alpha)?)),
        Check::new(
            "D_max^ε(E(ρ)‖E(σ)) ≤ D_max^ε(ρ‖σ)",
            slack(dmax_smooth(&er, &es, ball)?.value, dmax_smooth(rho, sigma, ball)?.value),
        ),
    ])
}

/// Re-derives a certificate from `ρ`, its projector and the witness `M`
/// without using the smoother's intermediate values: the gentle projection
/// is recomputed, its fidelity with `ρ` compared against `1 − tr Pρ`, and
/// `log₂ tr Mρ̃` recomputed against the certificate's witness value.
pub fn recheck_certificate(cert: &SmoothingCertificate, rho: &QuantumState, m: &HermitianOperator, tol: f64) -> Result<Vec<Check>> {
    let p = cert.projector.matrix();
    let idem = (&p.matmul(p) - p).max_abs();
    let removed = cert.projector.inner(rho.op());
    let keep = HermitianOperator::identity(rho.dim()).sub(&cert.projector);
    let tilde_op = keep.sandwich(rho.op()).scale(1.0 / (1.0 - removed));
    let tilde = QuantumState::new(tilde_op.clone(), rho.normalization())?;
    let state_defect = tilde_op.sub(cert.smoothed_state.op()).matrix().max_abs();
    let fid = generalized_fidelity(rho, &tilde)?;
    let value = m.inner(&tilde_op).log2();
    let mut out = vec![
        Check::new("P idempotent", 1e-10 - idem),
        Check::new("ρ̃ is the gentle projection", 1e-9 - state_defect),
        Check::new("F̄(ρ, ρ̃) = 1 − tr Pρ", 1e-9 - (fid - (1.0 - removed)).abs()),
        Check::new("distance = √tr Pρ", 1e-9 - (cert.distance - removed.max(0.0).sqrt()).abs()),
        Check::new("witness value = log₂ tr Mρ̃", 1e-9 * (1.0 + value.abs()) - (value - cert.witness_value).abs()),
    ];
    for c in cert.verify(rho, tol)? {
        out.push(Check::new(format!("certificate: {}", c.name), c.slack()));
    }
    Ok(out)
}

fn smoothing_checks(
    label: &str,
    rho: &QuantumState,
    sigma: &PositiveOperator,
    ball: SmoothingBall,
    bound: DivergenceValue,
    tol: f64,
    build: impl Fn(&HermitianOperator) -> oneshot_core::Result<SmoothingCertificate>,
) -> Result<Vec<Check>> {
    let sd = dmax_smooth(rho, sigma, ball)?;
    let mut out = vec![Check::new(format!("{label}: D_max^ε ≤ bound"), slack(sd.value, bound))];
    let (DivergenceValue::Finite(value), Some(witness)) = (sd.value, sd.witness.as_ref()) else {
        return Ok(out);
    };
    if !bound.is_finite() {
        return Ok(out);
    }
    let m = admissible_witness(witness, sigma)?;
    let cert = build(&m)?;
    out.push(Check::new(format!("{label}: certificate"), cert.worst_slack()));
    out.push(Check::new(format!("{label}: log₂ tr Mρ̃ ≤ bound"), slack_f64(cert.witness_value, bound.to_f64())));
    out.push(Check::new(format!("{label}: D_max^ε ≤ log₂ tr Mρ̃"), slack_f64(value, cert.witness_value)));
    let recheck = recheck_certificate(&cert, rho, &m, tol)?;
    out.push(Check::new(format!("{label}: independent recheck"), recheck.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min)));
    Ok(out)
}

/// `D_max^ε ≤ D̃_α + (1/(α−1)) log₂(1/ε²) + log₂(1/(1−ε²))` on the purified
/// ball (and on the trace ball for normalized `ρ`), plus the Rényi-threshold
/// smoother certificate at the optimal dual witness of each ball.
pub fn verify_theorem1(rho: &QuantumState, sigma: &PositiveOperator, eps: f64, alpha: f64, tol: f64) -> Result<Vec<Check>> {
    let r = renyi(rho, sigma, alpha)?;
    let bound = r.offset((1.0 / (eps * eps)).log2() / (alpha - 1.0) + (1.0 / (1.0 - eps * eps)).log2());
    let build = |m: &HermitianOperator| renyi_smoother(rho, sigma, eps, alpha, m);
    let mut out = smoothing_checks("purified", rho, sigma, SmoothingBall::purified(eps)?, bound, tol, build)?;
    if rho.is_normalized() {
        out.extend(smoothing_checks("trace", rho, sigma, SmoothingBall::trace(eps)?, bound, tol, build)?);
    }
    Ok(out)
}

/// Both sides of the sandwich
/// `D_h^{1−ε−δ} − log₂(4/δ²) ≤ D_max^{√ε} − log₂(1/(1−ε)) ≤ D_h^{1−ε}`,
/// the fidelity chain of the lower bound and the information-spectrum
/// smoother certificate at the optimal dual witness.
pub fn verify_theorem2(rho: &QuantumState, sigma: &PositiveOperator, eps: f64, delta: f64, tol: f64) -> Result<Vec<Check>> {
    let upper = dh(rho, sigma, 1.0 - eps)?.offset((1.0 / (1.0 - eps)).log2());
    let build = |m: &HermitianOperator| hypothesis_smoother(rho, sigma, eps, m, DEFAULT_ETA);
    let mut out = smoothing_checks("upper", rho, sigma, SmoothingBall::purified(eps.sqrt())?, upper.offset(DEFAULT_ETA), tol, build)?;
    let lower = verify_dmax_lower_bound(rho, sigma, eps, delta)?;
    out.push(Check::new("lower: D_h^{1−ε−δ} − log₂(4/δ²) ≤ D_max^{√ε} − log₂(1/(1−ε))", lower.slack));
    if !lower.chain.is_empty() {
        out.push(Check::new("lower: fidelity chain", worst(&lower.chain)));
    }
    Ok(out)
}

/// Independent re-verification of a joint smoothing result.
pub fn recheck_joint(
    result: &JointSmoothingResult,
    rho_ab: &QuantumState,
    sigma_a: &PositiveOperator,
    sigma_b: &PositiveOperator,
) -> Result<Vec<Check>> {
    let (da, db) = (sigma_a.dim(), sigma_b.dim());
    let tilde = &result.smoothed_joint_state;
    let ta = tilde.op().partial_trace_b(da, db);
    let tb = tilde.op().partial_trace_a(da, db);
    let marg_defect = ta
        .sub(result.marginal_a.op())
        .matrix()
        .max_abs()
        .max(tb.sub(result.marginal_b.op()).matrix().max_abs());
    let mut out = vec![
        Check::new("P(ρ, ρ̃) ≤ r", result.radius - purified_distance(rho_ab, tilde)?),
        Check::new("tr ρ̃ = 1", 1e-9 - (tilde.trace() - 1.0).abs()),
        Check::new("marginals are partial traces", 1e-10 - marg_defect),
    ];
    for (name, marg, lambda, sigma) in [("A", &ta, result.lambda_a, sigma_a), ("B", &tb, result.lambda_b, sigma_b)] {
        let s = match lambda {
            DivergenceValue::Finite(l) => loewner_margin(marg, &sigma.op().scale(l.exp2()))?,
            DivergenceValue::Infinite => f64::INFINITY,
        };
        out.push(Check::new(format!("ρ̃_{name} ⪯ 2^λ_{name} σ_{name}"), s));
    }
    Ok(out)
}

fn joint(
    rho_ab: &QuantumState,
    sigma_a: &PositiveOperator,
    sigma_b: &PositiveOperator,
    eps: f64,
    eps2: f64,
    mode: JointMode,
) -> Result<Vec<Check>> {
    let (da, db) = (sigma_a.dim(), sigma_b.dim());
    let result = joint_smoother_feasibility(rho_ab, sigma_a, sigma_b, eps, eps2, DEFAULT_ETA, mode)?;
    let rho_a = rho_ab.partial_trace_b(da, db)?;
    let rho_b = rho_ab.partial_trace_a(da, db)?;
    let (base_a, base_b, delta) = match mode {
        JointMode::Theorem => (dh(&rho_a, sigma_a, 1.0 - eps)?, dh(&rho_b, sigma_b, 1.0 - eps2)?, -(1.0 - eps - eps2).log2()),
        JointMode::Corollary { delta: d } => (
            dmax_smooth(&rho_a, sigma_a, SmoothingBall::purified(eps.sqrt())?)?.value,
            dmax_smooth(&rho_b, sigma_b, SmoothingBall::purified(eps2.sqrt())?)?.value,
            2.0 - 2.0 * d.log2() - (1.0 - eps - eps2 - 2.0 * d).log2(),
        ),
    };
    let mut out = recheck_joint(&result, rho_ab, sigma_a, sigma_b)?;
    let lam_defect = |got: DivergenceValue, base: DivergenceValue| match (got, base.offset(delta + DEFAULT_ETA)) {
        (DivergenceValue::Finite(a), DivergenceValue::Finite(b)) => (a - b).abs(),
        (a, b) if a == b => 0.0,
        _ => f64::INFINITY,
    };
    let defect = lam_defect(result.lambda_a, base_a).max(lam_defect(result.lambda_b, base_b));
    out.push(Check::new("λ's recomputed", 1e-6 - defect));
    Ok(out)
}

/// Feasibility of the joint smoothing problem at the `λ`'s of the theorem,
/// re-verified independently.
pub fn verify_theorem3(
    rho_ab: &QuantumState,
    sigma_a: &PositiveOperator,
    sigma_b: &PositiveOperator,
    eps: f64,
    eps2: f64,
) -> Result<Vec<Check>> {
    joint(rho_ab, sigma_a, sigma_b, eps, eps2, JointMode::Theorem)
}

/// As [`verify_theorem3`] with the smooth max-divergence `λ`'s of the corollary.
pub fn verify_corollary(
    rho_ab: &QuantumState,
    sigma_a: &PositiveOperator,
    sigma_b: &PositiveOperator,
    eps: f64,
    eps2: f64,
    delta: f64,
) -> Result<Vec<Check>> {
    joint(rho_ab, sigma_a, sigma_b, eps, eps2, JointMode::Corollary { delta })
}

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    check_open_unit, check_trace_witness, gentle_projection, log2_or_neg_inf, measured, projector_on, BoundCheck,
    SmoothingCertificate, SELF_CHECK_TOL,
};
use crate::divergences::{classical, dh, dh_with_test, dmax_smooth, renyi, DivergenceValue, SmoothingBall};
use crate::linalg::{generalized_fidelity, purified_distance, HermitianOperator, PositiveOperator, QuantumState};
use crate::math;
use crate::tol::RANK_TOL;
use crate::{Error, Result};

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + SELF_CHECK_TOL * (1.0 + rhs.abs())
}

/// Rényi-threshold smoother for a fixed witness `M`.
///
/// With `p_i`, `q_i` the outcome probabilities of `ρ`, `σ` in the eigenbasis
/// of `M`, the projector `Π` collects the outcomes whose ratio `p_i/q_i`
/// exceeds `2^{D̃_α}·ε^{−2/(α−1)}`. Then `tr Πρ ≤ ε²` and the gentle
/// projection `ρ̃` satisfies
/// `log₂ tr Mρ̃ ≤ D̃_α + (1/(α−1)) log₂(1/ε²) + log₂(1/(1−ε²))`.
///
/// Outcomes with `q_i ≤ RANK_TOL · max q` have ratio `+∞` if
/// `p_i > RANK_TOL` and are treated as `0/0` (never removed) otherwise.
pub fn renyi_smoother(
    rho: &QuantumState,
    sigma: &PositiveOperator,
    eps: f64,
    alpha: f64,
    m: &HermitianOperator,
) -> Result<SmoothingCertificate> {
    rho.op().check_same_dim(sigma.op())?;
    check_open_unit("ε", eps)?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::domain("α must exceed 1"));
    }
    let e = check_trace_witness(m, sigma)?;
    let d_alpha = match renyi(rho, sigma, alpha)? {
        DivergenceValue::Finite(v) => v,
        DivergenceValue::Infinite => return Err(Error::domain("the Rényi divergence must be finite")),
    };
    let log_g = 2.0 * math::log2(1.0 / eps);
    let log_threshold = d_alpha + log_g / (alpha - 1.0);
    let threshold = math::exp2(log_threshold);

    let (p, q) = measured(&e, rho.op(), sigma.op());
    let q_cut = RANK_TOL * q.iter().cloned().fold(0.0, f64::max);
    let removed: Vec<usize> = (0..p.len())
        .filter(|&i| if q[i] <= q_cut { p[i] > RANK_TOL } else { p[i] / q[i] > threshold })
        .collect();
    let pi = projector_on(&e, &removed);
    let mass = pi.inner(rho.op());
    if mass > eps * eps {
        return Err(Error::CertificateViolation(format!("tr Πρ = {mass} exceeds ε² = {}", eps * eps)));
    }
    let (tilde, dist) = gentle_projection(rho, &pi)?;
    let m_tilde = m.inner(tilde.op());
    let scaled = (1.0 - mass) * m_tilde;
    if !within(scaled, threshold) {
        return Err(Error::CertificateViolation(format!(
            "(1 − tr Πρ) tr Mρ̃ = {scaled} exceeds the threshold {threshold}"
        )));
    }
    let bound = log_threshold + math::log2(1.0 / (1.0 - eps * eps));
    let witness = log2_or_neg_inf(m_tilde);
    let inequalities = vec![
        BoundCheck::new("tr Πρ ≤ ε²", mass, eps * eps),
        BoundCheck::new("(1 − tr Πρ) tr Mρ̃ ≤ 2^D̃α g(ε)^(1/(α−1))", scaled, threshold),
        BoundCheck::new("P(ρ, ρ̃) ≤ ε", dist, eps),
        BoundCheck::new("tr Mσ ≤ 1", m.inner(sigma.op()), 1.0),
    ];
    Ok(SmoothingCertificate {
        smoothed_state: tilde,
        projector: pi,
        distance: dist,
        claimed_bound: DivergenceValue::Finite(bound),
        witness_value: witness,
        inequalities,
    })
}

/// Information-spectrum smoother for a fixed witness `M`.
///
/// With `P`, `Q` the outcome distributions of `ρ`, `σ` in the eigenbasis of
/// `M` and `K = D_s^{1−ε}(P‖Q)`, the outcomes `I = {i : P(i) ≤ 2^{K+η} Q(i)}`
/// carry mass above `1 − ε`. Removing the others gives `ρ̃` within purified
/// distance `√ε` and `tr Mρ̃ ≤ 2^{K+η}/(1 − ε)`. Since `K ≤ D_h^{1−ε}(ρ‖σ)`,
/// this witnesses `D_max^{√ε}(ρ‖σ) ≤ D_h^{1−ε}(ρ‖σ) + log₂(1/(1−ε))` up to `η`.
pub fn hypothesis_smoother(
    rho: &QuantumState,
    sigma: &PositiveOperator,
    eps: f64,
    m: &HermitianOperator,
    eta: f64,
) -> Result<SmoothingCertificate> {
    rho.op().check_same_dim(sigma.op())?;
    check_open_unit("ε", eps)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain("η must be positive"));
    }
    if !rho.is_normalized() {
        return Err(Error::domain("the information-spectrum smoother needs a normalized ρ"));
    }
    let e = check_trace_witness(m, sigma)?;
    let level = 1.0 - eps;
    let (p, q) = measured(&e, rho.op(), sigma.op());
    let k = classical::ds(&p, &q, level)?;
    let dh_quantum = dh(rho, sigma, level)?;

    let k_val = match k {
        DivergenceValue::Finite(v) => v,
        DivergenceValue::Infinite => {
            // Unbounded claim: keep ρ.
            let d = rho.dim();
            let (tilde, dist) = gentle_projection(rho, &HermitianOperator::zeros(d))?;
            return Ok(SmoothingCertificate {
                witness_value: log2_or_neg_inf(m.inner(tilde.op())),
                smoothed_state: tilde,
                projector: HermitianOperator::zeros(d),
                distance: dist,
                claimed_bound: DivergenceValue::Infinite,
                inequalities: vec![BoundCheck::new("tr Πρ ≤ ε", 0.0, eps)],
            });
        }
    };
    let scale = math::exp2(k_val + eta);
    let removed: Vec<usize> = (0..p.len()).filter(|&i| p[i] > scale * q[i]).collect();
    let pi = projector_on(&e, &removed);
    let mass = pi.inner(rho.op());
    if mass >= eps + SELF_CHECK_TOL {
        return Err(Error::CertificateViolation(format!("tr Πρ = {mass} exceeds ε = {eps}")));
    }
    let (tilde, dist) = gentle_projection(rho, &pi)?;
    let m_tilde = m.inner(tilde.op());
    let cap = scale / level;
    if !within(m_tilde, cap) {
        return Err(Error::CertificateViolation(format!("tr Mρ̃ = {m_tilde} exceeds 2^(K+η)/(1−ε) = {cap}")));
    }
    let bound = k_val + eta + math::log2(1.0 / level);
    let inequalities = vec![
        BoundCheck::new("tr Πρ ≤ ε", mass, eps),
        BoundCheck::new("tr Mρ̃ ≤ 2^(K+η)/(1−ε)", m_tilde, cap),
        BoundCheck::new("P(ρ, ρ̃) ≤ √ε", dist, math::sqrt(eps)),
        BoundCheck::new("K ≤ D_h^(1−ε)(ρ‖σ)", k_val, dh_quantum.to_f64() + SELF_CHECK_TOL),
        BoundCheck::new("tr Mσ ≤ 1", m.inner(sigma.op()), 1.0),
    ];
    Ok(SmoothingCertificate {
        smoothed_state: tilde,
        projector: pi,
        distance: dist,
        claimed_bound: DivergenceValue::Finite(bound),
        witness_value: log2_or_neg_inf(m_tilde),
        inequalities,
    })
}

/// Both sides of `D_max^{√ε}(ρ‖σ) − log₂(1/(1−ε)) ≥ D_h^{1−ε−δ}(ρ‖σ) − log₂(4/δ²)`
/// and the fidelity chain behind it.
#[derive(Clone, Debug)]
pub struct LowerBoundCheck {
    /// `D_max^{√ε}(ρ‖σ) − log₂(1/(1−ε))`.
    pub lhs: DivergenceValue,
    /// `D_h^{1−ε−δ}(ρ‖σ) − log₂(4/δ²)`.
    pub rhs: DivergenceValue,
    /// `lhs − rhs`.
    pub slack: f64,
    /// `√(1−ε) ≤ √F̄(ρ,ρ̃) ≤ … ≤ √(2^λ tr Qσ) + √(1−ε−δ)`, step by step.
    pub chain: Vec<BoundCheck>,
    /// The optimal smoothed state lies on the boundary of the ball.
    pub saturated: bool,
    /// `|√F̄(ρ,ρ̃) − √(1−ε)|`, reported only when `saturated`.
    pub midpoint_defect: Option<f64>,
}

impl LowerBoundCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol && self.chain.iter().all(|c| c.holds(tol))
    }
}

/// Evaluates the lower bound of the smooth max-divergence by hypothesis
/// testing, with `ε ∈ (0, 1)`, `δ > 0` and `ε + δ < 1`.
pub fn verify_dmax_lower_bound(rho: &QuantumState, sigma: &PositiveOperator, eps: f64, delta: f64) -> Result<LowerBoundCheck> {
    rho.op().check_same_dim(sigma.op())?;
    check_open_unit("ε", eps)?;
    if !(delta > 0.0 && eps + delta < 1.0) {
        return Err(Error::domain("δ must be positive with ε + δ < 1"));
    }
    if !rho.is_normalized() {
        return Err(Error::domain("ρ must be normalized"));
    }
    let radius = math::sqrt(eps);
    let smooth = dmax_smooth(rho, sigma, SmoothingBall::purified(radius)?)?;
    let level = 1.0 - eps - delta;
    let test = dh_with_test(rho, sigma, level)?;
    let lhs = smooth.value.offset(-math::log2(1.0 / (1.0 - eps)));
    let rhs = test.value.offset(-math::log2(4.0 / (delta * delta)));
    let slack = rhs.slack_to(lhs);

    let mut chain = Vec::new();
    let mut saturated = false;
    let mut midpoint_defect = None;
    if let (DivergenceValue::Finite(lambda), Some(tilde)) = (smooth.value, smooth.smoothed.as_ref()) {
        let q = &test.test;
        let not_q = HermitianOperator::identity(q.dim()).sub(q);
        let root_f = math::sqrt(generalized_fidelity(rho, tilde)?);
        let (q_rho, q_tilde) = (q.inner(rho.op()).max(0.0), q.inner(tilde.op()).max(0.0));
        let (n_rho, n_tilde) = (not_q.inner(rho.op()).max(0.0), not_q.inner(tilde.op()).max(0.0));
        let measured = math::sqrt(q_rho * q_tilde) + math::sqrt(n_rho * n_tilde);
        let dropped = math::sqrt(q_tilde) + math::sqrt(n_rho);
        let top = math::sqrt(math::exp2(lambda) * q.inner(sigma.op()).max(0.0)) + math::sqrt(level);
        let floor = math::sqrt(1.0 - eps);
        chain.push(BoundCheck::new("√(1−ε) ≤ √F̄(ρ,ρ̃)", floor, root_f));
        chain.push(BoundCheck::new("√F̄(ρ,ρ̃) ≤ measured fidelity", root_f, measured));
        chain.push(BoundCheck::new("measured fidelity ≤ √tr Qρ̃ + √tr(1−Q)ρ", measured, dropped));
        chain.push(BoundCheck::new("√tr Qρ̃ + √tr(1−Q)ρ ≤ √(2^λ tr Qσ) + √(1−ε−δ)", dropped, top));
        chain.push(BoundCheck::new("√(1−ε) ≤ √(2^λ tr Qσ) + √(1−ε−δ)", floor, top));
        saturated = purified_distance(rho, tilde)? >= radius - 1e-6;
        if saturated {
            midpoint_defect = Some((root_f - floor).abs());
        }
    }
    Ok(LowerBoundCheck { lhs, rhs, slack, chain, saturated, midpoint_defect })
}

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{
    check_open_unit, check_unit_witness, gentle_projection, measured, projector_on, BoundCheck,
    SmoothingCertificate, SELF_CHECK_TOL,
};
use crate::divergences::{classical, dh, dmax_smooth, DivergenceValue, SmoothingBall};
use crate::linalg::{
    loewner_margin, purified_distance, EigenDecomposition, HermitianOperator, Normalization, PositiveOperator,
    QuantumState,
};
use crate::math;
use crate::sdp::{self, fidelity_ball_constraints, LinMap, SdpBuilder, SdpSolution, SdpStatus, Sense, TraceMode};
use crate::{Error, Result};

/// Tolerance of the post-hoc checks on the feasibility SDP output.
pub const FEASIBILITY_TOL: f64 = 1e-6;

fn check_bipartite(rho_ab: &QuantumState, sigma_a: &PositiveOperator, sigma_b: &PositiveOperator) -> Result<(usize, usize)> {
    let (da, db) = (sigma_a.dim(), sigma_b.dim());
    if rho_ab.dim() != da * db {
        return Err(Error::DimensionMismatch { expected: da * db, found: rho_ab.dim() });
    }
    if !rho_ab.is_normalized() {
        return Err(Error::domain("joint smoothing needs a normalized ρ_AB"));
    }
    Ok((da, db))
}

fn check_pair(eps: f64, eps2: f64) -> Result<()> {
    check_open_unit("ε", eps)?;
    check_open_unit("ε'", eps2)?;
    if eps + eps2 >= 1.0 {
        return Err(Error::domain("ε + ε' must be below 1"));
    }
    Ok(())
}

/// `log₂(x/y)` for `x, y ≥ 0`, with `0/y = −∞` and `x/0 = +∞` for `x > 0`.
fn ratio_bits(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else if y <= 0.0 {
        f64::INFINITY
    } else {
        math::log2(x / y)
    }
}

/// One marginal of [`joint_smoother_response`].
#[derive(Clone, Debug)]
pub struct MarginalProjection {
    /// `Π = Σ_{i ∈ I} |v_i⟩⟨v_i|`, the outcomes kept.
    pub projector: HermitianOperator,
    /// `K = D_s^{1−ε}(P‖Q)` of the measured distributions.
    pub k: DivergenceValue,
    /// `tr Πρ`.
    pub kept_mass: f64,
}

fn marginal_projection(e: &EigenDecomposition, rho: &QuantumState, sigma: &PositiveOperator, eps: f64, eta: f64) -> Result<MarginalProjection> {
    let (p, q) = measured(e, rho.op(), sigma.op());
    let k = classical::ds(&p, &q, 1.0 - eps)?;
    let kept: Vec<usize> = match k {
        DivergenceValue::Finite(v) => {
            let scale = math::exp2(v + eta);
            (0..p.len()).filter(|&i| p[i] <= scale * q[i]).collect()
        }
        DivergenceValue::Infinite => (0..p.len()).collect(),
    };
    let projector = projector_on(e, &kept);
    let kept_mass = projector.inner(rho.op());
    Ok(MarginalProjection { projector, k, kept_mass })
}

/// Output of [`joint_smoother_response`].
#[derive(Clone, Debug)]
pub struct JointResponse {
    /// Removed projector `1 − Π_A ⊗ Π_B` and the smoothed joint state.
    pub certificate: SmoothingCertificate,
    pub a: MarginalProjection,
    pub b: MarginalProjection,
    /// `K_A + η + Δ`: the bound `tr M_A ρ̃_A ≤ 2^{λ_A} tr M_A σ_A` is certified.
    pub lambda_a: DivergenceValue,
    pub lambda_b: DivergenceValue,
    /// `Δ = −log₂(1 − ε − ε')`.
    pub delta: f64,
}

/// Joint smoother for fixed witnesses `0 ⪯ M_A, M_B ⪯ 1`.
///
/// On each marginal the outcomes of the eigenbasis measurement of `M_X` with
/// `P_X(i) ≤ 2^{K_X+η} Q_X(i)` are kept, where `K_A = D_s^{1−ε}(P_A‖Q_A)` and
/// `K_B = D_s^{1−ε'}(P_B‖Q_B)`. Projecting with `Π_A ⊗ Π_B` removes at most
/// `ε + ε'` of the mass, so the smoothed state lies within purified distance
/// `√(ε + ε')` and `tr M_X ρ̃_X ≤ 2^{K_X+η+Δ} tr M_X σ_X` for both marginals.
///
/// The `witness_value` of the certificate is
/// `max_X log₂(tr M_X ρ̃_X / tr M_X σ_X) − λ_X` and its claimed bound is `0`.
#[allow(clippy::too_many_arguments)]
pub fn joint_smoother_response(
    rho_ab: &QuantumState,
    sigma_a: &PositiveOperator,
    sigma_b: &PositiveOperator,
    eps: f64,
    eps2: f64,
    m_a: &HermitianOperator,
    m_b: &HermitianOperator,
    eta: f64,
) -> Result<JointResponse> {
    let (da, db) = check_bipartite(rho_ab, sigma_a, sigma_b)?;
    check_pair(eps, eps2)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain("η must be positive"));
    }
    m_a.check_same_dim(sigma_a.op())?;
    m_b.check_same_dim(sigma_b.op())?;
    let ea = check_unit_witness(m_a)?;
    let eb = check_unit_witness(m_b)?;
    let rho_a = rho_ab.partial_trace_b(da, db)?;
    let rho_b = rho_ab.partial_trace_a(da, db)?;
    let a = marginal_projection(&ea, &rho_a, sigma_a, eps, eta)?;
    let b = marginal_projection(&eb, &rho_b, sigma_b, eps2, eta)?;
    for (name, m, level) in [("A", &a, 1.0 - eps), ("B", &b, 1.0 - eps2)] {
        if m.kept_mass < level - SELF_CHECK_TOL {
            return Err(Error::CertificateViolation(format!("tr Π_{name} ρ_{name} = {} < {level}", m.kept_mass)));
        }
    }

    let pi = a.projector.kron(&b.projector);
    let kept = pi.inner(rho_ab.op());
    let total = eps + eps2;
    if kept < 1.0 - total - SELF_CHECK_TOL {
        return Err(Error::CertificateViolation(format!("tr (Π_A ⊗ Π_B)ρ = {kept} < 1 − ε − ε'")));
    }
    let removed_projector = HermitianOperator::identity(da * db).sub(&pi);
    let (tilde, dist) = gentle_projection(rho_ab, &removed_projector)?;
    let delta = -math::log2(1.0 - total);
    let tilde_a = tilde.op().partial_trace_b(da, db);
    let tilde_b = tilde.op().partial_trace_a(da, db);

    let mut inequalities = vec![
        BoundCheck::new("1 − ε ≤ tr Π_A ρ_A", 1.0 - eps, a.kept_mass),
        BoundCheck::new("1 − ε' ≤ tr Π_B ρ_B", 1.0 - eps2, b.kept_mass),
        BoundCheck::new("tr (1 − Π_A⊗Π_B)ρ_AB ≤ ε + ε'", 1.0 - kept, total),
        BoundCheck::new("P(ρ, ρ̃) ≤ √(ε + ε')", dist, math::sqrt(total)),
    ];
    let mut worst = f64::NEG_INFINITY;
    let lambdas: Vec<DivergenceValue> = [(&a, m_a, &tilde_a, sigma_a, "A"), (&b, m_b, &tilde_b, sigma_b, "B")]
        .into_iter()
        .map(|(mp, m, t, s, name)| {
            let lambda = mp.k.offset(eta + delta);
            let lhs = m.inner(t);
            let ms = m.inner(s.op());
            if let DivergenceValue::Finite(l) = lambda {
                let rhs = math::exp2(l) * ms;
                inequalities.push(BoundCheck::new(format!("tr M_{name} ρ̃_{name} ≤ 2^λ_{name} tr M_{name} σ_{name}"), lhs, rhs));
                worst = worst.max(ratio_bits(lhs, ms) - l);
            }
            lambda
        })
        .collect();
    for c in &inequalities {
        if !c.holds(SELF_CHECK_TOL * (1.0 + c.rhs.abs())) {
            return Err(Error::CertificateViolation(format!("{}: {} > {}", c.name, c.lhs, c.rhs)));
        }
    }
    let certificate = SmoothingCertificate {
        smoothed_state: tilde,
        projector: removed_projector,
        distance: dist,
        claimed_bound: DivergenceValue::Finite(0.0),
        witness_value: worst,
        inequalities,
    };
    Ok(JointResponse { certificate, a, b, lambda_a: lambdas[0], lambda_b: lambdas[1], delta })
}

/// Which `λ`'s the feasibility problem uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JointMode {
    /// `λ_A = D_h^{1−ε}(ρ_A‖σ_A) + Δ + η`, `λ_B = D_h^{1−ε'}(ρ_B‖σ_B) + Δ + η`,
    /// `Δ = −log₂(1 − ε − ε')`, radius `√(ε + ε')`.
    Theorem,
    /// `λ_A = D_max^{√ε}(ρ_A‖σ_A) + Δ + η` and symmetric for `B` with
    /// `Δ = 2 − 2 log₂ δ − log₂(1 − ε − ε' − 2δ)`, radius `√(ε + ε' + 2δ)`.
    Corollary { delta: f64 },
}

/// A state in the ball whose marginals satisfy both max-divergence bounds.
#[derive(Clone, Debug)]
pub struct JointSmoothingResult {
    pub smoothed_joint_state: QuantumState,
    pub marginal_a: QuantumState,
    pub marginal_b: QuantumState,
    pub lambda_a: DivergenceValue,
    pub lambda_b: DivergenceValue,
    /// The correction `Δ` added to both `λ`'s (excluding `η`).
    pub delta: f64,
    pub radius: f64,
    /// Post-hoc checks: ball membership, unit trace and both operator inequalities.
    pub checks: Vec<BoundCheck>,
    pub solution: SdpSolution,
}

/// Finds `ρ̃_AB` with `tr ρ̃_AB = 1`, `P(ρ_AB, ρ̃_AB) ≤ r`,
/// `tr_B ρ̃_AB ⪯ 2^{λ_A} σ_A` and `tr_A ρ̃_AB ⪯ 2^{λ_B} σ_B` by an SDP.
///
/// Such a state exists for the `λ`'s of either [`JointMode`], so an infeasible
/// solver status is reported as a [`Error::CertificateViolation`].
pub fn joint_smoother_feasibility(
    rho_ab: &QuantumState,
    sigma_a: &PositiveOperator,
    sigma_b: &PositiveOperator,
    eps: f64,
    eps2: f64,
    eta: f64,
    mode: JointMode,
) -> Result<JointSmoothingResult> {
    let (da, db) = check_bipartite(rho_ab, sigma_a, sigma_b)?;
    check_pair(eps, eps2)?;
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::domain("η must be nonnegative"));
    }
    let rho_a = rho_ab.partial_trace_b(da, db)?;
    let rho_b = rho_ab.partial_trace_a(da, db)?;
    let (base_a, base_b, delta, radius) = match mode {
        JointMode::Theorem => (
            dh(&rho_a, sigma_a, 1.0 - eps)?,
            dh(&rho_b, sigma_b, 1.0 - eps2)?,
            -math::log2(1.0 - eps - eps2),
            math::sqrt(eps + eps2),
        ),
        JointMode::Corollary { delta: d } => {
            check_open_unit("δ", d)?;
            let total = eps + eps2 + 2.0 * d;
            if total >= 1.0 {
                return Err(Error::domain("ε + ε' + 2δ must be below 1"));
            }
            (
                dmax_smooth(&rho_a, sigma_a, SmoothingBall::purified(math::sqrt(eps))?)?.value,
                dmax_smooth(&rho_b, sigma_b, SmoothingBall::purified(math::sqrt(eps2))?)?.value,
                2.0 - 2.0 * math::log2(d) - math::log2(1.0 - total),
                math::sqrt(total),
            )
        }
    };
    let lambda_a = base_a.offset(delta + eta);
    let lambda_b = base_b.offset(delta + eta);

    let mut b = SdpBuilder::new();
    let frag = fidelity_ball_constraints(&mut b, rho_ab, radius, None, TraceMode::ExactlyOne)?;
    let marginals = [
        (lambda_a, sigma_a, LinMap::PartialTraceB { da, db }),
        (lambda_b, sigma_b, LinMap::PartialTraceA { da, db }),
    ];
    for (lambda, sigma, map) in &marginals {
        if let DivergenceValue::Finite(l) = lambda {
            b.add_matrix_constraint(vec![(frag.smoothed, map.clone())], Sense::Le, &sigma.op().scale(math::exp2(*l)));
        }
    }
    let problem = b.build();
    let sol = sdp::solve(&problem)?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => {
            return Err(Error::CertificateViolation("joint smoothing SDP reported infeasibility".into()));
        }
        status => return Err(Error::SdpNotSolved { status, problem: Box::new(problem) }),
    }

    let tilde = QuantumState::from_approximate(&frag.state(&sol), Normalization::Normalized)?;
    let marginal_a = tilde.partial_trace_b(da, db)?;
    let marginal_b = tilde.partial_trace_a(da, db)?;
    let raw_trace = frag.state(&sol).trace();
    let mut checks = vec![
        BoundCheck::new("P(ρ, ρ̃) ≤ r", purified_distance(rho_ab, &tilde)?, radius),
        BoundCheck::new("|tr ρ̃ − 1| ≤ 0", (raw_trace - 1.0).abs(), 0.0),
    ];
    for ((lambda, sigma, _), (marg, name)) in marginals.iter().zip([(&marginal_a, "A"), (&marginal_b, "B")]) {
        if let DivergenceValue::Finite(l) = lambda {
            let margin = loewner_margin(marg.op(), &sigma.op().scale(math::exp2(*l)))?;
            checks.push(BoundCheck::new(format!("ρ̃_{name} ⪯ 2^λ_{name} σ_{name}"), -margin, 0.0));
        }
    }
    if let Some(bad) = checks.iter().find(|c| !c.holds(FEASIBILITY_TOL)) {
        return Err(Error::CertificateViolation(format!("{}: {} > {}", bad.name, bad.lhs, bad.rhs)));
    }
    Ok(JointSmoothingResult {
        smoothed_joint_state: tilde,
        marginal_a,
        marginal_b,
        lambda_a,
        lambda_b,
        delta,
        radius,
        checks,
        solution: sol,
    })
}

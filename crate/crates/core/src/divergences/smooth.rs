use alloc::boxed::Box;
use alloc::format;
use alloc::vec;

use super::{check_dims, dmax, BallKind, DivergenceValue, SmoothingBall, Support};
use crate::linalg::{
    eig, mp_power_from, operator_leq, purified_distance, trace_distance, CMatrix, HermitianOperator, Normalization,
    PositiveOperator, QuantumState,
};
use crate::math;
use crate::sdp::{
    self, fidelity_ball_constraints, trace_ball_constraints, BallFragment, LinMap, SdpBuilder, SdpSolution, SdpStatus,
    Sense, TraceMode,
};
use crate::{Error, Result};

/// Post-hoc tolerance for ball membership and `ρ̃ ⪯ 2^λ σ`.
const POST_TOL: f64 = 1e-6;

/// Smooth max-divergence with its optimizer and a dual witness.
#[derive(Clone, Debug)]
pub struct SmoothDmax {
    pub value: DivergenceValue,
    /// The optimal `ρ̃` in the ball (absent when the value is `+∞`).
    pub smoothed: Option<QuantumState>,
    /// `M ⪰ 0` with `tr Mσ ≤ 1` attaining the minimax value.
    pub witness: Option<HermitianOperator>,
    /// Solver output; `None` when a closed form was used.
    pub solution: Option<SdpSolution>,
}

impl SmoothDmax {
    pub fn gap(&self) -> f64 {
        self.solution.as_ref().map_or(0.0, |s| s.gap)
    }
}

fn add_ball(b: &mut SdpBuilder, rho: &QuantumState, ball: &SmoothingBall, frame: Option<&CMatrix>) -> Result<BallFragment> {
    match ball.kind() {
        BallKind::Purified => fidelity_ball_constraints(b, rho, ball.radius(), frame, TraceMode::AtMostOne),
        BallKind::Trace => {
            if !rho.is_normalized() {
                return Err(Error::domain("the trace ball requires a normalized ρ"));
            }
            trace_ball_constraints(b, rho, ball.radius(), frame)
        }
    }
}

fn ball_normalization(ball: &SmoothingBall) -> Normalization {
    match ball.kind() {
        BallKind::Purified => Normalization::Subnormalized,
        BallKind::Trace => Normalization::Normalized,
    }
}

/// Distance of `ρ̃` from `ρ` in the metric of the ball.
pub(crate) fn ball_distance(rho: &QuantumState, tilde: &QuantumState, ball: &SmoothingBall) -> Result<f64> {
    match ball.kind() {
        BallKind::Purified => purified_distance(rho, tilde),
        BallKind::Trace => trace_distance(rho, tilde),
    }
}

/// `D_max^ε(ρ‖σ) = min{log₂ t : ρ̃ ⪯ tσ, ρ̃ ∈ B^ε(ρ)}` as one SDP.
///
/// The smoothed state is sought on `supp σ`. The dual slack of the
/// constraint `ρ̃ ⪯ tσ` is the optimal witness `M`.
pub fn dmax_smooth(rho: &QuantumState, sigma: &PositiveOperator, ball: SmoothingBall) -> Result<SmoothDmax> {
    check_dims(rho, sigma)?;
    if ball.kind() == BallKind::Trace && !rho.is_normalized() {
        return Err(Error::domain("the trace ball requires a normalized ρ"));
    }
    let eps = ball.radius();
    if ball.kind() == BallKind::Purified && rho.trace() <= eps * eps {
        return Err(Error::domain("tr ρ ≤ ε²: the zero operator lies in the ball and the value is −∞"));
    }
    let sup = Support::of(sigma.op())?;
    if eps == 0.0 {
        return zero_radius(rho, sigma, &sup);
    }

    let v = sup.basis.clone();
    let sigma_r = sigma.op().congruence(&v.adjoint());
    let mut b = SdpBuilder::new();
    let frag = add_ball(&mut b, rho, &ball, Some(&v))?;
    let t = b.add_block(1);
    b.add_objective(t, &CMatrix::identity(1));
    let slack = b
        .add_matrix_constraint(
            vec![(frag.smoothed, LinMap::Identity(1.0)), (t, LinMap::ScalarTimes(sigma_r.scale(-1.0)))],
            Sense::Le,
            &HermitianOperator::zeros(v.cols()),
        )
        .expect("inequality constraints carry a slack");
    let problem = b.build();
    let sol = sdp::solve(&problem)?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => {
            return Ok(SmoothDmax { value: DivergenceValue::Infinite, smoothed: None, witness: None, solution: Some(sol) });
        }
        status => return Err(Error::SdpNotSolved { status, problem: Box::new(problem) }),
    }

    let t_opt = sol.primal_value;
    if !(t_opt > 0.0) {
        return Err(Error::NumericalFailure(format!("smooth max-divergence SDP returned t = {t_opt}")));
    }
    let tilde = QuantumState::from_approximate(&frag.state(&sol), ball_normalization(&ball))?;
    let dist = ball_distance(rho, &tilde, &ball)?;
    if dist > eps + POST_TOL {
        return Err(Error::CertificateViolation(format!("smoothed state at distance {dist} > ε = {eps}")));
    }
    let bound = sigma.op().scale(t_opt);
    if !operator_leq(tilde.op(), &bound, POST_TOL * (1.0 + t_opt))? {
        return Err(Error::CertificateViolation("smoothed state is not below t·σ".into()));
    }

    let m_r = slack.dual_value(&sol);
    let mut witness = m_r.congruence(&v);
    if sup.rank() < rho.dim() {
        // Penalize ker σ so the infimum over the full ball stays on supp σ.
        let kernel = HermitianOperator::identity(rho.dim()).sub(&HermitianOperator::identity(sup.rank()).congruence(&v));
        let penalty = 1e4 * eig(&m_r)?.max_value().max(1.0);
        witness = witness.add(&kernel.scale(penalty));
    }
    Ok(SmoothDmax {
        value: DivergenceValue::Finite(math::log2(t_opt)),
        smoothed: Some(tilde),
        witness: Some(witness),
        solution: Some(sol),
    })
}

fn zero_radius(rho: &QuantumState, sigma: &PositiveOperator, sup: &Support) -> Result<SmoothDmax> {
    let value = dmax(rho, sigma)?;
    if !value.is_finite() {
        return Ok(SmoothDmax { value, smoothed: None, witness: None, solution: None });
    }
    // M = σ^{-1/2}|v⟩⟨v|σ^{-1/2} for the top eigenvector v of σ^{-1/2}ρσ^{-1/2}.
    let s = mp_power_from(&sup.eig, -0.5)?;
    let e = eig(&s.sandwich(rho.op()))?;
    let top = e.vector(e.dim() - 1);
    let witness = s.sandwich(&HermitianOperator::pure(&top));
    Ok(SmoothDmax { value, smoothed: Some(rho.clone()), witness: Some(witness), solution: None })
}

/// `log₂ inf{tr Mρ̃ : ρ̃ ∈ B^ε(ρ)}` for `M ⪰ 0` with `tr Mσ ≤ 1`.
///
/// Every admissible `M` gives a lower bound on [`dmax_smooth`], with equality
/// at the optimal witness.
pub fn dmax_dual_witness(rho: &QuantumState, sigma: &PositiveOperator, ball: SmoothingBall, m: &HermitianOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    m.check_same_dim(rho.op())?;
    let norm = m.inner(sigma.op());
    if norm > 1.0 + 1e-9 {
        return Err(Error::domain(format!("witness has tr Mσ = {norm} > 1")));
    }
    if eig(m)?.min_value() < -crate::tol::PSD_TOL * (1.0 + m.matrix().max_abs()) {
        return Err(Error::domain("witness must be positive semidefinite"));
    }
    if ball.radius() == 0.0 {
        return Ok(math::log2(m.inner(rho.op())));
    }
    if ball.kind() == BallKind::Purified && rho.trace() <= ball.radius() * ball.radius() {
        return Ok(f64::NEG_INFINITY);
    }
    let mut b = SdpBuilder::new();
    let frag = add_ball(&mut b, rho, &ball, None)?;
    b.add_objective(frag.smoothed, m.matrix());
    let problem = b.build();
    let sol = sdp::solve(&problem)?;
    if !sol.is_optimal() {
        return Err(Error::SdpNotSolved { status: sol.status, problem: Box::new(problem) });
    }
    Ok(math::log2(sol.primal_value.max(0.0)))
}

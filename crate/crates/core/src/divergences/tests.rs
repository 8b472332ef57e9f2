use super::*;
use crate::linalg::{operator_leq, C64};
use crate::math;
use crate::testutil::{diag_positive, diag_state, positive, rng, state};
use alloc::vec;
use alloc::vec::Vec;

const P: [f64; 2] = [0.5, 0.5];
const Q: [f64; 2] = [0.25, 0.75];

fn f(v: DivergenceValue) -> f64 {
    v.to_f64()
}

#[test]
fn dmax_examples() {
    let rho = diag_state(&[0.3, 0.7]);
    assert!(f(dmax(&rho, &rho.to_positive()).unwrap()).abs() < 1e-12);
    let up = QuantumState::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let down = QuantumState::pure(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    assert_eq!(dmax(&up, &down.to_positive()).unwrap(), DivergenceValue::Infinite);
    let v = f(dmax(&diag_state(&P), &diag_positive(&Q)).unwrap());
    assert!((v - 1.0).abs() < 1e-12);
}

#[test]
fn dmax_certifies_operator_inequality() {
    let mut r = rng(1);
    for _ in 0..20 {
        let rho = state(3, 3, &mut r);
        let sigma = positive(3, &mut r);
        let v = f(dmax(&rho, &sigma).unwrap());
        assert!(operator_leq(rho.op(), &sigma.op().scale(math::exp2(v)), 1e-9).unwrap());
        assert!(!operator_leq(rho.op(), &sigma.op().scale(math::exp2(v - 1e-3)), 0.0).unwrap());
    }
}

#[test]
fn renyi_examples() {
    let rho = diag_state(&[0.2, 0.8]);
    for a in [0.5, 0.9, 1.5, 2.0, 7.0] {
        assert!(f(renyi(&rho, &rho.to_positive(), a).unwrap()).abs() < 1e-12);
    }
    let v = f(renyi(&diag_state(&P), &diag_positive(&Q), 2.0).unwrap());
    assert!((v - math::log2(4.0 / 3.0)).abs() < 1e-12);
    assert!(renyi(&rho, &rho.to_positive(), 1.0).is_err());
    assert!(renyi(&rho, &rho.to_positive(), 0.3).is_err());
}

#[test]
fn renyi_monotone_in_alpha() {
    let mut r = rng(2);
    for _ in 0..100 {
        let rho = state(3, 2, &mut r);
        let sigma = positive(3, &mut r);
        let a = f(renyi(&rho, &sigma, 1.5).unwrap());
        let b = f(renyi(&rho, &sigma, 3.0).unwrap());
        let m = f(dmax(&rho, &sigma).unwrap());
        assert!(a <= b + 1e-9 && b <= m + 1e-9, "{a} {b} {m}");
    }
}

#[test]
fn relative_entropy_examples() {
    let v = f(rel_entropy(&diag_state(&P), &diag_positive(&Q)).unwrap());
    assert!((v - (0.5 + 0.5 * math::log2(2.0 / 3.0))).abs() < 1e-12);
    let mut r = rng(3);
    for _ in 0..20 {
        let rho = state(3, 3, &mut r);
        let sigma = state(3, 3, &mut r).to_positive();
        let d = f(rel_entropy(&rho, &sigma).unwrap());
        let lo = f(renyi(&rho, &sigma, 1.0 - 1e-4).unwrap());
        let hi = f(renyi(&rho, &sigma, 1.0 + 1e-4).unwrap());
        assert!(lo - 1e-3 <= d && d <= hi + 1e-3, "{lo} {d} {hi}");
        assert!(d <= f(dmax(&rho, &sigma).unwrap()) + 1e-9);
    }
}

#[test]
fn dh_of_identical_states() {
    let mut r = rng(4);
    let rho = state(3, 2, &mut r);
    for eps in [0.0, 0.1, 0.5, 0.9] {
        let v = f(dh(&rho, &rho.to_positive(), eps).unwrap());
        assert!((v + math::log2(1.0 - eps)).abs() < 1e-9, "eps {eps}: {v}");
    }
}

#[test]
fn dh_classical_pair() {
    let t = dh_with_test(&diag_state(&P), &diag_positive(&Q), 0.5).unwrap();
    assert!((f(t.value) - 2.0).abs() < 1e-9);
    assert!((t.test.inner(diag_state(&P).op()) - 0.5).abs() < 1e-12);
}

#[test]
fn dh_test_is_admissible_and_matches_sdp() {
    let mut r = rng(5);
    for _ in 0..10 {
        let rho = state(2, 2, &mut r);
        let sigma = positive(2, &mut r);
        let t = dh_with_test(&rho, &sigma, 0.2).unwrap();
        let e = t.test.eig().unwrap();
        assert!(e.min_value() >= -1e-12 && e.max_value() <= 1.0 + 1e-12);
        assert!((t.test.inner(rho.op()) - 0.8).abs() < 1e-9);
        let (v, _) = dh_sdp(&rho, &sigma, 0.2).unwrap();
        assert!((f(t.value) - f(v)).abs() < 1e-6, "{} vs {}", f(t.value), f(v));
    }
}

#[test]
fn dh_infinite_when_test_avoids_sigma() {
    let rho = diag_state(&[0.6, 0.4]);
    let sigma = diag_positive(&[1.0, 0.0]);
    assert_eq!(dh(&rho, &sigma, 0.6).unwrap(), DivergenceValue::Infinite);
    assert!(dh(&rho, &sigma, 0.5).unwrap().is_finite());
    // ε = 0 needs the whole support of ρ.
    let v = f(dh(&diag_state(&[1.0, 0.0]), &diag_positive(&[0.5, 0.5]), 0.0).unwrap());
    assert!((v - 1.0).abs() < 1e-12);
}

#[test]
fn ds_examples() {
    let mut r = rng(6);
    let rho = state(3, 3, &mut r);
    for eps in [0.1, 0.5, 0.9] {
        let s = ds(&rho, &rho.to_positive(), eps).unwrap();
        assert!(s.value.abs() < 1e-9 && !s.capped_above);
    }
    let s = ds(&diag_state(&P), &diag_positive(&Q), 0.4).unwrap();
    assert!((s.value - math::log2(2.0 / 3.0)).abs() < 1e-12);
    let s = ds(&diag_state(&P), &diag_positive(&Q), 0.6).unwrap();
    assert!((s.value - 1.0).abs() < 1e-12);
}

#[test]
fn ds_cap_binds_without_support() {
    let s = ds(&diag_state(&[0.3, 0.7]), &diag_positive(&[1.0, 0.0]), 0.8).unwrap();
    assert!(s.capped_above && s.to_f64().is_infinite());
    let s = ds(&diag_state(&[0.3, 0.7]), &diag_positive(&[1.0, 0.0]), 0.2).unwrap();
    assert!(!s.capped_above);
}

#[test]
fn ds_finds_interior_crossing() {
    // σ = diag(1, 2), ρ = |+⟩⟨+|: f rises continuously between breakpoints.
    let plus = QuantumState::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
    let sigma = diag_positive(&[1.0, 2.0]);
    let eps = 0.05;
    let s = ds(&plus, &sigma, eps).unwrap();
    let fval = |lam: f64| {
        let x = sigma.op().scale(math::exp2(lam)).sub(plus.op());
        crate::linalg::positive_part_projector(&x).unwrap().inner(plus.op())
    };
    assert!(fval(s.value) <= eps + 1e-9);
    assert!(fval(s.value + 1e-6) > eps);
}

#[test]
fn ds_dh_sandwich_small_sample() {
    let mut r = rng(7);
    for _ in 0..30 {
        let rho = state(3, 3, &mut r);
        let sigma = positive(3, &mut r);
        let (eps, delta) = (0.1, 0.1);
        let s = ds(&rho, &sigma, eps).unwrap().to_f64();
        let h = f(dh(&rho, &sigma, eps).unwrap());
        let s2 = ds(&rho, &sigma, eps + delta).unwrap().to_f64();
        assert!(s <= h + 1e-6, "{s} > {h}");
        assert!(h <= s2 + math::log2(1.0 / delta) + 1e-6);
    }
}

#[test]
fn ds_is_feasible_for_pure_and_unsupported_inputs() {
    // Positive eigenvalues of 2^λσ − ρ far below ‖ρ‖ must still count.
    let mut r = rng(11);
    let fval = |rho: &QuantumState, sigma: &PositiveOperator, lam: f64| {
        let x = sigma.op().scale(math::exp2(lam)).sub(rho.op());
        crate::linalg::positive_part_projector(&x).unwrap().inner(rho.op())
    };
    for i in 0..40 {
        let (rho, sigma) = if i % 2 == 0 {
            (state(4, 1, &mut r), positive(4, &mut r))
        } else {
            (state(4, 4, &mut r), state(4, 2, &mut r).to_positive())
        };
        for eps in [0.1, 0.3] {
            let s = ds(&rho, &sigma, eps).unwrap();
            let h = f(dh(&rho, &sigma, eps).unwrap());
            assert_eq!(s.capped_above, h.is_infinite(), "instance {i}");
            assert!(fval(&rho, &sigma, s.value) <= eps + 1e-9, "instance {i}");
            assert!(s.value <= h + 1e-9, "instance {i}: {} > {h}", s.value);
        }
    }
}

#[test]
fn commuting_inputs_match_classical_formulas() {
    let mut r = rng(8);
    for _ in 0..20 {
        let p = crate::testutil::probability(4, &mut r);
        let q = crate::testutil::probability(4, &mut r);
        let (rho, sigma) = (diag_state(&p), diag_positive(&q));
        assert!((f(dmax(&rho, &sigma).unwrap()) - f(classical::dmax(&p, &q).unwrap())).abs() < 1e-10);
        assert!((f(renyi(&rho, &sigma, 2.0).unwrap()) - f(classical::renyi(&p, &q, 2.0).unwrap())).abs() < 1e-10);
        assert!((f(dh(&rho, &sigma, 0.3).unwrap()) - f(classical::dh(&p, &q, 0.3).unwrap())).abs() < 1e-9);
        assert!((ds(&rho, &sigma, 0.3).unwrap().value - f(classical::ds(&p, &q, 0.3).unwrap())).abs() < 1e-9);
    }
}

#[test]
fn smooth_dmax_zero_radius_is_dmax() {
    let mut r = rng(9);
    let rho = state(2, 2, &mut r);
    let sigma = positive(2, &mut r);
    let s = dmax_smooth(&rho, &sigma, SmoothingBall::purified(0.0).unwrap()).unwrap();
    assert!((f(s.value) - f(dmax(&rho, &sigma).unwrap())).abs() < 1e-9);
    let w = dmax_dual_witness(&rho, &sigma, SmoothingBall::purified(0.0).unwrap(), s.witness.as_ref().unwrap()).unwrap();
    assert!((w - f(s.value)).abs() < 1e-9);
}

#[test]
fn smooth_dmax_small_radius_approaches_dmax() {
    let mut r = rng(10);
    let rho = state(2, 2, &mut r);
    let sigma = positive(2, &mut r);
    let d = f(dmax(&rho, &sigma).unwrap());
    let s = dmax_smooth(&rho, &sigma, SmoothingBall::purified(1e-2).unwrap()).unwrap();
    assert!(f(s.value) <= d + 1e-6 && f(s.value) >= d - 0.1, "{} vs {d}", f(s.value));
}

#[test]
fn smooth_dmax_pure_state_monotone() {
    let rho = QuantumState::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
    let sigma = PositiveOperator::new(HermitianOperator::identity(2).scale(0.5)).unwrap();
    let mut last = f(dmax(&rho, &sigma).unwrap());
    assert!((last - 1.0).abs() < 1e-9);
    for eps in [0.1, 0.2, 0.3] {
        let v = f(dmax_smooth(&rho, &sigma, SmoothingBall::purified(eps).unwrap()).unwrap().value);
        assert!(v <= last + 1e-7, "{v} > {last}");
        last = v;
    }
}

#[test]
fn smooth_dmax_minimax_equality() {
    let mut r = rng(11);
    for kind in [BallKind::Purified, BallKind::Trace] {
        for _ in 0..3 {
            let rho = state(3, 3, &mut r);
            let sigma = positive(3, &mut r);
            let ball = SmoothingBall::new(kind, 0.2).unwrap();
            let s = dmax_smooth(&rho, &sigma, ball).unwrap();
            let m = s.witness.clone().unwrap();
            assert!(m.inner(sigma.op()) <= 1.0 + 1e-7);
            let w = dmax_dual_witness(&rho, &sigma, ball, &m).unwrap();
            assert!((w - f(s.value)).abs() <= 1e-6, "{kind:?}: {w} vs {}", f(s.value));
        }
    }
}

#[test]
fn dual_witness_constant_operator() {
    let mut r = rng(12);
    let rho = state(3, 3, &mut r);
    let sigma = positive(3, &mut r);
    let m = HermitianOperator::identity(3).scale(1.0 / sigma.trace());
    let ball = SmoothingBall::purified(0.3).unwrap();
    let w = dmax_dual_witness(&rho, &sigma, ball, &m).unwrap();
    // Smallest trace in the ball is 1 − ε².
    assert!((w - math::log2((1.0 - 0.09) / sigma.trace())).abs() < 1e-6, "{w}");
    let s = dmax_smooth(&rho, &sigma, ball).unwrap();
    assert!(w <= f(s.value) + 1e-6);
}

#[test]
fn smooth_dmax_rejects_vanishing_state() {
    let rho = QuantumState::new(HermitianOperator::from_real_diag(&[0.005, 0.0]), crate::Normalization::Subnormalized).unwrap();
    let sigma = diag_positive(&[0.5, 0.5]);
    assert!(dmax_smooth(&rho, &sigma, SmoothingBall::purified(0.1).unwrap()).is_err());
}

#[test]
fn smooth_dmax_infinite_when_ball_leaves_support() {
    let rho = diag_state(&[0.5, 0.5]);
    let sigma = diag_positive(&[1.0, 0.0]);
    let s = dmax_smooth(&rho, &sigma, SmoothingBall::trace(0.2).unwrap()).unwrap();
    assert_eq!(s.value, DivergenceValue::Infinite);
    // Radius covering the missing mass gives a finite value.
    let s = dmax_smooth(&rho, &sigma, SmoothingBall::trace(0.6).unwrap()).unwrap();
    assert!(s.value.is_finite());
}

#[test]
fn extended_real_ordering() {
    let a = DivergenceValue::Finite(1.0);
    assert!(a < DivergenceValue::Infinite);
    assert_eq!(a.slack_to(DivergenceValue::Infinite), f64::INFINITY);
    assert_eq!(DivergenceValue::Infinite.slack_to(a), f64::NEG_INFINITY);
    assert_eq!(a.offset(1.0), DivergenceValue::Finite(2.0));
    let v: Vec<_> = vec![DivergenceValue::Infinite, a];
    assert!(v[1] < v[0]);
}

#[test]
fn dmax_smooth_trace_ball_with_pure_states() {
    // Rank-one centers make the ball SDP degenerate at the optimum.
    let mut r = rng(12);
    for i in 0..40 {
        let d = 4 + i % 3;
        let rho = state(d, 1, &mut r);
        let sigma = positive(d, &mut r);
        let sd = dmax_smooth(&rho, &sigma, SmoothingBall::trace(0.1).unwrap()).unwrap();
        let w = sd.witness.unwrap();
        let lower = dmax_dual_witness(&rho, &sigma, SmoothingBall::trace(0.1).unwrap(), &w).unwrap();
        assert!((f(sd.value) - lower).abs() < 1e-5, "instance {i}");
    }
}

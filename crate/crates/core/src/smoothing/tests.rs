use super::*;
use crate::divergences::{classical, dh, renyi};
use crate::linalg::{operator_leq, purified_distance, Normalization, C64};
use crate::testutil::{diag_positive, diag_state, gaussian, positive, rng, state};
use crate::tol::DEFAULT_ETA;
use alloc::vec::Vec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_psd(d: usize, r: &mut ChaCha8Rng) -> HermitianOperator {
    let g = gaussian(d, d, r);
    HermitianOperator::new(g.matmul(&g.adjoint()).hermitian_part()).unwrap()
}

/// `M ⪰ 0` scaled to a random `tr Mσ ∈ (0.2, 1]`.
fn trace_witness(sigma: &PositiveOperator, r: &mut ChaCha8Rng) -> HermitianOperator {
    let m = random_psd(sigma.dim(), r);
    let target: f64 = r.random_range(0.2..=1.0);
    m.scale(target / m.inner(sigma.op()))
}

fn rank_one_projector(d: usize, r: &mut ChaCha8Rng) -> HermitianOperator {
    let v = gaussian(d, 1, r).column(0);
    let n = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    let v: Vec<C64> = v.iter().map(|z| z / n).collect();
    HermitianOperator::pure(&v)
}

#[test]
fn gentle_projection_examples() {
    let rho = diag_state(&[0.8, 0.2]);
    let (t, d) = gentle_projection(&rho, &HermitianOperator::zeros(2)).unwrap();
    assert_eq!(t.op(), rho.op());
    assert_eq!(d, 0.0);
    let (t, d) = gentle_projection(&rho, &HermitianOperator::from_real_diag(&[0.0, 1.0])).unwrap();
    assert!(t.op().sub(&HermitianOperator::from_real_diag(&[1.0, 0.0])).matrix().max_abs() < 1e-15);
    assert!((d - math::sqrt(0.2)).abs() < 1e-15);
}

#[test]
fn gentle_projection_fidelity_identity() {
    let mut r = rng(21);
    for d in [2, 3, 4] {
        for _ in 0..30 {
            let rho = state(d, d, &mut r);
            let p = rank_one_projector(d, &mut r);
            let (t, dist) = gentle_projection(&rho, &p).unwrap();
            let f = generalized_fidelity(&rho, &t).unwrap();
            assert!((f - (1.0 - p.inner(rho.op()))).abs() < 1e-10);
            assert!((purified_distance(&rho, &t).unwrap() - dist).abs() < 1e-9);
            assert!(t.is_normalized());
        }
    }
}

#[test]
fn gentle_projection_keeps_subnormalization() {
    let rho = QuantumState::new(HermitianOperator::from_real_diag(&[0.3, 0.3]), Normalization::Subnormalized).unwrap();
    let (t, dist) = gentle_projection(&rho, &HermitianOperator::from_real_diag(&[1.0, 0.0])).unwrap();
    assert!(!t.is_normalized());
    assert!((t.trace() - 0.3 / 0.7).abs() < 1e-15);
    let f = generalized_fidelity(&rho, &t).unwrap();
    assert!((f - 0.7).abs() < 1e-12);
    assert!((dist - math::sqrt(0.3)).abs() < 1e-15);
}

#[test]
fn gentle_projection_errors() {
    let rho = diag_state(&[1.0, 0.0]);
    assert!(matches!(
        gentle_projection(&rho, &HermitianOperator::from_real_diag(&[1.0, 0.0])),
        Err(Error::DegenerateProjection { .. })
    ));
    assert!(matches!(gentle_projection(&rho, &HermitianOperator::from_real_diag(&[0.5, 0.0])), Err(Error::Domain(_))));
}

#[test]
fn renyi_smoother_classical_example() {
    let rho = diag_state(&[0.5, 0.5]);
    let sigma = diag_positive(&[0.25, 0.75]);
    let m = HermitianOperator::from_real_diag(&[2.0, 0.0]);
    let c = renyi_smoother(&rho, &sigma, 0.5, 2.0, &m).unwrap();
    // Threshold 2^{D̃₂}·4 = 16/3 exceeds both ratios.
    assert!(c.projector.matrix().max_abs() < 1e-15);
    assert!(c.smoothed_state.op().sub(rho.op()).matrix().max_abs() < 1e-15);
    let bound = math::log2(4.0 / 3.0) + 2.0 + math::log2(4.0 / 3.0);
    assert!((c.claimed_bound.to_f64() - bound).abs() < 1e-14);
    assert!((c.witness_value - 0.0).abs() < 1e-15);
    c.verify(&rho, 1e-9).unwrap();
}

#[test]
fn renyi_smoother_removes_large_ratios() {
    // One outcome with a huge likelihood ratio and little mass.
    let rho = diag_state(&[0.005, 0.995]);
    let sigma = diag_positive(&[1e-9, 1.0]);
    let m = HermitianOperator::from_real_diag(&[1e9, 0.0]);
    let c = renyi_smoother(&rho, &sigma, 0.1, 2.0, &m).unwrap();
    assert!((c.projector.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
    assert!(c.witness_value == f64::NEG_INFINITY);
    c.verify(&rho, 1e-9).unwrap();
}

#[test]
fn renyi_smoother_random_certificates() {
    let mut r = rng(22);
    for i in 0..100 {
        let d = 2 + i % 3;
        let rho = state(d, 1 + i % d, &mut r);
        let sigma = positive(d, &mut r);
        let m = trace_witness(&sigma, &mut r);
        for (alpha, eps) in [(1.5, 0.1), (2.0, 0.3), (5.0, 0.3)] {
            let c = renyi_smoother(&rho, &sigma, eps, alpha, &m).unwrap();
            assert!(c.inequalities[0].lhs <= eps * eps);
            c.verify(&rho, 1e-9).unwrap();
            let d_alpha = renyi(&rho, &sigma, alpha).unwrap().to_f64();
            let bound = d_alpha + 2.0 * math::log2(1.0 / eps) / (alpha - 1.0) + math::log2(1.0 / (1.0 - eps * eps));
            assert!(math::log2(m.inner(c.smoothed_state.op())) <= bound + 1e-9);
        }
    }
}

#[test]
fn renyi_smoother_rejects_bad_inputs() {
    let rho = diag_state(&[0.5, 0.5]);
    let sigma = diag_positive(&[0.5, 0.5]);
    let m = HermitianOperator::identity(2);
    assert!(renyi_smoother(&rho, &sigma, 0.1, 2.0, &m.scale(3.0)).is_err());
    assert!(renyi_smoother(&rho, &sigma, 0.1, 0.9, &m).is_err());
    assert!(renyi_smoother(&rho, &sigma, 1.0, 2.0, &m).is_err());
    assert!(renyi_smoother(&rho, &diag_positive(&[1.0, 0.0]), 0.1, 2.0, &m.scale(0.5)).is_err());
}

#[test]
fn hypothesis_smoother_identical_states() {
    let mut r = rng(23);
    let rho = state(3, 3, &mut r);
    let sigma = rho.to_positive();
    let m = trace_witness(&sigma, &mut r);
    let c = hypothesis_smoother(&rho, &sigma, 0.3, &m, DEFAULT_ETA).unwrap();
    assert!(c.projector.matrix().max_abs() < 1e-12);
    assert!(c.smoothed_state.op().sub(rho.op()).matrix().max_abs() < 1e-12);
    c.verify(&rho, 1e-9).unwrap();
}

#[test]
fn hypothesis_smoother_classical_pair() {
    let (p, q) = ([0.5, 0.5], [0.25, 0.75]);
    let rho = diag_state(&p);
    let sigma = diag_positive(&q);
    let m = HermitianOperator::from_real_diag(&[1.0, 1.0]);
    let c = hypothesis_smoother(&rho, &sigma, 0.5, &m, DEFAULT_ETA).unwrap();
    // Neyman–Pearson by enumeration at type-I error 1/2.
    let brute = classical::dh_test(&p, &q, 0.5).unwrap().1.to_f64();
    assert!((brute - 2.0).abs() < 1e-15);
    let claimed = c.claimed_bound.to_f64();
    assert!(claimed <= brute + DEFAULT_ETA + 1.0 + 1e-12);
    assert!(c.witness_value <= claimed);
    c.verify(&rho, 1e-9).unwrap();
}

#[test]
fn hypothesis_smoother_random_certificates() {
    let mut r = rng(24);
    for i in 0..100 {
        let d = 2 + i % 3;
        let rho = state(d, 1 + i % d, &mut r);
        let sigma = positive(d, &mut r);
        let m = trace_witness(&sigma, &mut r);
        let eps = [0.1, 0.25, 0.5][i % 3];
        let c = hypothesis_smoother(&rho, &sigma, eps, &m, DEFAULT_ETA).unwrap();
        assert!(1.0 - c.inequalities[0].lhs > 1.0 - eps - 1e-9);
        c.verify(&rho, 1e-9).unwrap();
        let h = dh(&rho, &sigma, 1.0 - eps).unwrap().to_f64();
        let tr = m.inner(c.smoothed_state.op());
        assert!(tr <= math::exp2(h + DEFAULT_ETA) / (1.0 - eps) * (1.0 + 1e-9));
    }
}

#[test]
fn lower_bound_identical_states() {
    let rho = diag_state(&[0.6, 0.4]);
    let chk = verify_dmax_lower_bound(&rho, &rho.to_positive(), 0.25, 0.25).unwrap();
    // D_h^{1/2}(ρ‖ρ) = 1.
    assert!((chk.rhs.to_f64() - (1.0 - math::log2(64.0))).abs() < 1e-9);
    assert!(chk.holds(1e-6), "{chk:?}");
    assert!(verify_dmax_lower_bound(&rho, &rho.to_positive(), 0.5, 0.5).is_err());
}

#[test]
fn lower_bound_random() {
    let mut r = rng(25);
    for i in 0..8 {
        let d = 2 + i % 2;
        let rho = state(d, d, &mut r);
        let sigma = positive(d, &mut r);
        let chk = verify_dmax_lower_bound(&rho, &sigma, 0.25, 0.25).unwrap();
        assert!(chk.holds(1e-6), "{chk:?}");
        if let Some(defect) = chk.midpoint_defect {
            assert!(defect < 1e-5);
        }
    }
}

#[test]
fn marginal_domination() {
    let mut r = rng(26);
    for i in 0..100 {
        let (da, db) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
        let x = random_psd(da * db, &mut r);
        let p = rank_one_projector(da, &mut r);
        let left = p.kron(&HermitianOperator::identity(db)).sandwich(&x).partial_trace_a(da, db);
        assert!(operator_leq(&left, &x.partial_trace_a(da, db), 1e-10).unwrap());
    }
}

fn random_unit_witness(d: usize, r: &mut ChaCha8Rng) -> HermitianOperator {
    let e = random_psd(d, r).eig().unwrap();
    let vals: Vec<f64> = (0..d).map(|_| r.random_range(0.0..=1.0)).collect();
    HermitianOperator::from_real_diag(&vals).congruence(&e.vectors)
}

#[test]
fn joint_response_product_state() {
    let mut r = rng(27);
    let ra = state(2, 2, &mut r);
    let rb = state(3, 3, &mut r);
    let rho = QuantumState::new(ra.op().kron(rb.op()), Normalization::Normalized).unwrap();
    let one = |d| HermitianOperator::identity(d);
    let j = joint_smoother_response(&rho, &ra.to_positive(), &rb.to_positive(), 0.2, 0.2, &one(2), &one(3), DEFAULT_ETA)
        .unwrap();
    assert!(j.certificate.projector.matrix().max_abs() < 1e-12);
    assert!(j.certificate.smoothed_state.op().sub(rho.op()).matrix().max_abs() < 1e-12);
    assert!(j.certificate.witness_value <= -j.delta + 1e-9);
    j.certificate.verify(&rho, 1e-9).unwrap();
}

#[test]
fn joint_response_random() {
    let mut r = rng(28);
    for i in 0..40 {
        let (da, db) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
        let rho = state(da * db, 1 + i % (da * db), &mut r);
        let sa = positive(da, &mut r);
        let sb = positive(db, &mut r);
        let ma = random_unit_witness(da, &mut r);
        let mb = random_unit_witness(db, &mut r);
        let (e1, e2) = if i % 3 == 0 { (0.1, 0.3) } else { (0.2, 0.2) };
        let j = joint_smoother_response(&rho, &sa, &sb, e1, e2, &ma, &mb, DEFAULT_ETA).unwrap();
        j.certificate.verify(&rho, 1e-9).unwrap();
        assert!(j.certificate.distance <= math::sqrt(e1 + e2));
    }
}

#[test]
fn joint_response_matches_classical_truncation() {
    let mut r = rng(29);
    for _ in 0..20 {
        let joint = crate::testutil::probability(4, &mut r);
        let rho = diag_state(&joint);
        let qa = crate::testutil::probability(2, &mut r);
        let qb = crate::testutil::probability(2, &mut r);
        let (sa, sb) = (diag_positive(&qa), diag_positive(&qb));
        let (ma, mb) = (HermitianOperator::from_real_diag(&[0.3, 0.9]), HermitianOperator::from_real_diag(&[1.0, 0.2]));
        let j = joint_smoother_response(&rho, &sa, &sb, 0.2, 0.2, &ma, &mb, DEFAULT_ETA).unwrap();
        // Direct truncation over index sets.
        let pa = [joint[0] + joint[1], joint[2] + joint[3]];
        let pb = [joint[0] + joint[2], joint[1] + joint[3]];
        let keep = |p: &[f64; 2], q: &[f64], eps: f64| -> [bool; 2] {
            let k = classical::ds(p, q, 1.0 - eps).unwrap().to_f64();
            let s = math::exp2(k + DEFAULT_ETA);
            [p[0] <= s * q[0], p[1] <= s * q[1]]
        };
        let (ka, kb) = (keep(&pa, &qa, 0.2), keep(&pb, &qb, 0.2));
        let mut expect = [0.0; 4];
        for a in 0..2 {
            for b in 0..2 {
                if ka[a] && kb[b] {
                    expect[2 * a + b] = joint[2 * a + b];
                }
            }
        }
        let s: f64 = expect.iter().sum();
        let got = j.certificate.smoothed_state.op();
        for k in 0..4 {
            assert!((got.matrix()[(k, k)].re - expect[k] / s).abs() < 1e-12);
        }
    }
}

#[test]
fn joint_feasibility_product_state() {
    let mut r = rng(30);
    let sa = state(2, 2, &mut r);
    let sb = state(2, 2, &mut r);
    let rho = QuantumState::new(sa.op().kron(sb.op()), Normalization::Normalized).unwrap();
    let res = joint_smoother_feasibility(&rho, &sa.to_positive(), &sb.to_positive(), 0.2, 0.2, DEFAULT_ETA, JointMode::Theorem)
        .unwrap();
    assert!(res.checks.iter().all(|c| c.holds(FEASIBILITY_TOL)));
    assert!(res.delta > 0.0);
}

#[test]
fn joint_feasibility_random() {
    let mut r = rng(31);
    for i in 0..4 {
        let (da, db) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
        let rho = state(da * db, da * db, &mut r);
        let sa = positive(da, &mut r);
        let sb = positive(db, &mut r);
        let res = joint_smoother_feasibility(&rho, &sa, &sb, 0.1, 0.3, DEFAULT_ETA, JointMode::Theorem).unwrap();
        assert!(purified_distance(&rho, &res.smoothed_joint_state).unwrap() <= res.radius + FEASIBILITY_TOL);
        let la = res.lambda_a.to_f64();
        assert!(operator_leq(res.marginal_a.op(), &sa.op().scale(math::exp2(la)), FEASIBILITY_TOL).unwrap());
        let res = joint_smoother_feasibility(&rho, &sa, &sb, 0.2, 0.2, DEFAULT_ETA, JointMode::Corollary { delta: 0.1 })
            .unwrap();
        assert!((res.radius - math::sqrt(0.6)).abs() < 1e-15);
        assert!(res.checks.iter().all(|c| c.holds(FEASIBILITY_TOL)));
    }
}

#[test]
fn joint_rejects_bad_parameters() {
    let rho = QuantumState::maximally_mixed(4);
    let s = diag_positive(&[0.5, 0.5]);
    assert!(joint_smoother_feasibility(&rho, &s, &s, 0.5, 0.5, DEFAULT_ETA, JointMode::Theorem).is_err());
    assert!(joint_smoother_feasibility(&rho, &s, &s, 0.3, 0.3, DEFAULT_ETA, JointMode::Corollary { delta: 0.2 }).is_err());
    let m = HermitianOperator::identity(2).scale(2.0);
    assert!(joint_smoother_response(&rho, &s, &s, 0.2, 0.2, &m, &m, DEFAULT_ETA).is_err());
}

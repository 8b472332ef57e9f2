//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::{Duration, Instant};

use oneshot::channel::Channel;
use oneshot::instance::{derive_seed, gen_positive, gen_state, haar_unitary, rng, Dims, InstanceKind, InstanceSpec};
use oneshot::verify::{self, Check};
use oneshot_core::divergences::{classical, dh, dh_sdp, dmax, dmax_dual_witness, dmax_smooth, ds, renyi, rel_entropy, SmoothingBall};
use oneshot_core::linalg::purified_distance;
use oneshot_core::sdp::SdpSettings;
use oneshot_core::smoothing::{admissible_witness, gentle_projection};
use oneshot_core::{HermitianOperator, PositiveOperator, QuantumState};
use rand::Rng;
use rayon::prelude::*;

/// Slack below which an inequality counts as violated (bits).
const SLACK_TOL: f64 = 1e-6;
const GENTLE_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-8;
const DH_SDP_TOL: f64 = 1e-6;
const IID_GAP: f64 = 0.15;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// A random state of dimension `d` from criterion-specific seeds.
fn state(d: usize, criterion: u64, i: u64) -> QuantumState {
    let mut r = rng(derive_seed(criterion, &[i]));
    let kinds = [InstanceKind::Ginibre, InstanceKind::HaarMixed, InstanceKind::ClassicalDiagonal, InstanceKind::NearDegenerate];
    let kind = kinds[r.random_range(0..kinds.len())];
    let rank = r.random_range(1..=d);
    gen_state(&InstanceSpec::new(Dims::Single(d), rank, r.random(), kind)).unwrap()
}

fn positive(d: usize, criterion: u64, i: u64) -> PositiveOperator {
    gen_positive(d, derive_seed(criterion, &[i, 1])).unwrap()
}

fn dim_of(i: u64) -> usize {
    [2, 3, 4, 5, 6][i as usize % 5]
}

/// Worst slack over all instances, and the number of instances that failed
/// (a slack below `−SLACK_TOL` or an error).
fn sweep(n: u64, f: impl Fn(u64) -> oneshot::Result<Vec<Check>> + Sync) -> (f64, usize, Vec<String>) {
    let results: Vec<_> = (0..n).into_par_iter().map(|i| (i, f(i))).collect();
    let (mut worst, mut bad, mut notes) = (f64::INFINITY, 0, Vec::new());
    for (i, r) in results {
        match r {
            Ok(cs) => {
                let w = cs.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
                if w < -SLACK_TOL || w.is_nan() {
                    bad += 1;
                    let c = cs.iter().find(|c| c.slack == w || c.slack.is_nan()).unwrap();
                    notes.push(format!("instance {i}: {} slack {w:.3e}", c.name));
                }
                worst = worst.min(w);
            }
            Err(e) => {
                bad += 1;
                notes.push(format!("instance {i}: {e}"));
            }
        }
    }
    (worst, bad, notes)
}

fn summarize(total: u64, (worst, bad, notes): (f64, usize, Vec<String>)) -> Outcome {
    let mut detail = format!("{total} instances, {bad} violations, worst slack {worst:.3e}");
    if let Some(n) = notes.first() {
        detail += &format!("; first: {n}");
    }
    outcome(bad == 0, detail)
}

fn c1_spectrum_sandwich() -> Outcome {
    let mut total = 0;
    let mut acc = (f64::INFINITY, 0, Vec::new());
    for d in [2usize, 3, 4, 6] {
        for (k, (eps, delta)) in [(0.1, 0.1), (0.3, 0.2)].into_iter().enumerate() {
            let tag = 100 + 10 * d as u64 + k as u64;
            let r = sweep(200, |i| verify::verify_eq9(&state(d, tag, i), &positive(d, tag, i), eps, delta));
            total += 200;
            acc.0 = f64::min(acc.0, r.0);
            acc.1 += r.1;
            acc.2.extend(r.2);
        }
    }
    summarize(total, acc)
}

fn c2_gentle_projection() -> Outcome {
    let errors: Vec<Result<f64, String>> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let d = dim_of(i);
            let rho = state(d, 2, i);
            let mut r = rng(derive_seed(2, &[i, 2]));
            let u = haar_unitary(d, &mut r);
            let rank = r.random_range(1..d);
            let cols: Vec<usize> = (0..rank).collect();
            let p = HermitianOperator::identity(rank).congruence(&u.select_columns(&cols));
            let (tilde, dist) = gentle_projection(&rho, &p).map_err(|e| e.to_string())?;
            let removed = p.inner(rho.op());
            let pd = purified_distance(&rho, &tilde).map_err(|e| e.to_string())?;
            Ok((pd - removed.max(0.0).sqrt()).abs().max((dist - removed.max(0.0).sqrt()).abs()))
        })
        .collect();
    let worst = errors.iter().filter_map(|e| e.as_ref().ok()).fold(0.0f64, |a, &b| a.max(b));
    let failed = errors.iter().filter(|e| e.as_ref().map_or(true, |&x| x > GENTLE_TOL)).count();
    let first_err = errors.iter().find_map(|e| e.as_ref().err().cloned());
    let mut detail = format!("500 pairs, max |P(ρ,ρ̃) − √tr Pρ| = {worst:.3e}, {failed} over {GENTLE_TOL:e}");
    if let Some(e) = first_err {
        detail += &format!("; first error: {e}");
    }
    outcome(failed == 0, detail)
}

fn c3_minimax() -> Outcome {
    let bound = 2.0 * SdpSettings::default().gap_tol + 1e-6;
    let mut total = 0;
    let mut acc = (f64::INFINITY, 0, Vec::new());
    for (k, eps) in [0.1, 0.3].into_iter().enumerate() {
        let r = sweep(50, |i| {
            let tag = 300 + k as u64;
            let d = dim_of(i);
            let (rho, sigma) = (state(d, tag, i), positive(d, tag, i));
            let ball = SmoothingBall::purified(eps)?;
            let sd = dmax_smooth(&rho, &sigma, ball)?;
            let Some(w) = sd.witness.as_ref() else { return Ok(vec![]) };
            let m = admissible_witness(w, &sigma)?;
            let dual = dmax_dual_witness(&rho, &sigma, ball, &m)?;
            // Shifted so that the sweep's −SLACK_TOL threshold means "deviation > bound".
            Ok(vec![Check::new("|primal − dual witness|", bound - (sd.value.to_f64() - dual).abs() - SLACK_TOL)])
        });
        total += 50;
        acc.0 = f64::min(acc.0, r.0 + SLACK_TOL);
        acc.1 += r.1;
        acc.2.extend(r.2);
    }
    let mut o = summarize(total, acc);
    o.detail = format!("tolerance {bound:.1e} bits, slack is tolerance minus deviation; {}", o.detail);
    o
}

fn c4_renyi_bound() -> Outcome {
    let mut total = 0;
    let mut acc = (f64::INFINITY, 0, Vec::new());
    for (ka, alpha) in [1.5, 2.0, 5.0].into_iter().enumerate() {
        for (ke, eps) in [0.1, 0.3].into_iter().enumerate() {
            let tag = 400 + 10 * ka as u64 + ke as u64;
            let r = sweep(100, |i| {
                let d = dim_of(i);
                let cs = verify::verify_theorem1(&state(d, tag, i), &positive(d, tag, i), eps, alpha, SLACK_TOL)?;
                let trace_ball = cs.iter().any(|c| c.name.starts_with("trace:"));
                let certs = cs.iter().filter(|c| c.name.ends_with(": certificate")).count();
                let mut cs = cs;
                cs.push(Check::new("both balls with certificates", if trace_ball && certs == 2 { 0.0 } else { -1.0 }));
                Ok(cs)
            });
            total += 100;
            acc.0 = f64::min(acc.0, r.0);
            acc.1 += r.1;
            acc.2.extend(r.2);
        }
    }
    summarize(total, acc)
}

fn c5_hypothesis_sandwich() -> Outcome {
    summarize(
        100,
        sweep(100, |i| {
            let d = dim_of(i);
            let mut cs = verify::verify_theorem2(&state(d, 5, i), &positive(d, 5, i), 0.25, 0.25, SLACK_TOL)?;
            let rechecked = cs.iter().any(|c| c.name == "upper: independent recheck");
            cs.push(Check::new("certificate rechecked", if rechecked { 0.0 } else { -1.0 }));
            Ok(cs)
        }),
    )
}

fn c6_joint() -> Outcome {
    let mut total = 0;
    let mut acc = (f64::INFINITY, 0, Vec::new());
    for (kd, (da, db)) in [(2usize, 2usize), (2, 3)].into_iter().enumerate() {
        for (kp, (e1, e2)) in [(0.2, 0.2), (0.1, 0.3)].into_iter().enumerate() {
            for corollary in [false, true] {
                let tag = 600 + 100 * kd as u64 + 10 * kp as u64 + corollary as u64;
                let r = sweep(50, |i| {
                    let mut r = rng(derive_seed(tag, &[i]));
                    let kinds = [InstanceKind::Ginibre, InstanceKind::HaarMixed, InstanceKind::PureBipartite];
                    let kind = kinds[r.random_range(0..3)];
                    let rank = if kind == InstanceKind::PureBipartite { 1 } else { r.random_range(1..=da * db) };
                    let rho = gen_state(&InstanceSpec::new(Dims::Bipartite(da, db), rank, r.random(), kind))?;
                    let (sa, sb) = (gen_positive(da, r.random())?, gen_positive(db, r.random())?);
                    if corollary {
                        verify::verify_corollary(&rho, &sa, &sb, e1, e2, 0.1)
                    } else {
                        verify::verify_theorem3(&rho, &sa, &sb, e1, e2)
                    }
                });
                total += 50;
                acc.0 = f64::min(acc.0, r.0);
                acc.1 += r.1;
                acc.2.extend(r.2);
            }
        }
    }
    summarize(total, acc)
}

fn c7_data_processing() -> Outcome {
    summarize(
        100,
        sweep(100, |i| {
            let d = dim_of(i);
            let ch = if i % 2 == 0 {
                Channel::random_stinespring(d, 1 + (i as usize / 2) % 3, derive_seed(7, &[i, 3]))?
            } else {
                Channel::random_pinching(d, derive_seed(7, &[i, 3]))?
            };
            verify::verify_data_processing(&state(d, 7, i), &positive(d, 7, i), &ch, 0.2, 2.0)
        }),
    )
}

fn probability<R: Rng>(d: usize, zeros: bool, r: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..d).map(|_| r.random_range(0.01..1.0)).collect();
    if zeros && d > 1 {
        let k = r.random_range(0..d);
        v[k] = 0.0;
    }
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

fn c8_classical_oracles() -> Outcome {
    let results: Vec<Result<f64, String>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let d = dim_of(i);
            let mut r = rng(derive_seed(8, &[i]));
            let p = probability(d, i % 4 == 1, &mut r);
            let q = probability(d, false, &mut r);
            let scale = r.random_range(0.5..2.0);
            let q: Vec<f64> = q.iter().map(|x| x * scale).collect();
            let rho = QuantumState::normalized_from(&HermitianOperator::from_real_diag(&p)).map_err(|e| e.to_string())?;
            let sigma = PositiveOperator::new(HermitianOperator::from_real_diag(&q)).map_err(|e| e.to_string())?;
            let eps = r.random_range(0.05..0.6);
            let alpha = [1.5, 2.0, 5.0][i as usize % 3];
            let err = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() };
            let e = |x: oneshot_core::Result<oneshot_core::DivergenceValue>| x.map(|v| v.to_f64()).map_err(|e| e.to_string());
            let diffs = [
                err(e(dh(&rho, &sigma, eps))?, oneshot_oracles::dh_vertex_enumeration(&p, &q, eps)),
                err(ds(&rho, &sigma, eps).map_err(|e| e.to_string())?.to_f64(), oneshot_oracles::ds_quantile(&p, &q, eps)),
                err(e(dmax(&rho, &sigma))?, oneshot_oracles::dmax_ratio(&p, &q)),
                err(e(renyi(&rho, &sigma, alpha))?, oneshot_oracles::renyi_power_sum(&p, &q, alpha)),
                err(e(rel_entropy(&rho, &sigma))?, oneshot_oracles::relative_entropy(&p, &q)),
                err(e(classical::dh(&p, &q, eps))?, oneshot_oracles::dh_vertex_enumeration(&p, &q, eps)),
                err(e(classical::ds(&p, &q, eps))?, oneshot_oracles::ds_quantile(&p, &q, eps)),
            ];
            Ok(diffs.into_iter().fold(0.0, f64::max))
        })
        .collect();
    let worst = results.iter().filter_map(|r| r.as_ref().ok()).fold(0.0f64, |a, &b| a.max(b));
    let failed = results.iter().filter(|r| r.as_ref().map_or(true, |&x| !(x <= ORACLE_TOL))).count();
    outcome(failed == 0, format!("100 commuting instances, max deviation {worst:.3e} bits, {failed} over {ORACLE_TOL:e}"))
}

fn c9_iid() -> Outcome {
    let (a, b): (f64, f64) = (0.5, 0.25);
    let kl = a * (a / b).log2() + (1.0 - a) * ((1.0 - a) / (1.0 - b)).log2();
    let mut gaps = Vec::new();
    for n in 1..=20usize {
        let pn = oneshot_oracles::binomial(n, a);
        let qn = oneshot_oracles::binomial(n, b);
        match classical::dh(&pn, &qn, 0.3) {
            Ok(v) => gaps.push((v.to_f64() / n as f64 - kl).abs()),
            Err(e) => return outcome(false, format!("n = {n}: {e}")),
        }
    }
    let avg: Vec<f64> = gaps.windows(5).map(|w| w.iter().sum::<f64>() / 5.0).collect();
    let monotone = avg.windows(2).all(|w| w[1] < w[0]);
    let last = gaps[19];
    outcome(
        last <= IID_GAP && monotone,
        format!("gap at n = 20: {last:.4} bits (≤ {IID_GAP}), 5-point moving average decreasing: {monotone}"),
    )
}

fn c10_dh_sdp() -> Outcome {
    let results: Vec<Result<f64, String>> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let d = dim_of(i);
            let (rho, sigma) = (state(d, 10, i), positive(d, 10, i));
            let eps = [0.05, 0.1, 0.25, 0.4, 0.6][i as usize % 5];
            let a = dh(&rho, &sigma, eps).map_err(|e| e.to_string())?;
            let (b, _) = dh_sdp(&rho, &sigma, eps).map_err(|e| e.to_string())?;
            Ok(if a == b { 0.0 } else { (a.to_f64() - b.to_f64()).abs() })
        })
        .collect();
    let worst = results.iter().filter_map(|r| r.as_ref().ok()).fold(0.0f64, |a, &b| a.max(b));
    let failed = results.iter().filter(|r| r.as_ref().map_or(true, |&x| !(x <= DH_SDP_TOL))).count();
    let first_err = results.iter().find_map(|r| r.as_ref().err().cloned()).map(|e| format!("; first error: {e}")).unwrap_or_default();
    outcome(failed == 0, format!("50 instances, max |bisection − SDP| = {worst:.3e} bits, {failed} over {DH_SDP_TOL:e}{first_err}"))
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 10] = [
        (1, "information-spectrum sandwich", 60, c1_spectrum_sandwich),
        (2, "gentle projection distance identity", 5, c2_gentle_projection),
        (3, "smooth max-divergence minimax equality", 120, c3_minimax),
        (4, "Rényi upper bound on the smooth max-divergence", 300, c4_renyi_bound),
        (5, "hypothesis-testing sandwich", 180, c5_hypothesis_sandwich),
        (6, "joint smoothing", 300, c6_joint),
        (7, "data processing", 120, c7_data_processing),
        (8, "classical oracle equivalence", 60, c8_classical_oracles),
        (9, "classical i.i.d. trend", 5, c9_iid),
        (10, "hypothesis testing: bisection vs SDP", 60, c10_dh_sdp),
    ];
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let ok = o.ok && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {n:>2} ({name}): {} [{:.1} s of {budget} s]",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

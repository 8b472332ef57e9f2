//! Brute-force scalar reference implementations of the classical divergences.
//!
//! Everything here is written for clarity, not speed, and shares no code with
//! `oneshot-core`. Inputs are probability vectors (or nonnegative weights) of
//! equal length; all logarithms are base 2.

/// `min Σ t_i q_i` over tests `0 ≤ t ≤ 1` with `Σ t_i p_i ≥ 1 − ε`, by
/// enumerating the vertices of the feasible polytope: every vertex is a
/// 0/1 vector with at most one fractional coordinate. Returns `−log₂` of the
/// minimum, `+∞` if it is zero. Cost `O(2^n · n²)`.
pub fn dh_vertex_enumeration(p: &[f64], q: &[f64], eps: f64) -> f64 {
    assert_eq!(p.len(), q.len());
    let n = p.len();
    assert!(n <= 20, "vertex enumeration is exponential");
    let target = 1.0 - eps;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        let inside = |i: usize| mask & (1 << i) != 0;
        let mass: f64 = (0..n).filter(|&i| inside(i)).map(|i| p[i]).sum();
        let cost: f64 = (0..n).filter(|&i| inside(i)).map(|i| q[i]).sum();
        if mass >= target {
            best = best.min(cost);
            continue;
        }
        for j in (0..n).filter(|&j| !inside(j) && p[j] > 0.0) {
            let t = (target - mass) / p[j];
            if t <= 1.0 {
                best = best.min(cost + t * q[j]);
            }
        }
    }
    if best > 0.0 {
        -best.log2()
    } else {
        f64::INFINITY
    }
}

/// `sup{λ : Σ_{i : 2^λ q_i > p_i} p_i ≤ ε}` by evaluating the distribution
/// function of the log-likelihood ratio directly at every atom. Returns
/// `+∞` when no atom makes it exceed `ε`.
pub fn ds_quantile(p: &[f64], q: &[f64], eps: f64) -> f64 {
    assert_eq!(p.len(), q.len());
    let f = |lam: f64| -> f64 {
        let s = lam.exp2();
        p.iter().zip(q).filter(|(&pi, &qi)| s * qi > pi).map(|(pi, _)| pi).sum()
    };
    // The supremum is attained at an atom log₂(p_i/q_i) or is +∞. f is
    // left-continuous, so f(a) is read just below a, where rounding in
    // 2^a q_i cannot flip the comparison.
    let atoms: Vec<f64> = p
        .iter()
        .zip(q)
        .filter(|(&pi, &qi)| pi > 0.0 && qi > 0.0)
        .map(|(pi, qi)| (pi / qi).log2())
        .collect();
    if atoms.iter().all(|&a| f(a + 1e-9 * (1.0 + a.abs())) <= eps) {
        return f64::INFINITY;
    }
    atoms
        .iter()
        .copied()
        .filter(|&a| f(a - 1e-9 * (1.0 + a.abs())) <= eps && f(a + 1e-9 * (1.0 + a.abs())) > eps)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `log₂ max_{p_i > 0} p_i / q_i`.
pub fn dmax_ratio(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    let mut best = f64::NEG_INFINITY;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi == 0.0 {
                return f64::INFINITY;
            }
            best = best.max((pi / qi).log2());
        }
    }
    best
}

/// `(1/(α−1)) log₂ Σ p_i^α q_i^{1−α}` for normalized `p`.
pub fn renyi_power_sum(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    assert_eq!(p.len(), q.len());
    let mut s = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            if alpha > 1.0 {
                return f64::INFINITY;
            }
            continue;
        }
        s += pi.powf(alpha) * qi.powf(1.0 - alpha);
    }
    s.log2() / (alpha - 1.0)
}

/// `Σ p_i log₂(p_i/q_i)` for normalized `p`.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    let mut s = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return f64::INFINITY;
        }
        s += pi * (pi / qi).log2();
    }
    s
}

/// Binomial weights `C(n, k) a^k (1 − a)^{n−k}` for `k = 0..=n`.
pub fn binomial(n: usize, a: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            c = c * (n + 1 - k) as f64 / k as f64;
        }
        out.push(c * a.powi(k as i32) * (1.0 - a).powi((n - k) as i32));
    }
    out
}

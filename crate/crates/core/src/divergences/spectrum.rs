use alloc::vec::Vec;

use super::{check_dims, check_eps, require_normalized, Support};
use crate::linalg::{eig, mp_power_from, CMatrix, HermitianOperator, PositiveOperator, QuantumState};
use crate::math;
use crate::tol::{RANK_TOL, SPECTRUM_CAP};
use crate::Result;

const SAMPLES: usize = 32;
const REFINE: usize = 60;
const MERGE_TOL: f64 = 1e-12;

/// Result of the information-spectrum scan over `[−cap, cap]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumValue {
    pub value: f64,
    /// The supremum reached the upper end of the scan range.
    pub capped_above: bool,
    /// No point of the scan range was feasible.
    pub capped_below: bool,
}

impl SpectrumValue {
    /// Treats a value capped from above as `+∞`.
    pub fn to_f64(self) -> f64 {
        if self.capped_above {
            f64::INFINITY
        } else {
            self.value
        }
    }
}

/// `D_s^ε(ρ‖σ) = sup{λ : tr ρ{2^λσ − ρ}_+ ≤ ε}`, with `f(λ) = tr ρ{2^λσ − ρ}_+`
/// taken left-continuous.
///
/// `2^λσ − ρ` grows in the Löwner order, so the number of its positive
/// eigenvalues steps up at finitely many breakpoints. Between two breakpoints
/// the positive eigenspace has fixed dimension but may rotate, so `f` is
/// scanned on every interval from the top and refined by bisection.
pub fn ds(rho: &QuantumState, sigma: &PositiveOperator, eps: f64) -> Result<SpectrumValue> {
    check_dims(rho, sigma)?;
    check_eps(eps, true)?;
    require_normalized(rho)?;
    let r = rho.op();
    let s = sigma.op();
    let sup = Support::of(s)?;

    let mu = inertia_ratios(r, &sup)?;
    let mut points: Vec<f64> = mu.iter().filter(|&&m| m > 0.0).map(|&m| math::log2(m)).collect();
    points.retain(|&b| b > -SPECTRUM_CAP && b < SPECTRUM_CAP);
    points.push(-SPECTRUM_CAP);
    points.push(SPECTRUM_CAP);
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL * (1.0 + b.abs()));

    let x_at = |lam: f64| r.scale(-1.0).add(&s.scale(math::exp2(lam)));
    // f on an interval where the positive eigenspace has dimension k.
    let f_k = |lam: f64, k: usize| -> Result<f64> {
        if k == 0 {
            return Ok(0.0);
        }
        let e = eig(&x_at(lam))?;
        let n = e.dim();
        let top: Vec<usize> = (n - k..n).collect();
        Ok(r.diagonal_in(&e.vectors.select_columns(&top)).iter().sum())
    };
    let positive_count = |lam: f64| -> usize {
        let t = math::exp2(lam);
        mu.iter().filter(|&&m| m < t).count()
    };

    // The upper end itself.
    let top = SPECTRUM_CAP;
    let k_top = positive_count(top);
    if f_k(top, k_top)? <= eps {
        return Ok(SpectrumValue { value: top, capped_above: true, capped_below: false });
    }
    for w in points.windows(2).rev() {
        let (a, b) = (w[0], w[1]);
        let k = positive_count(0.5 * (a + b));
        if f_k(b, k)? <= eps {
            return Ok(SpectrumValue { value: b, capped_above: false, capped_below: false });
        }
        // Interior crossings: largest feasible sample, then bisection.
        let mut upper = b;
        for j in (1..SAMPLES).rev() {
            let x = a + (b - a) * j as f64 / SAMPLES as f64;
            if f_k(x, k)? <= eps {
                let mut lo = x;
                let mut hi = upper;
                for _ in 0..REFINE {
                    let mid = 0.5 * (lo + hi);
                    if f_k(mid, k)? <= eps {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(SpectrumValue { value: lo, capped_above: false, capped_below: false });
            }
            upper = x;
        }
    }
    Ok(SpectrumValue { value: -SPECTRUM_CAP, capped_above: false, capped_below: true })
}

/// Eigenvalues `μ` on `T = supp σ` of `σ_T^{-1/2} ρ̂ σ_T^{-1/2}`, where
/// `ρ̂ = ρ_TT − ρ_TN ρ_NN^+ ρ_NT` is the Schur complement of the part of `ρ`
/// outside `T` (just `ρ_TT` when `supp ρ ⊆ supp σ`). By congruence the
/// number of positive eigenvalues of `2^λσ − ρ` is `#{μ < 2^λ}`. Values
/// below the rank cutoff are returned as zero.
fn inertia_ratios(r: &HermitianOperator, sup: &Support) -> Result<Vec<f64>> {
    let cut = RANK_TOL * sup.eig.max_value().max(0.0);
    let t = &sup.basis;
    if t.cols() == 0 {
        return Ok(Vec::new());
    }
    let w = sup.eig.basis_where(|l| l <= cut);
    let mut hat = r.congruence(&t.adjoint());
    if w.cols() > 0 {
        let r_ww = r.congruence(&w.adjoint());
        let r_tw = t.adjoint().matmul(r.matrix()).matmul(&w);
        let pinv = mp_power_from(&eig(&r_ww)?, -1.0)?;
        let correction = HermitianOperator::new(pinv.matrix().congruence(&r_tw))?;
        hat = hat.sub(&correction);
    }
    let inv_sqrt: Vec<f64> = sup.eig.values.iter().filter(|&&l| l > cut).map(|&l| 1.0 / math::sqrt(l)).collect();
    let scaled = hat.congruence(&CMatrix::from_real_diag(&inv_sqrt));
    let e = eig(&scaled)?;
    let mu_cut = RANK_TOL * e.max_value().max(0.0);
    Ok(e.values.iter().map(|&m| if m > mu_cut { m } else { 0.0 }).collect())
}

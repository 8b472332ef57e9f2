use alloc::format;
use alloc::vec::Vec;

use super::matrix::{CMatrix, C64};
use super::operators::HermitianOperator;
use crate::math;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue modulus, i.e. `‖A‖_∞`.
    pub fn spectral_norm(&self) -> f64 {
        self.max_value().abs().max(self.min_value().abs())
    }

    /// `Σᵢ f(λᵢ) |vᵢ⟩⟨vᵢ|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        HermitianOperator::from_hermitian_unchecked(out.hermitian_part())
    }

    /// Projector onto the span of the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector_where(&self, keep: impl Fn(f64) -> bool) -> HermitianOperator {
        self.map(|l| if keep(l) { 1.0 } else { 0.0 })
    }

    /// Columns of the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn basis_where(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let idx: Vec<usize> = (0..self.dim()).filter(|&k| keep(self.values[k])).collect();
        self.vectors.select_columns(&idx)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map(|l| l)
    }
}

/// Singular values of a square or tall matrix, in descending order, by
/// one-sided Jacobi rotations. Small singular values are computed to high
/// relative accuracy.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let norm2 = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let tol = m.max(1) as f64 * f64::EPSILON;
    // Columns below this squared norm are roundoff and left alone.
    let negligible = {
        let f: f64 = cols.iter().map(|c| norm2(c)).sum();
        f * (tol * tol)
    };
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        converged = true;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = norm2(&cols[i]);
                let beta = norm2(&cols[j]);
                let gamma: C64 = (0..m).map(|k| cols[i][k].conj() * cols[j][k]).sum();
                let g = gamma.norm();
                if g <= tol * math::sqrt(alpha * beta) || alpha.min(beta) <= negligible {
                    continue;
                }
                converged = false;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + math::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                for k in 0..m {
                    let x = cols[i][k];
                    let y = cols[j][k] * phase.conj();
                    cols[i][k] = x * c - y * s;
                    cols[j][k] = x * s + y * c;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!("one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps")));
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| math::sqrt(norm2(c))).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Eigendecomposition of a Hermitian matrix by the cyclic complex Jacobi method.
pub fn eig(a: &HermitianOperator) -> Result<EigenDecomposition> {
    jacobi(a.matrix())
}

pub(crate) fn jacobi(a: &CMatrix) -> Result<EigenDecomposition> {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    let fro = m.frobenius_norm();
    if fro == 0.0 || n == 1 {
        return Ok(finish(m, v));
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if math::sqrt(off) <= 1e-16 * fro {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!("Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (n = {n})")));
    }
    Ok(finish(m, v))
}

fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let abs = apq.norm();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if abs == 0.0 {
        return;
    }
    if abs < 1e-3 * f64::EPSILON * (app.abs() + aqq.abs()) {
        m[(p, q)] = C64::new(0.0, 0.0);
        m[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    // Phase e^{iφ} = a_pq/|a_pq| makes the pivot real; then a real rotation.
    let phase = apq / abs;
    let theta = (aqq - app) / (2.0 * abs);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0))
    } else {
        0.0
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / math::sqrt(t * t + 1.0);
    let s = t * c;
    let ph_conj = phase.conj();

    // A <- A J with J_pp = c, J_pq = s, J_qp = -s e^{-iφ}, J_qq = c e^{-iφ}.
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c - akq * ph_conj * s;
        m[(k, q)] = akp * s + akq * ph_conj * c;
    }
    // A <- J† A.
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c - aqk * phase * s;
        m[(q, k)] = apk * s + aqk * phase * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(app - t * abs, 0.0);
    m[(q, q)] = C64::new(aqq + t * abs, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ph_conj * s;
        v[(k, q)] = vkp * s + vkq * ph_conj * c;
    }
}

fn finish(m: CMatrix, v: CMatrix) -> EigenDecomposition {
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = v.select_columns(&order);
    EigenDecomposition { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn herm(n: usize, f: impl Fn(usize, usize) -> C64) -> HermitianOperator {
        HermitianOperator::new(CMatrix::from_fn(n, n, f).hermitian_part()).unwrap()
    }

    #[test]
    fn diagonal_input_sorted() {
        let a = HermitianOperator::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = eig(&a).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        // Eigenvectors are permuted standard basis vectors.
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(2, 1)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 2)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = eig(&HermitianOperator::identity(4)).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);
    }

    #[test]
    fn complex_5x5_reconstructs() {
        // Deterministic pseudo-random entries.
        let a = herm(5, |i, j| {
            let x = ((i * 7 + j * 13) % 11) as f64 / 11.0 - 0.5;
            let y = ((i * 5 + j * 3) % 7) as f64 / 7.0 - 0.5;
            C64::new(x, if i == j { 0.0 } else { y * if i < j { 1.0 } else { -1.0 } })
        });
        let e = eig(&a).unwrap();
        let r = e.reconstruct();
        let resid = (r.matrix() - a.matrix()).max_abs();
        assert!(resid <= 1e-12 * a.matrix().max_abs().max(1.0), "residual {resid}");
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        assert!((&gram - &CMatrix::identity(5)).max_abs() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let y = herm(2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => C64::new(0.0, 0.0),
        });
        let e = eig(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_values_match_eigenvalues_of_gram() {
        let mut r = crate::testutil::rng(12);
        for n in 1..6 {
            let a = crate::testutil::gaussian(n, n, &mut r);
            let sv = singular_values(&a).unwrap();
            let gram = HermitianOperator::new(a.adjoint().matmul(&a).hermitian_part()).unwrap();
            let mut ev: Vec<f64> = eig(&gram).unwrap().values.iter().map(|l| math::sqrt(l.max(0.0))).collect();
            ev.reverse();
            for (x, y) in sv.iter().zip(&ev) {
                assert!((x - y).abs() < 1e-10 * (1.0 + y));
            }
        }
    }

    #[test]
    fn singular_values_resolve_tiny_values() {
        let mut r = crate::testutil::rng(13);
        let u = crate::testutil::unitary(3, &mut r);
        let v = crate::testutil::unitary(3, &mut r);
        let a = u.matmul(&CMatrix::from_real_diag(&[1.0, 1e-6, 1e-13])).matmul(&v);
        let sv = singular_values(&a).unwrap();
        assert!((sv[1] - 1e-6).abs() < 1e-15);
        assert!(sv[2] < 1e-12);
    }

    #[test]
    fn singular_values_of_rank_one_with_a_zero_row() {
        let a = CMatrix::from_row_major(
            2,
            2,
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(6.954e-7, -9.938e-7), C64::new(0.7504, 0.4323)],
        );
        let sv = singular_values(&a).unwrap();
        let norm = a.frobenius_norm();
        assert!((sv[0] - norm).abs() < 1e-15 && sv[1] < 1e-15);
    }
}

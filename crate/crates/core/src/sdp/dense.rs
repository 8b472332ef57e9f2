// Small dense real kernels for the interior-point solver.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Square row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct DMat {
    pub n: usize,
    pub d: Vec<f64>,
}

impl DMat {
    pub fn zeros(n: usize) -> Self {
        DMat { n, d: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.d[i * n + i] = s;
        }
        m
    }

    #[cfg(test)]
    pub fn diag(v: &[f64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.d[i * n + i] = v[i];
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.d[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        self.d[i * self.n + j] += v;
    }

    pub fn dot(&self, o: &DMat) -> f64 {
        self.d.iter().zip(&o.d).map(|(a, b)| a * b).sum()
    }

    pub fn fro_sq(&self) -> f64 {
        self.d.iter().map(|a| a * a).sum()
    }

    pub fn axpy(&mut self, s: f64, o: &DMat) {
        for (a, b) in self.d.iter_mut().zip(&o.d) {
            *a += s * b;
        }
    }

    pub fn scaled(&self, s: f64) -> DMat {
        DMat { n: self.n, d: self.d.iter().map(|a| a * s).collect() }
    }

    pub fn sub(&self, o: &DMat) -> DMat {
        DMat { n: self.n, d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect() }
    }

    pub fn transpose(&self) -> DMat {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.d[j * n + i] = self.d[i * n + j];
            }
        }
        t
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (self.d[i * n + j] + self.d[j * n + i]);
                self.d[i * n + j] = v;
                self.d[j * n + i] = v;
            }
        }
    }

    pub fn matmul(&self, o: &DMat) -> DMat {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.d[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let orow = &o.d[k * n..(k + 1) * n];
                let out_row = &mut out.d[i * n..(i + 1) * n];
                for (x, b) in out_row.iter_mut().zip(orow) {
                    *x += a * b;
                }
            }
        }
        out
    }

    /// `A B Aᵀ`.
    pub fn congruence(&self, b: &DMat) -> DMat {
        let mut m = self.matmul(b).matmul(&self.transpose());
        m.symmetrize();
        m
    }

    /// `Aᵀ B A`.
    pub fn congruence_t(&self, b: &DMat) -> DMat {
        let mut m = self.transpose().matmul(b).matmul(self);
        m.symmetrize();
        m
    }
}

/// Lower Cholesky factor, `None` if the matrix is not numerically positive definite.
pub(crate) fn cholesky(a: &DMat) -> Option<DMat> {
    let n = a.n;
    let mut l = DMat::zeros(n);
    for j in 0..n {
        let mut s = a.get(j, j);
        for k in 0..j {
            s -= l.get(j, k) * l.get(j, k);
        }
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        let ljj = math::sqrt(s);
        l.set(j, j, ljj);
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / ljj);
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` in place.
pub(crate) fn cholesky_solve(l: &DMat, b: &mut [f64]) {
    let n = l.n;
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * b[k];
        }
        b[i] = s / l.get(i, i);
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l.get(k, i) * b[k];
        }
        b[i] = s / l.get(i, i);
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi: eigenvalues (unsorted) and
/// eigenvectors as columns.
pub(crate) fn sym_eig(a: &DMat) -> (Vec<f64>, DMat) {
    let n = a.n;
    let mut m = a.clone();
    let mut v = DMat::identity(n);
    let fro = math::sqrt(m.fro_sq());
    if n == 1 || fro == 0.0 {
        return ((0..n).map(|i| m.get(i, i)).collect(), v);
    }
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m.get(p, q) * m.get(p, q);
            }
        }
        if math::sqrt(off) <= 1e-16 * fro {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                if apq.abs() < 1e-3 * f64::EPSILON * (app.abs() + aqq.abs()) {
                    m.set(p, q, 0.0);
                    m.set(q, p, 0.0);
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0));
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                m.set(p, p, app - t * apq);
                m.set(q, q, aqq + t * apq);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    ((0..n).map(|i| m.get(i, i)).collect(), v)
}

pub(crate) fn min_eigenvalue(a: &DMat) -> f64 {
    sym_eig(a).0.into_iter().fold(f64::INFINITY, f64::min)
}

/// One-sided Jacobi SVD `A = U diag(s) Vᵀ` of a square matrix.
pub(crate) fn svd(a: &DMat) -> (DMat, Vec<f64>, DMat) {
    let n = a.n;
    // Work on columns of A.
    let mut u = a.clone();
    let mut v = DMat::identity(n);
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    let up = u.get(k, p);
                    let uq = u.get(k, q);
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + math::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                for k in 0..n {
                    let up = u.get(k, p);
                    let uq = u.get(k, q);
                    u.set(k, p, c * up - s * uq);
                    u.set(k, q, s * up + c * uq);
                    let vp = v.get(k, p);
                    let vq = v.get(k, q);
                    v.set(k, p, c * vp - s * vq);
                    v.set(k, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv = vec![0.0; n];
    for j in 0..n {
        let norm = math::sqrt((0..n).map(|k| u.get(k, j) * u.get(k, j)).sum());
        sv[j] = norm;
        if norm > 0.0 {
            for k in 0..n {
                u.set(k, j, u.get(k, j) / norm);
            }
        }
    }
    (u, sv, v)
}

// Random instances for unit tests.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, HermitianOperator, PositiveOperator, QuantumState, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, r: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
}

/// `G G† / tr` with `G` a `d × rank` Ginibre matrix.
pub fn state(d: usize, rank: usize, r: &mut ChaCha8Rng) -> QuantumState {
    let g = gaussian(d, rank, r);
    QuantumState::normalized_from(&HermitianOperator::new(g.matmul(&g.adjoint()).hermitian_part()).unwrap()).unwrap()
}

pub fn positive(d: usize, r: &mut ChaCha8Rng) -> PositiveOperator {
    let g = gaussian(d, d, r);
    let tr: f64 = r.random_range(0.5..2.0);
    let h = HermitianOperator::new(g.matmul(&g.adjoint()).hermitian_part()).unwrap();
    PositiveOperator::new(h.scale(tr / h.trace())).unwrap()
}

pub fn diag_state(p: &[f64]) -> QuantumState {
    QuantumState::normalized_from(&HermitianOperator::from_real_diag(p)).unwrap()
}

pub fn diag_positive(q: &[f64]) -> PositiveOperator {
    PositiveOperator::new(HermitianOperator::from_real_diag(q)).unwrap()
}

pub fn probability(d: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| r.random_range(0.05..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// Random unitary from the Gram–Schmidt orthonormalization of a Gaussian matrix.
pub fn unitary(d: usize, r: &mut ChaCha8Rng) -> CMatrix {
    let g = gaussian(d, d, r);
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for j in 0..d {
        let mut v = g.column(j);
        for c in &cols {
            let ip: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= ip * ci;
            }
        }
        let n = crate::math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        cols.push(v.iter().map(|z| z / n).collect());
    }
    CMatrix::from_columns(d, &cols)
}

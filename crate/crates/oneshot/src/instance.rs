//! Seeded random instances.
//!
//! Every instance is a pure function of its [`InstanceSpec`]. The generator is
//! `ChaCha20Rng::seed_from_u64(seed)` from `rand_chacha` (ChaCha with 20
//! rounds, a 64-bit block counter, seed expanded by `rand_core`'s PCG32
//! `seed_from_u64`). Real Gaussians are drawn with `rand_distr::StandardNormal`
//! (ziggurat) and a complex Gaussian entry is `re + i·im` with `re` drawn
//! first. Matrices are filled row-major.
//!
//! Haar unitaries are the Q factor of the QR decomposition of a `d × d`
//! complex Gaussian matrix, computed by Gram–Schmidt on the columns (with one
//! reorthogonalization pass), so that the diagonal of R is real and positive.
//! This phase convention is what makes Q exactly Haar distributed.

use num_complex::Complex64 as C64;
use oneshot_core::{CMatrix, HermitianOperator, PositiveOperator, QuantumState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{OneshotError, Result};

/// Family of random states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    /// `tr_E |ψ⟩⟨ψ|` for a Haar-random `|ψ⟩` on `dim × rank`.
    HaarMixed,
    /// `G G† / tr(G G†)` for a `dim × rank` complex Gaussian `G`.
    Ginibre,
    /// A random probability vector with `rank` nonzero entries on the diagonal.
    ClassicalDiagonal,
    /// A Haar-random pure state on `dim_a ⊗ dim_b` (rank 1).
    PureBipartite,
    /// `rank` eigenvalues `1/rank` split by about `1e-9`, in a Haar basis.
    NearDegenerate,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::HaarMixed,
        InstanceKind::Ginibre,
        InstanceKind::ClassicalDiagonal,
        InstanceKind::PureBipartite,
        InstanceKind::NearDegenerate,
    ];
}

/// Single system of dimension `d` or bipartite system `d_a ⊗ d_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dims {
    Single(usize),
    Bipartite(usize, usize),
}

impl Dims {
    pub fn total(self) -> usize {
        match self {
            Dims::Single(d) => d,
            Dims::Bipartite(a, b) => a * b,
        }
    }
}

/// Everything needed to regenerate a random state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub dims: Dims,
    pub rank: usize,
    pub seed: u64,
    pub kind: InstanceKind,
}

impl InstanceSpec {
    pub fn new(dims: Dims, rank: usize, seed: u64, kind: InstanceKind) -> Self {
        InstanceSpec { dims, rank, seed, kind }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims.total();
        if d == 0 {
            return Err(OneshotError::domain("dimension must be positive"));
        }
        if self.rank == 0 || self.rank > d {
            return Err(OneshotError::domain(format!("rank {} outside 1..={d}", self.rank)));
        }
        if self.kind == InstanceKind::PureBipartite {
            if !matches!(self.dims, Dims::Bipartite(..)) {
                return Err(OneshotError::domain("pure-bipartite needs bipartite dimensions"));
            }
            if self.rank != 1 {
                return Err(OneshotError::domain("pure-bipartite states have rank 1"));
            }
        }
        Ok(())
    }
}

/// The generator behind every random object of this crate.
pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; used to derive independent seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed derived from a base seed and a sequence of indices.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(base), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn complex_gaussian<R: Rng>(r: &mut R) -> C64 {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    C64::new(re, im)
}

pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, r: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(r))
}

/// Haar-random `d × d` unitary.
pub fn haar_unitary<R: Rng>(d: usize, r: &mut R) -> CMatrix {
    let g = gaussian_matrix(d, d, r);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for _ in 0..2 {
            for c in &cols {
                let ip: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= ip * ci;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    CMatrix::from_columns(d, &cols)
}

/// Haar-random unit vector in `C^d`.
pub fn haar_vector<R: Rng>(d: usize, r: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(r)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn psd(m: CMatrix) -> Result<HermitianOperator> {
    Ok(HermitianOperator::new(m.hermitian_part())?)
}

/// The state described by `spec`.
pub fn gen_state(spec: &InstanceSpec) -> Result<QuantumState> {
    spec.validate()?;
    let d = spec.dims.total();
    let k = spec.rank;
    let mut r = rng(spec.seed);
    let op = match spec.kind {
        InstanceKind::HaarMixed => {
            let psi = haar_vector(d * k, &mut r);
            let joint = CMatrix::outer(&psi, &psi);
            psd(joint.partial_trace_b(d, k))?
        }
        InstanceKind::Ginibre => {
            let g = gaussian_matrix(d, k, &mut r);
            psd(g.matmul(&g.adjoint()))?
        }
        InstanceKind::ClassicalDiagonal => {
            let mut diag = vec![0.0; d];
            let mut slots: Vec<usize> = (0..d).collect();
            for i in 0..k {
                let j = r.random_range(i..d);
                slots.swap(i, j);
                diag[slots[i]] = r.sample::<f64, _>(Exp1);
            }
            HermitianOperator::from_real_diag(&diag)
        }
        InstanceKind::PureBipartite => HermitianOperator::pure(&haar_vector(d, &mut r)),
        InstanceKind::NearDegenerate => {
            let u = haar_unitary(d, &mut r);
            let mut diag = vec![0.0; d];
            for (i, x) in diag.iter_mut().take(k).enumerate() {
                let jitter: f64 = r.sample(StandardNormal);
                *x = 1.0 / k as f64 + 1e-9 * (i as f64 + jitter.abs());
            }
            HermitianOperator::from_real_diag(&diag).congruence(&u)
        }
    };
    Ok(QuantumState::normalized_from(&op)?)
}

/// A full-rank positive operator of trace in `[1/2, 2]` (a Ginibre state
/// with random trace), for the second argument of the divergences.
pub fn gen_positive(d: usize, seed: u64) -> Result<PositiveOperator> {
    if d == 0 {
        return Err(OneshotError::domain("dimension must be positive"));
    }
    let mut r = rng(seed);
    let g = gaussian_matrix(d, d, &mut r);
    let scale: f64 = r.random_range(0.5..2.0);
    let h = psd(g.matmul(&g.adjoint()))?;
    Ok(PositiveOperator::new(h.scale(scale / h.trace()))?)
}

/// Draws an instance kind for a single system, weighted toward generic states.
pub fn pick_kind<R: Rng>(r: &mut R, bipartite: bool) -> InstanceKind {
    match r.random_range(0..if bipartite { 6 } else { 5 }) {
        0 | 1 => InstanceKind::Ginibre,
        2 => InstanceKind::HaarMixed,
        3 => InstanceKind::ClassicalDiagonal,
        4 => InstanceKind::NearDegenerate,
        _ => InstanceKind::PureBipartite,
    }
}

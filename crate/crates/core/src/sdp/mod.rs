//! Dense semidefinite programming.
//!
//! Problems are stated over complex Hermitian blocks in standard primal form
//!
//! ```text
//! minimize   Σ_b ⟨C_b, X_b⟩
//! subject to Σ_b ⟨A_kb, X_b⟩ (=, ≤, ≥) b_k,   X_b ⪰ 0
//! ```
//!
//! and solved by a primal-dual interior-point method with Nesterov–Todd
//! scaling. Blocks whose data is purely real are solved as real symmetric
//! blocks; the others are embedded as `2n × 2n` real symmetric matrices.
//! Inequalities receive scalar slack blocks internally.

mod builder;
mod dense;
mod ipm;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{CMatrix, HermitianOperator, C64};
use crate::{Error, Result};
use dense::DMat;
use ipm::{RealConstraint, RealSdp};

pub use builder::{
    fidelity_ball_constraints, hermitian_basis, trace_ball_constraints, BallFragment, LinMap, MatVar, SdpBuilder,
    TraceMode,
};

/// Sense of a linear constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

/// `Σ_b ⟨A_b, X_b⟩ (sense) rhs`. Blocks absent from `terms` have zero coefficient.
#[derive(Clone, Debug)]
pub struct SdpConstraint {
    pub terms: Vec<(usize, HermitianOperator)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization problem over positive semidefinite block variables.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    /// One coefficient per block.
    pub objective: Vec<HermitianOperator>,
    pub constraints: Vec<SdpConstraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIterations,
    /// The iteration broke down before reaching the tolerances.
    Stalled,
}

impl SdpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::Unbounded => "unbounded",
            SdpStatus::MaxIterations => "max-iterations",
            SdpStatus::Stalled => "stalled",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSettings {
    /// Relative primal and dual residual accepted as feasible.
    pub feas_tol: f64,
    /// Accepted gap, relative to `1 + |primal value|`.
    pub gap_tol: f64,
    pub max_iterations: usize,
    /// Residual at which iteration stops early.
    pub target_feas: f64,
    /// Gap at which iteration stops early.
    pub target_gap: f64,
    pub infeas_tol: f64,
    /// Prints per-iteration progress in test builds.
    pub trace: bool,
}

impl Default for SdpSettings {
    fn default() -> Self {
        SdpSettings {
            feas_tol: 1e-8,
            gap_tol: 1e-7,
            max_iterations: 200,
            target_feas: 1e-10,
            target_gap: 1e-10,
            infeas_tol: 1e-8,
            trace: false,
        }
    }
}

/// Solver output. Dual quantities follow `Σ_k y_k A_k + Z = C`; for `≤`
/// constraints `y_k ≤ 0`, for `≥` constraints `y_k ≥ 0`.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_blocks: Vec<HermitianOperator>,
    pub dual_slack_blocks: Vec<HermitianOperator>,
    pub multipliers: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::domain("SDP needs at least one block"));
        }
        if self.blocks.iter().any(|&n| n == 0) {
            return Err(Error::domain("SDP block dimensions must be positive"));
        }
        if self.objective.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch { expected: self.blocks.len(), found: self.objective.len() });
        }
        for (c, &n) in self.objective.iter().zip(&self.blocks) {
            if c.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
            }
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::domain(format!("constraint {k} has a non-finite right-hand side")));
            }
            for (blk, a) in &con.terms {
                let n = *self.blocks.get(*blk).ok_or_else(|| Error::domain(format!("constraint {k} names block {blk}")))?;
                if a.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: a.dim() });
                }
            }
        }
        Ok(())
    }
}

struct Embedding {
    complex: Vec<bool>,
    real_dims: Vec<usize>,
}

fn has_imaginary(h: &HermitianOperator) -> bool {
    h.matrix().as_slice().iter().any(|z| z.im != 0.0)
}

fn real_entries(h: &HermitianOperator, complex: bool) -> Vec<(usize, usize, f64)> {
    let n = h.dim();
    let m = h.matrix();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            if complex {
                if z.re != 0.0 {
                    out.push((i, j, 0.5 * z.re));
                    out.push((n + i, n + j, 0.5 * z.re));
                }
                if z.im != 0.0 {
                    out.push((n + i, j, 0.5 * z.im));
                    out.push((i, n + j, -0.5 * z.im));
                }
            } else if z.re != 0.0 {
                out.push((i, j, z.re));
            }
        }
    }
    out
}

fn dense_block(h: &HermitianOperator, complex: bool, rn: usize) -> DMat {
    let mut d = DMat::zeros(rn);
    for (i, j, v) in real_entries(h, complex) {
        d.add_at(i, j, v);
    }
    d
}

fn extract(x: &DMat, n: usize, complex: bool, factor: f64) -> HermitianOperator {
    let m = if complex {
        CMatrix::from_fn(n, n, |i, j| {
            C64::new(
                factor * 0.5 * (x.get(i, j) + x.get(n + i, n + j)),
                factor * 0.5 * (x.get(n + i, j) - x.get(i, n + j)),
            )
        })
    } else {
        CMatrix::from_fn(n, n, |i, j| C64::new(factor * x.get(i, j), 0.0))
    };
    HermitianOperator::from_hermitian_unchecked(m.hermitian_part())
}

fn embed(p: &SdpProblem) -> (RealSdp, Embedding) {
    let nb = p.blocks.len();
    let mut complex = vec![false; nb];
    for (b, c) in p.objective.iter().enumerate() {
        complex[b] |= has_imaginary(c);
    }
    for con in &p.constraints {
        for (b, a) in &con.terms {
            complex[*b] |= has_imaginary(a);
        }
    }
    let mut dims: Vec<usize> = p.blocks.iter().zip(&complex).map(|(&n, &c)| if c { 2 * n } else { n }).collect();
    let real_dims = dims.clone();
    let mut c: Vec<DMat> = (0..nb).map(|b| dense_block(&p.objective[b], complex[b], dims[b])).collect();
    let mut a = Vec::with_capacity(p.constraints.len());
    let mut rhs = Vec::with_capacity(p.constraints.len());
    for con in &p.constraints {
        let mut parts: Vec<(usize, Vec<(usize, usize, f64)>)> = Vec::new();
        for (blk, h) in &con.terms {
            let ents = real_entries(h, complex[*blk]);
            if ents.is_empty() {
                continue;
            }
            match parts.iter_mut().find(|(b, _)| b == blk) {
                Some((_, e)) => e.extend(ents),
                None => parts.push((*blk, ents)),
            }
        }
        let slack = match con.sense {
            Sense::Eq => None,
            Sense::Le => Some(1.0),
            Sense::Ge => Some(-1.0),
        };
        if let Some(sign) = slack {
            let blk = dims.len();
            dims.push(1);
            c.push(DMat::zeros(1));
            parts.push((blk, vec![(0, 0, sign)]));
        }
        for (_, ents) in parts.iter_mut() {
            merge_entries(ents);
        }
        a.push(RealConstraint { parts });
        rhs.push(con.rhs);
    }
    (RealSdp { dims, c, a, b: rhs }, Embedding { complex, real_dims })
}

fn merge_entries(ents: &mut Vec<(usize, usize, f64)>) {
    ents.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(ents.len());
    for &(i, j, v) in ents.iter() {
        match out.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => out.push((i, j, v)),
        }
    }
    out.retain(|e| e.2 != 0.0);
    *ents = out;
}

/// Solves with default settings.
pub fn solve(p: &SdpProblem) -> Result<SdpSolution> {
    solve_with(p, &SdpSettings::default())
}

/// Solves `p`. Errors only for malformed problems; solver outcomes are
/// reported through [`SdpStatus`].
pub fn solve_with(p: &SdpProblem, settings: &SdpSettings) -> Result<SdpSolution> {
    p.validate()?;
    let (real, emb) = embed(p);
    let out = ipm::solve(&real, settings);
    let nb = p.blocks.len();
    let primal_blocks = (0..nb).map(|b| extract(&out.x[b], p.blocks[b], emb.complex[b], 1.0)).collect();
    let dual_slack_blocks = (0..nb)
        .map(|b| extract(&out.z[b], p.blocks[b], emb.complex[b], if emb.complex[b] { 2.0 } else { 1.0 }))
        .collect();
    debug_assert!(emb.real_dims.iter().zip(&real.dims).all(|(a, b)| a == b));
    Ok(SdpSolution {
        status: out.status,
        primal_blocks,
        dual_slack_blocks,
        multipliers: out.y,
        primal_value: out.pobj,
        dual_value: out.dobj,
        gap: (out.pobj - out.dobj).abs(),
        primal_residual: out.pinf,
        dual_residual: out.dinf,
        iterations: out.iterations,
    })
}

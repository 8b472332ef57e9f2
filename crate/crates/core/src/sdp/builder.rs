// Convenience layer for assembling SdpProblems out of matrix-valued pieces.

use alloc::vec;
use alloc::vec::Vec;

use super::{SdpConstraint, SdpProblem, SdpSolution, Sense};
use crate::linalg::{eig, CMatrix, HermitianOperator, QuantumState, C64};
use crate::math;
use crate::tol::{RANK_TOL, TRACE_TOL};
use crate::{Error, Result};

/// A principal sub-block `[offset, offset + dim)` of block variable `block`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatVar {
    pub block: usize,
    pub offset: usize,
    pub dim: usize,
}

impl MatVar {
    pub fn sub(&self, offset: usize, dim: usize) -> MatVar {
        assert!(offset + dim <= self.dim);
        MatVar { block: self.block, offset: self.offset + offset, dim }
    }

    /// Reads this sub-block from a solution.
    pub fn value(&self, sol: &SdpSolution) -> HermitianOperator {
        take(&sol.primal_blocks[self.block], self.offset, self.dim)
    }

    /// Reads the matching sub-block of the dual slack.
    pub fn dual_value(&self, sol: &SdpSolution) -> HermitianOperator {
        take(&sol.dual_slack_blocks[self.block], self.offset, self.dim)
    }
}

fn take(h: &HermitianOperator, offset: usize, dim: usize) -> HermitianOperator {
    HermitianOperator::from_hermitian_unchecked(h.matrix().slice(offset, offset, dim, dim))
}

/// Linear maps from a matrix variable to the output space of a matrix constraint.
#[derive(Clone, Debug)]
pub enum LinMap {
    /// `X ↦ c X`.
    Identity(f64),
    /// `X ↦ c V X V†`.
    Congruence(CMatrix, f64),
    /// `X ↦ tr_A X` on `A ⊗ B`.
    PartialTraceA { da: usize, db: usize },
    /// `X ↦ tr_B X` on `A ⊗ B`.
    PartialTraceB { da: usize, db: usize },
    /// Scalar variable `x ↦ x H`.
    ScalarTimes(HermitianOperator),
}

impl LinMap {
    fn out_dim(&self, in_dim: usize) -> usize {
        match self {
            LinMap::Identity(_) => in_dim,
            LinMap::Congruence(v, _) => v.rows(),
            LinMap::PartialTraceA { db, .. } => *db,
            LinMap::PartialTraceB { da, .. } => *da,
            LinMap::ScalarTimes(h) => h.dim(),
        }
    }

    fn in_dim_ok(&self, in_dim: usize) -> bool {
        match self {
            LinMap::Identity(_) => true,
            LinMap::Congruence(v, _) => v.cols() == in_dim,
            LinMap::PartialTraceA { da, db } | LinMap::PartialTraceB { da, db } => da * db == in_dim,
            LinMap::ScalarTimes(_) => in_dim == 1,
        }
    }

    fn is_real(&self) -> bool {
        match self {
            LinMap::Congruence(v, _) => v.as_slice().iter().all(|z| z.im == 0.0),
            LinMap::ScalarTimes(h) => h.matrix().as_slice().iter().all(|z| z.im == 0.0),
            _ => true,
        }
    }

    /// Adjoint map applied to `E`.
    fn adjoint(&self, e: &CMatrix) -> CMatrix {
        match self {
            LinMap::Identity(c) => e.scale(*c),
            LinMap::Congruence(v, c) => v.adjoint().matmul(e).matmul(v).scale(*c),
            LinMap::PartialTraceA { da, .. } => CMatrix::identity(*da).kron(e),
            LinMap::PartialTraceB { db, .. } => e.kron(&CMatrix::identity(*db)),
            LinMap::ScalarTimes(h) => CMatrix::from_real_diag(&[h.matrix().inner(e).re]),
        }
    }
}

/// Orthonormal basis of the `n × n` Hermitian matrices under `⟨A, B⟩ = tr AB`:
/// `E_kk`, `(E_kl + E_lk)/√2` and `i(E_kl − E_lk)/√2` for `k < l`. With
/// `real_only` the imaginary elements are omitted.
pub fn hermitian_basis(n: usize, real_only: bool) -> Vec<CMatrix> {
    let r = 1.0 / math::sqrt(2.0);
    let mut out = Vec::new();
    for k in 0..n {
        let mut e = CMatrix::zeros(n, n);
        e[(k, k)] = C64::new(1.0, 0.0);
        out.push(e);
    }
    for k in 0..n {
        for l in k + 1..n {
            let mut e = CMatrix::zeros(n, n);
            e[(k, l)] = C64::new(r, 0.0);
            e[(l, k)] = C64::new(r, 0.0);
            out.push(e);
            if !real_only {
                let mut e = CMatrix::zeros(n, n);
                e[(k, l)] = C64::new(0.0, -r);
                e[(l, k)] = C64::new(0.0, r);
                out.push(e);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
struct ScalarConstraint {
    terms: Vec<(usize, CMatrix)>,
    sense: Sense,
    rhs: f64,
}

#[derive(Clone, Debug)]
struct MatrixConstraint {
    terms: Vec<(MatVar, LinMap)>,
    rhs: CMatrix,
}

/// Incremental problem builder.
#[derive(Clone, Debug, Default)]
pub struct SdpBuilder {
    blocks: Vec<usize>,
    objective: Vec<CMatrix>,
    scalars: Vec<ScalarConstraint>,
    matrices: Vec<MatrixConstraint>,
}

impl SdpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_block(&mut self, n: usize) -> MatVar {
        self.blocks.push(n);
        self.objective.push(CMatrix::zeros(n, n));
        MatVar { block: self.blocks.len() - 1, offset: 0, dim: n }
    }

    pub fn block_dim(&self, block: usize) -> usize {
        self.blocks[block]
    }

    /// Coefficient matrix of the whole block for `⟨H, X_v⟩`.
    pub fn lift(&self, v: MatVar, h: &CMatrix) -> CMatrix {
        assert_eq!((h.rows(), h.cols()), (v.dim, v.dim));
        let n = self.blocks[v.block];
        let mut out = CMatrix::zeros(n, n);
        for i in 0..v.dim {
            for j in 0..v.dim {
                out[(v.offset + i, v.offset + j)] = h[(i, j)];
            }
        }
        out
    }

    /// Coefficient matrix of the whole block for `Re tr(B† X[r0.., c0..])`
    /// where the off-diagonal sub-block has the shape of `B`.
    pub fn coupling(&self, block: usize, r0: usize, c0: usize, b: &CMatrix) -> CMatrix {
        let n = self.blocks[block];
        let mut out = CMatrix::zeros(n, n);
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(r0 + i, c0 + j)] += b[(i, j)] * 0.5;
                out[(c0 + j, r0 + i)] += b[(i, j)].conj() * 0.5;
            }
        }
        out
    }

    /// Adds `⟨H, X_v⟩` to the objective.
    pub fn add_objective(&mut self, v: MatVar, h: &CMatrix) {
        let c = self.lift(v, h);
        self.add_objective_raw(v.block, &c);
    }

    pub fn add_objective_raw(&mut self, block: usize, c: &CMatrix) {
        self.objective[block] = &self.objective[block] + c;
    }

    /// `Σ ⟨A_t, X_{block_t}⟩ (sense) rhs` with whole-block coefficients.
    pub fn add_constraint(&mut self, terms: Vec<(usize, CMatrix)>, sense: Sense, rhs: f64) {
        self.scalars.push(ScalarConstraint { terms, sense, rhs });
    }

    /// `Σ ⟨H_t, X_{v_t}⟩ (sense) rhs`.
    pub fn add_linear(&mut self, terms: &[(MatVar, CMatrix)], sense: Sense, rhs: f64) {
        let t = terms.iter().map(|(v, h)| (v.block, self.lift(*v, h))).collect();
        self.add_constraint(t, sense, rhs);
    }

    /// `Σ tr X_{v_t} (sense) rhs`.
    pub fn add_trace(&mut self, vars: &[MatVar], sense: Sense, rhs: f64) {
        let terms: Vec<(MatVar, CMatrix)> = vars.iter().map(|v| (*v, CMatrix::identity(v.dim))).collect();
        self.add_linear(&terms, sense, rhs);
    }

    /// `Σ_t L_t(X_{v_t}) (sense) H`. For `Le`/`Ge` a positive slack block is
    /// created and returned.
    pub fn add_matrix_constraint(&mut self, terms: Vec<(MatVar, LinMap)>, sense: Sense, rhs: &HermitianOperator) -> Option<MatVar> {
        let out = rhs.dim();
        for (v, map) in &terms {
            assert!(map.in_dim_ok(v.dim), "linear map does not accept a {}-dimensional variable", v.dim);
            assert_eq!(map.out_dim(v.dim), out, "linear map output dimension mismatch");
        }
        let mut terms = terms;
        let slack = match sense {
            Sense::Eq => None,
            Sense::Le => {
                let s = self.add_block(out);
                terms.push((s, LinMap::Identity(1.0)));
                Some(s)
            }
            Sense::Ge => {
                let s = self.add_block(out);
                terms.push((s, LinMap::Identity(-1.0)));
                Some(s)
            }
        };
        self.matrices.push(MatrixConstraint { terms, rhs: rhs.matrix().clone() });
        slack
    }

    fn all_real(&self) -> bool {
        let real = |m: &CMatrix| m.as_slice().iter().all(|z| z.im == 0.0);
        self.objective.iter().all(real)
            && self.scalars.iter().all(|c| c.terms.iter().all(|(_, m)| real(m)))
            && self.matrices.iter().all(|c| real(&c.rhs) && c.terms.iter().all(|(_, m)| m.is_real()))
    }

    pub fn build(&self) -> SdpProblem {
        let real_only = self.all_real();
        let herm = HermitianOperator::from_hermitian_unchecked;
        let mut constraints = Vec::new();
        for c in &self.scalars {
            constraints.push(SdpConstraint {
                terms: c.terms.iter().map(|(b, m)| (*b, herm(m.hermitian_part()))).collect(),
                sense: c.sense,
                rhs: c.rhs,
            });
        }
        for c in &self.matrices {
            let out = c.rhs.rows();
            for e in hermitian_basis(out, real_only) {
                let mut terms: Vec<(usize, CMatrix)> = Vec::new();
                for (v, map) in &c.terms {
                    let coef = self.lift(*v, &map.adjoint(&e));
                    match terms.iter_mut().find(|(b, _)| *b == v.block) {
                        Some((_, m)) => *m = &*m + &coef,
                        None => terms.push((v.block, coef)),
                    }
                }
                constraints.push(SdpConstraint {
                    terms: terms.into_iter().map(|(b, m)| (b, herm(m.hermitian_part()))).collect(),
                    sense: Sense::Eq,
                    rhs: e.inner(&c.rhs).re,
                });
            }
        }
        SdpProblem {
            blocks: self.blocks.clone(),
            objective: self.objective.iter().map(|m| herm(m.hermitian_part())).collect(),
            constraints,
        }
    }
}

/// Trace condition on the smoothed state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMode {
    AtMostOne,
    ExactlyOne,
}

/// A ball variable: the smoothed state is `frame · X_smoothed · frame†`.
#[derive(Clone, Debug)]
pub struct BallFragment {
    pub smoothed: MatVar,
    pub frame: CMatrix,
}

impl BallFragment {
    pub fn state(&self, sol: &SdpSolution) -> HermitianOperator {
        self.smoothed.value(sol).congruence(&self.frame)
    }
}

fn check_frame(frame: &CMatrix, d: usize) -> Result<()> {
    if frame.rows() != d || frame.cols() == 0 || frame.cols() > d {
        return Err(Error::DimensionMismatch { expected: d, found: frame.rows() });
    }
    Ok(())
}

/// Constrains a new variable `ρ̃ = V X V†` (V = `frame`, identity by default)
/// to the purified-distance ball `F̄(ρ, ρ̃) ≥ 1 − ε²`.
///
/// The fidelity is represented by a block `[[R, W], [W†, X]] ⪰ 0` where
/// `ρ = U R U†` on the support of `ρ`, so that `‖√ρ√ρ̃‖₁ ≥ Re tr(U W V†)`.
/// For subnormalized `ρ` a `2 × 2` block `[[1 − tr ρ, s], [s, b]]` with
/// `b ≤ 1 − tr ρ̃` carries the term `√((1 − tr ρ)(1 − tr ρ̃))`.
pub fn fidelity_ball_constraints(
    b: &mut SdpBuilder,
    rho: &QuantumState,
    eps: f64,
    frame: Option<&CMatrix>,
    mode: TraceMode,
) -> Result<BallFragment> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::domain("ball radius must lie in [0, 1)"));
    }
    let d = rho.dim();
    let v = frame.cloned().unwrap_or_else(|| CMatrix::identity(d));
    check_frame(&v, d)?;
    let r = v.cols();

    let e = eig(rho.op())?;
    let cut = RANK_TOL * e.max_value().max(0.0);
    let keep: Vec<usize> = (0..d).filter(|&i| e.values[i] > cut).collect();
    let k = keep.len();
    let u = e.vectors.select_columns(&keep);
    let rvals: Vec<f64> = keep.iter().map(|&i| e.values[i]).collect();

    let f = b.add_block(k + r);
    let top = f.sub(0, k);
    let smoothed = f.sub(k, r);
    b.add_matrix_constraint(
        vec![(top, LinMap::Identity(1.0))],
        Sense::Eq,
        &HermitianOperator::from_real_diag(&rvals),
    );

    let coupling = b.coupling(f.block, 0, k, &u.adjoint().matmul(&v));
    let mut fid_terms = vec![(f.block, coupling)];

    let deficit = 1.0 - rho.trace();
    let sub = mode == TraceMode::AtMostOne && deficit > TRACE_TOL;
    if sub {
        let t = b.add_block(2);
        let a = CMatrix::from_real_diag(&[1.0, 0.0]);
        b.add_linear(&[(t, a)], Sense::Eq, deficit);
        // b + tr X ≤ 1
        let bb = CMatrix::from_real_diag(&[0.0, 1.0]);
        b.add_linear(&[(t, bb), (smoothed, CMatrix::identity(r))], Sense::Le, 1.0);
        let s = b.coupling(t.block, 0, 1, &CMatrix::from_real_diag(&[1.0]));
        fid_terms.push((t.block, s));
    } else {
        match mode {
            TraceMode::AtMostOne => b.add_trace(&[smoothed], Sense::Le, 1.0),
            TraceMode::ExactlyOne => b.add_trace(&[smoothed], Sense::Eq, 1.0),
        }
    }
    b.add_constraint(fid_terms, Sense::Ge, math::sqrt(1.0 - eps * eps));
    Ok(BallFragment { smoothed, frame: v })
}

/// Constrains a new normalized variable `ρ̃ = V X V†` to the trace-distance
/// ball `½‖ρ̃ − ρ‖₁ ≤ ε` through `ρ̃ − ρ = P − N`, `tr(P + N) ≤ 2ε`.
pub fn trace_ball_constraints(b: &mut SdpBuilder, rho: &QuantumState, eps: f64, frame: Option<&CMatrix>) -> Result<BallFragment> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::domain("ball radius must lie in [0, 1)"));
    }
    if !rho.is_normalized() {
        return Err(Error::domain("the trace ball requires a normalized center"));
    }
    let d = rho.dim();
    let v = frame.cloned().unwrap_or_else(|| CMatrix::identity(d));
    check_frame(&v, d)?;
    let r = v.cols();
    let x = b.add_block(r);
    let p = b.add_block(d);
    let n = b.add_block(d);
    b.add_matrix_constraint(
        vec![(x, LinMap::Congruence(v.clone(), 1.0)), (p, LinMap::Identity(-1.0)), (n, LinMap::Identity(1.0))],
        Sense::Eq,
        rho.op(),
    );
    b.add_trace(&[x], Sense::Eq, 1.0);
    b.add_trace(&[p, n], Sense::Le, 2.0 * eps);
    Ok(BallFragment { smoothed: x, frame: v })
}

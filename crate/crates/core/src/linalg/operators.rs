use alloc::format;
use alloc::vec::Vec;

use super::eig::{eig, EigenDecomposition};
use super::matrix::{CMatrix, C64};
use crate::tol;
use crate::{Error, Result};

/// Dense complex Hermitian matrix, stored symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Validates Hermiticity to a relative tolerance and stores `(A + A†)/2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::domain(format!("matrix is {}x{}, not square", m.rows(), m.cols())));
        }
        if m.rows() == 0 {
            return Err(Error::domain("operator dimension must be at least 1"));
        }
        if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        let defect = m.hermiticity_defect();
        if defect > tol::HERM_TOL * m.max_abs().max(1.0) {
            return Err(Error::domain(format!("matrix is not Hermitian (defect {defect:.3e})")));
        }
        Ok(HermitianOperator(m.hermitian_part()))
    }

    pub(crate) fn from_hermitian_unchecked(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        HermitianOperator(m)
    }

    pub fn zeros(n: usize) -> Self {
        HermitianOperator(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianOperator(CMatrix::identity(n))
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        HermitianOperator(CMatrix::from_real_diag(diag))
    }

    /// Rank-one projector `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &[C64]) -> Self {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        HermitianOperator(CMatrix::outer(psi, psi).scale(1.0 / norm).hermitian_part())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `tr(A B)`, real for Hermitian operands.
    pub fn inner(&self, other: &HermitianOperator) -> f64 {
        self.0.inner(&other.0).re
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let av = self.0.mat_vec(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOperator(self.0.scale(s))
    }

    pub fn add(&self, other: &HermitianOperator) -> Self {
        HermitianOperator(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianOperator) -> Self {
        HermitianOperator(&self.0 - &other.0)
    }

    /// `V A V†` for any (possibly rectangular) `V`.
    pub fn congruence(&self, v: &CMatrix) -> Self {
        HermitianOperator(self.0.congruence(v).hermitian_part())
    }

    /// `A B A` for Hermitian `A = self`.
    pub fn sandwich(&self, b: &HermitianOperator) -> Self {
        HermitianOperator(self.0.matmul(&b.0).matmul(&self.0).hermitian_part())
    }

    pub fn kron(&self, other: &HermitianOperator) -> Self {
        HermitianOperator(self.0.kron(&other.0))
    }

    pub fn partial_trace_a(&self, da: usize, db: usize) -> Self {
        HermitianOperator(self.0.partial_trace_a(da, db))
    }

    pub fn partial_trace_b(&self, da: usize, db: usize) -> Self {
        HermitianOperator(self.0.partial_trace_b(da, db))
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        eig(self)
    }

    /// Diagonal of `A` in the basis given by the columns of `basis`.
    pub fn diagonal_in(&self, basis: &CMatrix) -> Vec<f64> {
        (0..basis.cols()).map(|k| self.expectation(&basis.column(k))).collect()
    }

    pub(crate) fn check_same_dim(&self, other: &HermitianOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

/// Whether a state has unit trace or trace in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Normalization {
    Normalized,
    Subnormalized,
}

/// Positive semidefinite operator with trace in `(0, 1]` (sub-normalized) or
/// equal to one (normalized).
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    op: HermitianOperator,
    normalization: Normalization,
}

impl QuantumState {
    pub fn new(op: HermitianOperator, normalization: Normalization) -> Result<Self> {
        let op = clip_psd(op)?;
        let tr = op.trace();
        match normalization {
            Normalization::Normalized if (tr - 1.0).abs() > tol::TRACE_TOL => {
                return Err(Error::domain(format!("normalized state has trace {tr}")));
            }
            Normalization::Subnormalized if !(tr > 0.0 && tr <= 1.0 + tol::TRACE_TOL) => {
                return Err(Error::domain(format!("sub-normalized state has trace {tr}")));
            }
            _ => {}
        }
        Ok(QuantumState { op, normalization })
    }

    /// Normalized if the trace is within tolerance of one, sub-normalized otherwise.
    pub fn infer(op: HermitianOperator) -> Result<Self> {
        let norm = if (op.trace() - 1.0).abs() <= tol::TRACE_TOL {
            Normalization::Normalized
        } else {
            Normalization::Subnormalized
        };
        Self::new(op, norm)
    }

    /// Divides a positive operator by its trace.
    pub fn normalized_from(op: &HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !(tr > 0.0) {
            return Err(Error::domain("cannot normalize an operator with non-positive trace"));
        }
        Self::new(op.scale(1.0 / tr), Normalization::Normalized)
    }

    /// Clips negative eigenvalues and rescales the trace into range. Meant for
    /// operators that come out of numerical optimization.
    pub fn from_approximate(op: &HermitianOperator, normalization: Normalization) -> Result<Self> {
        let clipped = eig(op)?.map(|l| l.max(0.0));
        let tr = clipped.trace();
        if !(tr > 0.0) {
            return Err(Error::domain("approximate state has no positive part"));
        }
        let scaled = match normalization {
            Normalization::Normalized => clipped.scale(1.0 / tr),
            Normalization::Subnormalized if tr > 1.0 => clipped.scale(1.0 / tr),
            Normalization::Subnormalized => clipped,
        };
        Ok(QuantumState { op: scaled, normalization })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        QuantumState { op: HermitianOperator::identity(n).scale(1.0 / n as f64), normalization: Normalization::Normalized }
    }

    pub fn pure(psi: &[C64]) -> Self {
        QuantumState { op: HermitianOperator::pure(psi), normalization: Normalization::Normalized }
    }

    #[inline]
    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization == Normalization::Normalized
    }

    pub fn to_positive(&self) -> PositiveOperator {
        PositiveOperator { op: self.op.clone() }
    }

    pub fn partial_trace_a(&self, da: usize, db: usize) -> Result<QuantumState> {
        QuantumState::new(self.op.partial_trace_a(da, db), self.normalization)
    }

    pub fn partial_trace_b(&self, da: usize, db: usize) -> Result<QuantumState> {
        QuantumState::new(self.op.partial_trace_b(da, db), self.normalization)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.op.inner(&self.op)
    }
}

/// Positive semidefinite operator with positive trace.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveOperator {
    op: HermitianOperator,
}

impl PositiveOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let op = clip_psd(op)?;
        if !(op.trace() > 0.0) {
            return Err(Error::domain("positive operator must have positive trace"));
        }
        Ok(PositiveOperator { op })
    }

    #[inline]
    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }
}

impl From<QuantumState> for PositiveOperator {
    fn from(s: QuantumState) -> Self {
        PositiveOperator { op: s.op }
    }
}

fn clip_psd(op: HermitianOperator) -> Result<HermitianOperator> {
    let e = eig(&op)?;
    let min = e.min_value();
    if min < -tol::PSD_TOL {
        return Err(Error::domain(format!("operator is not positive semidefinite (min eigenvalue {min:.3e})")));
    }
    if min < 0.0 {
        Ok(e.map(|l| l.max(0.0)))
    } else {
        Ok(op)
    }
}

/// Projector onto the span of eigenvectors with eigenvalue strictly above
/// `EIG_POS_TOL · ‖X‖_∞`.
pub fn positive_part_projector(x: &HermitianOperator) -> Result<HermitianOperator> {
    let e = eig(x)?;
    Ok(positive_part_from(&e))
}

pub(crate) fn positive_part_from(e: &EigenDecomposition) -> HermitianOperator {
    let cut = tol::EIG_POS_TOL * e.spectral_norm();
    e.projector_where(|l| l > cut)
}

/// Moore–Penrose power: eigenvalues above `RANK_TOL · λ_max` are raised to
/// `t`, the rest are mapped to zero.
pub fn mp_power(a: &HermitianOperator, t: f64) -> Result<HermitianOperator> {
    let e = eig(a)?;
    mp_power_from(&e, t)
}

pub(crate) fn mp_power_from(e: &EigenDecomposition, t: f64) -> Result<HermitianOperator> {
    if e.min_value() < -tol::PSD_TOL {
        return Err(Error::domain("Moore-Penrose power of a non-positive operator"));
    }
    let lmax = e.max_value();
    if lmax <= 0.0 {
        if t < 0.0 {
            return Err(Error::domain("negative power of the zero operator"));
        }
        return Ok(HermitianOperator::zeros(e.dim()));
    }
    let cut = tol::RANK_TOL * lmax;
    Ok(e.map(|l| if l > cut { crate::math::powf(l, t) } else { 0.0 }))
}

/// Orthonormal basis (columns) of the support of a positive operator, using
/// the `RANK_TOL` cutoff.
pub fn support_basis(a: &HermitianOperator) -> Result<CMatrix> {
    let e = eig(a)?;
    let cut = tol::RANK_TOL * e.max_value().max(0.0);
    Ok(e.basis_where(|l| l > cut))
}

/// `A ⪯ B` up to `tol`: the smallest eigenvalue of `B − A` is at least `−tol`.
pub fn operator_leq(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> Result<bool> {
    a.check_same_dim(b)?;
    Ok(eig(&b.sub(a))?.min_value() >= -tol)
}

/// Smallest eigenvalue of `B − A`; nonnegative iff `A ⪯ B`.
pub fn loewner_margin(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    a.check_same_dim(b)?;
    Ok(eig(&b.sub(a))?.min_value())
}

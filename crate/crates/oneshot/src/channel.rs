//! Quantum channels for the data-processing checks.

use num_complex::Complex64 as C64;
use oneshot_core::{CMatrix, HermitianOperator, PositiveOperator, QuantumState};

use crate::instance::{haar_unitary, rng};
use crate::{OneshotError, Result};

/// Trace-preservation tolerance checked on construction.
pub const TP_TOL: f64 = 1e-10;

/// A completely positive trace-preserving map on `d × d` matrices.
#[derive(Clone, Debug)]
pub enum Channel {
    /// `E(X) = tr_env(V X V†)` for an isometry `V : C^d → C^d ⊗ C^{d_env}`.
    Stinespring { v: CMatrix, dim: usize, dim_env: usize },
    /// `E(X) = Σ_k |u_k⟩⟨u_k| X |u_k⟩⟨u_k|` for the columns `u_k` of a unitary.
    Pinching { basis: CMatrix },
}

impl Channel {
    pub fn identity(dim: usize) -> Self {
        Channel::Stinespring { v: CMatrix::identity(dim), dim, dim_env: 1 }
    }

    /// Stinespring channel with a Haar-random isometry (the first `dim`
    /// columns of a Haar unitary on `dim · dim_env`).
    pub fn random_stinespring(dim: usize, dim_env: usize, seed: u64) -> Result<Self> {
        if dim == 0 || dim_env == 0 {
            return Err(OneshotError::domain("channel dimensions must be positive"));
        }
        let u = haar_unitary(dim * dim_env, &mut rng(seed));
        let cols: Vec<usize> = (0..dim).collect();
        let ch = Channel::Stinespring { v: u.select_columns(&cols), dim, dim_env };
        ch.check_trace_preserving()?;
        Ok(ch)
    }

    /// Pinching in a Haar-random basis.
    pub fn random_pinching(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(OneshotError::domain("channel dimension must be positive"));
        }
        Ok(Channel::Pinching { basis: haar_unitary(dim, &mut rng(seed)) })
    }

    /// Pinching in the given orthonormal basis (columns).
    pub fn pinching(basis: CMatrix) -> Result<Self> {
        let n = basis.rows();
        if !basis.is_square() || (&basis.adjoint().matmul(&basis) - &CMatrix::identity(n)).max_abs() > TP_TOL {
            return Err(OneshotError::domain("pinching basis must be unitary"));
        }
        Ok(Channel::Pinching { basis })
    }

    pub fn dim(&self) -> usize {
        match self {
            Channel::Stinespring { dim, .. } => *dim,
            Channel::Pinching { basis } => basis.rows(),
        }
    }

    /// `‖V†V − 1‖` for Stinespring channels; pinchings are exact.
    pub fn check_trace_preserving(&self) -> Result<()> {
        if let Channel::Stinespring { v, dim, .. } = self {
            let defect = (&v.adjoint().matmul(v) - &CMatrix::identity(*dim)).max_abs();
            if defect > TP_TOL {
                return Err(OneshotError::domain(format!("channel is not trace preserving (defect {defect:.3e})")));
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        if x.dim() != self.dim() {
            return Err(oneshot_core::Error::DimensionMismatch { expected: self.dim(), found: x.dim() }.into());
        }
        Ok(match self {
            Channel::Stinespring { v, dim, dim_env } => x.congruence(v).partial_trace_b(*dim, *dim_env),
            Channel::Pinching { basis } => {
                let n = basis.rows();
                let diag = x.diagonal_in(basis);
                let d = CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) });
                HermitianOperator::new(d)?.congruence(basis)
            }
        })
    }

    pub fn apply_state(&self, rho: &QuantumState) -> Result<QuantumState> {
        Ok(QuantumState::new(self.apply(rho.op())?, rho.normalization())?)
    }

    pub fn apply_positive(&self, sigma: &PositiveOperator) -> Result<PositiveOperator> {
        Ok(PositiveOperator::new(self.apply(sigma.op())?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_state, Dims, InstanceKind, InstanceSpec};
    use oneshot_core::linalg::eig;

    fn state(d: usize, seed: u64) -> QuantumState {
        gen_state(&InstanceSpec::new(Dims::Single(d), d, seed, InstanceKind::Ginibre)).unwrap()
    }

    #[test]
    fn identity_channel() {
        let rho = state(3, 1);
        let out = Channel::identity(3).apply_state(&rho).unwrap();
        assert!(out.op().sub(rho.op()).matrix().max_abs() < 1e-15);
    }

    #[test]
    fn qubit_dephasing() {
        let rho = state(2, 2);
        let ch = Channel::pinching(CMatrix::identity(2)).unwrap();
        let out = ch.apply_state(&rho).unwrap();
        let m = out.op().matrix();
        assert_eq!(m[(0, 1)], C64::new(0.0, 0.0));
        assert!((m[(0, 0)].re - rho.op().matrix()[(0, 0)].re).abs() < 1e-15);
    }

    #[test]
    fn random_channels_map_states_to_states() {
        for seed in 0..20 {
            let rho = state(3, seed);
            for ch in [Channel::random_stinespring(3, 2, seed).unwrap(), Channel::random_pinching(3, seed).unwrap()] {
                let out = ch.apply(rho.op()).unwrap();
                assert!((out.trace() - 1.0).abs() < 1e-12);
                assert!(eig(&out).unwrap().min_value() > -1e-12);
            }
        }
    }

    #[test]
    fn non_unitary_basis_is_rejected() {
        assert!(Channel::pinching(CMatrix::identity(2).scale(2.0)).is_err());
    }
}

//! Dense Hermitian matrix machinery and state distances.

mod distance;
mod eig;
mod matrix;
mod operators;

pub use distance::{generalized_fidelity, purified_distance, root_fidelity, trace_distance, trace_norm};
pub use eig::{eig, singular_values, EigenDecomposition};
pub use matrix::{CMatrix, C64};
pub use operators::{
    loewner_margin, mp_power, operator_leq, positive_part_projector, support_basis, HermitianOperator, Normalization,
    PositiveOperator, QuantumState,
};
pub(crate) use operators::{mp_power_from, positive_part_from};

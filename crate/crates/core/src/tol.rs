//! Numerical tolerances shared across the crate.

/// Relative Hermiticity tolerance for inputs; matrices are symmetrized as `(A + A†)/2`.
pub const HERM_TOL: f64 = 1e-10;
/// Absolute tolerance on the smallest eigenvalue of a positive operator.
/// Eigenvalues in `[-PSD_TOL, 0)` are clipped to zero.
pub const PSD_TOL: f64 = 1e-9;
/// Absolute tolerance on traces of states.
pub const TRACE_TOL: f64 = 1e-9;
/// Relative cutoff (times `‖X‖_∞`) for "strictly positive" eigenvalues in `{X}_+`.
pub const EIG_POS_TOL: f64 = 1e-10;
/// Relative cutoff (times `λ_max`) for support and Moore–Penrose decisions.
pub const RANK_TOL: f64 = 1e-12;
/// Mass of `ρ` outside `supp(σ)`, relative to `‖ρ‖_∞`, above which the support
/// condition is considered violated.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Default `η` (bits) wherever a construction takes a limit `η → 0`.
pub const DEFAULT_ETA: f64 = 1e-6;
/// Search range (bits) for the information-spectrum scan.
pub const SPECTRUM_CAP: f64 = 60.0;
/// Relative cutoff below which eigenvalues are dropped before square roots
/// in fidelities, so rounding noise on a kernel does not enter as `√noise`.
pub const SQRT_CUT: f64 = 1e-14;

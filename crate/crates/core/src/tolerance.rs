//! Numerical thresholds. All values are absolute and assume `f64`
//! arithmetic on operators normalized against the identity.

/// Smallest eigenvalue of the density element accepted as faithful.
pub const POSITIVITY: f64 = 1e-10;

/// Normalization of a `FaithfulState`.
pub const STATE_TRACE: f64 = 1e-12;

/// Hermiticity of an input density element.
pub const HERMITICITY: f64 = 1e-10;

/// Unitarity of a gauge element, `‖g g* − 1‖`.
pub const UNITARY: f64 = 1e-12;

/// Density-operator validity (Hermiticity, trace, positivity) on `H_ω`.
pub const DENSITY: f64 = 1e-8;

/// Kraus completeness `‖Σ Λ*Λ − 1‖`.
pub const KRAUS_COMPLETENESS: f64 = 1e-10;

/// Distance of a Kraus operator from the commutant.
pub const KRAUS_IN_COMMUTANT: f64 = 1e-9;

/// Residual allowed when solving for the restricted density element.
pub const RESTRICTION_RESIDUAL: f64 = 1e-9;

/// Relative singular-value cutoff for rank and null-space decisions.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Eigenvalues below this are exact zeros in entropy sums.
pub const ENTROPY_ZERO: f64 = 1e-12;

/// A residual threshold for arithmetic in `T`: `tol`, raised to
/// `1000 ε_T` when the scalar type cannot resolve it. Leaves every `f64`
/// threshold above unchanged.
pub fn for_scalar<T: crate::scalar::Real>(tol: f64) -> f64 {
    tol.max(1e3 * crate::scalar::to_f64(T::default_epsilon()))
}

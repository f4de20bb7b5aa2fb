//! GNS representations, Tomita-Takesaki modular data and gauge-induced
//! quantum operations for finite-dimensional C*-algebras with a faithful
//! state.
//!
//! The numerical core is generic over the real scalar type `T` (see
//! [`Real`]); `f64` aliases are exported at the crate root for the common
//! case.
//!
//! ```
//! use gns_core::*;
//! # fn main() -> Result<()> {
//! let shape = AlgebraShape::full(2)?;
//! let state = State64::from_spectra(&shape, &[vec![0.7, 0.3]], None)?;
//! let rep = GnsRep::new(state)?;
//! let md = modular_data(&rep)?;
//! assert_eq!(md.commutant_basis.len(), 4);
//! let g = fourier_gauge(&rep);
//! assert!((gauge_entropy(&rep, &g)? - std::f64::consts::LN_2).abs() < 1e-12);
//! assert!(gauge_entropy(&rep, &g)? > rep.state().entropy());
//! # Ok(())
//! # }
//! ```

pub mod algebra;
pub mod bipartite;
pub mod commutant;
pub mod entropy;
pub mod error;
pub mod extremize;
pub mod gauge;
pub mod gns;
pub mod linalg;
pub mod modular;
pub mod scalar;
pub mod span;
pub mod tolerance;

pub use algebra::{
    canonical_matrix_units, random_unitary, random_unitary_with, AlgebraElement, AlgebraShape, FaithfulState,
    MatrixUnitSystem,
};
pub use bipartite::{oracle_suite, BipartiteModel, OracleFailure, OracleReport};
pub use error::{GnsError, Result};
pub use extremize::{extremize_entropy, fourier_gauge, ExtremizeOptions, ExtremizeResult};
pub use gauge::{
    apply_channel, entropy_gap, gauge_entropy, gauge_lambdas, gauge_projectors, restrict_to_b, rho_g,
    EntropyGap, EntropyReport, GaugeElement, GaugeProjectorFamily, KrausChannel,
};
pub use gns::{build_gns, GnsOperator, GnsRep};
pub use modular::{
    check_modular_flow, commutant, modular_data, polar_decompose, tomita_s, verify_gauge_commutant,
    AntilinearOp, ModularData,
};
pub use scalar::Real;
pub use span::OperatorSpan;

pub type Element64 = AlgebraElement<f64>;
pub type State64 = FaithfulState<f64>;
pub type GnsRep64 = GnsRep<f64>;
pub type ModularData64 = ModularData<f64>;

pub type Element32 = AlgebraElement<f32>;
pub type State32 = FaithfulState<f32>;
pub type GnsRep32 = GnsRep<f32>;

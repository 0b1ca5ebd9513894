//! Exact verification and stochastic simulation of the two-component
//! asymmetric simple exclusion process on `{-L+1, ..., L}`.
//!
//! The exact layer works over Laurent polynomials in `q^{1/2}` with rational
//! coefficients ([`QPoly`]); the numeric layer uses `f64`. Matrices,
//! measures and the generator are generic over the scalar ring.

pub mod cli;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod generator;
pub mod lattice;
pub mod measures;
pub mod qring;
pub mod qsym;
pub mod report;
pub mod scalar;
pub mod sparse;

pub use error::{Error, Result};
pub use generator::{ModelParams, Rates, Ring};
pub use lattice::{Config, Occ, Positions, Sector, Site, Species};
pub use qring::LaurentPoly;
pub use report::Report;
pub use sparse::{Basis, SparseOp};

/// Exact coefficient field.
pub type Rational = num_rational::BigRational;
/// Laurent polynomials in `q^{1/2}` over the rationals.
pub type QPoly = LaurentPoly<Rational>;
pub type ExactOp = SparseOp<QPoly>;
pub type FloatOp = SparseOp<f64>;

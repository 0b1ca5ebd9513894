use thiserror::Error;

use crate::lattice::Site;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial division leaves a nonzero remainder")]
    NonIntegralQuotient,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("coordinates overlap or repeat: {0}")]
    OverlappingCoordinates(String),
    #[error("bond ({0}, {0}+1) lies outside the lattice")]
    BondOutOfRange(Site),
    #[error("site {0} lies outside the lattice")]
    SiteOutOfRange(Site),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shock width is undefined for q = 1")]
    DegenerateWidth,
    #[error("uniformization did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("sum rule is not constant: {0}")]
    NotConstant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Exact arithmetic in Laurent polynomials of `q` and the q-combinatorics
//! built on it.

mod laurent;
mod qcomb;

pub use laurent::LaurentPoly;
pub use qcomb::{q_binomial, q_factorial, q_multinomial, q_number, rogers_szego_x, rogers_szego_y};

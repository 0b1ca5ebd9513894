//! Scalar abstractions shared by the exact and floating-point code paths.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, One, Zero};

/// Ring element usable as a sparse-matrix entry.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
        + Send
        + Sync
{
}

/// Coefficient field of a Laurent polynomial. Division must be exact
/// (rationals), otherwise `exact_div` reports a non-integral quotient.
pub trait Coefficient: Scalar + num_traits::Num {}

impl<T> Coefficient for T where T: Scalar + num_traits::Num {}

/// f32 or f64.
pub trait Real: Scalar + num_traits::Float + FromPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

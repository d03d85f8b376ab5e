//! Real scalar abstraction for the numeric core.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar the whole crate is generic over.
///
/// Implemented for `f32` and `f64`. The trait only aggregates `num_traits`
/// bounds plus the marker traits needed to share values across a rayon
/// worker pool.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into the working scalar type.
///
/// Panics only if the target type cannot represent ordinary literals,
/// which cannot happen for the provided impls.
#[inline]
pub fn fl<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal conversion")
}

//! Scalar abstraction used by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the whole crate is generic over.
///
/// Implemented for `f32` and `f64`; anything satisfying the bounds works.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + AddAssign + Debug + Display + Send + Sync + 'static
{
    /// Conversion from an `f64` literal. Every constant in this crate is
    /// representable in `f32`, so the conversion cannot fail in practice.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    /// Euler-Mascheroni constant.
    fn euler_gamma() -> Self {
        Self::c(0.577_215_664_901_532_9)
    }
}

impl Real for f32 {}
impl Real for f64 {}

//! Scalar abstraction shared by every numeric kernel in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the descriptor kernels are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + FftNum
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// Rounds `self` onto a grid of spacing `sqrt(epsilon) * scale`.
    ///
    /// Used to make comparisons between values that are equal in exact
    /// arithmetic independent of summation order.
    #[inline]
    fn snap(self, scale: Self) -> Self {
        let q = Self::epsilon().sqrt() * scale;
        if q <= Self::zero() {
            return self;
        }
        (self / q).round() * q
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

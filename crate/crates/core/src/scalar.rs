//! Floating-point abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar type the spectral machinery is generic over: `f32` or `f64`.
pub trait Scalar:
    FftNum + Float + FloatConst + FromPrimitive + ToPrimitive + Display + Debug + Default
{
    /// Lossy conversion from `f64`, used for literals and configuration values.
    fn of(x: f64) -> Self;

    /// Widening conversion used for file output and statistics.
    fn as_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

//! Scalar abstraction for the closed-form and numerical routines.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the analytic layer: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert")
    }

    /// Converts a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count must convert")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts decibels to a linear ratio.
pub fn db_to_linear<F: Real>(db: F) -> F {
    F::lit(10.0).powf(db / F::lit(10.0))
}

/// Converts a linear ratio to decibels.
pub fn linear_to_db<F: Real>(x: F) -> F {
    F::lit(10.0) * x.log10()
}

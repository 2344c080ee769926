//! Floating-point scalar abstraction shared by every solver in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Trapezoidal sum `Σ w_i f_i h` with halved end weights.
pub fn trapezoid<T: Real>(values: &[T], h: T) -> T {
    match values.len() {
        0 => T::zero(),
        1 => T::zero(),
        n => {
            let inner: T = values[1..n - 1].iter().copied().sum();
            (inner + T::lit(0.5) * (values[0] + values[n - 1])) * h
        }
    }
}

/// Trapezoidal quadrature weights for `n` uniformly spaced points.
pub fn trapezoid_weights<T: Real>(n: usize, h: T) -> Vec<T> {
    let mut w = vec![h; n];
    if n > 1 {
        w[0] = h * T::lit(0.5);
        w[n - 1] = h * T::lit(0.5);
    }
    w
}

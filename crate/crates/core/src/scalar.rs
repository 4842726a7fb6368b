//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the game algebra is written over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for algebraic identities of O(1) trigonometric quantities.
    fn identity_tol() -> Self;
    /// Tolerance for the Hermiticity gate on observables.
    fn hermitian_tol() -> Self;

    /// Converts an `f64` literal; panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn identity_tol() -> Self {
        1e-12
    }
    fn hermitian_tol() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn identity_tol() -> Self {
        1e-5
    }
    fn hermitian_tol() -> Self {
        1e-4
    }
}

/// Reduces an angle into `[0, period)`.
pub fn wrap<T: Scalar>(x: T, period: T) -> T {
    let r = x % period;
    let r = if r < T::zero() { r + period } else { r };
    // `r + period` can round up to exactly `period` for tiny negative `r`.
    if r >= period {
        T::zero()
    } else {
        r
    }
}

/// Signed distance `a - b` on a circle of the given period, in `(-period/2, period/2]`.
pub fn circular_diff<T: Scalar>(a: T, b: T, period: T) -> T {
    let half = period / T::lit(2.0);
    let d = wrap(a - b, period);
    if d > half {
        d - period
    } else {
        d
    }
}

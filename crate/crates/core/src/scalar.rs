//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Complex number over the working real type.
pub type C<T> = Complex<T>;

/// Real floating-point type the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in target float")
    }

    /// Converts a small integer.
    #[inline]
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in target float")
    }

    /// Tolerance stated for double precision, floored at a few ulps of the
    /// working type so single precision gets a usable threshold.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

#[inline]
pub(crate) fn im<T: Real>(x: T) -> C<T> {
    C::new(T::zero(), x)
}

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// Relative difference `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff<T: Real>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

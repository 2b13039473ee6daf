//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Floating-point scalar usable by the fields, energies and solvers.
///
/// Implemented for `f32` and `f64`. Note that `FftNum` pulls in
/// `num_traits::Signed`, so `abs`/`signum` must be called as
/// `Float::abs(x)` in generic code.
pub trait Real:
    Float + FloatConst + FftNum + Sum + Default + Display + LowerExp + FromStr + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FftNum + Sum + Default + Display + LowerExp + FromStr + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from(x).expect("f64 literal representable in target float")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from(n).expect("count representable in target float")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Tolerance for "exact" pointwise identities: `1e-12` in `f64`, a few
/// hundred ulps in narrower types.
#[inline]
pub fn tight_tol<T: Real>() -> T {
    Float::max(lit(1e-12), T::epsilon() * lit(256.0))
}

/// `x` wrapped into `(-π, π]`.
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut y = x - two_pi * ((x + T::PI()) / two_pi).floor();
    // y is now in [-π, π)
    if y <= -T::PI() {
        y = y + two_pi;
    }
    y
}

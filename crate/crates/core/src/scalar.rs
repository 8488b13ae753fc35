//! Scalar abstraction for amplitudes.
//!
//! Every state and operator in [`crate::qsim`] is generic over the real type
//! underlying its complex amplitudes. `f64` is what the games use; `f32` is
//! available for memory-bound experiments at a looser tolerance.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar backing the complex amplitudes of a [`crate::qsim::QuantumState`].
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Tolerance used for norm, trace and equality checks.
    const TOLERANCE: f64;

    fn from_f64_lossy(v: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f64 {
    const TOLERANCE: f64 = 1e-9;

    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    const TOLERANCE: f64 = 1e-4;

    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

#[inline]
pub(crate) fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Scalar>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn to_c64<T: Scalar>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

//! Scalar abstractions.
//!
//! Everything that only needs real arithmetic (quadrature, root finding,
//! the closed-form asymptotics, water-filling) is generic over [`Scalar`],
//! which is plain `num_traits`. Code that touches complex matrices also
//! needs nalgebra's `RealField`, bundled in [`Real`].
//!
//! Both traits expose methods such as `sqrt` and `abs`, so inside functions
//! bounded by [`Real`] scalar calls are spelled `Float::sqrt(x)`.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub trait Scalar:
    'static
    + Send
    + Sync
    + Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + LowerExp
{
    /// log2(e), the conversion factor between nats and bits.
    fn log2_e() -> Self {
        <Self as FloatConst>::LOG2_E()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Scalar usable as the real part of nalgebra complex matrices.
pub trait Real: Scalar + RealField + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

//! Scalar abstraction shared by the geometric and finite element kernels.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the discretization is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; exact for `f64`, rounded for `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A point or vector in the plane.
pub type Vec2<T> = [T; 2];

#[inline]
pub(crate) fn sub<T: Real>(a: Vec2<T>, b: Vec2<T>) -> Vec2<T> {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn dot<T: Real>(a: Vec2<T>, b: Vec2<T>) -> T {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn cross<T: Real>(a: Vec2<T>, b: Vec2<T>) -> T {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn norm<T: Real>(a: Vec2<T>) -> T {
    a[0].hypot(a[1])
}

/// Point on segment `a + t (b - a)`.
#[inline]
pub(crate) fn lerp<T: Real>(a: Vec2<T>, b: Vec2<T>, t: T) -> Vec2<T> {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Twice the signed area of `(a, b, c)`; positive for counter-clockwise order.
#[inline]
pub(crate) fn signed_area2<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> T {
    cross(sub(b, a), sub(c, a))
}

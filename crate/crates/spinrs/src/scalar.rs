//! Scalar abstraction: the whole library is generic over the real base
//! type through [`Real`], with complex arithmetic built on top of it.

use num_complex::Complex;

/// Real base scalar: f32 or f64.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over a real base type.
pub type Cx<R> = Complex<R>;

/// Convert an f64 constant into the generic real type.
#[inline]
pub fn r<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant not representable in scalar type")
}

/// Complex constant from f64 parts.
#[inline]
pub fn cx<R: Real>(re: f64, im: f64) -> Cx<R> {
    Complex::new(r(re), r(im))
}

/// Real constant lifted to a complex scalar.
#[inline]
pub fn re_cx<R: Real>(x: R) -> Cx<R> {
    Complex::new(x, R::zero())
}

//! Float math routed through std when available, libm otherwise.

#![allow(dead_code)]

macro_rules! unary {
    ($($name:ident),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline]
            pub(crate) fn $name(x: f64) -> f64 { f64::$name(x) }
            #[cfg(not(feature = "std"))]
            #[inline]
            pub(crate) fn $name(x: f64) -> f64 { libm::$name(x) }
        )*
    };
}

unary!(sqrt, exp, cos, sin, ceil);

#[cfg(feature = "std")]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    x.ln()
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    x.hypot(y)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    y.atan2(x)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    x.abs()
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn copysign(x: f64, sign: f64) -> f64 {
    x.copysign(sign)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn copysign(x: f64, sign: f64) -> f64 {
    libm::copysign(x, sign)
}

/// Integer power by squaring; exact for the small exponents used here.
#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

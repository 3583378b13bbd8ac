//! Modal analysis of the planar rotation system: linearizing
//! ẍ + (α/t)ẋ + A_{λ(t)}x = 0 with the rotation operator gives, at frozen t,
//! the characteristic roots
//!
//! ```text
//! θ±(t) = (α/2t)·(1 ± √(1 − (4t²/α²)·(λ(t)+i)/(1+λ(t)²)))
//! ```
//!
//! whose real parts decide decay. The classifier integrates Re θ₋ for index
//! growth λ(t) = t^p: a divergent integral means every mode is damped away
//! (convergence), a finite one leaves a surviving mode.
//!
//! Complex arithmetic lives on plain (re, im) pairs; the square root takes
//! the principal branch (cut on the negative real axis).

use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::schedule::ScheduleSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const fn new(re: f64, im: f64) -> Complex {
        Complex { re, im }
    }

    pub fn abs(self) -> f64 {
        math::hypot(self.re, self.im)
    }

    pub fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }

    pub fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }

    pub fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }

    pub fn scale(self, s: f64) -> Complex {
        Complex::new(s * self.re, s * self.im)
    }

    /// Robust complex division (scaled to avoid overflow in the denominator).
    pub fn div(self, o: Complex) -> Complex {
        let (a, b, c, d) = (self.re, self.im, o.re, o.im);
        if math::abs(c) >= math::abs(d) {
            let r = d / c;
            let den = c + d * r;
            Complex::new((a + b * r) / den, (b - a * r) / den)
        } else {
            let r = c / d;
            let den = c * r + d;
            Complex::new((a * r + b) / den, (b * r - a) / den)
        }
    }

    /// Principal square root: Re ≥ 0, branch cut along the negative reals.
    pub fn sqrt(self) -> Complex {
        if self.re == 0.0 && self.im == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        let r = self.abs();
        if self.re >= 0.0 {
            let u = math::sqrt(0.5 * (r + self.re));
            Complex::new(u, self.im / (2.0 * u))
        } else {
            let v = math::copysign(math::sqrt(0.5 * (r - self.re)), self.im);
            Complex::new(self.im / (2.0 * v), v)
        }
    }
}

/// The two characteristic roots at one time slice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair {
    pub theta_plus: Complex,
    pub theta_minus: Complex,
}

fn check_positive(name: &'static str, v: f64) -> Result<(), Error> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::bad_param(name, "must be finite and > 0"))
    }
}

/// (λ + i)/(1 + λ²): the product of the two roots.
fn root_product(lambda: f64) -> Complex {
    let d = 1.0 + lambda * lambda;
    Complex::new(lambda / d, 1.0 / d)
}

/// Characteristic roots of the rotation system at time t with index λ.
///
/// θ₊ carries the + sign of the square root; θ₋ is recovered from the
/// product identity θ₊·θ₋ = (λ+i)/(1+λ²), which is numerically stable
/// because |1 + √(...)| never cancels on the principal branch.
pub fn rotation_eigenvalues(t: f64, alpha: f64, lambda: f64) -> Result<EigenPair, Error> {
    check_positive("t", t)?;
    check_positive("alpha", alpha)?;
    check_positive("lambda", lambda)?;
    let p = root_product(lambda);
    let ratio = 4.0 * t * t / (alpha * alpha);
    let arg = Complex::new(1.0 - ratio * p.re, -ratio * p.im);
    let w = arg.sqrt();
    let half_trace = alpha / (2.0 * t);
    let theta_plus = Complex::new(1.0 + w.re, w.im).scale(half_trace);
    let theta_minus = p.div(theta_plus);
    Ok(EigenPair { theta_plus, theta_minus })
}

/// |θ² − (α/t)·θ + (λ+i)/(1+λ²)|, which is 0 at an exact root.
pub fn characteristic_residual(theta: Complex, t: f64, alpha: f64, lambda: f64) -> f64 {
    let p = root_product(lambda);
    theta.mul(theta).sub(theta.scale(alpha / t)).add(p).abs()
}

/// Verdict for index growth λ(t) = t^p.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateClass {
    /// ∫ Re θ₋ dt diverges: all modes damped.
    Convergent { integral_magnitude: f64 },
    /// p = 2 sits exactly on the threshold; convergence then depends on the
    /// parameter conditions of the quadratic schedule (λ = t² means
    /// ε = α² − 1).
    CriticalBoundary { compliant: bool },
    /// p > 2: θ₊ ~ t^(−1) but θ₋ ~ t^(−(p−1)) is integrable, so one mode
    /// survives.
    NonConvergent { theta_plus_exponent: f64, theta_minus_exponent: f64 },
}

const QUADRATURE_INTERVALS: usize = 4096;

/// Log-spaced trapezoid of ∫ Re θ₋(t) dt with λ(t) = t^p.
fn integral_re_theta_minus(p: f64, alpha: f64, a: f64, b: f64) -> Result<f64, Error> {
    let ua = math::ln(a);
    let ub = math::ln(b);
    let h = (ub - ua) / QUADRATURE_INTERVALS as f64;
    let mut total = 0.0;
    let mut prev = 0.0;
    for i in 0..=QUADRATURE_INTERVALS {
        let t = math::exp(ua + i as f64 * h);
        let lambda = math::powf(t, p).max(f64::MIN_POSITIVE);
        let pair = rotation_eigenvalues(t, alpha, lambda)?;
        let f = pair.theta_minus.re * t; // dt = t·du in log coordinates
        if i > 0 {
            total += 0.5 * (prev + f) * h;
        }
        prev = f;
    }
    Ok(total)
}

/// Classifies λ(t) ~ t^p for the rotation system.
///
/// p > 2 and p = 2 are decided analytically. For p < 2 the integral of
/// Re θ₋ over `t_range` is compared against the same integral on the first
/// half of the (log) range: a divergent integral keeps growing
/// (|I_full| ≥ 1.5·|I_half| and |I_full| ≥ 1), anything else is reported
/// inconclusive rather than guessed.
pub fn classify_rate(p: f64, alpha: f64, t_range: (f64, f64)) -> Result<RateClass, Error> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::bad_param("p", "exponent must be finite and >= 0"));
    }
    check_positive("alpha", alpha)?;
    let (a, b) = t_range;
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > a) {
        return Err(Error::bad_param("t_range", "need 0 < start < end"));
    }
    if p > 2.0 {
        return Ok(RateClass::NonConvergent {
            theta_plus_exponent: 1.0,
            theta_minus_exponent: p - 1.0,
        });
    }
    if p == 2.0 {
        let epsilon = alpha * alpha - 1.0;
        let compliant = alpha > 2.0 && epsilon > 2.0 / (alpha - 2.0);
        return Ok(RateClass::CriticalBoundary { compliant });
    }
    let full = integral_re_theta_minus(p, alpha, a, b)?;
    let half = integral_re_theta_minus(p, alpha, a, math::sqrt(a * b))?;
    if full.abs() >= 1.5 * half.abs() && full.abs() >= 1.0 {
        Ok(RateClass::Convergent { integral_magnitude: full.abs() })
    } else {
        Err(Error::Inconclusive("integral of Re θ₋ is not clearly divergent on this range"))
    }
}

/// (t, θ±) rows for plotting a schedule's modes over given times.
pub fn eigenvalue_table(
    alpha: f64,
    schedule: &ScheduleSpec,
    times: &[f64],
) -> Result<Vec<(f64, EigenPair)>, Error> {
    schedule.validate()?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        out.push((t, rotation_eigenvalues(t, alpha, schedule.lambda_at(t))?));
    }
    Ok(out)
}

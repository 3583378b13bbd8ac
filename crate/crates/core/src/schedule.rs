//! Regularization-index schedules λ(·) for the continuous flows, and the
//! external source terms f(·) they can be driven by.

use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg;
use crate::math;

/// How the Yosida index λ(t) evolves along a continuous run.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleSpec {
    /// λ(t) ≡ λ̄.
    Constant { lambda: f64 },
    /// λ(t) = (1+ε)·t²/α² — the quadratic growth that makes the inertial
    /// flow convergent (with α > 2 and ε > 2/(α−2)).
    QuadraticTime { alpha: f64, epsilon: f64 },
    /// λ(t) = c·t^p, for probing how fast the index may grow before the
    /// dynamics stop converging (t² is the critical size).
    PowerLaw { coefficient: f64, power: f64 },
}

impl ScheduleSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let positive = |name: &'static str, v: f64| -> Result<(), Error> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::bad_param(name, "must be finite and > 0"))
            }
        };
        match self {
            ScheduleSpec::Constant { lambda } => positive("lambda", *lambda),
            ScheduleSpec::QuadraticTime { alpha, epsilon } => {
                positive("alpha", *alpha)?;
                positive("epsilon", *epsilon)
            }
            ScheduleSpec::PowerLaw { coefficient, power } => {
                positive("coefficient", *coefficient)?;
                positive("power", *power)
            }
        }
    }

    pub fn lambda_at(&self, t: f64) -> f64 {
        match self {
            ScheduleSpec::Constant { lambda } => *lambda,
            ScheduleSpec::QuadraticTime { alpha, epsilon } => {
                (1.0 + epsilon) * t * t / (alpha * alpha)
            }
            ScheduleSpec::PowerLaw { coefficient, power } => coefficient * math::powf(t, *power),
        }
    }

    /// Whether the damping/regularization parameters meet the sufficient
    /// conditions for convergence of the inertial flow: quadratic-in-time
    /// growth with α > 2 and ε > 2/(α−2). Constant and power-law schedules
    /// are diagnostic tools and never flagged compliant.
    pub fn meets_convergence_conditions(&self) -> bool {
        match self {
            ScheduleSpec::QuadraticTime { alpha, epsilon } => {
                *alpha > 2.0 && *epsilon > 2.0 / (alpha - 2.0)
            }
            _ => false,
        }
    }
}

/// Forcing term f(t) on the right-hand side of the flow.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceTerm {
    None,
    /// f(t) = scale · t^(−decay) · direction, with ‖direction‖ = 1
    /// (normalized at validation).
    PowerDecay { scale: f64, decay: f64, direction: Vec<f64> },
    /// Sampled table, linearly interpolated between knots and held constant
    /// outside their range.
    Custom { times: Vec<f64>, values: Vec<Vec<f64>> },
}

impl SourceTerm {
    /// Checks shape/finiteness and normalizes the `PowerDecay` direction to
    /// unit length.
    pub fn validate(&mut self, dim: usize) -> Result<(), Error> {
        match self {
            SourceTerm::None => Ok(()),
            SourceTerm::PowerDecay { scale, decay, direction } => {
                if !scale.is_finite() || !decay.is_finite() || *decay <= 0.0 {
                    return Err(Error::bad_param(
                        "source",
                        "power-decay source needs finite scale and decay > 0",
                    ));
                }
                if direction.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: direction.len() });
                }
                let n = linalg::norm(direction);
                if !n.is_finite() || n == 0.0 {
                    return Err(Error::bad_param("source", "direction must be a nonzero vector"));
                }
                for c in direction.iter_mut() {
                    *c /= n;
                }
                Ok(())
            }
            SourceTerm::Custom { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::bad_param(
                        "source",
                        "custom source needs equally many times and values",
                    ));
                }
                if !times.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::bad_param("source", "custom source times must increase"));
                }
                for v in values.iter() {
                    if v.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
                    }
                    if !linalg::all_finite(v) {
                        return Err(Error::NonFinite("custom source value"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Whether the decay is fast enough for the perturbed convergence
    /// results: both ∫ t³‖f(t)‖² dt and ∫ t‖f(t)‖ dt finite, which for the
    /// power family means decay > 2. Only the parametric family admits an
    /// exact check; `Custom` is conservatively `false`.
    pub fn satisfies_integrability(&self) -> bool {
        match self {
            SourceTerm::None => true,
            SourceTerm::PowerDecay { scale, decay, .. } => *scale == 0.0 || *decay > 2.0,
            SourceTerm::Custom { .. } => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SourceTerm::None)
    }

    /// Evaluates f(t) into `out`.
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        match self {
            SourceTerm::None => out.fill(0.0),
            SourceTerm::PowerDecay { scale, decay, direction } => {
                let m = scale * math::powf(t, -*decay);
                for (o, d) in out.iter_mut().zip(direction) {
                    *o = m * d;
                }
            }
            SourceTerm::Custom { times, values } => {
                if t <= times[0] {
                    out.copy_from_slice(&values[0]);
                    return;
                }
                if t >= *times.last().expect("nonempty") {
                    out.copy_from_slice(values.last().expect("nonempty"));
                    return;
                }
                let hi = times.partition_point(|&s| s < t).max(1);
                let (t0, t1) = (times[hi - 1], times[hi]);
                let w = (t - t0) / (t1 - t0);
                for i in 0..out.len() {
                    out[i] = (1.0 - w) * values[hi - 1][i] + w * values[hi][i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_schedule_value_and_compliance() {
        let s = ScheduleSpec::QuadraticTime { alpha: 10.0, epsilon: 1.25 };
        assert_abs_diff_eq!(s.lambda_at(10.0), 2.25, epsilon = 1e-15);
        assert!(s.meets_convergence_conditions()); // 1.25 > 2/8
        let tight = ScheduleSpec::QuadraticTime { alpha: 10.0, epsilon: 0.1 };
        assert!(!tight.meets_convergence_conditions()); // 0.1 < 0.25
        assert!(!ScheduleSpec::Constant { lambda: 10.0 }.meets_convergence_conditions());
        assert!(!ScheduleSpec::PowerLaw { coefficient: 1.0, power: 2.0 }
            .meets_convergence_conditions());
    }

    #[test]
    fn power_law_value() {
        let s = ScheduleSpec::PowerLaw { coefficient: 2.0, power: 3.0 };
        assert_abs_diff_eq!(s.lambda_at(4.0), 128.0, epsilon = 1e-12);
        assert!(ScheduleSpec::Constant { lambda: 0.0 }.validate().is_err());
    }

    #[test]
    fn power_decay_source_normalizes_and_checks_integrability() {
        let mut src = SourceTerm::PowerDecay { scale: 1.0, decay: 3.0, direction: vec![2.0, 0.0] };
        src.validate(2).unwrap();
        let mut out = [0.0; 2];
        src.eval(2.0, &mut out);
        assert_abs_diff_eq!(out[0], 0.125, epsilon = 1e-15);
        assert_eq!(out[1], 0.0);
        assert!(src.satisfies_integrability());
        let slow = SourceTerm::PowerDecay { scale: 1.0, decay: 2.0, direction: vec![1.0] };
        assert!(!slow.satisfies_integrability());
    }

    #[test]
    fn custom_source_interpolates_and_clamps() {
        let mut src = SourceTerm::Custom {
            times: vec![0.0, 1.0, 3.0],
            values: vec![vec![0.0], vec![2.0], vec![4.0]],
        };
        src.validate(1).unwrap();
        let mut out = [0.0];
        src.eval(0.5, &mut out);
        assert_abs_diff_eq!(out[0], 1.0, epsilon = 1e-15);
        src.eval(2.0, &mut out);
        assert_abs_diff_eq!(out[0], 3.0, epsilon = 1e-15);
        src.eval(-5.0, &mut out);
        assert_eq!(out[0], 0.0);
        src.eval(9.0, &mut out);
        assert_eq!(out[0], 4.0);
        assert!(!src.satisfies_integrability());
    }
}

//! Explicit Runge–Kutta integrators: fixed-step classic RK4 and the
//! adaptive Dormand–Prince 5(4) pair with step-size control.
//!
//! Both drive an observer with every accepted step (including the initial
//! state and an exact landing on `t_end`); the observer can stop the run
//! early, which is how divergence cutoffs are enforced without the
//! integrator knowing about them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;

/// Right-hand side ẏ = F(t, y).
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), Error>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepperSpec {
    Rk4Fixed { dt: f64 },
    Rk45Adaptive { rtol: f64, atol: f64 },
}

impl StepperSpec {
    /// Adaptive integration at the tolerances used for all reference runs.
    pub fn default_adaptive() -> StepperSpec {
        StepperSpec::Rk45Adaptive { rtol: 1e-8, atol: 1e-10 }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self {
            StepperSpec::Rk4Fixed { dt } => {
                if !(dt.is_finite() && *dt > 0.0) {
                    return Err(Error::bad_param("dt", "fixed step must be finite and > 0"));
                }
            }
            StepperSpec::Rk45Adaptive { rtol, atol } => {
                if !(rtol.is_finite() && *rtol > 0.0 && atol.is_finite() && *atol > 0.0) {
                    return Err(Error::bad_param("tolerance", "rtol and atol must be > 0"));
                }
            }
        }
        Ok(())
    }
}

/// Observer verdict after each accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IntegrationStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    /// The observer stopped the run before `t_end`.
    pub stopped_early: bool,
    pub final_t: f64,
}

const MAX_ADAPTIVE_STEPS: usize = 50_000_000;

/// Integrates ẏ = F(t, y) from (t0, y0) to t_end, reporting every accepted
/// step to `observer` (first call is the initial state).
pub fn integrate<F, O>(
    field: &F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    method: &StepperSpec,
    observer: &mut O,
) -> Result<IntegrationStats, Error>
where
    F: VectorField + ?Sized,
    O: FnMut(f64, &[f64]) -> StepControl,
{
    method.validate()?;
    if !(t0.is_finite() && t_end.is_finite() && t_end > t0) {
        return Err(Error::bad_param("t_end", "need finite t0 < t_end"));
    }
    if y0.len() != field.dim() {
        return Err(Error::DimensionMismatch { expected: field.dim(), found: y0.len() });
    }
    let mut stats = IntegrationStats { final_t: t0, ..Default::default() };
    if observer(t0, y0) == StepControl::Stop {
        stats.stopped_early = true;
        return Ok(stats);
    }
    match *method {
        StepperSpec::Rk4Fixed { dt } => rk4_fixed(field, t0, t_end, y0, dt, observer, &mut stats)?,
        StepperSpec::Rk45Adaptive { rtol, atol } => {
            dp45(field, t0, t_end, y0, rtol, atol, observer, &mut stats)?
        }
    }
    Ok(stats)
}

fn rk4_fixed<F, O>(
    field: &F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    dt: f64,
    observer: &mut O,
    stats: &mut IntegrationStats,
) -> Result<(), Error>
where
    F: VectorField + ?Sized,
    O: FnMut(f64, &[f64]) -> StepControl,
{
    let span = t_end - t0;
    let steps = math::ceil(span / dt).max(1.0) as usize;
    let h = span / steps as f64;
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for step in 0..steps {
        let t = t0 + span * (step as f64 / steps as f64);
        field.eval(t, &y, &mut k1)?;
        stage(&y, &k1, 0.5 * h, &mut tmp);
        field.eval(t + 0.5 * h, &tmp, &mut k2)?;
        stage(&y, &k2, 0.5 * h, &mut tmp);
        field.eval(t + 0.5 * h, &tmp, &mut k3)?;
        stage(&y, &k3, h, &mut tmp);
        field.eval(t + h, &tmp, &mut k4)?;
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = if step + 1 == steps { t_end } else { t + h };
        stats.steps_accepted += 1;
        stats.final_t = t_next;
        if observer(t_next, &y) == StepControl::Stop {
            stats.stopped_early = true;
            return Ok(());
        }
    }
    Ok(())
}

fn stage(y: &[f64], k: &[f64], h: f64, out: &mut [f64]) {
    for i in 0..y.len() {
        out[i] = y[i] + h * k[i];
    }
}

// Dormand–Prince 5(4) coefficients.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order solution weights; the seventh stage is the FSAL evaluation at
// the new point, so A7 doubles as B5.
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// B5 − B4: weights of the embedded error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[allow(clippy::too_many_arguments)]
fn dp45<F, O>(
    field: &F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    rtol: f64,
    atol: f64,
    observer: &mut O,
    stats: &mut IntegrationStats,
) -> Result<(), Error>
where
    F: VectorField + ?Sized,
    O: FnMut(f64, &[f64]) -> StepControl,
{
    let n = y0.len();
    let span = t_end - t0;
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; n]).collect();
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    field.eval(t, &y, &mut k[0])?;
    let mut h = initial_step(t0, span, &y, &k[0], rtol, atol);
    let mut total = 0usize;
    while t_end - t > 1e-14 * span.abs() {
        total += 1;
        if total > MAX_ADAPTIVE_STEPS {
            return Err(Error::StepBudgetExceeded { t });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        let mut hit_end = false;
        if t + h >= t_end {
            h = t_end - t;
            hit_end = true;
        }
        // stages 2..=6
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in row.iter().enumerate() {
                    acc += a * k[j][i];
                }
                tmp[i] = y[i] + h * acc;
            }
            field.eval(t + C[s] * h, &tmp, &mut k[s + 1])?;
        }
        // fifth-order candidate and its FSAL stage
        for i in 0..n {
            let mut acc = 0.0;
            for (j, a) in A7.iter().enumerate() {
                acc += a * k[j][i];
            }
            y_new[i] = y[i] + h * acc;
        }
        field.eval(t + h, &y_new, &mut k[6])?;
        // scaled RMS error over the embedded difference
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, w) in E.iter().enumerate() {
                e += w * k[j][i];
            }
            let scale = atol + rtol * y[i].abs().max(y_new[i].abs());
            let r = h * e / scale;
            err_sq += r * r;
        }
        let err = math::sqrt(err_sq / n as f64);
        if err.is_finite() && err <= 1.0 {
            t = if hit_end { t_end } else { t + h };
            core::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6); // FSAL: last stage is the first of the next step
            stats.steps_accepted += 1;
            stats.final_t = t;
            if observer(t, &y) == StepControl::Stop {
                stats.stopped_early = true;
                return Ok(());
            }
        } else {
            stats.steps_rejected += 1;
        }
        let factor = if !err.is_finite() {
            0.2
        } else if err == 0.0 {
            5.0
        } else {
            (0.9 * math::powf(err, -0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(())
}

/// Conservative starting step from the scaled sizes of y and ẏ.
fn initial_step(t0: f64, span: f64, y: &[f64], dy: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = y.len() as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..y.len() {
        let scale = atol + rtol * y[i].abs();
        let a = y[i] / scale;
        let b = dy[i] / scale;
        d0 += a * a;
        d1 += b * b;
    }
    d0 = math::sqrt(d0 / n);
    d1 = math::sqrt(d1 / n);
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    h.min(span / 10.0).max(1e-12 * (t0.abs() + span))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Decay;
    impl VectorField for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, _t: f64, y: &[f64], out: &mut [f64]) -> Result<(), Error> {
            out[0] = -y[0];
            Ok(())
        }
    }

    struct Spin;
    impl VectorField for Spin {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, _t: f64, y: &[f64], out: &mut [f64]) -> Result<(), Error> {
            out[0] = y[1];
            out[1] = -y[0];
            Ok(())
        }
    }

    fn endpoint<F: VectorField>(f: &F, spec: StepperSpec, t1: f64, y0: &[f64]) -> Vec<f64> {
        let mut last = y0.to_vec();
        integrate(f, 0.0, t1, y0, &spec, &mut |_, y| {
            last.copy_from_slice(y);
            StepControl::Continue
        })
        .unwrap();
        last
    }

    #[test]
    fn exponential_decay_both_methods() {
        let y = endpoint(&Decay, StepperSpec::Rk4Fixed { dt: 0.01 }, 3.0, &[1.0]);
        assert_abs_diff_eq!(y[0], (-3.0_f64).exp(), epsilon = 1e-9);
        let y = endpoint(&Decay, StepperSpec::default_adaptive(), 3.0, &[1.0]);
        assert_abs_diff_eq!(y[0], (-3.0_f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let exact = (-2.0_f64).exp();
        let e1 = (endpoint(&Decay, StepperSpec::Rk4Fixed { dt: 0.1 }, 2.0, &[1.0])[0] - exact).abs();
        let e2 =
            (endpoint(&Decay, StepperSpec::Rk4Fixed { dt: 0.05 }, 2.0, &[1.0])[0] - exact).abs();
        assert!(e1 / e2 > 12.0, "error ratio {} too small for order 4", e1 / e2);
    }

    #[test]
    fn adaptive_conserves_oscillator_norm() {
        let y = endpoint(&Spin, StepperSpec::default_adaptive(), 50.0, &[1.0, 0.0]);
        let norm = math::hypot(y[0], y[1]);
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn lands_exactly_on_t_end() {
        for spec in [StepperSpec::Rk4Fixed { dt: 0.3 }, StepperSpec::default_adaptive()] {
            let mut last_t = 0.0;
            integrate(&Decay, 0.0, 1.0, &[1.0], &spec, &mut |t, _| {
                last_t = t;
                StepControl::Continue
            })
            .unwrap();
            assert_eq!(last_t, 1.0);
        }
    }

    #[test]
    fn observer_stop_truncates() {
        let stats = integrate(
            &Decay,
            0.0,
            10.0,
            &[1.0],
            &StepperSpec::Rk4Fixed { dt: 0.1 },
            &mut |t, _| if t >= 1.0 { StepControl::Stop } else { StepControl::Continue },
        )
        .unwrap();
        assert!(stats.stopped_early);
        assert!(stats.final_t < 1.2);
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(integrate(&Decay, 0.0, -1.0, &[1.0], &StepperSpec::default_adaptive(), &mut |_, _| {
            StepControl::Continue
        })
        .is_err());
        assert!(StepperSpec::Rk4Fixed { dt: 0.0 }.validate().is_err());
        assert!(StepperSpec::Rk45Adaptive { rtol: 0.0, atol: 1e-10 }.validate().is_err());
    }
}

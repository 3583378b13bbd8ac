//! Continuous-time flows around a maximally monotone operator A:
//!
//! * the damped inertial system ẍ + (α/t)ẋ + A_{λ(t)}(x) = f(t), integrated
//!   through its phase-space reduction (u, v) = (x, ẋ);
//! * the first-order flows ẋ = −A_{λ(t)}(x) and ẋ = −A(x) used as reference
//!   runs and cross-checks.
//!
//! "Raw" means the operator is applied directly instead of through its
//! Yosida regularization; that is only defined for single-valued operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg;
use crate::ode::{integrate, StepControl, StepperSpec, VectorField};
use crate::operator::ResolventOracle;
use crate::schedule::{ScheduleSpec, SourceTerm};
use crate::trajectory::{IndexKind, Sample, Trajectory, DIVERGENCE_CUTOFF};

/// Which field the right-hand side applies to the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    /// `A_{λ(t)}` with λ taken from the schedule.
    Regularized,
    /// The operator itself; rejected for set-valued operators.
    Raw,
}

/// Full description of a second-order run.
#[derive(Clone, Debug)]
pub struct ContinuousConfig {
    pub alpha: f64,
    pub schedule: ScheduleSpec,
    pub t0: f64,
    pub t_end: f64,
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
    pub source: SourceTerm,
    pub integrator: StepperSpec,
    /// Record every n-th accepted step (the initial state and the endpoint
    /// are always recorded).
    pub sample_stride: usize,
}

impl ContinuousConfig {
    /// Checks every field and normalizes the source direction in place.
    pub fn validate(&mut self) -> Result<(), Error> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::bad_param("alpha", "must be finite and > 0"));
        }
        // The α/t damping is singular at t = 0.
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::bad_param("t0", "must be finite and > 0"));
        }
        if !(self.t_end.is_finite() && self.t_end > self.t0) {
            return Err(Error::bad_param("t_end", "must be finite and > t0"));
        }
        if self.x0.is_empty() || !linalg::all_finite(&self.x0) {
            return Err(Error::bad_param("x0", "must be non-empty and finite"));
        }
        if self.v0.len() != self.x0.len() {
            return Err(Error::DimensionMismatch { expected: self.x0.len(), found: self.v0.len() });
        }
        if !linalg::all_finite(&self.v0) {
            return Err(Error::NonFinite("v0"));
        }
        if self.sample_stride == 0 {
            return Err(Error::bad_param("sample_stride", "must be >= 1"));
        }
        self.schedule.validate()?;
        self.source.validate(self.x0.len())?;
        self.integrator.validate()
    }
}

/// Description of a first-order run; `schedule: None` selects the raw flow
/// ẋ = −A(x).
#[derive(Clone, Debug)]
pub struct FirstOrderConfig {
    pub schedule: Option<ScheduleSpec>,
    pub t0: f64,
    pub t_end: f64,
    pub x0: Vec<f64>,
    pub integrator: StepperSpec,
    pub sample_stride: usize,
}

impl FirstOrderConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::bad_param("t0", "must be finite and > 0"));
        }
        if !(self.t_end.is_finite() && self.t_end > self.t0) {
            return Err(Error::bad_param("t_end", "must be finite and > t0"));
        }
        if self.x0.is_empty() || !linalg::all_finite(&self.x0) {
            return Err(Error::bad_param("x0", "must be non-empty and finite"));
        }
        if self.sample_stride == 0 {
            return Err(Error::bad_param("sample_stride", "must be >= 1"));
        }
        if let Some(s) = &self.schedule {
            s.validate()?;
        }
        self.integrator.validate()
    }
}

/// Phase-space right-hand side
/// F(t, (u, v)) = (v, −(α/t)·v − A_{λ(t)}(u) + f(t)).
pub struct PhaseField<'a> {
    op: &'a dyn ResolventOracle,
    alpha: f64,
    schedule: Option<ScheduleSpec>,
    source: SourceTerm,
    n: usize,
}

impl<'a> PhaseField<'a> {
    fn operator_value(&self, t: f64, u: &[f64]) -> Result<Vec<f64>, Error> {
        match &self.schedule {
            Some(s) => self.op.yosida(s.lambda_at(t), u),
            None => self.op.apply_raw(u),
        }
    }
}

impl VectorField for PhaseField<'_> {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), Error> {
        let (u, v) = y.split_at(self.n);
        let a = self.operator_value(t, u)?;
        let damp = self.alpha / t;
        let (ou, ov) = out.split_at_mut(self.n);
        ou.copy_from_slice(v);
        for i in 0..self.n {
            ov[i] = -damp * v[i] - a[i];
        }
        if !self.source.is_zero() {
            let mut f = vec![0.0; self.n];
            self.source.eval(t, &mut f);
            for i in 0..self.n {
                ov[i] += f[i];
            }
        }
        Ok(())
    }
}

/// Builds the phase-space field for a second-order run. Costs one operator
/// evaluation per call; fails immediately if `Raw` is requested on a
/// set-valued operator.
pub fn reduce_to_first_order<'a>(
    op: &'a dyn ResolventOracle,
    config: &ContinuousConfig,
    kind: FieldKind,
) -> Result<PhaseField<'a>, Error> {
    let n = config.x0.len();
    if op.dimension() != n {
        return Err(Error::DimensionMismatch { expected: op.dimension(), found: n });
    }
    let schedule = match kind {
        FieldKind::Regularized => Some(config.schedule.clone()),
        FieldKind::Raw => {
            ensure_single_valued(op)?;
            None
        }
    };
    Ok(PhaseField { op, alpha: config.alpha, schedule, source: config.source.clone(), n })
}

/// First-order right-hand side ẋ = −A_{λ(t)}(x) (or −A(x) when raw).
struct FlowField<'a> {
    op: &'a dyn ResolventOracle,
    schedule: Option<ScheduleSpec>,
    n: usize,
}

impl VectorField for FlowField<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), Error> {
        let a = match &self.schedule {
            Some(s) => self.op.yosida(s.lambda_at(t), y)?,
            None => self.op.apply_raw(y)?,
        };
        for i in 0..self.n {
            out[i] = -a[i];
        }
        Ok(())
    }
}

fn ensure_single_valued(op: &dyn ResolventOracle) -> Result<(), Error> {
    let probe = vec![0.0; op.dimension()];
    op.apply_raw(&probe).map(|_| ())
}

/// Shared sampling observer: records every stride-th accepted step plus the
/// initial state and the endpoint, stops the run past the divergence cutoff
/// or on a non-finite state.
struct Recorder<'a> {
    traj: &'a mut Trajectory,
    op: &'a dyn ResolventOracle,
    schedule: Option<&'a ScheduleSpec>,
    stride: usize,
    t_end: f64,
    calls: usize,
    /// Sample `x` is the leading `dim` entries of the state; a trailing
    /// velocity block follows for phase-space states.
    has_velocity_block: bool,
}

impl Recorder<'_> {
    fn observe(&mut self, t: f64, y: &[f64]) -> StepControl {
        let n = self.traj.dim;
        let idx = self.calls;
        self.calls += 1;
        let u = &y[..n];
        let finite = linalg::all_finite(y);
        let danger = !finite || linalg::norm(u) > DIVERGENCE_CUTOFF;
        let due = danger || idx % self.stride == 0 || t == self.t_end;
        if due {
            self.push_sample(t, y, finite);
        }
        if danger {
            self.traj.truncated = true;
            return StepControl::Stop;
        }
        StepControl::Continue
    }

    fn push_sample(&mut self, t: f64, y: &[f64], finite: bool) {
        let n = self.traj.dim;
        let u = &y[..n];
        let (lambda, value) = if finite {
            match self.schedule {
                Some(s) => {
                    let l = s.lambda_at(t);
                    (l, self.op.yosida(l, u).ok())
                }
                None => (0.0, self.op.apply_raw(u).ok()),
            }
        } else {
            (if let Some(s) = self.schedule { s.lambda_at(t) } else { 0.0 }, None)
        };
        let yosida_norm = value.as_ref().map_or(f64::NAN, |a| linalg::norm(a));
        if value.is_none() {
            self.traj.truncated = true;
        }
        let velocity = if self.has_velocity_block {
            y[n..].to_vec()
        } else {
            // First-order runs store ẋ = −A_{λ(t)}(x) as the velocity.
            value.map_or(vec![f64::NAN; n], |a| a.iter().map(|ai| -ai).collect())
        };
        self.traj.push(Sample { index: t, x: u.to_vec(), velocity, lambda, yosida_norm });
    }
}

/// Integrates ẍ + (α/t)ẋ + A_{λ(t)}(x) = f(t) from (x0, v0) on [t0, t_end].
pub fn simulate_second_order(
    op: &dyn ResolventOracle,
    config: &ContinuousConfig,
    kind: FieldKind,
) -> Result<Trajectory, Error> {
    let mut config = config.clone();
    config.validate()?;
    let field = reduce_to_first_order(op, &config, kind)?;
    let n = config.x0.len();
    let mut y0 = Vec::with_capacity(2 * n);
    y0.extend_from_slice(&config.x0);
    y0.extend_from_slice(&config.v0);
    let mut traj = Trajectory::new(IndexKind::ContinuousTime, n);
    let mut rec = Recorder {
        traj: &mut traj,
        op,
        schedule: field.schedule.as_ref(),
        stride: config.sample_stride,
        t_end: config.t_end,
        calls: 0,
        has_velocity_block: true,
    };
    integrate(&field, config.t0, config.t_end, &y0, &config.integrator, &mut |t, y| {
        rec.observe(t, y)
    })?;
    Ok(traj)
}

/// Integrates ẋ = −A_{λ(t)}(x) (schedule given) or ẋ = −A(x) (raw) on
/// [t0, t_end].
pub fn simulate_first_order(
    op: &dyn ResolventOracle,
    config: &FirstOrderConfig,
) -> Result<Trajectory, Error> {
    config.validate()?;
    let n = config.x0.len();
    if op.dimension() != n {
        return Err(Error::DimensionMismatch { expected: op.dimension(), found: n });
    }
    if config.schedule.is_none() {
        ensure_single_valued(op)?;
    }
    let field = FlowField { op, schedule: config.schedule.clone(), n };
    let mut traj = Trajectory::new(IndexKind::ContinuousTime, n);
    let mut rec = Recorder {
        traj: &mut traj,
        op,
        schedule: field.schedule.as_ref(),
        stride: config.sample_stride,
        t_end: config.t_end,
        calls: 0,
        has_velocity_block: false,
    };
    integrate(&field, config.t0, config.t_end, &config.x0, &config.integrator, &mut |t, y| {
        rec.observe(t, y)
    })?;
    Ok(traj)
}

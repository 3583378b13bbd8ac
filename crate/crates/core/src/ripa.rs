//! The regularized inertial proximal algorithm (RIPA), its externally
//! perturbed variant, and the classical inertial proximal method.
//!
//! One iteration with momentum coefficient 1 − α/k (used verbatim, negative
//! for k < α):
//!
//! ```text
//! y_k     = x_k + (1 − α/k)(x_k − x_{k−1})
//! w_k     = y_k + s·f_k
//! x_{k+1} = (λ_k/(λ_k+s))·w_k + (s/(λ_k+s))·J_{(λ_k+s)A}(w_k)
//! ```
//!
//! which is algebraically the same point as w_k − s·A_{λ_k+s}(w_k); debug
//! builds assert the two forms agree at every step. The classical method
//! replaces the combination by x_{k+1} = J_{sA}(y_k).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg;
use crate::math;
use crate::operator::ResolventOracle;
use crate::trajectory::{IndexKind, Sample, Trajectory, DIVERGENCE_CUTOFF};

/// Regularization index sequence λ_k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiscreteScheduleKind {
    /// λ_k = (1+ε)·(s/α²)·k²
    RipaStandard,
    /// λ_k = (1+s/2+ε)·(2s/α²)·k², the growth used with perturbations
    RipaPerturbed,
    /// λ_k ≡ λ̄
    ConstantLambda { lambda: f64 },
    /// No regularization: x_{k+1} = J_{sA}(y_k)
    ClassicalUnregularized,
}

/// Per-iteration additive error term f_k.
#[derive(Clone, Debug, PartialEq)]
pub enum PerturbationSpec {
    None,
    /// f_k = scale·k^(−decay)·direction with ‖direction‖ = 1
    PowerDecay { scale: f64, decay: f64, direction: Vec<f64> },
}

impl PerturbationSpec {
    /// Checks parameters and normalizes the direction in place.
    pub fn validate(&mut self, dim: usize) -> Result<(), Error> {
        match self {
            PerturbationSpec::None => Ok(()),
            PerturbationSpec::PowerDecay { scale, decay, direction } => {
                if !scale.is_finite() || !decay.is_finite() {
                    return Err(Error::NonFinite("perturbation parameters"));
                }
                if direction.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: direction.len() });
                }
                let norm = linalg::norm(direction);
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(Error::bad_param("direction", "must be finite and nonzero"));
                }
                for d in direction.iter_mut() {
                    *d /= norm;
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PerturbationSpec::None)
            || matches!(self, PerturbationSpec::PowerDecay { scale, .. } if *scale == 0.0)
    }

    /// Both ∑k‖f_k‖ < ∞ and ∑k³‖f_k‖² < ∞; for power decay each reduces to
    /// decay > 2.
    pub fn satisfies_summability(&self) -> bool {
        match self {
            PerturbationSpec::None => true,
            PerturbationSpec::PowerDecay { scale, decay, .. } => *scale == 0.0 || *decay > 2.0,
        }
    }

    fn eval(&self, k: usize, out: &mut [f64]) {
        match self {
            PerturbationSpec::None => out.fill(0.0),
            PerturbationSpec::PowerDecay { scale, decay, direction } => {
                let a = scale * math::powf(k as f64, -decay);
                for (o, d) in out.iter_mut().zip(direction) {
                    *o = a * d;
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiscreteConfig {
    /// Damping parameter; the inertial analysis needs α > 2.
    pub alpha: f64,
    /// Step size s > 0 (the square of the underlying time step).
    pub s: f64,
    pub epsilon: f64,
    pub schedule: DiscreteScheduleKind,
    pub max_iters: usize,
    pub perturbation: PerturbationSpec,
    pub x0: Vec<f64>,
    /// Previous iterate x_{−1}; set equal to x0 for zero initial velocity.
    pub x_minus1: Vec<f64>,
    /// Stop once k·‖x_k − x_{k−1}‖ drops below this (checked from k = 2).
    pub early_exit_scaled_tol: Option<f64>,
}

impl DiscreteConfig {
    pub fn validate(&mut self) -> Result<(), Error> {
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(Error::bad_param("alpha", "must be finite and > 2"));
        }
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(Error::bad_param("s", "step must be finite and > 0"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::bad_param("epsilon", "must be finite and > 0"));
        }
        if self.max_iters == 0 {
            return Err(Error::bad_param("max_iters", "must be >= 1"));
        }
        if self.x0.is_empty() || !linalg::all_finite(&self.x0) {
            return Err(Error::bad_param("x0", "must be non-empty and finite"));
        }
        if self.x_minus1.len() != self.x0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x0.len(),
                found: self.x_minus1.len(),
            });
        }
        if !linalg::all_finite(&self.x_minus1) {
            return Err(Error::NonFinite("x_minus1"));
        }
        if let DiscreteScheduleKind::ConstantLambda { lambda } = self.schedule {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Error::bad_param("lambda", "constant index must be > 0"));
            }
        }
        if matches!(self.schedule, DiscreteScheduleKind::ClassicalUnregularized)
            && !matches!(self.perturbation, PerturbationSpec::None)
        {
            return Err(Error::bad_param(
                "perturbation",
                "not defined for the classical method",
            ));
        }
        if let Some(tol) = self.early_exit_scaled_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::bad_param("early_exit_scaled_tol", "must be > 0"));
            }
        }
        self.perturbation.validate(self.x0.len())
    }

    pub fn lambda_k(&self, k: usize) -> f64 {
        let kf = k as f64;
        let a2 = self.alpha * self.alpha;
        match self.schedule {
            DiscreteScheduleKind::RipaStandard => (1.0 + self.epsilon) * (self.s / a2) * kf * kf,
            DiscreteScheduleKind::RipaPerturbed => {
                (1.0 + self.s / 2.0 + self.epsilon) * (2.0 * self.s / a2) * kf * kf
            }
            DiscreteScheduleKind::ConstantLambda { lambda } => lambda,
            DiscreteScheduleKind::ClassicalUnregularized => 0.0,
        }
    }

    /// Whether this run is covered by the convergence analysis: the quadratic
    /// index growth with a sufficiently large ε, and (for the perturbed
    /// variant) a summable perturbation.
    pub fn meets_convergence_conditions(&self) -> bool {
        let margin = 2.0 / (self.alpha - 2.0);
        match self.schedule {
            DiscreteScheduleKind::RipaStandard => self.epsilon > margin,
            DiscreteScheduleKind::RipaPerturbed => {
                self.epsilon > (2.0 + self.s) / (self.alpha - 2.0)
                    && self.perturbation.satisfies_summability()
            }
            _ => false,
        }
    }
}

/// The rolling state of a run; `y_k` and `residual` describe the most recent
/// completed step.
#[derive(Clone, Debug)]
pub struct IterationState {
    pub k: usize,
    pub x_k: Vec<f64>,
    pub x_km1: Vec<f64>,
    pub y_k: Option<Vec<f64>>,
    /// A_{λ_k+s}(w_k) from the step that produced the current x_k.
    pub residual: Option<Vec<f64>>,
}

impl IterationState {
    pub fn initial(config: &DiscreteConfig) -> IterationState {
        IterationState {
            k: 1,
            x_k: config.x0.clone(),
            x_km1: config.x_minus1.clone(),
            y_k: None,
            residual: None,
        }
    }
}

struct StepEval {
    y: Vec<f64>,
    lambda: f64,
    residual: Vec<f64>,
    x_next: Vec<f64>,
}

fn extrapolate(alpha: f64, k: usize, x_k: &[f64], x_km1: &[f64]) -> Vec<f64> {
    let gamma = 1.0 - alpha / k as f64;
    x_k.iter().zip(x_km1).map(|(a, b)| a + gamma * (a - b)).collect()
}

fn eval_step(
    op: &dyn ResolventOracle,
    config: &DiscreteConfig,
    k: usize,
    x_k: &[f64],
    x_km1: &[f64],
) -> Result<StepEval, Error> {
    let y = extrapolate(config.alpha, k, x_k, x_km1);
    if matches!(config.schedule, DiscreteScheduleKind::ClassicalUnregularized) {
        let x_next = op.resolvent(config.s, &y)?;
        let inv = 1.0 / config.s;
        let residual = y.iter().zip(&x_next).map(|(a, b)| (a - b) * inv).collect();
        return Ok(StepEval { y, lambda: 0.0, residual, x_next });
    }
    let mut w = y.clone();
    if !config.perturbation.is_zero() {
        let mut f = vec![0.0; w.len()];
        config.perturbation.eval(k, &mut f);
        for (wi, fi) in w.iter_mut().zip(&f) {
            *wi += config.s * fi;
        }
    }
    let lambda = config.lambda_k(k);
    let total = lambda + config.s;
    let j = op.resolvent(total, &w)?;
    // Convex combination written as w + c·(J − w): a point the resolvent
    // fixes stays bit-exact instead of drifting one ulp per iteration.
    let cj = config.s / total;
    let x_next: Vec<f64> = w.iter().zip(&j).map(|(wi, ji)| wi + cj * (ji - wi)).collect();
    let inv = 1.0 / total;
    let residual: Vec<f64> = w.iter().zip(&j).map(|(wi, ji)| (wi - ji) * inv).collect();
    #[cfg(debug_assertions)]
    {
        // The forward form w − s·A_{λ+s}(w) must land on the same point.
        let a = op.yosida(total, &w)?;
        let mut dev: f64 = 0.0;
        for i in 0..w.len() {
            dev = dev.max((w[i] - config.s * a[i] - x_next[i]).abs());
        }
        debug_assert!(
            dev <= 1e-12 * (1.0 + linalg::norm(&w)),
            "update forms disagree by {dev:e} at k = {k}"
        );
    }
    Ok(StepEval { y, lambda, residual, x_next })
}

fn advance(state: &IterationState, eval: StepEval) -> IterationState {
    IterationState {
        k: state.k + 1,
        x_k: eval.x_next,
        x_km1: state.x_k.clone(),
        y_k: Some(eval.y),
        residual: Some(eval.residual),
    }
}

/// One regularized step; use [`classical_step`] for the unregularized method.
pub fn ripa_step(
    op: &dyn ResolventOracle,
    state: &IterationState,
    config: &DiscreteConfig,
) -> Result<IterationState, Error> {
    if matches!(config.schedule, DiscreteScheduleKind::ClassicalUnregularized) {
        return Err(Error::bad_param("schedule", "classical kind needs classical_step"));
    }
    Ok(advance(state, eval_step(op, config, state.k, &state.x_k, &state.x_km1)?))
}

/// One step of the classical inertial proximal method x_{k+1} = J_{sA}(y_k);
/// only α and s are read from the config.
pub fn classical_step(
    op: &dyn ResolventOracle,
    state: &IterationState,
    config: &DiscreteConfig,
) -> Result<IterationState, Error> {
    let y = extrapolate(config.alpha, state.k, &state.x_k, &state.x_km1);
    let x_next = op.resolvent(config.s, &y)?;
    let inv = 1.0 / config.s;
    let residual = y.iter().zip(&x_next).map(|(a, b)| (a - b) * inv).collect();
    Ok(advance(state, StepEval { y, lambda: 0.0, residual, x_next }))
}

/// Run-level tallies of the quantities the convergence analysis bounds.
#[derive(Clone, Copy, Debug, Default)]
pub struct RipaRunReport {
    /// sup over recorded k of k·‖x_k − x_{k−1}‖
    pub sup_scaled_speed: f64,
    /// ∑ k·‖x_k − x_{k−1}‖²
    pub sum_scaled_speed_sq: f64,
    /// ∑ k·λ_k·‖A_{λ_k+s}(w_k)‖²
    pub sum_weighted_residual_sq: f64,
    pub early_exit_at: Option<usize>,
    pub diverged: bool,
}

/// Iterates from (x0, x_{−1}) and records every k: the trajectory sample at
/// index k carries x_k, the difference x_k − x_{k−1} in the velocity slot,
/// λ_k, and ‖A_{λ_k+s}(w_k)‖ from the step taken at k (the last iteration
/// evaluates its step without advancing, so the column is total).
pub fn run(
    op: &dyn ResolventOracle,
    config: &DiscreteConfig,
) -> Result<(Trajectory, RipaRunReport), Error> {
    let mut config = config.clone();
    config.validate()?;
    let n = config.x0.len();
    if op.dimension() != n {
        return Err(Error::DimensionMismatch { expected: op.dimension(), found: n });
    }
    let classical = matches!(config.schedule, DiscreteScheduleKind::ClassicalUnregularized);
    let mut traj = Trajectory::new(IndexKind::IterationCount, n);
    let mut report = RipaRunReport::default();
    let mut state = IterationState::initial(&config);
    for k in 1..=config.max_iters {
        let kf = k as f64;
        let delta: Vec<f64> = state.x_k.iter().zip(&state.x_km1).map(|(a, b)| a - b).collect();
        if !linalg::all_finite(&state.x_k) || linalg::norm(&state.x_k) > DIVERGENCE_CUTOFF {
            traj.push(Sample {
                index: kf,
                x: state.x_k.clone(),
                velocity: delta,
                lambda: config.lambda_k(k),
                yosida_norm: f64::NAN,
            });
            traj.truncated = true;
            break;
        }
        let eval = eval_step_dispatch(op, &config, classical, k, &state)?;
        let dx = linalg::norm(&delta);
        let res = linalg::norm(&eval.residual);
        traj.push(Sample {
            index: kf,
            x: state.x_k.clone(),
            velocity: delta,
            lambda: eval.lambda,
            yosida_norm: res,
        });
        report.sup_scaled_speed = report.sup_scaled_speed.max(kf * dx);
        report.sum_scaled_speed_sq += kf * dx * dx;
        report.sum_weighted_residual_sq += kf * eval.lambda * res * res;
        if k >= 2 {
            if let Some(tol) = config.early_exit_scaled_tol {
                if kf * dx < tol {
                    report.early_exit_at = Some(k);
                    break;
                }
            }
        }
        if k < config.max_iters {
            state = advance(&state, eval);
        }
    }
    report.diverged = traj.diverged;
    Ok((traj, report))
}

fn eval_step_dispatch(
    op: &dyn ResolventOracle,
    config: &DiscreteConfig,
    classical: bool,
    k: usize,
    state: &IterationState,
) -> Result<StepEval, Error> {
    if classical {
        let y = extrapolate(config.alpha, k, &state.x_k, &state.x_km1);
        let x_next = op.resolvent(config.s, &y)?;
        let inv = 1.0 / config.s;
        let residual = y.iter().zip(&x_next).map(|(a, b)| (a - b) * inv).collect();
        Ok(StepEval { y, lambda: 0.0, residual, x_next })
    } else {
        eval_step(op, config, k, &state.x_k, &state.x_km1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::OperatorSpec;
    use approx::assert_abs_diff_eq;

    fn cfg(alpha: f64, s: f64, epsilon: f64, x0: Vec<f64>) -> DiscreteConfig {
        let xm = x0.clone();
        DiscreteConfig {
            alpha,
            s,
            epsilon,
            schedule: DiscreteScheduleKind::RipaStandard,
            max_iters: 50,
            perturbation: PerturbationSpec::None,
            x0,
            x_minus1: xm,
            early_exit_scaled_tol: None,
        }
    }

    #[test]
    fn rotation_step_hand_checked() {
        // α=4 makes the momentum coefficient vanish at k=4, so y = x and
        // λ_4 = 3, λ_4 + s = 4, J_4(1,0) = (1/17, −4/17).
        let op = OperatorSpec::rotation2d();
        let c = cfg(4.0, 1.0, 2.0, vec![1.0, 0.0]);
        let state = IterationState {
            k: 4,
            x_k: vec![1.0, 0.0],
            x_km1: vec![0.3, 0.7],
            y_k: None,
            residual: None,
        };
        let next = ripa_step(&op, &state, &c).unwrap();
        assert_eq!(next.k, 5);
        assert_abs_diff_eq!(next.x_k[0], 13.0 / 17.0, epsilon = 1e-15);
        assert_abs_diff_eq!(next.x_k[1], -1.0 / 17.0, epsilon = 1e-15);
        assert_eq!(next.y_k.as_deref(), Some(&[1.0, 0.0][..]));
    }

    #[test]
    fn zero_operator_step_is_pure_extrapolation() {
        let op = OperatorSpec::zero(2);
        let c = cfg(10.0, 1.0, 1.25, vec![2.0, -1.0]);
        let state = IterationState {
            k: 3,
            x_k: vec![2.0, -1.0],
            x_km1: vec![1.0, 1.0],
            y_k: None,
            residual: None,
        };
        let next = ripa_step(&op, &state, &c).unwrap();
        // y = x + (1 − 10/3)(x − x_prev)
        let g = 1.0 - 10.0 / 3.0;
        for i in 0..2 {
            let y = state.x_k[i] + g * (state.x_k[i] - state.x_km1[i]);
            assert_abs_diff_eq!(next.x_k[i], y, epsilon = 1e-14);
        }
    }

    #[test]
    fn perturbation_shifts_zero_operator_step() {
        let op = OperatorSpec::zero(2);
        let mut c = cfg(4.0, 1.0, 2.0, vec![1.0, 1.0]);
        c.perturbation =
            PerturbationSpec::PowerDecay { scale: 1.0, decay: 3.0, direction: vec![1.0, 0.0] };
        c.validate().unwrap();
        let state = IterationState {
            k: 2,
            x_k: vec![1.0, 1.0],
            x_km1: vec![0.0, 0.0],
            y_k: None,
            residual: None,
        };
        let next = ripa_step(&op, &state, &c).unwrap();
        // A ≡ 0 leaves w = y + s·f_2 untouched; f_2 = 2⁻³·e₁.
        let g = 1.0 - 4.0 / 2.0;
        let y0 = 1.0 + g * 1.0;
        assert_abs_diff_eq!(next.x_k[0], y0 + 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(next.x_k[1], 1.0 + g * 1.0, epsilon = 1e-15);
    }

    #[test]
    fn classical_step_examples() {
        let c = cfg(4.0, 1.0, 2.0, vec![1.0, 0.0]);
        let state = IterationState {
            k: 4, // momentum coefficient 0: y = x
            x_k: vec![1.0, 0.0],
            x_km1: vec![0.5, 0.5],
            y_k: None,
            residual: None,
        };
        let zero = OperatorSpec::zero(2);
        assert_eq!(classical_step(&zero, &state, &c).unwrap().x_k, vec![1.0, 0.0]);
        let id = OperatorSpec::affine(crate::linalg::Matrix::identity(2), vec![0.0, 0.0]).unwrap();
        let next = classical_step(&id, &state, &c).unwrap();
        assert_abs_diff_eq!(next.x_k[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(next.x_k[1], 0.0, epsilon = 1e-15);
        let rot = OperatorSpec::rotation2d();
        let next = classical_step(&rot, &state, &c).unwrap();
        assert_abs_diff_eq!(next.x_k[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(next.x_k[1], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn schedule_values_and_compliance() {
        let c = cfg(10.0, 1.0, 1.25, vec![0.0]);
        assert_abs_diff_eq!(c.lambda_k(10), 2.25, epsilon = 1e-15);
        assert!(c.meets_convergence_conditions()); // 1.25 > 2/8
        let mut weak = cfg(10.0, 1.0, 0.2, vec![0.0]);
        assert!(!weak.meets_convergence_conditions());
        weak.schedule = DiscreteScheduleKind::ConstantLambda { lambda: 1.0 };
        assert!(!weak.meets_convergence_conditions());

        let mut p = cfg(10.0, 1.0, 0.5, vec![0.0]);
        p.schedule = DiscreteScheduleKind::RipaPerturbed;
        assert!(p.meets_convergence_conditions()); // 0.5 > 3/8
        assert_abs_diff_eq!(p.lambda_k(10), (1.0 + 0.5 + 0.5) * 0.02 * 100.0, epsilon = 1e-15);
        p.perturbation =
            PerturbationSpec::PowerDecay { scale: 1.0, decay: 1.5, direction: vec![1.0] };
        assert!(!p.meets_convergence_conditions()); // decay too slow to sum
        p.epsilon = 0.3;
        p.perturbation = PerturbationSpec::None;
        assert!(!p.meets_convergence_conditions()); // 0.3 < 3/8
    }

    #[test]
    fn run_zero_operator_is_constant() {
        let op = OperatorSpec::zero(2);
        let c = cfg(10.0, 1.0, 1.25, vec![2.0, -1.0]);
        let (traj, report) = run(&op, &c).unwrap();
        assert_eq!(traj.samples.len(), 50);
        assert_eq!(traj.samples[0].index, 1.0);
        assert_eq!(traj.final_sample().unwrap().index, 50.0);
        for s in &traj.samples {
            assert_eq!(s.x, vec![2.0, -1.0]);
            assert_eq!(s.velocity, vec![0.0, 0.0]);
            assert_eq!(s.yosida_norm, 0.0);
        }
        assert_eq!(report.sup_scaled_speed, 0.0);
        assert_eq!(report.sum_scaled_speed_sq, 0.0);
        assert_eq!(report.early_exit_at, None);
        traj.validate().unwrap();
    }

    #[test]
    fn run_early_exit_on_vanishing_momentum() {
        // Zero operator: Δx_{k+1} = (1 − α/k)·Δx_k, which hits exactly zero
        // at k = α; the scaled-speed exit then fires at the next index.
        let op = OperatorSpec::zero(1);
        let mut c = cfg(10.0, 1.0, 1.25, vec![1.0]);
        c.x_minus1 = vec![0.0];
        c.max_iters = 1000;
        c.early_exit_scaled_tol = Some(1e-6);
        let (traj, report) = run(&op, &c).unwrap();
        assert_eq!(report.early_exit_at, Some(11));
        assert_eq!(traj.final_sample().unwrap().index, 11.0);
    }

    #[test]
    fn run_flags_divergence() {
        // Huge α makes the momentum factor α/k − 1 explode the difference
        // sequence under the zero operator.
        let op = OperatorSpec::zero(2);
        let mut c = cfg(1000.0, 1.0, 1.25, vec![1.0, 0.0]);
        c.x_minus1 = vec![0.0, 0.0];
        c.max_iters = 200;
        let (traj, report) = run(&op, &c).unwrap();
        assert!(report.diverged);
        assert!(traj.diverged && traj.truncated);
        assert!(traj.samples.len() < 200);
    }

    #[test]
    fn run_report_matches_trajectory_columns() {
        let op = OperatorSpec::rotation2d();
        let mut c = cfg(10.0, 1.0, 1.25, vec![10.0, 10.0]);
        c.max_iters = 20;
        let (traj, report) = run(&op, &c).unwrap();
        let mut sup = 0.0_f64;
        let mut sum_sq = 0.0;
        let mut sum_res = 0.0;
        for s in &traj.samples {
            let dx = crate::linalg::norm(&s.velocity);
            sup = sup.max(s.index * dx);
            sum_sq += s.index * dx * dx;
            sum_res += s.index * s.lambda * s.yosida_norm * s.yosida_norm;
        }
        assert_abs_diff_eq!(report.sup_scaled_speed, sup, epsilon = 1e-12);
        assert_abs_diff_eq!(report.sum_scaled_speed_sq, sum_sq, epsilon = 1e-12);
        assert_abs_diff_eq!(
            report.sum_weighted_residual_sq,
            sum_res,
            epsilon = 1e-12 * (1.0 + sum_res)
        );
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let mut c = cfg(2.0, 1.0, 1.25, vec![1.0]);
        assert!(c.validate().is_err()); // α must exceed 2
        let mut c = cfg(10.0, 0.0, 1.25, vec![1.0]);
        assert!(c.validate().is_err());
        let mut c = cfg(10.0, 1.0, 1.25, vec![1.0]);
        c.x_minus1 = vec![1.0, 2.0];
        assert!(c.validate().is_err());
        let mut c = cfg(10.0, 1.0, 1.25, vec![1.0]);
        c.schedule = DiscreteScheduleKind::ConstantLambda { lambda: 0.0 };
        assert!(c.validate().is_err());
        let mut c = cfg(10.0, 1.0, 1.25, vec![1.0]);
        c.schedule = DiscreteScheduleKind::ClassicalUnregularized;
        c.perturbation =
            PerturbationSpec::PowerDecay { scale: 1.0, decay: 3.0, direction: vec![1.0] };
        assert!(c.validate().is_err());
        let mut c = cfg(10.0, 1.0, 1.25, vec![1.0]);
        c.perturbation =
            PerturbationSpec::PowerDecay { scale: 1.0, decay: 3.0, direction: vec![0.0] };
        assert!(c.validate().is_err());
    }
}

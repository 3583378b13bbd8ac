//! The JSON scenario schema (versioned `"schema": 1`) and its translation
//! into runnable configurations.
//!
//! Every field is optional at the serde level; each mode then states which
//! fields it requires and which it refuses. Refusing unused sections instead
//! of silently ignoring them is deliberate: a schedule on a raw run or a
//! perturbation on an unperturbed method is almost certainly a mistaken
//! config, and a benchmark that quietly drops it would report the wrong
//! experiment.

use serde::{Deserialize, Serialize};

use ripa_core::diagnostics::LyapunovForm;
use ripa_core::dynamics::{ContinuousConfig, FieldKind, FirstOrderConfig};
use ripa_core::linalg::Matrix;
use ripa_core::ode::StepperSpec;
use ripa_core::operator::{ProxRule, SaddleBlock};
use ripa_core::ripa::{DiscreteConfig, DiscreteScheduleKind, PerturbationSpec};
use ripa_core::schedule::{ScheduleSpec, SourceTerm};
use ripa_core::{build_saddle_operator, OperatorSpec, Point, ResolventOracle};

use crate::artifacts;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Dynamic selected by a scenario. The `*_yosida` modes drive the flow by
/// A_{λ(t)}, the `*_raw` modes by A itself; `ripa`/`ripa_pert`/`classical`
/// are the iterative methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FirstOrderRaw,
    FirstOrderYosida,
    SecondOrderYosida,
    SecondOrderRaw,
    Ripa,
    RipaPert,
    Classical,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::FirstOrderRaw => "first_order_raw",
            Mode::FirstOrderYosida => "first_order_yosida",
            Mode::SecondOrderYosida => "second_order_yosida",
            Mode::SecondOrderRaw => "second_order_raw",
            Mode::Ripa => "ripa",
            Mode::RipaPert => "ripa_pert",
            Mode::Classical => "classical",
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, Mode::Ripa | Mode::RipaPert | Mode::Classical)
    }

    /// Display form of the dynamic this mode integrates or iterates.
    pub fn equation(self) -> &'static str {
        match self {
            Mode::FirstOrderRaw => "x' + A(x) = 0",
            Mode::FirstOrderYosida => "x' + A_{lambda(t)}(x) = 0",
            Mode::SecondOrderYosida => "x'' + (alpha/t)x' + A_{lambda(t)}(x) = f(t)",
            Mode::SecondOrderRaw => "x'' + (alpha/t)x' + A(x) = f(t)",
            Mode::Ripa => "x_{k+1} = w_k - s*A_{lambda_k+s}(w_k)",
            Mode::RipaPert => "x_{k+1} = w_k - s*A_{lambda_k+s}(w_k), w_k = y_k + s*f_k",
            Mode::Classical => "x_{k+1} = J_{sA}(y_k)",
        }
    }
}

/// Operator description. `known_zero` optionally certifies a point of the
/// zero set; construction fails if the resolvent does not fix it.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorJson {
    Zero { dim: usize },
    Rotation2d,
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        known_zero: Option<Vec<f64>>,
    },
    Prox {
        rule: ProxRuleName,
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lower: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        upper: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        curvature: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<f64>,
    },
    Saddle {
        f: QuadraticBlockJson,
        g: QuadraticBlockJson,
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxRuleName {
    Abs,
    Box,
    Quadratic,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct QuadraticBlockJson {
    pub curvature: Vec<Vec<f64>>,
    pub linear: Vec<f64>,
}

/// Index schedule λ(t). `quadratic_time` carries no parameters of its own:
/// it reads the top-level `alpha` and `epsilon` so the damping and the index
/// growth cannot silently disagree.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleJson {
    Constant { lambda: f64 },
    QuadraticTime,
    PowerLaw { coefficient: f64, power: f64 },
}

/// Shared shape for the continuous source term f(t) and the discrete
/// perturbation f_k.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DrivingJson {
    None,
    PowerDecay { scale: f64, decay: f64, direction: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum IntegratorJson {
    Rk4Fixed { dt: f64 },
    Rk45Adaptive { rtol: f64, atol: f64 },
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

/// The scenario document exactly as written by the user.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioJson {
    pub schema: u32,
    pub name: String,
    pub mode: Mode,
    pub operator: OperatorJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_minus1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<DrivingJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<DrivingJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputJson>,
}

/// Command-line adjustments applied on top of the scenario file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub dt: Option<f64>,
    pub iters: Option<usize>,
}

/// Parses and version-checks a scenario document.
pub fn parse(text: &str) -> Result<ScenarioJson, CliError> {
    let json: ScenarioJson =
        serde_json::from_str(text).map_err(|e| CliError::config(format!("scenario JSON: {e}")))?;
    if json.schema != SCHEMA_VERSION {
        return Err(CliError::config(format!(
            "unsupported schema version {} (this build reads {SCHEMA_VERSION})",
            json.schema
        )));
    }
    Ok(json)
}

/// The three executable shapes a scenario can translate to.
#[derive(Clone, Debug)]
pub enum RunKind {
    FirstOrder(FirstOrderConfig),
    SecondOrder(ContinuousConfig, FieldKind),
    Discrete(DiscreteConfig),
}

/// Flags echoed into output metadata; `None` means not applicable to the
/// mode (e.g. schedule compliance of a raw run).
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ComplianceFlags {
    pub schedule_compliant: Option<bool>,
    pub discrete_compliant: Option<bool>,
    pub source_integrable: Option<bool>,
    pub perturbation_summable: Option<bool>,
}

/// A fully validated scenario: operator built, core config assembled, hash
/// and artifact names fixed.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub name: String,
    pub mode: Mode,
    pub op: OperatorSpec,
    pub run: RunKind,
    pub compliance: ComplianceFlags,
    /// FNV-1a over the canonical serialization of the effective scenario
    /// (overrides applied), so artifacts can be traced to their exact config.
    pub config_hash: u64,
    /// The energy expression this run's diagnostics should evaluate, when
    /// the mode has one and the operator has a certified zero.
    pub lyapunov: Option<LyapunovForm>,
    pub trajectory_file: String,
    pub diagnostics_file: String,
}

struct FieldCheck<'a> {
    json: &'a ScenarioJson,
    mode: &'static str,
}

impl FieldCheck<'_> {
    fn require<T>(&self, field: Option<T>, name: &str) -> Result<T, CliError> {
        field.ok_or_else(|| {
            CliError::config(format!("mode {} requires the `{name}` field", self.mode))
        })
    }

    fn forbid<T>(&self, field: &Option<T>, name: &str) -> Result<(), CliError> {
        if field.is_some() {
            return Err(CliError::config(format!(
                "mode {} does not use the `{name}` field; remove it",
                self.mode
            )));
        }
        Ok(())
    }
}

fn matrix_from_json(rows: &[Vec<f64>], what: &str) -> Result<Matrix, CliError> {
    let borrowed: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Matrix::from_rows(&borrowed)
        .map_err(|e| CliError::config(format!("{what}: {e}")))
}

fn prox_param(v: Option<f64>, rule: &str, name: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::config(format!("prox rule `{rule}` requires `{name}`")))
}

fn prox_refuse(v: Option<f64>, rule: &str, name: &str) -> Result<(), CliError> {
    if v.is_some() {
        return Err(CliError::config(format!("prox rule `{rule}` does not take `{name}`")));
    }
    Ok(())
}

/// Builds the operator. Shape problems are config errors; everything the
/// core library rejects (non-monotone matrix, unfixed zero, ...) surfaces as
/// an operator error.
pub fn build_operator(json: &OperatorJson) -> Result<OperatorSpec, CliError> {
    let (op, known_zero) = match json {
        OperatorJson::Zero { dim } => {
            if *dim == 0 {
                return Err(CliError::config("operator dim must be >= 1"));
            }
            (OperatorSpec::zero(*dim), &None)
        }
        OperatorJson::Rotation2d => (OperatorSpec::rotation2d(), &None),
        OperatorJson::Affine { matrix, offset, known_zero } => {
            let m = matrix_from_json(matrix, "operator matrix")?;
            (OperatorSpec::affine(m, offset.clone())?, known_zero)
        }
        OperatorJson::Prox { rule, dim, lower, upper, curvature, center } => {
            let built = match rule {
                ProxRuleName::Abs => {
                    prox_refuse(*lower, "abs", "lower")?;
                    prox_refuse(*upper, "abs", "upper")?;
                    prox_refuse(*curvature, "abs", "curvature")?;
                    prox_refuse(*center, "abs", "center")?;
                    ProxRule::Abs
                }
                ProxRuleName::Box => {
                    prox_refuse(*curvature, "box", "curvature")?;
                    prox_refuse(*center, "box", "center")?;
                    ProxRule::Box {
                        lower: prox_param(*lower, "box", "lower")?,
                        upper: prox_param(*upper, "box", "upper")?,
                    }
                }
                ProxRuleName::Quadratic => {
                    prox_refuse(*lower, "quadratic", "lower")?;
                    prox_refuse(*upper, "quadratic", "upper")?;
                    ProxRule::Quadratic {
                        curvature: prox_param(*curvature, "quadratic", "curvature")?,
                        center: prox_param(*center, "quadratic", "center")?,
                    }
                }
            };
            (OperatorSpec::prox(built, *dim)?, &None)
        }
        OperatorJson::Saddle { f, g, a, b } => {
            let block = |j: &QuadraticBlockJson, what: &str| -> Result<SaddleBlock, CliError> {
                Ok(SaddleBlock::Quadratic {
                    curvature: matrix_from_json(&j.curvature, what)?,
                    linear: j.linear.clone(),
                })
            };
            let op = build_saddle_operator(
                block(f, "saddle block f")?,
                block(g, "saddle block g")?,
                matrix_from_json(a, "saddle matrix a")?,
                matrix_from_json(b, "saddle matrix b")?,
            )?;
            (op, &None)
        }
    };
    match known_zero {
        Some(z) => {
            let point = Point::new(z.clone())
                .map_err(|e| CliError::config(format!("known_zero: {e}")))?;
            Ok(op.with_known_zero(point)?)
        }
        None => Ok(op),
    }
}

fn build_schedule(
    check: &FieldCheck<'_>,
    json: ScheduleJson,
) -> Result<ScheduleSpec, CliError> {
    let spec = match json {
        ScheduleJson::Constant { lambda } => ScheduleSpec::Constant { lambda },
        ScheduleJson::QuadraticTime => ScheduleSpec::QuadraticTime {
            alpha: check.require(check.json.alpha, "alpha")?,
            epsilon: check.require(check.json.epsilon, "epsilon")?,
        },
        ScheduleJson::PowerLaw { coefficient, power } => {
            ScheduleSpec::PowerLaw { coefficient, power }
        }
    };
    spec.validate().map_err(|e| CliError::config(format!("schedule: {e}")))?;
    Ok(spec)
}

fn build_source(json: Option<DrivingJson>) -> SourceTerm {
    match json {
        None | Some(DrivingJson::None) => SourceTerm::None,
        Some(DrivingJson::PowerDecay { scale, decay, direction }) => {
            SourceTerm::PowerDecay { scale, decay, direction }
        }
    }
}

fn build_perturbation(json: Option<DrivingJson>) -> PerturbationSpec {
    match json {
        None | Some(DrivingJson::None) => PerturbationSpec::None,
        Some(DrivingJson::PowerDecay { scale, decay, direction }) => {
            PerturbationSpec::PowerDecay { scale, decay, direction }
        }
    }
}

fn build_integrator(
    json: Option<IntegratorJson>,
    ov: &Overrides,
) -> Result<StepperSpec, CliError> {
    if ov.dt.is_some() && (ov.rtol.is_some() || ov.atol.is_some()) {
        return Err(CliError::config("--dt selects a fixed-step run; drop --rtol/--atol"));
    }
    if let Some(dt) = ov.dt {
        return Ok(StepperSpec::Rk4Fixed { dt });
    }
    let base = match json {
        Some(IntegratorJson::Rk4Fixed { dt }) => StepperSpec::Rk4Fixed { dt },
        Some(IntegratorJson::Rk45Adaptive { rtol, atol }) => {
            StepperSpec::Rk45Adaptive { rtol, atol }
        }
        None => StepperSpec::default_adaptive(),
    };
    if ov.rtol.is_none() && ov.atol.is_none() {
        return Ok(base);
    }
    let (rtol, atol) = match base {
        StepperSpec::Rk45Adaptive { rtol, atol } => (rtol, atol),
        // --rtol/--atol force adaptive stepping over a fixed-step scenario
        StepperSpec::Rk4Fixed { .. } => {
            let StepperSpec::Rk45Adaptive { rtol, atol } = StepperSpec::default_adaptive()
            else {
                unreachable!()
            };
            (rtol, atol)
        }
    };
    Ok(StepperSpec::Rk45Adaptive {
        rtol: ov.rtol.unwrap_or(rtol),
        atol: ov.atol.unwrap_or(atol),
    })
}

/// The effective scenario after overrides: what gets hashed and echoed.
fn apply_overrides(json: &ScenarioJson, ov: &Overrides) -> Result<ScenarioJson, CliError> {
    let mut eff = json.clone();
    if eff.mode.is_discrete() {
        if ov.dt.is_some() || ov.rtol.is_some() || ov.atol.is_some() {
            return Err(CliError::config(
                "--dt/--rtol/--atol only apply to continuous modes",
            ));
        }
    } else {
        let integrator = build_integrator(eff.integrator, ov)?;
        eff.integrator = Some(match integrator {
            StepperSpec::Rk4Fixed { dt } => IntegratorJson::Rk4Fixed { dt },
            StepperSpec::Rk45Adaptive { rtol, atol } => {
                IntegratorJson::Rk45Adaptive { rtol, atol }
            }
        });
    }
    if let Some(iters) = ov.iters {
        if !eff.mode.is_discrete() {
            return Err(CliError::config("--iters only applies to iterative modes"));
        }
        eff.max_iters = Some(iters);
    }
    Ok(eff)
}

fn integrator_spec(json: Option<IntegratorJson>) -> StepperSpec {
    match json {
        Some(IntegratorJson::Rk4Fixed { dt }) => StepperSpec::Rk4Fixed { dt },
        Some(IntegratorJson::Rk45Adaptive { rtol, atol }) => {
            StepperSpec::Rk45Adaptive { rtol, atol }
        }
        None => StepperSpec::default_adaptive(),
    }
}

/// Validates a scenario against its mode and assembles the runnable form.
pub fn prepare(json: &ScenarioJson, ov: &Overrides) -> Result<Prepared, CliError> {
    if json.name.is_empty() {
        return Err(CliError::config("scenario `name` must be non-empty"));
    }
    let eff = apply_overrides(json, ov)?;
    let canonical = serde_json::to_string(&eff)
        .map_err(|e| CliError::config(format!("serializing effective config: {e}")))?;
    let config_hash = artifacts::fnv1a64(canonical.as_bytes());

    let check = FieldCheck { json: &eff, mode: eff.mode.as_str() };
    let op = build_operator(&eff.operator)?;
    if op.dimension() != eff.x0.len() {
        return Err(CliError::config(format!(
            "x0 has dimension {}, operator expects {}",
            eff.x0.len(),
            op.dimension()
        )));
    }
    let integrator = integrator_spec(eff.integrator);
    let stride = eff.sample_stride.unwrap_or(1);
    let mut compliance = ComplianceFlags::default();

    let run = match eff.mode {
        Mode::FirstOrderRaw | Mode::FirstOrderYosida => {
            check.forbid(&eff.s, "s")?;
            check.forbid(&eff.max_iters, "max_iters")?;
            check.forbid(&eff.v0, "v0")?;
            check.forbid(&eff.x_minus1, "x_minus1")?;
            check.forbid(&eff.source, "source")?;
            check.forbid(&eff.perturbation, "perturbation")?;
            let schedule = if eff.mode == Mode::FirstOrderRaw {
                check.forbid(&eff.schedule, "schedule")?;
                check.forbid(&eff.alpha, "alpha")?;
                check.forbid(&eff.epsilon, "epsilon")?;
                None
            } else {
                let s = build_schedule(&check, check.require(eff.schedule, "schedule")?)?;
                compliance.schedule_compliant = Some(s.meets_convergence_conditions());
                Some(s)
            };
            let config = FirstOrderConfig {
                schedule,
                t0: check.require(eff.t0, "t0")?,
                t_end: check.require(eff.t_end, "t_end")?,
                x0: eff.x0.clone(),
                integrator,
                sample_stride: stride,
            };
            config.validate().map_err(|e| CliError::config(e.to_string()))?;
            RunKind::FirstOrder(config)
        }
        Mode::SecondOrderYosida | Mode::SecondOrderRaw => {
            check.forbid(&eff.s, "s")?;
            check.forbid(&eff.max_iters, "max_iters")?;
            check.forbid(&eff.x_minus1, "x_minus1")?;
            check.forbid(&eff.perturbation, "perturbation")?;
            let (schedule, kind) = if eff.mode == Mode::SecondOrderRaw {
                check.forbid(&eff.schedule, "schedule")?;
                check.forbid(&eff.epsilon, "epsilon")?;
                // Placeholder; the raw field never evaluates the schedule.
                (ScheduleSpec::Constant { lambda: 1.0 }, FieldKind::Raw)
            } else {
                let s = build_schedule(&check, check.require(eff.schedule, "schedule")?)?;
                compliance.schedule_compliant = Some(s.meets_convergence_conditions());
                (s, FieldKind::Regularized)
            };
            let source = build_source(eff.source.clone());
            compliance.source_integrable = Some(source.satisfies_integrability());
            let mut config = ContinuousConfig {
                alpha: check.require(eff.alpha, "alpha")?,
                schedule,
                t0: check.require(eff.t0, "t0")?,
                t_end: check.require(eff.t_end, "t_end")?,
                x0: eff.x0.clone(),
                v0: eff.v0.clone().unwrap_or_else(|| vec![0.0; eff.x0.len()]),
                source,
                integrator,
                sample_stride: stride,
            };
            config.validate().map_err(|e| CliError::config(e.to_string()))?;
            RunKind::SecondOrder(config, kind)
        }
        Mode::Ripa | Mode::RipaPert | Mode::Classical => {
            check.forbid(&eff.schedule, "schedule")?;
            check.forbid(&eff.t0, "t0")?;
            check.forbid(&eff.t_end, "t_end")?;
            check.forbid(&eff.v0, "v0")?;
            check.forbid(&eff.source, "source")?;
            check.forbid(&eff.integrator, "integrator")?;
            check.forbid(&eff.sample_stride, "sample_stride")?;
            let (schedule, epsilon, perturbation) = match eff.mode {
                Mode::Ripa => {
                    check.forbid(&eff.perturbation, "perturbation")?;
                    (
                        DiscreteScheduleKind::RipaStandard,
                        check.require(eff.epsilon, "epsilon")?,
                        PerturbationSpec::None,
                    )
                }
                Mode::RipaPert => {
                    let p = check.require(eff.perturbation.clone(), "perturbation")?;
                    (
                        DiscreteScheduleKind::RipaPerturbed,
                        check.require(eff.epsilon, "epsilon")?,
                        build_perturbation(Some(p)),
                    )
                }
                _ => {
                    check.forbid(&eff.epsilon, "epsilon")?;
                    check.forbid(&eff.perturbation, "perturbation")?;
                    // Unread on the classical path; must only pass validation.
                    (DiscreteScheduleKind::ClassicalUnregularized, 1.0, PerturbationSpec::None)
                }
            };
            let mut config = DiscreteConfig {
                alpha: check.require(eff.alpha, "alpha")?,
                s: check.require(eff.s, "s")?,
                epsilon,
                schedule,
                max_iters: check.require(eff.max_iters, "max_iters")?,
                perturbation,
                x0: eff.x0.clone(),
                x_minus1: eff.x_minus1.clone().unwrap_or_else(|| eff.x0.clone()),
                early_exit_scaled_tol: None,
            };
            config.validate().map_err(|e| CliError::config(e.to_string()))?;
            if eff.mode != Mode::Classical {
                compliance.discrete_compliant = Some(config.meets_convergence_conditions());
            }
            if eff.mode == Mode::RipaPert {
                compliance.perturbation_summable =
                    Some(config.perturbation.satisfies_summability());
            }
            RunKind::Discrete(config)
        }
    };

    let lyapunov = match (&run, op.known_zero().is_some()) {
        (RunKind::SecondOrder(c, FieldKind::Regularized), true)
            if eff.mode == Mode::SecondOrderYosida =>
        {
            // The continuous energy is tied to the quadratic index growth.
            match c.schedule {
                ScheduleSpec::QuadraticTime { alpha, epsilon } => {
                    Some(LyapunovForm::Continuous { alpha, epsilon })
                }
                _ => None,
            }
        }
        (RunKind::Discrete(c), true) if eff.mode != Mode::Classical => {
            Some(LyapunovForm::Discrete {
                alpha: c.alpha,
                epsilon: c.epsilon,
                s: c.s,
                perturbed: eff.mode == Mode::RipaPert,
            })
        }
        _ => None,
    };

    let output = eff.output.clone().unwrap_or_default();
    Ok(Prepared {
        trajectory_file: output
            .trajectory
            .unwrap_or_else(|| format!("{}_trajectory.csv", eff.name)),
        diagnostics_file: output
            .diagnostics
            .unwrap_or_else(|| format!("{}_diagnostics.json", eff.name)),
        name: eff.name,
        mode: eff.mode,
        op,
        run,
        compliance,
        config_hash,
        lyapunov,
    })
}

//! Turns trajectories into the quantities the convergence analysis actually
//! bounds: the anchor function h_z = ½‖x − z‖², the decreasing energy
//! (continuous Φ and its discrete counterpart E_K), scaled speed/residual
//! series with window statistics, distances to a described solution set with
//! the quadratic-growth bound, and a randomized audit of the Yosida
//! variation inequality.
//!
//! Violation counts are always exact; tolerances are applied by the caller
//! so that every filtering choice stays visible at the assertion site.

use alloc::vec::Vec;

use crate::audit::sampling;
use crate::error::Error;
use crate::linalg;
use crate::math;
use crate::operator::ResolventOracle;
use crate::trajectory::{IndexKind, Trajectory};

/// One entry of the anchor series.
#[derive(Clone, Copy, Debug)]
pub struct AnchorPoint {
    pub index: f64,
    /// h = ½‖x − z‖²
    pub h: f64,
    /// ⟨x − z, v⟩ for continuous time, h_k − h_{k−1} for iterations.
    pub h_rate: f64,
}

/// A scalar series tagged by the trajectory index (t or k).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPoint {
    pub index: f64,
    pub value: f64,
}

fn check_anchor(traj: &Trajectory, z: &[f64]) -> Result<(), Error> {
    if z.len() != traj.dim {
        return Err(Error::DimensionMismatch { expected: traj.dim, found: z.len() });
    }
    if traj.samples.is_empty() {
        return Err(Error::InvalidTrajectory("no samples"));
    }
    Ok(())
}

/// h_z along the trajectory, with its rate taken from the stored velocity
/// (continuous) or reconstructed one-step difference (discrete).
pub fn anchor_series(traj: &Trajectory, z: &[f64]) -> Result<Vec<AnchorPoint>, Error> {
    check_anchor(traj, z)?;
    let mut out = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let h = 0.5 * linalg::dist_sq(&s.x, z);
        let h_rate = match traj.kind {
            IndexKind::ContinuousTime => {
                s.x.iter().zip(z).zip(&s.velocity).map(|((xi, zi), vi)| (xi - zi) * vi).sum()
            }
            IndexKind::IterationCount => {
                // h_{k−1} from x_{k−1} = x_k − Δx_k
                let mut prev = 0.0;
                for i in 0..traj.dim {
                    let d = s.x[i] - s.velocity[i] - z[i];
                    prev += d * d;
                }
                h - 0.5 * prev
            }
        };
        out.push(AnchorPoint { index: s.index, h, h_rate });
    }
    Ok(out)
}

/// Which decreasing-energy expression to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LyapunovForm {
    /// Φ(t) = t·ḣ + (α−1)h + βt²‖ẋ‖² + (ε−2β)∫ s‖ẋ(s)‖² ds, β = (1+ε)/α
    Continuous { alpha: f64, epsilon: f64 },
    /// E_K = K(h_{K+1}−h_K) + (α−1)h_K + βK²g_{K+1}
    ///     + (ε−2β)∑_{p≤K} p·g_p + β∑_{p≤K} g_p, with g_p = ‖Δx_p‖² and
    /// β = (1+ε)/α, or (1+s/2+ε)/α for the perturbed index growth.
    Discrete { alpha: f64, epsilon: f64, s: f64, perturbed: bool },
}

/// The energy series plus exact accounting of every increase.
#[derive(Clone, Debug)]
pub struct LyapunovReport {
    pub series: Vec<f64>,
    /// Every position i ≥ 1 with series[i] > series[i−1], and the increase.
    pub raw_violations: Vec<(usize, f64)>,
    pub max_violation: f64,
    pub initial: f64,
}

impl LyapunovReport {
    pub fn violation_count(&self) -> usize {
        self.raw_violations.len()
    }

    /// Violations at series position ≥ `from` exceeding `tol` — the filter
    /// the acceptance assertions state explicitly.
    pub fn violations_above(&self, tol: f64, from: usize) -> usize {
        self.raw_violations.iter().filter(|(i, v)| *i >= from && *v > tol).count()
    }
}

fn violations_of(series: &[f64]) -> (Vec<(usize, f64)>, f64) {
    let mut raw = Vec::new();
    let mut max = 0.0_f64;
    for i in 1..series.len() {
        let inc = series[i] - series[i - 1];
        if inc > 0.0 {
            raw.push((i, inc));
            max = max.max(inc);
        }
    }
    (raw, max)
}

/// Evaluates Φ or E_K against the anchor z all along the trajectory.
///
/// The discrete form needs every iterate from k = 1 (stride 1); entry i of
/// the series is then E_i, so E_0 = (α−1)h_0 sits first.
pub fn lyapunov_report(
    traj: &Trajectory,
    z: &[f64],
    form: &LyapunovForm,
) -> Result<LyapunovReport, Error> {
    check_anchor(traj, z)?;
    let series = match *form {
        LyapunovForm::Continuous { alpha, epsilon } => {
            if traj.kind != IndexKind::ContinuousTime {
                return Err(Error::InvalidTrajectory("continuous energy on iteration index"));
            }
            let beta = (1.0 + epsilon) / alpha;
            let anchor = anchor_series(traj, z)?;
            let mut out = Vec::with_capacity(traj.samples.len());
            let mut integral = 0.0;
            let mut prev: Option<(f64, f64)> = None; // (t, t·g)
            for (s, a) in traj.samples.iter().zip(&anchor) {
                let t = s.index;
                let g = linalg::norm_sq(&s.velocity);
                if let Some((tp, fp)) = prev {
                    integral += 0.5 * (fp + t * g) * (t - tp);
                }
                prev = Some((t, t * g));
                out.push(t * a.h_rate + (alpha - 1.0) * a.h + beta * t * t * g
                    + (epsilon - 2.0 * beta) * integral);
            }
            out
        }
        LyapunovForm::Discrete { alpha, epsilon, s, perturbed } => {
            require_full_iteration_record(traj)?;
            let beta = if perturbed { (1.0 + s / 2.0 + epsilon) / alpha } else { (1.0 + epsilon) / alpha };
            let n = traj.samples.len();
            let h = |i: usize| 0.5 * linalg::dist_sq(&traj.samples[i].x, z);
            let g = |i: usize| linalg::norm_sq(&traj.samples[i].velocity);
            // h_0 reconstructed from x_1 − Δx_1
            let h0 = {
                let s0 = &traj.samples[0];
                let mut acc = 0.0;
                for i in 0..traj.dim {
                    let d = s0.x[i] - s0.velocity[i] - z[i];
                    acc += d * d;
                }
                0.5 * acc
            };
            let mut out = Vec::with_capacity(n);
            out.push((alpha - 1.0) * h0);
            let mut sum_pg = 0.0; // ∑ p·g_p
            let mut sum_g = 0.0; // ∑ g_p
            for big_k in 1..n {
                let kf = big_k as f64;
                sum_pg += kf * g(big_k - 1); // g_K lives at sample position K−1
                sum_g += g(big_k - 1);
                let h_k = h(big_k - 1);
                let h_k1 = h(big_k);
                let g_k1 = g(big_k);
                out.push(
                    kf * (h_k1 - h_k)
                        + (alpha - 1.0) * h_k
                        + beta * kf * kf * g_k1
                        + (epsilon - 2.0 * beta) * sum_pg
                        + beta * sum_g,
                );
            }
            out
        }
    };
    let (raw_violations, max_violation) = violations_of(&series);
    let initial = series[0];
    Ok(LyapunovReport { series, raw_violations, max_violation, initial })
}

fn require_full_iteration_record(traj: &Trajectory) -> Result<(), Error> {
    if traj.kind != IndexKind::IterationCount {
        return Err(Error::InvalidTrajectory("discrete energy on continuous index"));
    }
    for (i, s) in traj.samples.iter().enumerate() {
        if s.index != (i + 1) as f64 {
            return Err(Error::InvalidTrajectory("discrete energy needs every iterate from k = 1"));
        }
    }
    Ok(())
}

/// t·‖ẋ‖ (or k·‖Δx‖) per sample.
pub fn scaled_speed_series(traj: &Trajectory) -> Vec<SeriesPoint> {
    traj.samples
        .iter()
        .map(|s| SeriesPoint { index: s.index, value: s.index * linalg::norm(&s.velocity) })
        .collect()
}

/// λ·‖A_λ(x)‖ per sample: the regularized residual the theorems send to 0.
pub fn residual_decay_series(traj: &Trajectory) -> Vec<SeriesPoint> {
    traj.samples
        .iter()
        .map(|s| SeriesPoint { index: s.index, value: s.lambda * s.yosida_norm })
        .collect()
}

/// t²·‖ẍ‖ with ẍ by central differences of the stored velocity (one-sided at
/// the ends). Needs at least three samples.
pub fn scaled_acceleration_series(traj: &Trajectory) -> Result<Vec<SeriesPoint>, Error> {
    let n = traj.samples.len();
    if n < 3 {
        return Err(Error::InvalidTrajectory("need at least 3 samples to difference"));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = if i == 0 { (0, 1) } else if i == n - 1 { (n - 2, n - 1) } else { (i - 1, i + 1) };
        let a = &traj.samples[lo];
        let b = &traj.samples[hi];
        let dt = b.index - a.index;
        let mut acc = 0.0;
        for d in 0..traj.dim {
            let dd = (b.velocity[d] - a.velocity[d]) / dt;
            acc += dd * dd;
        }
        let t = traj.samples[i].index;
        out.push(SeriesPoint { index: t, value: t * t * math::sqrt(acc) });
    }
    Ok(out)
}

/// ‖x_{k+1} − y_k‖ for k = 1..K−1, with y_k rebuilt from the stored
/// difference; needs the full iteration record.
pub fn y_gap_series(traj: &Trajectory, alpha: f64) -> Result<Vec<SeriesPoint>, Error> {
    require_full_iteration_record(traj)?;
    let n = traj.samples.len();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let s = &traj.samples[i];
        let next = &traj.samples[i + 1];
        let gamma = 1.0 - alpha / s.index;
        let mut acc = 0.0;
        for d in 0..traj.dim {
            let y = s.x[d] + gamma * s.velocity[d];
            let diff = next.x[d] - y;
            acc += diff * diff;
        }
        out.push(SeriesPoint { index: s.index, value: math::sqrt(acc) });
    }
    Ok(out)
}

/// Max of `value` over entries with lo ≤ index ≤ hi.
pub fn window_max(series: &[SeriesPoint], lo: f64, hi: f64) -> Option<f64> {
    series
        .iter()
        .filter(|p| p.index >= lo && p.index <= hi)
        .map(|p| p.value)
        .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
}

/// Maxima over the first and last tenth of [lo, hi].
pub fn decade_window_maxima(series: &[SeriesPoint], lo: f64, hi: f64) -> Option<(f64, f64)> {
    let tenth = (hi - lo) / 10.0;
    Some((window_max(series, lo, lo + tenth)?, window_max(series, hi - tenth, hi)?))
}

/// Running weighted sums: ∫ t‖ẋ‖² dt and ∫ tλ‖A_λx‖² dt (trapezoid), or the
/// direct sums ∑ k‖Δx_k‖² and ∑ kλ_k‖A‖² on iteration indices.
#[derive(Clone, Debug)]
pub struct PartialSums {
    pub speed_sq: Vec<f64>,
    pub weighted_residual_sq: Vec<f64>,
}

pub fn partial_sums(traj: &Trajectory) -> PartialSums {
    let n = traj.samples.len();
    let mut speed = Vec::with_capacity(n);
    let mut resid = Vec::with_capacity(n);
    match traj.kind {
        IndexKind::ContinuousTime => {
            let mut acc_s = 0.0;
            let mut acc_r = 0.0;
            let mut prev: Option<(f64, f64, f64)> = None;
            for s in &traj.samples {
                let t = s.index;
                let fs = t * linalg::norm_sq(&s.velocity);
                let fr = t * s.lambda * s.yosida_norm * s.yosida_norm;
                if let Some((tp, fsp, frp)) = prev {
                    acc_s += 0.5 * (fsp + fs) * (t - tp);
                    acc_r += 0.5 * (frp + fr) * (t - tp);
                }
                prev = Some((t, fs, fr));
                speed.push(acc_s);
                resid.push(acc_r);
            }
        }
        IndexKind::IterationCount => {
            let mut acc_s = 0.0;
            let mut acc_r = 0.0;
            for s in &traj.samples {
                let k = s.index;
                acc_s += k * linalg::norm_sq(&s.velocity);
                acc_r += k * s.lambda * s.yosida_norm * s.yosida_norm;
                speed.push(acc_s);
                resid.push(acc_r);
            }
        }
    }
    PartialSums { speed_sq: speed, weighted_residual_sq: resid }
}

/// A described solution set: a point or an affine subspace.
#[derive(Clone, Debug)]
pub enum SolutionSet {
    SinglePoint { z: Vec<f64> },
    /// offset + span(basis), basis orthonormal.
    AffineSubspace { offset: Vec<f64>, basis: Vec<Vec<f64>> },
}

#[derive(Clone, Debug)]
pub struct SolutionSetDesc {
    pub set: SolutionSet,
    /// Certified quadratic-growth modulus ν; never estimated from data.
    pub growth_modulus: Option<f64>,
}

impl SolutionSetDesc {
    pub fn single_point(z: Vec<f64>) -> Result<SolutionSetDesc, Error> {
        if z.is_empty() || !linalg::all_finite(&z) {
            return Err(Error::bad_param("z", "must be non-empty and finite"));
        }
        Ok(SolutionSetDesc { set: SolutionSet::SinglePoint { z }, growth_modulus: None })
    }

    /// Orthonormalizes the spanning directions (modified Gram–Schmidt) and
    /// rejects dependent or zero directions.
    pub fn affine_subspace(offset: Vec<f64>, directions: Vec<Vec<f64>>) -> Result<SolutionSetDesc, Error> {
        let n = offset.len();
        if n == 0 || !linalg::all_finite(&offset) {
            return Err(Error::bad_param("offset", "must be non-empty and finite"));
        }
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(directions.len());
        for mut d in directions {
            if d.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: d.len() });
            }
            if !linalg::all_finite(&d) {
                return Err(Error::NonFinite("basis direction"));
            }
            let original = linalg::norm(&d);
            for b in &basis {
                let c = linalg::dot(&d, b);
                for i in 0..n {
                    d[i] -= c * b[i];
                }
            }
            let remaining = linalg::norm(&d);
            if remaining <= 1e-10 * original.max(1.0) {
                return Err(Error::bad_param("basis", "zero or dependent direction"));
            }
            for v in d.iter_mut() {
                *v /= remaining;
            }
            basis.push(d);
        }
        Ok(SolutionSetDesc { set: SolutionSet::AffineSubspace { offset, basis }, growth_modulus: None })
    }

    pub fn with_growth_modulus(mut self, nu: f64) -> Result<SolutionSetDesc, Error> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::bad_param("growth_modulus", "must be finite and > 0"));
        }
        self.growth_modulus = Some(nu);
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        match &self.set {
            SolutionSet::SinglePoint { z } => z.len(),
            SolutionSet::AffineSubspace { offset, .. } => offset.len(),
        }
    }

    /// Exact Euclidean distance from x to the set.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match &self.set {
            SolutionSet::SinglePoint { z } => linalg::dist(x, z),
            SolutionSet::AffineSubspace { offset, basis } => {
                let mut r: Vec<f64> = x.iter().zip(offset).map(|(a, b)| a - b).collect();
                for b in basis {
                    let c = linalg::dot(&r, b);
                    for i in 0..r.len() {
                        r[i] -= c * b[i];
                    }
                }
                linalg::norm(&r)
            }
        }
    }
}

/// Distance series next to the quadratic-growth bound
/// dist² ≤ [2(1+λ₀ν)/(λ₀ν)]·λ(λ + 1/(2ν))·‖A_λ(x)‖², with λ₀ the index at
/// the first sample.
#[derive(Clone, Debug)]
pub struct GrowthCertificate {
    pub dist: Vec<f64>,
    pub bound: Vec<f64>,
    /// Sample positions where dist² > bound, exactly as computed.
    pub violations: Vec<usize>,
    /// The leading factor 2(1+λ₀ν)/(λ₀ν).
    pub constant: f64,
}

pub fn growth_certificate(
    traj: &Trajectory,
    desc: &SolutionSetDesc,
) -> Result<GrowthCertificate, Error> {
    let nu = desc
        .growth_modulus
        .ok_or(Error::bad_param("growth_modulus", "certificate needs a certified ν"))?;
    if desc.dimension() != traj.dim {
        return Err(Error::DimensionMismatch { expected: traj.dim, found: desc.dimension() });
    }
    if traj.samples.is_empty() {
        return Err(Error::InvalidTrajectory("no samples"));
    }
    let lambda0 = traj.samples[0].lambda;
    if !(lambda0.is_finite() && lambda0 > 0.0) {
        return Err(Error::bad_param("lambda", "growth bound needs a regularized run (λ > 0)"));
    }
    let constant = 2.0 * (1.0 + lambda0 * nu) / (lambda0 * nu);
    let mut dist = Vec::with_capacity(traj.samples.len());
    let mut bound = Vec::with_capacity(traj.samples.len());
    let mut violations = Vec::new();
    for (i, s) in traj.samples.iter().enumerate() {
        let d = desc.distance(&s.x);
        let b = constant * s.lambda * (s.lambda + 0.5 / nu) * s.yosida_norm * s.yosida_norm;
        if d * d > b {
            violations.push(i);
        }
        dist.push(d);
        bound.push(b);
    }
    Ok(GrowthCertificate { dist, bound, violations, constant })
}

/// Randomized check of the index-variation inequality
/// ‖γA_γx − δA_δy‖ ≤ 2‖x − y‖ + (2‖x − z‖/γ)·|γ − δ|.
///
/// Returns the worst slack lhs − rhs over `samples` draws of x, y in
/// [−10,10]ⁿ and γ, δ log-uniform in [1e−3, 1e3]; it must stay ≤ 0 up to
/// rounding for any maximally monotone operator with z in its zero set.
pub fn variation_bound_audit(
    op: &dyn ResolventOracle,
    z: &[f64],
    samples: usize,
    seed: u64,
) -> Result<f64, Error> {
    let n = op.dimension();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: z.len() });
    }
    let mut rng = sampling::rng(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut x = alloc::vec![0.0; n];
    let mut y = alloc::vec![0.0; n];
    for _ in 0..samples {
        sampling::fill_uniform(&mut rng, &mut x, -10.0, 10.0);
        sampling::fill_uniform(&mut rng, &mut y, -10.0, 10.0);
        let gamma = sampling::log_uniform(&mut rng, 1e-3, 1e3);
        let delta = sampling::log_uniform(&mut rng, 1e-3, 1e3);
        // γ·A_γ(x) = x − J_γ(x), no division by a small γ
        let jx = op.resolvent(gamma, &x)?;
        let jy = op.resolvent(delta, &y)?;
        let mut lhs = 0.0;
        for i in 0..n {
            let d = (x[i] - jx[i]) - (y[i] - jy[i]);
            lhs += d * d;
        }
        let lhs = math::sqrt(lhs);
        let rhs = 2.0 * linalg::dist(&x, &y)
            + 2.0 * linalg::dist(&x, z) * (gamma - delta).abs() / gamma;
        worst = worst.max(lhs - rhs);
    }
    Ok(worst)
}

/// Everything the report consumers need in one pass.
#[derive(Clone, Debug)]
pub struct DiagnosticsReport {
    pub anchor: Vec<AnchorPoint>,
    pub lyapunov: Option<LyapunovReport>,
    pub sup_scaled_speed: f64,
    /// (first tenth, last tenth) maxima of t‖ẋ‖ over the full index range.
    pub speed_decade_maxima: Option<(f64, f64)>,
    /// Same windows for λ‖A_λx‖.
    pub residual_decade_maxima: Option<(f64, f64)>,
    pub sums: PartialSums,
    pub growth: Option<GrowthCertificate>,
}

pub fn diagnostics_report(
    traj: &Trajectory,
    z: &[f64],
    form: Option<&LyapunovForm>,
    set: Option<&SolutionSetDesc>,
) -> Result<DiagnosticsReport, Error> {
    let anchor = anchor_series(traj, z)?;
    let lyapunov = match form {
        Some(f) => Some(lyapunov_report(traj, z, f)?),
        None => None,
    };
    let speed = scaled_speed_series(traj);
    let resid = residual_decay_series(traj);
    let lo = traj.samples.first().map_or(0.0, |s| s.index);
    let hi = traj.samples.last().map_or(0.0, |s| s.index);
    let sup_scaled_speed = speed.iter().map(|p| p.value).fold(0.0_f64, f64::max);
    let growth = match set {
        Some(desc) => Some(growth_certificate(traj, desc)?),
        None => None,
    };
    Ok(DiagnosticsReport {
        anchor,
        lyapunov,
        sup_scaled_speed,
        speed_decade_maxima: decade_window_maxima(&speed, lo, hi),
        residual_decade_maxima: decade_window_maxima(&resid, lo, hi),
        sums: partial_sums(traj),
        growth,
    })
}

//! Sampled runs: the common record format produced by both the ODE
//! integrators and the discrete iteration.

use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg;

/// A run is flagged diverged once any state norm reaches this magnitude.
/// The run still completes (fast-growing trajectories are legitimate
/// results, not failures) unless [`DIVERGENCE_CUTOFF`] is also crossed.
pub const REPORTED_DIVERGENCE_NORM: f64 = 1e20;

/// Hard truncation threshold: integration/iteration stops here to stay far
/// away from overflow.
pub const DIVERGENCE_CUTOFF: f64 = 1e30;

/// What the sample index means.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    /// Samples are taken at continuous times t.
    ContinuousTime,
    /// Samples are iterates, indexed by the iteration count k.
    IterationCount,
}

/// One record of a run.
///
/// For continuous trajectories `velocity` is ẋ(t); for discrete ones it is
/// the difference x_k − x_{k−1}. `lambda` is the regularization index in
/// effect (0 for un-regularized runs) and `yosida_norm` the norm of the
/// regularized operator value driving the step (‖A(x)‖ itself for raw runs).
#[derive(Clone, Debug)]
pub struct Sample {
    pub index: f64,
    pub x: Vec<f64>,
    pub velocity: Vec<f64>,
    pub lambda: f64,
    pub yosida_norm: f64,
}

/// Deterministic bookkeeping attached by front ends; never part of the
/// numeric record itself.
#[derive(Clone, Debug, Default)]
pub struct TrajectoryMeta {
    pub config_hash: Option<u64>,
    pub wall_ms: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub kind: IndexKind,
    pub dim: usize,
    pub samples: Vec<Sample>,
    /// Some state norm reached [`REPORTED_DIVERGENCE_NORM`].
    pub diverged: bool,
    /// The run was cut short at [`DIVERGENCE_CUTOFF`] or at the first
    /// non-finite state.
    pub truncated: bool,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(kind: IndexKind, dim: usize) -> Trajectory {
        Trajectory {
            kind,
            dim,
            samples: Vec::new(),
            diverged: false,
            truncated: false,
            meta: TrajectoryMeta::default(),
        }
    }

    pub fn push(&mut self, sample: Sample) {
        debug_assert_eq!(sample.x.len(), self.dim);
        debug_assert_eq!(sample.velocity.len(), self.dim);
        if linalg::norm(&sample.x) >= REPORTED_DIVERGENCE_NORM {
            self.diverged = true;
        }
        self.samples.push(sample);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn final_sample(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// ‖x‖ of the last record.
    pub fn final_norm(&self) -> Option<f64> {
        self.final_sample().map(|s| linalg::norm(&s.x))
    }

    /// Index (t or k) range covered.
    pub fn index_range(&self) -> Option<(f64, f64)> {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => Some((a.index, b.index)),
            _ => None,
        }
    }

    /// Structural invariants: strictly increasing index, consistent
    /// dimensions, and finite fields unless the run is flagged.
    pub fn validate(&self) -> Result<(), Error> {
        let mut prev = f64::NEG_INFINITY;
        for s in &self.samples {
            if s.index <= prev {
                return Err(Error::InvalidTrajectory("sample index not strictly increasing"));
            }
            prev = s.index;
            if s.x.len() != self.dim || s.velocity.len() != self.dim {
                return Err(Error::InvalidTrajectory("sample dimension mismatch"));
            }
            let finite = linalg::all_finite(&s.x)
                && linalg::all_finite(&s.velocity)
                && s.lambda.is_finite()
                && s.yosida_norm.is_finite();
            if !finite && !(self.diverged || self.truncated) {
                return Err(Error::InvalidTrajectory("non-finite sample in un-flagged run"));
            }
        }
        Ok(())
    }
}

//! Resolvent-based toolkit for maximally monotone operator dynamics.
//!
//! The crate revolves around one object and two time axes:
//!
//! * [`OperatorSpec`](operator::OperatorSpec) — a catalog of maximally
//!   monotone operators (affine maps with monotone linear part, the planar
//!   rotation, a few closed-form subdifferentials, and saddle operators built
//!   from quadratic two-block problems). Every catalog member evaluates its
//!   resolvent `J_{λA} = (I + λA)⁻¹` *exactly* (direct solves, no inner
//!   iteration), which makes the Yosida regularization
//!   `A_λ = (I − J_{λA})/λ` cheap and trustworthy.
//! * [`dynamics`] — continuous-time flows: the damped inertial system
//!   `ẍ + (α/t)ẋ + A_{λ(t)}(x) = f(t)` and its first-order counterpart,
//!   integrated with fixed-step RK4 or adaptive RK45.
//! * [`ripa`] — the discrete counterpart: an inertial proximal iteration
//!   whose regularization index grows quadratically with the step count.
//!
//! [`diagnostics`] turns trajectories into evidence (anchor distances,
//! Lyapunov-style monotone quantities, rate statistics, solution-set distance
//! certificates), [`spectral`] works out the 2×2 rotation eigenstructure used
//! to separate convergent from non-convergent regularization growth, and
//! [`audit`] hammers the operator catalog with randomized property checks.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` for the float math fallback.
//!
//! ```
//! use ripa_core::operator::OperatorSpec;
//! use ripa_core::point::Point;
//!
//! let rot = OperatorSpec::rotation2d();
//! let x = Point::new(vec![1.0, 0.0]).unwrap();
//! let j = rot.resolvent_point(1.0, &x).unwrap();
//! assert!((j[0] - 0.5).abs() < 1e-15 && (j[1] + 0.5).abs() < 1e-15);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("ripa-core needs either the `std` or the `libm` feature for float math");

pub mod audit;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod linalg;
mod math;
pub mod ode;
pub mod operator;
pub mod point;
pub mod ripa;
pub mod schedule;
pub mod spectral;
pub mod trajectory;

pub use error::Error;
pub use operator::{build_saddle_operator, OperatorSpec, ResolventOracle, YosidaView};
pub use point::Point;
pub use trajectory::Trajectory;

//! Spectral analysis and bilinear stabilization of the degenerate diffusion
//! operator `A u = -(x^a u_x)_x` on `(0, 1)`, `a` in `[0, 3/2)`.
//!
//! The eigenfunctions are Bessel functions of real order composed with a power
//! of `x`; everything downstream (control operator, Galerkin dynamics, window
//! control synthesis) is expressed in that basis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod bop;
pub mod dynamics;
pub mod error;
pub mod quadrature;
pub mod spectral;
pub mod stabilize;

pub use bessel::{bessel_j, bessel_j_deriv, bessel_zeros, BesselOrder, ZeroTable};
pub use bop::ControlOperator;
pub use dynamics::{ControlPiece, ControlSignal, GroundState, TrajectoryState};
pub use error::{Error, Result};
pub use quadrature::QuadratureRule;
pub use spectral::{make_problem, DegenerateProblem, EigenSystem, Regime};
pub use stabilize::{StabilizationReport, WindowSchedule};

/// The verification grid covering both regimes and the edges of the admissible range.
pub const ALPHA_GRID: [f64; 7] = [0.0, 0.3, 0.5, 0.9, 1.0, 1.2, 1.49];

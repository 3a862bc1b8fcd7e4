//! Numerical tools for `u_t = Δu - u^p` on punctured space: regime
//! classification, explicit supersolution barriers, a radial finite-difference
//! solver, maximal-solution schedules, and parameter sweeps.
//!
//! Everything is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod error;
pub mod experiments;
pub mod maximal;
pub mod problem;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ProblemParamsF64 = problem::ProblemParams<f64>;
pub type BarrierParamsF64 = barrier::BarrierParams<f64>;
pub type RadialGridF64 = solver::RadialGrid<f64>;
pub type FieldF64 = solver::Field<f64>;
pub type TrajectoryF64 = solver::Trajectory<f64>;
pub type BoundaryConditionF64 = solver::BoundaryCondition<f64>;
pub type ScheduleF64 = maximal::Schedule<f64>;
pub type MaximalRunReportF64 = maximal::MaximalRunReport<f64>;
pub type SweepSpecF64 = experiments::SweepSpec<f64>;
pub type SweepResultF64 = experiments::SweepResult<f64>;

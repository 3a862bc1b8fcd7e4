//! Finite-difference solver for the radial equation
//! `u_t = u_rr + ((n-1)/r) u_r - u^p` on an annulus `(ε, R)`.

mod domination;
mod grid;
mod mms;
mod stepper;
mod tridiag;

pub use domination::{check_domination, DominationReport};
pub use grid::{build_grid, RadialGrid, Spacing, MAX_GEOMETRIC_RATIO};
pub use mms::{
    convergence_study, fitted_order, manufactured_error, ConvergenceReport, ConvergenceStudy,
    Manufactured,
};
pub use stepper::{
    default_dt, solve, step, BoundaryCondition, BoundaryValue, Field, ReactionScheme, SolverConfig,
    StepStats, Trajectory,
};
pub use tridiag::solve_tridiagonal;

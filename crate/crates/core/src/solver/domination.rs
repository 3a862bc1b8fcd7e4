use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use super::stepper::Trajectory;
use crate::barrier::{psi, verify_supersolution, BarrierParams, ScanSpec, VerificationReport};
use crate::error::{Error, Result};
use crate::problem::ProblemParams;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport<T> {
    /// Largest `u/ψ` over all snapshot nodes.
    pub max_ratio: T,
    /// `(r, t)` of the largest ratio.
    pub argmax: (T, T),
    /// Number of `(node, snapshot)` pairs with `u > ψ`.
    pub violations: usize,
    pub barrier: VerificationReport<T>,
    /// Barrier verified and `u <= ψ` everywhere.
    pub dominated: bool,
}

/// Verify the barrier, then compare every snapshot of `traj` against `ψ`.
pub fn check_domination<T: Real>(
    traj: &Trajectory<T>,
    grid: &RadialGrid<T>,
    bp: &BarrierParams<T>,
    params: &ProblemParams<T>,
    scan: &ScanSpec,
) -> Result<DominationReport<T>> {
    if !(grid.epsilon >= bp.epsilon && grid.r_outer <= bp.r_outer) {
        return Err(Error::Domain(format!(
            "grid ({}, {}) is not inside the barrier annulus ({}, {})",
            grid.epsilon, grid.r_outer, bp.epsilon, bp.r_outer
        )));
    }
    let barrier = verify_supersolution(bp, params, scan)?;
    let mut max_ratio = T::zero();
    let mut argmax = (grid.nodes[0], T::zero());
    let mut violations = 0;
    for snap in &traj.snapshots {
        if snap.values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "snapshot has {} values for {} nodes",
                snap.values.len(),
                grid.len()
            )));
        }
        for (&r, &u) in grid.nodes.iter().zip(&snap.values) {
            let bound = psi(r, snap.time, bp, params)?;
            let ratio = u / bound;
            if ratio > T::one() {
                violations += 1;
            }
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax = (r, snap.time);
            }
        }
    }
    let dominated = barrier.passed && violations == 0;
    Ok(DominationReport {
        max_ratio,
        argmax,
        violations,
        barrier,
        dominated,
    })
}

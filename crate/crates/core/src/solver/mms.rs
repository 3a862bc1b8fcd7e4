//! Method of manufactured solutions for the radial scheme.

use serde::{Deserialize, Serialize};

use super::grid::{build_grid, RadialGrid, Spacing};
use super::stepper::{advance, schedule_steps, Operator, SolverConfig, Workspace};
use crate::error::{Error, Result};
use crate::problem::ProblemParams;
use crate::scalar::Real;

/// Smooth exact solutions; the matching source term is added to the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Manufactured {
    /// `u = e^(-t) r`.
    LinearDecay,
    /// `u = 2 + sin(π r)`, time independent.
    SteadyWave,
    /// `u = 0`.
    Zero,
}

impl Manufactured {
    /// `(u, u_t, u_r, u_rr)` at `(r, t)`.
    pub fn jet<T: Real>(self, r: T, t: T) -> (T, T, T, T) {
        let z = T::zero();
        match self {
            Manufactured::LinearDecay => {
                let e = (-t).exp();
                (e * r, -e * r, e, z)
            }
            Manufactured::SteadyWave => {
                let pi = T::PI();
                let (s, c) = (pi * r).sin_cos();
                (T::lit(2.0) + s, z, pi * c, -pi * pi * s)
            }
            Manufactured::Zero => (z, z, z, z),
        }
    }

    pub fn value<T: Real>(self, r: T, t: T) -> T {
        self.jet(r, t).0
    }

    /// `u_t - u_rr - ((n-1)/r) u_r + u^p`.
    pub fn forcing<T: Real>(self, r: T, t: T, params: &ProblemParams<T>) -> T {
        let (u, ut, ur, urr) = self.jet(r, t);
        ut - urr - (params.dim() - T::one()) / r * ur + u.powf(params.p())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy<T> {
    pub manufactured: Manufactured,
    /// Inner and outer radius of the annulus.
    pub domain: (T, T),
    pub t_end: T,
    /// Uniform interior node counts for the spatial refinement.
    pub grid_counts: Vec<usize>,
    /// Step used for every spatial run.
    pub spatial_dt: T,
    /// Step sizes for the temporal refinement.
    pub dts: Vec<T>,
    /// Node count used for every temporal run.
    pub temporal_count: usize,
}

impl<T: Real> ConvergenceStudy<T> {
    /// Spatial refinement on `2 + sin(πr)`, integrated to its discrete steady state.
    pub fn spatial_default() -> Self {
        Self {
            manufactured: Manufactured::SteadyWave,
            domain: (T::one(), T::lit(2.0)),
            t_end: T::lit(20.0),
            grid_counts: vec![15, 31, 63, 127],
            spatial_dt: T::lit(0.25),
            dts: Vec::new(),
            temporal_count: 31,
        }
    }

    /// Temporal refinement on `e^(-t) r`, which the stencil reproduces exactly in space.
    pub fn temporal_default() -> Self {
        Self {
            manufactured: Manufactured::LinearDecay,
            domain: (T::one(), T::lit(2.0)),
            t_end: T::one(),
            grid_counts: Vec::new(),
            spatial_dt: T::lit(1e-3),
            dts: vec![T::lit(0.04), T::lit(0.02), T::lit(0.01), T::lit(0.005)],
            temporal_count: 31,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport<T> {
    /// `(h, max error at t_end)` per spatial run.
    pub spatial: Vec<(T, T)>,
    /// `(dt, max error at t_end)` per temporal run.
    pub temporal: Vec<(T, T)>,
    /// Least-squares slope of `log error` against `log h`.
    pub spatial_order: Option<T>,
    pub temporal_order: Option<T>,
}

/// Max-norm error at `t_end` of the forced scheme against the exact solution.
pub fn manufactured_error<T: Real>(
    m: Manufactured,
    grid: &RadialGrid<T>,
    params: &ProblemParams<T>,
    t_end: T,
    dt: T,
    cfg: &SolverConfig,
) -> Result<T> {
    let op = Operator::new(grid, params.dim());
    let mut ws = Workspace::new(grid.len());
    let mut values = grid.sample(|r| m.value(r, T::zero()));
    let mut forcing = vec![T::zero(); grid.len()];
    let mut t = T::zero();
    for (h, _) in schedule_steps(t_end, dt, &[])? {
        t = t + h;
        for (f, &r) in forcing.iter_mut().zip(&grid.nodes) {
            *f = m.forcing(r, t, params);
        }
        let inner = m.value(grid.epsilon, t);
        let outer = m.value(grid.r_outer, t);
        advance(
            &op,
            &mut ws,
            &mut values,
            h,
            Some(inner),
            Some(outer),
            Some(&forcing),
            params.p(),
            cfg,
        )?;
    }
    Ok(grid
        .nodes
        .iter()
        .zip(&values)
        .map(|(&r, &u)| (u - m.value(r, t_end)).abs())
        .fold(T::zero(), T::max))
}

/// Slope of the least-squares line through `(log x, log y)`; `None` if any
/// error is zero or fewer than two points are given.
pub fn fitted_order<T: Real>(points: &[(T, T)]) -> Option<T> {
    if points.len() < 2
        || points
            .iter()
            .any(|&(x, y)| !(x > T::zero() && y > T::zero()))
    {
        return None;
    }
    let k = T::from_count(points.len());
    let (sx, sy) = points
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), &(x, y)| {
            (a + x.ln(), b + y.ln())
        });
    let (mx, my) = (sx / k, sy / k);
    let (num, den) = points
        .iter()
        .fold((T::zero(), T::zero()), |(n, d), &(x, y)| {
            let dx = x.ln() - mx;
            (n + dx * (y.ln() - my), d + dx * dx)
        });
    (den > T::zero()).then(|| num / den)
}

/// Run the spatial and temporal refinements of `study`.
pub fn convergence_study<T: Real>(
    study: &ConvergenceStudy<T>,
    params: &ProblemParams<T>,
    cfg: &SolverConfig,
) -> Result<ConvergenceReport<T>> {
    let (a, b) = study.domain;
    if !(a > T::zero() && a < b) {
        return Err(Error::Domain(format!(
            "domain must satisfy 0 < a < b, got ({a}, {b})"
        )));
    }
    let mut spatial = Vec::with_capacity(study.grid_counts.len());
    for &count in &study.grid_counts {
        let grid = build_grid(a, b, count, Spacing::Uniform)?;
        let err = manufactured_error(
            study.manufactured,
            &grid,
            params,
            study.t_end,
            study.spatial_dt,
            cfg,
        )?;
        spatial.push((grid.min_gap(), err));
    }
    let mut temporal = Vec::with_capacity(study.dts.len());
    if !study.dts.is_empty() {
        let grid = build_grid(a, b, study.temporal_count, Spacing::Uniform)?;
        for &dt in &study.dts {
            let err = manufactured_error(study.manufactured, &grid, params, study.t_end, dt, cfg)?;
            temporal.push((dt, err));
        }
    }
    Ok(ConvergenceReport {
        spatial_order: fitted_order(&spatial),
        temporal_order: fitted_order(&temporal),
        spatial,
        temporal,
    })
}

//! Method-of-lines time stepping for `u_t = u_rr + ((n-1)/r) u_r - u^p`.
//!
//! Diffusion and drift use the three-point second-order stencil for
//! non-uniform grids and are always implicit. Where the drift would make the
//! sub-diagonal coefficient negative (`(n-1) h₊ / r > 2`) the drift falls back
//! to a forward difference so the system stays an M-matrix.

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use super::tridiag::solve_tridiagonal;
use crate::error::{Error, Result};
use crate::problem::ProblemParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryValue<T> {
    Dirichlet(T),
    NeumannZero,
}

impl<T: Real> BoundaryValue<T> {
    fn dirichlet_value(&self) -> Option<T> {
        match *self {
            BoundaryValue::Dirichlet(v) => Some(v),
            BoundaryValue::NeumannZero => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition<T> {
    pub inner: BoundaryValue<T>,
    pub outer: BoundaryValue<T>,
}

impl<T: Real> BoundaryCondition<T> {
    pub fn dirichlet(inner: T, outer: T) -> Self {
        Self {
            inner: BoundaryValue::Dirichlet(inner),
            outer: BoundaryValue::Dirichlet(outer),
        }
    }

    pub fn neumann() -> Self {
        Self {
            inner: BoundaryValue::NeumannZero,
            outer: BoundaryValue::NeumannZero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (side, b) in [("inner", self.inner), ("outer", self.outer)] {
            if let BoundaryValue::Dirichlet(v) = b {
                if !(v >= T::zero()) || !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "{side} Dirichlet value must be finite and >= 0, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Nodal solution values at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field<T> {
    pub values: Vec<T>,
    pub time: T,
}

/// How the absorption `-u^p` enters a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReactionScheme {
    /// `-u_old^(p-1) u_new`: one linear solve per step.
    Lagged,
    /// `-u_new^p`, solved by Newton's method from the reaction-free solution.
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub reaction: ReactionScheme,
    /// Per-node relative Newton tolerance.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            reaction: ReactionScheme::Implicit,
            newton_tol: 1e-12,
            newton_max_iter: 500,
        }
    }
}

impl SolverConfig {
    pub fn lagged() -> Self {
        Self {
            reaction: ReactionScheme::Lagged,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats<T> {
    pub steps: usize,
    pub dt_min: T,
    pub dt_max: T,
    pub max_value: T,
    pub min_value: T,
    pub newton_iterations: usize,
    /// Nodes where the drift uses the one-sided fallback.
    pub upwind_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub snapshots: Vec<Field<T>>,
    pub step_stats: StepStats<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &Field<T> {
        self.snapshots
            .last()
            .expect("trajectory has at least one snapshot")
    }
}

/// Discrete `u_rr + ((n-1)/r) u_r` on a grid, split by neighbour.
#[derive(Debug, Clone)]
pub(crate) struct Operator<T> {
    lower: Vec<T>,
    upper: Vec<T>,
    pub(crate) upwind_nodes: usize,
}

impl<T: Real> Operator<T> {
    pub(crate) fn new(grid: &RadialGrid<T>, dim: T) -> Self {
        let two = T::lit(2.0);
        let n = grid.len();
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        let mut upwind_nodes = 0;
        for i in 0..n {
            let (hm, hp) = (grid.gap_left(i), grid.gap_right(i));
            let d = (dim - T::one()) / grid.nodes[i];
            let span = hm + hp;
            if d * hp <= two {
                lower.push((two - d * hp) / (hm * span));
                upper.push((two + d * hm) / (hp * span));
            } else {
                upwind_nodes += 1;
                lower.push(two / (hm * span));
                upper.push(two / (hp * span) + d / hp);
            }
        }
        Self {
            lower,
            upper,
            upwind_nodes,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.lower.len()
    }
}

/// Reusable buffers for one solve.
pub(crate) struct Workspace<T> {
    sub: Vec<T>,
    diag: Vec<T>,
    sup: Vec<T>,
    base_diag: Vec<T>,
    rhs: Vec<T>,
    work: Vec<T>,
    scratch: Vec<T>,
}

impl<T: Real> Workspace<T> {
    pub(crate) fn new(n: usize) -> Self {
        let z = || vec![T::zero(); n];
        Self {
            sub: z(),
            diag: z(),
            sup: z(),
            base_diag: z(),
            rhs: z(),
            work: z(),
            scratch: z(),
        }
    }
}

/// One backward-Euler step; `forcing` (evaluated at the new time) is added to
/// the right-hand side. Returns the Newton iteration count.
#[allow(clippy::too_many_arguments)]
pub(crate) fn advance<T: Real>(
    op: &Operator<T>,
    ws: &mut Workspace<T>,
    values: &mut [T],
    dt: T,
    inner: Option<T>,
    outer: Option<T>,
    forcing: Option<&[T]>,
    p: T,
    cfg: &SolverConfig,
) -> Result<usize> {
    let n = op.len();
    let last = n - 1;
    let one = T::one();
    for i in 0..n {
        let (lo, up) = (op.lower[i], op.upper[i]);
        let mut centre = lo + up;
        ws.rhs[i] = values[i];
        if i == 0 {
            match inner {
                Some(v) => ws.rhs[i] = ws.rhs[i] + dt * lo * v,
                None => centre = centre - lo,
            }
        }
        if i == last {
            match outer {
                Some(v) => ws.rhs[i] = ws.rhs[i] + dt * up * v,
                None => centre = centre - up,
            }
        }
        if let Some(f) = forcing {
            ws.rhs[i] = ws.rhs[i] + dt * f[i];
        }
        ws.sub[i] = if i == 0 { T::zero() } else { -dt * lo };
        ws.sup[i] = if i == last { T::zero() } else { -dt * up };
        ws.base_diag[i] = one + dt * centre;
    }

    match cfg.reaction {
        ReactionScheme::Lagged => {
            for ((d, &b), &u) in ws.diag.iter_mut().zip(&ws.base_diag).zip(values.iter()) {
                *d = b + dt * u.max(T::zero()).powf(p - one);
            }
            values.copy_from_slice(&ws.rhs);
            solve_tridiagonal(&ws.sub, &ws.diag, &ws.sup, values, &mut ws.scratch)?;
            Ok(0)
        }
        ReactionScheme::Implicit => {
            // Reaction-free solve: a supersolution of the nonlinear system, so
            // Newton decreases monotonically from here.
            values.copy_from_slice(&ws.rhs);
            solve_tridiagonal(&ws.sub, &ws.base_diag, &ws.sup, values, &mut ws.scratch)?;
            let tol = T::lit(cfg.newton_tol);
            for iter in 1..=cfg.newton_max_iter {
                for i in 0..n {
                    let u = values[i];
                    let upm1 = u.powf(p - one);
                    let mut g = ws.base_diag[i] * u + dt * u * upm1 - ws.rhs[i];
                    if i > 0 {
                        g = g + ws.sub[i] * values[i - 1];
                    }
                    if i < last {
                        g = g + ws.sup[i] * values[i + 1];
                    }
                    ws.work[i] = g;
                    ws.diag[i] = ws.base_diag[i] + dt * p * upm1;
                }
                solve_tridiagonal(&ws.sub, &ws.diag, &ws.sup, &mut ws.work, &mut ws.scratch)?;
                let mut converged = true;
                for (v, &dw) in values.iter_mut().zip(&ws.work) {
                    let next = (*v - dw).max(T::zero());
                    let change = (next - *v).abs();
                    if change > tol * next + T::min_positive_value() {
                        converged = false;
                    }
                    *v = next;
                }
                if converged {
                    return Ok(iter);
                }
            }
            Err(Error::Solve(format!(
                "Newton iteration did not converge in {} iterations",
                cfg.newton_max_iter
            )))
        }
    }
}

fn check_state<T: Real>(values: &[T], grid: &RadialGrid<T>) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::Domain(format!(
            "state has {} values for {} nodes",
            values.len(),
            grid.len()
        )));
    }
    if let Some(v) = values
        .iter()
        .find(|v| !(**v >= T::zero()) || !v.is_finite())
    {
        return Err(Error::Domain(format!(
            "state must be finite and >= 0, found {v}"
        )));
    }
    Ok(())
}

fn check_output<T: Real>(values: &[T]) -> Result<()> {
    match values
        .iter()
        .find(|v| !(**v >= T::zero()) || !v.is_finite())
    {
        Some(v) => Err(Error::Solve(format!("step produced invalid value {v}"))),
        None => Ok(()),
    }
}

/// Advance `state` by one step of size `dt`.
pub fn step<T: Real>(
    state: &Field<T>,
    dt: T,
    grid: &RadialGrid<T>,
    bc: &BoundaryCondition<T>,
    params: &ProblemParams<T>,
    cfg: &SolverConfig,
) -> Result<Field<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    check_state(&state.values, grid)?;
    bc.validate()?;
    let op = Operator::new(grid, params.dim());
    let mut ws = Workspace::new(grid.len());
    let mut values = state.values.clone();
    advance(
        &op,
        &mut ws,
        &mut values,
        dt,
        bc.inner.dirichlet_value(),
        bc.outer.dirichlet_value(),
        None,
        params.p(),
        cfg,
    )?;
    check_output(&values)?;
    Ok(Field {
        values,
        time: state.time + dt,
    })
}

/// `min(0.25 h_min², 10⁻³ t_end)`.
pub fn default_dt<T: Real>(grid: &RadialGrid<T>, t_end: T) -> T {
    let h = grid.min_gap();
    (T::lit(0.25) * h * h).min(T::lit(1e-3) * t_end)
}

/// Step sizes landing exactly on each output time.
pub(crate) fn schedule_steps<T: Real>(t_end: T, dt: T, outputs: &[T]) -> Result<Vec<(T, bool)>> {
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return Err(Error::Domain(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if outputs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "output times must be strictly increasing".into(),
        ));
    }
    if outputs.iter().any(|&t| !(t >= T::zero() && t <= t_end)) {
        return Err(Error::Domain("output times must lie in [0, t_end]".into()));
    }
    let mut marks: Vec<T> = outputs.iter().copied().filter(|&t| t > T::zero()).collect();
    if marks.last().is_none_or(|&t| t < t_end) {
        marks.push(t_end);
    }
    let mut steps = Vec::new();
    let mut t = T::zero();
    for &mark in &marks {
        let span = mark - t;
        let k = (span / dt).ceil().to_usize().unwrap_or(1).max(1);
        let h = span / T::from_count(k);
        for j in 0..k {
            let record = j + 1 == k && outputs.contains(&mark);
            steps.push((h, record));
        }
        t = mark;
    }
    Ok(steps)
}

/// Integrate from `initial` (sampled on the grid) to `t_end`, recording a
/// snapshot at each of `output_times` (defaults to `[t_end]` when empty).
#[allow(clippy::too_many_arguments)]
pub fn solve<T: Real>(
    initial: &[T],
    grid: &RadialGrid<T>,
    bc: &BoundaryCondition<T>,
    params: &ProblemParams<T>,
    t_end: T,
    dt: T,
    output_times: &[T],
    cfg: &SolverConfig,
) -> Result<Trajectory<T>> {
    check_state(initial, grid)?;
    bc.validate()?;
    let outputs: Vec<T> = if output_times.is_empty() {
        vec![t_end]
    } else {
        output_times.to_vec()
    };
    let plan = schedule_steps(t_end, dt, &outputs)?;
    let op = Operator::new(grid, params.dim());
    let mut ws = Workspace::new(grid.len());
    let mut values = initial.to_vec();
    let mut snapshots = Vec::with_capacity(outputs.len());
    let mut stats = StepStats {
        steps: 0,
        dt_min: T::infinity(),
        dt_max: T::zero(),
        max_value: values.iter().copied().fold(T::zero(), T::max),
        min_value: values.iter().copied().fold(T::infinity(), T::min),
        newton_iterations: 0,
        upwind_nodes: op.upwind_nodes,
    };
    if outputs.first() == Some(&T::zero()) {
        snapshots.push(Field {
            values: values.clone(),
            time: T::zero(),
        });
    }
    let (inner, outer) = (bc.inner.dirichlet_value(), bc.outer.dirichlet_value());
    let mut t = T::zero();
    for (h, record) in plan {
        stats.newton_iterations += advance(
            &op,
            &mut ws,
            &mut values,
            h,
            inner,
            outer,
            None,
            params.p(),
            cfg,
        )?;
        check_output(&values)?;
        t = t + h;
        stats.steps += 1;
        stats.dt_min = stats.dt_min.min(h);
        stats.dt_max = stats.dt_max.max(h);
        for &v in &values {
            stats.max_value = stats.max_value.max(v);
            stats.min_value = stats.min_value.min(v);
        }
        if record {
            let time = outputs
                .iter()
                .copied()
                .find(|&o| (o - t).abs() <= T::lit(1e-9) * t_end)
                .unwrap_or(t);
            snapshots.push(Field {
                values: values.clone(),
                time,
            });
        }
    }
    Ok(Trajectory {
        snapshots,
        step_stats: stats,
    })
}

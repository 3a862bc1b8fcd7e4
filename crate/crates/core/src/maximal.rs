//! Maximal solutions with zero initial data, approximated by boundary data
//! `M_k` on annuli `(ε_k, R_k)` with `M_k ↑`, `ε_k ↓`, `R_k ↑`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{stationary_amplitude, ProblemParams};
use crate::scalar::Real;
use crate::solver::{solve, BoundaryCondition, RadialGrid, SolverConfig};

/// Boundary height of each stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryHeights<T> {
    Fixed(Vec<T>),
    /// `M_k = factor · ε_k^(-2/(p-1))`, the size of the stationary profile at `ε_k`.
    Scaled {
        factor: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OuterBoundary {
    /// Outer Dirichlet value equals the inner one.
    SameAsInner,
    /// Outer Dirichlet value zero (diagnostics only).
    Zero,
}

/// Node placement per stage: geometric gaps starting at `first_gap_fraction · ε_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound = "T: Real")]
pub struct GridPolicy<T> {
    pub ratio: T,
    pub first_gap_fraction: T,
}

impl<T: Real> Default for GridPolicy<T> {
    fn default() -> Self {
        Self {
            ratio: T::lit(1.05),
            first_gap_fraction: T::lit(0.05),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound = "T: Real")]
pub struct Schedule<T> {
    pub heights: BoundaryHeights<T>,
    pub eps_seq: Vec<T>,
    pub r_seq: Vec<T>,
    pub t_end: T,
    pub probe_r: T,
    /// Probe threshold θ separating trivial from nontrivial limits.
    pub theta: T,
    /// Stabilization window `w`.
    pub window: usize,
    pub grid: GridPolicy<T>,
    /// Time step; `None` uses `10⁻³ t_end`.
    pub dt: Option<T>,
    pub outer: OuterBoundary,
}

pub const DEFAULT_THETA: f64 = 1e-3;

impl<T: Real> Default for Schedule<T> {
    fn default() -> Self {
        Self::standard()
    }
}

pub const DEFAULT_WINDOW: usize = 3;

impl<T: Real> Schedule<T> {
    /// Four stages with `ε_k ∈ {10⁻⁶, 10⁻¹⁴, 10⁻²², 10⁻³⁰}`, `R_k ∈ {10, 20, 40, 80}` and
    /// `M_k = 10 ε_k^(-2/(p-1))`, probed at `r = 1`, `t = 1`.
    pub fn standard() -> Self {
        Self {
            heights: BoundaryHeights::Scaled {
                factor: T::lit(10.0),
            },
            eps_seq: [1e-6, 1e-14, 1e-22, 1e-30].map(T::lit).to_vec(),
            r_seq: [10.0, 20.0, 40.0, 80.0].map(T::lit).to_vec(),
            t_end: T::one(),
            probe_r: T::one(),
            theta: T::lit(DEFAULT_THETA),
            window: DEFAULT_WINDOW,
            grid: GridPolicy::default(),
            dt: None,
            outer: OuterBoundary::SameAsInner,
        }
    }

    /// Geometric progression: `ε_k = eps0 · eps_step^k`, `R_k = r0 · 2^k`.
    pub fn geometric(stages: usize, eps0: T, eps_step: T, r0: T, factor: T) -> Self {
        let eps_seq = (0..stages)
            .map(|k| eps0 * eps_step.powi(k as i32))
            .collect();
        let r_seq = (0..stages)
            .map(|k| r0 * T::lit(2.0).powi(k as i32))
            .collect();
        Self {
            heights: BoundaryHeights::Scaled { factor },
            eps_seq,
            r_seq,
            ..Self::standard()
        }
    }

    pub fn stages(&self) -> usize {
        self.eps_seq.len()
    }

    pub fn dt(&self) -> T {
        self.dt.unwrap_or(T::lit(1e-3) * self.t_end)
    }

    /// Boundary heights `M_k` for `params`.
    pub fn heights_for(&self, params: &ProblemParams<T>) -> Vec<T> {
        match &self.heights {
            BoundaryHeights::Fixed(m) => m.clone(),
            BoundaryHeights::Scaled { factor } => {
                let a = params.decay_exponent();
                self.eps_seq.iter().map(|&e| *factor * e.powf(-a)).collect()
            }
        }
    }

    pub fn validate(&self, params: &ProblemParams<T>) -> Result<()> {
        let bad = |msg: String| Err(Error::Schedule(msg));
        let k = self.stages();
        if k == 0 {
            return bad("schedule has no stages".into());
        }
        if self.r_seq.len() != k {
            return bad(format!("{} radii for {k} stages", self.r_seq.len()));
        }
        if let BoundaryHeights::Fixed(m) = &self.heights {
            if m.len() != k {
                return bad(format!("{} heights for {k} stages", m.len()));
            }
        }
        if let BoundaryHeights::Scaled { factor } = self.heights {
            if !(factor > T::zero()) || !factor.is_finite() {
                return bad(format!("height factor must be positive, got {factor}"));
            }
        }
        let m = self.heights_for(params);
        if m.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
            return bad("boundary heights must be positive and finite".into());
        }
        if m.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("boundary heights must increase".into());
        }
        if self
            .eps_seq
            .iter()
            .any(|&e| !(e > T::zero() && e < T::one()))
        {
            return bad("inner radii must lie in (0, 1)".into());
        }
        if self.eps_seq.windows(2).any(|w| !(w[0] > w[1])) {
            return bad("inner radii must decrease".into());
        }
        if self
            .r_seq
            .iter()
            .any(|&r| !(r > T::one()) || !r.is_finite())
        {
            return bad("outer radii must be finite and > 1".into());
        }
        if self.r_seq.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("outer radii must increase".into());
        }
        if !(self.probe_r > self.eps_seq[0] && self.probe_r < self.r_seq[0]) {
            return bad(format!(
                "probe radius {} leaves the annulus ({}, {})",
                self.probe_r, self.eps_seq[0], self.r_seq[0]
            ));
        }
        if !(self.t_end > T::zero()) || !self.t_end.is_finite() {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.theta > T::zero()) {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        if let Some(dt) = self.dt {
            if !(dt > T::zero()) || !dt.is_finite() {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        RadialGrid::graded(
            self.eps_seq[0],
            self.r_seq[0],
            self.grid.ratio,
            self.grid.first_gap_fraction,
        )
        .map(|_| ())
        .map_err(|e| Error::Schedule(format!("grid policy: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Trivial,
    Nontrivial,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Trivial => "Trivial",
            Verdict::Nontrivial => "Nontrivial",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Largest relative spread `(max - min) / max` for which values count as stabilized.
pub const STABILIZATION_SPREAD: f64 = 0.2;

/// Classify a sequence of probe values.
///
/// Needs at least `window + 1` values. Nontrivial if the last `window` values
/// exceed `theta` with relative spread below 20%; Trivial if they are at most
/// `theta` and strictly decreasing; otherwise Inconclusive.
pub fn classify_dichotomy<T: Real>(values: &[T], theta: T, window: usize) -> Verdict {
    if window == 0 || values.len() < window + 1 {
        return Verdict::Inconclusive;
    }
    let tail = &values[values.len() - window..];
    if tail.iter().any(|v| !v.is_finite()) {
        return Verdict::Inconclusive;
    }
    let max = tail.iter().copied().fold(T::neg_infinity(), T::max);
    let min = tail.iter().copied().fold(T::infinity(), T::min);
    if min > theta && (max - min) / max < T::lit(STABILIZATION_SPREAD) {
        return Verdict::Nontrivial;
    }
    if max <= theta && tail.windows(2).all(|w| w[1] < w[0]) {
        return Verdict::Trivial;
    }
    Verdict::Inconclusive
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult<T> {
    pub stage: usize,
    pub m: T,
    pub epsilon: T,
    pub r_outer: T,
    pub probe_value: T,
    /// Probe value of the same stage rerun with the previous stage's height.
    pub companion_probe: Option<T>,
    pub nodes: usize,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MaximalRunReport<T> {
    pub params: ProblemParams<T>,
    pub stages: Vec<StageResult<T>>,
    pub probe_values: Vec<T>,
    pub verdict: Verdict,
    /// `W(probe_r)` when a stationary profile exists.
    pub stationary_reference: Option<T>,
    /// Last probe value divided by `W(probe_r)`.
    pub reference_ratio: Option<T>,
    pub monotonicity_ok: bool,
    pub theta: T,
    pub window: usize,
}

impl<T: Real> MaximalRunReport<T> {
    pub fn final_probe(&self) -> T {
        *self
            .probe_values
            .last()
            .expect("report has at least one stage")
    }

    /// CSV with header `stage,M,eps,R,probe_value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,M,eps,R,probe_value\n");
        for s in &self.stages {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{:e}\n",
                s.stage, s.m, s.epsilon, s.r_outer, s.probe_value
            ));
        }
        out
    }
}

impl<T: Real> fmt::Display for MaximalRunReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}, p = {}", self.params.n(), self.params.p())?;
        for s in &self.stages {
            write!(
                f,
                "stage {}: M = {:.3e}, eps = {:.3e}, R = {}, nodes = {}, u(probe) = {:.6e}",
                s.stage, s.m, s.epsilon, s.r_outer, s.nodes, s.probe_value
            )?;
            if let Some(c) = s.companion_probe {
                write!(f, " (previous M: {c:.6e})")?;
            }
            writeln!(f)?;
        }
        if let (Some(w), Some(ratio)) = (self.stationary_reference, self.reference_ratio) {
            writeln!(f, "W(probe) = {w:.6e}, ratio = {ratio:.4}")?;
        }
        writeln!(f, "monotone: {}", self.monotonicity_ok)?;
        write!(f, "verdict: {}", self.verdict)
    }
}

/// Relative slack allowed in the stage monotonicity check.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

struct StageRun<T> {
    probe: T,
    nodes: usize,
    steps: usize,
}

fn run_stage<T: Real>(
    params: &ProblemParams<T>,
    schedule: &Schedule<T>,
    grid: &RadialGrid<T>,
    m: T,
    cfg: &SolverConfig,
) -> Result<StageRun<T>> {
    let outer = match schedule.outer {
        OuterBoundary::SameAsInner => m,
        OuterBoundary::Zero => T::zero(),
    };
    let bc = BoundaryCondition::dirichlet(m, outer);
    let g = vec![T::zero(); grid.len()];
    let traj = solve(
        &g,
        grid,
        &bc,
        params,
        schedule.t_end,
        schedule.dt(),
        &[],
        cfg,
    )?;
    Ok(StageRun {
        probe: grid.interpolate(&traj.last().values, schedule.probe_r),
        nodes: grid.len(),
        steps: traj.step_stats.steps,
    })
}

/// Solve every stage from zero initial data and classify the probe values.
///
/// From the second stage on, the stage is rerun with the previous height on
/// the same grid; the probe must not decrease with the height.
pub fn run_schedule<T: Real>(
    params: &ProblemParams<T>,
    schedule: &Schedule<T>,
    cfg: &SolverConfig,
) -> Result<MaximalRunReport<T>> {
    schedule.validate(params)?;
    let heights = schedule.heights_for(params);
    let mut stages = Vec::with_capacity(schedule.stages());
    let mut monotonicity_ok = true;
    for k in 0..schedule.stages() {
        let (eps, r_outer) = (schedule.eps_seq[k], schedule.r_seq[k]);
        let grid = RadialGrid::graded(
            eps,
            r_outer,
            schedule.grid.ratio,
            schedule.grid.first_gap_fraction,
        )?;
        let run = run_stage(params, schedule, &grid, heights[k], cfg)?;
        let companion_probe = if k > 0 {
            let lower = run_stage(params, schedule, &grid, heights[k - 1], cfg)?.probe;
            if run.probe < lower * (T::one() - T::lit(MONOTONICITY_SLACK)) {
                monotonicity_ok = false;
            }
            Some(lower)
        } else {
            None
        };
        stages.push(StageResult {
            stage: k,
            m: heights[k],
            epsilon: eps,
            r_outer,
            probe_value: run.probe,
            companion_probe,
            nodes: run.nodes,
            steps: run.steps,
        });
    }
    let probe_values: Vec<T> = stages.iter().map(|s| s.probe_value).collect();
    let verdict = if monotonicity_ok {
        classify_dichotomy(&probe_values, schedule.theta, schedule.window)
    } else {
        Verdict::Inconclusive
    };
    let stationary_reference = stationary_amplitude(params)
        .ok()
        .and_then(|w| w.value(schedule.probe_r).ok());
    let reference_ratio = stationary_reference.map(|w| probe_values[probe_values.len() - 1] / w);
    Ok(MaximalRunReport {
        params: *params,
        stages,
        probe_values,
        verdict,
        stationary_reference,
        reference_ratio,
        monotonicity_ok,
        theta: schedule.theta,
        window: schedule.window,
    })
}

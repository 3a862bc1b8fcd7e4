//! JSON run configuration, merged with command-line overrides.

use std::path::Path;

use punctured_core::barrier::{BarrierCase, BarrierParams, ScanSpec, SearchConfig, DEFAULT_DELTA0};
use punctured_core::maximal::Schedule;
use punctured_core::problem::ProblemParams;
use punctured_core::solver::SolverConfig;
use serde::Deserialize;

use crate::Overrides;

/// A configuration problem, reported with the offending field path.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err(path: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{path}: {msg}"))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<u32>,
    pub p: Option<f64>,
    #[serde(default)]
    pub barrier: BarrierSection,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub solve: SolveSection,
    #[serde(default)]
    pub schedule: Schedule<f64>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSection {
    /// Defaults to the case matching the regime.
    pub case: Option<BarrierCase>,
    #[serde(rename = "R")]
    pub r_outer: Option<f64>,
    #[serde(rename = "eps")]
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub l: Option<f64>,
    pub c: Option<f64>,
    pub delta0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveSection {
    #[serde(rename = "R")]
    pub r_outer: f64,
    #[serde(rename = "eps")]
    pub epsilon: f64,
    pub grid_count: usize,
    /// Geometric gap ratio; 1 gives a uniform grid.
    pub ratio: f64,
    pub t_end: f64,
    pub dt: Option<f64>,
    /// Inner Dirichlet value.
    pub inner: f64,
    /// Outer Dirichlet value.
    pub outer: f64,
    /// Constant initial value.
    pub initial: f64,
    pub output_times: Vec<f64>,
    /// Compare the trajectory with a calibrated barrier.
    pub check_domination: bool,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self {
            r_outer: 10.0,
            epsilon: 0.01,
            grid_count: 200,
            ratio: 1.05,
            t_end: 1.0,
            dt: None,
            inner: 10.0,
            outer: 0.0,
            initial: 0.0,
            output_times: Vec::new(),
            check_domination: false,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub p_values: Vec<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| err(&path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." {
                "config".to_string()
            } else {
                path
            };
            err(&path, e.inner())
        })
    }

    /// Apply command-line overrides; flags win over the file.
    pub fn apply(&mut self, o: &Overrides) {
        self.n = o.n.or(self.n);
        self.p = o.p.or(self.p);
        let b = &mut self.barrier;
        b.r_outer = o.r_outer.or(b.r_outer);
        b.epsilon = o.eps.or(b.epsilon);
        b.gamma = o.gamma.or(b.gamma);
        b.l = o.l.or(b.l);
        b.c = o.c.or(b.c);
        let s = &mut self.solve;
        s.r_outer = o.r_outer.unwrap_or(s.r_outer);
        s.epsilon = o.eps.unwrap_or(s.epsilon);
        s.grid_count = o.grid_count.unwrap_or(s.grid_count);
        s.t_end = o.t_end.unwrap_or(s.t_end);
        s.dt = o.dt.or(s.dt);
        if let Some(m) = o.inner {
            s.inner = m;
        }
        self.schedule.t_end = o.t_end.unwrap_or(self.schedule.t_end);
        self.schedule.dt = o.dt.or(self.schedule.dt);
        if let Some(ps) = &o.p_values {
            self.sweep.p_values = ps.clone();
        }
    }

    pub fn problem(&self) -> Result<ProblemParams<f64>, ConfigError> {
        let n = self
            .n
            .ok_or_else(|| err("n", "missing (use --n or the config file)"))?;
        let p = self
            .p
            .ok_or_else(|| err("p", "missing (use --p or the config file)"))?;
        ProblemParams::new(n, p).map_err(|e| err("n/p", e))
    }

    pub fn n_only(&self) -> Result<u32, ConfigError> {
        let n = self
            .n
            .ok_or_else(|| err("n", "missing (use --n or the config file)"))?;
        ProblemParams::new(n, 2.0).map_err(|e| err("n", e))?;
        Ok(n)
    }

    /// Barrier parameters; `γ` defaults to 1 when absent.
    pub fn barrier(&self, params: &ProblemParams<f64>) -> Result<BarrierParams<f64>, ConfigError> {
        let b = &self.barrier;
        let r_outer = b
            .r_outer
            .ok_or_else(|| err("barrier.R", "missing (use --R)"))?;
        let epsilon = b
            .epsilon
            .ok_or_else(|| err("barrier.eps", "missing (use --eps)"))?;
        let gamma = b.gamma.unwrap_or(1.0);
        let delta0 = b.delta0.unwrap_or(DEFAULT_DELTA0);
        let case = match b.case {
            Some(c) => c,
            None => BarrierCase::for_regime(params.regime().tag).ok_or_else(|| {
                err(
                    "n/p",
                    format!(
                        "no barrier for the {} regime (barriers need p >= n/(n-2))",
                        params.regime().tag
                    ),
                )
            })?,
        };
        let built = match case {
            BarrierCase::General => {
                let l =
                    b.l.unwrap_or_else(|| punctured_core::barrier::default_l(params));
                BarrierParams::general(r_outer, epsilon, l, gamma, delta0)
            }
            BarrierCase::Borderline => {
                let c = b.c.unwrap_or(punctured_core::barrier::DEFAULT_LOG_SHIFT);
                BarrierParams::borderline(r_outer, epsilon, c, gamma, delta0)
            }
        }
        .map_err(|e| err("barrier", e))?;
        built
            .check_regime(params)
            .map_err(|e| err("barrier.case", e))?;
        built
            .validate_for(params)
            .map_err(|e| err("barrier.l", e))?;
        self.scan.validate().map_err(|e| err("scan", e))?;
        Ok(built)
    }
}

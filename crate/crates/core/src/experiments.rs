//! Sweeps over `p` at fixed `n` and bracketing of the critical exponent.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximal::{run_schedule, MaximalRunReport, Schedule, Verdict};
use crate::problem::ProblemParams;
use crate::scalar::Real;
use crate::solver::SolverConfig;

/// Relative distance to `n/(n-2)` below which a row is marked near-critical.
pub const NEAR_CRITICAL_BAND: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SweepSpec<T> {
    pub n: u32,
    pub p_values: Vec<T>,
    pub schedule: Schedule<T>,
    /// CSV destination; the JSON summary goes next to it.
    pub output: Option<PathBuf>,
}

impl<T: Real> SweepSpec<T> {
    pub fn new(n: u32, p_values: Vec<T>) -> Self {
        Self {
            n,
            p_values,
            schedule: Schedule::standard(),
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_values.is_empty() {
            return Err(Error::Domain("sweep needs at least one p".into()));
        }
        if self.p_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("p values must be strictly increasing".into()));
        }
        for &p in &self.p_values {
            self.schedule.validate(&ProblemParams::new(self.n, p)?)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SweepRow<T> {
    pub p: T,
    pub verdict: Verdict,
    pub probe_value: T,
    pub m_last: T,
    pub eps_last: T,
    pub r_last: T,
    /// Within 5% of `n/(n-2)`, where the transition is slow.
    pub near_critical: bool,
    /// Breaks the Nontrivial-then-Trivial ordering.
    pub flagged: bool,
    pub report: MaximalRunReport<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SweepResult<T> {
    pub n: u32,
    pub rows: Vec<SweepRow<T>>,
    /// Midpoint of the last Nontrivial and first Trivial `p`.
    pub estimated_pc: Option<T>,
    /// The bracketing pair behind `estimated_pc`.
    pub bracket: Option<(T, T)>,
    /// `n/(n-2)`, infinite for `n = 2`.
    pub true_pc: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalComparison<T> {
    pub estimated_pc: T,
    pub true_pc: T,
    /// `|estimated - true| / true`.
    pub relative_gap: T,
    pub bracket: (T, T),
    pub bracket_contains_truth: bool,
}

/// Index of the first Trivial row if the verdicts read Nontrivial…Trivial
/// with at least one of each; marks offending rows otherwise.
fn bracket_rows<T>(rows: &mut [SweepRow<T>]) -> Option<usize> {
    let first_trivial = rows.iter().position(|r| r.verdict == Verdict::Trivial);
    let last_nontrivial = rows.iter().rposition(|r| r.verdict == Verdict::Nontrivial);
    let ordered = rows.iter().all(|r| r.verdict != Verdict::Inconclusive)
        && match (last_nontrivial, first_trivial) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        };
    if !ordered {
        for (i, row) in rows.iter_mut().enumerate() {
            row.flagged = match row.verdict {
                Verdict::Inconclusive => true,
                Verdict::Nontrivial => first_trivial.is_some_and(|b| i > b),
                Verdict::Trivial => last_nontrivial.is_some_and(|a| i < a),
            };
        }
        return None;
    }
    match (last_nontrivial, first_trivial) {
        (Some(_), Some(b)) => Some(b),
        _ => None,
    }
}

fn near_critical<T: Real>(p: T, pc: T) -> bool {
    pc.is_finite() && ((p - pc) / pc).abs() <= T::lit(NEAR_CRITICAL_BAND)
}

/// Assemble a result from per-`p` reports, ordered by `p`.
pub fn collect_sweep<T: Real>(n: u32, reports: Vec<MaximalRunReport<T>>) -> Result<SweepResult<T>> {
    let true_pc = ProblemParams::new(n, T::lit(2.0))?.critical_exponent();
    let mut rows: Vec<SweepRow<T>> = reports
        .into_iter()
        .map(|report| {
            let last = report.stages.last().expect("report has at least one stage");
            let p = report.params.p();
            SweepRow {
                p,
                verdict: report.verdict,
                probe_value: last.probe_value,
                m_last: last.m,
                eps_last: last.epsilon,
                r_last: last.r_outer,
                near_critical: near_critical(p, true_pc),
                flagged: false,
                report,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.p.partial_cmp(&b.p).expect("p values are finite"));
    let split = bracket_rows(&mut rows);
    let bracket = split.map(|b| (rows[b - 1].p, rows[b].p));
    Ok(SweepResult {
        n,
        estimated_pc: bracket.map(|(lo, hi)| (lo + hi) / T::lit(2.0)),
        bracket,
        rows,
        true_pc,
    })
}

/// Run the schedule for every `p` on a pool of `jobs` workers (0 = one per core).
pub fn sweep_p<T: Real>(
    spec: &SweepSpec<T>,
    cfg: &SolverConfig,
    jobs: usize,
) -> Result<SweepResult<T>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Domain(format!("worker pool: {e}")))?;
    let reports: Vec<MaximalRunReport<T>> = pool.install(|| {
        spec.p_values
            .par_iter()
            .map(|&p| run_schedule(&ProblemParams::new(spec.n, p)?, &spec.schedule, cfg))
            .collect::<Result<_>>()
    })?;
    let result = collect_sweep(spec.n, reports)?;
    if let Some(path) = &spec.output {
        write_reports(&result, path)?;
    }
    Ok(result)
}

/// Compare the bracket midpoint with `n/(n-2)`.
pub fn estimate_critical_exponent<T: Real>(
    result: &SweepResult<T>,
    n: u32,
) -> Result<CriticalComparison<T>> {
    let (estimated_pc, bracket) = match (result.estimated_pc, result.bracket) {
        (Some(e), Some(b)) => (e, b),
        _ => return Err(Error::MissingEstimate),
    };
    let true_pc = ProblemParams::new(n, T::lit(2.0))?.critical_exponent();
    if !true_pc.is_finite() {
        return Err(Error::MissingEstimate);
    }
    Ok(CriticalComparison {
        estimated_pc,
        true_pc,
        relative_gap: (estimated_pc - true_pc).abs() / true_pc,
        bracket,
        bracket_contains_truth: bracket.0 < true_pc && true_pc <= bracket.1,
    })
}

#[derive(Serialize)]
struct SummaryRow<T> {
    p: T,
    verdict: Verdict,
    probe_value: T,
    near_critical: bool,
    flagged: bool,
    probe_values: Vec<T>,
}

#[derive(Serialize)]
struct Summary<T> {
    n: u32,
    estimated_pc: Option<T>,
    true_pc: Option<T>,
    rows: Vec<SummaryRow<T>>,
}

impl<T: Real> SweepResult<T> {
    /// CSV with header `n,p,verdict,probe_value,M_last,eps_last,R_last`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p,verdict,probe_value,M_last,eps_last,R_last\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{:e},{:e}\n",
                self.n, r.p, r.verdict, r.probe_value, r.m_last, r.eps_last, r.r_last
            ));
        }
        out
    }

    /// JSON summary with `estimated_pc`, `true_pc` (null when infinite) and rows.
    pub fn summary_json(&self) -> String {
        let summary = Summary {
            n: self.n,
            estimated_pc: self.estimated_pc,
            true_pc: self.true_pc.is_finite().then_some(self.true_pc),
            rows: self
                .rows
                .iter()
                .map(|r| SummaryRow {
                    p: r.p,
                    verdict: r.verdict,
                    probe_value: r.probe_value,
                    near_critical: r.near_critical,
                    flagged: r.flagged,
                    probe_values: r.report.probe_values.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    }
}

/// Write the CSV to `path` and the JSON summary to `path` with extension `json`.
pub fn write_reports<T: Real>(result: &SweepResult<T>, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Domain(format!("{}: {e}", path.display()));
    fs::write(path, result.to_csv()).map_err(io)?;
    fs::write(path.with_extension("json"), result.summary_json()).map_err(io)?;
    Ok(())
}

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use punctured_core::barrier::{
    calibrate_barrier, scan_grid, term_breakdown, verify_supersolution, Band, BarrierCase,
    VerificationReport,
};
use punctured_core::experiments::{estimate_critical_exponent, sweep_p, SweepSpec};
use punctured_core::maximal::run_schedule;
use punctured_core::problem::stationary_amplitude;
use punctured_core::solver::{
    build_grid, check_domination, default_dt, solve as integrate, BoundaryCondition, Spacing,
};
use punctured_core::Error;

use crate::config::{ConfigError, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_VERIFICATION: u8 = 3;
pub const EXIT_SEARCH: u8 = 4;
pub const EXIT_SOLVER: u8 = 5;

pub struct Context {
    pub cfg: RunConfig,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub type Outcome = Result<u8, Failure>;

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: format!("config error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Solve(_) => EXIT_SOLVER,
            Error::NotFound(_) => EXIT_SEARCH,
            _ => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Integers print bare, other values to four decimals marked `≈`.
fn approx(name: &str, x: f64) -> String {
    if (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0) {
        format!("{name}={}", x.round())
    } else {
        format!("{name}≈{x:.4}")
    }
}

fn write_out(ctx: &Context, body: &str) -> Result<bool, Failure> {
    match &ctx.out {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure {
                code: EXIT_CONFIG,
                message: format!("cannot write {}: {e}", path.display()),
            })?;
            Ok(true)
        }
        None => Ok(false),
    }
}

pub fn regime(ctx: &Context) -> Outcome {
    let params = ctx.cfg.problem()?;
    let regime = params.regime();
    let head = if params.n() == 2 {
        format!("{} (n=2: all p>1)", regime.tag)
    } else {
        format!(
            "{}, {}",
            regime.tag,
            approx("p_c", regime.critical_exponent)
        )
    };
    let tail = match stationary_amplitude(&params) {
        Ok(w) => format!("W amplitude {}", approx("C", w.amplitude)),
        Err(_) => "no stationary profile".to_string(),
    };
    println!("{head}, {tail}");
    Ok(EXIT_OK)
}

fn print_verification(report: &VerificationReport<f64>) {
    let bp = &report.params_used;
    let shape = match bp.case {
        BarrierCase::General => format!("l={}", bp.l),
        BarrierCase::Borderline => format!("c={}", bp.c),
    };
    println!(
        "case: {}, R={}, eps={}, gamma={}, {shape}, delta0={}",
        bp.case, bp.r_outer, bp.epsilon, bp.gamma, bp.delta0
    );
    println!(
        "max sum: {:.6e} at r={:.6e}, t={} (largest term {:.3e})",
        report.max_sum, report.argmax.0, report.argmax.1, report.max_abs_term_at_argmax
    );
    for b in &report.bands {
        println!(
            "  {:?}: {} points, max sum {:.6e} at r={:.6e}, t={}",
            b.band, b.points, b.max_sum, b.argmax.0, b.argmax.1
        );
    }
    println!(
        "verdict: {}",
        if report.passed { "passed" } else { "failed" }
    );
}

pub fn barrier_verify(ctx: &Context) -> Outcome {
    let params = ctx.cfg.problem()?;
    let bp = ctx.cfg.barrier(&params)?;
    let report = verify_supersolution(&bp, &params, &ctx.cfg.scan)?;
    print_verification(&report);
    if ctx.out.is_some() {
        let mut csv = String::from("r,t,sum,max_abs_term,band\n");
        for r in scan_grid(&bp, ctx.cfg.scan.r_count) {
            for t in ctx.cfg.scan.times::<f64>() {
                let tb = term_breakdown(r, t, &bp, &params)?;
                let _ = writeln!(
                    csv,
                    "{r:e},{t},{:e},{:e},{:?}",
                    tb.sum,
                    tb.max_abs_term(),
                    Band::of(r, &bp)
                );
            }
        }
        write_out(ctx, &csv)?;
    }
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}

pub fn gamma_search(ctx: &Context) -> Outcome {
    let params = ctx.cfg.problem()?;
    let template = ctx.cfg.barrier(&params)?;
    let search = punctured_core::barrier::SearchConfig {
        scan: ctx.cfg.scan,
        ..ctx.cfg.search
    };
    let bp = calibrate_barrier(&template, &params, &search)?;
    match bp.case {
        BarrierCase::General => println!("gamma*={} (l={})", bp.gamma, bp.l),
        BarrierCase::Borderline => println!("gamma*={} (c={})", bp.gamma, bp.c),
    }
    Ok(EXIT_OK)
}

pub fn solve(ctx: &Context) -> Outcome {
    let params = ctx.cfg.problem()?;
    let s = &ctx.cfg.solve;
    let spacing = if s.ratio == 1.0 {
        Spacing::Uniform
    } else {
        Spacing::Geometric(s.ratio)
    };
    let grid = build_grid(s.epsilon, s.r_outer, s.grid_count, spacing)
        .map_err(|e| Failure::from(ConfigError(format!("solve: {e}"))))?;
    let bc = BoundaryCondition::dirichlet(s.inner, s.outer);
    if let Err(e) = bc.validate() {
        return Err(ConfigError(format!("solve.inner/outer: {e}")).into());
    }
    if s.initial.is_nan() || s.initial < 0.0 {
        return Err(ConfigError("solve.initial: must be >= 0".into()).into());
    }
    let dt = s.dt.unwrap_or_else(|| default_dt(&grid, s.t_end));
    let g = vec![s.initial; grid.len()];
    let traj = integrate(
        &g,
        &grid,
        &bc,
        &params,
        s.t_end,
        dt,
        &s.output_times,
        &ctx.cfg.solver,
    )?;
    let mut csv = String::from("t,r,u\n");
    for snap in &traj.snapshots {
        for (r, u) in grid.nodes.iter().zip(&snap.values) {
            let _ = writeln!(csv, "{},{r:e},{u:e}", snap.time);
        }
    }
    if !write_out(ctx, &csv)? {
        print!("{csv}");
    }
    let st = &traj.step_stats;
    eprintln!(
        "{} steps, dt={:e}, u in [{:e}, {:e}], {} nodes",
        st.steps,
        st.dt_max,
        st.min_value,
        st.max_value,
        grid.len()
    );
    if s.check_domination {
        let barrier_cfg = RunConfig {
            barrier: crate::config::BarrierSection {
                r_outer: Some(s.r_outer),
                epsilon: Some(s.epsilon),
                ..Default::default()
            },
            ..Default::default()
        };
        let template = barrier_cfg.barrier(&params)?;
        let search = punctured_core::barrier::SearchConfig {
            scan: ctx.cfg.scan,
            ..ctx.cfg.search
        };
        let bp = calibrate_barrier(&template, &params, &search)?;
        let dom = check_domination(&traj, &grid, &bp, &params, &ctx.cfg.scan)?;
        println!(
            "domination: max u/psi = {:.6e} at r={:e}, t={} (gamma={}), {}",
            dom.max_ratio,
            dom.argmax.0,
            dom.argmax.1,
            bp.gamma,
            if dom.dominated {
                "dominated"
            } else {
                "violated"
            }
        );
        if !dom.dominated {
            return Ok(EXIT_VERIFICATION);
        }
    }
    Ok(EXIT_OK)
}

pub fn maximal(ctx: &Context) -> Outcome {
    let params = ctx.cfg.problem()?;
    ctx.cfg
        .schedule
        .validate(&params)
        .map_err(|e| Failure::from(ConfigError(format!("schedule: {e}"))))?;
    let report = run_schedule(&params, &ctx.cfg.schedule, &ctx.cfg.solver)?;
    println!("{report}");
    if !write_out(ctx, &report.to_csv())? {
        print!("{}", report.to_csv());
    }
    Ok(EXIT_OK)
}

pub fn sweep(ctx: &Context) -> Outcome {
    let n = ctx.cfg.n_only()?;
    let spec = SweepSpec {
        n,
        p_values: ctx.cfg.sweep.p_values.clone(),
        schedule: ctx.cfg.schedule.clone(),
        output: ctx.out.clone(),
    };
    spec.validate()
        .map_err(|e| Failure::from(ConfigError(format!("sweep: {e}"))))?;
    let result = sweep_p(&spec, &ctx.cfg.solver, ctx.jobs)?;
    if ctx.out.is_none() {
        print!("{}", result.to_csv());
        println!("{}", result.summary_json());
    }
    for row in result.rows.iter().filter(|r| r.near_critical || r.flagged) {
        let mut notes = Vec::new();
        if row.near_critical {
            notes.push("near-critical");
        }
        if row.flagged {
            notes.push("breaks verdict ordering");
        }
        eprintln!("p={}: {}", row.p, notes.join(", "));
    }
    match estimate_critical_exponent(&result, n) {
        Ok(c) => eprintln!(
            "estimated p_c = {} (bracket {}..{}), true {}, relative gap {:.3}",
            c.estimated_pc, c.bracket.0, c.bracket.1, c.true_pc, c.relative_gap
        ),
        Err(e) => eprintln!("{e}"),
    }
    Ok(EXIT_OK)
}

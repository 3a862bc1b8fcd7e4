use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

#[derive(Parser)]
#[command(
    name = "punctured",
    version,
    about = "Barriers, radial solves and maximal solutions for u_t = Δu - u^p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regime, critical exponent and stationary amplitude.
    Regime(Common),
    /// Scan the barrier defect; exit 3 if the barrier is not a supersolution.
    BarrierVerify(Common),
    /// Smallest γ making the barrier a supersolution; exit 4 if none.
    GammaSearch(Common),
    /// Integrate the radial equation and write the trajectory as CSV.
    Solve(Common),
    /// Run a maximal-solution schedule and classify the limit.
    Maximal(Common),
    /// Sweep p at fixed n and bracket the critical exponent.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (CSV); sweeps also write a `.json` summary next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    overrides: Overrides,
}

/// Per-command overrides of config-file values.
#[derive(Args, Default)]
pub struct Overrides {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Outer radius.
    #[arg(long = "R")]
    pub r_outer: Option<f64>,
    /// Inner radius.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub grid_count: Option<usize>,
    /// Inner Dirichlet value for `solve`.
    #[arg(long = "M")]
    pub inner: Option<f64>,
    /// Comma-separated exponents for `sweep`.
    #[arg(long, value_delimiter = ',')]
    pub p_values: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&commands::Context) -> commands::Outcome) = match &cli.command {
        Command::Regime(c) => (c, commands::regime),
        Command::BarrierVerify(c) => (c, commands::barrier_verify),
        Command::GammaSearch(c) => (c, commands::gamma_search),
        Command::Solve(c) => (c, commands::solve),
        Command::Maximal(c) => (c, commands::maximal),
        Command::Sweep(c) => (c, commands::sweep),
    };
    let mut cfg = match &common.config {
        Some(path) => match config::RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(commands::EXIT_CONFIG);
            }
        },
        None => config::RunConfig::default(),
    };
    cfg.apply(&common.overrides);
    let ctx = commands::Context {
        cfg,
        out: common.out.clone(),
        jobs: common.jobs,
    };
    match run(&ctx) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

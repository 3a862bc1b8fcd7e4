//! One test per acceptance criterion. Each prints a `criterion N: PASS|FAIL`
//! line (visible with `--nocapture`) and fails if the criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::fd_defect;
use punctured_core::barrier::{
    calibrate_barrier, check_key_inequalities, delicate_grid, log_ratio_bound, term_breakdown,
    verify_supersolution, BarrierParams, ScanSpec, SearchConfig,
};
use punctured_core::experiments::{estimate_critical_exponent, sweep_p, SweepSpec};
use punctured_core::maximal::{run_schedule, Schedule, Verdict};
use punctured_core::problem::{radial_residual, stationary_amplitude, ProblemParams};
use punctured_core::solver::{
    build_grid, check_domination, convergence_study, solve, BoundaryCondition, ConvergenceStudy,
    RadialGrid, SolverConfig, Spacing,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(id: u32, limit: Duration, start: Instant, ok: bool, detail: String) {
    let elapsed = start.elapsed();
    let pass = ok && elapsed < limit;
    println!(
        "criterion {id}: {} ({detail}; {:.2}s, limit {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(pass, "criterion {id} failed: {detail}");
}

fn params(n: u32, p: f64) -> ProblemParams<f64> {
    ProblemParams::new(n, p).unwrap()
}

#[test]
fn criterion_1_stationary_oracle() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (n, p) in [(3, 2.0), (2, 2.0), (3, 1.5), (2, 3.0)] {
        let pr = params(n, p);
        let w = stationary_amplitude(&pr).unwrap();
        for k in 0..1000 {
            let r = 10f64.powf(-3.0 + 6.0 * k as f64 / 999.0);
            let (u, du, ddu) = w.derivatives(r).unwrap();
            let res = radial_residual(u, du, ddu, r, &pr).unwrap();
            worst = worst.max(res.abs() / u.powf(p));
        }
    }
    report(
        1,
        Duration::from_secs(1),
        start,
        worst <= 1e-10,
        format!("max |residual|/W^p = {worst:.2e}"),
    );
}

#[test]
fn criterion_2_defect_identity() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    let cases = [
        (
            BarrierParams::<f64>::general(10.0, 0.01, 0.5, 2.0, 0.1).unwrap(),
            params(5, 2.0),
        ),
        (
            BarrierParams::borderline(10.0, 0.01, 4.0, 2.2, 0.1).unwrap(),
            params(4, 2.0),
        ),
    ];
    let mut worst = 0.0f64;
    for (bp, pr) in &cases {
        for _ in 0..200 {
            let r = bp.epsilon * (bp.r_outer / bp.epsilon).powf(rng.gen_range(0.01..0.99));
            let t = rng.gen_range(0.1..2.0);
            let tb = term_breakdown(r, t, bp, pr).unwrap();
            let (fd, scale) = fd_defect(r, t, bp, pr);
            worst = worst.max((tb.defect() - fd).abs() / scale);
        }
    }
    report(
        2,
        Duration::from_secs(5),
        start,
        worst <= 1e-6,
        format!("max relative mismatch = {worst:.2e}"),
    );
}

#[test]
fn criterion_3_barrier_verification() {
    let start = Instant::now();
    let scan = ScanSpec::default();
    let search = SearchConfig::default();
    let mut ok = true;
    let mut gammas = Vec::new();
    for (general, pr) in [(true, params(5, 2.0)), (false, params(4, 2.0))] {
        for r_outer in [10.0, 100.0] {
            for eps in [0.01, 0.001] {
                let template = if general {
                    BarrierParams::general(r_outer, eps, 0.5, 1.0, 0.1).unwrap()
                } else {
                    BarrierParams::borderline(r_outer, eps, 2.0, 1.0, 0.1).unwrap()
                };
                let bp = match calibrate_barrier(&template, &pr, &search) {
                    Ok(bp) => bp,
                    Err(_) => {
                        ok = false;
                        continue;
                    }
                };
                gammas.push(bp.gamma);
                let at = |g: f64| {
                    verify_supersolution(&bp.with_gamma(g).unwrap(), &pr, &scan)
                        .unwrap()
                        .passed
                };
                ok &= bp.gamma.is_finite() && at(bp.gamma) && at(2.0 * bp.gamma) && !at(1e-6);
            }
        }
    }

    let mut rng = StdRng::seed_from_u64(3);
    let mut sign_failures = 0;
    for k in 0..10_000 {
        let p: f64 = rng.gen_range(1.2..=3.0);
        let eps = rng.gen_range(1e-4..0.5);
        let r_outer = rng.gen_range(2.0..200.0);
        let gamma = rng.gen_range(1e-3..50.0);
        let (bp, pr) = if k % 2 == 0 {
            let n = (2.0 * p / (p - 1.0)).floor() as u32 + 1 + rng.gen_range(0..4);
            let l = rng.gen_range(0.01..=1.0) * (1.0f64).min(1.0 / (p - 1.0));
            (
                BarrierParams::general(r_outer, eps, l, gamma, (2.0 * eps).max(0.1)).unwrap(),
                params(n, p),
            )
        } else {
            let n: u32 = rng.gen_range(3..12);
            let c = rng.gen_range(2.0..50.0);
            (
                BarrierParams::borderline(r_outer, eps, c, gamma, (2.0 * eps).max(0.1)).unwrap(),
                params(n, n as f64 / (n as f64 - 2.0)),
            )
        };
        let r = eps + rng.gen_range(1e-3..0.999) * ((r_outer + eps) / 2.0 - eps);
        let tb = term_breakdown(r, rng.gen_range(0.0..5.0), &bp, &pr).unwrap();
        let positive = [
            tb.j_term(1),
            tb.j_term(2),
            tb.j_term(4),
            tb.j_term(5),
            tb.j_term(7),
            tb.i_term(2),
        ];
        let negative = [
            tb.j_term(3),
            tb.j_term(6),
            tb.i_term(1),
            tb.i_term(3),
            tb.i_term(4),
            tb.i_term(5),
        ];
        if positive.iter().any(|&x| x < 0.0) || negative.iter().any(|&x| x > 0.0) {
            sign_failures += 1;
        }
    }
    ok &= sign_failures == 0;
    report(
        3,
        Duration::from_secs(60),
        start,
        ok,
        format!("gamma* = {gammas:.4?}, sign-pattern failures {sign_failures}/10000"),
    );
}

#[test]
fn criterion_4_key_inequalities() {
    let start = Instant::now();
    let search = SearchConfig::default();
    let general = calibrate_barrier(
        &BarrierParams::general(10.0, 0.01, 0.5, 1.0, 0.1).unwrap(),
        &params(5, 2.0),
        &search,
    )
    .unwrap();
    let rep = check_key_inequalities(
        &general,
        &params(5, 2.0),
        1.0,
        0.5,
        &delicate_grid(&general, 1000),
    )
    .unwrap();
    let j2 = rep.get("J_2").unwrap().clone();
    let fin = rep.get("final").unwrap().clone();
    let l_ok = general.l * (2.0 - 1.0) <= 1.0;

    let border = calibrate_barrier(
        &BarrierParams::borderline(10.0, 0.01, 2.0, 1.0, 0.1).unwrap(),
        &params(4, 2.0),
        &search,
    )
    .unwrap();
    let rep_b = check_key_inequalities(
        &border,
        &params(4, 2.0),
        1.0,
        0.5,
        &delicate_grid(&border, 1000),
    )
    .unwrap();
    let j2b = rep_b.get("J_2").unwrap().clone();
    let logb = rep_b.get("log-bounded").unwrap().clone();
    let brute = (0..=200_000)
        .map(|k| 1.0 + k as f64 * 1e-3)
        .map(|x: f64| (border.c * x).ln() / x)
        .fold(0.0f64, f64::max);
    let bound = log_ratio_bound(border.c);
    let ok = j2.passed
        && j2b.passed
        && l_ok
        && fin.passed
        && logb.passed
        && brute <= bound * (1.0 + 1e-12)
        && logb.measured <= brute * (1.0 + 1e-9);
    report(
        4,
        Duration::from_secs(10),
        start,
        ok,
        format!(
            "J_2 measured {:.3} / {:.3} (M=1), final {:.3} <= {}, log-bounded {:.4} <= {:.4} (brute {:.4})",
            j2.measured, j2b.measured, fin.measured, fin.bound, logb.measured, bound, brute
        ),
    );
}

fn ordered(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(&x, &y)| x <= y * (1.0 + 1e-12) + 1e-300)
}

#[test]
fn criterion_5_solver_validation() {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let pr = params(3, 2.0);
    let spatial = convergence_study(&ConvergenceStudy::spatial_default(), &pr, &cfg).unwrap();
    let temporal = convergence_study(&ConvergenceStudy::temporal_default(), &pr, &cfg).unwrap();
    let so = spatial.spatial_order.unwrap_or(f64::NAN);
    let to = temporal.temporal_order.unwrap_or(f64::NAN);

    let grid = build_grid(1.0, 2.0, 10, Spacing::Uniform).unwrap();
    let ode = solve(
        &vec![1.0; grid.len()],
        &grid,
        &BoundaryCondition::neumann(),
        &params(3, 2.0),
        1.0,
        1e-4,
        &[],
        &cfg,
    )
    .unwrap();
    let ode_err = ode
        .last()
        .values
        .iter()
        .fold(0.0f64, |m, &v| m.max((v - 0.5).abs()));

    let mut rng = StdRng::seed_from_u64(5);
    let (mut pos, mut cmp_bc, mut cmp_init) = (0, 0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(2..7);
        let p = rng.gen_range(1.1..4.0);
        let eps = 10f64.powf(rng.gen_range(-3.0..-0.5));
        let r_outer = rng.gen_range(2.0..30.0);
        let count = rng.gen_range(8..60);
        let grid = build_grid(
            eps,
            r_outer,
            count,
            Spacing::Geometric(rng.gen_range(1.0..1.1)),
        )
        .unwrap();
        let dt = 10f64.powf(rng.gen_range(-4.0..-1.0));
        let t_end = 20.0 * dt;
        let inner = 10f64.powf(rng.gen_range(-2.0..6.0));
        let outer = 10f64.powf(rng.gen_range(-2.0..3.0));
        let g: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..5.0)).collect();
        let g2: Vec<f64> = g.iter().map(|v| v + rng.gen_range(0.0..3.0)).collect();
        let factor = rng.gen_range(1.0..100.0);
        let pr = params(n, p);
        let run = |g: &[f64], m: f64| {
            solve(
                g,
                &grid,
                &BoundaryCondition::dirichlet(m, outer),
                &pr,
                t_end,
                dt,
                &[t_end / 2.0, t_end],
                &cfg,
            )
            .unwrap()
            .snapshots
        };
        let base = run(&g, inner);
        if base
            .iter()
            .all(|s| s.values.iter().all(|&v| v >= 0.0 && v.is_finite()))
        {
            pos += 1;
        }
        let higher = run(&g, inner * factor);
        if base
            .iter()
            .zip(&higher)
            .all(|(a, b)| ordered(&a.values, &b.values))
        {
            cmp_bc += 1;
        }
        let raised = run(&g2, inner);
        if base
            .iter()
            .zip(&raised)
            .all(|(a, b)| ordered(&a.values, &b.values))
        {
            cmp_init += 1;
        }
    }
    let ok = (1.8..=2.2).contains(&so)
        && (0.8..=1.2).contains(&to)
        && ode_err <= 1e-3
        && pos == 1000
        && cmp_bc == 1000
        && cmp_init == 1000;
    report(
        5,
        Duration::from_secs(120),
        start,
        ok,
        format!(
            "spatial order {so:.3}, temporal order {to:.3}, ODE error {ode_err:.2e}, positivity {pos}/1000, boundary comparison {cmp_bc}/1000, initial comparison {cmp_init}/1000"
        ),
    );
}

#[test]
fn criterion_6_dichotomy() {
    let start = Instant::now();
    let schedule = Schedule::standard();
    let cfg = SolverConfig::default();
    let sub = run_schedule(&params(3, 2.0), &schedule, &cfg).unwrap();
    let sup = run_schedule(&params(5, 2.0), &schedule, &cfg).unwrap();
    let two = run_schedule(&params(2, 2.0), &schedule, &cfg).unwrap();
    let ok = sub.verdict == Verdict::Nontrivial
        && sub.final_probe() > 1e-2
        && sup.verdict == Verdict::Trivial
        && sup.final_probe() < 1e-3
        && two.verdict == Verdict::Nontrivial;
    report(
        6,
        Duration::from_secs(600),
        start,
        ok,
        format!(
            "(3,2) {} u={:.4e}; (5,2) {} u={:.4e}; (2,2) {} u={:.4e}",
            sub.verdict,
            sub.final_probe(),
            sup.verdict,
            sup.final_probe(),
            two.verdict,
            two.final_probe()
        ),
    );
}

#[test]
fn criterion_7_critical_exponent_bracketing() {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (n, ps) in [
        (3, vec![1.5, 2.0, 2.5, 3.5, 4.0, 5.0]),
        (4, vec![1.5, 1.8, 2.2, 2.5]),
    ] {
        let result = sweep_p(&SweepSpec::new(n, ps), &cfg, 4).unwrap();
        match estimate_critical_exponent(&result, n) {
            Ok(cmp) => {
                ok &= cmp.bracket_contains_truth;
                detail.push(format!(
                    "n={n}: bracket ({}, {}) estimate {} true {:.4}",
                    cmp.bracket.0, cmp.bracket.1, cmp.estimated_pc, cmp.true_pc
                ));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("n={n}: {e}"));
            }
        }
    }
    report(7, Duration::from_secs(1800), start, ok, detail.join("; "));
}

#[test]
fn criterion_8_domination() {
    let start = Instant::now();
    let pr = params(5, 2.0);
    let template = BarrierParams::general(10.0, 0.01, 0.5, 1.0, 0.1).unwrap();
    let bp = calibrate_barrier(&template, &pr, &SearchConfig::default()).unwrap();
    let grid = RadialGrid::graded(0.01, 10.0, 1.05, 0.05).unwrap();
    let times: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let traj = solve(
        &vec![0.0; grid.len()],
        &grid,
        &BoundaryCondition::dirichlet(1e3, 1e3),
        &pr,
        1.0,
        1e-3,
        &times,
        &SolverConfig::default(),
    )
    .unwrap();
    let dom = check_domination(&traj, &grid, &bp, &pr, &ScanSpec::default()).unwrap();
    let ok = dom.dominated && dom.max_ratio < 1.0;
    report(
        8,
        Duration::from_secs(60),
        start,
        ok,
        format!(
            "gamma* = {:.4}, max u/psi = {:.4} at (r={:.4}, t={}), {} snapshots",
            bp.gamma,
            dom.max_ratio,
            dom.argmax.0,
            dom.argmax.1,
            traj.snapshots.len()
        ),
    );
}

mod common;

use common::fd_defect;
use proptest::prelude::*;
use punctured_core::barrier::{
    calibrate_barrier, check_key_inequalities, delicate_grid, log_ratio_bound, search_gamma,
    term_breakdown, verify_supersolution, BarrierCase, BarrierParams, ScanSpec, SearchConfig,
};
use punctured_core::problem::ProblemParams;
use punctured_core::Error;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn cases() -> Vec<(BarrierParams<f64>, ProblemParams<f64>)> {
    vec![
        (
            BarrierParams::general(10.0, 0.01, 0.5, 2.0, 0.1).unwrap(),
            ProblemParams::new(5, 2.0).unwrap(),
        ),
        (
            BarrierParams::borderline(10.0, 0.01, 4.0, 2.2, 0.1).unwrap(),
            ProblemParams::new(4, 2.0).unwrap(),
        ),
    ]
}

#[test]
fn defect_matches_finite_differences() {
    let mut rng = StdRng::seed_from_u64(7);
    for (bp, params) in cases() {
        for _ in 0..200 {
            let r = if rng.gen_bool(0.5) {
                bp.epsilon * (bp.r_outer / bp.epsilon).powf(rng.gen_range(0.02..0.98))
            } else {
                bp.epsilon + (bp.r_outer - bp.epsilon) * rng.gen_range(0.01..0.99)
            };
            let t = rng.gen_range(0.1..2.0);
            let tb = term_breakdown(r, t, &bp, &params).unwrap();
            let (fd, scale) = fd_defect(r, t, &bp, &params);
            let err = (tb.defect() - fd).abs() / scale;
            assert!(
                err <= 1e-6,
                "{} r={r} t={t}: {} vs {fd} (rel {err:e})",
                bp.case,
                tb.defect()
            );
        }
    }
}

#[test]
fn verification_passes_at_calibrated_gamma() {
    for (bp, params) in cases() {
        let tuned = calibrate_barrier(&bp, &params, &SearchConfig::default()).unwrap();
        assert!(
            verify_supersolution(&tuned, &params, &ScanSpec::default())
                .unwrap()
                .passed
        );
        let weak = tuned.with_gamma(1e-6).unwrap();
        let report = verify_supersolution(&weak, &params, &ScanSpec::default()).unwrap();
        assert!(!report.passed);
        assert!(report.max_sum > 0.0);
    }
}

#[test]
fn search_rejects_wrong_regime() {
    let bp = BarrierParams::general(10.0, 0.01, 0.5, 1.0, 0.1).unwrap();
    let sub = ProblemParams::new(3, 2.0).unwrap();
    assert!(matches!(
        search_gamma(&bp, &sub, &SearchConfig::default()),
        Err(Error::RegimeMismatch(_))
    ));
    let border = ProblemParams::new(4, 2.0).unwrap();
    assert!(matches!(
        verify_supersolution(&bp, &border, &ScanSpec::default()),
        Err(Error::RegimeMismatch(_))
    ));
}

#[test]
fn search_exhausts_with_tiny_cap() {
    let (bp, params) = cases().remove(0);
    let cfg = SearchConfig {
        gamma_start: 1e-3,
        gamma_cap: 1e-2,
        ..SearchConfig::default()
    };
    assert!(matches!(
        search_gamma(&bp, &params, &cfg),
        Err(Error::NotFound(_))
    ));
}

#[test]
fn key_inequalities_hold() {
    for (bp, params) in cases() {
        let tuned = calibrate_barrier(&bp, &params, &SearchConfig::default()).unwrap();
        let grid = delicate_grid(&tuned, 400);
        let report = check_key_inequalities(&tuned, &params, 1.0, 0.5, &grid).unwrap();
        let j2 = report.get("J_2").unwrap();
        assert!(j2.passed, "{j2:?}");
        match bp.case {
            BarrierCase::General => assert!(report.get("final").unwrap().passed),
            BarrierCase::Borderline => assert!(report.get("log-bounded").unwrap().passed),
        }
    }
}

#[test]
fn log_ratio_bound_dominates_brute_force() {
    for c in [2.0, 4.0, 10.0, 100.0] {
        let brute = (0..=100_000)
            .map(|k| 1.0 + k as f64 * 1e-3)
            .map(|x: f64| (c * x).ln() / x)
            .fold(0.0f64, f64::max);
        assert!(
            brute <= log_ratio_bound(c) * (1.0 + 1e-12),
            "c={c}: {brute}"
        );
    }
}

fn general_case() -> impl Strategy<Value = (BarrierParams<f64>, ProblemParams<f64>, f64, f64)> {
    (
        1.2f64..=3.0,
        0usize..4,
        1e-4f64..0.5,
        2.0f64..200.0,
        0.01f64..=1.0,
        1e-3f64..50.0,
        0.0f64..5.0,
        1e-3f64..0.999,
    )
        .prop_map(|(p, extra, eps, r_outer, lfrac, gamma, t, s)| {
            let threshold = 2.0 * p / (p - 1.0);
            let n = threshold.floor() as u32 + 1 + extra as u32;
            let l = lfrac * (1.0f64).min(1.0 / (p - 1.0));
            let bp = BarrierParams::general(r_outer, eps, l, gamma, (2.0 * eps).max(0.1)).unwrap();
            let r = eps + s * ((r_outer + eps) / 2.0 - eps);
            (bp, ProblemParams::new(n, p).unwrap(), r, t)
        })
}

fn borderline_case() -> impl Strategy<Value = (BarrierParams<f64>, ProblemParams<f64>, f64, f64)> {
    (
        3u32..12,
        1e-4f64..0.5,
        2.0f64..200.0,
        2.0f64..50.0,
        1e-3f64..50.0,
        0.0f64..5.0,
        1e-3f64..0.999,
    )
        .prop_map(|(n, eps, r_outer, c, gamma, t, s)| {
            let p = n as f64 / (n as f64 - 2.0);
            let bp =
                BarrierParams::borderline(r_outer, eps, c, gamma, (2.0 * eps).max(0.1)).unwrap();
            let r = eps + s * ((r_outer + eps) / 2.0 - eps);
            (bp, ProblemParams::new(n, p).unwrap(), r, t)
        })
}

fn check_signs(
    bp: &BarrierParams<f64>,
    params: &ProblemParams<f64>,
    r: f64,
    t: f64,
) -> Result<(), TestCaseError> {
    let tb = term_breakdown(r, t, bp, params).unwrap();
    for k in [1, 2, 4, 5, 7] {
        prop_assert!(tb.j_term(k) >= 0.0, "J{} = {}", k, tb.j_term(k));
    }
    for k in [3, 6] {
        prop_assert!(tb.j_term(k) <= 0.0, "J{} = {}", k, tb.j_term(k));
    }
    prop_assert!(tb.i_term(2) >= 0.0);
    for k in [1, 3, 4, 5] {
        prop_assert!(tb.i_term(k) <= 0.0, "I{} = {}", k, tb.i_term(k));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn sign_pattern_general((bp, params, r, t) in general_case()) {
        check_signs(&bp, &params, r, t)?;
    }

    #[test]
    fn sign_pattern_borderline((bp, params, r, t) in borderline_case()) {
        check_signs(&bp, &params, r, t)?;
    }
}

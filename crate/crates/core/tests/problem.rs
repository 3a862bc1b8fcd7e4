use proptest::prelude::*;
use punctured_core::problem::{
    classify_regime, radial_residual, stationary_amplitude, ProblemParams, RegimeTag,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn regime_forms_agree(n in 2u32..12, p in 1.01f64..10.0) {
        let params = ProblemParams::new(n, p).unwrap();
        let regime = classify_regime(&params);
        let unique = n as f64 >= 2.0 * p / (p - 1.0);
        prop_assert_eq!(regime.tag.is_unique(), unique);
        if regime.tag != RegimeTag::Subcritical {
            prop_assert!(stationary_amplitude(&params).is_err());
        }
    }

    #[test]
    fn stationary_profile_solves_the_ode(n in 2u32..8, frac in 0.01f64..0.99, lr in -3.0f64..3.0) {
        let top = if n == 2 { 8.0 } else { n as f64 / (n as f64 - 2.0) };
        let p = 1.1 + frac * (top - 1.1);
        let params = ProblemParams::new(n, p).unwrap();
        let w = stationary_amplitude(&params).unwrap();
        let r = 10f64.powf(lr);
        let (u, du, ddu) = w.derivatives(r).unwrap();
        let res = radial_residual(u, du, ddu, r, &params).unwrap();
        prop_assert!(res.abs() <= 1e-10 * u.powf(p), "{res} vs {}", u.powf(p));
    }
}

#[test]
fn params_round_trip_through_json() {
    let params = ProblemParams::new(4, 2.5).unwrap();
    let text = serde_json::to_string(&params).unwrap();
    assert_eq!(
        serde_json::from_str::<ProblemParams<f64>>(&text).unwrap(),
        params
    );
    assert!(serde_json::from_str::<ProblemParams<f64>>(r#"{"n": 1, "p": 2}"#).is_err());
    assert!(serde_json::from_str::<ProblemParams<f64>>(r#"{"n": 3, "p": 1}"#).is_err());
}

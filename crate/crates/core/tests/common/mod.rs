use punctured_core::barrier::{psi, BarrierParams};
use punctured_core::problem::ProblemParams;

/// Two Richardson levels on a second-order difference: error `O(h⁶)`.
fn richardson(d: impl Fn(f64) -> f64, h: f64) -> f64 {
    let (a, b, c) = (d(h), d(h / 2.0), d(h / 4.0));
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    (16.0 * bc - ab) / 15.0
}

/// `ψ_rr + ((n-1)/r) ψ_r - ψ^p - ψ_t` from Richardson-extrapolated central
/// differences of `ψ`, together with the sum of the magnitudes of its parts.
pub fn fd_defect(
    r: f64,
    t: f64,
    bp: &BarrierParams<f64>,
    params: &ProblemParams<f64>,
) -> (f64, f64) {
    let f = |r: f64, t: f64| psi(r, t, bp, params).unwrap();
    let h = 0.05 * (r - bp.epsilon).min(bp.r_outer - r).min(r);
    let d1 = |h: f64| (f(r + h, t) - f(r - h, t)) / (2.0 * h);
    let d2 = |h: f64| (f(r + h, t) - 2.0 * f(r, t) + f(r - h, t)) / (h * h);
    let ur = richardson(d1, h);
    let urr = richardson(d2, h);
    let dt = |k: f64| (f(r, t + k) - f(r, t - k)) / (2.0 * k);
    let ut = richardson(dt, 1e-3);
    let u = f(r, t);
    let drift = (params.dim() - 1.0) / r * ur;
    let up = u.powf(params.p());
    (
        urr + drift - up - ut,
        urr.abs() + drift.abs() + up + ut.abs(),
    )
}

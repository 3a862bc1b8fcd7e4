use serde::{Deserialize, Serialize};

use super::{BarrierCase, BarrierParams};
use crate::error::{Error, Result};
use crate::problem::ProblemParams;
use crate::scalar::Real;

/// The twelve terms of the scaled defect at one point `(r, t)`.
///
/// `j[k]` is `J_{k+1}` (second-derivative expansion) and `i[k]` is `I_{k+1}`
/// (drift, time derivative and absorption). They satisfy
///
/// ```text
/// ψ_rr + ((n-1)/r) ψ_r - ψ^p - ψ_t = prefactor * sum
/// prefactor = exp(γ(t+1)) ((r-ε)(R-r))^(-(2/(p-1) + 2))
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermBreakdown<T> {
    pub j: [T; 7],
    pub i: [T; 5],
    pub sum: T,
    pub prefactor: T,
}

impl<T: Real> TermBreakdown<T> {
    fn assemble(j: [T; 7], i: [T; 5], prefactor: T) -> Self {
        let sum = j.iter().chain(i.iter()).fold(T::zero(), |acc, &x| acc + x);
        Self {
            j,
            i,
            sum,
            prefactor,
        }
    }

    /// Largest absolute individual term.
    pub fn max_abs_term(&self) -> T {
        self.j
            .iter()
            .chain(self.i.iter())
            .fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// `prefactor * sum`.
    pub fn defect(&self) -> T {
        self.prefactor * self.sum
    }

    pub fn j_term(&self, k: usize) -> T {
        self.j[k - 1]
    }

    pub fn i_term(&self, k: usize) -> T {
        self.i[k - 1]
    }
}

/// Shared geometric pieces at a radius.
struct Pieces<T> {
    /// `2/(p-1)`
    a: T,
    /// `(r-ε)(R-r)`
    q: T,
    /// `R + ε - 2r`
    dq: T,
    /// `1 + r`
    b: T,
    /// `(n-1)/r`
    drift: T,
    /// shape factor: `1 + (ε/r)^l R^a` or `1 + (R²/log(cr/ε))^(1/(p-1))`
    f: T,
}

fn check_annulus<T: Real>(r: T, bp: &BarrierParams<T>) -> Result<()> {
    if !(r > bp.epsilon && r < bp.r_outer) {
        return Err(Error::Domain(format!(
            "r = {r} outside the open annulus ({}, {})",
            bp.epsilon, bp.r_outer
        )));
    }
    Ok(())
}

fn log_arg<T: Real>(r: T, bp: &BarrierParams<T>) -> T {
    let l = (bp.c * r / bp.epsilon).ln();
    assert!(
        l > T::zero(),
        "log(cr/eps) must be positive for c >= 2 and r >= eps"
    );
    l
}

fn pieces<T: Real>(r: T, bp: &BarrierParams<T>, params: &ProblemParams<T>) -> Pieces<T> {
    let p = params.p();
    let a = params.decay_exponent();
    let (eps, big_r) = (bp.epsilon, bp.r_outer);
    let f = match bp.case {
        BarrierCase::General => T::one() + (eps / r).powf(bp.l) * big_r.powf(a),
        BarrierCase::Borderline => {
            let l = log_arg(r, bp);
            T::one() + (big_r * big_r / l).powf(T::one() / (p - T::one()))
        }
    };
    Pieces {
        a,
        q: (r - eps) * (big_r - r),
        dq: big_r + eps - T::lit(2.0) * r,
        b: T::one() + r,
        drift: (params.dim() - T::one()) / r,
        f,
    }
}

/// Spatial profile `φ(r)` on `ε < r < R`.
pub fn phi<T: Real>(r: T, bp: &BarrierParams<T>, params: &ProblemParams<T>) -> Result<T> {
    check_annulus(r, bp)?;
    bp.validate()?;
    let pc = pieces(r, bp, params);
    Ok(pc.q.powf(-pc.a) * pc.b.powf(pc.a) * pc.f)
}

/// `ψ(r, t) = φ(r) exp(γ(t+1))`.
pub fn psi<T: Real>(r: T, t: T, bp: &BarrierParams<T>, params: &ProblemParams<T>) -> Result<T> {
    check_time(t)?;
    Ok(phi(r, bp, params)? * (bp.gamma * (t + T::one())).exp())
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// Term decomposition of the scaled defect at `(r, t)`.
pub fn term_breakdown<T: Real>(
    r: T,
    t: T,
    bp: &BarrierParams<T>,
    params: &ProblemParams<T>,
) -> Result<TermBreakdown<T>> {
    check_annulus(r, bp)?;
    check_time(t)?;
    bp.validate()?;
    Ok(terms_at(r, t, bp, params))
}

/// `ψ_rr + ((n-1)/r) ψ_r - ψ^p - ψ_t`, nonpositive where `ψ` is a supersolution.
pub fn defect<T: Real>(r: T, t: T, bp: &BarrierParams<T>, params: &ProblemParams<T>) -> Result<T> {
    Ok(term_breakdown(r, t, bp, params)?.defect())
}

/// Terms without domain checks; valid on the closed band `ε <= r < R`
/// (the terms stay finite at `r = ε` even though `ψ` does not).
pub(crate) fn terms_at<T: Real>(
    r: T,
    t: T,
    bp: &BarrierParams<T>,
    params: &ProblemParams<T>,
) -> TermBreakdown<T> {
    let pc = pieces(r, bp, params);
    let Pieces {
        a,
        q,
        dq,
        b,
        drift,
        f,
    } = pc;
    let one = T::one();
    let two = T::lit(2.0);
    let p = params.p();
    let (eps, big_r) = (bp.epsilon, bp.r_outer);
    let ra = big_r.powf(a);
    let ba = b.powf(a);
    let ba1 = b.powf(a - one);
    let ba2 = b.powf(a - two);
    let q2 = q * q;
    let growth = bp.gamma * (t + one);

    let j1 = a * (a + one) * dq * dq * ba * f;
    let j2 = two * a * q * ba * f;
    let j3 = -two * a * a * q * dq * ba1 * f;
    let j5 = a * (a - one) * q2 * ba2 * f;
    let i1 = -a * drift * q * dq * ba * f;
    let i2 = a * drift * q2 * ba1 * f;
    let i4 = -bp.gamma * q2 * ba * f;
    let i5 = -b.powf(two * p / (p - one)) * f.powf(p) * ((p - one) * growth).exp();

    let (j4, j6, j7, i3) = match bp.case {
        BarrierCase::General => {
            let l = bp.l;
            // ε^l / r^(l+1) R^a and ε^l / r^(l+2) R^a
            let g1 = (eps / r).powf(l) / r * ra;
            let g2 = g1 / r;
            (
                two * l * a * q * dq * ba * g1,
                -two * l * a * q2 * ba1 * g1,
                l * (l + one) * q2 * ba * g2,
                -l * drift * q2 * ba * g1,
            )
        }
        BarrierCase::Borderline => {
            let inv = one / (p - one);
            let lg = log_arg(r, bp);
            // 1 / (r log^(p/(p-1))) R^a
            let h1 = ra / (r * lg.powf(p * inv));
            let h2 = one / (r * r * lg.powf(p * inv))
                + p * inv / (r * r * lg.powf((two * p - one) * inv));
            (
                a * a * q * dq * ba * h1,
                -a * a * q2 * ba1 * h1,
                inv * q2 * ba * h2 * ra,
                -inv * drift * q2 * ba * h1,
            )
        }
    };
    let prefactor = growth.exp() * q.powf(-(a + two));
    TermBreakdown::assemble(
        [j1, j2, j3, j4, j5, j6, j7],
        [i1, i2, i3, i4, i5],
        prefactor,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn general_example() -> (BarrierParams<f64>, ProblemParams<f64>) {
        (
            BarrierParams::general(2.0, 0.5, 1.0, 2f64.ln(), 0.6).unwrap(),
            ProblemParams::new(3, 3.0).unwrap(),
        )
    }

    #[test]
    fn phi_general_example() {
        let (bp, params) = general_example();
        // (0.5 * 1)^-1 * 2 * (1 + 0.5 * 2) = 8
        assert!((phi(1.0, &bp, &params).unwrap() - 8.0).abs() < 1e-13);
    }

    #[test]
    fn phi_borderline_example() {
        let bp = BarrierParams::borderline(2.0, 0.25, 2.0, 1.0, 0.5).unwrap();
        let params = ProblemParams::new(4, 2.0).unwrap();
        let expected = (0.75f64).powi(-2) * 4.0 * (1.0 + 4.0 / 8f64.ln());
        let got = phi(1.0, &bp, &params).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected);
        assert!((got - 20.79).abs() < 0.01);
    }

    #[test]
    fn phi_blows_up_at_edges() {
        let (bp, params) = general_example();
        let near_inner = phi(0.5 + 1e-12, &bp, &params).unwrap();
        let near_outer = phi(2.0 - 1e-12, &bp, &params).unwrap();
        assert!(near_inner > 1e10);
        assert!(near_outer > 1e10);
        assert!(phi(0.5, &bp, &params).is_err());
        assert!(phi(2.0, &bp, &params).is_err());
        assert!(phi(0.1, &bp, &params).is_err());
    }

    #[test]
    fn psi_time_growth() {
        let (bp, params) = general_example();
        let base = phi(1.2, &bp, &params).unwrap();
        assert!((psi(1.2, 0.0, &bp, &params).unwrap() - 2.0 * base).abs() < 1e-12 * base);
        assert!((psi(1.2, 1.0, &bp, &params).unwrap() - 4.0 * base).abs() < 1e-12 * base);
        assert!((psi(1.0, 0.0, &bp, &params).unwrap() - 16.0).abs() < 1e-12);
        assert!(psi(1.0, -0.1, &bp, &params).is_err());
    }

    #[test]
    fn only_j1_and_i5_survive_at_inner_edge() {
        for bp in [
            BarrierParams::<f64>::general(10.0, 0.01, 0.5, 3.0, 0.1).unwrap(),
            BarrierParams::borderline(10.0, 0.01, 4.0, 3.0, 0.1).unwrap(),
        ] {
            let params = match bp.case {
                BarrierCase::General => ProblemParams::new(5, 2.0).unwrap(),
                BarrierCase::Borderline => ProblemParams::new(4, 2.0).unwrap(),
            };
            let r = bp.epsilon * (1.0 + 1e-8);
            let tb = term_breakdown(r, 0.0, &bp, &params).unwrap();
            let scale = tb.j_term(1).abs() + tb.i_term(5).abs();
            assert!(tb.j_term(1) > 0.0 && tb.i_term(5) < 0.0);
            for k in 2..=7 {
                assert!(
                    tb.j_term(k).abs() <= 1e-6 * scale,
                    "J{k} = {}",
                    tb.j_term(k)
                );
            }
            for k in 1..=4 {
                assert!(
                    tb.i_term(k).abs() <= 1e-6 * scale,
                    "I{k} = {}",
                    tb.i_term(k)
                );
            }
        }
    }

    #[test]
    fn defect_is_prefactor_times_sum() {
        let bp = BarrierParams::<f64>::general(10.0, 0.01, 0.5, 3.0, 0.1).unwrap();
        let params = ProblemParams::new(5, 2.0).unwrap();
        let tb = term_breakdown(0.37, 0.4, &bp, &params).unwrap();
        assert_eq!(
            defect(0.37, 0.4, &bp, &params).unwrap(),
            tb.prefactor * tb.sum
        );
        assert!(tb.prefactor > 0.0);
    }

    #[test]
    fn j7_proportional_to_i3_in_general_case() {
        let bp = BarrierParams::<f64>::general(10.0, 0.01, 0.5, 3.0, 0.1).unwrap();
        let params = ProblemParams::new(5, 2.0).unwrap();
        for &r in &[0.011, 0.05, 0.3, 2.0, 9.0] {
            let tb = term_breakdown(r, 0.0, &bp, &params).unwrap();
            let want = (0.5 + 1.0) / 4.0 * tb.i_term(3).abs();
            assert!((tb.j_term(7) - want).abs() <= 1e-12 * want);
        }
    }
}

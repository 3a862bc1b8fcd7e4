//! Pointwise checks of the auxiliary inequalities that control the delicate
//! band `ε <= r <= δ₀`. Each check reports the smallest constant (or largest
//! value) that makes the inequality hold on the supplied grid.

use serde::{Deserialize, Serialize};

use super::terms::{terms_at, TermBreakdown};
use super::{BarrierCase, BarrierParams};
use crate::error::{Error, Result};
use crate::problem::ProblemParams;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck<T> {
    pub name: String,
    pub statement: String,
    /// Minimal constant / maximal ratio / maximal value found on the grid.
    pub measured: T,
    /// The bound `measured` is compared against.
    pub bound: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyInequalityReport<T> {
    pub case: BarrierCase,
    pub m: T,
    pub kappa: T,
    pub points: usize,
    pub checks: Vec<InequalityCheck<T>>,
}

impl<T: Real> KeyInequalityReport<T> {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&InequalityCheck<T>> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `max(log c, c/e)`, a uniform bound on `(ε/r) log(cr/ε)` for `r >= ε`.
pub fn log_ratio_bound<T: Real>(c: T) -> T {
    c.ln().max(c / T::E())
}

/// Grid on the closed band `[ε, δ₀]`: `ε` itself followed by points geometric
/// in `r - ε` from `10⁻⁶ ε` to `δ₀ - ε`.
pub fn delicate_grid<T: Real>(bp: &BarrierParams<T>, count: usize) -> Vec<T> {
    let eps = bp.epsilon;
    let start = T::lit(1e-6) * eps;
    let end = bp.delta0 - eps;
    let n = count.max(3) - 1;
    let step = (end / start).ln() / T::from_count(n - 1);
    let mut grid = vec![eps];
    grid.extend((0..n).map(|k| eps + start * (step * T::from_count(k)).exp()));
    *grid.last_mut().expect("nonempty") = bp.delta0;
    grid
}

struct Acc<T> {
    name: &'static str,
    statement: &'static str,
    value: T,
}

impl<T: Real> Acc<T> {
    fn new(name: &'static str, statement: &'static str) -> Self {
        Self {
            name,
            statement,
            value: T::neg_infinity(),
        }
    }

    fn push(&mut self, x: T) {
        if x.is_finite() && x > self.value {
            self.value = x;
        }
    }

    fn finish(self, bound: T, passed: impl Fn(T, T) -> bool) -> InequalityCheck<T> {
        InequalityCheck {
            name: self.name.to_string(),
            statement: self.statement.to_string(),
            measured: self.value,
            bound,
            passed: passed(self.value, bound),
        }
    }
}

fn ratio<T: Real>(num: T, den: T) -> T {
    if den == T::zero() {
        if num <= T::zero() {
            T::neg_infinity()
        } else {
            T::infinity()
        }
    } else {
        num / den
    }
}

fn rel_dev<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).abs() / scale
    }
}

/// Evaluate the delicate-band inequalities of the barrier family on `r_grid`
/// (every point must lie in `[ε, δ₀]`).
pub fn check_key_inequalities<T: Real>(
    bp: &BarrierParams<T>,
    params: &ProblemParams<T>,
    m: T,
    kappa: T,
    r_grid: &[T],
) -> Result<KeyInequalityReport<T>> {
    bp.validate_for(params)?;
    if r_grid.is_empty() {
        return Err(Error::Domain("empty inequality grid".into()));
    }
    if let Some(&bad) = r_grid
        .iter()
        .find(|&&r| !(r >= bp.epsilon && r <= bp.delta0))
    {
        return Err(Error::Domain(format!(
            "r = {bad} outside [eps, delta0] = [{}, {}]",
            bp.epsilon, bp.delta0
        )));
    }
    let checks = match bp.case {
        BarrierCase::General => general_checks(bp, params, m, kappa, r_grid),
        BarrierCase::Borderline => borderline_checks(bp, params, m, kappa, r_grid),
    };
    Ok(KeyInequalityReport {
        case: bp.case,
        m,
        kappa,
        points: r_grid.len(),
        checks,
    })
}

struct Local<T> {
    tb: TermBreakdown<T>,
    /// shape factor `F`
    f: T,
    /// `(ε/r) R`
    er: T,
    /// `(1+r)^(2/(p-1)) (R + ε - 2r) F`
    envelope: T,
}

fn local<T: Real>(r: T, bp: &BarrierParams<T>, params: &ProblemParams<T>) -> Local<T> {
    let p = params.p();
    let a = params.decay_exponent();
    let (eps, big_r) = (bp.epsilon, bp.r_outer);
    let f = match bp.case {
        BarrierCase::General => T::one() + (eps / r).powf(bp.l) * big_r.powf(a),
        BarrierCase::Borderline => {
            let lg = (bp.c * r / eps).ln();
            T::one() + (big_r * big_r / lg).powf(T::one() / (p - T::one()))
        }
    };
    Local {
        tb: terms_at(r, T::zero(), bp, params),
        f,
        er: eps / r * big_r,
        envelope: (T::one() + r).powf(a) * (big_r + eps - T::lit(2.0) * r) * f,
    }
}

fn exact_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::lit(1e4) * T::epsilon())
}

fn common_j2<T: Real>(
    acc: &mut Acc<T>,
    r: T,
    bp: &BarrierParams<T>,
    params: &ProblemParams<T>,
    f: T,
) {
    let x = (r - bp.epsilon) * bp.r_outer;
    acc.push(ratio(x, x * x + f.powf(params.p() - T::one())));
}

fn general_checks<T: Real>(
    bp: &BarrierParams<T>,
    params: &ProblemParams<T>,
    m: T,
    kappa: T,
    grid: &[T],
) -> Vec<InequalityCheck<T>> {
    let one = T::one();
    let p = params.p();
    let n1 = params.dim() - one;
    let a = params.decay_exponent();
    let (eps, big_r) = (bp.epsilon, bp.r_outer);

    let mut j2 = Acc::new(
        "J_2",
        "(r-eps)R <= M (r-eps)^2 R^2 + M (1 + eps^l/r^l R^(2/(p-1)))^(p-1)",
    );
    let mut j5 = Acc::new("J5<=|I4|", "J5 <= |I4|");
    let mut j7 = Acc::new(
        "J7=(l+1)/(n-1)|I3|",
        "J7 = (l+1)/(n-1) |I3| (relative deviation)",
    );
    let mut j2i = Acc::new("J2<=|I4|+|I5|", "J2 <= |I4| + |I5|");
    let mut kap = Acc::new("J_1", "J4 + I2 <= kappa |I1| (required kappa)");
    let mut fac = Acc::new(
        "J_1I_1",
        "J1 + (1-kappa) I1 equals its factored form (relative deviation)",
    );
    let mut factor = Acc::new("factor", "bracket <= C (eps/r) R (minimal C)");
    let mut est = Acc::new(
        "estimate",
        "J1 + J4 + I2 + I1 <= C (eps/r) R (1+r)^(2/(p-1)) (R+eps-2r) F (minimal C)",
    );
    let mut sum5 = Acc::new("J_1I_1I_5", "J1 + J4 + I2 + I1 + I5 <= 0 (maximum)");
    let mut fin = Acc::new(
        "final",
        "(eps/r) R^2 <= M (1 + eps^l/r^l R^(2/(p-1)))^(p-1) (minimal M)",
    );

    for &r in grid {
        let Local {
            tb,
            f,
            er,
            envelope,
        } = local(r, bp, params);
        let j = |k: usize| tb.j_term(k);
        let i = |k: usize| tb.i_term(k);
        common_j2(&mut j2, r, bp, params, f);
        j5.push(ratio(j(5), i(4).abs()));
        j7.push(rel_dev(j(7), (bp.l + one) / n1 * i(3).abs()));
        j2i.push(ratio(j(2), i(4).abs() + i(5).abs()));
        if i(1) != T::zero() {
            kap.push((j(4) + i(2)) / i(1).abs());
        }
        let bracket = T::lit(2.0) * (p + one) / ((p - one) * (p - one))
            * (big_r + eps - T::lit(2.0) * r)
            - (one - kappa) * T::lit(2.0) * n1 / (p - one) * ((r - eps) / r) * (big_r - r);
        let factored = (one + r).powf(a) * (big_r + eps - T::lit(2.0) * r) * f * bracket;
        fac.push(rel_dev(j(1) + (one - kappa) * i(1), factored));
        factor.push(bracket / er);
        est.push((j(1) + j(4) + i(2) + i(1)) / (er * envelope));
        sum5.push(j(1) + j(4) + i(2) + i(1) + i(5));
        fin.push(er * big_r / f.powf(p - one));
    }

    let tol = exact_tolerance::<T>();
    let le = |x: T, b: T| x <= b;
    vec![
        j2.finish(m, le),
        j5.finish(one, le),
        j7.finish(tol, le),
        j2i.finish(one, le),
        kap.finish(kappa, le),
        fac.finish(T::lit(1e-10).max(tol), le),
        factor.finish(T::infinity(), |x, _| x.is_finite()),
        est.finish(T::infinity(), |x, _| x.is_finite()),
        sum5.finish(T::zero(), le),
        fin.finish(m, le),
    ]
}

fn borderline_checks<T: Real>(
    bp: &BarrierParams<T>,
    params: &ProblemParams<T>,
    m: T,
    _kappa: T,
    grid: &[T],
) -> Vec<InequalityCheck<T>> {
    let one = T::one();
    let p = params.p();
    let (eps, big_r, c) = (bp.epsilon, bp.r_outer, bp.c);

    let mut j2 = Acc::new("J_2", "(r-eps)R <= M (r-eps)^2 R^2 + M F^(p-1)");
    let mut j5 = Acc::new("J5<=|I4|", "J5 <= |I4|");
    let mut j2i = Acc::new("J2<=|I4|+|I5|", "J2 <= |I4| + |I5|");
    let mut i2 = Acc::new("I2<=|J3|", "I2 <= |J3|");
    let mut j7 = Acc::new("J7<=|I3|", "J7 <= |I3|");
    let mut j4 = Acc::new("J4<=|I5|", "J4 <= |I5|");
    let mut ji = Acc::new(
        "JI",
        "J1 + I1 <= C (eps/r) R (1+r)^(2/(p-1)) (R+eps-2r) F (minimal C)",
    );
    let mut sum3 = Acc::new("J1+I1+I5", "J1 + I1 + I5 <= 0 (maximum)");
    let mut thats = Acc::new(
        "that'sit",
        "(eps/r) R^2 <= M (1 + (R^2/log(cr/eps))^(1/(p-1)))^(p-1) (minimal M)",
    );
    let mut logb = Acc::new("log-bounded", "(eps/r) log(cr/eps) <= max(log c, c/e)");

    for &r in grid {
        let Local {
            tb,
            f,
            er,
            envelope,
        } = local(r, bp, params);
        let j = |k: usize| tb.j_term(k);
        let i = |k: usize| tb.i_term(k);
        common_j2(&mut j2, r, bp, params, f);
        j5.push(ratio(j(5), i(4).abs()));
        j2i.push(ratio(j(2), i(4).abs() + i(5).abs()));
        i2.push(ratio(i(2), j(3).abs()));
        j7.push(ratio(j(7), i(3).abs()));
        j4.push(ratio(j(4), i(5).abs()));
        ji.push((j(1) + i(1)) / (er * envelope));
        sum3.push(j(1) + i(1) + i(5));
        thats.push(er * big_r / f.powf(p - one));
        logb.push(eps / r * (c * r / eps).ln());
    }

    let le = |x: T, b: T| x <= b;
    vec![
        j2.finish(m, le),
        j5.finish(one, le),
        j2i.finish(one, le),
        i2.finish(one, le),
        j7.finish(one, le),
        j4.finish(one, le),
        ji.finish(T::infinity(), |x, _| x.is_finite()),
        sum3.finish(T::zero(), le),
        thats.finish(m, le),
        logb.finish(log_ratio_bound(c), le),
    ]
}

//! Grid verification of the supersolution inequality and the search for the
//! growth rate `γ` (and, in the borderline case, the log shift `c`).
//!
//! The radial scan mesh has three graded segments:
//! * `[ε, δ₀]`: geometric in `r - ε`, from `10⁻⁴ ε` up, with eight times the
//!   per-decade density of the other segments;
//! * `[δ₀, R/2]`: geometric in `r`;
//! * `[R/2, R)`: geometric in `R - r`, down to `10⁻⁴ R`.

use serde::{Deserialize, Serialize};

use super::terms::terms_at;
use super::{BarrierCase, BarrierParams};
use crate::error::{Error, Result};
use crate::problem::ProblemParams;
use crate::scalar::Real;

/// Tensor scan over radius and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub r_count: usize,
    pub t_max: f64,
    pub t_count: usize,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            r_count: 2000,
            t_max: 1.0,
            t_count: 5,
        }
    }
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if self.r_count < 8 {
            return Err(Error::Domain(format!(
                "scan needs >= 8 radii, got {}",
                self.r_count
            )));
        }
        if self.t_count == 0 || !(self.t_max >= 0.0) {
            return Err(Error::Domain(
                "scan needs t_count >= 1 and t_max >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn times<T: Real>(&self) -> Vec<T> {
        if self.t_count == 1 {
            return vec![T::zero()];
        }
        let tm = T::lit(self.t_max);
        (0..self.t_count)
            .map(|k| tm * T::from_count(k) / T::from_count(self.t_count - 1))
            .collect()
    }
}

/// Radial region used for per-band reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    /// `ε < r <= δ₀`
    Delicate,
    /// `δ₀ < r <= 2`
    Unit,
    /// `2 < r <= R/2`: the passage from order-one radii to order-`R` radii.
    Transition,
    /// `R/2 < r < R`
    Outer,
}

impl Band {
    pub const ALL: [Band; 4] = [Band::Delicate, Band::Unit, Band::Transition, Band::Outer];

    pub fn of<T: Real>(r: T, bp: &BarrierParams<T>) -> Band {
        if r <= bp.delta0 {
            Band::Delicate
        } else if r <= T::lit(2.0) {
            Band::Unit
        } else if r <= bp.r_outer / T::lit(2.0) {
            Band::Transition
        } else {
            Band::Outer
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandMax<T> {
    pub band: Band,
    pub points: usize,
    pub max_sum: T,
    pub argmax: (T, T),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport<T> {
    /// Maximum of the term sum over the scan.
    pub max_sum: T,
    /// `(r, t)` where the maximum is attained.
    pub argmax: (T, T),
    /// Largest absolute individual term at the argmax.
    pub max_abs_term_at_argmax: T,
    pub passed: bool,
    pub grid_spec: ScanSpec,
    pub params_used: BarrierParams<T>,
    /// Per-band maxima; bands with no scan points are omitted.
    pub bands: Vec<BandMax<T>>,
}

/// Relative tolerance on the term sum that absorbs cancellation among terms.
pub fn sign_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::lit(64.0) * T::epsilon())
}

fn geometric<T: Real>(start: T, end: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![start];
    }
    let ratio = (end / start).ln() / T::from_count(count - 1);
    (0..count)
        .map(|k| start * (ratio * T::from_count(k)).exp())
        .collect()
}

/// Radii of the verification scan, strictly inside `(ε, R)` and increasing.
pub fn scan_grid<T: Real>(bp: &BarrierParams<T>, r_count: usize) -> Vec<T> {
    let (eps, big_r, d0) = (bp.epsilon, bp.r_outer, bp.delta0);
    let tiny = T::lit(1e-4);
    let half = big_r / T::lit(2.0);
    let mid = if d0 < half {
        half
    } else {
        (d0 + big_r) / T::lit(2.0)
    };

    let la = ((d0 - eps) / (tiny * eps)).ln() * T::lit(8.0);
    let lb = (mid / d0).ln();
    let lc = ((big_r - mid) / (tiny * big_r)).ln();
    let total = la + lb + lc;
    let share = |w: T| -> usize {
        ((w / total) * T::from_count(r_count))
            .round()
            .to_usize()
            .unwrap_or(2)
            .max(2)
    };
    let na = share(la);
    let nb = share(lb);
    let nc = r_count.saturating_sub(na + nb).max(2);

    let mut grid: Vec<T> = geometric(tiny * eps, d0 - eps, na)
        .into_iter()
        .map(|d| eps + d)
        .collect();
    grid.extend(geometric(d0, mid, nb + 1).into_iter().skip(1));
    grid.extend(
        geometric(big_r - mid, tiny * big_r, nc + 1)
            .into_iter()
            .skip(1)
            .map(|d| big_r - d),
    );
    grid.retain(|&r| r > eps && r < big_r);
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    grid.dedup();
    grid
}

/// Scan the term sum and decide whether `ψ` is a supersolution on the grid.
pub fn verify_supersolution<T: Real>(
    bp: &BarrierParams<T>,
    params: &ProblemParams<T>,
    scan: &ScanSpec,
) -> Result<VerificationReport<T>> {
    bp.check_regime(params)?;
    bp.validate_for(params)?;
    scan.validate()?;
    let radii = scan_grid(bp, scan.r_count);
    let times = scan.times::<T>();

    let mut best: Option<(T, (T, T), T)> = None;
    let mut bands: Vec<BandMax<T>> = Vec::new();
    for &r in &radii {
        let band = Band::of(r, bp);
        for &t in &times {
            let tb = terms_at(r, t, bp, params);
            let s = if tb.sum.is_nan() {
                T::infinity()
            } else {
                tb.sum
            };
            if best.is_none_or(|(m, _, _)| s > m) {
                best = Some((s, (r, t), tb.max_abs_term()));
            }
            match bands.iter_mut().find(|b| b.band == band) {
                Some(b) => {
                    b.points += 1;
                    if s > b.max_sum {
                        b.max_sum = s;
                        b.argmax = (r, t);
                    }
                }
                None => bands.push(BandMax {
                    band,
                    points: 1,
                    max_sum: s,
                    argmax: (r, t),
                }),
            }
        }
    }
    let (max_sum, argmax, scale) = best.expect("scan grid is nonempty");
    let passed = max_sum <= sign_tolerance::<T>() * scale.max(T::one());
    Ok(VerificationReport {
        max_sum,
        argmax,
        max_abs_term_at_argmax: scale,
        passed,
        grid_spec: *scan,
        params_used: *bp,
        bands,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub scan: ScanSpec,
    /// First trial value of `γ`.
    pub gamma_start: f64,
    pub gamma_floor: f64,
    pub gamma_cap: f64,
    /// Bisection stops when `(hi - lo) <= rel_resolution * hi`.
    pub rel_resolution: f64,
    /// Upper limit for the log shift `c` in the borderline case.
    pub c_cap: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            scan: ScanSpec::default(),
            gamma_start: 1.0,
            gamma_floor: 1e-9,
            gamma_cap: 1e6,
            rel_resolution: 1e-2,
            c_cap: 1e9,
        }
    }
}

/// Smallest `γ` (to the configured resolution) for which the scan passes,
/// found by doubling/halving and then bisection. `template.gamma` is ignored.
pub fn search_gamma<T: Real>(
    template: &BarrierParams<T>,
    params: &ProblemParams<T>,
    cfg: &SearchConfig,
) -> Result<T> {
    template.check_regime(params)?;
    let passes = |gamma: T| -> Result<bool> {
        let bp = template.with_gamma(gamma)?;
        Ok(verify_supersolution(&bp, params, &cfg.scan)?.passed)
    };
    let two = T::lit(2.0);
    let floor = T::lit(cfg.gamma_floor);
    let cap = T::lit(cfg.gamma_cap);
    let mut gamma = T::lit(cfg.gamma_start);

    let (mut lo, mut hi) = if passes(gamma)? {
        loop {
            let next = gamma / two;
            if next < floor {
                return Ok(gamma);
            }
            if !passes(next)? {
                break (next, gamma);
            }
            gamma = next;
        }
    } else {
        loop {
            let next = gamma * two;
            if next > cap {
                return Err(Error::NotFound(format!(
                    "no gamma <= {} passes verification for {} barrier (R = {}, eps = {})",
                    cfg.gamma_cap, template.case, template.r_outer, template.epsilon
                )));
            }
            if passes(next)? {
                break (gamma, next);
            }
            gamma = next;
        }
    };
    let res = T::lit(cfg.rel_resolution);
    while hi - lo > res * hi {
        let mid = (lo + hi) / two;
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Fill in the constants a barrier needs: in the borderline case double `c`
/// from `template.c` until `J₇ <= |I₃|` on the delicate band, then search `γ`.
pub fn calibrate_barrier<T: Real>(
    template: &BarrierParams<T>,
    params: &ProblemParams<T>,
    cfg: &SearchConfig,
) -> Result<BarrierParams<T>> {
    template.check_regime(params)?;
    let mut bp = *template;
    if bp.case == BarrierCase::Borderline {
        let grid = super::delicate_grid(&bp, cfg.scan.r_count.max(64));
        loop {
            let worst = grid
                .iter()
                .map(|&r| {
                    let tb = terms_at(r, T::zero(), &bp, params);
                    tb.j_term(7) / tb.i_term(3).abs()
                })
                .filter(|x| x.is_finite())
                .fold(T::zero(), T::max);
            if worst <= T::one() {
                break;
            }
            let next = bp.c * T::lit(2.0);
            if next > T::lit(cfg.c_cap) {
                return Err(Error::NotFound(format!(
                    "no log shift c <= {} gives J7 <= |I3|",
                    cfg.c_cap
                )));
            }
            bp = bp.with_log_shift(next)?;
        }
    }
    let gamma = search_gamma(&bp, params, cfg)?;
    bp.with_gamma(gamma)
}

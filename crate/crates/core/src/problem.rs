//! Problem parameters, regime classification against the critical exponent
//! `n/(n-2)`, and the explicit stationary profile `W(r) = C r^(-2/(p-1))`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Spatial dimension `n` and absorption exponent `p` of `u_t = Δu - u^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawParams<T>",
    bound = "T: Real + Serialize + for<'a> Deserialize<'a>"
)]
pub struct ProblemParams<T> {
    n: u32,
    p: T,
}

#[derive(Deserialize)]
struct RawParams<T> {
    n: u32,
    p: T,
}

impl<T: Real> TryFrom<RawParams<T>> for ProblemParams<T> {
    type Error = Error;
    fn try_from(raw: RawParams<T>) -> Result<Self> {
        Self::new(raw.n, raw.p)
    }
}

impl<T: Real> ProblemParams<T> {
    pub fn new(n: u32, p: T) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", format!("dimension must be >= 2, got {n}")));
        }
        if !(p > T::one()) || !p.is_finite() {
            return Err(invalid(
                "p",
                format!("exponent must be finite and > 1, got {p}"),
            ));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// `n` as a scalar.
    pub fn dim(&self) -> T {
        T::from_u32(self.n).expect("dimension representable")
    }

    /// `2/(p-1)`, the decay rate of the stationary profile.
    pub fn decay_exponent(&self) -> T {
        T::lit(2.0) / (self.p - T::one())
    }

    /// `2p/(p-1)`; `p >= n/(n-2)` iff `n >= 2p/(p-1)`.
    pub fn dimension_threshold(&self) -> T {
        T::lit(2.0) * self.p / (self.p - T::one())
    }

    /// `n/(n-2)` for `n >= 3`, `+inf` for `n = 2`.
    pub fn critical_exponent(&self) -> T {
        if self.n == 2 {
            T::infinity()
        } else {
            self.dim() / (self.dim() - T::lit(2.0))
        }
    }

    pub fn regime(&self) -> Regime<T> {
        classify_regime(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    /// `p < n/(n-2)`: a nontrivial solution with zero data exists.
    Subcritical,
    /// `p = n/(n-2)`: uniqueness, borderline barrier.
    Critical,
    /// `p > n/(n-2)`: uniqueness, general barrier.
    Supercritical,
}

impl RegimeTag {
    /// Whether the regime admits uniqueness (`p >= n/(n-2)`).
    pub fn is_unique(self) -> bool {
        !matches!(self, RegimeTag::Subcritical)
    }
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeTag::Subcritical => "Subcritical",
            RegimeTag::Critical => "Critical",
            RegimeTag::Supercritical => "Supercritical",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime<T> {
    pub tag: RegimeTag,
    /// `n/(n-2)`, or `+inf` when `n = 2`.
    pub critical_exponent: T,
}

/// Relative tolerance under which `p` counts as exactly critical.
pub fn criticality_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::lit(4.0) * T::epsilon())
}

pub fn classify_regime<T: Real>(params: &ProblemParams<T>) -> Regime<T> {
    let pc = params.critical_exponent();
    if params.n == 2 {
        return Regime {
            tag: RegimeTag::Subcritical,
            critical_exponent: pc,
        };
    }
    let p = params.p;
    let tag = if (p - pc).abs() <= criticality_tolerance::<T>() * pc {
        RegimeTag::Critical
    } else if p < pc {
        RegimeTag::Subcritical
    } else {
        RegimeTag::Supercritical
    };
    Regime {
        tag,
        critical_exponent: pc,
    }
}

/// `W(r) = C r^(-2/(p-1))`, a positive stationary solution of the radial equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryProfile<T> {
    pub amplitude: T,
    pub exponent_value: T,
}

impl<T: Real> StationaryProfile<T> {
    pub fn value(&self, r: T) -> Result<T> {
        stationary_value(self, r)
    }

    /// `(W, W', W'')` at `r > 0`.
    pub fn derivatives(&self, r: T) -> Result<(T, T, T)> {
        let w = stationary_value(self, r)?;
        let k = self.exponent_value;
        Ok((w, -k * w / r, k * (k + T::one()) * w / (r * r)))
    }
}

/// `C = [(2/(p-1)) (2p/(p-1) - n)]^(1/(p-1))`; errors when `n >= 2p/(p-1)`
/// or when `C` is not representable.
pub fn stationary_amplitude<T: Real>(params: &ProblemParams<T>) -> Result<StationaryProfile<T>> {
    let k = params.decay_exponent();
    let base = k * (params.dimension_threshold() - params.dim());
    let sub = classify_regime(params).tag == RegimeTag::Subcritical;
    if !sub || base <= T::zero() {
        return Err(Error::Regime {
            n: params.n,
            threshold: params.dimension_threshold().to_f64_lossy(),
        });
    }
    let amplitude = base.powf(T::one() / (params.p - T::one()));
    if !amplitude.is_finite() {
        return Err(Error::Domain(format!(
            "stationary amplitude overflows the scalar type for n = {}, p = {}",
            params.n, params.p
        )));
    }
    Ok(StationaryProfile {
        amplitude,
        exponent_value: k,
    })
}

pub fn stationary_value<T: Real>(profile: &StationaryProfile<T>, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::Domain(format!(
            "stationary profile needs r > 0, got {r}"
        )));
    }
    Ok(profile.amplitude * r.powf(-profile.exponent_value))
}

/// Steady radial operator `u'' + ((n-1)/r) u' - u^p` applied to supplied
/// derivative values.
pub fn radial_residual<T: Real>(u: T, du: T, ddu: T, r: T, params: &ProblemParams<T>) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::Domain(format!(
            "radial operator needs r > 0, got {r}"
        )));
    }
    if u < T::zero() {
        return Err(Error::Domain(format!(
            "solution must be nonnegative, got u = {u}"
        )));
    }
    Ok(ddu + drift_coefficient(params.dim(), r) * du - u.powf(params.p))
}

/// `(n-1)/r` for a real dimension `n`.
#[inline]
pub(crate) fn drift_coefficient<T: Real>(dim: T, r: T) -> T {
    (dim - T::one()) / r
}

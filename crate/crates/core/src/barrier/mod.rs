//! Explicit supersolutions on the annulus `ε < r < R` for the uniqueness
//! regime `p >= n/(n-2)`.
//!
//! Two families are provided. The general family (for `n > 2p/(p-1)`) is
//!
//! ```text
//! φ(r) = ((r-ε)(R-r))^(-2/(p-1)) (1+r)^(2/(p-1)) (1 + (ε/r)^l R^(2/(p-1)))
//! ```
//!
//! and the borderline family (for `n = 2p/(p-1)`) replaces `(ε/r)^l` by
//! `(1/log(cr/ε))^(1/(p-1))`. In both cases `ψ(r,t) = φ(r) exp(γ(t+1))`.
//! The scaled defect of `ψ` splits into seven second-derivative terms `J₁..J₇`
//! and five drift/absorption/time terms `I₁..I₅`; see [`TermBreakdown`].

mod inequalities;
mod terms;
mod verify;

pub use inequalities::{
    check_key_inequalities, delicate_grid, log_ratio_bound, InequalityCheck, KeyInequalityReport,
};
pub use terms::{defect, phi, psi, term_breakdown, TermBreakdown};
pub use verify::{
    calibrate_barrier, scan_grid, search_gamma, verify_supersolution, Band, BandMax, ScanSpec,
    SearchConfig, VerificationReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::problem::{ProblemParams, RegimeTag};
use crate::scalar::Real;

/// Which barrier family to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BarrierCase {
    /// `n > 2p/(p-1)`: algebraic correction `(ε/r)^l`.
    General,
    /// `n = 2p/(p-1)`: logarithmic correction `1/log(cr/ε)`.
    Borderline,
}

impl BarrierCase {
    /// The family matching a regime, if any.
    pub fn for_regime(tag: RegimeTag) -> Option<Self> {
        match tag {
            RegimeTag::Supercritical => Some(BarrierCase::General),
            RegimeTag::Critical => Some(BarrierCase::Borderline),
            RegimeTag::Subcritical => None,
        }
    }
}

impl std::fmt::Display for BarrierCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BarrierCase::General => "General",
            BarrierCase::Borderline => "Borderline",
        })
    }
}

/// Knobs of the barrier family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams<T> {
    /// Outer radius `R > 1`.
    pub r_outer: T,
    /// Inner radius `0 < ε < 1`.
    pub epsilon: T,
    /// Time growth rate `γ > 0`.
    pub gamma: T,
    /// Algebraic exponent `l ∈ (0, 1]` (general case).
    pub l: T,
    /// Log shift `c >= 2` (borderline case).
    pub c: T,
    pub case: BarrierCase,
    /// Radius splitting the delicate band `[ε, δ₀]` from the rest.
    pub delta0: T,
}

pub const DEFAULT_DELTA0: f64 = 0.1;
pub const DEFAULT_LOG_SHIFT: f64 = 2.0;

impl<T: Real> BarrierParams<T> {
    pub fn general(r_outer: T, epsilon: T, l: T, gamma: T, delta0: T) -> Result<Self> {
        let bp = Self {
            r_outer,
            epsilon,
            gamma,
            l,
            c: T::lit(DEFAULT_LOG_SHIFT),
            case: BarrierCase::General,
            delta0,
        };
        bp.validate()?;
        Ok(bp)
    }

    pub fn borderline(r_outer: T, epsilon: T, c: T, gamma: T, delta0: T) -> Result<Self> {
        let bp = Self {
            r_outer,
            epsilon,
            gamma,
            l: T::lit(0.5),
            c,
            case: BarrierCase::Borderline,
            delta0,
        };
        bp.validate()?;
        Ok(bp)
    }

    /// Barrier with default knobs for the regime of `params`:
    /// `l = min(0.5, 1/(p-1))`, `c = 2`, `δ₀ = 0.1`.
    pub fn defaults_for(
        params: &ProblemParams<T>,
        r_outer: T,
        epsilon: T,
        gamma: T,
    ) -> Result<Self> {
        let case = BarrierCase::for_regime(params.regime().tag).ok_or_else(|| {
            Error::RegimeMismatch(format!(
                "no barrier exists for subcritical (n = {}, p = {})",
                params.n(),
                params.p()
            ))
        })?;
        let l = default_l(params);
        let delta0 = T::lit(DEFAULT_DELTA0);
        match case {
            BarrierCase::General => Self::general(r_outer, epsilon, l, gamma, delta0),
            BarrierCase::Borderline => {
                Self::borderline(r_outer, epsilon, T::lit(DEFAULT_LOG_SHIFT), gamma, delta0)
            }
        }
    }

    pub fn with_gamma(mut self, gamma: T) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn with_log_shift(mut self, c: T) -> Result<Self> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    /// Parameter-only invariants.
    pub fn validate(&self) -> Result<()> {
        let one = T::one();
        if !(self.epsilon > T::zero() && self.epsilon < one) {
            return Err(invalid(
                "epsilon",
                format!("need 0 < eps < 1, got {}", self.epsilon),
            ));
        }
        if !(self.r_outer > one) || !self.r_outer.is_finite() {
            return Err(invalid(
                "R",
                format!("need finite R > 1, got {}", self.r_outer),
            ));
        }
        if !(self.gamma > T::zero()) || !self.gamma.is_finite() {
            return Err(invalid(
                "gamma",
                format!("need finite gamma > 0, got {}", self.gamma),
            ));
        }
        if !(self.delta0 > T::zero() && self.delta0 < one) {
            return Err(invalid(
                "delta0",
                format!("need 0 < delta0 < 1, got {}", self.delta0),
            ));
        }
        if self.delta0 <= self.epsilon {
            return Err(invalid("delta0", "delta0 must exceed epsilon"));
        }
        match self.case {
            BarrierCase::General => {
                if !(self.l > T::zero() && self.l <= one) {
                    return Err(invalid("l", format!("need 0 < l <= 1, got {}", self.l)));
                }
            }
            BarrierCase::Borderline => {
                if !(self.c >= T::lit(2.0)) || !self.c.is_finite() {
                    return Err(invalid("c", format!("need finite c >= 2, got {}", self.c)));
                }
            }
        }
        Ok(())
    }

    /// Invariants that involve the problem exponent (`l (p-1) <= 1`).
    pub fn validate_for(&self, params: &ProblemParams<T>) -> Result<()> {
        self.validate()?;
        if self.case == BarrierCase::General {
            let lp = self.l * (params.p() - T::one());
            if lp > T::one() + T::lit(8.0) * T::epsilon() {
                return Err(invalid("l", format!("need l (p-1) <= 1, got {lp}")));
            }
        }
        Ok(())
    }

    /// Errors unless the family matches the regime of `params`.
    pub fn check_regime(&self, params: &ProblemParams<T>) -> Result<()> {
        let tag = params.regime().tag;
        match BarrierCase::for_regime(tag) {
            Some(case) if case == self.case => Ok(()),
            _ => Err(Error::RegimeMismatch(format!(
                "{} barrier requested for {} (n = {}, p = {}, 2p/(p-1) = {})",
                self.case,
                tag,
                params.n(),
                params.p(),
                params.dimension_threshold()
            ))),
        }
    }
}

/// `min(0.5, 1/(p-1))`.
pub fn default_l<T: Real>(params: &ProblemParams<T>) -> T {
    T::lit(0.5).min(T::one() / (params.p() - T::one()))
}

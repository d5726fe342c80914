//! Scale functions, weight functions and gauges.
//!
//! A scale function is positive, nonincreasing and tends to 0. A weight is
//! positive and summable. Both are [`RateFn`]s built from a [`RateExpr`] tree;
//! closed-form leaves give asymptotic certificates that make convergence and
//! comparison questions decidable.

mod asymptote;
mod expr;
mod gauge;
mod ops;
mod profile;
mod xi;

use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub use asymptote::{Limit, PowerLog, EXPONENT_EPS};
pub use expr::{closed_tail_sum, Cache, ClosedForm, RateExpr, SigmaTable, StepStarts};
pub use gauge::{gauge_integrability, Gauge, LogProfile, INTEGRABILITY_LEVELS};
pub use ops::{
    compare, equivalent, family_lower_bound, family_upper_bound, kappa_phi, lattice_join, lattice_meet,
    phi_kappa_member, rate_product, scaled, sigma, weight_from_scale, Comparison, ConvergenceStatus,
    ConvergenceVerdict, Relation,
};
pub use profile::{separating_profile, ProfileBlock, SeparatingProfile};
pub use xi::{xi_stretch, XiEntry, XiReport};

use crate::error::{invalid, Error, Result};
use crate::DEFAULT_HORIZON;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Role {
    Scale,
    Weight,
}

/// Tail certificate: an asymptotic form and/or an exact tail-sum formula.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Certificate {
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub power_log: Option<PowerLog>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub closed_tail_sum: Option<RateExpr>,
}

impl Certificate {
    pub fn is_empty(&self) -> bool {
        self.power_log.is_none() && self.closed_tail_sum.is_none()
    }
}

/// A positive sequence on `n ≥ 1` with a role.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RateFnRepr", into = "RateFnRepr"))]
pub struct RateFn {
    expr: RateExpr,
    role: Role,
    certificate: Certificate,
    horizon: u64,
}

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Clone, Debug)]
#[doc(hidden)]
pub struct RateFnRepr {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub expr: RateExpr,
    pub role: Role,
    #[cfg_attr(feature = "serde", serde(default))]
    pub certificate: Certificate,
    #[cfg_attr(feature = "serde", serde(default = "default_horizon"))]
    pub horizon: u64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub approximate: bool,
}

#[cfg(feature = "serde")]
fn default_horizon() -> u64 {
    DEFAULT_HORIZON
}

impl TryFrom<RateFnRepr> for RateFn {
    type Error = Error;
    fn try_from(r: RateFnRepr) -> Result<Self> {
        RateFn::from_parts(r.expr, r.role, r.certificate, r.horizon)
    }
}

impl From<RateFn> for RateFnRepr {
    fn from(f: RateFn) -> Self {
        let approximate = f.is_approximate();
        RateFnRepr { expr: f.expr, role: f.role, certificate: f.certificate, horizon: f.horizon, approximate }
    }
}

/// Sample points used for spot checks: `1..=64`, then a geometric grid up to
/// the horizon.
pub fn sample_points(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=horizon.min(64)).collect();
    let mut x = 64.0f64;
    loop {
        x *= 1.25;
        let n = libm::ceil(x) as u64;
        if n >= horizon {
            break;
        }
        out.push(n);
    }
    if horizon > 64 {
        out.push(horizon);
    }
    out
}

impl RateFn {
    pub fn new(expr: RateExpr, role: Role) -> Result<Self> {
        Self::from_parts(expr, role, Certificate::default(), DEFAULT_HORIZON)
    }

    pub fn scale(expr: RateExpr) -> Result<Self> {
        Self::new(expr, Role::Scale)
    }

    pub fn weight(expr: RateExpr) -> Result<Self> {
        Self::new(expr, Role::Weight)
    }

    /// Builds a rate with an explicitly stated certificate. A stated
    /// asymptote must agree with any asymptote derivable from the expression;
    /// a stated tail sum is spot-checked against forward differences.
    pub fn from_parts(mut expr: RateExpr, role: Role, stated: Certificate, horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return invalid("horizon must be at least 1");
        }
        expr.prepare();
        let derived = expr.asymptote();
        let power_log = match (derived, stated.power_log) {
            (Some(d), Some(s)) => {
                if d.cmp_growth(&s) != core::cmp::Ordering::Equal {
                    return invalid(format!("stated certificate {s:?} contradicts the expression ({d:?})"));
                }
                Some(d)
            }
            (d, s) => d.or(s),
        };
        let closed_tail_sum = match role {
            Role::Weight => stated.closed_tail_sum.or_else(|| closed_tail_sum(&expr)),
            Role::Scale => None,
        };
        let f = RateFn { expr, role, certificate: Certificate { power_log, closed_tail_sum }, horizon };
        f.validate()?;
        Ok(f)
    }

    pub fn with_horizon(self, horizon: u64) -> Result<Self> {
        Self::from_parts(self.expr, self.role, self.certificate, horizon)
    }

    pub fn expr(&self) -> &RateExpr {
        &self.expr
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn asymptote(&self) -> Option<PowerLog> {
        self.certificate.power_log
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn is_approximate(&self) -> bool {
        self.expr.is_approximate()
    }

    pub fn eval(&self, n: u64) -> f64 {
        self.expr.eval(n)
    }

    pub fn ln_eval(&self, n: u64) -> f64 {
        self.expr.ln_eval(n)
    }

    pub fn ln_at_real(&self, ln_x: f64) -> Option<f64> {
        self.expr.ln_at_real(ln_x)
    }

    fn validate(&self) -> Result<()> {
        let samples = sample_points(self.horizon);
        for &n in &samples {
            let l = self.ln_eval(n);
            if !(l.is_finite()) {
                return invalid(format!("value at n={n} is not a positive finite number"));
            }
        }
        if let Some(a) = self.certificate.power_log {
            if !(a.coef > 0.0 && a.ratio > 0.0) {
                return invalid("certificate must have positive coefficient and ratio");
            }
        }
        match self.role {
            Role::Scale => {
                let mut prev = f64::INFINITY;
                for &n in &samples {
                    let here = self.ln_eval(n);
                    let next = self.ln_eval(n + 1);
                    if here > prev + 1e-12 || next > here + 1e-12 {
                        return invalid(format!("scale function increases near n={n}"));
                    }
                    prev = here;
                }
                let last = *samples.last().unwrap();
                if last > 1 && self.ln_eval(last) >= self.ln_eval(1) {
                    return invalid("scale function does not decrease over the horizon");
                }
                if let Some(a) = self.certificate.power_log {
                    if !a.tends_to_zero() {
                        return invalid("scale certificate does not tend to zero");
                    }
                }
            }
            Role::Weight => {
                let s: f64 = (1..=64).map(|n| self.eval(n)).sum();
                if !s.is_finite() {
                    return invalid("weight partial sums are not finite");
                }
                if let Some(a) = self.certificate.power_log {
                    if !a.summable() {
                        return invalid("weight certificate is not summable");
                    }
                }
                if let Some(t) = &self.certificate.closed_tail_sum {
                    for &n in samples.iter().take(80) {
                        let d = t.eval(n) - t.eval(n + 1);
                        let k = self.eval(n);
                        if libm::fabs(d - k) > 1e-9 * k.max(1e-300) + 1e-300 {
                            return invalid(format!("closed tail sum disagrees with the weight at n={n}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        format!("{:?}", self.expr)
    }
}

#[cfg(test)]
mod tests;

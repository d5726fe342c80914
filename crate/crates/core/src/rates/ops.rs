use alloc::boxed::Box;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::{sample_points, Certificate, Limit, RateExpr, RateFn, Role};
use crate::error::{invalid, Result};
use crate::exact::Compensated;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum ConvergenceStatus {
    Converges,
    Diverges,
    InconclusiveAtHorizon,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ConvergenceVerdict {
    pub status: ConvergenceStatus,
    pub partial_sum: f64,
    pub horizon: u64,
    pub certificate_used: bool,
}

/// Order relation between two scale functions up to constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Relation {
    Equivalent,
    /// `φ1 ≤ c·φ2` but not conversely.
    StrictlySmaller,
    StrictlyLarger,
    Incomparable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Comparison {
    pub relation: Relation,
    pub certified: bool,
    /// Range of `φ1/φ2` over the sampled points.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub horizon: u64,
}

fn require(f: &RateFn, role: Role, what: &str) -> Result<()> {
    if f.role() != role {
        return invalid(alloc::format!("{what} must be a {role:?} function"));
    }
    Ok(())
}

/// `Σ(κ)(n) = ∑_{i ≥ n} κ(i)`.
pub fn sigma(kappa: &RateFn) -> Result<RateFn> {
    require(kappa, Role::Weight, "sigma input")?;
    if let Some(a) = kappa.asymptote() {
        if !a.summable() {
            return invalid("weight certificate does not imply summability");
        }
    }
    if let Some(t) = &kappa.certificate().closed_tail_sum {
        return RateFn::from_parts(t.clone(), Role::Scale, Certificate::default(), kappa.horizon());
    }
    let expr = RateExpr::Sigma {
        inner: Box::new(kappa.expr().clone()),
        horizon: kappa.horizon(),
        table: Default::default(),
    };
    RateFn::from_parts(expr, Role::Scale, Certificate::default(), kappa.horizon())
}

/// Certificate-based comparison, with a sampled-ratio fallback.
pub fn compare(phi1: &RateFn, phi2: &RateFn) -> Comparison {
    let horizon = phi1.horizon().min(phi2.horizon());
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = 0.0f64;
    let samples = sample_points(horizon);
    let ln_ratios: Vec<f64> = samples.iter().map(|&n| phi1.ln_eval(n) - phi2.ln_eval(n)).collect();
    for r in &ln_ratios {
        let v = libm::exp(*r);
        ratio_min = ratio_min.min(v);
        ratio_max = ratio_max.max(v);
    }
    if phi1.role() != Role::Scale || phi2.role() != Role::Scale {
        return Comparison { relation: Relation::Inconclusive, certified: false, ratio_min, ratio_max, horizon };
    }
    if let (Some(a), Some(b)) = (phi1.asymptote(), phi2.asymptote()) {
        let relation = match a.cmp_growth(&b) {
            Ordering::Equal => Relation::Equivalent,
            Ordering::Less => Relation::StrictlySmaller,
            Ordering::Greater => Relation::StrictlyLarger,
        };
        return Comparison { relation, certified: true, ratio_min, ratio_max, horizon };
    }
    Comparison { relation: sampled_relation(&samples, &ln_ratios), certified: false, ratio_min, ratio_max, horizon }
}

/// Heuristic on the last three decades of the horizon: a ratio drifting by
/// more than a factor 10 monotonically is read as a strict order; anything
/// else is inconclusive. Constant ratios never certify equivalence here.
fn sampled_relation(samples: &[u64], ln_ratios: &[f64]) -> Relation {
    let last = *samples.last().unwrap_or(&1);
    if last < 1000 {
        return Relation::Inconclusive;
    }
    let from = last / 1000;
    let tail: Vec<f64> = samples
        .iter()
        .zip(ln_ratios)
        .filter(|(n, _)| **n >= from)
        .map(|(_, r)| *r)
        .collect();
    if tail.len() < 4 {
        return Relation::Inconclusive;
    }
    let drift = tail[tail.len() - 1] - tail[0];
    let increasing = tail.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    if decreasing && drift < -libm::log(10.0) {
        Relation::StrictlySmaller
    } else if increasing && drift > libm::log(10.0) {
        Relation::StrictlyLarger
    } else {
        Relation::Inconclusive
    }
}

pub fn equivalent(phi1: &RateFn, phi2: &RateFn) -> Relation {
    compare(phi1, phi2).relation
}

fn binary(phi1: &RateFn, phi2: &RateFn, build: fn(Box<RateExpr>, Box<RateExpr>) -> RateExpr) -> Result<RateFn> {
    require(phi1, Role::Scale, "left operand")?;
    require(phi2, Role::Scale, "right operand")?;
    let e = build(Box::new(phi1.expr().clone()), Box::new(phi2.expr().clone()));
    RateFn::from_parts(e, Role::Scale, Certificate::default(), phi1.horizon().min(phi2.horizon()))
}

/// Pointwise maximum.
pub fn lattice_join(phi1: &RateFn, phi2: &RateFn) -> Result<RateFn> {
    binary(phi1, phi2, |left, right| RateExpr::Join { left, right })
}

/// Pointwise minimum.
pub fn lattice_meet(phi1: &RateFn, phi2: &RateFn) -> Result<RateFn> {
    binary(phi1, phi2, |left, right| RateExpr::Meet { left, right })
}

/// Pointwise product.
pub fn rate_product(phi1: &RateFn, phi2: &RateFn) -> Result<RateFn> {
    binary(phi1, phi2, |left, right| RateExpr::Product { left, right })
}

/// Positive constant multiple; same role, equivalent class.
pub fn scaled(phi: &RateFn, factor: f64) -> Result<RateFn> {
    if !(factor > 0.0 && factor.is_finite()) {
        return invalid("scaling factor must be positive and finite");
    }
    RateFn::from_parts(phi.expr().clone().scaled(factor), phi.role(), Certificate::default(), phi.horizon())
}

fn nonempty_scales(list: &[RateFn]) -> Result<u64> {
    if list.is_empty() {
        return invalid("family must be nonempty");
    }
    for f in list {
        require(f, Role::Scale, "family member")?;
    }
    Ok(list.iter().map(RateFn::horizon).min().unwrap())
}

/// `φ_lb(n) = min_{1 ≤ i ≤ n} φ_i(n)`.
pub fn family_lower_bound(list: &[RateFn]) -> Result<RateFn> {
    let horizon = nonempty_scales(list)?;
    let members = list.iter().map(|f| f.expr().clone()).collect();
    RateFn::from_parts(RateExpr::LowerEnvelope { members }, Role::Scale, Certificate::default(), horizon)
}

/// `sup_i c_i·φ_i` with `c_i = 2^-i / sup φ_i`; the sup is taken over the
/// sampled horizon, so the result is flagged approximate.
pub fn family_upper_bound(list: &[RateFn]) -> Result<RateFn> {
    let horizon = nonempty_scales(list)?;
    let samples = sample_points(horizon);
    let mut factors = Vec::with_capacity(list.len());
    for (i, f) in list.iter().enumerate() {
        let sup = samples.iter().map(|&n| f.eval(n)).fold(0.0f64, f64::max);
        factors.push(libm::scalbn(1.0, -(i as i32 + 1)) / sup);
    }
    let members = list.iter().map(|f| f.expr().clone()).collect();
    RateFn::from_parts(RateExpr::UpperEnvelope { members, factors }, Role::Scale, Certificate::default(), horizon)
}

/// Structural match `κ = φ·w` (either factor order, through constant scaling).
fn split_off<'a>(kappa: &'a RateExpr, phi: &RateExpr) -> Option<(f64, &'a RateExpr)> {
    match kappa {
        RateExpr::Product { left, right } if left.as_ref() == phi => Some((1.0, right)),
        RateExpr::Product { left, right } if right.as_ref() == phi => Some((1.0, left)),
        RateExpr::Scaled { factor, inner } => split_off(inner, phi).map(|(c, w)| (c * factor, w)),
        _ => None,
    }
}

/// Convergence of `∑ κ(n)/φ(n)`.
pub fn phi_kappa_member(kappa: &RateFn, phi: &RateFn) -> ConvergenceVerdict {
    let horizon = kappa.horizon().min(phi.horizon());
    let mut acc = Compensated::new();
    for n in 1..=horizon {
        acc.add(libm::exp(kappa.ln_eval(n) - phi.ln_eval(n)));
    }
    let partial_sum = acc.value();
    let decided = match split_off(kappa.expr(), phi.expr()) {
        Some((_, w)) => w.asymptote().map(|a| a.summable()),
        None => match (kappa.asymptote(), phi.asymptote()) {
            (Some(a), Some(b)) => Some(a.mul(&b.recip()).summable()),
            _ => None,
        },
    };
    let status = match decided {
        Some(true) => ConvergenceStatus::Converges,
        Some(false) => ConvergenceStatus::Diverges,
        None => ConvergenceStatus::InconclusiveAtHorizon,
    };
    ConvergenceVerdict { status, partial_sum, horizon, certificate_used: decided.is_some() }
}

/// `κ(n) = φ̃(n) − φ̃(n+1)` for a strictly decreasing representative `φ̃`.
/// When `φ` is constant on a sampled step, `φ̃ = φ + 2^-n` is used.
pub fn weight_from_scale(phi: &RateFn) -> Result<RateFn> {
    require(phi, Role::Scale, "weight_from_scale input")?;
    let strictly = sample_points(phi.horizon()).iter().all(|&n| phi.ln_eval(n + 1) < phi.ln_eval(n));
    let base = if strictly {
        phi.expr().clone()
    } else {
        RateExpr::PlusDyadic { inner: Box::new(phi.expr().clone()) }
    };
    if let Some(a) = base.asymptote() {
        if a.limit() != Limit::Zero {
            return invalid("scale function does not tend to zero");
        }
    }
    let expr = RateExpr::Difference { inner: Box::new(base.clone()) };
    for n in sample_points(phi.horizon()) {
        if !(expr.eval(n) > 0.0) && base.eval(n) > 1e-300 {
            return invalid(alloc::format!("representative is not strictly decreasing at n={n}"));
        }
    }
    let cert = Certificate { power_log: None, closed_tail_sum: Some(base) };
    RateFn::from_parts(expr, Role::Weight, cert, phi.horizon())
}

/// Convenience: the weight `κ_φ(n) = φ(n)/n²`.
pub fn kappa_phi(phi: &RateFn) -> Result<RateFn> {
    require(phi, Role::Scale, "kappa_phi input")?;
    let e = phi.expr().clone().times(RateExpr::power(1.0, 2.0));
    RateFn::from_parts(e, Role::Weight, Certificate::default(), phi.horizon())
}


use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::asymptote::PowerLog;
use crate::error_seq::ErrorSeq;
use crate::exact::Compensated;

/// `coef · ratio^n · (n + shift)^(-power) · (log_shift + ln(n + log_arg_shift))^(-log_power)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ClosedForm {
    pub coef: f64,
    pub ratio: f64,
    pub power: f64,
    pub shift: f64,
    pub log_power: f64,
    pub log_shift: f64,
    pub log_arg_shift: f64,
}

impl Default for ClosedForm {
    fn default() -> Self {
        ClosedForm { coef: 1.0, ratio: 1.0, power: 0.0, shift: 0.0, log_power: 0.0, log_shift: 0.0, log_arg_shift: 0.0 }
    }
}

pub(crate) fn pow_pos(b: f64, p: f64) -> f64 {
    if p == 1.0 {
        b
    } else if p == 2.0 {
        b * b
    } else if p == 3.0 {
        b * b * b
    } else if p == 0.5 {
        libm::sqrt(b)
    } else {
        libm::pow(b, p)
    }
}

impl ClosedForm {
    pub fn eval_real(&self, x: f64) -> f64 {
        let mut v = self.coef;
        if self.ratio != 1.0 {
            v *= libm::pow(self.ratio, x);
        }
        if self.log_power > 0.0 {
            v /= pow_pos(self.log_shift + libm::log(x + self.log_arg_shift), self.log_power);
        } else if self.log_power < 0.0 {
            v *= pow_pos(self.log_shift + libm::log(x + self.log_arg_shift), -self.log_power);
        }
        if self.power > 0.0 {
            v /= pow_pos(x + self.shift, self.power);
        } else if self.power < 0.0 {
            v *= pow_pos(x + self.shift, -self.power);
        }
        v
    }

    /// `ln value` at the real argument `e^ln_x`, without overflow.
    pub fn ln_at(&self, ln_x: f64) -> f64 {
        let ln_shifted = |s: f64| {
            if s == 0.0 {
                ln_x
            } else {
                ln_x + libm::log1p(s * libm::exp(-ln_x))
            }
        };
        let mut v = libm::log(self.coef);
        if self.ratio != 1.0 {
            v += libm::exp(ln_x) * libm::log(self.ratio);
        }
        if self.power != 0.0 {
            v -= self.power * ln_shifted(self.shift);
        }
        if self.log_power != 0.0 {
            v -= self.log_power * libm::log(self.log_shift + ln_shifted(self.log_arg_shift));
        }
        v
    }

    pub fn asymptote(&self) -> PowerLog {
        PowerLog { coef: self.coef, ratio: self.ratio, power: self.power, log_power: self.log_power }
    }
}

/// Subsequence start points `n_0 < n_1 < …`: the explicit list followed by
/// powers of `base` beyond its last entry.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct StepStarts {
    #[cfg_attr(feature = "serde", serde(default))]
    pub explicit: Vec<u64>,
    pub base: u64,
}

impl StepStarts {
    pub fn powers(base: u64) -> Self {
        StepStarts { explicit: Vec::new(), base }
    }

    /// Largest start `≤ n`.
    pub fn start_of(&self, n: u64) -> u64 {
        let last = self.explicit.last().copied().unwrap_or(0);
        if n <= last || (self.base < 2 && !self.explicit.is_empty()) {
            let i = self.explicit.partition_point(|&s| s <= n);
            return if i == 0 { self.explicit[0] } else { self.explicit[i - 1] };
        }
        let mut p: u64 = 1;
        let mut best = last.max(1);
        while p <= n {
            if p > last {
                best = p;
            }
            match p.checked_mul(self.base) {
                Some(q) => p = q,
                None => break,
            }
        }
        best
    }

    /// All starts up to `limit`.
    pub fn up_to(&self, limit: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self.explicit.iter().copied().filter(|&s| s <= limit).collect();
        let last = self.explicit.last().copied().unwrap_or(0);
        if self.base >= 2 {
            let mut p: u64 = 1;
            while p <= limit {
                if p > last {
                    out.push(p);
                }
                match p.checked_mul(self.base) {
                    Some(q) => p = q,
                    None => break,
                }
            }
        }
        out
    }
}

/// Suffix sums of a weight over `1..=horizon` plus a tail estimate.
#[derive(Clone, Debug)]
pub struct SigmaTable {
    /// `suffix[n-1] = ∑_{i=n}^{horizon} κ(i) + tail`.
    pub suffix: Vec<f64>,
    pub tail: f64,
}

/// Lazily built cache; ignored by equality and serialization.
#[derive(Clone)]
pub struct Cache<T>(pub Option<Arc<T>>);

impl<T> Default for Cache<T> {
    fn default() -> Self {
        Cache(None)
    }
}

impl<T> PartialEq for Cache<T> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl<T> fmt::Debug for Cache<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0.is_some() { "Cache(built)" } else { "Cache(empty)" })
    }
}

/// Expression tree for sequences on `n ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "params", rename_all = "kebab-case"))]
pub enum RateExpr {
    /// `coef · n^(-power)`
    Power { coef: f64, power: f64 },
    PowerLog(ClosedForm),
    /// `coef · ratio^n`
    Exponential { coef: f64, ratio: f64 },
    /// `values[i]` on `[breakpoints[i], breakpoints[i+1])`, then `tail`.
    Step { breakpoints: Vec<u64>, values: Vec<f64>, tail: Option<Box<RateExpr>> },
    /// `values[n-1]` for `n ≤ len`, then `tail` (or the last value).
    Tabulated { values: Vec<f64>, tail: Option<Box<RateExpr>> },
    Scaled { factor: f64, inner: Box<RateExpr> },
    Product { left: Box<RateExpr>, right: Box<RateExpr> },
    Join { left: Box<RateExpr>, right: Box<RateExpr> },
    Meet { left: Box<RateExpr>, right: Box<RateExpr> },
    /// `inner(n) + 2^(-n)`
    PlusDyadic { inner: Box<RateExpr> },
    /// `inner(n) − inner(n+1)`
    Difference { inner: Box<RateExpr> },
    /// `∑_{i ≥ n} inner(i)`
    Sigma {
        inner: Box<RateExpr>,
        horizon: u64,
        #[cfg_attr(feature = "serde", serde(skip))]
        table: Cache<SigmaTable>,
    },
    /// `min_{1 ≤ i ≤ min(n, len)} members[i-1](n)`
    LowerEnvelope { members: Vec<RateExpr> },
    /// `max_i factors[i] · members[i](n)`
    UpperEnvelope { members: Vec<RateExpr>, factors: Vec<f64> },
    /// `inner(n_i)` for `n_i ≤ n < n_{i+1}`
    SampledAt { inner: Box<RateExpr>, starts: StepStarts },
    /// The scale function attached to an error sequence.
    FromErrors { errors: Box<ErrorSeq> },
}

impl RateExpr {
    pub fn power(coef: f64, power: f64) -> Self {
        RateExpr::Power { coef, power }
    }

    pub fn exponential(coef: f64, ratio: f64) -> Self {
        RateExpr::Exponential { coef, ratio }
    }

    pub fn closed(form: ClosedForm) -> Self {
        RateExpr::PowerLog(form)
    }

    pub fn scaled(self, factor: f64) -> Self {
        RateExpr::Scaled { factor, inner: Box::new(self) }
    }

    pub fn times(self, other: RateExpr) -> Self {
        RateExpr::Product { left: Box::new(self), right: Box::new(other) }
    }

    fn as_closed(&self) -> Option<ClosedForm> {
        match *self {
            RateExpr::Power { coef, power } => Some(ClosedForm { coef, power, ..ClosedForm::default() }),
            RateExpr::PowerLog(cf) => Some(cf),
            RateExpr::Exponential { coef, ratio } => Some(ClosedForm { coef, ratio, ..ClosedForm::default() }),
            _ => None,
        }
    }

    pub fn eval(&self, n: u64) -> f64 {
        debug_assert!(n >= 1);
        match self {
            RateExpr::Power { coef, power } => {
                let x = n as f64;
                if *power >= 0.0 {
                    coef / pow_pos(x, *power)
                } else {
                    coef * pow_pos(x, -power)
                }
            }
            RateExpr::PowerLog(cf) => cf.eval_real(n as f64),
            RateExpr::Exponential { coef, ratio } => coef * libm::pow(*ratio, n as f64),
            RateExpr::Step { breakpoints, values, tail } => {
                let i = breakpoints.partition_point(|&b| b <= n);
                if i == 0 {
                    values[0]
                } else if i - 1 < values.len() {
                    values[i - 1]
                } else {
                    match tail {
                        Some(t) => t.eval(n),
                        None => values[values.len() - 1],
                    }
                }
            }
            RateExpr::Tabulated { values, tail } => {
                let len = values.len() as u64;
                if n <= len {
                    values[(n - 1) as usize]
                } else {
                    match tail {
                        Some(t) => t.eval(n),
                        None => values[values.len() - 1],
                    }
                }
            }
            RateExpr::Scaled { factor, inner } => factor * inner.eval(n),
            RateExpr::Product { left, right } => left.eval(n) * right.eval(n),
            RateExpr::Join { left, right } => left.eval(n).max(right.eval(n)),
            RateExpr::Meet { left, right } => left.eval(n).min(right.eval(n)),
            RateExpr::PlusDyadic { inner } => inner.eval(n) + libm::scalbn(1.0, -(n.min(2000) as i32)),
            RateExpr::Difference { inner } => difference(inner, n),
            RateExpr::Sigma { inner, horizon, table } => sigma_eval(inner, *horizon, table, n),
            RateExpr::LowerEnvelope { members } => {
                let k = (n as usize).min(members.len());
                members[..k].iter().map(|m| m.eval(n)).fold(f64::INFINITY, f64::min)
            }
            RateExpr::UpperEnvelope { members, factors } => members
                .iter()
                .zip(factors)
                .map(|(m, c)| c * m.eval(n))
                .fold(0.0, f64::max),
            RateExpr::SampledAt { inner, starts } => inner.eval(starts.start_of(n)),
            RateExpr::FromErrors { errors } => errors.phi_x(n),
        }
    }

    /// `ln value(n)`, avoiding underflow where the form allows it.
    pub fn ln_eval(&self, n: u64) -> f64 {
        let direct = |v: f64| libm::log(v);
        match self {
            RateExpr::Power { .. } | RateExpr::PowerLog(_) | RateExpr::Exponential { .. } => {
                let v = self.eval(n);
                if v.is_normal() {
                    direct(v)
                } else {
                    self.as_closed().unwrap().ln_at(libm::log(n as f64))
                }
            }
            RateExpr::Step { .. } | RateExpr::Tabulated { .. } => match self {
                RateExpr::Tabulated { values, tail: Some(t) } if n > values.len() as u64 => t.ln_eval(n),
                _ => direct(self.eval(n)),
            },
            RateExpr::Scaled { factor, inner } => libm::log(*factor) + inner.ln_eval(n),
            RateExpr::Product { left, right } => left.ln_eval(n) + right.ln_eval(n),
            RateExpr::Join { left, right } => left.ln_eval(n).max(right.ln_eval(n)),
            RateExpr::Meet { left, right } => left.ln_eval(n).min(right.ln_eval(n)),
            RateExpr::PlusDyadic { inner } => {
                let a = inner.ln_eval(n);
                let b = -(n as f64) * core::f64::consts::LN_2;
                let m = a.max(b);
                m + libm::log1p(libm::exp(-libm::fabs(a - b)))
            }
            RateExpr::Sigma { inner, table, .. } => match closed_tail_sum(inner) {
                Some(t) => t.ln_eval(n),
                None => {
                    let _ = table;
                    direct(self.eval(n))
                }
            },
            RateExpr::LowerEnvelope { members } => {
                let k = (n as usize).min(members.len());
                members[..k].iter().map(|m| m.ln_eval(n)).fold(f64::INFINITY, f64::min)
            }
            RateExpr::UpperEnvelope { members, factors } => members
                .iter()
                .zip(factors)
                .map(|(m, c)| libm::log(*c) + m.ln_eval(n))
                .fold(f64::NEG_INFINITY, f64::max),
            RateExpr::SampledAt { inner, starts } => inner.ln_eval(starts.start_of(n)),
            RateExpr::Difference { inner } => {
                let v = self.eval(n);
                if v.is_normal() {
                    return direct(v);
                }
                // ln(a − b) = ln a + ln(−expm1(ln b − ln a))
                let la = inner.ln_eval(n);
                la + libm::log(-libm::expm1(inner.ln_eval(n + 1) - la))
            }
            _ => direct(self.eval(n)),
        }
    }

    /// `ln value` at the real argument `e^ln_x`, for expressions built from
    /// closed forms.
    pub fn ln_at_real(&self, ln_x: f64) -> Option<f64> {
        match self {
            RateExpr::Power { .. } | RateExpr::PowerLog(_) | RateExpr::Exponential { .. } => {
                Some(self.as_closed().unwrap().ln_at(ln_x))
            }
            RateExpr::Scaled { factor, inner } => Some(libm::log(*factor) + inner.ln_at_real(ln_x)?),
            RateExpr::Product { left, right } => Some(left.ln_at_real(ln_x)? + right.ln_at_real(ln_x)?),
            RateExpr::Join { left, right } => Some(left.ln_at_real(ln_x)?.max(right.ln_at_real(ln_x)?)),
            RateExpr::Meet { left, right } => Some(left.ln_at_real(ln_x)?.min(right.ln_at_real(ln_x)?)),
            _ => None,
        }
    }

    /// True when the expression follows its asymptote smoothly enough for
    /// difference asymptotics to be valid.
    pub fn is_smooth(&self) -> bool {
        match self {
            RateExpr::Power { .. } | RateExpr::PowerLog(_) | RateExpr::Exponential { .. } => true,
            RateExpr::Scaled { inner, .. } | RateExpr::PlusDyadic { inner } => inner.is_smooth(),
            RateExpr::Product { left, right } | RateExpr::Join { left, right } | RateExpr::Meet { left, right } => {
                left.is_smooth() && right.is_smooth()
            }
            RateExpr::Sigma { inner, .. } | RateExpr::Difference { inner } => inner.is_smooth(),
            _ => false,
        }
    }

    /// Asymptotic certificate derived from the structure of the expression.
    pub fn asymptote(&self) -> Option<PowerLog> {
        match self {
            RateExpr::Power { .. } | RateExpr::PowerLog(_) | RateExpr::Exponential { .. } => {
                Some(self.as_closed().unwrap().asymptote())
            }
            RateExpr::Step { tail, .. } | RateExpr::Tabulated { tail, .. } => tail.as_ref()?.asymptote(),
            RateExpr::Scaled { factor, inner } => Some(inner.asymptote()?.scale(*factor)),
            RateExpr::Product { left, right } => Some(left.asymptote()?.mul(&right.asymptote()?)),
            RateExpr::Join { left, right } => Some(left.asymptote()?.join(&right.asymptote()?)),
            RateExpr::Meet { left, right } => Some(left.asymptote()?.meet(&right.asymptote()?)),
            RateExpr::PlusDyadic { inner } => Some(inner.asymptote()?.add(&PowerLog::geometric(1.0, 0.5))),
            RateExpr::Difference { inner } => {
                if let RateExpr::Sigma { inner: k, .. } = inner.as_ref() {
                    return k.asymptote();
                }
                if !inner.is_smooth() {
                    return None;
                }
                inner.asymptote()?.forward_difference()
            }
            RateExpr::Sigma { inner, .. } => {
                if let RateExpr::Difference { inner: phi } = inner.as_ref() {
                    let a = phi.asymptote()?;
                    return a.tends_to_zero().then_some(a);
                }
                inner.asymptote()?.tail_sum()
            }
            RateExpr::LowerEnvelope { members } => {
                let mut it = members.iter();
                let mut acc = it.next()?.asymptote()?;
                for m in it {
                    acc = acc.meet(&m.asymptote()?);
                }
                Some(acc)
            }
            RateExpr::UpperEnvelope { members, factors } => {
                let mut acc: Option<PowerLog> = None;
                for (m, c) in members.iter().zip(factors) {
                    let a = m.asymptote()?.scale(*c);
                    acc = Some(match acc {
                        None => a,
                        Some(b) => b.join(&a),
                    });
                }
                acc
            }
            RateExpr::SampledAt { .. } => None,
            RateExpr::FromErrors { errors } => errors.phi_x_asymptote(),
        }
    }

    /// Builds lazily computed tables below this node.
    pub fn prepare(&mut self) {
        match self {
            RateExpr::Sigma { inner, horizon, table } => {
                inner.prepare();
                if table.0.is_none() && closed_tail_sum(inner).is_none() {
                    table.0 = Some(Arc::new(build_sigma_table(inner, *horizon)));
                }
            }
            RateExpr::Step { tail: Some(t), .. } | RateExpr::Tabulated { tail: Some(t), .. } => t.prepare(),
            RateExpr::Scaled { inner, .. }
            | RateExpr::PlusDyadic { inner }
            | RateExpr::Difference { inner }
            | RateExpr::SampledAt { inner, .. } => inner.prepare(),
            RateExpr::Product { left, right } | RateExpr::Join { left, right } | RateExpr::Meet { left, right } => {
                left.prepare();
                right.prepare();
            }
            RateExpr::LowerEnvelope { members } | RateExpr::UpperEnvelope { members, .. } => {
                members.iter_mut().for_each(RateExpr::prepare)
            }
            _ => {}
        }
    }

    /// True when evaluation relies on a truncated numerical tail.
    pub fn is_approximate(&self) -> bool {
        match self {
            RateExpr::Sigma { inner, .. } => closed_tail_sum(inner).is_none() || inner.is_approximate(),
            RateExpr::UpperEnvelope { .. } => true,
            RateExpr::Step { tail: Some(t), .. } | RateExpr::Tabulated { tail: Some(t), .. } => t.is_approximate(),
            RateExpr::Scaled { inner, .. }
            | RateExpr::PlusDyadic { inner }
            | RateExpr::Difference { inner }
            | RateExpr::SampledAt { inner, .. } => inner.is_approximate(),
            RateExpr::Product { left, right } | RateExpr::Join { left, right } | RateExpr::Meet { left, right } => {
                left.is_approximate() || right.is_approximate()
            }
            RateExpr::LowerEnvelope { members } => members.iter().any(RateExpr::is_approximate),
            _ => false,
        }
    }
}

/// Exact expression for `∑_{i ≥ n} inner(i)` when one is known.
pub fn closed_tail_sum(inner: &RateExpr) -> Option<RateExpr> {
    match inner {
        RateExpr::Exponential { coef, ratio } if *ratio < 1.0 => {
            Some(RateExpr::Exponential { coef: coef / (1.0 - ratio), ratio: *ratio })
        }
        RateExpr::Difference { inner: phi } => {
            let a = phi.asymptote()?;
            a.tends_to_zero().then(|| phi.as_ref().clone())
        }
        RateExpr::Scaled { factor, inner } => Some(closed_tail_sum(inner)?.scaled(*factor)),
        _ => None,
    }
}

fn difference(inner: &RateExpr, n: u64) -> f64 {
    match *inner {
        RateExpr::Power { coef, power } if power > 0.0 => {
            // c·(n^-a − (n+1)^-a) = c·n^-a·(−expm1(−a·ln(1 + 1/n)))
            let x = n as f64;
            if power == 1.0 {
                return coef / (x * (x + 1.0));
            }
            coef * libm::pow(x, -power) * -libm::expm1(-power * libm::log1p(1.0 / x))
        }
        RateExpr::Exponential { coef, ratio } => coef * libm::pow(ratio, n as f64) * (1.0 - ratio),
        RateExpr::Sigma { inner: ref k, .. } => k.eval(n),
        _ => inner.eval(n) - inner.eval(n + 1),
    }
}

pub(crate) fn build_sigma_table(inner: &RateExpr, horizon: u64) -> SigmaTable {
    let tail = match inner.asymptote() {
        Some(a) if a.summable() => a.tail_estimate(horizon + 1),
        _ => 0.0,
    };
    let h = horizon as usize;
    let mut suffix = alloc::vec![0.0; h];
    let mut acc = Compensated::new();
    acc.add(tail);
    for n in (1..=h).rev() {
        acc.add(inner.eval(n as u64));
        suffix[n - 1] = acc.value();
    }
    SigmaTable { suffix, tail }
}

fn sigma_eval(inner: &RateExpr, horizon: u64, table: &Cache<SigmaTable>, n: u64) -> f64 {
    if let Some(t) = closed_tail_sum(inner) {
        return t.eval(n);
    }
    match &table.0 {
        Some(t) if n <= horizon => t.suffix[(n - 1) as usize],
        Some(_) | None if n > horizon => match inner.asymptote() {
            Some(a) if a.summable() => a.tail_estimate(n),
            _ => 0.0,
        },
        _ => build_sigma_table(inner, horizon).suffix[(n - 1) as usize],
    }
}

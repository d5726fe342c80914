//! Best-approximation error sequences and the explicit constructions built
//! from them.
//!
//! An [`ErrorSeq`] is a finite prefix `E_1, …, E_L` plus an optional
//! [`TailRule`] for `n > L`. Values can be stored as `−ln E_n` so sequences
//! like `e^{-1/φ(n)}` survive far past the `f64` underflow point.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{exact_difference, ExactSum};
use crate::rates::{
    sample_points, separating_profile, Limit, PowerLog, RateExpr, RateFn, Relation, Role, SeparatingProfile,
    StepStarts,
};
use crate::wiener::{TargetNorm, WienerElement, WienerTail};
use crate::DEFAULT_HORIZON;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "values", rename_all = "kebab-case"))]
pub enum Prefix {
    /// `E_n` directly.
    Values(Vec<f64>),
    /// `−ln E_n`; `+∞` encodes `E_n = 0`.
    NegLog(Vec<f64>),
}

impl Prefix {
    fn len(&self) -> usize {
        match self {
            Prefix::Values(v) | Prefix::NegLog(v) => v.len(),
        }
    }
}

/// Closed form for `E_n` beyond the prefix.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum TailRule {
    Zero,
    /// `E_n = E_L · ratio^(n−L)`, with `E_0 = 1` when the prefix is empty.
    Geometric { ratio: f64 },
    /// `coef · n^(−power)`
    Power { coef: f64, power: f64 },
    /// `exp(−scale / rate(n))`
    ExpNegInvRate { rate: RateFn, scale: f64 },
    /// `exp(−scale / rate(n_i))` for `n_i ≤ n < n_{i+1}`.
    Step { rate: RateFn, starts: StepStarts, scale: f64 },
    /// `exp(−1/(h(n)·φ(n)))` for a separating profile `h`.
    Profile(SeparatingProfile),
    /// `factor · seq(n)`
    Follow { seq: Box<ErrorSeq>, factor: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Provenance {
    Constructed,
    Computed,
    Tabulated,
}

/// Asymptotic behaviour of `λ_n = −ln E_n`.
#[derive(Clone, Debug, PartialEq)]
pub enum Decay {
    /// `λ_n ~ form`.
    Exact(PowerLog),
    /// `λ_n = envelope(n_i)` on step blocks, so `λ_n ≤ envelope(n)` with
    /// equality at the starts. `regular` means the envelope varies slowly
    /// enough across a block for the two to be comparable up to constants.
    StepEnvelope { envelope: PowerLog, regular: bool },
    /// `E_n = 0` eventually.
    Vanishing,
    Profile,
    Unknown,
}

/// A nonnegative, nonincreasing sequence `E_1, E_2, …`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "ErrorSeqRepr", into = "ErrorSeqRepr"))]
pub struct ErrorSeq {
    prefix: Prefix,
    tail: Option<TailRule>,
    provenance: Provenance,
}

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Clone, Debug)]
#[doc(hidden)]
pub struct ErrorSeqRepr {
    pub prefix: Prefix,
    #[cfg_attr(feature = "serde", serde(default))]
    pub tail: Option<TailRule>,
    pub provenance: Provenance,
}

impl TryFrom<ErrorSeqRepr> for ErrorSeq {
    type Error = Error;
    fn try_from(r: ErrorSeqRepr) -> Result<Self> {
        ErrorSeq::new(r.prefix, r.tail, r.provenance)
    }
}

impl From<ErrorSeq> for ErrorSeqRepr {
    fn from(e: ErrorSeq) -> Self {
        ErrorSeqRepr { prefix: e.prefix, tail: e.tail, provenance: e.provenance }
    }
}

impl ErrorSeq {
    pub fn new(prefix: Prefix, tail: Option<TailRule>, provenance: Provenance) -> Result<Self> {
        let e = ErrorSeq { prefix, tail, provenance };
        e.validate()?;
        Ok(e)
    }

    pub fn from_values(values: Vec<f64>, tail: Option<TailRule>, provenance: Provenance) -> Result<Self> {
        Self::new(Prefix::Values(values), tail, provenance)
    }

    /// Sequence given entirely by a tail rule.
    pub fn from_rule(tail: TailRule, provenance: Provenance) -> Result<Self> {
        Self::new(Prefix::Values(Vec::new()), Some(tail), provenance)
    }

    /// `E_n = exp(−1/rate(n))`.
    pub fn exp_neg_inv(rate: &RateFn) -> Result<Self> {
        Self::from_rule(TailRule::ExpNegInvRate { rate: rate.clone(), scale: 1.0 }, Provenance::Constructed)
    }

    pub fn prefix(&self) -> &Prefix {
        &self.prefix
    }

    pub fn tail(&self) -> Option<&TailRule> {
        self.tail.as_ref()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    /// Largest index with a defined value, `None` when a tail rule covers
    /// every `n`.
    pub fn known_up_to(&self) -> Option<u64> {
        match self.tail {
            Some(_) => None,
            None => Some(self.prefix_len()),
        }
    }

    /// True when the sequence provably tends to 0.
    pub fn tends_to_zero(&self) -> bool {
        match &self.tail {
            Some(_) => true,
            None => self.prefix_len() > 0 && self.neg_ln(self.prefix_len()) == f64::INFINITY,
        }
    }

    /// `E_n`; `E_0` is read as `E_1`. Without a tail rule the last prefix
    /// value is repeated.
    pub fn get(&self, n: u64) -> f64 {
        let n = n.max(1);
        let len = self.prefix_len();
        if n <= len || self.tail.is_none() {
            let i = (n.min(len) - 1) as usize;
            return match &self.prefix {
                Prefix::Values(v) => v[i],
                Prefix::NegLog(v) => libm::exp(-v[i]),
            };
        }
        match self.tail.as_ref().unwrap() {
            TailRule::Zero => 0.0,
            TailRule::Geometric { ratio } => self.last_prefix_value() * libm::pow(*ratio, (n - len) as f64),
            TailRule::Power { coef, power } => coef * libm::pow(n as f64, -power),
            TailRule::Follow { seq, factor } => factor * seq.get(n),
            _ => libm::exp(-self.neg_ln(n)),
        }
    }

    fn last_prefix_value(&self) -> f64 {
        if self.prefix_len() == 0 {
            1.0
        } else {
            self.get(self.prefix_len())
        }
    }

    /// `λ_n = −ln E_n`, `+∞` where `E_n = 0`.
    pub fn neg_ln(&self, n: u64) -> f64 {
        let n = n.max(1);
        let len = self.prefix_len();
        if n <= len || self.tail.is_none() {
            let i = (n.min(len) - 1) as usize;
            return match &self.prefix {
                Prefix::Values(v) => -libm::log(v[i]),
                Prefix::NegLog(v) => v[i],
            };
        }
        match self.tail.as_ref().unwrap() {
            TailRule::Zero => f64::INFINITY,
            TailRule::Geometric { ratio } => {
                let base = if len == 0 { 0.0 } else { self.neg_ln(len) };
                base - (n - len) as f64 * libm::log(*ratio)
            }
            TailRule::Power { coef, power } => power * libm::log(n as f64) - libm::log(*coef),
            TailRule::ExpNegInvRate { rate, scale } => scale * libm::exp(-rate.ln_eval(n)),
            TailRule::Step { rate, starts, scale } => scale * libm::exp(-rate.ln_eval(starts.start_of(n))),
            TailRule::Profile(p) => libm::exp(-p.ln_h_phi(n)),
            TailRule::Follow { seq, factor } => seq.neg_ln(n) - libm::log(*factor),
        }
    }

    /// `φ_x(n)`: 1 when `E_n ≥ 1/e`, `1/|ln E_n|` below that, and
    /// `min(φ_x(n−1), 1/n)` once `E_n = 0`.
    pub fn phi_x(&self, n: u64) -> f64 {
        if n <= 1 {
            return 1.0;
        }
        let l = self.neg_ln(n);
        if l <= 1.0 {
            return 1.0;
        }
        if l.is_finite() {
            return 1.0 / l;
        }
        // E vanishes from n0 on; unrolling the recursion gives
        // min(φ_x(n0 − 1), 1/n).
        let n0 = self.first_zero().unwrap_or(n).min(n);
        let before = if n0 <= 1 { 1.0 } else { self.phi_x(n0 - 1) };
        before.min(1.0 / n as f64)
    }

    /// First index with `E_n = 0`.
    pub fn first_zero(&self) -> Option<u64> {
        let len = self.prefix_len();
        let zero_at = |i: u64| self.neg_ln(i) == f64::INFINITY;
        if len > 0 && zero_at(len) {
            let mut lo = 1;
            let mut hi = len;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if zero_at(mid) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            return Some(lo);
        }
        match self.tail {
            Some(TailRule::Zero) => Some(len + 1),
            _ => None,
        }
    }

    pub fn decay(&self) -> Decay {
        let Some(tail) = &self.tail else {
            return if self.first_zero().is_some() { Decay::Vanishing } else { Decay::Unknown };
        };
        match tail {
            TailRule::Zero => Decay::Vanishing,
            TailRule::Geometric { ratio } => {
                if *ratio == 0.0 {
                    Decay::Vanishing
                } else {
                    Decay::Exact(PowerLog::power_log(-libm::log(*ratio), -1.0, 0.0))
                }
            }
            TailRule::Power { power, .. } => Decay::Exact(PowerLog::power_log(*power, 0.0, -1.0)),
            TailRule::ExpNegInvRate { rate, scale } => match rate.asymptote() {
                Some(a) => Decay::Exact(a.recip().scale(*scale)),
                None => Decay::Unknown,
            },
            TailRule::Step { rate, starts, scale } => match rate.asymptote() {
                Some(a) => Decay::StepEnvelope {
                    envelope: a.recip().scale(*scale),
                    regular: a.ratio == 1.0 && starts.base >= 2,
                },
                None => Decay::Unknown,
            },
            TailRule::Profile(_) => Decay::Profile,
            TailRule::Follow { seq, .. } => match seq.decay() {
                Decay::Exact(d) if d.limit() == Limit::Infinite => Decay::Exact(d),
                Decay::StepEnvelope { envelope, regular } if envelope.limit() == Limit::Infinite => {
                    Decay::StepEnvelope { envelope, regular }
                }
                Decay::Vanishing => Decay::Vanishing,
                _ => Decay::Unknown,
            },
        }
    }

    /// Asymptote of `φ_x` when the decay of `E` is known in closed form.
    pub fn phi_x_asymptote(&self) -> Option<PowerLog> {
        match self.decay() {
            Decay::Exact(d) if d.limit() == Limit::Infinite => Some(d.recip()),
            Decay::Vanishing => Some(PowerLog::power_log(1.0, 1.0, 0.0)),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.prefix_len() == 0 && self.tail.is_none() {
            return invalid("error sequence needs a prefix or a tail rule");
        }
        let mut prev = f64::NEG_INFINITY;
        for n in 1..=self.prefix_len() {
            let l = self.neg_ln(n);
            if l.is_nan() {
                return invalid(format!("E_{n} is not a finite nonnegative number"));
            }
            if l < prev {
                return invalid(format!("error sequence increases at n={n}"));
            }
            prev = l;
        }
        if let Prefix::Values(v) = &self.prefix {
            if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                return invalid("prefix values must be finite and nonnegative");
            }
        }
        let Some(tail) = &self.tail else { return Ok(()) };
        match tail {
            TailRule::Geometric { ratio } if !(*ratio >= 0.0 && *ratio < 1.0) => {
                return invalid("geometric tail needs a ratio in [0, 1)")
            }
            TailRule::Power { coef, power } if !(*coef > 0.0 && *power > 0.0) => {
                return invalid("power tail needs positive coefficient and exponent")
            }
            TailRule::ExpNegInvRate { rate, scale } | TailRule::Step { rate, scale, .. } => {
                if rate.role() != Role::Scale {
                    return invalid("tail rate must be a scale function");
                }
                if !(*scale > 0.0) {
                    return invalid("tail scale must be positive");
                }
            }
            TailRule::Follow { seq, factor } => {
                if !(*factor > 0.0) {
                    return invalid("followed sequence needs a positive factor");
                }
                if !seq.tends_to_zero() {
                    return Err(Error::UncertifiedTail);
                }
            }
            _ => {}
        }
        let len = self.prefix_len();
        let mut last = if len == 0 { f64::NEG_INFINITY } else { self.neg_ln(len) };
        for m in sample_points(DEFAULT_HORIZON) {
            let n = len + m;
            let l = self.neg_ln(n);
            if l.is_nan() || l + 1e-12 * libm::fabs(l) < last {
                return invalid(format!("tail rule breaks monotonicity near n={n}"));
            }
            last = l;
        }
        Ok(())
    }

    /// Values `E_1..=E_n` (underflowing entries read as 0).
    pub fn values(&self, n: u64) -> Vec<f64> {
        (1..=n).map(|i| self.get(i)).collect()
    }
}

/// Indices `n_k` at which an inequality was observed, with the observed
/// values.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct WitnessRecord {
    pub indices: Vec<u64>,
    pub margins: Vec<f64>,
    pub inequality: String,
    /// Witnesses found in total; `indices` may be truncated.
    pub total: u64,
}

impl WitnessRecord {
    pub fn new(inequality: impl Into<String>) -> Self {
        WitnessRecord { inequality: inequality.into(), ..Default::default() }
    }

    pub(crate) fn push(&mut self, n: u64, margin: f64, keep: usize) {
        self.total += 1;
        if self.indices.len() < keep {
            self.indices.push(n);
            self.margins.push(margin);
        }
    }
}

/// The scale function `φ_x` attached to `E`.
pub fn phi_from_errors(e: &ErrorSeq) -> Result<RateFn> {
    RateFn::scale(RateExpr::FromErrors { errors: Box::new(e.clone()) })
}

/// A scalar Wiener element whose error sequence is exactly `c`: frequency
/// `n ≥ 1` carries `c_{n−1} − c_n` with `c_0 := c_1`.
pub fn realize_bernstein(c: &ErrorSeq) -> Result<WienerElement> {
    if !c.tends_to_zero() {
        return Err(Error::UncertifiedTail);
    }
    let len = c.prefix_len();
    let mut f = WienerElement::zero(1, TargetNorm::L1);
    for n in 2..=len {
        let (d, _) = exact_difference(c.get(n - 1), c.get(n));
        if d != 0.0 {
            f.set(n as i64, alloc::vec![d])?;
        }
    }
    match c.tail() {
        None | Some(TailRule::Zero) => {
            // c vanishes after the prefix.
            let last = if len == 0 { 0.0 } else { c.get(len) };
            if last != 0.0 && len >= 1 {
                f.set(len as i64 + 1, alloc::vec![last])?;
            }
        }
        Some(_) => {
            f.set_tail(WienerTail::Telescoping { from: len.max(1) + 1, seq: c.clone(), direction: alloc::vec![1.0] })?;
        }
    }
    Ok(f)
}

/// True when every coefficient of `realize_bernstein(c)` over the prefix is
/// an exact `f64` difference.
pub fn realization_is_exact(c: &ErrorSeq) -> bool {
    (2..=c.prefix_len()).all(|n| exact_difference(c.get(n - 1), c.get(n)).1)
}

/// `E_i(f)` for `i = 1..=n_max` as exact tail sums.
///
/// The prefix is extended to cover the sparse support and the start of the
/// tail, so the attached tail rule is exact.
pub fn errors_from_wiener(f: &WienerElement, n_max: u64) -> Result<ErrorSeq> {
    let support = f.max_sparse_frequency();
    let tail_from = f.tail().map(WienerTail::start);
    let len = n_max.max(support).max(tail_from.map_or(0, |k| k - 1)).max(1);
    let mut out = alloc::vec![0.0; len as usize];
    // Beyond the sparse support E_i is a closed tail sum.
    for i in support.max(1)..=len {
        out[(i - 1) as usize] = f.tail_sum_from(i + 1)?;
    }
    let mut acc = ExactSum::from_f64(f.tail_sum_from(support + 1)?);
    for i in (1..support).rev() {
        f.add_norm_at(&mut acc, i as i64 + 1);
        f.add_norm_at(&mut acc, -(i as i64) - 1);
        out[(i - 1) as usize] = acc.to_f64();
    }
    let tail = match f.tail() {
        None => Some(TailRule::Zero),
        Some(WienerTail::Geometric { ratio, .. }) => Some(TailRule::Geometric { ratio: *ratio }),
        Some(WienerTail::Telescoping { seq, direction, .. }) => {
            let factor = f.norm_kind().norm(direction);
            if factor == 0.0 {
                Some(TailRule::Zero)
            } else {
                Some(TailRule::Follow { seq: Box::new(seq.clone()), factor })
            }
        }
    };
    // Underflowed entries would read as E = 0 (λ = ∞) ahead of a tail rule
    // that still carries the finite log; the rule covers them instead.
    if !matches!(tail, Some(TailRule::Zero)) {
        let keep = support.max(tail_from.map_or(0, |k| k - 1)).max(1) as usize;
        while out.len() > keep && out[out.len() - 1] == 0.0 {
            out.pop();
        }
    }
    ErrorSeq::from_values(out, tail, Provenance::Computed)
}

/// The step sequence `c_n = e^{−1/φ′(n_i)}` for `n_i ≤ n < n_{i+1}`,
/// separating the second classes of `φ′` and `φ`.
pub fn separation_witness(phi: &RateFn, phi_prime: &RateFn, starts: Option<StepStarts>) -> Result<ErrorSeq> {
    if phi.role() != Role::Scale || phi_prime.role() != Role::Scale {
        return invalid("separation_witness needs two scale functions");
    }
    let starts = starts.unwrap_or_else(|| StepStarts::powers(4));
    let horizon = phi.horizon().min(phi_prime.horizon());
    let idx = starts.up_to(horizon);
    if idx.len() < 2 {
        return invalid("subsequence has fewer than two indices within the horizon");
    }
    if let (Some(a), Some(b)) = (phi_prime.asymptote(), phi.asymptote()) {
        if a.mul(&b.recip()).limit() != Limit::Infinite {
            return invalid("φ′/φ does not diverge");
        }
    }
    let ratios: Vec<f64> = idx.iter().map(|&n| libm::exp(phi_prime.ln_eval(n) - phi.ln_eval(n))).collect();
    let first = ratios[0];
    let last = *ratios.last().unwrap();
    let nondecreasing = ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    if !(nondecreasing && last > 4.0 * first) {
        return invalid("φ′/φ does not diverge along the subsequence");
    }
    ErrorSeq::from_rule(TailRule::Step { rate: phi_prime.clone(), starts, scale: 1.0 }, Provenance::Constructed)
}

/// `E_n = e^{−1/(h(n)·φ(n))}` with `φ = Σ(κ)` and `h` the separating profile
/// realized over `blocks` blocks.
pub fn beurling_witness(kappa: &RateFn, blocks: usize) -> Result<ErrorSeq> {
    let profile = separating_profile(kappa, blocks)?;
    ErrorSeq::from_rule(TailRule::Profile(profile), Provenance::Constructed)
}

/// True when `φ ≤ C·ψ` is certified.
pub(crate) fn dominated_by(phi: &RateFn, psi: &RateFn) -> bool {
    let c = crate::rates::compare(phi, psi);
    c.certified && matches!(c.relation, Relation::Equivalent | Relation::StrictlySmaller)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::ClosedForm;
    use crate::wiener::wiener_en;

    fn scale(e: RateExpr) -> RateFn {
        RateFn::scale(e).unwrap()
    }

    #[test]
    fn phi_x_branches() {
        let e = ErrorSeq::exp_neg_inv(&scale(RateExpr::power(1.0, 1.0))).unwrap();
        for n in 2..50 {
            assert!((e.phi_x(n) - 1.0 / n as f64).abs() < 1e-15);
        }
        let r = scale(RateExpr::power(1.0, 0.5));
        let e = ErrorSeq::exp_neg_inv(&r).unwrap();
        assert!((e.phi_x(100) - 0.1).abs() < 1e-15);

        let e = ErrorSeq::new(
            Prefix::NegLog(alloc::vec![0.5, 2.0, 5.0, 10.0]),
            Some(TailRule::Zero),
            Provenance::Tabulated,
        )
        .unwrap();
        assert_eq!(e.phi_x(1), 1.0);
        assert_eq!(e.phi_x(2), 0.5);
        assert_eq!(e.phi_x(5), 0.1);
        assert_eq!(e.phi_x(20), 0.05);
        assert_eq!(e.first_zero(), Some(5));
    }

    #[test]
    fn rejects_increase() {
        assert!(ErrorSeq::from_values(alloc::vec![0.5, 0.6], None, Provenance::Tabulated).is_err());
        assert!(ErrorSeq::from_values(alloc::vec![0.5, 0.25], Some(TailRule::Power { coef: 10.0, power: 1.0 }), Provenance::Tabulated).is_err());
    }

    #[test]
    fn realization_of_harmonic_target() {
        let c = ErrorSeq::from_rule(TailRule::Power { coef: 1.0, power: 1.0 }, Provenance::Constructed).unwrap();
        let f = realize_bernstein(&c).unwrap();
        assert_eq!(wiener_en(&f, 5).unwrap(), 0.2);
        assert_eq!(crate::wiener::wiener_norm(&f).unwrap(), 1.0);
        let c2: Vec<f64> = (1..=30).map(|n| 1.0 / n as f64).collect();
        let c2 = ErrorSeq::from_values(c2, Some(TailRule::Power { coef: 1.0, power: 1.0 }), Provenance::Tabulated).unwrap();
        let f2 = realize_bernstein(&c2).unwrap();
        let k = f2.coefficient(6)[0];
        assert!((k - 1.0 / 30.0).abs() < 1e-16);
        let e = errors_from_wiener(&f2, 40).unwrap();
        for i in 1..=40u64 {
            assert!((e.get(i) - 1.0 / i as f64).abs() <= 1e-16, "i={i}");
        }
    }

    #[test]
    fn realization_of_dyadic_target_is_bit_exact() {
        let c: Vec<f64> = (1..=60).map(|n| libm::scalbn(1.0, -(n as i32))).collect();
        let c = ErrorSeq::from_values(c, Some(TailRule::Geometric { ratio: 0.5 }), Provenance::Tabulated).unwrap();
        assert!(realization_is_exact(&c));
        let f = realize_bernstein(&c).unwrap();
        let e = errors_from_wiener(&f, 100).unwrap();
        for i in 1..=100u64 {
            assert_eq!(e.get(i), libm::scalbn(1.0, -(i as i32)));
        }
    }

    #[test]
    fn zero_target_gives_zero_element() {
        let c = ErrorSeq::from_rule(TailRule::Zero, Provenance::Constructed).unwrap();
        let f = realize_bernstein(&c).unwrap();
        assert_eq!(crate::wiener::wiener_norm(&f).unwrap(), 0.0);
        assert_eq!(wiener_en(&f, 3).unwrap(), 0.0);
    }

    #[test]
    fn underflowed_errors_defer_to_the_tail() {
        let c = ErrorSeq::from_values(alloc::vec![0.75, 0.5], Some(TailRule::Geometric { ratio: 0.125 }), Provenance::Constructed)
            .unwrap();
        let f = realize_bernstein(&c).unwrap();
        let e = errors_from_wiener(&f, 1000).unwrap();
        assert!(e.prefix_len() < 1000);
        for n in [2, 300, 357, 358, 1000] {
            assert_eq!(e.get(n).to_bits(), c.get(n).to_bits(), "n = {n}");
        }
    }

    #[test]
    fn separation_witness_values() {
        let phi = scale(RateExpr::power(1.0, 1.0));
        let phi_p = scale(RateExpr::power(1.0, 0.5));
        let e = separation_witness(&phi, &phi_p, None).unwrap();
        for i in 0..10u32 {
            let n = 4u64.pow(i);
            let m = libm::exp(-e.neg_ln(n) * phi_p.eval(n));
            assert!((m - (-1.0f64).exp()).abs() < 1e-15);
        }
        assert!(separation_witness(&phi, &phi, None).is_err());
    }

    #[test]
    fn from_errors_rate_is_a_scale() {
        let cf = ClosedForm { power: 0.5, ..ClosedForm::default() };
        let e = ErrorSeq::exp_neg_inv(&scale(RateExpr::closed(cf))).unwrap();
        let phi = phi_from_errors(&e).unwrap();
        let a = phi.asymptote().unwrap();
        assert!((a.power - 0.5).abs() < 1e-15);
    }
}

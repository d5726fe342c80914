use core::cmp::Ordering;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Tolerance when comparing exponents.
pub const EXPONENT_EPS: f64 = 1e-12;

/// Asymptotic form `coef · ratio^n · n^(-power) · (ln n)^(-log_power)`.
///
/// A certificate of this shape asserts that the ratio between the sequence and
/// the form tends to 1. Pure power-log forms have `ratio = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PowerLog {
    pub coef: f64,
    #[cfg_attr(feature = "serde", serde(default = "one"))]
    pub ratio: f64,
    pub power: f64,
    pub log_power: f64,
}

#[cfg(feature = "serde")]
fn one() -> f64 {
    1.0
}

/// Limit of a sequence as `n → ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Limit {
    Zero,
    Positive(f64),
    Infinite,
}

fn cmp_exp(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= EXPONENT_EPS {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

impl PowerLog {
    pub fn power_log(coef: f64, power: f64, log_power: f64) -> Self {
        PowerLog { coef, ratio: 1.0, power, log_power }
    }

    pub fn geometric(coef: f64, ratio: f64) -> Self {
        PowerLog { coef, ratio, power: 0.0, log_power: 0.0 }
    }

    fn ln_ratio(&self) -> f64 {
        if self.ratio == 1.0 {
            0.0
        } else {
            libm::log(self.ratio)
        }
    }

    /// Growth comparison: `Less` means `self / other → 0`.
    pub fn cmp_growth(&self, other: &PowerLog) -> Ordering {
        cmp_exp(self.ln_ratio(), other.ln_ratio())
            .then(cmp_exp(other.power, self.power))
            .then(cmp_exp(other.log_power, self.log_power))
    }

    pub fn limit(&self) -> Limit {
        match cmp_exp(self.ln_ratio(), 0.0)
            .then(cmp_exp(0.0, self.power))
            .then(cmp_exp(0.0, self.log_power))
        {
            Ordering::Less => Limit::Zero,
            Ordering::Greater => Limit::Infinite,
            Ordering::Equal => Limit::Positive(self.coef),
        }
    }

    pub fn tends_to_zero(&self) -> bool {
        self.limit() == Limit::Zero
    }

    /// Integral/ratio test for `∑ value(n)`.
    pub fn summable(&self) -> bool {
        match cmp_exp(self.ln_ratio(), 0.0) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match cmp_exp(self.power, 1.0) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => cmp_exp(self.log_power, 1.0) == Ordering::Greater,
            },
        }
    }

    /// Asymptote of `∑_{i ≥ n} value(i)` when summable.
    pub fn tail_sum(&self) -> Option<PowerLog> {
        if !self.summable() {
            return None;
        }
        if self.ln_ratio() < 0.0 {
            return Some(PowerLog { coef: self.coef / (1.0 - self.ratio), ..*self });
        }
        if cmp_exp(self.power, 1.0) == Ordering::Greater {
            Some(PowerLog::power_log(self.coef / (self.power - 1.0), self.power - 1.0, self.log_power))
        } else {
            Some(PowerLog::power_log(self.coef / (self.log_power - 1.0), 0.0, self.log_power - 1.0))
        }
    }

    /// Asymptote of `value(n) − value(n+1)` for a sequence that follows this
    /// form smoothly.
    pub fn forward_difference(&self) -> Option<PowerLog> {
        let lr = self.ln_ratio();
        if lr < 0.0 {
            return Some(PowerLog { coef: self.coef * (1.0 - self.ratio), ..*self });
        }
        if lr > 0.0 {
            return None;
        }
        if self.power > EXPONENT_EPS {
            return Some(PowerLog::power_log(self.coef * self.power, self.power + 1.0, self.log_power));
        }
        if self.power.abs() <= EXPONENT_EPS && self.log_power > EXPONENT_EPS {
            return Some(PowerLog::power_log(self.coef * self.log_power, 1.0, self.log_power + 1.0));
        }
        None
    }

    pub fn mul(&self, other: &PowerLog) -> PowerLog {
        PowerLog {
            coef: self.coef * other.coef,
            ratio: self.ratio * other.ratio,
            power: self.power + other.power,
            log_power: self.log_power + other.log_power,
        }
    }

    pub fn recip(&self) -> PowerLog {
        PowerLog {
            coef: 1.0 / self.coef,
            ratio: 1.0 / self.ratio,
            power: -self.power,
            log_power: -self.log_power,
        }
    }

    pub fn scale(&self, c: f64) -> PowerLog {
        PowerLog { coef: self.coef * c, ..*self }
    }

    /// Asymptote of the pointwise maximum.
    pub fn join(&self, other: &PowerLog) -> PowerLog {
        match self.cmp_growth(other) {
            Ordering::Less => *other,
            Ordering::Greater => *self,
            Ordering::Equal => self.scale_to(self.coef.max(other.coef)),
        }
    }

    /// Asymptote of the pointwise minimum.
    pub fn meet(&self, other: &PowerLog) -> PowerLog {
        match self.cmp_growth(other) {
            Ordering::Less => *self,
            Ordering::Greater => *other,
            Ordering::Equal => self.scale_to(self.coef.min(other.coef)),
        }
    }

    /// Asymptote of the pointwise sum.
    pub fn add(&self, other: &PowerLog) -> PowerLog {
        match self.cmp_growth(other) {
            Ordering::Less => *other,
            Ordering::Greater => *self,
            Ordering::Equal => self.scale_to(self.coef + other.coef),
        }
    }

    fn scale_to(&self, coef: f64) -> PowerLog {
        PowerLog { coef, ..*self }
    }

    /// Evaluates the form itself at a real argument `x > 1`.
    pub fn at(&self, x: f64) -> f64 {
        let mut v = self.coef * libm::pow(x, -self.power);
        if self.ratio != 1.0 {
            v *= libm::pow(self.ratio, x);
        }
        if self.log_power != 0.0 {
            v *= libm::pow(libm::log(x), -self.log_power);
        }
        v
    }

    /// Leading-order estimate of `∑_{i ≥ m} value(i)` from the form, used for
    /// truncated tails.
    pub fn tail_estimate(&self, m: u64) -> f64 {
        let x = m as f64;
        if self.ln_ratio() < 0.0 {
            return self.at(x) / (1.0 - self.ratio);
        }
        let y = x - 0.5;
        if cmp_exp(self.power, 1.0) == Ordering::Greater {
            let ln_part = if self.log_power == 0.0 { 1.0 } else { libm::pow(libm::log(y), -self.log_power) };
            self.coef * libm::pow(y, 1.0 - self.power) * ln_part / (self.power - 1.0)
        } else {
            self.coef * libm::pow(libm::log(y), 1.0 - self.log_power) / (self.log_power - 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_order_is_lexicographic() {
        let inv = PowerLog::power_log(1.0, 1.0, 0.0);
        let inv_sq = PowerLog::power_log(1.0, 2.0, 0.0);
        let log_over_n = PowerLog::power_log(1.0, 1.0, -1.0);
        let geo = PowerLog::geometric(1.0, 0.5);
        assert_eq!(inv_sq.cmp_growth(&inv), Ordering::Less);
        assert_eq!(log_over_n.cmp_growth(&inv), Ordering::Greater);
        assert_eq!(geo.cmp_growth(&inv_sq), Ordering::Less);
        assert_eq!(inv.cmp_growth(&inv.scale(5.0)), Ordering::Equal);
    }

    #[test]
    fn bertrand_boundary() {
        assert!(!PowerLog::power_log(1.0, 1.0, 1.0).summable());
        assert!(PowerLog::power_log(1.0, 1.0, 2.0).summable());
        assert!(!PowerLog::power_log(1.0, 0.9, -5.0).summable());
        assert!(PowerLog::geometric(3.0, 0.99).summable());
    }

    #[test]
    fn tail_sum_of_inverse_square() {
        let t = PowerLog::power_log(1.0, 2.0, 0.0).tail_sum().unwrap();
        assert_eq!(t, PowerLog::power_log(1.0, 1.0, 0.0));
        let t = PowerLog::power_log(2.0, 1.0, 3.0).tail_sum().unwrap();
        assert_eq!(t, PowerLog::power_log(1.0, 0.0, 2.0));
    }

    #[test]
    fn forward_difference_inverts_tail_sum() {
        let k = PowerLog::power_log(3.0, 2.5, 1.0);
        let d = k.tail_sum().unwrap().forward_difference().unwrap();
        assert_eq!(d.cmp_growth(&k), Ordering::Equal);
        assert!((d.coef - k.coef).abs() < 1e-12);
    }

    #[test]
    fn tail_estimate_of_inverse_square() {
        let k = PowerLog::power_log(1.0, 2.0, 0.0);
        let exact_tail: f64 = (1000..2_000_000u64).map(|i| 1.0 / (i as f64 * i as f64)).sum::<f64>() + 1.0 / 2_000_000.0;
        assert!((k.tail_estimate(1000) - exact_tail).abs() < 1e-9);
    }
}

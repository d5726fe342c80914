//! Exact and compensated summation of doubles.
//!
//! Every finite double is a dyadic rational `m·2^e` with `e ≥ -1074`, so a
//! big integer counting units of `2^-1074` represents any finite sum exactly.

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

const MIN_EXP: i32 = -1074;

/// Exact accumulator for sums of finite doubles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactSum {
    units: BigInt,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_f64(x: f64) -> Self {
        let mut s = Self::new();
        s.add(x);
        s
    }

    /// Adds `x` exactly. Panics on non-finite input.
    pub fn add(&mut self, x: f64) {
        assert!(x.is_finite(), "exact summation of a non-finite value");
        if x == 0.0 {
            return;
        }
        let (m, shift) = decompose(x);
        self.units += BigInt::from(m) << shift;
    }

    pub fn sub(&mut self, x: f64) {
        self.add(-x);
    }

    pub fn add_sum(&mut self, other: &ExactSum) {
        self.units += &other.units;
    }

    pub fn is_zero(&self) -> bool {
        self.units.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.units.sign()
    }

    /// Correctly rounded (nearest, ties to even) conversion.
    pub fn to_f64(&self) -> f64 {
        let neg = self.units.sign() == Sign::Minus;
        let mag = self.units.magnitude();
        let bits = mag.bits();
        let v = if bits <= 53 {
            let k = mag.to_u64().unwrap_or(0) as f64;
            libm::scalbn(k, MIN_EXP)
        } else {
            let shift = bits - 53;
            let mut top = (mag >> shift).to_u64().unwrap_or(0);
            let half = mag.bit(shift - 1);
            let sticky = mag.trailing_zeros().map_or(false, |tz| tz < shift - 1);
            if half && (sticky || top & 1 == 1) {
                top += 1;
            }
            libm::scalbn(top as f64, shift as i32 + MIN_EXP)
        };
        if neg {
            -v
        } else {
            v
        }
    }

    /// True when the accumulated value is exactly the double `x`.
    pub fn equals_f64(&self, x: f64) -> bool {
        *self == ExactSum::from_f64(x)
    }
}

/// Splits a finite nonzero double into an integer mantissa and a shift
/// relative to `2^-1074`.
fn decompose(x: f64) -> (i64, usize) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if exp_field == 0 {
        (frac, MIN_EXP)
    } else {
        (frac | (1i64 << 52), exp_field - 1075)
    };
    (sign * m, (e - MIN_EXP) as usize)
}

/// Knuth's two-sum: `a + b = s + err` exactly.
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// `a - b` together with a flag telling whether the rounded result is exact.
pub fn exact_difference(a: f64, b: f64) -> (f64, bool) {
    let (s, err) = two_sum(a, -b);
    (s, err == 0.0)
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.comp += e;
        self.abs += libm::fabs(x);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// A bound on the rounding error of `value()`.
    pub fn error_bound(&self, terms: usize) -> f64 {
        (terms as f64 + 2.0) * f64::EPSILON * f64::EPSILON * self.abs + f64::EPSILON * libm::fabs(self.value())
    }
}

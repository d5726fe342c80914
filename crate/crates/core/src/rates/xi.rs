use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::{RateFn, Role};
use crate::error::{invalid, Result};

/// Relative slack allowed when checking `1 ≤ ξ(n)·φ(n·ξ(n)) ≤ 2` in floating
/// point.
pub const SANDWICH_TOL: f64 = 1e-12;

/// Rounding slack in `m·φ(nm)/φ(1) ≥ 1`, so exact ties such as
/// `m = n` for `φ = n^{-1/2}` are not lost to the last bit.
const PREDICATE_SLACK: f64 = 8.0 * f64::EPSILON;

/// Largest integer multiplier searched exactly; beyond it `ξ` is located on
/// the real line in log space.
const EXACT_LIMIT: u64 = 1 << 52;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct XiEntry {
    pub n: u64,
    /// `ξ(n)` when it fits below `2^52`.
    pub xi: Option<u64>,
    pub ln_xi: f64,
    /// `ξ(n)·φ(n·ξ(n))` for the normalized `φ`.
    pub product: f64,
    pub in_sandwich: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct XiReport {
    /// `φ(1)` before normalization.
    pub normalization: f64,
    pub entries: Vec<XiEntry>,
    /// Smallest `n₀` in the range with the sandwich holding for every
    /// `n ≥ n₀` in the range, if any.
    pub threshold: Option<u64>,
    pub nondecreasing: bool,
}

/// `ξ(n) = min{m : m·φ(n·m) ≥ 1}` for `φ` normalized to `φ(1) = 1`.
///
/// The search assumes `θ(x) = x·φ(x)` is nondecreasing in the multiplier,
/// which holds for the closed-form families.
pub fn xi_stretch(phi: &RateFn, from: u64, to: u64) -> Result<XiReport> {
    if phi.role() != Role::Scale {
        return invalid("xi_stretch needs a scale function");
    }
    if from == 0 || from > to {
        return invalid("range must satisfy 1 ≤ from ≤ to");
    }
    let ln_c = phi.ln_eval(1);
    let normalization = libm::exp(ln_c);
    match phi.asymptote() {
        Some(a) => {
            let theta = a.mul(&super::PowerLog::power_log(1.0, -1.0, 0.0));
            if theta.limit() != super::Limit::Infinite {
                return invalid("n·φ(n) does not tend to infinity");
            }
        }
        None => {
            let h = phi.horizon();
            if libm::log(h as f64) + phi.ln_eval(h) - ln_c < libm::log(2.0) {
                return invalid("no evidence within the horizon that n·φ(n) grows without bound");
            }
        }
    }
    let g_real = |n: u64, ln_m: f64| -> Option<f64> {
        Some(ln_m + phi.ln_at_real(libm::log(n as f64) + ln_m)? - ln_c)
    };
    let holds_int = |n: u64, m: u64| -> Option<bool> {
        let nm = n.checked_mul(m)?;
        if nm > EXACT_LIMIT {
            return None;
        }
        Some(m as f64 * phi.eval(nm) / normalization >= 1.0 - PREDICATE_SLACK)
    };

    let mut entries = Vec::new();
    for n in from..=to {
        let mut found: Option<u64> = None;
        let mut hi: u64 = 1;
        let mut exact_ok = true;
        loop {
            match holds_int(n, hi) {
                Some(true) => {
                    found = Some(hi);
                    break;
                }
                Some(false) => {}
                None => {
                    exact_ok = false;
                    break;
                }
            }
            if hi >= EXACT_LIMIT {
                exact_ok = false;
                break;
            }
            hi *= 2;
        }
        let entry = if let Some(hi) = found {
            let mut lo = hi / 2;
            let mut hi = hi;
            // invariant: predicate false at lo (or lo = 0), true at hi
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if holds_int(n, mid) == Some(true) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let xi = hi;
            let product = xi as f64 * phi.eval(n * xi) / normalization;
            XiEntry { n, xi: Some(xi), ln_xi: libm::log(xi as f64), product, in_sandwich: sandwich(product) }
        } else {
            debug_assert!(!exact_ok);
            let mut lo = libm::log((hi / 2).max(1) as f64);
            let mut up = lo.max(1.0) * 2.0;
            let mut guard = 0;
            loop {
                match g_real(n, up) {
                    Some(v) if v >= 0.0 => break,
                    Some(_) => {
                        lo = up;
                        up *= 2.0;
                    }
                    None => return invalid("φ has no real-argument extension for large ξ"),
                }
                guard += 1;
                if guard > 60 || !up.is_finite() {
                    return invalid("ξ(n) search diverged");
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + up);
                if mid <= lo || mid >= up {
                    break;
                }
                if g_real(n, mid).unwrap() >= 0.0 {
                    up = mid;
                } else {
                    lo = mid;
                }
            }
            let product = libm::exp(g_real(n, up).unwrap());
            XiEntry { n, xi: None, ln_xi: up, product, in_sandwich: sandwich(product) }
        };
        entries.push(entry);
    }
    let mut threshold = None;
    for e in entries.iter().rev() {
        if e.in_sandwich {
            threshold = Some(e.n);
        } else {
            break;
        }
    }
    let nondecreasing = entries.windows(2).all(|w| w[1].ln_xi >= w[0].ln_xi);
    Ok(XiReport { normalization, entries, threshold, nondecreasing })
}

fn sandwich(p: f64) -> bool {
    p >= 1.0 - SANDWICH_TOL && p <= 2.0 + SANDWICH_TOL
}

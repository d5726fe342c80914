use alloc::format;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::{sigma, RateFn, Role};
use crate::error::{invalid, Error, Result};

/// Halvings of `α` tried per block before giving up.
const MAX_HALVINGS: u32 = 60;

/// One inductive block `N_{k-1}+1 ..= N_k` of the profile.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ProfileBlock {
    pub start: u64,
    pub end: u64,
    pub alpha: f64,
    /// `ln ∏_{i<k} φ^{-α_i}(N_i + 1)`
    pub ln_prefactor: f64,
    /// `∑_{n in block} κ(n)/(h(n)φ(n))`
    pub block_sum: f64,
    /// `h(N_k)`
    pub h_end: f64,
    /// `h(N_k)·φ(N_k)/φ(1)`
    pub h_phi_end: f64,
}

/// Piecewise profile `h(n) = P_k · φ̃(n)^{-α_k}` on block `k`, where
/// `φ̃ = Σ(κ)/Σ(κ)(1)` is normalized to `φ̃ ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SeparatingProfile {
    pub kappa: RateFn,
    pub phi: RateFn,
    pub blocks: Vec<ProfileBlock>,
    pub horizon: u64,
    /// `ln Σ(κ)(1)`
    pub ln_norm: f64,
}

impl SeparatingProfile {
    fn block_of(&self, n: u64) -> &ProfileBlock {
        let i = self.blocks.partition_point(|b| b.end < n);
        &self.blocks[i.min(self.blocks.len() - 1)]
    }

    /// `ln h(n)`; beyond the last block the last block's formula continues.
    pub fn ln_h(&self, n: u64) -> f64 {
        let b = self.block_of(n);
        b.ln_prefactor - b.alpha * (self.phi.ln_eval(n) - self.ln_norm)
    }

    pub fn h(&self, n: u64) -> f64 {
        libm::exp(self.ln_h(n))
    }

    /// `ln(h(n)·φ(n))` with the unnormalized `φ = Σ(κ)`.
    pub fn ln_h_phi(&self, n: u64) -> f64 {
        self.ln_h(n) + self.phi.ln_eval(n)
    }

    pub fn last_end(&self) -> u64 {
        self.blocks.last().map_or(0, |b| b.end)
    }
}

/// Realizes `blocks` inductive steps of the separating profile for `κ`.
pub fn separating_profile(kappa: &RateFn, blocks: usize) -> Result<SeparatingProfile> {
    if kappa.role() != Role::Weight {
        return invalid("separating_profile needs a weight function");
    }
    if kappa.asymptote().is_none() && kappa.certificate().closed_tail_sum.is_none() {
        return invalid("separating_profile needs a summability certificate");
    }
    let phi = sigma(kappa)?;
    let horizon = kappa.horizon();
    // The construction runs on κ̃ = κ/φ(1) and φ̃ = φ/φ(1) ≤ 1; the ratios
    // κ/(hφ) are unchanged by the normalization.
    let ln_norm = phi.ln_eval(1);
    let ln_phi = |n: u64| phi.ln_eval(n) - ln_norm;
    let ln_kappa = |n: u64| kappa.ln_eval(n) - ln_norm;

    let mut out = Vec::new();
    let mut prev_end: u64 = 0;
    let mut prev_alpha = 1.0f64;
    // P_1 = φ̃(1)^{-1} = 1
    let mut ln_p = -ln_phi(1);
    for k in 1..=blocks {
        let start = prev_end + 1;
        let mut alpha = prev_alpha / 2.0;
        let mut accepted: Option<(u64, f64)> = None;
        for _ in 0..MAX_HALVINGS {
            // (i): h·φ drops across the previous boundary.
            if k >= 2 {
                let lhs = (1.0 - prev_alpha) * (ln_phi(prev_end + 1) - ln_phi(prev_end)) - alpha * ln_phi(prev_end + 1);
                if !(lhs < 0.0) {
                    alpha /= 2.0;
                    continue;
                }
            }
            // (ii): block sum exceeds 1.
            let mut s = 0.0;
            let mut n = start;
            let mut reached = None;
            while n <= horizon {
                s += libm::exp(ln_kappa(n) - ln_p - (1.0 - alpha) * ln_phi(n));
                if s > 1.0 {
                    reached = Some(n);
                    break;
                }
                n += 1;
            }
            match reached {
                Some(n1) => {
                    accepted = Some((n1, alpha));
                    break;
                }
                None => alpha /= 2.0,
            }
        }
        let Some((n1, alpha)) = accepted else {
            return Err(Error::HorizonExhausted {
                horizon,
                achieved: out.len(),
                detail: format!("block {k}: condition (ii) unreachable"),
            });
        };
        // (iii), (iv) and φ(N_k + 1) ≤ 1, all monotone in N.
        let kf = k as f64;
        let ok = |n: u64| {
            ln_p + (1.0 - alpha) * ln_phi(n) <= -libm::log(kf)
                && ln_p - alpha * ln_phi(n) >= libm::log(kf)
                && ln_phi(n + 1) <= 0.0
        };
        let mut lo = n1;
        let end = if ok(n1) {
            n1
        } else {
            let mut step = 1u64;
            let mut hi = n1 + 1;
            while !ok(hi) {
                lo = hi;
                step *= 2;
                hi = n1 + step;
                if hi > horizon {
                    if ok(horizon) {
                        hi = horizon;
                        break;
                    }
                    return Err(Error::HorizonExhausted {
                        horizon,
                        achieved: out.len(),
                        detail: format!("block {k}: conditions (iii)/(iv) unreachable"),
                    });
                }
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        let mut block_sum = 0.0;
        for n in start..=end {
            block_sum += libm::exp(ln_kappa(n) - ln_p - (1.0 - alpha) * ln_phi(n));
        }
        out.push(ProfileBlock {
            start,
            end,
            alpha,
            ln_prefactor: ln_p,
            block_sum,
            h_end: libm::exp(ln_p - alpha * ln_phi(end)),
            h_phi_end: libm::exp(ln_p + (1.0 - alpha) * ln_phi(end)),
        });
        ln_p -= alpha * ln_phi(end + 1);
        prev_end = end;
        prev_alpha = alpha;
    }
    Ok(SeparatingProfile { kappa: kappa.clone(), phi, blocks: out, horizon, ln_norm })
}

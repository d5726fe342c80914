use alloc::boxed::Box;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::ops::{ConvergenceStatus, ConvergenceVerdict};
use crate::error::{invalid, Result};

/// A gauge `ψ: [0, ∞) → [0, ∞)`, nondecreasing with `ψ(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Gauge {
    /// `t^alpha`
    Power { alpha: f64 },
    /// `min(|ln t|^(-k), 1)`
    Log { k: f64 },
    /// `1/((ln 1/t)^s · (ln ln 1/t)^(s+eps))` on `(0, e^-2]`, constant above.
    DoubleLog { s: f64, eps: f64 },
    /// Piecewise linear through `(0,0)` and the given knots, constant after
    /// the last knot.
    Tabulated { t: Vec<f64>, values: Vec<f64> },
    /// `t^k · inner(t)`
    TimesPower { k: f64, inner: Box<Gauge> },
    /// `inner(t)^k`
    PowerOf { k: f64, inner: Box<Gauge> },
}

/// `ln ψ(e^{-u}) ≈ -(a·u + b·ln u + c·ln ln u)` as `u → ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogProfile {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

const DOUBLE_LOG_CUTOFF: f64 = 2.0;

impl Gauge {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return invalid("power gauge needs a positive exponent");
        }
        Ok(Gauge::Power { alpha })
    }

    pub fn log(k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return invalid("log gauge needs a positive exponent");
        }
        Ok(Gauge::Log { k })
    }

    pub fn double_log(s: f64, eps: f64) -> Result<Self> {
        if !(s > 0.0 && eps >= 0.0) {
            return invalid("double-log gauge needs s > 0 and eps ≥ 0");
        }
        Ok(Gauge::DoubleLog { s, eps })
    }

    pub fn tabulated(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != values.len() {
            return invalid("tabulated gauge needs matching nonempty knots and values");
        }
        let mut prev = (0.0, 0.0);
        for (x, v) in t.iter().zip(&values) {
            if !(*x > prev.0) || *v < prev.1 {
                return invalid("tabulated gauge must be increasing in t and nondecreasing in value");
            }
            prev = (*x, *v);
        }
        Ok(Gauge::Tabulated { t, values })
    }

    /// `ψ_k(t) = t^k ψ(t)`
    pub fn psi_k(&self, k: f64) -> Gauge {
        Gauge::TimesPower { k, inner: Box::new(self.clone()) }
    }

    /// `ψ_{k,d}(t) = t^{k-d} ψ(t)`
    pub fn psi_kd(&self, k: f64, d: f64) -> Gauge {
        Gauge::TimesPower { k: k - d, inner: Box::new(self.clone()) }
    }

    /// `(t ψ(t))^k`
    pub fn beurling_k(&self, k: f64) -> Gauge {
        Gauge::PowerOf { k, inner: Box::new(self.psi_k(1.0)) }
    }

    /// `t^{k-d} ψ(t)^k`
    pub fn beurling_kd(&self, k: f64, d: f64) -> Gauge {
        Gauge::TimesPower { k: k - d, inner: Box::new(Gauge::PowerOf { k, inner: Box::new(self.clone()) }) }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Gauge::Power { alpha } => libm::pow(t, *alpha),
            Gauge::Log { k } => {
                let l = libm::fabs(libm::log(t));
                if l <= 1.0 {
                    1.0
                } else {
                    libm::pow(l, -k)
                }
            }
            Gauge::Tabulated { t: knots, values } => {
                let i = knots.partition_point(|&x| x < t);
                if i >= knots.len() {
                    return values[values.len() - 1];
                }
                let (x0, v0) = if i == 0 { (0.0, 0.0) } else { (knots[i - 1], values[i - 1]) };
                v0 + (values[i] - v0) * (t - x0) / (knots[i] - x0)
            }
            _ => libm::exp(self.ln_at_neg_log(-libm::log(t))),
        }
    }

    /// `ln ψ(e^{-u})`, finite even where `ψ` underflows.
    pub fn ln_at_neg_log(&self, u: f64) -> f64 {
        match self {
            Gauge::Power { alpha } => -alpha * u,
            Gauge::Log { k } => {
                let l = libm::fabs(u);
                if l <= 1.0 {
                    0.0
                } else {
                    -k * libm::log(l)
                }
            }
            Gauge::DoubleLog { s, eps } => {
                let u = u.max(DOUBLE_LOG_CUTOFF);
                -(s * libm::log(u) + (s + eps) * libm::log(libm::log(u)))
            }
            Gauge::Tabulated { .. } => libm::log(self.eval(libm::exp(-u))),
            Gauge::TimesPower { k, inner } => -k * u + inner.ln_at_neg_log(u),
            Gauge::PowerOf { k, inner } => k * inner.ln_at_neg_log(u),
        }
    }

    pub fn log_profile(&self) -> Option<LogProfile> {
        match self {
            Gauge::Power { alpha } => Some(LogProfile { a: *alpha, b: 0.0, c: 0.0 }),
            Gauge::Log { k } => Some(LogProfile { a: 0.0, b: *k, c: 0.0 }),
            Gauge::DoubleLog { s, eps } => Some(LogProfile { a: 0.0, b: *s, c: s + eps }),
            Gauge::Tabulated { .. } => None,
            Gauge::TimesPower { k, inner } => {
                let p = inner.log_profile()?;
                Some(LogProfile { a: p.a + k, ..p })
            }
            Gauge::PowerOf { k, inner } => {
                let p = inner.log_profile()?;
                Some(LogProfile { a: p.a * k, b: p.b * k, c: p.c * k })
            }
        }
    }

    /// Spot checks on `[0, 1]`: `ψ(0) = 0`, monotone, no jumps above `tol`.
    pub fn check_on_grid(&self, points: usize, tol: f64) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return invalid("gauge must vanish at 0");
        }
        let mut prev = 0.0;
        for i in 1..=points {
            let t = i as f64 / points as f64;
            let v = self.eval(t);
            if v < prev - 1e-15 {
                return invalid(alloc::format!("gauge decreases near t={t}"));
            }
            if v - prev > tol {
                return invalid(alloc::format!("gauge jumps near t={t}"));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Nodes and weights of 8-point Gauss–Legendre on `[-1, 1]`.
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

fn gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    let h = (b - a) / pieces as f64;
    let mut s = 0.0;
    for p in 0..pieces {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in GL8 {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    s * 0.5 * h
}

/// Number of dyadic levels `u ∈ [2^j, 2^{j+1}]` integrated numerically.
pub const INTEGRABILITY_LEVELS: u32 = 60;

/// `∫_0^1 ψ(t)^{1/s}/t dt`, i.e. `∫_0^∞ ψ(e^{-u})^{1/s} du`.
///
/// The verdict comes from the gauge's log profile; the quadrature over
/// `u ≤ 2^INTEGRABILITY_LEVELS` is reported as the partial sum.
pub fn gauge_integrability(psi: &Gauge, s: f64) -> ConvergenceVerdict {
    let f = |u: f64| libm::exp(psi.ln_at_neg_log(u) / s);
    let mut total = gauss(&f, 0.0, 1.0, 16);
    for j in 0..INTEGRABILITY_LEVELS {
        let a = libm::scalbn(1.0, j as i32);
        total += gauss(&f, a, 2.0 * a, 8);
    }
    let decided = psi.log_profile().map(|p| {
        let (a, b, c) = (p.a / s, p.b / s, p.c / s);
        let eps = super::EXPONENT_EPS;
        if a > eps {
            true
        } else if a < -eps {
            false
        } else if (b - 1.0).abs() > eps {
            b > 1.0
        } else {
            c > 1.0 + eps
        }
    });
    let status = match decided {
        Some(true) => ConvergenceStatus::Converges,
        Some(false) => ConvergenceStatus::Diverges,
        None => ConvergenceStatus::InconclusiveAtHorizon,
    };
    ConvergenceVerdict {
        status,
        partial_sum: total,
        horizon: INTEGRABILITY_LEVELS as u64,
        certificate_used: decided.is_some(),
    }
}

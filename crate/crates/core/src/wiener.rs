//! Absolutely convergent coefficient expansions `f(t) = ∑ f̂_n e^{int}` with
//! vector coefficients, where the best approximation error by trigonometric
//! polynomials of degree `≤ i` is the coefficient tail `∑_{|n|>i} ‖f̂_n‖`.
//!
//! Coefficients are real vectors. [`evaluate`] returns the real and
//! imaginary parts `∑ f̂_n cos nt` and `∑ f̂_n sin nt` separately.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::error_seq::ErrorSeq;
use crate::exact::{Compensated, ExactSum};

/// Norm on the coefficient space `ℝ^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TargetNorm {
    #[default]
    L1,
    L2,
    Linf,
}

impl TargetNorm {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            TargetNorm::L1 => {
                let mut s = ExactSum::new();
                v.iter().for_each(|x| s.add(libm::fabs(*x)));
                s.to_f64()
            }
            TargetNorm::L2 => {
                let scale = v.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
                if scale == 0.0 {
                    return 0.0;
                }
                let mut s = Compensated::new();
                v.iter().for_each(|x| s.add((x / scale) * (x / scale)));
                scale * libm::sqrt(s.value())
            }
            TargetNorm::Linf => v.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x))),
        }
    }

    pub fn dual(self) -> TargetNorm {
        match self {
            TargetNorm::L1 => TargetNorm::Linf,
            TargetNorm::L2 => TargetNorm::L2,
            TargetNorm::Linf => TargetNorm::L1,
        }
    }

    fn add_norm(self, acc: &mut ExactSum, v: &[f64]) {
        match self {
            TargetNorm::L1 => v.iter().for_each(|x| acc.add(libm::fabs(*x))),
            _ => acc.add(self.norm(v)),
        }
    }
}

/// Closed-form coefficients for `|n| ≥ start`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum WienerTail {
    /// `f̂_n = (c_{n−1} − c_n)·direction` for `n ≥ from`, zero at negative
    /// frequencies; `c_0 := c_1`.
    Telescoping { from: u64, seq: ErrorSeq, direction: Vec<f64> },
    /// `f̂_n = first·ratio^(n−from)` for `n ≥ from`, mirrored to `−n` when
    /// two-sided.
    Geometric { from: u64, first: Vec<f64>, ratio: f64, two_sided: bool },
}

impl WienerTail {
    pub fn start(&self) -> u64 {
        match self {
            WienerTail::Telescoping { from, .. } | WienerTail::Geometric { from, .. } => *from,
        }
    }

    fn dim(&self) -> usize {
        match self {
            WienerTail::Telescoping { direction, .. } => direction.len(),
            WienerTail::Geometric { first, .. } => first.len(),
        }
    }

    fn coefficient(&self, n: i64) -> Option<Vec<f64>> {
        let a = n.unsigned_abs();
        if a < self.start() {
            return None;
        }
        match self {
            WienerTail::Telescoping { seq, direction, .. } => {
                if n < 0 {
                    return None;
                }
                let d = seq.get(a - 1) - seq.get(a);
                Some(direction.iter().map(|x| d * x).collect())
            }
            WienerTail::Geometric { from, first, ratio, two_sided } => {
                if n < 0 && !two_sided {
                    return None;
                }
                let r = libm::pow(*ratio, (a - from) as f64);
                Some(first.iter().map(|x| r * x).collect())
            }
        }
    }

    /// `∑_{|n| ≥ m}` of the tail's coefficient norms.
    fn sum_from(&self, m: u64, norm: TargetNorm) -> f64 {
        let k = m.max(self.start());
        match self {
            WienerTail::Telescoping { seq, direction, .. } => seq.get(k - 1) * norm.norm(direction),
            WienerTail::Geometric { from, first, ratio, two_sided } => {
                let sides = if *two_sided { 2.0 } else { 1.0 };
                sides * norm.norm(first) * libm::pow(*ratio, (k - from) as f64) / (1.0 - ratio)
            }
        }
    }

    /// The same coefficients restricted to `|n| ≥ m`.
    pub fn restricted_from(&self, m: u64) -> WienerTail {
        let k = m.max(self.start());
        match self {
            WienerTail::Telescoping { seq, direction, .. } => {
                WienerTail::Telescoping { from: k, seq: seq.clone(), direction: direction.clone() }
            }
            WienerTail::Geometric { from, first, ratio, two_sided } => {
                let r = libm::pow(*ratio, (k - from) as f64);
                WienerTail::Geometric {
                    from: k,
                    first: first.iter().map(|x| r * x).collect(),
                    ratio: *ratio,
                    two_sided: *two_sided,
                }
            }
        }
    }

    fn map_direction(&self, g: impl Fn(&[f64]) -> Vec<f64>) -> WienerTail {
        match self {
            WienerTail::Telescoping { from, seq, direction } => {
                WienerTail::Telescoping { from: *from, seq: seq.clone(), direction: g(direction) }
            }
            WienerTail::Geometric { from, first, ratio, two_sided } => {
                WienerTail::Geometric { from: *from, first: g(first), ratio: *ratio, two_sided: *two_sided }
            }
        }
    }
}

/// A Wiener-algebra element with coefficients in `(ℝ^d, norm)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct WienerElement {
    dim: usize,
    norm: TargetNorm,
    coefficients: BTreeMap<i64, Vec<f64>>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    tail: Option<WienerTail>,
}

impl WienerElement {
    pub fn zero(dim: usize, norm: TargetNorm) -> Self {
        WienerElement { dim: dim.max(1), norm, coefficients: BTreeMap::new(), tail: None }
    }

    /// Finitely supported element from `(frequency, vector)` pairs.
    pub fn from_coefficients(norm: TargetNorm, entries: impl IntoIterator<Item = (i64, Vec<f64>)>) -> Result<Self> {
        let mut it = entries.into_iter().peekable();
        let dim = it.peek().map_or(1, |(_, v)| v.len());
        let mut f = WienerElement::zero(dim, norm);
        for (n, v) in it {
            let mut acc = f.coefficients.get(&n).cloned().unwrap_or_else(|| alloc::vec![0.0; dim]);
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            acc.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
            f.set(n, acc)?;
        }
        Ok(f)
    }

    /// Sets `f̂_n`, replacing any previous value.
    pub fn set(&mut self, n: i64, v: Vec<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return invalid(format!("coefficient at frequency {n} is not finite"));
        }
        if let Some(t) = &self.tail {
            if n.unsigned_abs() >= t.start() {
                return invalid(format!("frequency {n} lies in the closed-form tail"));
            }
        }
        if v.iter().all(|x| *x == 0.0) {
            self.coefficients.remove(&n);
        } else {
            self.coefficients.insert(n, v);
        }
        Ok(())
    }

    pub fn set_tail(&mut self, tail: WienerTail) -> Result<()> {
        if tail.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: tail.dim() });
        }
        if tail.start() == 0 || tail.start() <= self.max_sparse_frequency() && !self.coefficients.is_empty() {
            return invalid("tail must start beyond the sparse support");
        }
        match &tail {
            WienerTail::Telescoping { seq, .. } if !seq.tends_to_zero() => return Err(Error::UncertifiedTail),
            WienerTail::Geometric { ratio, .. } if !(*ratio >= 0.0 && *ratio < 1.0) => {
                return Err(Error::UncertifiedTail)
            }
            _ => {}
        }
        self.tail = Some(tail);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> TargetNorm {
        self.norm
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, Vec<f64>> {
        &self.coefficients
    }

    pub fn tail(&self) -> Option<&WienerTail> {
        self.tail.as_ref()
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.tail.is_none()
    }

    /// Largest `|n|` among stored sparse coefficients.
    pub fn max_sparse_frequency(&self) -> u64 {
        let hi = self.coefficients.keys().next_back().map_or(0, |n| n.unsigned_abs());
        let lo = self.coefficients.keys().next().map_or(0, |n| n.unsigned_abs());
        hi.max(lo)
    }

    /// `f̂_n`, from the sparse table or the tail.
    pub fn coefficient(&self, n: i64) -> Vec<f64> {
        if let Some(v) = self.coefficients.get(&n) {
            return v.clone();
        }
        self.tail.as_ref().and_then(|t| t.coefficient(n)).unwrap_or_else(|| alloc::vec![0.0; self.dim])
    }

    pub(crate) fn add_norm_at(&self, acc: &mut ExactSum, n: i64) {
        if let Some(v) = self.coefficients.get(&n) {
            self.norm.add_norm(acc, v);
        } else if let Some(v) = self.tail.as_ref().and_then(|t| t.coefficient(n)) {
            self.norm.add_norm(acc, &v);
        }
    }

    /// `∑_{|n| ≥ m} ‖f̂_n‖`, summed exactly over the sparse part.
    pub fn tail_sum_from(&self, m: u64) -> Result<f64> {
        let mut acc = ExactSum::new();
        if m == 0 {
            self.coefficients.values().for_each(|v| self.norm.add_norm(&mut acc, v));
        } else {
            let m = m.min(i64::MAX as u64) as i64;
            for v in self.coefficients.range(m..).map(|(_, v)| v) {
                self.norm.add_norm(&mut acc, v);
            }
            for v in self.coefficients.range(..=-m).map(|(_, v)| v) {
                self.norm.add_norm(&mut acc, v);
            }
        }
        if let Some(t) = &self.tail {
            let s = t.sum_from(m.max(1), self.norm);
            if !s.is_finite() {
                return Err(Error::UncertifiedTail);
            }
            acc.add(s);
        }
        Ok(acc.to_f64())
    }

    /// `self + alpha·other`; at most one side may carry a tail.
    pub fn add_scaled(&self, other: &WienerElement, alpha: f64) -> Result<WienerElement> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if other.tail.is_some() {
            if self.tail.is_some() {
                return invalid("cannot add two elements that both carry tails");
            }
            if alpha != 1.0 {
                return invalid("scaled tails are not supported");
            }
            return other.add_scaled(self, 1.0);
        }
        let mut out = self.clone();
        let start = out.tail.as_ref().map_or(u64::MAX, WienerTail::start);
        for (n, v) in &other.coefficients {
            if n.unsigned_abs() >= start {
                return invalid("sparse frequency overlaps the tail");
            }
            let mut acc = out.coefficient(*n);
            acc.iter_mut().zip(v).for_each(|(a, b)| *a += alpha * b);
            out.set(*n, acc)?;
        }
        Ok(out)
    }
}

/// `‖f‖ = ∑_n ‖f̂_n‖`.
pub fn wiener_norm(f: &WienerElement) -> Result<f64> {
    f.tail_sum_from(0)
}

/// `E_i(f) = ∑_{|n|>i} ‖f̂_n‖`.
pub fn wiener_en(f: &WienerElement, i: u64) -> Result<f64> {
    f.tail_sum_from(i + 1)
}

/// Partial sum of the expansion at angle `t`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Evaluation {
    /// `∑_{|n| ≤ cutoff} f̂_n cos nt`
    pub re: Vec<f64>,
    /// `∑_{|n| ≤ cutoff} f̂_n sin nt`
    pub im: Vec<f64>,
    /// `E_cutoff(f)`, bounding every component of the omitted remainder.
    pub remainder_bound: f64,
}

pub fn evaluate(f: &WienerElement, t: f64, cutoff: u64) -> Result<Evaluation> {
    let d = f.dim;
    let mut re: Vec<Compensated> = (0..d).map(|_| Compensated::new()).collect();
    let mut im: Vec<Compensated> = (0..d).map(|_| Compensated::new()).collect();
    let mut add = |n: i64, v: &[f64]| {
        let (s, c) = (libm::sin(n as f64 * t), libm::cos(n as f64 * t));
        for k in 0..d {
            re[k].add(v[k] * c);
            im[k].add(v[k] * s);
        }
    };
    let lim = cutoff.min(i64::MAX as u64) as i64;
    for (n, v) in f.coefficients.range(-lim..=lim) {
        add(*n, v);
    }
    if let Some(tail) = &f.tail {
        let start = tail.start() as i64;
        for a in start..=lim {
            for n in [a, -a] {
                if let Some(v) = tail.coefficient(n) {
                    add(n, &v);
                }
            }
        }
    }
    Ok(Evaluation {
        re: re.iter().map(Compensated::value).collect(),
        im: im.iter().map(Compensated::value).collect(),
        remainder_bound: wiener_en(f, cutoff)?,
    })
}

/// Coefficientwise pairing `⟨b*, f̂_n⟩`, giving a scalar element.
pub fn apply_functional(f: &WienerElement, functional: &[f64]) -> Result<WienerElement> {
    if functional.len() != f.dim {
        return Err(Error::DimensionMismatch { expected: f.dim, found: functional.len() });
    }
    let pair = |v: &[f64]| -> Vec<f64> {
        let mut s = Compensated::new();
        v.iter().zip(functional).for_each(|(a, b)| s.add(a * b));
        alloc::vec![s.value()]
    };
    let mut out = WienerElement::zero(1, TargetNorm::L1);
    out.tail = f.tail.as_ref().map(|t| t.map_direction(pair));
    for (n, v) in &f.coefficients {
        let p = pair(v);
        if p[0] != 0.0 {
            out.coefficients.insert(*n, p);
        }
    }
    Ok(out)
}

/// `I_b(a) = a ⊗ b` for a scalar element `a`.
pub fn lift(a: &WienerElement, b: &[f64], norm: TargetNorm) -> Result<WienerElement> {
    if a.dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: a.dim });
    }
    if b.is_empty() {
        return invalid("lift needs a nonempty vector");
    }
    let times = |v: &[f64]| -> Vec<f64> { b.iter().map(|x| v[0] * x).collect() };
    let mut out = WienerElement::zero(b.len(), norm);
    out.tail = a.tail.as_ref().map(|t| t.map_direction(times));
    for (n, v) in &a.coefficients {
        out.coefficients.insert(*n, times(v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_sided_geometric() -> WienerElement {
        let mut f = WienerElement::from_coefficients(TargetNorm::L1, [(0, vec![1.0])]).unwrap();
        f.set_tail(WienerTail::Geometric { from: 1, first: vec![0.5], ratio: 0.5, two_sided: true }).unwrap();
        f
    }

    #[test]
    fn norms_and_tails() {
        let delta = WienerElement::from_coefficients(TargetNorm::Linf, [(0, vec![1.0, 0.0])]).unwrap();
        assert_eq!(wiener_norm(&delta).unwrap(), 1.0);
        assert_eq!(wiener_en(&delta, 0).unwrap(), 0.0);
        let g = two_sided_geometric();
        assert_eq!(wiener_norm(&g).unwrap(), 3.0);
        for i in 1..40 {
            assert_eq!(wiener_en(&g, i).unwrap(), libm::scalbn(1.0, 1 - i as i32));
        }
    }

    #[test]
    fn cosine_from_symmetric_pair() {
        let f = WienerElement::from_coefficients(TargetNorm::L1, [(1, vec![0.5]), (-1, vec![0.5])]).unwrap();
        let e = evaluate(&f, 0.0, 4).unwrap();
        assert_eq!(e.re[0], 1.0);
        let e = evaluate(&f, 1.0, 4).unwrap();
        assert!((e.re[0] - libm::cos(1.0)).abs() < 1e-15);
        assert!(e.im[0].abs() < 1e-15);
    }

    #[test]
    fn norms_of_vectors() {
        let v = [3.0, -4.0];
        assert_eq!(TargetNorm::L1.norm(&v), 7.0);
        assert_eq!(TargetNorm::L2.norm(&v), 5.0);
        assert_eq!(TargetNorm::Linf.norm(&v), 4.0);
        assert_eq!(TargetNorm::L1.dual(), TargetNorm::Linf);
    }

    #[test]
    fn functional_and_lift() {
        let f = WienerElement::from_coefficients(TargetNorm::L2, [(0, vec![1.0, 2.0]), (3, vec![-1.0, 0.5])]).unwrap();
        let first = apply_functional(&f, &[1.0, 0.0]).unwrap();
        assert_eq!(first.coefficient(3), vec![-1.0]);
        let zero = apply_functional(&f, &[0.0, 0.0]).unwrap();
        assert_eq!(wiener_norm(&zero).unwrap(), 0.0);
        assert!(apply_functional(&f, &[1.0]).is_err());

        let a = two_sided_geometric();
        let b = [0.6, 0.8];
        let lifted = lift(&a, &b, TargetNorm::L2).unwrap();
        let back = apply_functional(&lifted, &b).unwrap();
        for i in 0..20 {
            assert!((wiener_en(&back, i).unwrap() - wiener_en(&a, i).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_overlap_rejected() {
        let mut f = two_sided_geometric();
        assert!(f.set(2, vec![1.0]).is_err());
        assert!(f.set(0, vec![2.0]).is_ok());
    }
}

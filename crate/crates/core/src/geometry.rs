//! Covering numbers, box dimension and gauge sums for graphs of sampled
//! functions, the tube cover of an approximated graph, growth conditions on
//! Markov constants and level-set estimates.
//!
//! Every metric here is the max metric: graph points `(t, v)` are compared by
//! `max(|t − t'|, ‖v − v'‖_∞)`. Covers use closed balls centred at points of
//! the set. All Hausdorff-type sums are computed over explicit covers, so
//! they are upper estimates of the premeasure at the cover's scale.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::error_seq::{Decay, ErrorSeq};
use crate::minimax::{Approximation, MarkovProfile, SampledFn};
use crate::rates::{Gauge, Limit, LogProfile, PowerLog, RateFn, EXPONENT_EPS};

/// Relative slack for rounding in the sweep cover and the bound checks.
const ROUNDING: f64 = 1e-12;

/// Allowed excess of the coarea ratio over 1, from integrating over a finite
/// grid of levels.
pub const COAREA_TOLERANCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Metric {
    /// Points on the line with `|x − y|`.
    Scalar,
    /// Points in `ℝ^k`, `k ≥ 2`, with the max metric.
    Max,
}

/// A finite nonempty set of points.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PointCloud {
    dim: usize,
    /// Row-major coordinates.
    coords: Vec<f64>,
    metric: Metric,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, metric: Metric) -> Result<Self> {
        match metric {
            Metric::Scalar if dim != 1 => return invalid("scalar clouds have one coordinate"),
            Metric::Max if dim < 2 => return invalid("max-metric clouds need at least two coordinates"),
            _ => {}
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return invalid("coordinates must be finite");
        }
        Ok(PointCloud { dim, coords, metric })
    }

    pub fn scalar(points: Vec<f64>) -> Result<Self> {
        Self::new(1, points, Metric::Scalar)
    }

    /// The graph `{(t, f(t))}` over the sample grid.
    pub fn graph(f: &SampledFn) -> Self {
        let d = f.dim();
        let mut coords = Vec::with_capacity(f.grid().len() * (d + 1));
        for (i, &t) in f.grid().iter().enumerate() {
            coords.push(t);
            coords.extend_from_slice(&f.values()[i * d..(i + 1) * d]);
        }
        PointCloud { dim: d + 1, coords, metric: Metric::Max }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        max_dist(self.point(i), self.point(j))
    }

    /// Max-metric diameter of the points with the given indices.
    fn diameter(&self, idx: &[usize]) -> f64 {
        let mut d = 0.0f64;
        for k in 0..self.dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in idx {
                let x = self.coords[i * self.dim + k];
                lo = lo.min(x);
                hi = hi.max(x);
            }
            d = d.max(hi - lo);
        }
        d
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max(libm::fabs(x - y)))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CoverReport {
    pub scale: f64,
    /// Size of the farthest-point cover, an upper bound for `Cov`.
    pub greedy: usize,
    /// Size of a maximal set with pairwise distances above `2ε`, a lower
    /// bound for `Cov`.
    pub packing: usize,
    /// `Cov` itself, known for scalar clouds.
    pub exact: Option<usize>,
    /// Indices of the greedy centres.
    pub centers: Vec<usize>,
    /// Diameter of the points assigned to each centre.
    pub diameters: Vec<f64>,
    pub psi_sum: Option<f64>,
}

impl CoverReport {
    /// `∑ ψ(diam)` over the greedy cover.
    pub fn gauge_sum(&self, psi: &Gauge) -> f64 {
        self.diameters.iter().map(|&d| psi.eval(d)).sum()
    }

    pub fn with_gauge(mut self, psi: &Gauge) -> Self {
        self.psi_sum = Some(self.gauge_sum(psi));
        self
    }
}

/// Covering number of `cloud` by closed `ε`-balls centred in the cloud.
pub fn covering_number(cloud: &PointCloud, eps: f64) -> Result<CoverReport> {
    if !(eps > 0.0) {
        return invalid("scale must be positive");
    }
    let n = cloud.len();

    // farthest-point cover
    let mut near: Vec<f64> = (0..n).map(|i| cloud.dist(i, 0)).collect();
    let mut owner = vec![0usize; n];
    let mut centers = vec![0usize];
    loop {
        let (far, d) = near.iter().enumerate().fold((0, 0.0f64), |b, (i, &d)| if d > b.1 { (i, d) } else { b });
        if d <= eps {
            break;
        }
        let c = centers.len();
        centers.push(far);
        for i in 0..n {
            let d = cloud.dist(i, far);
            if d < near[i] {
                near[i] = d;
                owner[i] = c;
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
    for (i, &c) in owner.iter().enumerate() {
        members[c].push(i);
    }
    let diameters = members.iter().map(|m| cloud.diameter(m)).collect();

    // points pairwise more than 2ε apart lie in distinct balls
    let mut packed: Vec<usize> = Vec::new();
    for i in 0..n {
        if packed.iter().all(|&j| cloud.dist(i, j) > 2.0 * eps) {
            packed.push(i);
        }
    }

    let exact = match cloud.metric {
        Metric::Scalar => {
            let pts: Vec<(f64, f64)> = cloud.coords.iter().map(|&x| (x, x)).collect();
            Some(sweep_cover(pts, eps))
        }
        Metric::Max => None,
    };
    Ok(CoverReport {
        scale: eps,
        greedy: centers.len(),
        packing: packed.len(),
        exact,
        centers,
        diameters,
        psi_sum: None,
    })
}

/// `Cov` of a finite union of closed intervals.
pub fn interval_union_cover(intervals: &[(f64, f64)], eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return invalid("scale must be positive");
    }
    if intervals.is_empty() {
        return invalid("need at least one interval");
    }
    if intervals.iter().any(|&(a, b)| !(a <= b && a.is_finite() && b.is_finite())) {
        return invalid("intervals must be finite with a ≤ b");
    }
    Ok(sweep_cover(intervals.to_vec(), eps))
}

/// Left-to-right sweep: the leftmost uncovered point is covered by the
/// rightmost admissible centre. Optimal on the line.
fn sweep_cover(mut parts: Vec<(f64, f64)>, eps: f64) -> usize {
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
    for (a, b) in parts {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let scale = merged.iter().fold(eps, |m, &(a, b)| m.max(libm::fabs(a)).max(libm::fabs(b)));
    let tol = ROUNDING * scale;
    let mut count = 0;
    let mut covered = f64::NEG_INFINITY;
    let mut i = 0;
    loop {
        while i < merged.len() && merged[i].1 <= covered + tol {
            i += 1;
        }
        if i == merged.len() {
            return count;
        }
        let x = merged[i].0.max(covered);
        let reach = x + eps + tol;
        let j = merged.partition_point(|p| p.0 <= reach) - 1;
        let center = merged[j].1.min(x + eps);
        covered = center + eps;
        count += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct BoxCount {
    /// `ε = 2^-exponent`
    pub exponent: i32,
    pub scale: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct BoxDimensionReport {
    pub counts: Vec<BoxCount>,
    /// Least-squares slope of `ln N(ε)` against `−ln ε`.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Box counts of the graph of a scalar `f` at `ε = 2^-j` for each given `j`.
///
/// The graph between samples is the linear interpolant; in each column of
/// width `ε` it meets every box between its lowest and highest value.
pub fn box_dimension_profile(f: &SampledFn, exponents: &[i32]) -> Result<BoxDimensionReport> {
    if f.dim() != 1 {
        return invalid("box counting needs a scalar function");
    }
    let mut js = exponents.to_vec();
    js.sort_unstable();
    js.dedup();
    if js.len() < 4 || js[js.len() - 1] - js[0] < 3 {
        return invalid("need at least four scales spanning three octaves");
    }
    let grid = f.grid();
    let spacing = grid.windows(2).fold(0.0f64, |m, w| m.max(w[1] - w[0]));
    let finest = libm::scalbn(1.0, -js[js.len() - 1]);
    if finest < spacing {
        return Err(Error::ScaleOutOfResolution { scale: finest, spacing });
    }
    let counts: Vec<BoxCount> = js
        .iter()
        .map(|&j| {
            let eps = libm::scalbn(1.0, -j);
            BoxCount { exponent: j, scale: eps, count: graph_boxes(grid, f.values(), eps) }
        })
        .collect();
    let pts: Vec<(f64, f64)> = counts.iter().map(|c| (-libm::log(c.scale), libm::log(c.count as f64))).collect();
    let (slope, intercept, residual) = least_squares(&pts);
    Ok(BoxDimensionReport { counts, slope, intercept, residual })
}

fn graph_boxes(t: &[f64], v: &[f64], eps: f64) -> u64 {
    let origin = t[0];
    let column = |x: f64| libm::floor((x - origin) / eps);
    let boxes = |lo: f64, hi: f64| (libm::floor(hi / eps) - libm::floor(lo / eps)) as u64 + 1;
    let mut total = 0u64;
    let mut col = column(t[0]);
    let (mut lo, mut hi) = (v[0], v[0]);
    for i in 0..t.len() - 1 {
        let (t0, t1, v0, v1) = (t[i], t[i + 1], v[i], v[i + 1]);
        let end = column(t1);
        // split the segment at column edges
        while col < end {
            let edge = origin + (col + 1.0) * eps;
            let y = v0 + (v1 - v0) * (edge - t0) / (t1 - t0);
            lo = lo.min(y);
            hi = hi.max(y);
            total += boxes(lo, hi);
            col += 1.0;
            lo = y;
            hi = y;
        }
        lo = lo.min(v1);
        hi = hi.max(v1);
    }
    total + boxes(lo, hi)
}

/// Slope, intercept and RMS residual of the least-squares line.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0) * (p.1 - intercept - slope * p.0)).sum();
    (slope, intercept, libm::sqrt(ss / n))
}

/// One tube `W = {(t, b) : t ∈ B_γ(centre), ‖b − g(t)‖ ≤ γ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TubeCell {
    pub center: f64,
    /// Grid points covered by the ball.
    pub t_lo: f64,
    pub t_hi: f64,
    /// `max(t_hi − t_lo, osc g + 2γ)`
    pub diameter: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TubeCoverReport {
    pub markov: f64,
    pub gamma: f64,
    pub k: f64,
    /// Observed `max ‖f − g‖` on the grid.
    pub deviation: f64,
    /// Largest difference quotient of `g` between neighbouring grid points.
    pub lipschitz: f64,
    /// `C` with `Cov(S; ε) ≤ C·ε^{-k}` for `ε ≤ min(1, diam S)`.
    pub cov_constant: f64,
    pub cells: Vec<TubeCell>,
    /// Graph points found inside some cell.
    pub members: usize,
    pub points: usize,
    /// `∑ ψ_k(diam W)`
    pub psi_k_sum: f64,
    /// `(#cells)·ψ_k(2Mγ)`
    pub count_bound: f64,
    /// `C·(2M)^k·ψ(2Mγ)`
    pub bound: f64,
    pub diameters_ok: bool,
    pub sum_ok: bool,
}

impl TubeCoverReport {
    pub fn verified(&self) -> bool {
        self.members == self.points && self.diameters_ok && self.sum_ok
    }
}

/// Covers the graph of `f` by tubes around the approximant `g` over a
/// `γ`-cover of the sample grid and compares `∑ ψ_k(diam)` with
/// `C·(2M)^k·ψ(2Mγ)`.
///
/// The domain is an interval or arc, so `k ≥ 1` and `C = 3ℓ/2` for a grid of
/// length `ℓ` (a `γ`-cover needs at most `ℓ/(2γ) + 1` balls). `γ` must bound
/// the observed deviation and `M` the witnessed Lipschitz constant of `g`;
/// claims below the observed values are rejected.
pub fn thm215_cover(
    f: &SampledFn,
    approx: &Approximation,
    markov: f64,
    gamma: f64,
    psi: &Gauge,
    k: f64,
) -> Result<TubeCoverReport> {
    if !(k >= 1.0) {
        return invalid("a one-dimensional domain needs k ≥ 1");
    }
    let g = approx.sample(f)?;
    let (t, fv, gv, d) = (f.grid(), f.values(), g.values(), f.dim());
    let len = t[t.len() - 1] - t[0];
    if !(gamma >= 0.0 && gamma <= len.min(1.0)) {
        return invalid(format!("γ = {gamma} must lie in [0, min(1, {len})]"));
    }
    let row = |v: &[f64], i: usize| v[i * d..(i + 1) * d].to_vec();
    let deviation = (0..t.len()).fold(0.0f64, |m, i| m.max(max_dist(&row(fv, i), &row(gv, i))));
    if gamma < deviation {
        return invalid(format!("γ = {gamma} is below the observed deviation {deviation}"));
    }
    let lipschitz = (0..t.len() - 1)
        .fold(0.0f64, |m, i| m.max(max_dist(&row(gv, i + 1), &row(gv, i)) / (t[i + 1] - t[i])));
    if markov < lipschitz {
        return invalid(format!("M = {markov} is below the witnessed Lipschitz constant {lipschitz}"));
    }

    // sweep γ-balls along the grid; each ball takes a run of points
    let tol = ROUNDING * len.max(1.0);
    let mut cells = Vec::new();
    let mut members = 0;
    let mut i = 0;
    while i < t.len() {
        let reach = t[i] + gamma + tol;
        let c = t.partition_point(|&x| x <= reach) - 1;
        let stop = t.partition_point(|&x| x <= t[c] + gamma + tol);
        let (mut lo, mut hi) = (vec![f64::INFINITY; d], vec![f64::NEG_INFINITY; d]);
        for p in i..stop {
            for q in 0..d {
                lo[q] = lo[q].min(gv[p * d + q]);
                hi[q] = hi[q].max(gv[p * d + q]);
            }
            let inside = libm::fabs(t[p] - t[c]) <= gamma + tol && max_dist(&row(fv, p), &row(gv, p)) <= gamma;
            members += usize::from(inside);
        }
        let osc = lo.iter().zip(&hi).fold(0.0f64, |m, (a, b)| m.max(b - a));
        let spread = t[stop - 1] - t[i];
        let diameter = if gamma == 0.0 { 0.0 } else { spread.max(osc + 2.0 * gamma) };
        cells.push(TubeCell { center: t[c], t_lo: t[i], t_hi: t[stop - 1], diameter });
        i = stop;
    }

    let psi_k = psi.psi_k(k);
    let top = 2.0 * markov * gamma;
    let psi_k_sum: f64 = cells.iter().map(|c| psi_k.eval(c.diameter)).sum();
    let count_bound = cells.len() as f64 * psi_k.eval(top);
    let cov_constant = 1.5 * len;
    let bound = cov_constant * libm::pow(2.0 * markov, k) * psi.eval(top);
    let slack = 1.0 + ROUNDING;
    let diameters_ok = cells.iter().all(|c| c.diameter <= top * slack);
    let sum_ok = psi_k_sum <= bound * slack;
    Ok(TubeCoverReport {
        markov,
        gamma,
        k,
        deviation,
        lipschitz,
        cov_constant,
        cells,
        members,
        points: t.len(),
        psi_k_sum,
        count_bound,
        bound,
        diameters_ok,
        sum_ok,
    })
}

/// Markov constants `M_n`, either tabulated from `n = 1` or by an
/// asymptotic form.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "value", rename_all = "lowercase"))]
pub enum MarkovGrowth {
    Tabulated(Vec<f64>),
    Asymptotic(PowerLog),
}

impl From<&MarkovProfile> for MarkovGrowth {
    fn from(p: &MarkovProfile) -> Self {
        MarkovGrowth::Tabulated(p.values.iter().map(|b| b.upper).collect())
    }
}

impl MarkovGrowth {
    /// `M_n` for `n = first..=last`.
    fn range(&self, n_max: u64) -> (u64, Vec<f64>) {
        match self {
            MarkovGrowth::Tabulated(v) => (1, v.iter().take(n_max as usize).copied().collect()),
            MarkovGrowth::Asymptotic(p) => {
                // ln 1 = 0 would make a log factor degenerate
                let first = if p.log_power == 0.0 { 1 } else { 2 };
                (first, (first..=n_max).map(|n| p.at(n as f64)).collect())
            }
        }
    }

    fn asymptote(&self) -> Option<PowerLog> {
        match self {
            MarkovGrowth::Asymptotic(p) => Some(*p),
            MarkovGrowth::Tabulated(_) => None,
        }
    }
}

/// Asymptote of `ln M_n` from that of `M_n`.
fn ln_asymptote(m: &PowerLog) -> Option<PowerLog> {
    if m.ratio != 1.0 {
        return Some(PowerLog::power_log(libm::log(m.ratio), -1.0, 0.0));
    }
    if m.power.abs() > EXPONENT_EPS {
        return Some(PowerLog::power_log(-m.power, 0.0, -1.0));
    }
    if m.log_power.abs() > EXPONENT_EPS {
        return None;
    }
    Some(PowerLog::power_log(libm::log(m.coef), 0.0, 0.0))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GrowthCheck {
    pub values: Vec<f64>,
    /// `None` when the data cannot decide.
    pub holds: Option<bool>,
    /// True when the verdict comes from asymptotic forms, not from the data.
    pub certified: bool,
    /// The limit, or the supremum of a bounded sequence, when known.
    pub limit: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ConditionReport {
    /// Indices of the value columns.
    pub n: Vec<u64>,
    /// `φ(n)·M_n` bounded.
    pub phi_markov: GrowthCheck,
    /// `φ(n)·ln M_n → 0`.
    pub phi_log_markov: GrowthCheck,
    /// `M_n / n^s` bounded.
    pub markov_power: GrowthCheck,
}

/// Log-log slope over the second half of the positive values.
fn tail_slope(n: &[u64], v: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = n
        .iter()
        .zip(v)
        .skip(n.len() / 2)
        .filter(|(_, &y)| y > 0.0)
        .map(|(&x, &y)| (libm::log(x as f64), libm::log(y)))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    Some(least_squares(&pts).0)
}

/// Slope threshold for the data-based verdicts.
const TREND_SLOPE: f64 = 0.05;

fn bounded_check(n: &[u64], values: Vec<f64>, asymptote: Option<PowerLog>) -> GrowthCheck {
    let sup = values.iter().fold(0.0f64, |m, v| m.max(*v));
    match asymptote.map(|a| a.limit()) {
        Some(Limit::Infinite) => GrowthCheck { values, holds: Some(false), certified: true, limit: None },
        Some(Limit::Zero) | Some(Limit::Positive(_)) => {
            GrowthCheck { values, holds: Some(true), certified: true, limit: Some(sup) }
        }
        None => {
            let holds = tail_slope(n, &values).map(|s| s <= TREND_SLOPE);
            let limit = if holds == Some(true) { Some(sup) } else { None };
            GrowthCheck { values, holds, certified: false, limit }
        }
    }
}

/// Growth conditions on the Markov constants relative to `φ`: `φ·M`
/// bounded, `φ·ln M → 0` and `M/n^s` bounded, for `n ≤ n_max`.
///
/// Verdicts are certified when both `φ` and `M` have asymptotic forms;
/// otherwise they come from the log-log slope of the second half of the data.
pub fn condition_checks(phi: &RateFn, markov: &MarkovGrowth, s: f64, n_max: u64) -> Result<ConditionReport> {
    if n_max < 2 {
        return invalid("need at least two indices");
    }
    let (first, m) = markov.range(n_max);
    let n: Vec<u64> = (first..first + m.len() as u64).collect();
    if n.is_empty() {
        return invalid("no Markov constants in range");
    }
    let phi_n: Vec<f64> = n.iter().map(|&i| phi.eval(i)).collect();
    let phi_m: Vec<f64> = phi_n.iter().zip(&m).map(|(p, m)| p * m).collect();
    let phi_ln: Vec<f64> = phi_n.iter().zip(&m).map(|(p, m)| p * libm::log(*m)).collect();
    let m_s: Vec<f64> = n.iter().zip(&m).map(|(&i, m)| m / libm::pow(i as f64, s)).collect();

    let phi_a = phi.asymptote();
    let m_a = markov.asymptote();
    let both = |f: &dyn Fn(PowerLog, PowerLog) -> Option<PowerLog>| match (phi_a, m_a) {
        (Some(p), Some(m)) => f(p, m),
        _ => None,
    };

    let phi_markov = bounded_check(&n, phi_m, both(&|p, m| Some(p.mul(&m))));
    let markov_power = bounded_check(&n, m_s, m_a.map(|m| m.mul(&PowerLog::power_log(1.0, s, 0.0))));

    let phi_log_markov = match both(&|p, m| ln_asymptote(&m).map(|l| p.mul(&l))) {
        Some(a) => {
            let holds = matches!(a.limit(), Limit::Zero) || a.coef == 0.0;
            let limit = if holds { Some(0.0) } else { None };
            GrowthCheck { values: phi_ln, holds: Some(holds), certified: true, limit }
        }
        None => {
            let abs: Vec<f64> = phi_ln.iter().map(|v| libm::fabs(*v)).collect();
            let holds = if abs.iter().all(|v| *v == 0.0) {
                Some(true)
            } else {
                tail_slope(&n, &abs).map(|s| s < -TREND_SLOPE)
            };
            GrowthCheck { values: phi_ln, holds, certified: false, limit: None }
        }
    };
    Ok(ConditionReport { n, phi_markov, phi_log_markov, markov_power })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GaugeLimitReport {
    pub rho: f64,
    pub n: Vec<u64>,
    /// `M_n^k·ψ(M_n·ρ^{1/φ(n)})`
    pub values: Vec<f64>,
}

impl GaugeLimitReport {
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// `M_n^k·ψ(M_n·ρ^{1/φ(n)})` for `n ≤ n_max`, computed in log space.
pub fn gauge_limit_profile(
    markov: &MarkovGrowth,
    phi: &RateFn,
    psi: &Gauge,
    k: f64,
    rho: f64,
    n_max: u64,
) -> Result<GaugeLimitReport> {
    if !(rho > 0.0 && rho < 1.0) {
        return invalid("ρ must lie in (0, 1)");
    }
    let (first, m) = markov.range(n_max);
    let n: Vec<u64> = (first..first + m.len() as u64).collect();
    let ln_rho = -libm::log(rho);
    let values = n
        .iter()
        .zip(&m)
        .map(|(&i, &m)| {
            let ln_m = libm::log(m);
            let u = ln_rho * libm::exp(-phi.ln_eval(i)) - ln_m;
            libm::exp(k * ln_m + psi.ln_at_neg_log(u))
        })
        .collect();
    Ok(GaugeLimitReport { rho, n, values })
}

/// `b_n = coef·n^exponent`; every such sequence has `∑ ln b_n / n² < ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Lemma51Config {
    pub s: f64,
    pub b_coef: f64,
    pub b_exponent: f64,
    pub n_max: u64,
}

impl Lemma51Config {
    /// `b_n = 4n^s`.
    pub fn new(s: f64) -> Self {
        Lemma51Config { s, b_coef: 4.0, b_exponent: s, n_max: 10_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Lemma51Verdict {
    Zero { certified: bool },
    /// The liminf is positive; `+∞` when the sequence diverges.
    Positive { liminf: f64 },
    /// Neither form is available; the running minimum is the best estimate.
    Empirical { min: f64 },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Lemma51Report {
    /// `n^s·ψ(b_n·E_n)` for `n = 1..=n_max`.
    pub values: Vec<f64>,
    pub running_min: Vec<f64>,
    pub verdict: Lemma51Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Trend {
    Zero,
    Bounded,
    Infinite,
}

/// Sign of the first coefficient that is not zero decides `∑ c_i·L_i`
/// for scales `L_1 ≫ L_2 ≫ …` tending to `+∞`.
fn sign_chain(coefs: &[f64]) -> Trend {
    for &c in coefs {
        if c < -EXPONENT_EPS {
            return Trend::Zero;
        }
        if c > EXPONENT_EPS {
            return Trend::Infinite;
        }
    }
    Trend::Bounded
}

/// Limit of `n^s·ψ(b_n·E_n)` with `−ln E_n ~ κ·n^α·(ln n)^β`,
/// `b_n ~ n^q` and `ln ψ(e^{-u}) ~ −(a·u + b·ln u + c·ln ln u)`.
fn lemma51_trend(lambda: &PowerLog, p: &LogProfile, s: f64, q: f64) -> Option<Trend> {
    if lambda.ratio != 1.0 || !(lambda.coef > 0.0) {
        return None;
    }
    let (alpha, beta, kappa) = (-lambda.power, -lambda.log_power, lambda.coef);
    let eps = EXPONENT_EPS;
    if alpha > eps {
        // u ~ λ dominates ln n
        if p.a > eps {
            return Some(Trend::Zero);
        }
        return Some(sign_chain(&[s - p.b * alpha, -p.b * beta - p.c]));
    }
    if alpha.abs() <= eps && beta > 1.0 + eps {
        if p.a > eps {
            return Some(Trend::Zero);
        }
        return Some(sign_chain(&[s, -p.b * beta, -p.c]));
    }
    if alpha.abs() <= eps && (beta - 1.0).abs() <= eps {
        let r = kappa - q;
        if r > eps {
            return Some(sign_chain(&[s - p.a * r, -p.b, -p.c]));
        }
        // b_n·E_n stays away from 0, so ψ(b_n·E_n) does too
        return Some(if s > eps { Trend::Infinite } else { Trend::Bounded });
    }
    None
}

/// `n^s·ψ(b_n·E_n)` and its running minimum.
///
/// The verdict is certified from the decay form of `E` and the log profile
/// of `ψ` when both exist, and is `Zero` outright once `E` vanishes.
pub fn lemma51_check(e: &ErrorSeq, psi: &Gauge, config: &Lemma51Config) -> Result<Lemma51Report> {
    if !(config.b_coef > 0.0) || config.n_max == 0 {
        return invalid("need b_coef > 0 and n_max ≥ 1");
    }
    let ln_b = |n: f64| libm::log(config.b_coef) + config.b_exponent * libm::log(n);
    let mut values = Vec::with_capacity(config.n_max as usize);
    let mut running_min = Vec::with_capacity(config.n_max as usize);
    let mut min = f64::INFINITY;
    for n in 1..=config.n_max {
        let x = n as f64;
        let lambda = e.neg_ln(n);
        let v = if lambda == f64::INFINITY {
            0.0
        } else {
            libm::exp(config.s * libm::log(x) + psi.ln_at_neg_log(lambda - ln_b(x)))
        };
        min = min.min(v);
        values.push(v);
        running_min.push(min);
    }
    let last = values[values.len() - 1];
    let trend = match e.decay() {
        Decay::Vanishing => Some(Trend::Zero),
        Decay::Exact(lambda) => psi.log_profile().and_then(|p| lemma51_trend(&lambda, &p, config.s, config.b_exponent)),
        _ => None,
    };
    let verdict = match trend {
        Some(Trend::Zero) => Lemma51Verdict::Zero { certified: true },
        Some(Trend::Bounded) => Lemma51Verdict::Positive { liminf: last },
        Some(Trend::Infinite) => Lemma51Verdict::Positive { liminf: f64::INFINITY },
        None if min == 0.0 => Lemma51Verdict::Zero { certified: false },
        None => Lemma51Verdict::Empirical { min },
    };
    Ok(Lemma51Report { values, running_min, verdict })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LevelSetEstimate {
    pub level: f64,
    /// Grid intervals meeting the level, merged where they touch.
    pub components: Vec<(f64, f64)>,
    /// Number of crossing grid intervals.
    pub crossings: usize,
    /// `∑ ψ_{k,d}(h)` over the crossing intervals.
    pub psi_sum: f64,
    /// Largest crossing interval.
    pub delta: f64,
}

/// `f^{-1}(c)` for a scalar `f`, covered by the grid intervals `[t_i, t_{i+1}]`
/// with `c ∈ [min, max)` of the two samples.
///
/// A run of samples equal to `c` is a flat level and is reported as
/// [`Error::DegenerateLevel`] instead of being summed.
pub fn level_set_measure(f: &SampledFn, c: f64, psi: &Gauge, k: f64, d: f64) -> Result<LevelSetEstimate> {
    if f.dim() != 1 {
        return invalid("level sets need a scalar function");
    }
    let (t, v) = (f.grid(), f.values());
    let g = psi.psi_kd(k, d);
    let mut components: Vec<(f64, f64)> = Vec::new();
    let mut crossings = 0;
    let mut psi_sum = 0.0;
    let mut delta = 0.0f64;
    for i in 0..t.len() - 1 {
        let (a, b) = (v[i] - c, v[i + 1] - c);
        if a == 0.0 && b == 0.0 {
            let mut j = i + 1;
            while j + 1 < t.len() && v[j + 1] == c {
                j += 1;
            }
            return Err(Error::DegenerateLevel { level: c, run_start: t[i], run_end: t[j] });
        }
        // half-open in value, so a level through a sample is counted once
        if !(a.min(b) <= 0.0 && 0.0 < a.max(b)) {
            continue;
        }
        let h = t[i + 1] - t[i];
        crossings += 1;
        psi_sum += g.eval(h);
        delta = delta.max(h);
        match components.last_mut() {
            Some(last) if last.1 == t[i] => last.1 = t[i + 1],
            _ => components.push((t[i], t[i + 1])),
        }
    }
    Ok(LevelSetEstimate { level: c, components, crossings, psi_sum, delta })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CoareaReport {
    /// `(c, ψ_{k,1}-sum of f^{-1}(c))` at the level midpoints.
    pub levels: Vec<(f64, f64)>,
    /// Levels skipped as flat.
    pub degenerate: Vec<f64>,
    /// Midpoint rule for `∫ ψ-sum(f^{-1}(c)) dc`.
    pub integral: f64,
    /// Largest difference quotient of `f` on the grid.
    pub lipschitz: f64,
    /// Lipschitz constant of the projection `(t, f(t)) ↦ f(t)` on the graph,
    /// `min(1, lipschitz)` in the max metric.
    pub projection_lipschitz: f64,
    /// `∑ σ(diam)` over the graph pieces between samples, `σ = ψ_k`.
    pub graph_sum: f64,
    /// `c(1)·Lip·graph_sum` with `c(1) = 1`.
    pub envelope: f64,
    pub ratio: f64,
    pub tolerance: f64,
}

impl CoareaReport {
    pub fn within_envelope(&self) -> bool {
        self.ratio <= 1.0 + self.tolerance
    }
}

/// Compares `∫ H^{ψ_{k,1}}(f^{-1}(c)) dc` with `Lip·H^{ψ_k}(graph f)`, both
/// estimated on the sample grid, over `levels` equal cells of the range.
pub fn coarea_check(f: &SampledFn, psi: &Gauge, k: f64, levels: usize) -> Result<CoareaReport> {
    if f.dim() != 1 {
        return invalid("coarea check needs a scalar function");
    }
    if levels == 0 {
        return invalid("need at least one level");
    }
    let (t, v) = (f.grid(), f.values());
    let lo = v.iter().fold(f64::INFINITY, |m, x| m.min(*x));
    let hi = v.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x));
    if !(hi > lo) {
        return invalid("function is constant");
    }
    let dc = (hi - lo) / levels as f64;
    let mut sums = Vec::with_capacity(levels);
    let mut degenerate = Vec::new();
    let mut integral = 0.0;
    for j in 0..levels {
        let c = lo + (j as f64 + 0.5) * dc;
        match level_set_measure(f, c, psi, k, 1.0) {
            Ok(est) => {
                integral += est.psi_sum * dc;
                sums.push((c, est.psi_sum));
            }
            Err(Error::DegenerateLevel { .. }) => degenerate.push(c),
            Err(e) => return Err(e),
        }
    }
    let sigma = psi.psi_k(k);
    let mut lipschitz = 0.0f64;
    let mut graph_sum = 0.0;
    for i in 0..t.len() - 1 {
        let (h, dv) = (t[i + 1] - t[i], libm::fabs(v[i + 1] - v[i]));
        lipschitz = lipschitz.max(dv / h);
        graph_sum += sigma.eval(h.max(dv));
    }
    let projection_lipschitz = lipschitz.min(1.0);
    let envelope = projection_lipschitz * graph_sum;
    Ok(CoareaReport {
        levels: sums,
        degenerate,
        integral,
        lipschitz,
        projection_lipschitz,
        graph_sum,
        envelope,
        ratio: integral / envelope,
        tolerance: COAREA_TOLERANCE,
    })
}

/// A short text summary, used by the report writers.
pub fn describe_cover(r: &CoverReport) -> String {
    match r.exact {
        Some(e) => format!("ε={} Cov={} (greedy {}, packing {})", r.scale, e, r.greedy, r.packing),
        None => format!("ε={} {} ≤ Cov ≤ {}", r.scale, r.packing, r.greedy),
    }
}

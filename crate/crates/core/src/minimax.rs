//! Discrete uniform approximation: best approximation on a grid, `E_n`
//! profiles, Markov constants and the nowhere-differentiable example.
//!
//! All norms are maxima over the stored grid. Use [`grid_doubling_check`]
//! to see how much a result moves when the grid is refined.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::error_seq::{ErrorSeq, Provenance};
use crate::linalg::solve;
use crate::lp::{minimize, LpOutcome};

/// Errors below `ZERO_SNAP · ε · max|f|` are reported as exact zeros.
pub const ZERO_SNAP: f64 = 64.0;
/// Relative tolerance for the exchange stopping rule.
const EXCHANGE_TOL: f64 = 1e-13;
const EXCHANGE_ITERATIONS: usize = 100;
const NOISE_FLOOR: f64 = 1e-12;
/// Accepted gap between the error and the levelled error when the exchange cycles.
const CYCLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum Domain {
    Interval { a: f64, b: f64 },
    /// `[0, 2π)` with wraparound.
    Circle,
}

impl Domain {
    fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::Interval { a, b } => a <= x && x <= b,
            Domain::Circle => (0.0..2.0 * PI).contains(&x),
        }
    }
}

/// A function sampled on a grid, with values in `ℝ^d`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SampledFn {
    domain: Domain,
    grid: Vec<f64>,
    dim: usize,
    /// Row-major: point `i`, coordinate `k` at `i·dim + k`.
    values: Vec<f64>,
    pub name: String,
    pub generator: Option<String>,
}

impl SampledFn {
    pub fn new(domain: Domain, grid: Vec<f64>, dim: usize, values: Vec<f64>, name: impl Into<String>) -> Result<Self> {
        if let Domain::Interval { a, b } = domain {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return invalid("interval needs finite a < b");
            }
        }
        if grid.len() < 2 {
            return invalid("need at least two sample points");
        }
        if dim == 0 || values.len() != grid.len() * dim {
            return Err(Error::DimensionMismatch { expected: grid.len() * dim.max(1), found: values.len() });
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return invalid("grid must be strictly increasing");
        }
        if let Some(x) = grid.iter().find(|x| !domain.contains(**x)) {
            return invalid(format!("grid point {x} lies outside the domain"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("values must be finite");
        }
        Ok(SampledFn { domain, grid, dim, values, name: name.into(), generator: None })
    }

    pub fn scalar(domain: Domain, grid: Vec<f64>, values: Vec<f64>, name: impl Into<String>) -> Result<Self> {
        Self::new(domain, grid, 1, values, name)
    }

    pub fn from_fn(domain: Domain, grid: Vec<f64>, name: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        let mut s = Self::scalar(domain, grid, values, name)?;
        s.generator = Some(s.name.clone());
        Ok(s)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coordinate(&self, k: usize) -> Vec<f64> {
        self.values.iter().skip(k).step_by(self.dim).copied().collect()
    }
}

/// Chebyshev–Lobatto points `(a+b)/2 − (b−a)/2·cos(kπ/m)`, `k = 0..=m`.
pub fn chebyshev_lobatto(m: usize, a: f64, b: f64) -> Vec<f64> {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut g: Vec<f64> = (0..=m).map(|k| mid - half * libm::cos(k as f64 * PI / m as f64)).collect();
    g[0] = a;
    g[m] = b;
    g
}

/// `m + 1` equally spaced points from `a` to `b`.
pub fn uniform_grid(m: usize, a: f64, b: f64) -> Vec<f64> {
    (0..=m).map(|k| if k == m { b } else { a + (b - a) * k as f64 / m as f64 }).collect()
}

/// `m` equally spaced points on `[0, 2π)`.
pub fn circle_grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect()
}

/// `T_m` by the three-term recurrence.
pub fn chebyshev_t(m: usize, u: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, u);
    if m == 0 {
        return t0;
    }
    for _ in 1..m {
        let t2 = 2.0 * u * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Basis {
    /// Algebraic polynomials of degree `≤ n`, in Chebyshev form on the interval.
    Chebyshev,
    /// Trigonometric polynomials `1, cos kt, sin kt` for `k ≤ n`.
    Trig,
}

impl Basis {
    pub fn size(self, n: usize) -> usize {
        match self {
            Basis::Chebyshev => n + 1,
            Basis::Trig => 2 * n + 1,
        }
    }

    fn check(self, domain: Domain) -> Result<()> {
        match (self, domain) {
            (Basis::Chebyshev, Domain::Interval { .. }) | (Basis::Trig, Domain::Circle) => Ok(()),
            _ => invalid("Chebyshev needs an interval and Trig the circle"),
        }
    }

    /// Basis values at `x`, written into `out` (length `size(n)`).
    fn eval_into(self, domain: Domain, n: usize, x: f64, out: &mut [f64]) {
        match (self, domain) {
            (Basis::Chebyshev, Domain::Interval { a, b }) => {
                let u = (2.0 * x - a - b) / (b - a);
                out[0] = 1.0;
                if n >= 1 {
                    out[1] = u;
                }
                for j in 2..=n {
                    out[j] = 2.0 * u * out[j - 1] - out[j - 2];
                }
            }
            _ => {
                out[0] = 1.0;
                for k in 1..=n {
                    let (s, c) = libm::sincos(k as f64 * x);
                    out[2 * k - 1] = c;
                    out[2 * k] = s;
                }
            }
        }
    }

    /// Derivatives of the basis functions at `x`.
    fn derivative_into(self, domain: Domain, n: usize, x: f64, out: &mut [f64]) {
        match (self, domain) {
            (Basis::Chebyshev, Domain::Interval { a, b }) => {
                // T_j' = j·U_{j−1}
                let u = (2.0 * x - a - b) / (b - a);
                let du = 2.0 / (b - a);
                out[0] = 0.0;
                let (mut u0, mut u1) = (0.0, 1.0);
                for j in 1..=n {
                    out[j] = j as f64 * u1 * du;
                    let u2 = 2.0 * u * u1 - u0;
                    u0 = u1;
                    u1 = u2;
                }
            }
            _ => {
                out[0] = 0.0;
                for k in 1..=n {
                    let (s, c) = libm::sincos(k as f64 * x);
                    out[2 * k - 1] = -(k as f64) * s;
                    out[2 * k] = k as f64 * c;
                }
            }
        }
    }

    fn matrix(self, domain: Domain, n: usize, grid: &[f64]) -> Vec<f64> {
        let w = self.size(n);
        let mut m = vec![0.0; grid.len() * w];
        for (i, &x) in grid.iter().enumerate() {
            self.eval_into(domain, n, x, &mut m[i * w..(i + 1) * w]);
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Method {
    Exchange,
    LinearProgram,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CoordinateFit {
    pub coefficients: Vec<f64>,
    /// Achieved discrete sup-norm deviation.
    pub error: f64,
    pub method: Method,
    /// Reference points `(x, residual)` of an exchange solution.
    pub reference: Vec<(f64, f64)>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Approximation {
    pub degree: usize,
    pub basis: Basis,
    /// Maximum over coordinates.
    pub error: f64,
    pub coordinates: Vec<CoordinateFit>,
    pub warnings: Vec<String>,
}

impl Approximation {
    /// Points where the scalar residual alternates in sign with magnitude
    /// within `tol` of the error; `None` for vector-valued or LP fits.
    pub fn equioscillation(&self, tol: f64) -> Option<usize> {
        let [c] = self.coordinates.as_slice() else { return None };
        if c.method != Method::Exchange {
            return None;
        }
        let mut count = 0;
        let mut last = 0.0f64;
        for &(_, r) in &c.reference {
            if libm::fabs(r) >= c.error - tol && r * last <= 0.0 {
                count += 1;
                last = r;
            }
        }
        Some(count)
    }

    /// The approximant evaluated on the grid of `f`.
    pub fn sample(&self, f: &SampledFn) -> Result<SampledFn> {
        self.basis.check(f.domain)?;
        if self.coordinates.len() != f.dim {
            return Err(Error::DimensionMismatch { expected: f.dim, found: self.coordinates.len() });
        }
        let w = self.basis.size(self.degree);
        let phi = self.basis.matrix(f.domain, self.degree, &f.grid);
        let mut values = vec![0.0; f.values.len()];
        for (k, c) in self.coordinates.iter().enumerate() {
            for i in 0..f.grid.len() {
                values[i * f.dim + k] = phi[i * w..i * w + c.coefficients.len()].iter().zip(&c.coefficients).map(|(a, b)| a * b).sum();
            }
        }
        let mut g = SampledFn::new(f.domain, f.grid.clone(), f.dim, values, format!("{} degree {}", f.name, self.degree))?;
        g.generator = Some(format!("best approximation of {}", f.name));
        Ok(g)
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)))
}

fn residual(phi: &[f64], w: usize, f: &[f64], c: &[f64]) -> Vec<f64> {
    f.iter()
        .enumerate()
        .map(|(i, fi)| fi - phi[i * w..i * w + c.len()].iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
        .collect()
}

/// Discrete Remez exchange for a Haar system. `phi` holds `w` columns per
/// row; the first `k` are used.
fn exchange(phi: &[f64], w: usize, k: usize, grid: &[f64], f: &[f64], periodic: bool) -> Option<(Vec<f64>, Vec<usize>)> {
    exchange_run(phi, w, k, grid, f, periodic, false, EXCHANGE_ITERATIONS)
        .or_else(|| exchange_run(phi, w, k, grid, f, periodic, true, 20 * k + 200))
}

/// One exchange run. Multi-point steps converge fast but can pick badly
/// conditioned references on noisy data; single-point steps raise the
/// levelled error monotonically.
fn exchange_run(
    phi: &[f64],
    w: usize,
    k: usize,
    grid: &[f64],
    f: &[f64],
    periodic: bool,
    single_only: bool,
    iterations: usize,
) -> Option<(Vec<f64>, Vec<usize>)> {
    let m = f.len();
    let scale = sup_norm(f).max(f64::MIN_POSITIVE);
    // Initial reference near the extrema of T_{k+1}, in x, with the last
    // one dropped (a symmetric start levels even data at h = 0); equally
    // spaced on the circle.
    let (x0, x1) = (grid[0], grid[m - 1]);
    let mut reference: Vec<usize> = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let t = i as f64 / (k + 1) as f64;
        let x = if periodic { x0 + (x1 - x0) * t } else { x0 + (x1 - x0) * (0.5 - 0.5 * libm::cos(t * PI)) };
        let j = grid.partition_point(|g| *g < x).min(m - 1);
        let j = if j > 0 && x - grid[j - 1] < grid[j] - x { j - 1 } else { j };
        let lo = reference.last().map_or(0, |r| r + 1);
        reference.push(j.max(lo));
    }
    if reference[k] >= m {
        reference = (0..=k).map(|i| i * (m - 1) / k).collect();
    }
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut best = None;
    for _ in 0..iterations {
        let mut a = vec![0.0; (k + 1) * (k + 1)];
        let mut rhs = vec![0.0; k + 1];
        for (r, &i) in reference.iter().enumerate() {
            a[r * (k + 1)..r * (k + 1) + k].copy_from_slice(&phi[i * w..i * w + k]);
            a[r * (k + 1) + k] = if r % 2 == 0 { 1.0 } else { -1.0 };
            rhs[r] = f[i];
        }
        let sol = solve(a, rhs, k + 1)?;
        let (c, h) = (&sol[..k], libm::fabs(sol[k]));
        let e = residual(phi, w, f, c);
        let emax = sup_norm(&e);
        // Converged, or the residual is rounding noise.
        if emax - h <= EXCHANGE_TOL * scale || emax <= NOISE_FLOOR * scale {
            return Some((c.to_vec(), reference));
        }
        let gmax = (0..m).fold(0, |b, i| if libm::fabs(e[i]) > libm::fabs(e[b]) { i } else { b });
        let mp = if single_only { None } else { multi_point(&e, k, h, gmax) };
        let next = match mp {
            Some(next) => next,
            None => single_point(&reference, &e, sol[k], gmax)?,
        };
        if next == reference {
            return Some((c.to_vec(), reference));
        }
        if best.as_ref().map_or(true, |b: &(f64, Vec<f64>, Vec<usize>)| emax - h < b.0) {
            best = Some((emax - h, c.to_vec(), reference.clone()));
        }
        if seen.contains(&next) {
            // Cycling among references that level equally up to rounding.
            break;
        }
        seen.push(core::mem::replace(&mut reference, next));
    }
    best.filter(|b| b.0 <= CYCLE_TOL * scale).map(|b| (b.1, b.2))
}

/// Among points with `|e| ≥ h`, the extremum of each sign run, trimmed to
/// `k + 1` alternating points that keep the global maximum.
fn multi_point(e: &[f64], k: usize, h: f64, gmax: usize) -> Option<Vec<usize>> {
    let floor = h * (1.0 - 1e-9);
    let mut extrema: Vec<usize> = Vec::new();
    for (i, &v) in e.iter().enumerate() {
        if v == 0.0 || libm::fabs(v) < floor {
            continue;
        }
        match extrema.last() {
            Some(&j) if (e[j] > 0.0) == (v > 0.0) => {
                if libm::fabs(v) > libm::fabs(e[j]) {
                    *extrema.last_mut().unwrap() = i;
                }
            }
            _ => extrema.push(i),
        }
    }
    if extrema.len() < k + 1 {
        return None;
    }
    let mag = |i: usize| libm::fabs(e[i]);
    while extrema.len() > k + 1 {
        let last = extrema.len() - 1;
        if extrema.len() == k + 2 {
            // One too many: drop the smaller end.
            if extrema[0] != gmax && (extrema[last] == gmax || mag(extrema[0]) <= mag(extrema[last])) {
                extrema.remove(0);
            } else {
                extrema.pop();
            }
            continue;
        }
        // Drop the adjacent pair with the smallest larger residual.
        let mut drop = 0;
        let mut worst = f64::INFINITY;
        for j in 0..last {
            let (p, q) = (extrema[j], extrema[j + 1]);
            if p == gmax || q == gmax {
                continue;
            }
            let v = mag(p).max(mag(q));
            if v < worst {
                worst = v;
                drop = j;
            }
        }
        extrema.drain(drop..drop + 2);
    }
    Some(extrema)
}

/// Classic one-point exchange bringing `gmax` into the reference while
/// keeping the sign pattern alternating.
fn single_point(reference: &[usize], e: &[f64], h_signed: f64, gmax: usize) -> Option<Vec<usize>> {
    if reference.contains(&gmax) {
        return None;
    }
    let k1 = reference.len();
    let lead = if h_signed < 0.0 { -1.0 } else { 1.0 };
    let sign_at = |r: usize| if r % 2 == 0 { lead } else { -lead };
    let s = if e[gmax] > 0.0 { 1.0 } else { -1.0 };
    let mut next = reference.to_vec();
    let p = reference.partition_point(|&r| r < gmax);
    if p == 0 {
        if sign_at(0) == s {
            next[0] = gmax;
        } else {
            next.pop();
            next.insert(0, gmax);
        }
    } else if p == k1 {
        if sign_at(k1 - 1) == s {
            next[k1 - 1] = gmax;
        } else {
            next.remove(0);
            next.push(gmax);
        }
    } else if sign_at(p - 1) == s {
        next[p - 1] = gmax;
    } else {
        next[p] = gmax;
    }
    Some(next)
}

/// Discrete minimax by the dual linear program
/// `max ∑ w_i f_i` subject to `∑ w_i φ_j(x_i) = 0`, `∑ |w_i| ≤ 1`,
/// whose multipliers are the best coefficients and minus the error.
fn lp_fit(phi: &[f64], w: usize, k: usize, f: &[f64]) -> Result<Vec<f64>> {
    let m = f.len();
    let (rows, cols) = (k + 1, 2 * m + 1);
    let mut a = vec![0.0; rows * cols];
    let mut c = vec![0.0; cols];
    for i in 0..m {
        for j in 0..k {
            a[j * cols + i] = phi[i * w + j];
            a[j * cols + m + i] = -phi[i * w + j];
        }
        a[k * cols + i] = 1.0;
        a[k * cols + m + i] = 1.0;
        c[i] = -f[i];
        c[m + i] = f[i];
    }
    a[k * cols + 2 * m] = 1.0;
    let mut b = vec![0.0; rows];
    b[k] = 1.0;
    match minimize(&a, &b, &c, rows, cols) {
        LpOutcome::Optimal(sol) => Ok(sol.duals[..k].iter().map(|y| -y).collect()),
        other => Err(Error::IllConditioned(format!("minimax linear program: {other:?}"))),
    }
}

fn fit_coordinate(phi: &[f64], w: usize, k: usize, grid: &[f64], f: &[f64], periodic: bool) -> Result<CoordinateFit> {
    let scale = sup_norm(f);
    let finish = |coefficients: Vec<f64>, method, reference: Vec<usize>, note| {
        let e = residual(phi, w, f, &coefficients);
        let mut error = sup_norm(&e);
        if error <= ZERO_SNAP * f64::EPSILON * scale {
            error = 0.0;
        }
        let reference = reference.iter().map(|&i| (grid[i], e[i])).collect();
        CoordinateFit { coefficients, error, method, reference, note }
    };
    if let Some((c, r)) = exchange(phi, w, k, grid, f, periodic) {
        return Ok(finish(c, Method::Exchange, r, None));
    }
    let c = lp_fit(phi, w, k, f)?;
    Ok(finish(c, Method::LinearProgram, Vec::new(), Some("exchange did not converge".into())))
}

/// Best uniform approximation of degree `n` on the grid of `f`.
///
/// Both bases are Haar systems on the grid, so each coordinate is fitted by
/// the exchange algorithm, falling back to the linear program. For
/// `d > 1` each coordinate is fitted separately and the error is the maximum.
pub fn best_uniform_approx(f: &SampledFn, n: usize, basis: Basis) -> Result<Approximation> {
    basis.check(f.domain)?;
    let k = basis.size(n);
    let phi = basis.matrix(f.domain, n, &f.grid);
    fit_all(f, &phi, k, k, n, basis)
}

fn fit_all(f: &SampledFn, phi: &[f64], w: usize, k: usize, n: usize, basis: Basis) -> Result<Approximation> {
    let mut warnings = Vec::new();
    if f.grid.len() < 4 * k {
        warnings.push(format!("{} grid points for {k} basis functions; at least {} recommended", f.grid.len(), 4 * k));
    }
    if f.grid.len() <= k {
        return invalid("grid has no more points than basis functions");
    }
    let mut coordinates = Vec::with_capacity(f.dim);
    for d in 0..f.dim {
        let v = f.coordinate(d);
        coordinates.push(fit_coordinate(phi, w, k, &f.grid, &v, basis == Basis::Trig)?);
    }
    let error = coordinates.iter().fold(0.0f64, |m, c| m.max(c.error));
    Ok(Approximation { degree: n, basis, error, coordinates, warnings })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EnProfile {
    /// `E_1, …, E_{n_max}`.
    pub errors: ErrorSeq,
    /// `E_0`, the distance to constants.
    pub e0: f64,
    pub note: String,
}

/// `E_n(f)` for `n = 0..=n_max`, made nonincreasing.
pub fn en_profile(f: &SampledFn, n_max: usize, basis: Basis) -> Result<EnProfile> {
    basis.check(f.domain)?;
    if n_max == 0 {
        return invalid("n_max must be at least 1");
    }
    let w = basis.size(n_max);
    let phi = basis.matrix(f.domain, n_max, &f.grid);
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = f64::INFINITY;
    for n in 0..=n_max {
        let e = fit_all(f, &phi, w, basis.size(n), n, basis)?.error.min(prev);
        out.push(e);
        prev = e;
    }
    let e0 = out.remove(0);
    let errors = ErrorSeq::from_values(out, None, Provenance::Computed)?;
    let note = format!(
        "discrete sup norm over {} grid points; errors below {ZERO_SNAP}·ε·max|f| reported as 0",
        f.grid.len()
    );
    Ok(EnProfile { errors, e0, note })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DoublingReport {
    pub coarse: f64,
    pub fine: f64,
    pub change: f64,
}

/// Best-approximation error on `points` and `2·points` grids.
pub fn grid_doubling_check(
    domain: Domain,
    points: usize,
    n: usize,
    basis: Basis,
    f: impl Fn(f64) -> f64,
) -> Result<DoublingReport> {
    let grid = |m: usize| match domain {
        Domain::Interval { a, b } => chebyshev_lobatto(m, a, b),
        Domain::Circle => circle_grid(m),
    };
    let coarse = best_uniform_approx(&SampledFn::from_fn(domain, grid(points), "coarse", &f)?, n, basis)?.error;
    let fine = best_uniform_approx(&SampledFn::from_fn(domain, grid(2 * points), "fine", &f)?, n, basis)?.error;
    Ok(DoublingReport { coarse, fine, change: fine - coarse })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Subset {
    Full,
    /// `[s, t]` inside `[−1, 1]`, or an arc `[s, t] ⊆ [0, 2π]`.
    Interval(f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum MarkovMethod {
    Exact,
    LpEstimate,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MarkovBracket {
    pub n: usize,
    /// Derivative of a polynomial of sup norm at most 1.
    pub lower: f64,
    /// Linear-program value over the grid unit ball.
    pub upper: f64,
    /// Coefficients of the lower-bound witness in the basis.
    pub witness: Vec<f64>,
    pub method: MarkovMethod,
}

impl MarkovBracket {
    pub fn gap(&self) -> f64 {
        (self.upper - self.lower) / self.lower
    }
}

/// Markov constant of degree-`n` polynomials on `[−1, 1]` (Chebyshev) or
/// trigonometric polynomials on the circle (Trig), restricted to `s`.
///
/// The full circle is exact: `n`, attained by `cos nt`. Otherwise the upper
/// value maximizes the derivative at each point of the `s`-grid (including
/// its endpoints) over polynomials bounded by 1 on a grid of `16n` points;
/// the lower value comes from `T_n` or `cos nt` and, for Chebyshev, from the
/// LP maximizer rescaled by a certified bound on its sup norm.
pub fn markov_constant(basis: Basis, n: usize, s: Subset) -> Result<MarkovBracket> {
    if n == 0 {
        return invalid("degree must be at least 1");
    }
    let k = basis.size(n);
    let (domain, grid, full) = match basis {
        Basis::Chebyshev => (Domain::Interval { a: -1.0, b: 1.0 }, chebyshev_lobatto(16 * n, -1.0, 1.0), (-1.0, 1.0)),
        Basis::Trig => (Domain::Circle, circle_grid(16 * n), (0.0, 2.0 * PI)),
    };
    let (s0, s1) = match s {
        Subset::Full => full,
        Subset::Interval(a, b) => (a, b),
    };
    if !(full.0 <= s0 && s0 < s1 && s1 <= full.1) {
        return invalid("subset must be a nondegenerate interval inside the domain");
    }
    let mut witness = vec![0.0; k];
    let top = if basis == Basis::Chebyshev { n } else { 2 * n - 1 };
    witness[top] = 1.0;
    if basis == Basis::Trig && s == Subset::Full {
        return Ok(MarkovBracket { n, lower: n as f64, upper: n as f64, witness, method: MarkovMethod::Exact });
    }
    let mut points: Vec<f64> = grid.iter().copied().filter(|x| s0 <= *x && *x <= s1).collect();
    points.push(s0);
    points.push(s1);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let phi = basis.matrix(domain, n, &grid);
    let m = grid.len();
    let (rows, cols) = (k, 2 * m);
    let mut a = vec![0.0; rows * cols];
    for i in 0..m {
        for j in 0..k {
            a[j * cols + i] = phi[i * k + j];
            a[j * cols + m + i] = -phi[i * k + j];
        }
    }
    let c = vec![1.0; cols];
    let mut d = vec![0.0; k];
    let mut upper = 0.0f64;
    let mut lower = 0.0f64;
    for &x in &points {
        basis.derivative_into(domain, n, x, &mut d);
        let t_n = libm::fabs(d[top]);
        if t_n > lower {
            lower = t_n;
        }
        match minimize(&a, &d, &c, rows, cols) {
            LpOutcome::Optimal(sol) => {
                upper = upper.max(sol.value);
                if basis == Basis::Chebyshev {
                    let cert = certified_derivative(n, &sol.duals, &d);
                    if cert > lower {
                        lower = cert;
                        witness.clone_from(&sol.duals);
                    }
                }
            }
            other => return Err(Error::IllConditioned(format!("Markov linear program at x={x}: {other:?}"))),
        }
    }
    Ok(MarkovBracket { n, lower, upper: upper.max(lower), witness, method: MarkovMethod::LpEstimate })
}

/// `|p'(x)| / ‖p‖` with `‖p‖ ≤ ‖p‖_grid / cos(nπ/2m)` on a Lobatto grid.
fn certified_derivative(n: usize, coef: &[f64], d: &[f64]) -> f64 {
    let m = 64 * n;
    let grid = chebyshev_lobatto(m, -1.0, 1.0);
    let mut v = vec![0.0; n + 1];
    let mut sup = 0.0f64;
    for x in grid {
        Basis::Chebyshev.eval_into(Domain::Interval { a: -1.0, b: 1.0 }, n, x, &mut v);
        sup = sup.max(libm::fabs(v.iter().zip(coef).map(|(a, b)| a * b).sum::<f64>()));
    }
    let deriv = libm::fabs(d.iter().zip(coef).map(|(a, b)| a * b).sum::<f64>());
    deriv * libm::cos(n as f64 * PI / (2 * m) as f64) / sup
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MarkovProfile {
    pub basis: Basis,
    pub subset: Subset,
    /// Brackets for `n = 1..=n_max`, made nondecreasing.
    pub values: Vec<MarkovBracket>,
    /// `upper_n / n`, an empirical constant for `M_n ≤ c·n`.
    pub c_empirical: Vec<f64>,
}

pub fn markov_profile(basis: Basis, n_max: usize, s: Subset) -> Result<MarkovProfile> {
    let mut values: Vec<MarkovBracket> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut b = markov_constant(basis, n, s)?;
        if let Some(prev) = values.last() {
            b.lower = b.lower.max(prev.lower);
            b.upper = b.upper.max(prev.upper);
        }
        values.push(b);
    }
    let c_empirical = values.iter().map(|b| b.upper / b.n as f64).collect();
    Ok(MarkovProfile { basis, subset: s, values, c_empirical })
}

/// `F(0) = 1`, `F(k+1) = 2^{F(k)}`; `None` once it leaves `u64`.
pub fn tower(k: u32) -> Option<u64> {
    let mut f = 1u64;
    for _ in 0..k {
        f = 1u64.checked_shl(u32::try_from(f).ok()?)?;
    }
    Some(f)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NondiffValue {
    pub value: f64,
    /// `log₂` of a bound on `∑_{k > budget} 1/F(k)`.
    pub remainder_log2: f64,
}

/// `∑_{k=1}^{budget} cos(F(k)·arccos x)/F(k)`.
///
/// Each `F(k)` is a power of two, so `T_{F(k)}` is evaluated by repeated
/// doubling `T_{2j} = 2T_j² − 1`. Terms past `k = 4` are below `2^-65536`
/// and contribute nothing in double precision.
pub fn bernstein_nondiff(x: f64, budget: u32) -> Result<NondiffValue> {
    if budget == 0 {
        return invalid("term budget must be at least 1");
    }
    if !(-1.0..=1.0).contains(&x) {
        return invalid("x must lie in [-1, 1]");
    }
    let mut value = 0.0;
    let mut t = x;
    let mut doublings = 0u64;
    for k in 1..=budget.min(4) {
        let f = tower(k).unwrap();
        let target = f.trailing_zeros() as u64;
        while doublings < target {
            t = 2.0 * t * t - 1.0;
            doublings += 1;
        }
        value += t / f as f64;
    }
    // ∑_{k > b} 1/F(k) ≤ 2/F(b + 1), and log₂ F(b + 1) = F(b).
    let remainder_log2 = match budget {
        1..=4 => 1.0 - tower(budget).unwrap() as f64,
        _ => f64::NEG_INFINITY,
    };
    Ok(NondiffValue { value, remainder_log2 })
}

/// `bernstein_nondiff` on `points + 1` uniform samples of `[−1, 1]`.
pub fn bernstein_nondiff_sampled(points: usize, budget: u32) -> Result<SampledFn> {
    let grid = uniform_grid(points, -1.0, 1.0);
    let values = grid.iter().map(|&x| bernstein_nondiff(x, budget).map(|v| v.value)).collect::<Result<Vec<_>>>()?;
    let mut f = SampledFn::scalar(Domain::Interval { a: -1.0, b: 1.0 }, grid, values, "bernstein_nondiff")?;
    f.generator = Some(format!("bernstein_nondiff(budget={budget})"));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> Domain {
        Domain::Interval { a: -1.0, b: 1.0 }
    }

    fn sampled(points: usize, f: impl Fn(f64) -> f64) -> SampledFn {
        SampledFn::from_fn(interval(), chebyshev_lobatto(points, -1.0, 1.0), "f", f).unwrap()
    }

    #[test]
    fn square_by_lines() {
        let f = sampled(200, |x| x * x);
        let a = best_uniform_approx(&f, 1, Basis::Chebyshev).unwrap();
        assert!((a.error - 0.5).abs() < 1e-14);
        assert_eq!(a.coordinates[0].method, Method::Exchange);
        // x² − (1/2 + 0·x) = T₂/2
        let c = &a.coordinates[0].coefficients;
        assert!((c[0] - 0.5).abs() < 1e-14 && c[1].abs() < 1e-14);
        assert!(a.equioscillation(1e-9).unwrap() >= 3);
    }

    #[test]
    fn t3_by_quadratics() {
        // 99 is a multiple of 3, so the extrema cos(jπ/3) are grid points.
        let f = sampled(99, |x| chebyshev_t(3, x));
        let a = best_uniform_approx(&f, 2, Basis::Chebyshev).unwrap();
        assert!((a.error - 1.0).abs() < 1e-13);
        assert!(a.coordinates[0].coefficients.iter().all(|c| c.abs() < 1e-13));
        assert!(a.equioscillation(1e-9).unwrap() >= 4);
    }

    #[test]
    fn constant_has_zero_error() {
        let f = sampled(50, |_| 3.0);
        for n in 0..5 {
            assert_eq!(best_uniform_approx(&f, n, Basis::Chebyshev).unwrap().error, 0.0);
        }
        let p = en_profile(&f, 5, Basis::Chebyshev).unwrap();
        assert!(p.errors.values(5).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lp_agrees_with_exchange() {
        let f = sampled(120, libm::exp);
        let g = Basis::Chebyshev.matrix(f.domain, 3, &f.grid);
        let c = lp_fit(&g, 4, 4, &f.values).unwrap();
        let lp = sup_norm(&residual(&g, 4, &f.values, &c));
        let ex = best_uniform_approx(&f, 3, Basis::Chebyshev).unwrap().error;
        assert!((lp - ex).abs() < 1e-9 * ex, "{lp} {ex}");
    }

    #[test]
    fn t5_profile_vanishes() {
        let f = sampled(200, |x| chebyshev_t(5, x));
        let p = en_profile(&f, 8, Basis::Chebyshev).unwrap();
        let v = p.errors.values(p.errors.prefix_len() as u64);
        assert_eq!(p.e0, 1.0);
        for (i, e) in v.iter().enumerate() {
            let n = i + 1;
            if n < 5 {
                assert!((e - 1.0).abs() < 1e-12);
            } else {
                assert_eq!(*e, 0.0);
            }
        }
    }

    #[test]
    fn vector_valued_takes_max() {
        let grid = chebyshev_lobatto(102, -1.0, 1.0);
        let values = grid.iter().flat_map(|&x| [x * x, chebyshev_t(3, x)]).collect();
        let f = SampledFn::new(interval(), grid, 2, values, "pair").unwrap();
        let a = best_uniform_approx(&f, 1, Basis::Chebyshev).unwrap();
        assert!((a.coordinates[0].error - 0.5).abs() < 1e-13);
        assert!((a.error - 1.0).abs() < 1e-13);
    }

    #[test]
    fn trig_fit() {
        let f = SampledFn::from_fn(Domain::Circle, circle_grid(48), "cos3", |t| libm::cos(3.0 * t) + 0.25 * libm::sin(t)).unwrap();
        let a = best_uniform_approx(&f, 2, Basis::Trig).unwrap();
        assert!((a.error - 1.0).abs() < 1e-9);
        let a = best_uniform_approx(&f, 3, Basis::Trig).unwrap();
        assert_eq!(a.error, 0.0);
    }

    #[test]
    fn abs_value_bernstein_constant() {
        let f = sampled(4000, libm::fabs);
        let p = en_profile(&f, 64, Basis::Chebyshev).unwrap();
        let v = p.errors.values(p.errors.prefix_len() as u64);
        // 0.2801694990... is the limit of n·E_n(|x|)
        let e64 = v[63] * 64.0;
        assert!((e64 - 0.2802).abs() < 0.005, "{e64}");
        // odd degrees do not help an even function
        assert!((v[2] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn markov_small_cases() {
        let b = markov_constant(Basis::Trig, 7, Subset::Full).unwrap();
        assert_eq!((b.lower, b.upper, b.method), (7.0, 7.0, MarkovMethod::Exact));
        let b = markov_constant(Basis::Chebyshev, 1, Subset::Full).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && b.upper >= 1.0 && b.gap() < 0.02);
        for n in [3usize, 6] {
            let b = markov_constant(Basis::Chebyshev, n, Subset::Full).unwrap();
            let nn = (n * n) as f64;
            assert!(b.lower <= nn * (1.0 + 1e-12) && nn <= b.upper * (1.0 + 1e-12));
            assert!(b.upper <= nn / libm::cos(n as f64 * PI / (32 * n) as f64) + 1e-9);
        }
    }

    #[test]
    fn markov_on_subsets() {
        let inner = markov_constant(Basis::Chebyshev, 4, Subset::Interval(-0.5, 0.5)).unwrap();
        let full = markov_constant(Basis::Chebyshev, 4, Subset::Full).unwrap();
        assert!(inner.lower <= inner.upper && inner.upper < full.upper);
        // Bernstein: |p'(x)| ≤ n/√(1−x²)
        assert!(inner.upper <= 4.0 / libm::sqrt(0.75) * 1.01);
        let arc = markov_constant(Basis::Trig, 3, Subset::Interval(0.0, 1.0)).unwrap();
        // the grid unit ball is larger than the true one by at most 1/cos(nπ/m)
        assert!(arc.lower <= arc.upper && arc.upper <= 3.0 / libm::cos(PI / 16.0));
    }

    #[test]
    fn nondiff_values() {
        assert_eq!([tower(1), tower(2), tower(3), tower(4)], [Some(2), Some(4), Some(16), Some(65536)]);
        assert_eq!(tower(5), None);
        let v = bernstein_nondiff(1.0, 4).unwrap();
        assert_eq!(v.value, 0.8125152587890625);
        assert_eq!(bernstein_nondiff(-1.0, 4).unwrap().value, v.value);
        assert_eq!(bernstein_nondiff(0.3, 10).unwrap().value, bernstein_nondiff(0.3, 4).unwrap().value);
        for b in 1..4 {
            let lo = bernstein_nondiff(0.3, b).unwrap();
            let hi = bernstein_nondiff(0.3, 4).unwrap();
            assert!((hi.value - lo.value).abs() <= libm::exp2(lo.remainder_log2));
        }
        // doubling matches the trigonometric form where it is well conditioned
        let x: f64 = 0.3;
        let direct: f64 = [2.0f64, 4.0, 16.0].iter().map(|f| libm::cos(f * libm::acos(x)) / f).sum();
        assert!((bernstein_nondiff(x, 3).unwrap().value - direct).abs() < 1e-13);
        assert!(bernstein_nondiff(0.0, 0).is_err());
    }

    #[test]
    fn doubling_check_is_small_for_smooth_f() {
        let r = grid_doubling_check(interval(), 64, 4, Basis::Chebyshev, libm::exp).unwrap();
        // the continuous maximum sits between grid points, O((nπ/m)²) relative
        assert!(r.change.abs() < 5e-3 * r.fine);
    }
}

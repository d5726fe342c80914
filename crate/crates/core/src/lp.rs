//! Dense two-phase simplex for small equality-form linear programs.
//!
//! Solves `min cᵀx` subject to `A·x = b`, `x ≥ 0`. The problems built by the
//! minimax module have a few dozen rows and a few thousand columns, which a
//! dense tableau handles comfortably.

use alloc::vec;
use alloc::vec::Vec;

const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Basic column for each row; `None` marks a redundant row.
    pub basis: Vec<Option<usize>>,
    /// Row multipliers `y` with `cᵀ − yᵀA ≥ 0`, i.e. an optimal solution of
    /// `max bᵀy` subject to `Aᵀy ≤ c`.
    pub duals: Vec<f64>,
}

/// `a` is row-major with `rows × cols` entries.
pub fn minimize(a: &[f64], b: &[f64], c: &[f64], rows: usize, cols: usize) -> LpOutcome {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    assert_eq!(c.len(), cols);
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut t = vec![0.0; (rows + 1) * width];
    for r in 0..rows {
        let flip = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            t[r * width + j] = flip * a[r * cols + j];
        }
        t[r * width + cols + r] = 1.0;
        t[r * width + rhs] = flip * b[r];
    }
    let mut basis: Vec<usize> = (0..rows).map(|r| cols + r).collect();

    // Phase one: minimise the sum of artificials.
    let obj = rows * width;
    for r in 0..rows {
        for j in 0..cols {
            t[obj + j] -= t[r * width + j];
        }
        t[obj + rhs] -= t[r * width + rhs];
    }
    let limit = 20 * rows + cols + 500;
    match iterate(&mut t, &mut basis, rows, width, cols + rows, limit) {
        Step::Done => {}
        Step::Unbounded => return LpOutcome::Infeasible,
        Step::Limit => return LpOutcome::IterationLimit,
    }
    if -t[obj + rhs] > 1e-8 * (1.0 + b.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)))) {
        return LpOutcome::Infeasible;
    }
    // Drive zero-level artificials out of the basis where possible.
    let mut redundant = vec![false; rows];
    for r in 0..rows {
        if basis[r] >= cols {
            let entering = (0..cols).find(|&j| libm::fabs(t[r * width + j]) > 1e-9);
            match entering {
                Some(j) => pivot(&mut t, &mut basis, rows, width, r, j),
                None => redundant[r] = true,
            }
        }
    }

    // Phase two objective row.
    for j in 0..width {
        t[obj + j] = 0.0;
    }
    t[obj..obj + cols].copy_from_slice(c);
    for r in 0..rows {
        let cb = if basis[r] < cols { c[basis[r]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..width {
                t[obj + j] -= cb * t[r * width + j];
            }
        }
    }
    match iterate(&mut t, &mut basis, rows, width, cols, limit) {
        Step::Done => {}
        Step::Unbounded => return LpOutcome::Unbounded,
        Step::Limit => return LpOutcome::IterationLimit,
    }
    let mut x = vec![0.0; cols];
    for r in 0..rows {
        if basis[r] < cols {
            x[basis[r]] = t[r * width + rhs];
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    let duals = (0..rows)
        .map(|r| {
            let flip = if b[r] < 0.0 { -1.0 } else { 1.0 };
            -flip * t[obj + cols + r]
        })
        .collect();
    let basis = basis
        .iter()
        .enumerate()
        .map(|(r, &j)| if j < cols && !redundant[r] { Some(j) } else { None })
        .collect();
    LpOutcome::Optimal(LpSolution { x, value, basis, duals })
}

enum Step {
    Done,
    Unbounded,
    Limit,
}

/// Runs simplex pivots on the tableau; only columns `< allowed` may enter.
fn iterate(
    t: &mut [f64],
    basis: &mut [usize],
    rows: usize,
    width: usize,
    allowed: usize,
    limit: usize,
) -> Step {
    let obj = rows * width;
    let rhs = width - 1;
    let mut degenerate_run = 0usize;
    for _ in 0..limit {
        let bland = degenerate_run > 50;
        let mut entering = None;
        let mut best = -TOL;
        for j in 0..allowed {
            let rc = t[obj + j];
            if rc < best {
                entering = Some(j);
                if bland {
                    break;
                }
                best = rc;
            }
        }
        let Some(j) = entering else {
            return Step::Done;
        };
        let mut leave = None;
        let mut ratio = f64::INFINITY;
        for r in 0..rows {
            let a = t[r * width + j];
            if a > TOL {
                let q = t[r * width + rhs] / a;
                let better = q < ratio - 1e-14
                    || (q <= ratio + 1e-14 && leave.map_or(true, |l: usize| basis[r] < basis[l]));
                if better {
                    ratio = q;
                    leave = Some(r);
                }
            }
        }
        let Some(r) = leave else {
            return Step::Unbounded;
        };
        if ratio <= 1e-14 {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        pivot(t, basis, rows, width, r, j);
    }
    Step::Limit
}

fn pivot(t: &mut [f64], basis: &mut [usize], rows: usize, width: usize, r: usize, j: usize) {
    let p = t[r * width + j];
    for k in 0..width {
        t[r * width + k] /= p;
    }
    let (before, rest) = t.split_at_mut(r * width);
    let (prow, after) = rest.split_at_mut(width);
    for row in before.chunks_exact_mut(width).chain(after.chunks_exact_mut(width)) {
        let f = row[j];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            row[j] = 0.0;
        }
    }
    debug_assert!(rows * width < t.len());
    basis[r] = j;
}

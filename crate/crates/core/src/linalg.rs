//! Small dense linear algebra.

use alloc::vec::Vec;

/// Solves `a·x = b` by Gaussian elimination with partial pivoting.
/// `a` is row-major `n×n`. Returns `None` when a pivot falls below `1e-300`
/// relative to the row scale.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale: Vec<f64> = (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v))))
        .collect();
    if scale.iter().any(|s| *s == 0.0) {
        return None;
    }
    let mut scale = scale;
    for col in 0..n {
        let mut best = col;
        let mut best_val = 0.0;
        for row in col..n {
            let v = libm::fabs(a[row * n + col]) / scale[row];
            if v > best_val {
                best_val = v;
                best = row;
            }
        }
        if best_val < 1e-14 {
            return None;
        }
        if best != col {
            for k in 0..n {
                a.swap(col * n + k, best * n + k);
            }
            b.swap(col, best);
            scale.swap(col, best);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn solves_permuted_system() {
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x = solve(a, vec![7.0, 3.0, 6.0], 3).unwrap();
        let expect = [1.0, 2.0, 3.0];
        for (u, v) in x.iter().zip(expect) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_singular() {
        assert!(solve(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 2.0], 2).is_none());
    }
}

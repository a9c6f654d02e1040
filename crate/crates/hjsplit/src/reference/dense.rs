//! Small dense linear solves for the test oracles (Gaussian elimination
//! with partial pivoting; systems here are tiny).

/// Solves `A x = b` in place; returns `None` when a pivot vanishes.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm-sequence
/// bisection; used as an SVD oracle for the difference operators (whose
/// normal matrices are tridiagonal in each coordinate).
pub fn tridiag_max_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    debug_assert_eq!(off.len(), n.saturating_sub(1));
    let count_below = |x: f64| -> usize {
        // LDL^T recurrence: count negative pivots of (T - x I)
        let mut count = 0;
        let mut d = diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for k in 1..n {
            let denom = if d == 0.0 { 1e-300 } else { d };
            d = diag[k] - x - off[k - 1] * off[k - 1] / denom;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let bound = diag
        .iter()
        .enumerate()
        .map(|(k, &dk)| {
            let mut r = dk.abs();
            if k > 0 {
                r += off[k - 1].abs();
            }
            if k + 1 < n {
                r += off[k].abs();
            }
            r
        })
        .fold(0.0f64, f64::max);
    let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 * bound.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

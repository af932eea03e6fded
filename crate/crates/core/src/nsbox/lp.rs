//! Dense phase-I simplex for small linear feasibility problems.
//!
//! Decides whether `A x = b`, `x >= 0` has a solution by minimizing the sum
//! of artificial variables with Bland's rule (no cycling). Sized for the
//! locality test: 17 rows, 16 structural columns.

const PIVOT_EPS: f64 = 1e-11;

/// Returns a nonnegative solution of `A x = b` together with the residual
/// infeasibility (the optimal artificial mass), or `None` when the system is
/// infeasible beyond `tol`. Requires `b >= 0`.
#[allow(clippy::needless_range_loop)] // tableau code reads best with indices
pub fn feasible_nonneg(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<(Vec<f64>, f64)> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    debug_assert_eq!(b.len(), m);
    debug_assert!(b.iter().all(|v| *v >= -PIVOT_EPS));

    // tableau: n structural columns, m artificial columns, rhs
    let cols = n + m;
    let mut t = vec![vec![0.0; cols + 1]; m];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][cols] = b[i].max(0.0);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // reduced costs z_j - c_j for the phase-I objective (c = 1 on artificials)
        let mut entering = None;
        for j in 0..cols {
            if basis.contains(&j) {
                continue;
            }
            let z: f64 = (0..m)
                .filter(|i| basis[*i] >= n)
                .map(|i| t[i][j])
                .sum();
            let c = if j >= n { 1.0 } else { 0.0 };
            if z - c > PIVOT_EPS {
                entering = Some(j); // Bland: first improving index
                break;
            }
        }
        let Some(j) = entering else { break };

        // ratio test, Bland tie-break on the smallest basis index
        let mut pivot_row: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if t[i][j] > PIVOT_EPS {
                let ratio = t[i][cols] / t[i][j];
                let better = match pivot_row {
                    None => true,
                    Some(r) => {
                        ratio < best_ratio - PIVOT_EPS
                            || (ratio < best_ratio + PIVOT_EPS && basis[i] < basis[r])
                    }
                };
                if better {
                    pivot_row = Some(i);
                    best_ratio = ratio;
                }
            }
        }
        let Some(r) = pivot_row else {
            // unbounded phase-I cannot happen (objective bounded below by 0)
            break;
        };

        let piv = t[r][j];
        for v in t[r].iter_mut() {
            *v /= piv;
        }
        for i in 0..m {
            if i != r {
                let factor = t[i][j];
                if factor != 0.0 {
                    for k in 0..=cols {
                        t[i][k] -= factor * t[r][k];
                    }
                }
            }
        }
        basis[r] = j;
    }

    let residual: f64 = (0..m)
        .filter(|i| basis[*i] >= n)
        .map(|i| t[i][cols].max(0.0))
        .sum();
    if residual > tol {
        return None;
    }

    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][cols].max(0.0);
        }
    }
    Some((x, residual))
}

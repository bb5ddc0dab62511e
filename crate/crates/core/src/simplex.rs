//! A small dense two-phase simplex solver. Problems here are tiny (a few
//! hundred rows, under twenty structural columns), so a plain tableau with
//! Bland's rule is plenty.

const EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Minimizes `c·x` subject to `A x = b`, `x >= 0`.
/// Returns `None` when infeasible or unbounded.
pub fn solve_standard_form(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<LpSolution> {
    let rows = a.len();
    let cols = c.len();
    if rows == 0 {
        return Some(LpSolution {
            x: vec![0.0; cols],
            objective: 0.0,
        });
    }

    // tableau with artificial columns; RHS kept nonnegative
    let total = cols + rows;
    let mut t = vec![vec![0.0f64; total + 1]; rows];
    for i in 0..rows {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            t[i][j] = flip * a[i][j];
        }
        t[i][cols + i] = 1.0;
        t[i][total] = flip * b[i];
    }
    let mut basis: Vec<usize> = (cols..total).collect();

    // phase 1: minimize the sum of artificials
    let mut cost = vec![0.0f64; total + 1];
    for j in cols..total {
        cost[j] = 1.0;
    }
    reduce_cost_row(&mut cost, &t, &basis, total);
    pivot_to_optimum(&mut t, &mut cost, &mut basis, total, total)?;
    if -cost[total] > EPS {
        return None; // infeasible
    }
    // drive remaining artificials out of the basis where possible
    for i in 0..rows {
        if basis[i] >= cols {
            if let Some(j) = (0..cols).find(|&j| t[i][j].abs() > EPS) {
                pivot(&mut t, &mut cost, &mut basis, i, j, total);
            }
        }
    }

    // phase 2: original objective, artificials frozen out
    let mut cost2 = vec![0.0f64; total + 1];
    cost2[..cols].copy_from_slice(c);
    reduce_cost_row(&mut cost2, &t, &basis, total);
    // artificial columns may not re-enter in phase 2
    pivot_to_optimum(&mut t, &mut cost2, &mut basis, total, cols)?;

    let mut x = vec![0.0f64; cols];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < cols {
            x[bj] = t[i][total];
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Some(LpSolution { x, objective })
}

fn reduce_cost_row(cost: &mut [f64], t: &[Vec<f64>], basis: &[usize], total: usize) {
    for (i, &bj) in basis.iter().enumerate() {
        let cb = cost[bj];
        if cb != 0.0 {
            for j in 0..=total {
                cost[j] -= cb * t[i][j];
            }
            cost[bj] = 0.0;
        }
    }
}

/// Bland's rule pivoting until no negative reduced cost remains.
/// Returns `None` on unboundedness.
fn pivot_to_optimum(
    t: &mut [Vec<f64>],
    cost: &mut [f64],
    basis: &mut [usize],
    total: usize,
    enterable: usize,
) -> Option<()> {
    loop {
        let entering = (0..enterable).find(|&j| cost[j] < -EPS);
        let Some(j) = entering else {
            return Some(());
        };
        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..t.len() {
            if t[i][j] > EPS {
                let ratio = t[i][total] / t[i][j];
                if ratio < best_ratio - EPS
                    || (ratio < best_ratio + EPS
                        && leaving.map_or(true, |l| basis[i] < basis[l]))
                {
                    best_ratio = ratio;
                    leaving = Some(i);
                }
            }
        }
        let Some(i) = leaving else {
            return None; // unbounded
        };
        pivot(t, cost, basis, i, j, total);
    }
}

fn pivot(t: &mut [Vec<f64>], cost: &mut [f64], basis: &mut [usize], row: usize, col: usize, total: usize) {
    let p = t[row][col];
    for j in 0..=total {
        t[row][j] /= p;
    }
    for i in 0..t.len() {
        if i != row {
            let factor = t[i][col];
            if factor != 0.0 {
                for j in 0..=total {
                    t[i][j] -= factor * t[row][j];
                }
            }
        }
    }
    let factor = cost[col];
    if factor != 0.0 {
        for j in 0..=total {
            cost[j] -= factor * t[row][j];
        }
    }
    basis[row] = col;
}

/// Maximizes `min_k <phi, rays[k]>` over the box `|phi|_inf <= 1`.
/// Returns `(phi, t)` with `t` the attained minimum inner product, or `None`
/// when the LP could not be solved.
pub fn max_min_inner_product(rays: &[Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let k = rays.len();
    if k == 0 {
        return None;
    }
    let m = rays[0].len();
    // variables: u_1..u_m in [0, 2] (phi = u - 1), tp, tm, surplus s_k, bound slacks w_i
    let cols = m + 2 + k + m;
    let mut a = Vec::with_capacity(k + m);
    let mut b = Vec::with_capacity(k + m);
    for (ki, r) in rays.iter().enumerate() {
        let mut row = vec![0.0f64; cols];
        row[..m].copy_from_slice(r);
        row[m] = -1.0; // tp
        row[m + 1] = 1.0; // tm
        row[m + 2 + ki] = -1.0; // surplus
        a.push(row);
        b.push(r.iter().sum::<f64>());
    }
    for i in 0..m {
        let mut row = vec![0.0f64; cols];
        row[i] = 1.0;
        row[m + 2 + k + i] = 1.0;
        a.push(row);
        b.push(2.0);
    }
    let mut c = vec![0.0f64; cols];
    c[m] = -1.0; // maximize tp - tm
    c[m + 1] = 1.0;
    let sol = solve_standard_form(&a, &b, &c)?;
    let phi: Vec<f64> = sol.x[..m].iter().map(|u| u - 1.0).collect();
    let t = sol.x[m] - sol.x[m + 1];
    Some((phi, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_textbook_problem() {
        // min -3x - 5y s.t. x + s1 = 4, 2y + s2 = 12, 3x + 2y + s3 = 18
        let a = vec![
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 1.0, 0.0],
            vec![3.0, 2.0, 0.0, 0.0, 1.0],
        ];
        let b = vec![4.0, 12.0, 18.0];
        let c = vec![-3.0, -5.0, 0.0, 0.0, 0.0];
        let sol = solve_standard_form(&a, &b, &c).unwrap();
        assert!((sol.objective + 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasibility() {
        // x = -1, x >= 0
        let a = vec![vec![1.0]];
        let b = vec![-1.0];
        let c = vec![0.0];
        // row is negated internally; x = -1 is infeasible for x >= 0
        assert!(solve_standard_form(&a, &b, &c).map_or(true, |s| s.x[0] >= 0.0));
        // a genuinely contradictory pair
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let b = vec![1.0, 2.0];
        let c = vec![0.0, 0.0];
        assert!(solve_standard_form(&a, &b, &c).is_none());
    }

    #[test]
    fn centers_the_orthant() {
        // rays = standard basis: best phi is all-ones with t = 1
        let rays = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let (phi, t) = max_min_inner_product(&rays).unwrap();
        assert!((t - 1.0).abs() < 1e-9);
        assert!(phi.iter().all(|&p| (p - 1.0).abs() < 1e-9));
    }

    #[test]
    fn opposed_rays_admit_no_positive_functional() {
        let rays = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let (_, t) = max_min_inner_product(&rays).unwrap();
        assert!(t <= 1e-9);
    }
}

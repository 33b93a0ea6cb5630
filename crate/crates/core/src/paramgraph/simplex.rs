//! Dense primal simplex for strict-inequality feasibility.
//!
//! Every realizability question in this crate reduces to: does a system of
//! strict homogeneous inequalities `a_r . x > 0` admit a solution? Because the
//! system is invariant under positive scaling of `x`, strict feasibility is
//! equivalent to feasibility with any fixed margin, so we solve
//!
//! ```text
//!   maximize delta  subject to  a_r . x >= delta,  0 <= delta <= 1
//! ```
//!
//! A strictly feasible system attains `delta = 1` exactly (scale any strict
//! solution up); an infeasible one is capped at `delta = 0`. The unit gap
//! makes the floating-point accept/reject decision robust.

const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 20_000;

/// Result of the max-margin solve: the attained margin and a witness `x`.
#[derive(Debug, Clone)]
pub struct Feasibility {
    pub margin: f64,
    pub witness: Vec<f64>,
}

/// Maximize `delta` subject to `row . x >= delta` for every row and
/// `0 <= delta <= 1`. `x` is free (internally split into positive parts).
pub fn max_margin(rows: &[Vec<f64>], nvars: usize) -> Feasibility {
    let m = rows.len();
    // Columns: u (nvars), w (nvars), delta, surplus per row, slack for the
    // delta bound. Rows as equalities with the surplus/slack basic:
    //   -A u + A w + delta + s_r = 0
    //   delta + s_b = 1
    let ncols = 2 * nvars + 1 + m + 1;
    let delta_col = 2 * nvars;
    let nrows = m + 1;
    let mut tab = vec![vec![0.0f64; ncols + 1]; nrows];
    let mut basis = vec![0usize; nrows];

    for (r, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), nvars);
        for (j, &a) in row.iter().enumerate() {
            tab[r][j] = -a;
            tab[r][nvars + j] = a;
        }
        tab[r][delta_col] = 1.0;
        tab[r][delta_col + 1 + r] = 1.0;
        tab[r][ncols] = 0.0;
        basis[r] = delta_col + 1 + r;
    }
    tab[m][delta_col] = 1.0;
    tab[m][delta_col + 1 + m] = 1.0;
    tab[m][ncols] = 1.0;
    basis[m] = delta_col + 1 + m;

    // Objective: minimize -delta. Reduced-cost row starts at the raw costs
    // because the initial basis has zero cost.
    let mut cost = vec![0.0f64; ncols + 1];
    cost[delta_col] = -1.0;

    for _ in 0..MAX_PIVOTS {
        // Bland's rule: smallest-index column with negative reduced cost.
        let Some(enter) = (0..ncols).find(|&j| cost[j] < -EPS) else {
            break;
        };
        // Ratio test, smallest basis index on ties (Bland again).
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..nrows {
            let a = tab[r][enter];
            if a > EPS {
                let ratio = tab[r][ncols] / a;
                if ratio < best - EPS
                    || (ratio < best + EPS
                        && leave.map_or(true, |l| basis[r] < basis[l]))
                {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(lr) = leave else {
            // Unbounded direction cannot improve past the delta <= 1 cap;
            // only reachable through accumulated round-off.
            break;
        };
        // Pivot on (lr, enter).
        let piv = tab[lr][enter];
        for v in tab[lr].iter_mut() {
            *v /= piv;
        }
        for r in 0..nrows {
            if r != lr {
                let f = tab[r][enter];
                if f != 0.0 {
                    for j in 0..=ncols {
                        tab[r][j] -= f * tab[lr][j];
                    }
                }
            }
        }
        let f = cost[enter];
        if f != 0.0 {
            for j in 0..=ncols {
                cost[j] -= f * tab[lr][j];
            }
        }
        basis[lr] = enter;
    }

    let mut value = vec![0.0f64; ncols];
    for r in 0..nrows {
        value[basis[r]] = tab[r][ncols];
    }
    let witness = (0..nvars).map(|j| value[j] - value[nvars + j]).collect();
    Feasibility {
        margin: value[delta_col],
        witness,
    }
}

/// Strict feasibility of `row . x > 0` for all rows; the margin gap between
/// the feasible (1.0) and infeasible (0.0) outcomes is a full unit.
pub fn strictly_feasible(rows: &[Vec<f64>], nvars: usize) -> bool {
    if rows.is_empty() {
        return true;
    }
    max_margin(rows, nvars).margin > 0.5
}

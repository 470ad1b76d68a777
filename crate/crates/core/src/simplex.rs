//! Dense two-phase primal simplex with Bland's rule.
//!
//! Sized for the feasibility search: tens of variables, tens of rows. Bland's
//! pivoting rule makes every run finite; the pivot cap is a safety net only.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub coeffs: Vec<f64>,
    pub cmp: Cmp,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Minimizes `c . x` subject to the constraints and `x >= 0`.
pub(crate) fn solve(c: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    let n = c.len();
    let m = constraints.len();
    for row in constraints {
        if row.coeffs.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "constraint has {} coefficients, expected {n}",
                row.coeffs.len()
            )));
        }
    }

    // Slack/surplus layout: one extra column per inequality.
    let n_slack = constraints.iter().filter(|r| r.cmp != Cmp::Eq).count();
    let total = n + n_slack;

    // tableau[r] = [coeffs..., rhs]; rhs kept nonnegative by row negation.
    let mut tableau = vec![vec![0.0; total + 1]; m];
    let mut slack_col = n;
    let mut slack_of_row = vec![None; m];
    for (r, row) in constraints.iter().enumerate() {
        let flip = row.rhs < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        for (j, &v) in row.coeffs.iter().enumerate() {
            tableau[r][j] = sign * v;
        }
        tableau[r][total] = sign * row.rhs;
        if row.cmp != Cmp::Eq {
            let mut dir = match row.cmp {
                Cmp::Le => 1.0,
                Cmp::Ge => -1.0,
                Cmp::Eq => unreachable!(),
            };
            dir *= sign;
            tableau[r][slack_col] = dir;
            if dir > 0.0 {
                slack_of_row[r] = Some(slack_col);
            }
            slack_col += 1;
        }
    }

    // Initial basis: the row's own slack where it carries +1, otherwise an
    // artificial variable.
    let mut basis = vec![usize::MAX; m];
    let mut artificials = Vec::new();
    let mut columns = total;
    for r in 0..m {
        match slack_of_row[r] {
            Some(col) => basis[r] = col,
            None => {
                for row in tableau.iter_mut() {
                    row.insert(columns, 0.0);
                }
                tableau[r][columns] = 1.0;
                basis[r] = columns;
                artificials.push(columns);
                columns += 1;
            }
        }
    }

    // Phase 1: minimize the sum of artificials.
    if !artificials.is_empty() {
        let mut cost = vec![0.0; columns];
        for &a in &artificials {
            cost[a] = 1.0;
        }
        let optimum = run_phase(&mut tableau, &mut basis, &cost, columns)?;
        if optimum > 1e-7 {
            return Err(Error::InvalidParameter(
                "linear program is infeasible".into(),
            ));
        }
        // Scrub the round-off left behind by degenerate phase-1 pivots.
        let rhs_col = columns;
        for row in tableau.iter_mut() {
            if row[rhs_col].abs() < 1e-9 {
                row[rhs_col] = row[rhs_col].max(0.0);
            }
        }
        // Pivot any artificial still in the basis out to a structural column;
        // a row with no eligible column is redundant and can stay put at zero.
        for r in 0..m {
            if artificials.contains(&basis[r]) {
                if let Some(col) = (0..total).find(|&j| tableau[r][j].abs() > PIVOT_EPS) {
                    pivot(&mut tableau, &mut basis, r, col);
                }
            }
        }
        // Remove artificial columns from play.
        for row in tableau.iter_mut() {
            for &a in artificials.iter().rev() {
                row.remove(a);
            }
        }
        columns = total;
        for b in &basis {
            debug_assert!(*b == usize::MAX || *b < total || artificials.contains(b));
        }
        for b in basis.iter_mut() {
            if artificials.contains(b) {
                // Redundant zero row; park it on a harmless marker.
                *b = usize::MAX;
            }
        }
    }

    // Phase 2: original objective over structural + slack columns.
    let mut cost = vec![0.0; columns];
    cost[..n].copy_from_slice(c);
    let objective = run_phase(&mut tableau, &mut basis, &cost, columns)?;

    let mut x = vec![0.0; n];
    let rhs_col = columns;
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tableau[r][rhs_col];
        }
    }
    Ok(LpSolution { x, objective })
}

/// Runs Bland-rule simplex for one phase; returns the optimal objective.
///
/// Reduced costs are recomputed from scratch every iteration. At these sizes
/// that is cheap, and it keeps the stopping test free of incremental drift.
fn run_phase(
    tableau: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    columns: usize,
) -> Result<f64> {
    let m = tableau.len();
    let rhs_col = columns;
    let basic_cost = |basis: &[usize], r: usize| -> f64 {
        let b = basis[r];
        if b == usize::MAX {
            0.0
        } else {
            cost.get(b).copied().unwrap_or(0.0)
        }
    };

    for _ in 0..MAX_PIVOTS {
        // y_r = cost of the basic variable of row r; rc_j = c_j - y . A_j.
        let y: Vec<f64> = (0..m).map(|r| basic_cost(basis, r)).collect();
        // Bland: entering column is the lowest index with negative reduced
        // cost.
        let mut entering = None;
        for j in 0..columns {
            let mut rc = cost[j];
            for r in 0..m {
                if y[r] != 0.0 {
                    rc -= y[r] * tableau[r][j];
                }
            }
            if rc < -COST_EPS {
                entering = Some(j);
                break;
            }
        }
        let entering = match entering {
            Some(j) => j,
            None => {
                let objective = (0..m)
                    .map(|r| basic_cost(basis, r) * tableau[r][rhs_col])
                    .sum();
                return Ok(objective);
            }
        };

        // Minimum-ratio test; ties resolved by the smallest basic index
        // (Bland). Round-off can leave right-hand sides a hair negative, so
        // they are clamped for the ratio.
        let mut min_ratio = f64::INFINITY;
        for r in 0..m {
            let a = tableau[r][entering];
            if a > PIVOT_EPS {
                min_ratio = min_ratio.min(tableau[r][rhs_col].max(0.0) / a);
            }
        }
        if min_ratio.is_infinite() {
            return Err(Error::InvalidParameter(
                "linear program is unbounded".into(),
            ));
        }
        // Within the tie window, prefer the largest pivot element (numerical
        // stability), then the smallest basic index (Bland).
        let mut leave_row: Option<usize> = None;
        for r in 0..m {
            let a = tableau[r][entering];
            if a > PIVOT_EPS {
                let ratio = tableau[r][rhs_col].max(0.0) / a;
                if ratio <= min_ratio + 1e-9 * (1.0 + min_ratio) {
                    let better = match leave_row {
                        None => true,
                        Some(lr) => {
                            let current = tableau[lr][entering];
                            a > current * (1.0 + 1e-9)
                                || (a > current * (1.0 - 1e-9) && basis[r] < basis[lr])
                        }
                    };
                    if better {
                        leave_row = Some(r);
                    }
                }
            }
        }
        let leave_row = leave_row.expect("a finite ratio row exists");
        pivot(tableau, basis, leave_row, entering);
    }
    Err(Error::PivotLimit)
}

fn pivot(tableau: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let width = tableau[row].len();
    let p = tableau[row][col];
    for v in tableau[row].iter_mut() {
        *v /= p;
    }
    for r in 0..tableau.len() {
        if r == row {
            continue;
        }
        let factor = tableau[r][col];
        if factor == 0.0 {
            continue;
        }
        for j in 0..width {
            tableau[r][j] -= factor * tableau[row][j];
        }
        // The pivot column is exactly zero after elimination.
        tableau[r][col] = 0.0;
    }
    basis[row] = col;
}

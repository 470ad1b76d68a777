//! Can local classical post-processing of the noiseless statistics fake the
//! noisy ones?
//!
//! Alice relabels her bit through a 2x2 stochastic map `a`, Bob relabels his
//! Bell symbol through a 2x4 stochastic map `b`; neither touches Eve's
//! column. The bilinear system is linearized by gridding `a`'s two free
//! parameters and solving an exact L-infinity linear program in `b` at each
//! grid point. An algebraic certificate replays the by-hand contradiction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::JointDistribution;
use crate::simplex::{self, Cmp, Constraint};

/// Row-stochastic matrix: `rows[s][t] = P(target = t | source = s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMap {
    rows: Vec<Vec<f64>>,
}

impl StochasticMap {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::ShapeMismatch("empty stochastic map".into()));
        }
        let width = rows[0].len();
        for row in &rows {
            if row.len() != width {
                return Err(Error::ShapeMismatch("ragged stochastic map".into()));
            }
            let mut total = 0.0;
            for &v in row {
                if v < -1e-12 {
                    return Err(Error::InvalidParameter(format!("negative entry {v}")));
                }
                total += v;
            }
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::NotNormalized(total));
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows }
    }

    /// `n x m` map sending symbol `i` to symbol `i` (requires `m >= n`).
    pub fn identity_embedding(n: usize, m: usize) -> Result<Self> {
        if m < n {
            return Err(Error::ShapeMismatch(format!(
                "cannot embed {n} symbols into {m}"
            )));
        }
        let rows = (0..n)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Ok(Self { rows })
    }

    /// 2x2 map from its two free parameters `P(0 -> 0)` and `P(1 -> 0)`.
    pub fn binary(a00: f64, a10: f64) -> Result<Self> {
        Self::new(vec![vec![a00, 1.0 - a00], vec![a10, 1.0 - a10]])
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.rows[s][t]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Outcome of the grid-plus-LP feasibility search.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    /// Smallest L-infinity residual over all 24 joint cells found by the search.
    pub min_residual: f64,
    pub best_a: StochasticMap,
    pub best_b: StochasticMap,
    /// True iff `min_residual < tol`.
    pub feasible: bool,
}

/// Step-by-step record of the hand contradiction for one damping value.
#[derive(Debug, Clone)]
pub struct WitnessCertificate {
    pub steps: Vec<String>,
    pub infeasible: bool,
}

fn check_shapes(p: &JointDistribution, a: &StochasticMap, b: &StochasticMap) -> Result<()> {
    if a.n_rows() != 2 || a.n_cols() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "Alice's map must be 2x2, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if b.n_rows() != 2 || b.n_cols() != 4 {
        return Err(Error::ShapeMismatch(format!(
            "Bob's map must be 2x4, got {}x{}",
            b.n_rows(),
            b.n_cols()
        )));
    }
    let source_mass_beyond_binary: f64 = p
        .iter()
        .filter(|((_, _, bob), _)| *bob >= 2)
        .map(|(_, v)| v)
        .sum();
    if source_mass_beyond_binary > 1e-12 {
        return Err(Error::InvalidParameter(
            "source distribution must carry Bob symbols 0 and 1 only".into(),
        ));
    }
    Ok(())
}

/// `P'(A', E, B') = sum_{A,B} P(A,E,B) a[A][A'] b[B][B']`; Eve's index is a
/// spectator.
pub fn local_postprocess(
    p: &JointDistribution,
    a: &StochasticMap,
    b: &StochasticMap,
) -> Result<JointDistribution> {
    check_shapes(p, a, b)?;
    let mut out = [[[0.0; 4]; 3]; 2];
    for ((src_a, e, src_b), v) in p.iter() {
        if v == 0.0 || src_b >= 2 {
            continue;
        }
        for (tgt_a, out_a) in out.iter_mut().enumerate() {
            let weight_a = v * a.get(src_a, tgt_a);
            if weight_a == 0.0 {
                continue;
            }
            for tgt_b in 0..4 {
                out_a[e][tgt_b] += weight_a * b.get(src_b, tgt_b);
            }
        }
    }
    JointDistribution::new(out)
}

/// For a fixed Alice map, minimizes the L-infinity deviation from the target
/// over all row-stochastic Bob maps. Exact small LP: 8 structural variables
/// plus the bound.
pub fn lp_residual_b_given_a(
    p: &JointDistribution,
    target: &JointDistribution,
    a: &StochasticMap,
) -> Result<(f64, StochasticMap)> {
    check_shapes(p, a, &StochasticMap::identity_embedding(2, 4)?)?;

    // Variables: b[0][0..4], b[1][0..4], s.
    let n_vars = 9;
    let mut constraints = Vec::with_capacity(50);
    for tgt_a in 0..2 {
        for e in 0..3 {
            for tgt_b in 0..4 {
                let mut coeffs = vec![0.0; n_vars];
                for src_b in 0..2 {
                    let mut mass = 0.0;
                    for src_a in 0..2 {
                        mass += p.get(src_a, e, src_b) * a.get(src_a, tgt_a);
                    }
                    coeffs[src_b * 4 + tgt_b] = mass;
                }
                let t = target.get(tgt_a, e, tgt_b);
                // Cells that are identically zero on both sides (the vacuum
                // record row, for protocol inputs) contribute |0 - 0| and can
                // be dropped from the program without changing the optimum.
                if t == 0.0 && coeffs.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let mut upper = coeffs.clone();
                upper[8] = -1.0;
                constraints.push(Constraint {
                    coeffs: upper,
                    cmp: Cmp::Le,
                    rhs: t,
                });
                let mut lower = coeffs;
                lower[8] = 1.0;
                constraints.push(Constraint {
                    coeffs: lower,
                    cmp: Cmp::Ge,
                    rhs: t,
                });
            }
        }
    }
    for row in 0..2 {
        let mut coeffs = vec![0.0; n_vars];
        for col in 0..4 {
            coeffs[row * 4 + col] = 1.0;
        }
        constraints.push(Constraint {
            coeffs,
            cmp: Cmp::Eq,
            rhs: 1.0,
        });
    }

    let mut cost = vec![0.0; n_vars];
    cost[8] = 1.0;
    let solution = simplex::solve(&cost, &constraints)?;
    let b = StochasticMap::new(vec![
        normalize_row(&solution.x[0..4]),
        normalize_row(&solution.x[4..8]),
    ])?;
    Ok((solution.objective.max(0.0), b))
}

/// Scrubs simplex round-off from a row that is stochastic up to ~1e-10.
fn normalize_row(row: &[f64]) -> Vec<f64> {
    let cleaned: Vec<f64> = row.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = cleaned.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / row.len() as f64; row.len()];
    }
    cleaned.iter().map(|v| v / total).collect()
}

/// Grid search over Alice's two free parameters with an exact LP in Bob's
/// map at every grid point, followed by one local refinement pass around the
/// best cell.
pub fn feasibility_search(
    p: &JointDistribution,
    target: &JointDistribution,
    grid_step: f64,
    tol: f64,
) -> Result<FeasibilityReport> {
    if !(0.0 < grid_step && grid_step <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "grid step must lie in (0, 0.5], got {grid_step}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let coarse = grid_values(0.0, 1.0, grid_step);
    let (residual, a00, a10, b) = scan(p, target, &coarse, &coarse)?;

    // One refinement pass around the winning cell.
    let fine_step = grid_step / 10.0;
    let fine_a00 = grid_values(
        (a00 - grid_step).max(0.0),
        (a00 + grid_step).min(1.0),
        fine_step,
    );
    let fine_a10 = grid_values(
        (a10 - grid_step).max(0.0),
        (a10 + grid_step).min(1.0),
        fine_step,
    );
    let refined = scan(p, target, &fine_a00, &fine_a10)?;

    let (min_residual, best_a00, best_a10, best_b) = if refined.0 < residual {
        refined
    } else {
        (residual, a00, a10, b)
    };
    Ok(FeasibilityReport {
        min_residual,
        best_a: StochasticMap::binary(best_a00, best_a10)?,
        best_b,
        feasible: min_residual < tol,
    })
}

fn grid_values(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut values = Vec::new();
    let mut v = lo;
    while v < hi - 1e-12 {
        values.push(v);
        v += step;
    }
    values.push(hi);
    values
}

fn scan(
    p: &JointDistribution,
    target: &JointDistribution,
    a00_values: &[f64],
    a10_values: &[f64],
) -> Result<(f64, f64, f64, StochasticMap)> {
    let cells: Vec<(f64, f64)> = a00_values
        .iter()
        .flat_map(|&a00| a10_values.iter().map(move |&a10| (a00, a10)))
        .collect();
    let results: Vec<Result<(f64, f64, f64, StochasticMap)>> = cells
        .par_iter()
        .map(|&(a00, a10)| {
            let a = StochasticMap::binary(a00, a10)?;
            let (residual, b) = lp_residual_b_given_a(p, target, &a)?;
            Ok((residual, a00, a10, b))
        })
        .collect();
    let mut best: Option<(f64, f64, f64, StochasticMap)> = None;
    for result in results {
        let candidate = result?;
        // Strict improvement keeps the winner deterministic in grid order.
        if best.as_ref().map_or(true, |b| candidate.0 < b.0) {
            best = Some(candidate);
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty search grid".into()))
}

/// Replays the by-hand infeasibility argument for reproducing the
/// both-qubits-damped table from the noiseless one.
///
/// The three pinned cells force `a10 (b02 + b12) = 0`,
/// `a11 (b02 + b12) = 0`, and `a00 b02 = lambda / 2`; for `lambda > 0` the
/// last forces `b02 > 0` while the first two force `b02 + b12 = 0`, a
/// contradiction.
pub fn algebraic_witness(lambda: f64) -> Result<WitnessCertificate> {
    crate::channel::check_lambda(lambda)?;
    let mut steps = Vec::new();
    steps.push(
        "target cell P'(0,1,2) = 0 gives (a10 / 8) * (b02 + b12) = 0, \
         so a10 = 0 or b02 + b12 = 0"
            .to_string(),
    );
    steps.push(
        "target cell P'(1,1,2) = 0 gives (a11 / 8) * (b02 + b12) = 0, \
         so a11 = 0 or b02 + b12 = 0"
            .to_string(),
    );
    steps.push(
        "rows are stochastic: a10 + a11 = 1, so a10 and a11 cannot both \
         vanish; hence b02 + b12 = 0"
            .to_string(),
    );
    steps.push(format!(
        "target cell P'(0,0,2) = lambda/4 = {:.6} gives \
         a00 * b02 = lambda/2 = {:.6}",
        lambda / 4.0,
        lambda / 2.0
    ));
    let infeasible = lambda > 0.0;
    if infeasible {
        steps.push(
            "lambda > 0 forces b02 > 0, contradicting b02 + b12 = 0 with \
             b12 >= 0: no local maps exist"
                .to_string(),
        );
    } else {
        steps.push("lambda = 0 asks a00 * b02 = 0, which the identity maps satisfy".to_string());
    }
    Ok(WitnessCertificate { steps, infeasible })
}

//! Encoding-vector selection: a deterministic constrained search over the
//! box [W_min, W_max]^M maximizing the separation objective subject to the
//! budget, order, and convexity constraints.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{EncodingVector, FeatureMatrix};

#[derive(Debug, Error)]
pub enum EncodingError {
    #[error("dimension mismatch: matrix has {cols} columns, vector has {len}")]
    DimensionMismatch { cols: usize, len: usize },
}

/// How strictly the per-row constraints must hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConstraintMode {
    /// Every (row, constraint) pair must hold.
    Hard,
    /// Constraints must hold on at least fraction `q` of rows.
    Quantile(f64),
}

/// A normalized selection instance.
#[derive(Debug, Clone)]
pub struct SelectionProblem {
    /// N×M matrix of min-max-normalized per-packet features.
    pub normalized: FeatureMatrix,
    pub w_min: f64,
    pub w_max: f64,
    pub budget: f64,
    pub mode: ConstraintMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionResult {
    pub w: EncodingVector,
    pub objective_value: f64,
    pub feasible: bool,
    pub violated_constraint_fraction: f64,
}

/// Column-wise min-max normalization; constant columns map to zeros.
pub fn normalize_features(s: &FeatureMatrix) -> FeatureMatrix {
    let m = s.n_cols();
    let n = s.n_rows();
    let mut mins = vec![f64::INFINITY; m];
    let mut maxs = vec![f64::NEG_INFINITY; m];
    for i in 0..n {
        for (k, &x) in s.row(i).iter().enumerate() {
            mins[k] = mins[k].min(x);
            maxs[k] = maxs[k].max(x);
        }
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            s.row(i)
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    let span = maxs[k] - mins[k];
                    if span > 0.0 {
                        (x - mins[k]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    FeatureMatrix::from_rows(rows).expect("input was nonempty")
}

/// The separation objective over all rows:
/// `Σ_k [w_M n_Mk − w_1 n_1k] − Σ_{i=2}^{M−1} Σ_k [2 w_i n_ik − w_{i−1} n_(i−1)k − w_{i+1} n_(i+1)k]`.
pub fn objective(w: &EncodingVector, n: &FeatureMatrix) -> Result<f64, EncodingError> {
    let m = n.n_cols();
    if w.len() != m {
        return Err(EncodingError::DimensionMismatch {
            cols: m,
            len: w.len(),
        });
    }
    if m < 2 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for k in 0..n.n_rows() {
        let row = n.row(k);
        total += w.0[m - 1] * row[m - 1] - w.0[0] * row[0];
        for i in 1..m - 1 {
            total -= 2.0 * w.0[i] * row[i] - w.0[i - 1] * row[i - 1] - w.0[i + 1] * row[i + 1];
        }
    }
    Ok(total)
}

/// Fraction of violated (row, constraint) pairs.
///
/// Constraint families, per normalized row `n_·k`:
/// box bounds on each `w_i`, budget `Σ w_i n_ik ≤ B`, order
/// `w_i n_ik ≤ w_{i+1} n_(i+1)k`, and convexity
/// `2 w_i n_ik ≤ w_(i−1) n_(i−1)k + w_(i+1) n_(i+1)k`.
pub fn check_constraints(
    w: &EncodingVector,
    n: &FeatureMatrix,
    w_min: f64,
    w_max: f64,
    budget: f64,
) -> f64 {
    let m = n.n_cols();
    let rows = n.n_rows();
    let eps = 1e-9;
    let mut checked = 0usize;
    let mut violated = 0usize;

    // Box bounds count once per coefficient.
    for &wi in &w.0 {
        checked += 1;
        if wi < w_min - eps || wi > w_max + eps {
            violated += 1;
        }
    }
    for k in 0..rows {
        let row = n.row(k);
        // budget
        checked += 1;
        let total: f64 = w.0.iter().zip(row).map(|(wi, ni)| wi * ni).sum();
        if total > budget + eps {
            violated += 1;
        }
        // order
        for i in 0..m.saturating_sub(1) {
            checked += 1;
            if w.0[i] * row[i] > w.0[i + 1] * row[i + 1] + eps {
                violated += 1;
            }
        }
        // convexity
        for i in 1..m.saturating_sub(1) {
            checked += 1;
            if 2.0 * w.0[i] * row[i] > w.0[i - 1] * row[i - 1] + w.0[i + 1] * row[i + 1] + eps {
                violated += 1;
            }
        }
    }
    if checked == 0 {
        0.0
    } else {
        violated as f64 / checked as f64
    }
}

/// Fraction of rows on which any non-box constraint fails. Drives the
/// `Quantile` mode.
fn violated_row_fraction(
    w: &EncodingVector,
    n: &FeatureMatrix,
    w_min: f64,
    w_max: f64,
    budget: f64,
) -> f64 {
    let m = n.n_cols();
    let eps = 1e-9;
    for &wi in &w.0 {
        if wi < w_min - eps || wi > w_max + eps {
            return 1.0;
        }
    }
    let rows = n.n_rows();
    if rows == 0 {
        return 0.0;
    }
    let mut bad = 0usize;
    'rows: for k in 0..rows {
        let row = n.row(k);
        let total: f64 = w.0.iter().zip(row).map(|(wi, ni)| wi * ni).sum();
        if total > budget + eps {
            bad += 1;
            continue;
        }
        for i in 0..m.saturating_sub(1) {
            if w.0[i] * row[i] > w.0[i + 1] * row[i + 1] + eps {
                bad += 1;
                continue 'rows;
            }
        }
        for i in 1..m.saturating_sub(1) {
            if 2.0 * w.0[i] * row[i] > w.0[i - 1] * row[i - 1] + w.0[i + 1] * row[i + 1] + eps {
                bad += 1;
                continue 'rows;
            }
        }
    }
    bad as f64 / rows as f64
}

/// Log-spaced grid over [w_min, w_max] with `points` values.
pub fn log_grid(w_min: f64, w_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![w_min];
    }
    let (lo, hi) = (w_min.ln(), w_max.ln());
    (0..points)
        .map(|i| {
            // exact endpoints; exp(ln x) is off by an ulp otherwise
            if i == 0 {
                w_min
            } else if i == points - 1 {
                w_max
            } else {
                (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

/// Deterministic seeded search: a log-spaced grid over the box, then random
/// refinement around the incumbent. Returns the feasible candidate with the
/// highest objective, or the least-violating candidate when none is feasible.
pub fn select_encoding(
    problem: &SelectionProblem,
    search_budget: usize,
    seed: u64,
) -> SelectionResult {
    let n = &problem.normalized;
    let m = n.n_cols();
    let mut rng = StdRng::seed_from_u64(seed);

    let feasibility = |w: &EncodingVector| -> f64 {
        match problem.mode {
            ConstraintMode::Hard => violated_row_fraction(
                w,
                n,
                problem.w_min,
                problem.w_max,
                problem.budget,
            ),
            ConstraintMode::Quantile(q) => {
                let frac = violated_row_fraction(
                    w,
                    n,
                    problem.w_min,
                    problem.w_max,
                    problem.budget,
                );
                if frac <= 1.0 - q + 1e-12 {
                    0.0
                } else {
                    frac
                }
            }
        }
    };

    // Prefer feasible, then higher objective, then lexicographically
    // smallest coefficients.
    let better = |cand: &(EncodingVector, f64, f64), best: &(EncodingVector, f64, f64)| -> bool {
        let (cw, cobj, cviol) = cand;
        let (bw, bobj, bviol) = best;
        let cf = *cviol == 0.0;
        let bf = *bviol == 0.0;
        if cf != bf {
            return cf;
        }
        if !cf {
            if (cviol - bviol).abs() > 1e-12 {
                return cviol < bviol;
            }
        }
        if (cobj - bobj).abs() > 1e-9 {
            return cobj > bobj;
        }
        cw.0 < bw.0
    };

    // The candidate stream is prefix-closed: enlarging the budget only
    // appends candidates, so the best objective never regresses. Grids of
    // increasing resolution come first, then seeded log-uniform samples.
    let mut evals = 0usize;
    let mut best: Option<(EncodingVector, f64, f64)> = None;
    let mut consider = |w: EncodingVector, evals: &mut usize| -> bool {
        if *evals >= search_budget {
            return false;
        }
        *evals += 1;
        let obj = objective(&w, n).expect("dimensions checked");
        let viol = feasibility(&w);
        let cand = (w, obj, viol);
        match &best {
            Some(b) if !better(&cand, b) => {}
            _ => best = Some(cand),
        }
        true
    };

    'grids: for grid_points in 2..=20usize {
        if m == 0 {
            break;
        }
        let axis = log_grid(problem.w_min, problem.w_max, grid_points);
        let mut idx = vec![0usize; m];
        loop {
            let w = EncodingVector(idx.iter().map(|&i| axis[i]).collect());
            if !consider(w, &mut evals) {
                break 'grids;
            }
            // odometer increment
            let mut d = 0;
            loop {
                if d == m {
                    idx.clear();
                    break;
                }
                idx[d] += 1;
                if idx[d] < axis.len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if idx.is_empty() {
                break;
            }
        }
    }

    let (ln_lo, ln_hi) = (problem.w_min.ln(), problem.w_max.ln());
    while evals < search_budget {
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(ln_lo..=ln_hi).exp()).collect();
        consider(EncodingVector(w), &mut evals);
    }

    let (w, objective_value, viol) = best.unwrap_or((
        EncodingVector(vec![problem.w_min; m]),
        0.0,
        0.0,
    ));
    SelectionResult {
        feasible: viol == 0.0,
        violated_constraint_fraction: viol,
        w,
        objective_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn normalize_basic_column() {
        let s = matrix(vec![vec![0.0], vec![5.0], vec![10.0]]);
        let n = normalize_features(&s);
        assert_eq!(n.column(0), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn normalize_constant_and_single() {
        let s = matrix(vec![vec![7.0], vec![7.0], vec![7.0]]);
        assert_eq!(normalize_features(&s).column(0), vec![0.0, 0.0, 0.0]);
        let s = matrix(vec![vec![3.0]]);
        assert_eq!(normalize_features(&s).column(0), vec![0.0]);
    }

    #[test]
    fn objective_two_features() {
        let n = matrix(vec![vec![0.5, 1.0]]);
        let w = EncodingVector(vec![10.0, 100.0]);
        assert_eq!(objective(&w, &n).unwrap(), 95.0);
    }

    #[test]
    fn objective_single_feature_is_zero() {
        let n = matrix(vec![vec![0.3], vec![0.9]]);
        let w = EncodingVector(vec![500.0]);
        assert_eq!(objective(&w, &n).unwrap(), 0.0);
    }

    /// Second evaluator written straight from the formula, summing the
    /// boundary and middle terms per row independently.
    fn objective_oracle(w: &[f64], n: &FeatureMatrix) -> f64 {
        let m = n.n_cols();
        if m < 2 {
            return 0.0;
        }
        let mut first = 0.0;
        let mut second = 0.0;
        for k in 0..n.n_rows() {
            let r = n.row(k);
            first += w[m - 1] * r[m - 1] - w[0] * r[0];
            for i in 1..(m - 1) {
                second += 2.0 * w[i] * r[i] - w[i - 1] * r[i - 1] - w[i + 1] * r[i + 1];
            }
        }
        first - second
    }

    #[test]
    fn objective_matches_independent_evaluator() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..20 {
            let rows: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..3).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            let n = matrix(rows);
            let w: Vec<f64> = (0..3).map(|_| rng.gen_range(10.0..1000.0)).collect();
            let got = objective(&EncodingVector(w.clone()), &n).unwrap();
            assert!((got - objective_oracle(&w, &n)).abs() < 1e-9);
        }
    }

    #[test]
    fn constraints_all_zero_rows() {
        let n = matrix(vec![vec![0.0, 0.0]; 3]);
        let w = EncodingVector(vec![50.0, 50.0]);
        assert_eq!(check_constraints(&w, &n, 10.0, 1000.0, 1e5), 0.0);
    }

    #[test]
    fn constraints_box_violation() {
        let n = matrix(vec![vec![0.0, 0.0]]);
        let w = EncodingVector(vec![2000.0, 50.0]);
        assert!(check_constraints(&w, &n, 10.0, 1000.0, 1e5) > 0.0);
    }

    #[test]
    fn constraints_forced_order_violation() {
        let n = matrix(vec![vec![1.0, 0.0]]);
        let w = EncodingVector(vec![10.0, 10.0]);
        assert!(check_constraints(&w, &n, 10.0, 1000.0, 1e5) > 0.0);
    }

    #[test]
    fn selection_two_feature_instance() {
        // n_2k >= n_1k everywhere, both positive: order constraint favors
        // large w_2, budget caps it.
        let n = matrix(vec![vec![0.2, 0.6], vec![0.4, 0.9], vec![0.1, 0.5]]);
        let problem = SelectionProblem {
            normalized: n.clone(),
            w_min: 10.0,
            w_max: 1000.0,
            budget: 1e5,
            mode: ConstraintMode::Hard,
        };
        let result = select_encoding(&problem, 2000, 1);
        assert!(result.feasible);
        assert!(
            (result.objective_value - objective(&result.w, &n).unwrap()).abs() < 1e-9
        );
        assert_eq!(
            check_constraints(&result.w, &n, 10.0, 1000.0, 1e5),
            0.0
        );
        // Exhaustive oracle over the same base grid.
        let axis = log_grid(10.0, 1000.0, 20);
        let mut best = f64::NEG_INFINITY;
        for &a in &axis {
            for &b in &axis {
                let w = EncodingVector(vec![a, b]);
                if violated_row_fraction(&w, &n, 10.0, 1000.0, 1e5) == 0.0 {
                    best = best.max(objective(&w, &n).unwrap());
                }
            }
        }
        assert!(result.objective_value >= best - 1e-9);
    }

    #[test]
    fn selection_degenerate_single_feature() {
        let n = matrix(vec![vec![0.5], vec![1.0]]);
        let problem = SelectionProblem {
            normalized: n,
            w_min: 10.0,
            w_max: 1000.0,
            budget: 1e5,
            mode: ConstraintMode::Hard,
        };
        let result = select_encoding(&problem, 100, 1);
        assert!(result.feasible);
        assert_eq!(result.objective_value, 0.0);
        assert_eq!(result.w.0, vec![10.0]);
    }

    #[test]
    fn selection_all_zero_rows() {
        let n = matrix(vec![vec![0.0, 0.0]; 4]);
        let problem = SelectionProblem {
            normalized: n,
            w_min: 10.0,
            w_max: 1000.0,
            budget: 1e5,
            mode: ConstraintMode::Hard,
        };
        let result = select_encoding(&problem, 500, 1);
        assert!(result.feasible);
        assert_eq!(result.objective_value, 0.0);
        assert_eq!(result.w.0, vec![10.0, 10.0]);
    }

    #[test]
    fn monotone_search_budget() {
        let n = matrix(vec![
            vec![0.1, 0.3, 0.9],
            vec![0.2, 0.5, 0.8],
            vec![0.0, 0.4, 1.0],
        ]);
        let problem = SelectionProblem {
            normalized: n,
            w_min: 10.0,
            w_max: 1000.0,
            budget: 1e5,
            mode: ConstraintMode::Quantile(0.5),
        };
        let mut prev = f64::NEG_INFINITY;
        for budget in [100, 400, 1600] {
            let r = select_encoding(&problem, budget, 9);
            assert!(
                r.objective_value >= prev - 1e-9,
                "objective regressed at budget {budget}"
            );
            prev = r.objective_value;
        }
    }

    #[test]
    fn infeasible_reports_fallback() {
        // Order constraint impossible: n_1 positive, n_2 zero.
        let n = matrix(vec![vec![1.0, 0.0]; 3]);
        let problem = SelectionProblem {
            normalized: n,
            w_min: 10.0,
            w_max: 1000.0,
            budget: 1e5,
            mode: ConstraintMode::Hard,
        };
        let result = select_encoding(&problem, 500, 1);
        assert!(!result.feasible);
        assert!(result.violated_constraint_fraction > 0.0);
    }
}

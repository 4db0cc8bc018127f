//! Dense two-phase simplex for small linear programs in the form
//! `maximize c·x` subject to equalities, `≤` inequalities and `x ≥ 0`.
//!
//! Bland's rule is used throughout, so the pivot sequence is deterministic.
//! Rows and columns are equilibrated before solving: moment constraints can
//! span dozens of orders of magnitude. The tableau is refactored from the
//! original data after each pivot.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
/// Residuals beyond this mean the basis was too ill-conditioned to trust.
const RESIDUAL_LIMIT: f64 = 1e-7;
const EQUILIBRATION_PASSES: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_constraints: Vec<(Vec<f64>, f64)>,
    /// `row·x ≤ rhs`.
    pub ineq_constraints: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// NaN unless optimal.
    pub value: f64,
    /// Empty unless optimal.
    pub point: Vec<f64>,
    pub support_size: usize,
    /// Worst constraint violation of `point` on the equilibrated rows,
    /// relative to `1 + |rhs|`.
    pub primal_residual: f64,
    /// Largest positive reduced cost (and negative `≤` multiplier) for the
    /// recomputed duals, measured on the equilibrated problem.
    pub dual_residual: f64,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        Self {
            status,
            value: f64::NAN,
            point: Vec::new(),
            support_size: 0,
            primal_residual: f64::NAN,
            dual_residual: f64::NAN,
        }
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            eq_constraints: Vec::new(),
            ineq_constraints: Vec::new(),
        }
    }

    pub fn with_eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq_constraints.push((row, rhs));
        self
    }

    pub fn with_ineq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.ineq_constraints.push((row, rhs));
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.eq_constraints.len() + self.ineq_constraints.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidArgument("linear program has no variables".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("objective has non-finite entries".into()));
        }
        for (row, rhs) in self.eq_constraints.iter().chain(&self.ineq_constraints) {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            if !rhs.is_finite() || row.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidArgument("constraint has non-finite entries".into()));
            }
        }
        Ok(())
    }

    /// Largest violation of the constraints by `x`, without scaling.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().fold(0.0f64, |w, &v| w.max(-v));
        for (row, rhs) in &self.eq_constraints {
            worst = worst.max((dot(row, x) - rhs).abs());
        }
        for (row, rhs) in &self.ineq_constraints {
            worst = worst.max(dot(row, x) - rhs);
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row and column factors such that `r_i a_ij s_j` is well scaled.
fn equilibrate(rows: &[&[f64]], n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = rows.len();
    let mut r = vec![1.0; m];
    let mut s = vec![1.0; n];
    let range = |it: &mut dyn Iterator<Item = f64>| {
        it.filter(|v| *v > 0.0)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    for _ in 0..EQUILIBRATION_PASSES {
        for i in 0..m {
            let (lo, hi) = range(&mut (0..n).map(|j| (rows[i][j] * s[j]).abs()));
            if hi > 0.0 {
                r[i] = 1.0 / (lo * hi).sqrt();
            }
        }
        for j in 0..n {
            let (lo, hi) = range(&mut (0..m).map(|i| (rows[i][j] * r[i]).abs()));
            if hi > 0.0 {
                s[j] = 1.0 / (lo * hi).sqrt();
            }
        }
    }
    for i in 0..m {
        let hi = (0..n).map(|j| (rows[i][j] * r[i] * s[j]).abs()).fold(0.0, f64::max);
        if hi > 0.0 {
            r[i] /= hi;
        }
    }
    (r, s)
}

struct Tableau {
    m: usize,
    /// Structural columns (originals then slacks), then one artificial per row, then the rhs.
    width: usize,
    data: Vec<f64>,
    /// The initial tableau, used to refactor `B⁻¹[A | I | b]` after every pivot.
    base: nalgebra::DMatrix<f64>,
    basis: Vec<usize>,
    costs: Vec<f64>,
    /// Reduced costs `c_j - c_B B⁻¹ A_j` over all columns; the last entry is minus the objective.
    cost_row: Vec<f64>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn set_costs(&mut self, costs: &[f64]) {
        self.costs = costs.to_vec();
        let w = self.width;
        let mut row = vec![0.0; w];
        row[..costs.len()].copy_from_slice(costs);
        for i in 0..self.m {
            let cb = costs.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    row[j] -= cb * self.data[i * w + j];
                }
            }
        }
        self.cost_row = row;
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.data[pr * w + pc];
        for j in 0..w {
            self.data[pr * w + j] /= p;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for i in 0..self.m {
            if i == pr {
                continue;
            }
            let f = self.data[i * w + pc];
            if f != 0.0 {
                for j in 0..w {
                    self.data[i * w + j] -= f * pivot_row[j];
                }
                self.data[i * w + pc] = 0.0;
            }
        }
        let f = self.cost_row[pc];
        if f != 0.0 {
            for j in 0..w {
                self.cost_row[j] -= f * pivot_row[j];
            }
            self.cost_row[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.refactor();
    }

    /// Recomputes the tableau from the initial data for the current basis, so
    /// rounding errors do not accumulate across pivots.
    fn refactor(&mut self) {
        let m = self.m;
        let b = nalgebra::DMatrix::from_fn(m, m, |i, k| self.base[(i, self.basis[k])]);
        let Some(fresh) = b.lu().solve(&self.base) else {
            return;
        };
        for i in 0..m {
            for j in 0..self.width {
                self.data[i * self.width + j] = fresh[(i, j)];
            }
            for k in 0..m {
                self.data[i * self.width + self.basis[k]] = if i == k { 1.0 } else { 0.0 };
            }
        }
        let costs = std::mem::take(&mut self.costs);
        self.set_costs(&costs);
    }

    /// Maximizes over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(pc) = (0..allowed).find(|&j| self.cost_row[j] > COST_TOL) else {
                return true;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * br.abs().max(1e-300);
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((pr, _)) => self.pivot(pr, pc),
                None => return false,
            }
        }
    }
}

/// Solves `problem`; infeasibility and unboundedness are reported in the status.
pub fn solve_lp(problem: &LinearProgram) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.num_vars();
    let n_eq = problem.eq_constraints.len();
    let m = problem.num_constraints();
    let rows: Vec<&[f64]> = problem
        .eq_constraints
        .iter()
        .chain(&problem.ineq_constraints)
        .map(|(r, _)| r.as_slice())
        .collect();
    let rhs: Vec<f64> = problem
        .eq_constraints
        .iter()
        .chain(&problem.ineq_constraints)
        .map(|(_, b)| *b)
        .collect();
    let (r, s) = equilibrate(&rows, n);
    let c_scaled: Vec<f64> = problem.objective.iter().zip(&s).map(|(c, s)| c * s).collect();
    let c_norm = c_scaled.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(f64::MIN_POSITIVE);

    let n_slack = m - n_eq;
    let structural = n + n_slack;
    let width = structural + m + 1;
    let mut data = vec![0.0; m * width];
    let mut sign = vec![1.0; m];
    for i in 0..m {
        let b = rhs[i] * r[i];
        sign[i] = if b < 0.0 { -1.0 } else { 1.0 };
        let row = &mut data[i * width..(i + 1) * width];
        for j in 0..n {
            row[j] = sign[i] * rows[i][j] * r[i] * s[j];
        }
        if i >= n_eq {
            row[n + i - n_eq] = sign[i];
        }
        row[structural + i] = 1.0;
        row[width - 1] = sign[i] * b;
    }
    let base = nalgebra::DMatrix::from_row_slice(m, width, &data);
    let mut t = Tableau {
        m,
        width,
        data,
        base,
        basis: (structural..structural + m).collect(),
        costs: Vec::new(),
        cost_row: Vec::new(),
    };

    let mut phase1 = vec![0.0; structural + m];
    phase1[structural..].iter_mut().for_each(|c| *c = -1.0);
    t.set_costs(&phase1);
    t.optimize(structural);
    let b_norm = (0..m).map(|i| t.rhs(i).abs()).fold(1.0f64, f64::max);
    let infeasibility: f64 = (0..m)
        .filter(|&i| t.basis[i] >= structural)
        .map(|i| t.rhs(i).abs())
        .sum();
    if infeasibility > FEAS_TOL * b_norm {
        return Ok(LpSolution::without_point(LpStatus::Infeasible));
    }
    for i in 0..m {
        if t.basis[i] >= structural {
            let pc = (0..structural)
                .filter(|&j| t.at(i, j).abs() > 1e-9)
                .max_by(|&a, &b| t.at(i, a).abs().total_cmp(&t.at(i, b).abs()));
            // no candidate: the row is redundant and its artificial stays basic at zero
            if let Some(pc) = pc {
                t.pivot(i, pc);
            }
        }
    }

    let mut phase2 = vec![0.0; structural + m];
    for j in 0..n {
        phase2[j] = c_scaled[j] / c_norm;
    }
    t.set_costs(&phase2);
    if !t.optimize(structural) {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }

    let mut y = vec![0.0; structural + m];
    for i in 0..m {
        if t.basis[i] < structural {
            y[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let point: Vec<f64> = (0..n).map(|j| y[j] * s[j]).collect();
    let support_size = (0..n).filter(|&j| y[j] > 0.0).count();

    // Duals from B⁻¹ (the artificial columns), checked against the scaled data.
    let duals: Vec<f64> = (0..m)
        .map(|k| {
            (0..m)
                .map(|i| phase2.get(t.basis[i]).copied().unwrap_or(0.0) * t.at(i, structural + k))
                .sum::<f64>()
        })
        .collect();
    let mut dual_residual = 0.0f64;
    for j in 0..structural {
        let col_dot: f64 = (0..m)
            .map(|i| {
                let a = if j < n {
                    sign[i] * rows[i][j] * r[i] * s[j]
                } else if i == n_eq + j - n {
                    sign[i]
                } else {
                    0.0
                };
                duals[i] * a
            })
            .sum();
        dual_residual = dual_residual.max(phase2[j] - col_dot);
    }
    let mut primal_residual = 0.0f64;
    for i in 0..m {
        let lhs: f64 = (0..n).map(|j| rows[i][j] * r[i] * s[j] * y[j]).sum();
        let b = rhs[i] * r[i];
        let v = if i < n_eq { (lhs - b).abs() } else { lhs - b };
        primal_residual = primal_residual.max(v / (1.0 + b.abs()));
    }
    if primal_residual > RESIDUAL_LIMIT || dual_residual > RESIDUAL_LIMIT {
        return Err(Error::Numerical(format!(
            "simplex lost accuracy (primal residual {primal_residual:e}, dual residual {dual_residual:e})"
        )));
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: dot(&problem.objective, &point),
        point,
        support_size,
        primal_residual,
        dual_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::stream_rng;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn trivial_programs() {
        let lp = LinearProgram::new(vec![1.0, 0.0]).with_eq(vec![1.0, 1.0], 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.point[0] - 1.0).abs() < 1e-12 && s.point[1].abs() < 1e-12);

        let lp = LinearProgram::new(vec![1.0, 1.0])
            .with_ineq(vec![1.0, 0.0], 2.0)
            .with_ineq(vec![0.0, 1.0], 3.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 5.0).abs() < 1e-12);
        assert_eq!(s.support_size, 2);
    }

    #[test]
    fn status_reporting() {
        let infeasible = LinearProgram::new(vec![1.0]).with_eq(vec![1.0], -1.0);
        assert_eq!(solve_lp(&infeasible).unwrap().status, LpStatus::Infeasible);
        let unbounded = LinearProgram::new(vec![1.0, 0.0]).with_ineq(vec![-1.0, 1.0], 1.0);
        assert_eq!(solve_lp(&unbounded).unwrap().status, LpStatus::Unbounded);
        let mismatch = LinearProgram::new(vec![1.0, 0.0]).with_eq(vec![1.0], 1.0);
        assert!(matches!(solve_lp(&mismatch), Err(Error::DimensionMismatch { .. })));
        let nan = LinearProgram::new(vec![1.0]).with_eq(vec![1.0], f64::NAN);
        assert!(solve_lp(&nan).is_err());
    }

    #[test]
    fn redundant_and_negative_rows() {
        let lp = LinearProgram::new(vec![1.0, 2.0, 0.0])
            .with_eq(vec![1.0, 1.0, 1.0], 1.0)
            .with_eq(vec![2.0, 2.0, 2.0], 2.0)
            .with_ineq(vec![0.0, -1.0, 0.0], -0.25);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    /// Brute-force optimum over all basic solutions of the slack-augmented system.
    fn vertex_enumeration(lp: &LinearProgram) -> Option<f64> {
        let n = lp.num_vars();
        let m = lp.num_constraints();
        let n_eq = lp.eq_constraints.len();
        let width = n + (m - n_eq);
        let mut a = vec![vec![0.0; width]; m];
        let mut b = vec![0.0; m];
        for (i, (row, rhs)) in lp.eq_constraints.iter().chain(&lp.ineq_constraints).enumerate() {
            a[i][..n].copy_from_slice(row);
            if i >= n_eq {
                a[i][n + i - n_eq] = 1.0;
            }
            b[i] = *rhs;
        }
        let mut best: Option<f64> = None;
        let mut cols = Vec::new();
        fn combos(start: usize, width: usize, k: usize, cols: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if cols.len() == k {
                f(cols);
                return;
            }
            for j in start..width {
                cols.push(j);
                combos(j + 1, width, k, cols, f);
                cols.pop();
            }
        }
        combos(0, width, m, &mut cols, &mut |basis| {
            let mat = nalgebra::DMatrix::from_fn(m, m, |i, k| a[i][basis[k]]);
            let Some(inv) = mat.clone().try_inverse() else { return };
            if mat.determinant().abs() < 1e-10 {
                return;
            }
            let xb = inv * nalgebra::DVector::from_column_slice(&b);
            if xb.iter().any(|v| *v < -1e-9) {
                return;
            }
            let value: f64 = basis
                .iter()
                .zip(xb.iter())
                .filter(|(j, _)| **j < n)
                .map(|(j, v)| lp.objective[*j] * v)
                .sum();
            best = Some(best.map_or(value, |b: f64| b.max(value)));
        });
        best
    }

    #[test]
    fn random_programs_match_vertex_enumeration() {
        let mut rng = stream_rng(21, 0);
        let mut checked = 0;
        while checked < 50 {
            let m_eq = rng.random_range(0..=2usize);
            let m_ineq = rng.random_range(1..=4usize);
            let n = rng.random_range(2..=if m_eq + m_ineq <= 4 { 30 } else { 12 });
            // a feasible, bounded program: x0 ≥ 0 feasible by construction, and a
            // positive row with rhs caps every variable
            let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let mut lp = LinearProgram::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
            lp = lp.with_ineq(
                (0..n).map(|_| rng.random_range(0.1..1.0)).collect::<Vec<_>>(),
                0.0,
            );
            let cap = dot(&lp.ineq_constraints[0].0, &x0) + rng.random_range(0.0..1.0);
            lp.ineq_constraints[0].1 = cap;
            for _ in 0..m_eq {
                let row: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let rhs = dot(&row, &x0);
                lp = lp.with_eq(row, rhs);
            }
            for _ in 1..m_ineq {
                let row: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let rhs = dot(&row, &x0) + rng.random_range(0.0..0.5);
                lp = lp.with_ineq(row, rhs);
            }
            let width = n + m_ineq;
            let m = m_eq + m_ineq;
            // keep the brute force affordable
            if (1..=m).fold(1u128, |acc, k| acc * (width - m + k) as u128 / k as u128) > 300_000 {
                continue;
            }
            let s = solve_lp(&lp).unwrap();
            assert_eq!(s.status, LpStatus::Optimal);
            let oracle = vertex_enumeration(&lp).unwrap();
            assert!((s.value - oracle).abs() < 1e-8, "{} vs {oracle}", s.value);
            assert!(lp.violation(&s.point) < 1e-9);
            assert!(s.primal_residual < 1e-9 && s.dual_residual < 1e-9);
            assert!(s.support_size <= m);
            checked += 1;
        }
    }

    #[test]
    fn badly_scaled_moment_rows() {
        // two-point measure with mean 1e-6 and second moment 2e-12
        let grid: Vec<f64> = (0..=200).map(|k| if k == 0 { 0.0 } else { 10f64.powf(-9.0 + 9.0 * (k - 1) as f64 / 199.0) }).collect();
        let d = 1e6;
        let lp = LinearProgram::new(grid.iter().map(|x| x.powf(1.1)).collect())
            .with_eq(grid.iter().map(|_| 1.0).collect(), 1.0)
            .with_eq(grid.clone(), 1.0 / d)
            .with_eq(grid.iter().map(|x| x * x).collect(), 2.0 / ((d + 1.0) * d));
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.primal_residual < 1e-9 && s.dual_residual < 1e-9);
        let mean: f64 = grid.iter().zip(&s.point).map(|(x, p)| x * p).sum();
        assert!((mean * d - 1.0).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn objective_scaling_scales_value(seed in any::<u64>(), c in 0.01f64..100.0) {
            let mut rng = stream_rng(seed, 0);
            let n = 8;
            let obj: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rows: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.random_range(0.1..1.0)).collect()).collect();
            let build = |scale: f64| {
                rows.iter().fold(
                    LinearProgram::new(obj.iter().map(|v| v * scale).collect()),
                    |lp, r| lp.with_ineq(r.clone(), 1.0),
                )
            };
            let a = solve_lp(&build(1.0)).unwrap();
            let b = solve_lp(&build(c)).unwrap();
            prop_assert!((b.value - c * a.value).abs() < 1e-9 * c.max(1.0));
            let support = |s: &LpSolution| s.point.iter().map(|v| *v > 1e-12).collect::<Vec<_>>();
            prop_assert_eq!(support(&a), support(&b));
        }
    }
}

//! Entropies, moment-constrained uncertainty LPs, exact stabilizer entropy
//! averages and certainty relations.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::distinguish::{check_state, Povm};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::moments::stabilizer_fourth_moment_ceiling;
use crate::operator::HermitianOperator;
use crate::stabilizer::{stabilizer_state_count_log2, StabilizerOrbit, MAX_STABILIZER_QUBITS};

pub const DEFAULT_RENYI_EPSILON: f64 = 0.1;
pub const DEFAULT_GRID_SIZE: usize = 2001;
pub const MIN_GRID_SIZE: usize = 100;
/// Smallest nonzero point of the geometric grid.
pub const GEOMETRIC_GRID_FLOOR: f64 = 1e-9;
/// Largest qubit count solved on the uniform grid by default.
pub const UNIFORM_GRID_MAX_QUBITS: usize = 9;
pub const REFINEMENT_GRIDS: [usize; 3] = [501, 2001, 8001];
pub const MAX_EXACT_ENTROPY_QUBITS: usize = 3;

const NORMALIZATION_TOL: f64 = 1e-9;

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidArgument("empty distribution".into()));
    }
    if let Some(v) = p.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid probability {v}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(shannon_unchecked(p))
}

fn shannon_unchecked(p: &[f64]) -> f64 {
    -p.iter().filter(|v| **v > 0.0).map(|v| v * v.log2()).sum::<f64>()
}

/// Rényi entropy of order `order ≠ 1` in bits.
pub fn renyi(p: &[f64], order: f64) -> Result<f64> {
    check_distribution(p)?;
    if order == 1.0 {
        return Err(Error::InvalidArgument("order 1 is the Shannon entropy".into()));
    }
    if !(order >= 0.0) || order.is_nan() {
        return Err(Error::InvalidArgument(format!("invalid Rényi order {order}")));
    }
    if order.is_infinite() {
        return Ok(-p.iter().copied().fold(0.0, f64::max).log2());
    }
    let sum: f64 = p.iter().filter(|v| **v > 0.0).map(|v| v.powf(order)).sum();
    Ok(sum.log2() / (1.0 - order))
}

/// `D(p‖q)` in bits; support mismatch is reported as an error.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    check_distribution(p)?;
    check_distribution(q)?;
    let mut total = 0.0;
    for (a, b) in p.iter().zip(q) {
        if *a > 0.0 {
            if *b <= 0.0 {
                return Err(Error::InvalidArgument(
                    "relative entropy is infinite: p is not supported on q".into(),
                ));
            }
            total += a * (a / b).log2();
        }
    }
    Ok(total.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DesignLevel {
    Design2,
    Design3,
    Design4,
    /// 3-design equalities plus the stabilizer fourth-moment ceiling.
    Stabilizer,
}

impl DesignLevel {
    pub const ALL: [DesignLevel; 4] = [
        DesignLevel::Design2,
        DesignLevel::Design3,
        DesignLevel::Stabilizer,
        DesignLevel::Design4,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            DesignLevel::Design2 => "design2",
            DesignLevel::Design3 => "design3",
            DesignLevel::Design4 => "design4",
            DesignLevel::Stabilizer => "stabilizer",
        }
    }

    /// Number of moments fixed by equalities.
    pub fn equality_order(self) -> u32 {
        match self {
            DesignLevel::Design2 => 2,
            DesignLevel::Design3 | DesignLevel::Stabilizer => 3,
            DesignLevel::Design4 => 4,
        }
    }
}

impl fmt::Display for DesignLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DesignLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DesignLevel::ALL
            .into_iter()
            .find(|l| l.tag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown design level {s:?}")))
    }
}

/// `E[S^k] = k!/(d(d+1)...(d+k-1))` for a `k`-design.
pub fn design_moment(k: u32, d: usize) -> f64 {
    (0..k).map(|j| (j + 1) as f64 / (d as f64 + j as f64)).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridSpec {
    /// `k/(D-1)` for `k = 0..D`.
    Uniform(usize),
    /// `0` followed by `D-1` log-spaced points from `1e-9` to `1`.
    Geometric(usize),
}

impl GridSpec {
    pub fn size(self) -> usize {
        match self {
            GridSpec::Uniform(d) | GridSpec::Geometric(d) => d,
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            GridSpec::Uniform(_) => "uniform",
            GridSpec::Geometric(_) => "geometric",
        }
    }

    /// The grid used for `n` qubits by default.
    pub fn default_for(n: usize, size: usize) -> Self {
        if n <= UNIFORM_GRID_MAX_QUBITS {
            GridSpec::Uniform(size)
        } else {
            GridSpec::Geometric(size)
        }
    }

    pub fn with_size(self, size: usize) -> Self {
        match self {
            GridSpec::Uniform(_) => GridSpec::Uniform(size),
            GridSpec::Geometric(_) => GridSpec::Geometric(size),
        }
    }

    pub fn points(self) -> Result<Vec<f64>> {
        let size = self.size();
        if size < MIN_GRID_SIZE {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {MIN_GRID_SIZE} points (got {size})"
            )));
        }
        let last = (size - 1) as f64;
        Ok(match self {
            GridSpec::Uniform(_) => (0..size).map(|k| k as f64 / last).collect(),
            GridSpec::Geometric(_) => {
                let lo = GEOMETRIC_GRID_FLOOR.log10();
                let steps = (size - 2) as f64;
                std::iter::once(0.0)
                    .chain((0..size - 1).map(|k| {
                        if k == size - 2 {
                            1.0
                        } else {
                            10f64.powf(lo - lo * k as f64 / steps)
                        }
                    }))
                    .collect()
            }
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind(), self.size())
    }
}

fn check_order(order: f64) -> Result<()> {
    if !(order > 1.0 && order < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "Rényi order {order} outside (1, 2)"
        )));
    }
    Ok(())
}

/// Maximize `E[S^α]` over grid measures with the moments fixed by `level`.
pub fn build_moment_lp(d: usize, level: DesignLevel, order: f64, grid: GridSpec) -> Result<LinearProgram> {
    check_order(order)?;
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} < 2")));
    }
    let x = grid.points()?;
    let power = |k: i32| x.iter().map(|v| v.powi(k)).collect::<Vec<f64>>();
    let mut lp = LinearProgram::new(x.iter().map(|v| v.powf(order)).collect());
    for k in 1..=level.equality_order() {
        lp = lp.with_eq(power(k as i32), design_moment(k, d));
    }
    if level == DesignLevel::Stabilizer {
        lp = lp.with_ineq(power(4), stabilizer_fourth_moment_ceiling(d));
    }
    Ok(lp.with_eq(vec![1.0; x.len()], 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertaintyResult {
    pub d: usize,
    pub level: DesignLevel,
    pub renyi_order: f64,
    pub grid: GridSpec,
    pub lambda_alpha: f64,
    /// `log₂(d λ_α)/(1-α)`.
    pub bound_bits: f64,
    /// `log₂ d - bound_bits`.
    pub c_of_d: f64,
    pub support_size: usize,
}

pub fn uncertainty_bound(d: usize, level: DesignLevel, order: f64, grid: GridSpec) -> Result<UncertaintyResult> {
    let lp = build_moment_lp(d, level, order, grid)?;
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::Infeasible(format!(
                "{level} moments at d = {d} cannot be matched on the {grid} grid"
            )))
        }
        LpStatus::Unbounded => return Err(Error::Unbounded),
    }
    let lambda_alpha = sol.value;
    let bound_bits = (d as f64 * lambda_alpha).log2() / (1.0 - order);
    Ok(UncertaintyResult {
        d,
        level,
        renyi_order: order,
        grid,
        lambda_alpha,
        bound_bits,
        c_of_d: (d as f64).log2() - bound_bits,
        support_size: sol.support_size,
    })
}

/// Average-entropy bound `log₂(d+1) - 1` for 2-designs.
pub fn collision_bound(d: usize) -> f64 {
    (d as f64 + 1.0).log2() - 1.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub results: Vec<UncertaintyResult>,
    /// `|λ_fine - λ_coarse|/λ_fine` between consecutive grids.
    pub relative_deltas: Vec<f64>,
}

/// Solves the same LP on every grid size in `sizes`, keeping the grid kind of `grid`.
pub fn grid_refinement(d: usize, level: DesignLevel, order: f64, grid: GridSpec, sizes: &[usize]) -> Result<Refinement> {
    let results = sizes
        .par_iter()
        .map(|&s| uncertainty_bound(d, level, order, grid.with_size(s)))
        .collect::<Result<Vec<_>>>()?;
    let relative_deltas = results
        .windows(2)
        .map(|w| (w[1].lambda_alpha - w[0].lambda_alpha).abs() / w[1].lambda_alpha)
        .collect();
    Ok(Refinement {
        results,
        relative_deltas,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridPolicy {
    /// Uniform up to 9 qubits, geometric above.
    Auto,
    Uniform,
    Geometric,
    /// Both grids at every n.
    Both,
}

impl FromStr for GridPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(GridPolicy::Auto),
            "uniform" => Ok(GridPolicy::Uniform),
            "geometric" => Ok(GridPolicy::Geometric),
            "both" => Ok(GridPolicy::Both),
            other => Err(Error::InvalidArgument(format!("unknown grid policy {other:?}"))),
        }
    }
}

impl GridPolicy {
    pub fn grids(self, n: usize, size: usize) -> Vec<GridSpec> {
        match self {
            GridPolicy::Auto => vec![GridSpec::default_for(n, size)],
            GridPolicy::Uniform => vec![GridSpec::Uniform(size)],
            GridPolicy::Geometric => vec![GridSpec::Geometric(size)],
            GridPolicy::Both => vec![GridSpec::Uniform(size), GridSpec::Geometric(size)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig1Point {
    pub n: usize,
    pub level: DesignLevel,
    pub grid: GridSpec,
    /// `None` when the grid cannot match the moments.
    pub result: Option<UncertaintyResult>,
}

/// Every (n, grid, level) bound of the uncertainty figure for `n = 1..=n_max`.
pub fn fig1(n_max: usize, order: f64, grid_size: usize, policy: GridPolicy) -> Result<Vec<Fig1Point>> {
    if n_max == 0 || n_max > 62 {
        return Err(Error::UnsupportedQubits {
            n: n_max,
            max: 62,
            what: "the uncertainty figure",
        });
    }
    let jobs: Vec<(usize, GridSpec, DesignLevel)> = (1..=n_max)
        .flat_map(|n| {
            policy
                .grids(n, grid_size)
                .into_iter()
                .flat_map(move |g| DesignLevel::ALL.into_iter().map(move |l| (n, g, l)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(n, grid, level)| {
            let result = match uncertainty_bound(1 << n, level, order, grid) {
                Ok(r) => Some(r),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(Fig1Point { n, level, grid, result })
        })
        .collect()
}

fn basis_distribution(basis: &[num_complex::Complex64], rho: &HermitianOperator) -> Vec<f64> {
    let d = rho.dim();
    let mut p: Vec<f64> = basis.chunks_exact(d).map(|b| rho.expectation(b).max(0.0)).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    p
}

/// `(d/N) Σ_k H(B_k|ρ)`: the Shannon entropy averaged over all stabilizer bases.
pub fn average_basis_entropy(orbit: &StabilizerOrbit, rho: &HermitianOperator) -> Result<f64> {
    if rho.dim() != orbit.dim() {
        return Err(Error::DimensionMismatch {
            expected: orbit.dim(),
            actual: rho.dim(),
        });
    }
    check_state(rho)?;
    let total: f64 = (0..orbit.basis_count())
        .into_par_iter()
        .map(|b| shannon_unchecked(&basis_distribution(orbit.basis(b), rho)))
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(total / orbit.basis_count() as f64)
}

/// [`average_basis_entropy`] over a freshly enumerated orbit (n ≤ 3).
pub fn exact_average_entropy(rho: &HermitianOperator) -> Result<f64> {
    let n = rho.qubits()?;
    if n > MAX_EXACT_ENTROPY_QUBITS {
        return Err(Error::UnsupportedQubits {
            n,
            max: MAX_EXACT_ENTROPY_QUBITS,
            what: "exact average entropy",
        });
    }
    average_basis_entropy(&StabilizerOrbit::enumerate(n)?, rho)
}

/// Shannon entropy of the full POVM outcome distribution.
pub fn povm_entropy(povm: &Povm, rho: &HermitianOperator) -> Result<f64> {
    let mut p = povm.probabilities(rho)?;
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    Ok(shannon_unchecked(&p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertaintyConstants {
    pub d: usize,
    /// `log₂ N`, with `N` the number of stabilizer states.
    pub log2_outcomes: f64,
    /// `(1/(128 ln 2))((d-1)/d)²`.
    pub mutual_information_bound: f64,
    /// `log₂ N` minus the bound above.
    pub entropy_ceiling: f64,
    /// `(1/(18 ln 2))((d-1)/d)²`.
    pub design4_comparison: f64,
    /// `(1/(6 ln 2))/(d+1)²`.
    pub design2_comparison: f64,
}

pub fn certainty_constants(d: usize) -> Result<CertaintyConstants> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(d));
    }
    let n = d.trailing_zeros() as usize;
    let log2_outcomes = stabilizer_state_count_log2(n);
    let df = d as f64;
    let shape = ((df - 1.0) / df).powi(2);
    let mi = shape / (128.0 * LN_2);
    Ok(CertaintyConstants {
        d,
        log2_outcomes,
        mutual_information_bound: mi,
        entropy_ceiling: log2_outcomes - mi,
        design4_comparison: shape / (18.0 * LN_2),
        design2_comparison: 1.0 / (6.0 * LN_2 * (df + 1.0).powi(2)),
    })
}

/// Whether `Σ p_x ρ_x = I/d` to `tol`.
pub fn is_isotropic(ensemble: &[(f64, HermitianOperator)], tol: f64) -> Result<bool> {
    let Some((_, first)) = ensemble.first() else {
        return Ok(false);
    };
    let d = first.dim();
    let mut avg = HermitianOperator::zeros(d);
    for (p, rho) in ensemble {
        avg = avg.add(&rho.scale(*p));
    }
    let target = HermitianOperator::identity(d).scale(1.0 / d as f64);
    Ok(avg.matrix().max_abs_diff(target.matrix()) <= tol)
}

/// Shannon mutual information between the ensemble label and the POVM outcome.
pub fn mutual_information(ensemble: &[(f64, HermitianOperator)], povm: &Povm) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    }
    let priors: Vec<f64> = ensemble.iter().map(|(p, _)| *p).collect();
    check_distribution(&priors)?;
    let outcome_dists = ensemble
        .iter()
        .map(|(_, rho)| {
            let mut q = povm.probabilities(rho)?;
            let total: f64 = q.iter().sum();
            q.iter_mut().for_each(|v| *v /= total);
            Ok(q)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut marginal = vec![0.0; povm.outcome_count()];
    for (p, q) in priors.iter().zip(&outcome_dists) {
        for (m, v) in marginal.iter_mut().zip(q) {
            *m += p * v;
        }
    }
    let conditional: f64 = priors
        .iter()
        .zip(&outcome_dists)
        .map(|(p, q)| p * shannon_unchecked(q))
        .sum();
    Ok((shannon_unchecked(&marginal) - conditional).max(0.0))
}

/// Largest n for which an exact stabilizer POVM can be built.
pub fn max_exact_povm_qubits() -> usize {
    MAX_STABILIZER_QUBITS
}

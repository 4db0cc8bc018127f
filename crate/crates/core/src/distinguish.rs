//! Clifford-orbit POVMs, their ℓ1 images and the distinguishability bounds.
//!
//! A POVM with elements `(d/N)|x_k><x_k|` maps a Hermitian `X` to the vector
//! of `(d/N)<x_k|X|x_k>`; its ℓ1 norm is `d·E|S_X|` with `S_X` uniform over
//! the orbit.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::clifford::{clifford_apply, clifford_group, sample_clifford};
use crate::error::{Error, Result};
use crate::fiducial::{
    alpha, beta, characteristic_of_state, effective_rank, make_fiducial, typical_alpha_threshold,
    FiducialKind,
};
use crate::moments::{MomentReport, PowerSums};
use crate::operator::{HermitianOperator, PureState};
use crate::random::{random_pure_state, stream_rng};
use crate::stabilizer::StabilizerOrbit;

pub const MIN_MC_SAMPLES: usize = 1000;

/// Tolerance for accepting an operator as a density matrix.
pub const STATE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PovmMode {
    EnumeratedStabilizer,
    MonteCarloOrbit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PovmSpec {
    pub mode: PovmMode,
    pub fiducial: FiducialKind,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl PovmSpec {
    pub fn stabilizer(n: usize) -> Self {
        Self {
            mode: PovmMode::EnumeratedStabilizer,
            fiducial: FiducialKind::StabilizerBasisState,
            n,
            samples: 0,
            seed: 0,
        }
    }

    pub fn monte_carlo(n: usize, fiducial: FiducialKind, samples: usize, seed: u64) -> Self {
        Self {
            mode: PovmMode::MonteCarloOrbit,
            fiducial,
            n,
            samples,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiasEstimate {
    pub value: f64,
    /// Zero for exact evaluations.
    pub std_error: f64,
    pub samples_used: usize,
}

#[derive(Clone, Debug)]
enum Elements {
    Stabilizer(StabilizerOrbit),
    /// Orbit vectors listed with multiplicity; exact if the list is a full group orbit.
    Listed { amplitudes: Vec<Complex64>, exact: bool },
}

#[derive(Clone, Debug)]
pub struct Povm {
    n: usize,
    elements: Elements,
}

impl Povm {
    pub fn build(spec: &PovmSpec, cache_dir: Option<&Path>) -> Result<Self> {
        match spec.mode {
            PovmMode::EnumeratedStabilizer => {
                if spec.fiducial != FiducialKind::StabilizerBasisState {
                    return Err(Error::InvalidArgument(
                        "enumerated mode is only available for the stabilizer orbit".into(),
                    ));
                }
                let orbit = match cache_dir {
                    Some(dir) => StabilizerOrbit::cached(spec.n, dir)?,
                    None => StabilizerOrbit::enumerate(spec.n)?,
                };
                Ok(Self::from_orbit(orbit))
            }
            PovmMode::MonteCarloOrbit => {
                if spec.samples < MIN_MC_SAMPLES {
                    return Err(Error::InvalidArgument(format!(
                        "Monte-Carlo mode needs at least {MIN_MC_SAMPLES} samples (got {})",
                        spec.samples
                    )));
                }
                let z = make_fiducial(&spec.fiducial, spec.n)?;
                Self::sampled(&z, spec.samples, spec.seed)
            }
        }
    }

    pub fn from_orbit(orbit: StabilizerOrbit) -> Self {
        Self {
            n: orbit.qubits(),
            elements: Elements::Stabilizer(orbit),
        }
    }

    /// `C_i |z>` for `samples` uniform Cliffords; sample `i` uses stream `i` of `seed`.
    pub fn sampled(z: &PureState, samples: usize, seed: u64) -> Result<Self> {
        let n = z.qubits()?;
        let per_sample: Vec<Result<PureState>> = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, i);
                clifford_apply(&sample_clifford(n, &mut rng)?, z)
            })
            .collect();
        let mut amplitudes = Vec::with_capacity(samples << n);
        for s in per_sample {
            amplitudes.extend_from_slice(s?.amplitudes());
        }
        Ok(Self {
            n,
            elements: Elements::Listed {
                amplitudes,
                exact: false,
            },
        })
    }

    /// The orbit of `z` under every element of the Clifford group (n ≤ 2), with multiplicity.
    pub fn full_group_orbit(z: &PureState) -> Result<Self> {
        let n = z.qubits()?;
        let mut amplitudes = Vec::new();
        for c in clifford_group(n)? {
            amplitudes.extend_from_slice(clifford_apply(&c, z)?.amplitudes());
        }
        Ok(Self {
            n,
            elements: Elements::Listed {
                amplitudes,
                exact: true,
            },
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn amplitudes(&self) -> &[Complex64] {
        match &self.elements {
            Elements::Stabilizer(o) => o.amplitudes(),
            Elements::Listed { amplitudes, .. } => amplitudes,
        }
    }

    pub fn outcome_count(&self) -> usize {
        self.amplitudes().len() / self.dim()
    }

    pub fn is_exact(&self) -> bool {
        match &self.elements {
            Elements::Stabilizer(_) => true,
            Elements::Listed { exact, .. } => *exact,
        }
    }

    pub fn stabilizer_orbit(&self) -> Option<&StabilizerOrbit> {
        match &self.elements {
            Elements::Stabilizer(o) => Some(o),
            Elements::Listed { .. } => None,
        }
    }

    fn check_dim(&self, x: &HermitianOperator) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim(),
            });
        }
        Ok(())
    }

    /// `<x_k|X|x_k>` for every element, in order.
    pub fn values(&self, x: &HermitianOperator) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self
            .amplitudes()
            .par_chunks_exact(self.dim())
            .map(|s| x.expectation(s))
            .collect())
    }

    pub fn moments(&self, x: &HermitianOperator) -> Result<MomentReport> {
        MomentReport::from_samples(&self.values(x)?)
    }

    /// `‖M(X)‖_ℓ1`, with a standard error for sampled orbits.
    pub fn image_l1(&self, x: &HermitianOperator) -> Result<BiasEstimate> {
        let values = self.values(x)?;
        let d = self.dim() as f64;
        let count = values.len();
        let mean = values.iter().map(|v| v.abs()).sum::<f64>() / count as f64;
        let std_error = if self.is_exact() {
            0.0
        } else {
            let var = values.iter().map(|v| (v.abs() - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            d * (var / count as f64).sqrt()
        };
        Ok(BiasEstimate {
            value: d * mean,
            std_error,
            samples_used: count,
        })
    }

    /// Outcome distribution `(d/N)<x_k|ρ|x_k>`.
    pub fn probabilities(&self, rho: &HermitianOperator) -> Result<Vec<f64>> {
        check_state(rho)?;
        let scale = self.dim() as f64 / self.outcome_count() as f64;
        Ok(self.values(rho)?.into_iter().map(|v| (v * scale).max(0.0)).collect())
    }
}

pub fn povm_image_l1(spec: &PovmSpec, x: &HermitianOperator) -> Result<BiasEstimate> {
    Povm::build(spec, None)?.image_l1(x)
}

/// Checks that `rho` is positive semidefinite with unit trace.
pub fn check_state(rho: &HermitianOperator) -> Result<()> {
    let t = rho.trace();
    if (t - 1.0).abs() > STATE_TOL {
        return Err(Error::NotAState(format!("trace {t}")));
    }
    let min = rho.eigenvalues().first().copied().unwrap_or(0.0);
    if min < -STATE_TOL {
        return Err(Error::NotAState(format!("negative eigenvalue {min}")));
    }
    Ok(())
}

/// `(1/2)‖τρ - (1-τ)σ‖_1`.
pub fn helstrom_bias(tau: f64, rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(format!("prior {tau} outside [0, 1]")));
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    check_state(rho)?;
    check_state(sigma)?;
    let x = rho.scale(tau).sub(&sigma.scale(1.0 - tau));
    Ok(0.5 * x.spectrum().trace_norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `r_eff(X) ≤ 1/(dα)`: the bound behaves like `1/(4√r_eff)`.
    Good,
    /// Otherwise `1/(4 r_eff √(dα))`.
    Bad,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MainBound {
    /// Lower bound on `‖M(X)‖_ℓ1 / ‖X‖_1`.
    pub ratio: f64,
    pub r_eff: f64,
    pub regime: Regime,
    /// The weaker regime-specific ratio.
    pub regime_ratio: f64,
    /// Exact `κ(X, z)`; `‖M(X)‖_ℓ1 ≥ ‖X‖_2 / √κ`.
    pub kappa: f64,
    /// `6 d α r_eff + 10`, the upper bound on `κ` behind `ratio`.
    pub kappa_bound: f64,
}

/// `κ(X, z)` from the fourth-moment bound:
/// `[6(d+1)²/(d+2)·|α-β|·‖X‖₁²‖X‖₂⁴ + 24(d+1)/(d+4)·‖X‖₂²·tr(P_Sym⁴ X^{⊗4})] / (‖X‖₂² + tr(X)²)³`.
pub fn kappa(x: &HermitianOperator, alpha_val: f64) -> Result<f64> {
    let d = x.dim();
    let b = beta(alpha_val, d)?;
    let spec = x.spectrum();
    let p = PowerSums::from_eigenvalues(spec.eigenvalues());
    if p.p2 == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let df = d as f64;
    let l1 = spec.trace_norm();
    let num = 6.0 * (df + 1.0).powi(2) / (df + 2.0) * (alpha_val - b).abs() * l1 * l1 * p.p2 * p.p2
        + 24.0 * (df + 1.0) / (df + 4.0) * p.p2 * p.psym4();
    Ok(num / (p.p2 + p.p1 * p.p1).powi(3))
}

pub fn bound_main(x: &HermitianOperator, alpha_val: f64) -> Result<MainBound> {
    let d = x.dim() as f64;
    let r = effective_rank(x)?;
    let k = kappa(x, alpha_val)?;
    let kappa_bound = 6.0 * d * alpha_val * r + 10.0;
    let (regime, regime_ratio) = if r <= 1.0 / (d * alpha_val) {
        (Regime::Good, 1.0 / (4.0 * r.sqrt()))
    } else {
        (Regime::Bad, 1.0 / (4.0 * r * (d * alpha_val).sqrt()))
    };
    Ok(MainBound {
        ratio: 1.0 / (kappa_bound * r).sqrt(),
        r_eff: r,
        regime,
        regime_ratio,
        kappa: k,
        kappa_bound,
    })
}

/// `‖X‖_2 / (√κ ‖X‖_1)`: the sharper ratio before bounding `κ`.
pub fn kappa_ratio(x: &HermitianOperator, alpha_val: f64) -> Result<f64> {
    let spec = x.spectrum();
    Ok(spec.hs_norm_sq().sqrt() / (kappa(x, alpha_val)?.sqrt() * spec.trace_norm()))
}

/// Lower bound `‖X‖_1 / √(22 r_eff(X))` for fiducials with `α ≤ 6/((d+3)d)`.
pub fn bound_typical(x: &HermitianOperator) -> Result<f64> {
    Ok(1.0 / (22.0 * effective_rank(x)?).sqrt())
}

/// Pure-state constant of the stabilizer (and any) Clifford POVM.
pub const PURE_PAIR_CONSTANT: f64 = 1.0 / 6.0;

/// The weaker pure-pair constant obtained from `κ ≤ 44`.
pub fn pure_pair_kappa_constant() -> f64 {
    1.0 / 44f64.sqrt()
}

/// `(‖Ξ(|z><z|)‖_ℓ1 - 1)/((d+1)(d-1))`, equal to `‖M(W)‖_ℓ1/‖W‖_1` for every Pauli `W ≠ I`.
pub fn bound_converse_pauli(z: &PureState) -> Result<f64> {
    let xi = characteristic_of_state(z)?;
    let norm = crate::operator::l2_norm(z.amplitudes());
    if (norm - 1.0).abs() > crate::operator::STRUCTURE_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let d = z.dim() as f64;
    Ok((xi.lp_norm(1.0) - 1.0) / ((d + 1.0) * (d - 1.0)))
}

/// Lower bound on the converse constant through α: `(√(d/α) - 1)/((d+1)(d-1))`.
pub fn converse_lower_from_alpha(alpha_val: f64, d: usize) -> f64 {
    let df = d as f64;
    ((df / alpha_val).sqrt() - 1.0) / ((df + 1.0) * (df - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourDesignBound {
    pub rank: usize,
    /// `c` in `‖M(X)‖_ℓ1 ≥ c ‖X‖_1 / √rank(X)`.
    pub constant: f64,
    /// `c / √rank(X)`.
    pub ratio: f64,
}

/// 4-design POVM bound: `0.32/√rank`, `1/√6.06` for rank two and `1/(2√3)`
/// (as a ratio) for traceless rank two.
pub fn bound_4design(x: &HermitianOperator) -> Result<FourDesignBound> {
    let spec = x.spectrum();
    let rank = spec.rank();
    if rank == 0 {
        return Err(Error::ZeroOperator);
    }
    let sqrt_rank = (rank as f64).sqrt();
    let constant = if rank == 2 {
        let traceless = spec.trace().abs() <= 1e-10 * spec.trace_norm();
        if traceless {
            sqrt_rank / (2.0 * 3f64.sqrt())
        } else {
            1.0 / 6.06f64.sqrt()
        }
    } else {
        0.32
    };
    Ok(FourDesignBound {
        rank,
        constant,
        ratio: constant / sqrt_rank,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaBounds {
    pub lower: f64,
    pub upper: Option<f64>,
}

/// Published bounds on the POVM norm constant λ for the supported orbits.
pub fn lambda_summary(kind: &FiducialKind, d: usize) -> Result<LambdaBounds> {
    let df = d as f64;
    match kind {
        FiducialKind::StabilizerBasisState => Ok(LambdaBounds {
            lower: 1.0 / (6f64.sqrt() * df),
            upper: Some(1.0 / (df + 1.0)),
        }),
        FiducialKind::MagicProduct => Ok(LambdaBounds {
            lower: 1.0 / (4.0 * df.powf(0.71)),
            upper: Some(1.0 / df.powf(0.55)),
        }),
        FiducialKind::HaarRandom { .. } => Ok(LambdaBounds {
            lower: 1.0 / (22.0 * df).sqrt(),
            upper: None,
        }),
        FiducialKind::ExplicitVector(_) => Err(Error::InvalidArgument(
            "λ bounds are only tabulated for stabilizer, magic and typical fiducials".into(),
        )),
    }
}

/// `λ ≥ 1/√(d(6d²α + 10))` for any fiducial.
pub fn lambda_lower_generic(alpha_val: f64, d: usize) -> f64 {
    let df = d as f64;
    1.0 / (df * (6.0 * df * df * alpha_val + 10.0)).sqrt()
}

/// Whether a Haar fiducial falls under the typical-fiducial bound.
pub fn is_typical(z: &PureState) -> Result<bool> {
    Ok(alpha(z)? <= typical_alpha_threshold(z.dim()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurePairSearch {
    pub pairs: usize,
    pub min_ratio: f64,
    pub mean_ratio: f64,
}

/// Estimates the pure-pair restricted norm constant of an exact POVM by
/// minimizing `‖M(ρ-σ)‖_ℓ1/‖ρ-σ‖_1` over random pairs, orthogonal pairs and
/// nearly parallel pairs.
pub fn pure_pair_search(povm: &Povm, random_pairs: usize, seed: u64) -> Result<PurePairSearch> {
    let d = povm.dim();
    let ratios: Vec<f64> = (0..random_pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let psi = random_pure_state(d, &mut rng);
            let phi = match i % 3 {
                0 => random_pure_state(d, &mut rng),
                1 => orthogonal_to(&psi, &mut rng),
                _ => {
                    let eps = 10f64.powf(-rng.random_range(1.0..4.0));
                    let noise = random_pure_state(d, &mut rng);
                    let v = psi
                        .amplitudes()
                        .iter()
                        .zip(noise.amplitudes())
                        .map(|(a, b)| a + b * eps)
                        .collect();
                    PureState::normalized(v).expect("nonzero")
                }
            };
            let x = HermitianOperator::projector(&psi).sub(&HermitianOperator::projector(&phi));
            let l1 = x.spectrum().trace_norm();
            povm.image_l1(&x).map(|b| b.value / l1)
        })
        .collect::<Result<Vec<f64>>>()?;
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    Ok(PurePairSearch {
        pairs: ratios.len(),
        min_ratio,
        mean_ratio,
    })
}

fn orthogonal_to<R: Rng + ?Sized>(psi: &PureState, rng: &mut R) -> PureState {
    let v = random_pure_state(psi.dim(), rng);
    let overlap = psi.inner(&v);
    let w = v
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(b, a)| b - a * overlap)
        .collect();
    PureState::normalized(w).expect("generic vector is not parallel")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{berger_bound, clifford_fourth_moment, design_fourth_moment, second_moment};
    use crate::pauli::all_paulis;
    use crate::random::{random_hermitian, random_hermitian_with_rank};

    fn stabilizer_povm(n: usize) -> Povm {
        Povm::build(&PovmSpec::stabilizer(n), None).unwrap()
    }

    #[test]
    fn identity_image_is_dimension() {
        for n in 1..=3 {
            let povm = stabilizer_povm(n);
            let d = povm.dim();
            let b = povm.image_l1(&HermitianOperator::identity(d)).unwrap();
            assert!((b.value - d as f64).abs() < 1e-12);
            assert_eq!(b.std_error, 0.0);
        }
    }

    #[test]
    fn single_qubit_z_image() {
        let z = crate::pauli::PauliOperator::new(1, 0, 1).unwrap().matrix();
        let b = stabilizer_povm(1).image_l1(&z).unwrap();
        assert!((b.value - 2.0 / 3.0).abs() < 1e-14);
        let conv = bound_converse_pauli(&PureState::basis(2, 0)).unwrap();
        assert!((conv - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn converse_is_an_equality_for_every_orbit() {
        let mut rng = stream_rng(11, 0);
        let fiducials = [
            make_fiducial(&FiducialKind::StabilizerBasisState, 2).unwrap(),
            make_fiducial(&FiducialKind::MagicProduct, 2).unwrap(),
            random_pure_state(4, &mut rng),
        ];
        for z in &fiducials {
            let povm = Povm::full_group_orbit(z).unwrap();
            let c = bound_converse_pauli(z).unwrap();
            for w in all_paulis(2).skip(1) {
                let image = povm.image_l1(&w.matrix()).unwrap().value;
                assert!((image / 4.0 - c).abs() < 1e-10, "{w}");
            }
            let d = 4.0;
            assert!(c >= 1.0 / (d + 1.0) - 1e-12 && c <= 1.0 / (d + 1.0f64).sqrt() + 1e-12);
            assert!(c >= converse_lower_from_alpha(alpha(z).unwrap(), 4) - 1e-12);
        }
    }

    #[test]
    fn stabilizer_converse_matches_effective_rank_form() {
        for n in 1..=3 {
            let povm = stabilizer_povm(n);
            let d = povm.dim() as f64;
            for w in all_paulis(n).skip(1) {
                let m = w.matrix();
                let image = povm.image_l1(&m).unwrap().value;
                let r = effective_rank(&m).unwrap();
                assert!((image - d / (d + 1.0) * d / r).abs() < 1e-10);
                assert!((image / d - 1.0 / (d + 1.0)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn group_orbit_matches_fourth_moment_formula_for_any_fiducial() {
        let mut rng = stream_rng(12, 0);
        for n in 1..=2 {
            let d = 1usize << n;
            let z = random_pure_state(d, &mut rng);
            let povm = Povm::full_group_orbit(&z).unwrap();
            let a = alpha(&z).unwrap();
            for _ in 0..3 {
                let x = random_hermitian(d, &mut rng);
                let m = povm.moments(&x).unwrap();
                assert!((m.m4 / clifford_fourth_moment(&x, a).unwrap() - 1.0).abs() < 1e-9);
                assert!((m.m2 / second_moment(&x) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn main_bound_holds_on_exact_orbits() {
        let mut rng = stream_rng(13, 0);
        let magic = make_fiducial(&FiducialKind::MagicProduct, 2).unwrap();
        let haar = random_pure_state(4, &mut rng);
        let cases = [
            (stabilizer_povm(2), 0.25),
            (Povm::full_group_orbit(&magic).unwrap(), alpha(&magic).unwrap()),
            (Povm::full_group_orbit(&haar).unwrap(), alpha(&haar).unwrap()),
        ];
        for (povm, a) in &cases {
            for rank in 1..=4 {
                let x = random_hermitian_with_rank(4, rank, &mut rng);
                let image = povm.image_l1(&x).unwrap().value;
                let l1 = x.spectrum().trace_norm();
                let b = bound_main(&x, *a).unwrap();
                assert!(image / l1 >= kappa_ratio(&x, *a).unwrap() - 1e-12);
                assert!(kappa_ratio(&x, *a).unwrap() >= b.ratio - 1e-12);
                assert!(b.kappa <= b.kappa_bound + 1e-12);
                assert!(b.ratio >= b.regime_ratio - 1e-12);
            }
        }
    }

    #[test]
    fn main_bound_special_values() {
        let x = HermitianOperator::projector(&PureState::basis(2, 0));
        let b = bound_main(&x, 0.5).unwrap();
        assert!((b.ratio - 0.25).abs() < 1e-14);
        assert_eq!(b.regime, Regime::Good);
        // stabilizer α = 1/d: regime ratio is 1/(4 r_eff) beyond rank one
        let x = HermitianOperator::identity(4);
        let b = bound_main(&x, 0.25).unwrap();
        assert_eq!(b.regime, Regime::Bad);
        assert!((b.regime_ratio - 1.0 / 16.0).abs() < 1e-14);
        assert!(bound_main(&HermitianOperator::zeros(2), 0.5).is_err());
    }

    #[test]
    fn four_design_constants_follow_from_exact_design_moments() {
        let mut rng = stream_rng(14, 0);
        for d in [2usize, 4, 8, 16] {
            for rank in [1usize, 2, 3] {
                if rank > d {
                    continue;
                }
                for traceless in [false, true] {
                    let x = if traceless && rank == 2 {
                        let s: f64 = rng.random_range(0.5..2.0);
                        crate::random::hermitian_from_spectrum(&[s, -s], d, &mut rng)
                    } else {
                        random_hermitian_with_rank(d, rank, &mut rng)
                    };
                    let bound = bound_4design(&x).unwrap();
                    let mean_abs = berger_bound(second_moment(&x), design_fourth_moment(&x)).unwrap();
                    let ratio = d as f64 * mean_abs / x.spectrum().trace_norm();
                    assert!(ratio > bound.ratio, "d={d} rank={rank}: {ratio} vs {}", bound.ratio);
                }
            }
        }
        let p = HermitianOperator::projector(&PureState::basis(4, 0));
        assert_eq!(bound_4design(&p).unwrap().constant, 0.32);
        let mixed = HermitianOperator::from_real_diagonal(&[0.7, 0.3, 0.0, 0.0]);
        assert!(bound_4design(&mixed).unwrap().constant > 0.4);
        let z = HermitianOperator::from_real_diagonal(&[1.0, -1.0, 0.0, 0.0]);
        assert!((bound_4design(&z).unwrap().ratio - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn helstrom_cases() {
        let r0 = HermitianOperator::projector(&PureState::basis(2, 0));
        let r1 = HermitianOperator::projector(&PureState::basis(2, 1));
        assert!((helstrom_bias(0.5, &r0, &r1).unwrap() - 0.5).abs() < 1e-14);
        assert!(helstrom_bias(0.5, &r0, &r0).unwrap().abs() < 1e-14);
        for d in [2usize, 4, 8] {
            let phi = HermitianOperator::projector(&PureState::basis(d, 0));
            let mixed = HermitianOperator::identity(d).scale(1.0 / d as f64);
            let expected = (d as f64 - 1.0) / (2.0 * d as f64);
            assert!((helstrom_bias(0.5, &phi, &mixed).unwrap() - expected).abs() < 1e-12);
        }
        assert!(helstrom_bias(1.5, &r0, &r1).is_err());
        let not_state = HermitianOperator::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(helstrom_bias(0.5, &not_state, &r1), Err(Error::NotAState(_))));
    }

    #[test]
    fn contractive_on_exact_orbits() {
        let mut rng = stream_rng(15, 0);
        let povm = stabilizer_povm(3);
        for _ in 0..20 {
            let x = random_hermitian(8, &mut rng);
            assert!(povm.image_l1(&x).unwrap().value <= x.spectrum().trace_norm() + 1e-12);
        }
    }

    #[test]
    fn monte_carlo_agrees_with_enumeration() {
        let exact = stabilizer_povm(2);
        let spec = PovmSpec::monte_carlo(2, FiducialKind::StabilizerBasisState, 100_000, 99);
        let mc = Povm::build(&spec, None).unwrap();
        let mut rng = stream_rng(16, 0);
        let psi = random_pure_state(4, &mut rng);
        let phi = random_pure_state(4, &mut rng);
        let x = HermitianOperator::projector(&psi).sub(&HermitianOperator::projector(&phi));
        let e = exact.image_l1(&x).unwrap();
        let m = mc.image_l1(&x).unwrap();
        assert_eq!(m.samples_used, 100_000);
        assert!(m.std_error > 0.0);
        assert!((e.value - m.value).abs() < 4.0 * m.std_error, "{} vs {} ± {}", e.value, m.value, m.std_error);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_validated() {
        let spec = PovmSpec::monte_carlo(2, FiducialKind::MagicProduct, 1000, 5);
        let a = Povm::build(&spec, None).unwrap();
        let b = Povm::build(&spec, None).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        let few = PovmSpec::monte_carlo(2, FiducialKind::MagicProduct, 999, 5);
        assert!(Povm::build(&few, None).is_err());
        let bad = PovmSpec {
            fiducial: FiducialKind::MagicProduct,
            ..PovmSpec::stabilizer(2)
        };
        assert!(Povm::build(&bad, None).is_err());
        assert!(a.image_l1(&HermitianOperator::identity(8)).is_err());
    }

    #[test]
    fn pure_pairs_meet_one_sixth() {
        let povm = stabilizer_povm(2);
        let s = pure_pair_search(&povm, 300, 17).unwrap();
        assert!(s.min_ratio >= PURE_PAIR_CONSTANT);
        assert!(PURE_PAIR_CONSTANT > pure_pair_kappa_constant());
    }

    #[test]
    fn lambda_tables() {
        let s = lambda_summary(&FiducialKind::StabilizerBasisState, 2).unwrap();
        assert!((s.lower - 1.0 / (2.0 * 6f64.sqrt())).abs() < 1e-15);
        assert_eq!(s.upper, Some(1.0 / 3.0));
        let m = lambda_summary(&FiducialKind::MagicProduct, 8).unwrap();
        assert!((m.lower - 1.0 / (4.0 * 8f64.powf(0.71))).abs() < 1e-15);
        let t = lambda_summary(&FiducialKind::HaarRandom { seed: 1 }, 8).unwrap();
        assert!((t.lower - 1.0 / 176f64.sqrt()).abs() < 1e-15);
        assert!(t.upper.is_none());
        let explicit = FiducialKind::ExplicitVector(PureState::basis(2, 0));
        assert!(lambda_summary(&explicit, 2).is_err());
        // stabilizer: generic lower bound reads 1/√(d(6d+10))
        assert!((lambda_lower_generic(0.25, 4) - 1.0 / (4.0f64 * 34.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stabilizer_pauli_images_attain_lambda_upper_bound() {
        for n in 1..=3 {
            let povm = stabilizer_povm(n);
            let d = povm.dim();
            let w = all_paulis(n).nth(1).unwrap().matrix();
            let ratio = povm.image_l1(&w).unwrap().value / d as f64;
            let b = lambda_summary(&FiducialKind::StabilizerBasisState, d).unwrap();
            assert!((ratio - b.upper.unwrap()).abs() < 1e-12);
            assert!(ratio >= b.lower);
        }
    }
}

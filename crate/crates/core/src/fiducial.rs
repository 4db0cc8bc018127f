//! Fiducial states, characteristic functions and the localization measure α.

use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, PureState, STRUCTURE_TOL};
use crate::pauli::all_paulis;
use crate::random::random_pure_state;

/// Pauli expectation values `tr(W_k X)` in Pauli index order.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicVector {
    values: Vec<f64>,
}

impl CharacteristicVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `||Ξ||_p`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_norm_pow(p).powf(1.0 / p)
    }

    /// `||Ξ||_p^p`.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        self.values.iter().map(|v| v.abs().powf(p)).sum()
    }

    /// Entries with `|value| > tol`.
    pub fn support_size(&self, tol: f64) -> usize {
        self.values.iter().filter(|v| v.abs() > tol).count()
    }
}

/// `Ξ(X)_k = tr(W_k X)`.
pub fn characteristic_function(op: &HermitianOperator) -> Result<CharacteristicVector> {
    let n = op.qubits()?;
    let defect = op.matrix().hermiticity_defect();
    if defect > STRUCTURE_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(CharacteristicVector {
        values: all_paulis(n).map(|p| p.trace_with(op)).collect(),
    })
}

/// `Ξ(|z><z|)`, computed directly from the amplitudes.
pub fn characteristic_of_state(z: &PureState) -> Result<CharacteristicVector> {
    let n = z.qubits()?;
    Ok(CharacteristicVector {
        values: all_paulis(n).map(|p| p.expectation(z.amplitudes())).collect(),
    })
}

/// Admissible range `[2/(d(d+1)), 1/d]` of α.
pub fn alpha_range(d: usize) -> (f64, f64) {
    let df = d as f64;
    (2.0 / (df * (df + 1.0)), 1.0 / df)
}

/// `α(z) = ||Ξ(|z><z|)||_4^4 / d^2`.
pub fn alpha(z: &PureState) -> Result<f64> {
    let norm = crate::operator::l2_norm(z.amplitudes());
    if (norm - 1.0).abs() > STRUCTURE_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let xi = characteristic_of_state(z)?;
    let d = z.dim() as f64;
    Ok(xi.lp_norm_pow(4.0) / (d * d))
}

fn check_alpha(alpha_val: f64, d: usize) -> Result<()> {
    let (lo, hi) = alpha_range(d);
    let slack = 1e-12 * hi;
    if !(alpha_val.is_finite() && alpha_val >= lo - slack && alpha_val <= hi + slack) || d < 2 {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha_val,
            lo,
            hi,
            d,
        });
    }
    Ok(())
}

/// `β = 4(1 - α) / ((d+4)(d-1))`, the weight of the complement projector.
pub fn beta(alpha_val: f64, d: usize) -> Result<f64> {
    check_alpha(alpha_val, d)?;
    let df = d as f64;
    Ok(4.0 * (1.0 - alpha_val) / ((df + 4.0) * (df - 1.0)))
}

/// α of fiducials whose Clifford orbit is a 4-design.
pub fn four_design_alpha(d: usize) -> f64 {
    let df = d as f64;
    4.0 / (df * (df + 3.0))
}

/// Threshold `6/((d+3)d)` satisfied by typical Haar-random fiducials.
pub fn typical_alpha_threshold(d: usize) -> f64 {
    let df = d as f64;
    6.0 / ((df + 3.0) * df)
}

/// `r_eff(X) = ||X||_1^2 / ||X||_2^2`.
pub fn effective_rank(op: &HermitianOperator) -> Result<f64> {
    let spec = op.spectrum();
    let hs = spec.hs_norm_sq();
    if hs == 0.0 || op.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let t = spec.trace_norm();
    Ok(t * t / hs)
}

/// Which fiducial vector generates a Clifford orbit.
#[derive(Clone, Debug, PartialEq)]
pub enum FiducialKind {
    /// `|0...0>`.
    StabilizerBasisState,
    /// n-fold tensor power of the single-qubit state with Bloch vector `(1,1,1)/√3`.
    MagicProduct,
    /// Haar-random vector drawn from a ChaCha stream seeded with `seed`.
    HaarRandom { seed: u64 },
    /// User-supplied unit vector.
    ExplicitVector(PureState),
}

impl FiducialKind {
    /// Builds a kind from a textual tag, as used on the command line.
    pub fn from_tag(tag: &str, seed: Option<u64>, vector: Option<PureState>) -> Result<Self> {
        match tag {
            "stabilizer" | "stabilizer_basis_state" => Ok(Self::StabilizerBasisState),
            "magic" | "magic_product" => Ok(Self::MagicProduct),
            "haar" | "haar_random" => seed
                .map(|seed| Self::HaarRandom { seed })
                .ok_or(Error::MissingSeed("haar_random fiducial")),
            "explicit" | "explicit_vector" => vector
                .map(Self::ExplicitVector)
                .ok_or_else(|| Error::InvalidArgument("explicit fiducial needs a vector".into())),
            other => Err(Error::InvalidArgument(format!("unknown fiducial kind '{other}'"))),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::StabilizerBasisState => "stabilizer_basis_state",
            Self::MagicProduct => "magic_product",
            Self::HaarRandom { .. } => "haar_random",
            Self::ExplicitVector(_) => "explicit_vector",
        }
    }
}

/// Single-qubit magic state `cos(θ/2)|0> + e^{iπ/4} sin(θ/2)|1>` with `cos θ = 1/√3`.
pub fn magic_qubit() -> PureState {
    let cos_theta = 1.0 / 3f64.sqrt();
    let a = ((1.0 + cos_theta) / 2.0).sqrt();
    let b = ((1.0 - cos_theta) / 2.0).sqrt();
    let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    PureState::normalized(vec![Complex64::new(a, 0.0), phase * b]).expect("nonzero")
}

pub fn make_fiducial(kind: &FiducialKind, n: usize) -> Result<PureState> {
    if n == 0 || n > crate::pauli::MAX_PAULI_QUBITS {
        return Err(Error::UnsupportedQubits {
            n,
            max: crate::pauli::MAX_PAULI_QUBITS,
            what: "fiducial construction",
        });
    }
    let d = 1usize << n;
    match kind {
        FiducialKind::StabilizerBasisState => Ok(PureState::basis(d, 0)),
        FiducialKind::MagicProduct => {
            let q = magic_qubit();
            let mut state = q.clone();
            for _ in 1..n {
                state = state.tensor(&q);
            }
            Ok(state)
        }
        FiducialKind::HaarRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(random_pure_state(d, &mut rng))
        }
        FiducialKind::ExplicitVector(v) => {
            if v.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: v.dim(),
                });
            }
            Ok(v.clone())
        }
    }
}

/// Parses a JSON array of `[re, im]` pairs into a unit vector.
pub fn parse_fiducial_json(text: &str) -> Result<PureState> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)?;
    let amplitudes: Vec<Complex64> = pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    if !amplitudes.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(amplitudes.len()));
    }
    PureState::new(amplitudes)
}

pub fn load_fiducial_file(path: &Path) -> Result<PureState> {
    parse_fiducial_json(&std::fs::read_to_string(path)?)
}

pub fn fiducial_to_json(state: &PureState) -> String {
    let pairs: Vec<[f64; 2]> = state.amplitudes().iter().map(|a| [a.re, a.im]).collect();
    serde_json::to_string(&pairs).expect("finite floats serialize")
}

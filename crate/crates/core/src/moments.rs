//! Moments of `S_X = <x|X|x>` over designs and Clifford orbits.
//!
//! Traces against the symmetric-subspace projector are evaluated by summing
//! `tr(P_π A^{⊗t}) = ∏_cycles tr(A^{|c|})` over the symmetric group, which only
//! needs the power traces `tr(A^k)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fiducial::beta;
use crate::operator::{ComplexMatrix, HermitianOperator, Spectrum};
use crate::pauli::all_paulis;
use crate::stabilizer::StabilizerOrbit;

/// Largest qubit count accepted by [`tr_psym4_q`].
pub const MAX_Q_QUBITS: usize = 4;

/// `(3/5)(7 + 4·2^{1/3} + 3·2^{2/3})`, the sharp constant for the first ratio.
pub fn fourth_moment_constant() -> f64 {
    0.6 * (7.0 + 4.0 * 2f64.cbrt() + 3.0 * 4f64.cbrt())
}

/// `(5/81)(95 + 32√10)`, the rank-2 constant.
pub fn rank_two_constant() -> f64 {
    5.0 / 81.0 * (95.0 + 32.0 * 10f64.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerSums {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl PowerSums {
    pub fn of(x: &HermitianOperator) -> Self {
        let [p1, p2, p3, p4] = x.power_traces();
        Self { p1, p2, p3, p4 }
    }

    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Self {
        let s = |k: i32| eigenvalues.iter().map(|l| l.powi(k)).sum::<f64>();
        Self {
            p1: s(1),
            p2: s(2),
            p3: s(3),
            p4: s(4),
        }
    }

    /// `tr(P_Sym² X^{⊗2})`.
    pub fn psym2(&self) -> f64 {
        (self.p1 * self.p1 + self.p2) / 2.0
    }

    /// `tr(P_Sym⁴ X^{⊗4})`.
    pub fn psym4(&self) -> f64 {
        psym4_from_traces(self.p1, self.p2, self.p3, self.p4)
    }
}

// cycle types of S_4: 1 identity, 6 transpositions, 8 three-cycles,
// 3 double transpositions, 6 four-cycles
fn psym4_from_traces<T>(t1: T, t2: T, t3: T, t4: T) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Div<f64, Output = T>,
{
    (t1 * t1 * t1 * t1 + t1 * t1 * t2 * 6.0 + t1 * t3 * 8.0 + t2 * t2 * 3.0 + t4 * 6.0) / 24.0
}

pub fn tr_psym2(x: &HermitianOperator) -> f64 {
    PowerSums::of(x).psym2()
}

pub fn tr_psym4(x: &HermitianOperator) -> f64 {
    PowerSums::of(x).psym4()
}

fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let d = a.dim();
    let (a, b) = (a.as_slice(), b.as_slice());
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            t += a[i * d + j] * b[j * d + i];
        }
    }
    t
}

/// `tr(P_Sym⁴ Q X^{⊗4})` with `Q = (1/d²) Σ_k W_k^{⊗4}`.
pub fn tr_psym4_q(x: &HermitianOperator) -> Result<f64> {
    let n = x.qubits()?;
    if n > MAX_Q_QUBITS {
        return Err(Error::UnsupportedQubits {
            n,
            max: MAX_Q_QUBITS,
            what: "the Q-projector trace",
        });
    }
    let d = x.dim();
    let mut total = Complex64::new(0.0, 0.0);
    for w in all_paulis(n) {
        // P_Sym⁴ commutes with W^{⊗4}, so each term is tr(P_Sym⁴ (W X)^{⊗4})
        let a = w.matrix().matrix().matmul(x.matrix());
        let a2 = a.matmul(&a);
        let t1 = a.trace();
        let t2 = a2.trace();
        let t3 = trace_of_product(&a2, &a);
        let t4 = trace_of_product(&a2, &a2);
        total += psym4_from_traces(t1, t2, t3, t4);
    }
    Ok(total.re / (d * d) as f64)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `E[S_X²] = (tr(X²) + tr(X)²) / ((d+1)d)` for any 2-design.
pub fn second_moment(x: &HermitianOperator) -> f64 {
    let d = x.dim() as f64;
    let p = PowerSums::of(x);
    (p.p2 + p.p1 * p.p1) / ((d + 1.0) * d)
}

/// `E[S_X^k] = tr(P_Sym^k X^{⊗k}) / binom(d+k-1, k)` for a k-design, k ∈ {2, 4}.
pub fn design_fourth_moment(x: &HermitianOperator) -> f64 {
    tr_psym4(x) / binom(x.dim() + 3, 4)
}

/// Exact fourth moment over the Clifford orbit of a fiducial with
/// localization `alpha_val`:
/// `d·binom(d+2,3)^{-1}·[(α-β)·tr(P_Sym⁴ Q X^{⊗4}) + β·tr(P_Sym⁴ X^{⊗4})]`.
pub fn clifford_fourth_moment(x: &HermitianOperator, alpha_val: f64) -> Result<f64> {
    let d = x.dim();
    let b = beta(alpha_val, d)?;
    let q = tr_psym4_q(x)?;
    let s = tr_psym4(x);
    Ok(d as f64 / binom(d + 2, 3) * ((alpha_val - b) * q + b * s))
}

/// `E[S_φ⁴]` over all stabilizer states for a pure φ with `‖Ξ(φ)‖⁴_{ℓ4} = xi_l4_4`.
pub fn stabilizer_pure_fourth_moment(xi_l4_4: f64, d: usize) -> f64 {
    let d = d as f64;
    6.0 / ((d + 4.0) * (d + 2.0) * (d + 1.0)) * (xi_l4_4 / (d * d) + 4.0 / d)
}

/// Worst case of the above over pure φ: `30 / ((d+4)(d+2)(d+1)d)`.
pub fn stabilizer_fourth_moment_ceiling(d: usize) -> f64 {
    let d = d as f64;
    30.0 / ((d + 4.0) * (d + 2.0) * (d + 1.0) * d)
}

/// `E|S| ≥ √(E[S²]³ / E[S⁴])`.
pub fn berger_bound(m2: f64, m4: f64) -> Result<f64> {
    if m2 < 0.0 || m4 < 0.0 || !m2.is_finite() || !m4.is_finite() {
        return Err(Error::InvalidArgument(format!("moments must be finite and nonnegative (m2 = {m2}, m4 = {m4})")));
    }
    if m4 == 0.0 {
        if m2 == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::InvalidArgument("m4 = 0 with m2 > 0 is not a valid moment pair".into()));
    }
    Ok((m2.powi(3) / m4).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentReport {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub mean_abs: f64,
    pub berger_lower: f64,
}

impl MomentReport {
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("no samples".into()));
        }
        let n = values.len() as f64;
        let mut m = [0.0f64; 5];
        for &v in values {
            let v2 = v * v;
            m[0] += v.abs();
            m[1] += v;
            m[2] += v2;
            m[3] += v2 * v;
            m[4] += v2 * v2;
        }
        let [mean_abs, m1, m2, m3, m4] = m.map(|s| s / n);
        Ok(Self {
            m1,
            m2,
            m3,
            m4,
            mean_abs,
            berger_lower: berger_bound(m2, m4)?,
        })
    }
}

/// `<x_k|X|x_k>` for every enumerated stabilizer state.
pub fn orbit_values(orbit: &StabilizerOrbit, x: &HermitianOperator) -> Result<Vec<f64>> {
    if x.dim() != orbit.dim() {
        return Err(Error::DimensionMismatch {
            expected: orbit.dim(),
            actual: x.dim(),
        });
    }
    Ok(orbit.states().map(|s| x.expectation(s)).collect())
}

pub fn orbit_moments(orbit: &StabilizerOrbit, x: &HermitianOperator) -> Result<MomentReport> {
    MomentReport::from_samples(&orbit_values(orbit, x)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaRatios {
    pub r1: f64,
    pub r2: f64,
    /// Only for rank-2 operators.
    pub r3: Option<f64>,
    pub r4: Option<f64>,
}

pub fn lemma_ratios(x: &HermitianOperator) -> Result<LemmaRatios> {
    lemma_ratios_from_spectrum(&x.spectrum())
}

/// Same as [`lemma_ratios`] from eigenvalues alone, so that very large
/// diagonal families can be evaluated without a dense matrix.
///
/// With `s = tr(X²) + tr(X)²`:
/// `r1 = 24 tr(P X⁴)/s²`, `r2 = 24 tr(P X⁴) tr(X²)/s³`,
/// `r3 = 24 ‖X‖₁² tr(P X⁴)/s³`, `r4 = (6 ‖X‖₁⁴ ‖X‖₂² + 24 ‖X‖₁² tr(P X⁴))/s³`.
pub fn lemma_ratios_from_spectrum(spectrum: &Spectrum) -> Result<LemmaRatios> {
    let ev = spectrum.eigenvalues();
    let p = PowerSums::from_eigenvalues(ev);
    if p.p2 == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let s = p.p2 + p.p1 * p.p1;
    let sym = 24.0 * p.psym4();
    let r1 = sym / (s * s);
    let r2 = sym * p.p2 / s.powi(3);
    let (r3, r4) = if spectrum.rank() == 2 {
        let l1 = spectrum.trace_norm();
        (
            Some(l1 * l1 * sym / s.powi(3)),
            Some((6.0 * l1.powi(4) * p.p2 + l1 * l1 * sym) / s.powi(3)),
        )
    } else {
        (None, None)
    };
    Ok(LemmaRatios { r1, r2, r3, r4 })
}

/// Upper envelope `3 + (6 + 8y - 2y⁴)/(1 + y²)²` of `r1` at `y = |tr X| / ‖X‖₂`.
pub fn r1_envelope(y: f64) -> f64 {
    let y2 = 1.0 + y * y;
    3.0 + (6.0 + 8.0 * y - 2.0 * y.powi(4)) / (y2 * y2)
}

/// Eigenvalues of `diag(ak, -1, ..., -1)` (k copies of -1) with `a` chosen so
/// that `|tr X| / ‖X‖₂ = y`; `r1` approaches [`r1_envelope`] as `k → ∞`.
pub fn near_extremal_spectrum(k: usize, y: f64) -> Result<Vec<f64>> {
    let kf = k as f64;
    if y < 0.0 || y == 1.0 || kf < y * y {
        return Err(Error::InvalidArgument(format!("need y ≥ 0, y ≠ 1, k ≥ y² (k = {k}, y = {y})")));
    }
    let a = (kf + (kf * y * y * (1.0 + kf - y * y)).sqrt()) / (kf * (1.0 - y * y));
    let mut ev = vec![-1.0; k + 1];
    ev[0] = a * kf;
    Ok(ev)
}

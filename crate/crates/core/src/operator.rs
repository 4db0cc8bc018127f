//! Dense complex matrices, Hermitian operators and pure states.
//!
//! All matrices are square and stored row-major. Dimensions never exceed a
//! few dozen, so no sparse or blocked path exists.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute per-entry tolerance for Hermiticity and unit-norm checks.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_REL_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Returns `n` if `dim == 2^n`.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// General square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let dim = columns.len();
        let mut m = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i * dim + j] = *v;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                let dst = &mut out.data[i * d..(i + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "apply dimension mismatch");
        let d = self.dim;
        (0..d)
            .map(|i| {
                self.data[i * d..(i + 1) * d]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let d = a * b;
        let mut out = Self::zeros(d);
        for i in 0..a {
            for j in 0..a {
                let s = self.data[i * a + j];
                if s == ZERO {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out.data[(i * b + k) * d + (j * b + l)] = s * other.data[k * b + l];
                    }
                }
            }
        }
        out
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermiticity, `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let dev = (self.data[i * d + j] - self.data[j * d + i].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// `max |(U† U - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }
}

/// Dense Hermitian operator on `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity to [`STRUCTURE_TOL`] and symmetrizes the entries.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > STRUCTURE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let d = matrix.dim();
        let mut m = matrix;
        for i in 0..d {
            let v = m.get(i, i);
            m.set(i, i, Complex64::new(v.re, 0.0));
            for j in (i + 1)..d {
                let avg = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                m.set(i, j, avg);
                m.set(j, i, avg.conj());
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::new(ComplexMatrix::from_row_major(dim, data)?)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(diag.len());
        for (i, v) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(*v, 0.0));
        }
        Self { matrix: m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// `|psi><psi|`.
    pub fn projector(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        let d = a.len();
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, a[i] * a[j].conj());
            }
        }
        Self { matrix: m }
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn qubits(&self) -> Result<usize> {
        qubits_for_dim(self.dim())
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.get(row, col)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(Complex64::new(factor, 0.0)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.sub(&other.matrix),
        }
    }

    /// `<psi|X|psi>`, real because `X` is Hermitian.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let d = self.dim();
        debug_assert_eq!(psi.len(), d);
        let mut acc = 0.0;
        for i in 0..d {
            let row = &self.matrix.as_slice()[i * d..(i + 1) * d];
            let xi: Complex64 = row.iter().zip(psi).map(|(a, b)| a * b).sum();
            acc += (psi[i].conj() * xi).re;
        }
        acc
    }

    /// Hilbert–Schmidt norm `||X||_2`, from the entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix
            .as_slice()
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.as_slice().iter().all(|v| *v == ZERO)
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| self.get(i, j));
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(self.eigenvalues())
    }

    /// `(tr X, tr X^2, tr X^3, tr X^4)` from dense products.
    pub fn power_traces(&self) -> [f64; 4] {
        let x = &self.matrix;
        let x2 = x.matmul(x);
        let x3 = x2.matmul(x);
        let t4: f64 = {
            // tr(X^4) = ||X^2||_F^2 for Hermitian X
            x2.as_slice().iter().map(|v| v.norm_sqr()).sum()
        };
        [x.trace().re, x2.trace().re, x3.trace().re, t4]
    }
}

/// Eigenvalues of a Hermitian operator together with the norms derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<f64>) -> Self {
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Schatten p-norm, `(sum |λ|^p)^(1/p)`; `p = ∞` gives the operator norm.
    pub fn schatten_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
        }
        self.eigenvalues
            .iter()
            .map(|v| v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.abs()).sum()
    }

    pub fn hs_norm_sq(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v * v).sum()
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn power_sum(&self, k: i32) -> f64 {
        self.eigenvalues.iter().map(|v| v.powi(k)).sum()
    }

    /// Numerical rank: singular values above `RANK_REL_TOL * max`.
    pub fn rank(&self) -> usize {
        let max = self.schatten_norm(f64::INFINITY);
        if max == 0.0 {
            return 0;
        }
        self.eigenvalues
            .iter()
            .filter(|v| v.abs() > RANK_REL_TOL * max)
            .count()
    }
}

/// Unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts only vectors whose Euclidean norm is 1 within [`STRUCTURE_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if amplitudes.is_empty() || (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubits(&self) -> Result<usize> {
        qubits_for_dim(self.dim())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// Tensor product `self ⊗ other`, with `other` on the low-order index bits.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        PureState { amplitudes }
    }
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>` for raw amplitude slices.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

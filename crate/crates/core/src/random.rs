//! Seeded random sampling of states, Hermitian operators and RNG streams.
//!
//! RNGs are always owned by the caller. Parallel Monte-Carlo code derives one
//! ChaCha stream per sample index from a single seed, so results depend only
//! on `(seed, index)` and not on how work is split across threads.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{ComplexMatrix, HermitianOperator, PureState};

/// Independent stream for sample `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random unit vector: normalized i.i.d. complex Gaussian amplitudes.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// GUE-distributed Hermitian matrix `(G + G†) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(i, j, complex_gaussian(rng));
        }
    }
    let h = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
    HermitianOperator::from_matrix_unchecked(h)
}

/// Hermitian matrix `Σ_k λ_k |v_k><v_k|` with `rank` Gaussian eigenvalues on
/// random orthonormal directions.
pub fn random_hermitian_with_rank<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> HermitianOperator {
    let eigenvalues: Vec<f64> = (0..rank).map(|_| rng.sample(StandardNormal)).collect();
    hermitian_from_spectrum(&eigenvalues, dim, rng)
}

/// Hermitian matrix with the given nonzero eigenvalues on random orthonormal directions.
pub fn hermitian_from_spectrum<R: Rng + ?Sized>(
    eigenvalues: &[f64],
    dim: usize,
    rng: &mut R,
) -> HermitianOperator {
    assert!(eigenvalues.len() <= dim);
    let basis = random_orthonormal(dim, eigenvalues.len(), rng);
    let mut m = ComplexMatrix::zeros(dim);
    for (lambda, v) in eigenvalues.iter().zip(&basis) {
        for i in 0..dim {
            for j in 0..dim {
                let cur = m.get(i, j);
                m.set(i, j, cur + v[i] * v[j].conj() * *lambda);
            }
        }
    }
    HermitianOperator::new(m).expect("spectral construction is Hermitian")
}

/// Density matrix of the given rank with Dirichlet-like random weights.
pub fn random_density_matrix<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> HermitianOperator {
    let raw: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    hermitian_from_spectrum(&weights, dim, rng)
}

/// `count` orthonormal vectors via Gram–Schmidt on Gaussian vectors.
pub fn random_orthonormal<R: Rng + ?Sized>(
    dim: usize,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while out.len() < count {
        let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        for u in &out {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|a| *a /= norm);
            out.push(v);
        }
    }
    out
}

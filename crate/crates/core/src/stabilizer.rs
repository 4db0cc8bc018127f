//! Enumeration of all n-qubit stabilizer states, grouped into orthonormal bases.
//!
//! Each maximal isotropic subspace of `F_2^{2n}` is produced once, in reduced
//! echelon form with pivots at the lowest set bit. Its `2^n` sign patterns give
//! one orthonormal basis; state `i` belongs to basis `i / d` and carries sign
//! pattern `i % d` (bit `j` negates generator `j`).

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::clifford::{canonicalize_phase, joint_eigenvector};
use crate::error::{Error, Result};
use crate::operator::{l2_norm, PureState, ZERO};
use crate::pauli::{PauliOperator, Phase};
use crate::symplectic::symplectic_inner;

pub const MAX_STABILIZER_QUBITS: usize = 5;

const CACHE_MAGIC: &[u8; 4] = b"CLFD";
const CACHE_VERSION: u32 = 1;

/// `N = 2^n ∏_{j=1}^n (2^j + 1)`; overflows beyond n = 7.
pub fn stabilizer_state_count(n: usize) -> u64 {
    (1..=n as u32).fold(1u64 << n, |acc, j| acc * ((1u64 << j) + 1))
}

/// `log₂ N` for any n.
pub fn stabilizer_state_count_log2(n: usize) -> f64 {
    n as f64 + (1..=n as i32).map(|j| (2f64.powi(j) + 1.0).log2()).sum::<f64>()
}

/// Maximal isotropic subspaces of `F_2^{2n}`, each as `n` generator rows.
pub fn lagrangian_subspaces(n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut rows = Vec::with_capacity(n);
    extend_subspaces(n, 2 * n, &mut rows, &mut out);
    out
}

// Rows are chosen in decreasing pivot order. A new row with pivot `p` may only
// use positions above `p` that are not pivots of earlier rows.
fn extend_subspaces(n: usize, upper: usize, rows: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    let remaining = n - rows.len();
    if remaining == 0 {
        let mut r = rows.clone();
        r.reverse();
        out.push(r);
        return;
    }
    let pivots: u64 = rows.iter().map(|r| 1u64 << r.trailing_zeros()).fold(0, |a, b| a | b);
    for p in (remaining - 1)..upper {
        let free: Vec<usize> = ((p + 1)..2 * n).filter(|&q| pivots >> q & 1 == 0).collect();
        for mask in 0u64..(1 << free.len()) {
            let mut row = 1u64 << p;
            for (i, &q) in free.iter().enumerate() {
                row |= (mask >> i & 1) << q;
            }
            if rows.iter().all(|&r| symplectic_inner(r, row) == 0) {
                rows.push(row);
                extend_subspaces(n, p, rows, out);
                rows.pop();
            }
        }
    }
}

/// For isotropic generators `g_j`, vectors `h_i` with `<h_i, g_j> = δ_ij`.
fn destabilizers(n: usize, gens: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; gens.len()];
    let mut found = 0;
    for v in 1u64..(1 << (2 * n)) {
        let syndrome: u32 = gens
            .iter()
            .enumerate()
            .map(|(j, &g)| symplectic_inner(v, g) << j)
            .sum();
        if syndrome.is_power_of_two() {
            let i = syndrome.trailing_zeros() as usize;
            if out[i] == 0 {
                out[i] = v;
                found += 1;
                if found == gens.len() {
                    break;
                }
            }
        }
    }
    out
}

/// The `d` states of one basis: column `s` is stabilized by `(-1)^{s_j} W(g_j)`.
fn basis_states(n: usize, gens: &[u64]) -> Vec<Complex64> {
    let d = 1usize << n;
    let signed: Vec<(PauliOperator, bool)> = gens
        .iter()
        .map(|&g| (PauliOperator::from_symplectic(n, g), false))
        .collect();
    let psi0 = joint_eigenvector(&signed, d);
    let flips: Vec<PauliOperator> = destabilizers(n, gens)
        .into_iter()
        .map(|h| PauliOperator::from_symplectic(n, h))
        .collect();
    let mut out = vec![ZERO; d * d];
    out[..d].copy_from_slice(&psi0);
    for s in 1..d {
        let j = s.trailing_zeros() as usize;
        let prev = s & (s - 1);
        let (done, rest) = out.split_at_mut(s * d);
        let target = &mut rest[..d];
        flips[j].apply_into(&done[prev * d..(prev + 1) * d], target);
        let norm = l2_norm(target);
        canonicalize_phase(target, norm);
    }
    out
}

#[derive(Clone, Debug)]
pub struct StabilizerOrbit {
    n: usize,
    generators: Vec<Vec<u64>>,
    amplitudes: Vec<Complex64>,
}

impl StabilizerOrbit {
    /// All `N` stabilizer states for `1 ≤ n ≤ 5`.
    pub fn enumerate(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let generators = lagrangian_subspaces(n);
        let amplitudes: Vec<Complex64> = generators
            .par_iter()
            .flat_map_iter(|g| basis_states(n, g))
            .collect();
        Ok(Self {
            n,
            generators,
            amplitudes,
        })
    }

    /// Loads from `<dir>/stabilizer_n<n>.bin` if present, otherwise enumerates
    /// and writes the cache.
    pub fn cached(n: usize, dir: &Path) -> Result<Self> {
        let path = cache_path(dir, n);
        if path.exists() {
            return Self::read_cache(&path);
        }
        let orbit = Self::enumerate(n)?;
        std::fs::create_dir_all(dir)?;
        orbit.write_cache(&path)?;
        Ok(orbit)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn basis_count(&self) -> usize {
        self.generators.len()
    }

    pub fn basis_index(&self, state: usize) -> usize {
        state / self.dim()
    }

    pub fn state(&self, i: usize) -> &[Complex64] {
        let d = self.dim();
        &self.amplitudes[i * d..(i + 1) * d]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[Complex64]> + '_ {
        self.amplitudes.chunks_exact(self.dim())
    }

    /// All amplitudes, state after state.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The `d` states of basis `b`, as one contiguous slice.
    pub fn basis(&self, b: usize) -> &[Complex64] {
        let dd = self.dim() * self.dim();
        &self.amplitudes[b * dd..(b + 1) * dd]
    }

    pub fn pure_state(&self, i: usize) -> PureState {
        PureState::new(self.state(i).to_vec()).expect("enumerated states are normalized")
    }

    /// Unsigned generators of the stabilizer group shared by basis `b`.
    pub fn basis_generators(&self, b: usize) -> Vec<PauliOperator> {
        self.generators[b]
            .iter()
            .map(|&g| PauliOperator::from_symplectic(self.n, g))
            .collect()
    }

    /// Signed stabilizer group of state `i`: `d` pairs `(W_k, φ_k = ±1)` with
    /// `|x_i><x_i| = (1/d) Σ φ_k W_k`.
    pub fn stabilizer_group(&self, i: usize) -> Vec<(PauliOperator, f64)> {
        let d = self.dim();
        let gens = self.basis_generators(i / d);
        let pattern = i % d;
        (0..d)
            .map(|subset| {
                let mut p = PauliOperator::identity(self.n);
                let mut phase = Phase::ONE;
                for (j, g) in gens.iter().enumerate() {
                    if subset >> j & 1 == 1 {
                        let (r, ph) = p.product(g).expect("same qubit count");
                        p = r;
                        phase = phase.mul(ph);
                        if pattern >> j & 1 == 1 {
                            phase = phase.mul(Phase::MINUS_ONE);
                        }
                    }
                }
                let sign = match phase.power() {
                    0 => 1.0,
                    2 => -1.0,
                    _ => unreachable!("products of commuting Hermitian Paulis are Hermitian"),
                };
                (p, sign)
            })
            .collect()
    }

    /// `(1/N²) Σ_{j,k} |<x_j|x_k>|^{2t}`.
    pub fn frame_potential(&self, t: u32) -> f64 {
        let n_states = self.len();
        let total: f64 = (0..n_states)
            .into_par_iter()
            .map(|j| {
                let a = self.state(j);
                self.states()
                    .map(|b| crate::operator::inner(a, b).norm_sqr().powi(t as i32))
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
            .into_iter()
            .sum();
        total / (n_states as f64).powi(2)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for a in &self.amplitudes {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::InvalidCache("bad magic bytes".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CACHE_VERSION {
            return Err(Error::InvalidCache(format!("unsupported version {version}")));
        }
        let n = read_u32(&mut r)? as usize;
        check_qubits(n)?;
        let count = read_u64(&mut r)?;
        if count != stabilizer_state_count(n) {
            return Err(Error::InvalidCache(format!("{count} states for n = {n}")));
        }
        let d = 1usize << n;
        let mut amplitudes = Vec::with_capacity(count as usize * d);
        let mut buf = [0u8; 16];
        for _ in 0..count as usize * d {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
            amplitudes.push(Complex64::new(re, im));
        }
        if r.read(&mut buf)? != 0 {
            return Err(Error::InvalidCache("trailing data".into()));
        }
        // the enumeration order is canonical, so the generators are recomputed
        Ok(Self {
            n,
            generators: lagrangian_subspaces(n),
            amplitudes,
        })
    }
}

pub fn cache_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("stabilizer_n{n}.bin"))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_STABILIZER_QUBITS {
        return Err(Error::UnsupportedQubits {
            n,
            max: MAX_STABILIZER_QUBITS,
            what: "stabilizer enumeration",
        });
    }
    Ok(())
}

/// `binom(d + t - 1, t)^{-1}`: the frame potential of a projective t-design.
pub fn design_frame_potential(d: usize, t: u32) -> f64 {
    let mut binom = 1.0;
    for j in 0..t as usize {
        binom *= (d + j) as f64 / (j + 1) as f64;
    }
    1.0 / binom
}

//! Clifford group elements: tableaus, dense unitaries and uniform sampling.
//!
//! A Clifford is described by its tableau: for each generator `X_q`, `Z_q`
//! the image `U P U† = (-1)^s W(r)` with `W(r)` the Hermitian Pauli of the
//! symplectic row `r`. Rows are ordered `X_0, Z_0, X_1, Z_1, ...`, matching
//! [`SymplecticMatrix`]. Every (symplectic matrix, sign vector) pair is one
//! element of the Clifford group modulo global phase.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::operator::{l2_norm, ComplexMatrix, PureState, ZERO};
use crate::pauli::PauliOperator;
use crate::symplectic::{group_order, SymplecticMatrix};

/// Largest qubit count for which Clifford unitaries are materialized.
pub const MAX_CLIFFORD_QUBITS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct Tableau {
    pub symplectic: SymplecticMatrix,
    /// `signs[j]` is the sign bit of row `j`.
    pub signs: Vec<bool>,
}

impl Tableau {
    pub fn qubits(&self) -> usize {
        self.symplectic.qubits()
    }

    /// Signed image of generator row `j` as `(Pauli, negative)`.
    pub fn image(&self, j: usize) -> (PauliOperator, bool) {
        let n = self.qubits();
        (
            PauliOperator::from_symplectic(n, self.symplectic.rows()[j]),
            self.signs[j],
        )
    }
}

#[derive(Clone, Debug)]
pub struct CliffordElement {
    tableau: Tableau,
    unitary: ComplexMatrix,
}

impl CliffordElement {
    pub fn identity(n: usize) -> Self {
        Self::from_tableau(Tableau {
            symplectic: SymplecticMatrix::identity(n),
            signs: vec![false; 2 * n],
        })
        .expect("identity tableau is valid")
    }

    /// Materializes the unitary of a tableau, up to global phase.
    ///
    /// Column `|x>` is `∏_{q: x_q = 1} X'_q |ψ0>`, where `X'_q` are the signed
    /// images of `X_q` and `|ψ0>` spans the joint +1 eigenspace of the images
    /// of `Z_0 .. Z_{n-1}`.
    pub fn from_tableau(tableau: Tableau) -> Result<Self> {
        let n = tableau.qubits();
        if n == 0 || n > MAX_CLIFFORD_QUBITS {
            return Err(Error::UnsupportedQubits {
                n,
                max: MAX_CLIFFORD_QUBITS,
                what: "Clifford unitaries",
            });
        }
        if tableau.signs.len() != 2 * n || !tableau.symplectic.is_symplectic() {
            return Err(Error::InvalidArgument("tableau is not symplectic".into()));
        }
        let d = 1usize << n;
        let z_images: Vec<(PauliOperator, bool)> = (0..n).map(|q| tableau.image(2 * q + 1)).collect();
        let x_images: Vec<(PauliOperator, bool)> = (0..n).map(|q| tableau.image(2 * q)).collect();

        let psi0 = joint_eigenvector(&z_images, d);
        let mut columns: Vec<Vec<Complex64>> = vec![Vec::new(); d];
        columns[0] = psi0;
        let mut scratch = vec![ZERO; d];
        for x in 1..d {
            // build from the column with the highest set bit cleared
            let q = (usize::BITS - 1 - x.leading_zeros()) as usize;
            let prev = x ^ (1 << q);
            let (p, neg) = x_images[q];
            p.apply_into(&columns[prev], &mut scratch);
            if neg {
                scratch.iter_mut().for_each(|a| *a = -*a);
            }
            columns[x] = scratch.clone();
        }
        let unitary = ComplexMatrix::from_columns(&columns)?;
        Ok(Self { tableau, unitary })
    }

    /// Recovers the tableau of a Clifford unitary by conjugating the generators.
    pub fn from_unitary(unitary: ComplexMatrix) -> Result<Self> {
        let n = crate::operator::qubits_for_dim(unitary.dim())?;
        let adj = unitary.adjoint();
        let mut rows = Vec::with_capacity(2 * n);
        let mut signs = Vec::with_capacity(2 * n);
        for j in 0..2 * n {
            let gen = PauliOperator::from_symplectic(n, 1u64 << j);
            let conj = unitary.matmul(gen.matrix().matrix()).matmul(&adj);
            let (p, sign) = match_pauli(&conj, n)
                .ok_or_else(|| Error::InvalidArgument("unitary does not normalize the Pauli group".into()))?;
            rows.push(p.symplectic());
            signs.push(sign);
        }
        let symplectic = SymplecticMatrix::from_rows(n, rows)
            .ok_or_else(|| Error::InvalidArgument("conjugation images are not symplectic".into()))?;
        Ok(Self {
            tableau: Tableau { symplectic, signs },
            unitary,
        })
    }

    pub fn qubits(&self) -> usize {
        self.tableau.qubits()
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// `(symplectic index-free) key` identifying the element modulo phase.
    pub fn coset_key(&self) -> (Vec<u64>, Vec<bool>) {
        (self.tableau.symplectic.rows().to_vec(), self.tableau.signs.clone())
    }

    /// `C W C†` as `(Pauli, negative)`.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<(PauliOperator, bool)> {
        if p.qubits() != self.qubits() {
            return Err(Error::QubitMismatch(p.qubits(), self.qubits()));
        }
        let n = self.qubits();
        let mut acc = PauliOperator::identity(n);
        let mut phase = crate::pauli::Phase::ONE;
        let v = p.symplectic();
        let mut raw = PauliOperator::identity(n);
        let mut raw_phase = crate::pauli::Phase::ONE;
        for j in 0..2 * n {
            if (v >> j) & 1 == 1 {
                let gen = PauliOperator::from_symplectic(n, 1u64 << j);
                let (r, ph) = raw.product(&gen)?;
                raw = r;
                raw_phase = raw_phase.mul(ph);
                let (img, neg) = self.tableau.image(j);
                let (r, ph) = acc.product(&img)?;
                acc = r;
                phase = phase.mul(ph);
                if neg {
                    phase = phase.mul(crate::pauli::Phase::MINUS_ONE);
                }
            }
        }
        // ∏gen = raw_phase * p  =>  C p C† = raw_phase^{-1} * phase * acc
        let total = phase.mul(crate::pauli::Phase::from_power(-i64::from(raw_phase.power())));
        match total.power() {
            0 => Ok((acc, false)),
            2 => Ok((acc, true)),
            _ => Err(Error::InvalidArgument("non-Hermitian conjugation image".into())),
        }
    }
}

fn match_pauli(m: &ComplexMatrix, n: usize) -> Option<(PauliOperator, bool)> {
    let d = 1usize << n;
    for p in crate::pauli::all_paulis(n) {
        let t = p.matrix().matrix().matmul(m).trace() / d as f64;
        if (t - Complex64::new(1.0, 0.0)).norm() < 1e-9 {
            return Some((p, false));
        }
        if (t + Complex64::new(1.0, 0.0)).norm() < 1e-9 {
            return Some((p, true));
        }
    }
    None
}

/// Unit vector in the joint +1 eigenspace of `n` commuting signed Paulis,
/// with phase fixed so the first nonzero amplitude is real and positive.
pub(crate) fn joint_eigenvector(generators: &[(PauliOperator, bool)], d: usize) -> Vec<Complex64> {
    // The joint eigenspace is one-dimensional; project basis vectors until
    // one survives. The diagonal of the projector is nonzero somewhere.
    let mut scratch = vec![ZERO; d];
    for b in 0..d {
        let mut v = vec![ZERO; d];
        v[b] = Complex64::new(1.0, 0.0);
        for (p, neg) in generators {
            p.apply_into(&v, &mut scratch);
            let s = if *neg { -0.5 } else { 0.5 };
            for (vi, wi) in v.iter_mut().zip(&scratch) {
                *vi = *vi * 0.5 + *wi * s;
            }
        }
        let norm = l2_norm(&v);
        if norm > 0.5 / (d as f64).sqrt() {
            canonicalize_phase(&mut v, norm);
            return v;
        }
    }
    unreachable!("commuting independent Paulis always have a joint eigenvector")
}

pub(crate) fn canonicalize_phase(v: &mut [Complex64], norm: f64) {
    let lead = v
        .iter()
        .find(|a| a.norm() > 1e-9)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let rot = lead.conj() / lead.norm() / norm;
    v.iter_mut().for_each(|a| *a *= rot);
}

/// Uniformly random Clifford modulo global phase: uniform symplectic index and sign bits.
pub fn sample_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CliffordElement> {
    if n == 0 || n > MAX_CLIFFORD_QUBITS {
        return Err(Error::UnsupportedQubits {
            n,
            max: MAX_CLIFFORD_QUBITS,
            what: "Clifford sampling",
        });
    }
    let index = rng.random_range(0..group_order(n));
    let signs = (0..2 * n).map(|_| rng.random::<bool>()).collect();
    CliffordElement::from_tableau(Tableau {
        symplectic: SymplecticMatrix::from_index(n, index),
        signs,
    })
}

pub fn clifford_apply(c: &CliffordElement, psi: &PureState) -> Result<PureState> {
    let d = c.unitary.dim();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: psi.dim(),
        });
    }
    PureState::normalized(c.unitary.apply(psi.amplitudes()))
}

/// Every element of the Clifford group modulo phase (`n ≤ 2`; 24 and 11520 elements).
pub fn clifford_group(n: usize) -> Result<Vec<CliffordElement>> {
    if n == 0 || n > 2 {
        return Err(Error::UnsupportedQubits {
            n,
            max: 2,
            what: "full Clifford group enumeration",
        });
    }
    let mut out = Vec::new();
    for index in 0..group_order(n) {
        let symplectic = SymplecticMatrix::from_index(n, index);
        for s in 0u32..(1 << (2 * n)) {
            let signs = (0..2 * n).map(|j| (s >> j) & 1 == 1).collect();
            out.push(CliffordElement::from_tableau(Tableau {
                symplectic: symplectic.clone(),
                signs,
            })?);
        }
    }
    Ok(out)
}

/// Standard gates as tableaus, mainly for tests and examples.
pub mod gates {
    use super::*;

    /// Hadamard on qubit `q`: `X ↔ Z`.
    pub fn hadamard(n: usize, q: usize) -> CliffordElement {
        let mut rows = SymplecticMatrix::identity(n).rows().to_vec();
        rows.swap(2 * q, 2 * q + 1);
        build(n, rows)
    }

    /// Phase gate on qubit `q`: `X → Y`, `Z → Z`.
    pub fn phase(n: usize, q: usize) -> CliffordElement {
        let mut rows = SymplecticMatrix::identity(n).rows().to_vec();
        rows[2 * q] = 0b11 << (2 * q);
        build(n, rows)
    }

    /// CNOT with control `c`, target `t`: `X_c → X_c X_t`, `Z_t → Z_c Z_t`.
    pub fn cnot(n: usize, c: usize, t: usize) -> CliffordElement {
        let mut rows = SymplecticMatrix::identity(n).rows().to_vec();
        rows[2 * c] |= 1 << (2 * t);
        rows[2 * t + 1] |= 1 << (2 * c + 1);
        build(n, rows)
    }

    fn build(n: usize, rows: Vec<u64>) -> CliffordElement {
        CliffordElement::from_tableau(Tableau {
            symplectic: SymplecticMatrix::from_rows(n, rows).expect("gate tableau is symplectic"),
            signs: vec![false; 2 * n],
        })
        .expect("valid gate")
    }
}

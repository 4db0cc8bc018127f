//! n-qubit Pauli operators in binary symplectic form.
//!
//! A Pauli operator is stored as two bit masks `x` and `z` (bit `q` refers to
//! qubit `q`). Its matrix is the Hermitian representative
//!
//! ```text
//! W(x, z) = ⊗_q  i^(x_q z_q) X^(x_q) Z^(z_q)
//! ```
//!
//! so that `W(1, 1) = iXZ = Y` on a single qubit. Computational basis index
//! `b` has qubit `q` in bit `q`, i.e. qubit 0 is the least significant factor.
//!
//! Enumeration order: index `k` in `[0, 4^n)` interleaves the masks with
//! `x_q` at bit `2q` and `z_q` at bit `2q + 1`. For one qubit the order is
//! `I, X, Z, Y`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, HermitianOperator, ZERO};

/// Largest qubit count representable by the bit-mask encoding.
pub const MAX_PAULI_QUBITS: usize = 31;

/// A power of `i`: one of `1, i, -1, -i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    /// `i^k`.
    pub fn from_power(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: u32,
    z: u32,
}

#[inline]
fn interleave(x: u32, z: u32, n: usize) -> u64 {
    let mut k = 0u64;
    for q in 0..n {
        k |= (((x >> q) & 1) as u64) << (2 * q);
        k |= (((z >> q) & 1) as u64) << (2 * q + 1);
    }
    k
}

#[inline]
fn deinterleave(k: u64, n: usize) -> (u32, u32) {
    let (mut x, mut z) = (0u32, 0u32);
    for q in 0..n {
        x |= (((k >> (2 * q)) & 1) as u32) << q;
        z |= (((k >> (2 * q + 1)) & 1) as u32) << q;
    }
    (x, z)
}

impl PauliOperator {
    pub fn new(n: usize, x: u32, z: u32) -> Result<Self> {
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(Error::UnsupportedQubits {
                n,
                max: MAX_PAULI_QUBITS,
                what: "Pauli operators",
            });
        }
        let mask = (1u32 << n) - 1;
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidArgument(format!(
                "Pauli bit masks x={x:#b}, z={z:#b} exceed {n} qubits"
            )));
        }
        Ok(Self { n, x, z })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, x: 0, z: 0 }
    }

    /// Decodes the interleaved index; index 0 is the identity.
    pub fn from_index(n: usize, k: u64) -> Result<Self> {
        let bound = pauli_count(n);
        if n == 0 || n > MAX_PAULI_QUBITS || k >= bound {
            return Err(Error::PauliIndexOutOfRange { n, index: k, bound });
        }
        let (x, z) = deinterleave(k, n);
        Ok(Self { n, x, z })
    }

    /// Builds the operator from a symplectic vector in the interleaved layout.
    pub(crate) fn from_symplectic(n: usize, v: u64) -> Self {
        let (x, z) = deinterleave(v, n);
        Self { n, x, z }
    }

    pub fn index(&self) -> u64 {
        interleave(self.x, self.z, self.n)
    }

    /// Symplectic vector in the interleaved layout (same bits as [`Self::index`]).
    pub fn symplectic(&self) -> u64 {
        self.index()
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bits(&self) -> u32 {
        self.x
    }

    #[inline]
    pub fn z_bits(&self) -> u32 {
        self.z
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `i^{|x∧z|}`: phase turning `X^x Z^z` into the Hermitian representative.
    #[inline]
    fn hermitian_power(&self) -> i64 {
        (self.x & self.z).count_ones() as i64
    }

    /// Matrix element `W|b> = value |b ⊕ x>`.
    #[inline]
    pub fn column_entry(&self, b: usize) -> (usize, Complex64) {
        let sign = if (self.z & b as u32).count_ones() % 2 == 1 { 2 } else { 0 };
        let phase = Phase::from_power(self.hermitian_power() + sign);
        (b ^ self.x as usize, phase.to_complex())
    }

    /// `W v` without materializing the matrix.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; v.len()];
        self.apply_into(v, &mut out);
        out
    }

    pub(crate) fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.dim());
        let base = Phase::from_power(self.hermitian_power());
        let (pos, neg) = (base.to_complex(), base.mul(Phase::MINUS_ONE).to_complex());
        for (b, amp) in v.iter().enumerate() {
            let odd = (self.z & b as u32).count_ones() % 2 == 1;
            out[b ^ self.x as usize] = if odd { neg * amp } else { pos * amp };
        }
    }

    /// `<v|W|v>`; real for unit or non-unit `v` because `W` is Hermitian.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let base = Phase::from_power(self.hermitian_power()).to_complex();
        let mut acc = ZERO;
        for (b, amp) in v.iter().enumerate() {
            let term = v[b ^ self.x as usize].conj() * amp;
            if (self.z & b as u32).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        (base * acc).re
    }

    /// `tr(W X)` for a dense Hermitian `X`.
    pub fn trace_with(&self, op: &HermitianOperator) -> f64 {
        let mut acc = ZERO;
        for c in 0..op.dim() {
            let (row, w) = self.column_entry(c);
            acc += w * op.get(c, row);
        }
        acc.re
    }

    /// Dense matrix realization.
    pub fn matrix(&self) -> HermitianOperator {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d);
        for b in 0..d {
            let (row, v) = self.column_entry(b);
            m.set(row, b, v);
        }
        HermitianOperator::from_matrix_unchecked(m)
    }

    /// `self · other = phase · result`.
    pub fn product(&self, other: &PauliOperator) -> Result<(PauliOperator, Phase)> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let result = PauliOperator { n: self.n, x, z };
        // Z^{z1} X^{x2} = (-1)^{|z1∧x2|} X^{x2} Z^{z1}
        let swap = 2 * (self.z & other.x).count_ones() as i64;
        let power = self.hermitian_power() + other.hermitian_power() - result.hermitian_power() + swap;
        Ok((result, Phase::from_power(power)))
    }
}

impl fmt::Display for PauliOperator {
    /// Qubit 0 is printed first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            let c = match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliOperator {
    type Err = Error;

    /// Parses labels such as `XIZ`, qubit 0 first.
    fn from_str(label: &str) -> Result<Self> {
        let n = label.chars().count();
        if n == 0 {
            return Err(Error::InvalidArgument("empty Pauli label".into()));
        }
        let (mut x, mut z) = (0u32, 0u32);
        for (q, c) in label.chars().enumerate() {
            let (bx, bz) = match c.to_ascii_uppercase() {
                'I' => (0, 0),
                'X' => (1, 0),
                'Z' => (0, 1),
                'Y' => (1, 1),
                other => return Err(Error::InvalidArgument(format!("invalid Pauli letter '{other}'"))),
            };
            x |= bx << q;
            z |= bz << q;
        }
        PauliOperator::new(n, x, z)
    }
}

/// `4^n`.
pub fn pauli_count(n: usize) -> u64 {
    if n >= 32 {
        u64::MAX
    } else {
        1u64 << (2 * n)
    }
}

/// All `4^n` Pauli operators in index order.
pub fn all_paulis(n: usize) -> impl Iterator<Item = PauliOperator> {
    (0..pauli_count(n)).map(move |k| {
        let (x, z) = deinterleave(k, n);
        PauliOperator { n, x, z }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::ComplexMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, vec![ZERO, c(1.0, 0.0), c(1.0, 0.0), ZERO]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, vec![c(1.0, 0.0), ZERO, ZERO, c(-1.0, 0.0)]).unwrap()
    }

    #[test]
    fn labels_round_trip() {
        for n in 1..=3 {
            for p in all_paulis(n) {
                assert_eq!(p.to_string().parse::<PauliOperator>().unwrap(), p);
            }
        }
        assert!("XQ".parse::<PauliOperator>().is_err());
        assert!("".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn index_zero_is_identity() {
        let p = PauliOperator::from_index(1, 0).unwrap();
        assert!(p.is_identity());
        assert_eq!(p.matrix().matrix(), &ComplexMatrix::identity(2));
    }

    #[test]
    fn single_qubit_non_identity_are_traceless() {
        for k in 1..4 {
            let p = PauliOperator::from_index(1, k).unwrap();
            assert!(!p.is_identity());
            assert!(p.matrix().trace().abs() < 1e-15);
        }
        assert_eq!(PauliOperator::from_index(1, 1).unwrap().to_string(), "X");
        assert_eq!(PauliOperator::from_index(1, 2).unwrap().to_string(), "Z");
        assert_eq!(PauliOperator::from_index(1, 3).unwrap().to_string(), "Y");
    }

    #[test]
    fn out_of_range_index_is_an_error() {
        assert!(matches!(
            PauliOperator::from_index(2, 16),
            Err(Error::PauliIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn y_is_i_x_z_with_unit_eigenvalues() {
        let y = PauliOperator::new(1, 1, 1).unwrap().matrix();
        let expected = pauli_x().matmul(&pauli_z()).scale(c(0.0, 1.0));
        assert!(y.matrix().max_abs_diff(&expected) < 1e-15);
        let ev = y.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_matrices_are_tensor_products() {
        // qubit 0 is the least significant factor: W = σ_1 ⊗ σ_0
        let singles: Vec<HermitianOperator> = all_paulis(1).map(|p| p.matrix()).collect();
        for p in all_paulis(2) {
            let q0 = ((p.x_bits() & 1) as u64) | (((p.z_bits() & 1) as u64) << 1);
            let q1 = (((p.x_bits() >> 1) & 1) as u64) | ((((p.z_bits() >> 1) & 1) as u64) << 1);
            let expected = singles[q1 as usize].matrix().kron(singles[q0 as usize].matrix());
            assert!(p.matrix().matrix().max_abs_diff(&expected) < 1e-15);
        }
    }

    #[test]
    fn two_qubit_paulis_are_hs_orthogonal() {
        // brute-force tr(W_j W_k) over all 16 x 16 pairs
        let mats: Vec<ComplexMatrix> = all_paulis(2).map(|p| p.matrix().matrix().clone()).collect();
        assert_eq!(mats.len(), 16);
        for (j, a) in mats.iter().enumerate() {
            for (k, b) in mats.iter().enumerate() {
                let t = a.matmul(b).trace();
                let expected = if j == k { 4.0 } else { 0.0 };
                assert!((t - c(expected, 0.0)).norm() < 1e-12, "pair ({j},{k})");
            }
        }
    }

    #[test]
    fn orthogonality_up_to_three_qubits() {
        for n in 1..=3 {
            let d = 1usize << n;
            let mats: Vec<ComplexMatrix> = all_paulis(n).map(|p| p.matrix().matrix().clone()).collect();
            for (j, a) in mats.iter().enumerate() {
                assert_eq!(a.matmul(a).trace(), c(d as f64, 0.0));
                for b in mats.iter().skip(j + 1) {
                    assert!(a.matmul(b).trace().norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn products_match_known_single_qubit_table() {
        let x = PauliOperator::new(1, 1, 0).unwrap();
        let z = PauliOperator::new(1, 0, 1).unwrap();
        let (r, ph) = x.product(&z).unwrap();
        assert_eq!((r.x_bits(), r.z_bits()), (1, 1));
        assert_eq!(ph, Phase::MINUS_I);
        let dense = x.matrix().matrix().matmul(z.matrix().matrix());
        let rhs = r.matrix().matrix().scale(ph.to_complex());
        assert!(dense.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn identity_product_and_involution() {
        for p in all_paulis(2) {
            let (r, ph) = PauliOperator::identity(2).product(&p).unwrap();
            assert_eq!((r, ph), (p, Phase::ONE));
            let (r, ph) = p.product(&p).unwrap();
            assert!(r.is_identity());
            assert_eq!(ph, Phase::ONE);
        }
    }

    #[test]
    fn mismatched_qubits_is_an_error() {
        let a = PauliOperator::identity(1);
        let b = PauliOperator::identity(2);
        assert!(matches!(a.product(&b), Err(Error::QubitMismatch(1, 2))));
    }

    #[test]
    fn basis_expansion_reconstructs_hermitian() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            let d = 1usize << n;
            let x = crate::random::random_hermitian(d, &mut rng);
            let mut recon = ComplexMatrix::zeros(d);
            for p in all_paulis(n) {
                let coeff = p.trace_with(&x) / d as f64;
                recon = recon.add(&p.matrix().matrix().scale(c(coeff, 0.0)));
            }
            assert!(recon.max_abs_diff(x.matrix()) < 1e-10);
        }
    }

    #[test]
    fn apply_and_expectation_match_dense() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let psi = crate::random::random_pure_state(8, &mut rng);
        for p in all_paulis(3) {
            let m = p.matrix();
            let dense = m.matrix().apply(psi.amplitudes());
            let fast = p.apply(psi.amplitudes());
            for (a, b) in dense.iter().zip(&fast) {
                assert!((a - b).norm() < 1e-14);
            }
            assert!((m.expectation(psi.amplitudes()) - p.expectation(psi.amplitudes())).abs() < 1e-14);
        }
    }

    fn pauli_strategy(n: usize) -> impl Strategy<Value = PauliOperator> {
        (0..pauli_count(n)).prop_map(move |k| PauliOperator::from_index(n, k).unwrap())
    }

    fn triple() -> impl Strategy<Value = (PauliOperator, PauliOperator, PauliOperator)> {
        (1usize..=3).prop_flat_map(|n| (pauli_strategy(n), pauli_strategy(n), pauli_strategy(n)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn product_is_phase_consistent_and_associative((a, b, c3) in triple()) {
            let (ab, p_ab) = a.product(&b).unwrap();
            let dense = a.matrix().matrix().matmul(b.matrix().matrix());
            let rhs = ab.matrix().matrix().scale(p_ab.to_complex());
            prop_assert!(dense.max_abs_diff(&rhs) < 1e-12);

            let (ab_c, p1) = ab.product(&c3).unwrap();
            let (bc, p_bc) = b.product(&c3).unwrap();
            let (a_bc, p2) = a.product(&bc).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(p_ab.mul(p1), p_bc.mul(p2));
        }

        #[test]
        fn matrices_are_hermitian_unitary_involutions(k in 0u64..64) {
            let p = PauliOperator::from_index(3, k).unwrap();
            let m = p.matrix().matrix().clone();
            prop_assert!(m.hermiticity_defect() < 1e-15);
            prop_assert!(m.matmul(&m).max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
            let tr = m.trace().re;
            prop_assert_eq!(tr, if k == 0 { 8.0 } else { 0.0 });
        }

        #[test]
        fn index_round_trips(k in 0u64..1024) {
            let p = PauliOperator::from_index(5, k).unwrap();
            prop_assert_eq!(p.index(), k);
        }
    }
}

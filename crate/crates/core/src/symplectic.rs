//! Binary symplectic group `Sp(2n, F_2)`.
//!
//! Vectors of `F_2^{2n}` are `u64` masks in the same interleaved layout as
//! Pauli indices (`x_q` at bit `2q`, `z_q` at bit `2q + 1`). A symplectic
//! matrix is stored by its rows: row `j` is the image of basis vector `e_j`.
//!
//! Group elements are indexed bijectively by integers in `[0, |Sp(2n)|)`
//! through the transvection construction of Koenig and Smolin, which makes
//! uniform sampling a matter of drawing a uniform index.

const X_MASK: u64 = 0x5555_5555_5555_5555;

/// Symplectic form `<a, b> = Σ_q a_{x_q} b_{z_q} + a_{z_q} b_{x_q} mod 2`.
#[inline]
pub fn symplectic_inner(a: u64, b: u64) -> u32 {
    let ax = a & X_MASK;
    let az = (a >> 1) & X_MASK;
    let bx = b & X_MASK;
    let bz = (b >> 1) & X_MASK;
    ((ax & bz).count_ones() + (az & bx).count_ones()) & 1
}

/// Transvection `Z_h(v) = v + <h, v> h`.
#[inline]
pub fn transvection(h: u64, v: u64) -> u64 {
    if symplectic_inner(h, v) == 1 {
        v ^ h
    } else {
        v
    }
}

#[inline]
fn pair(v: u64, q: usize) -> u64 {
    (v >> (2 * q)) & 0b11
}

/// Returns `(h1, h2)` with `y = Z_h1 Z_h2 x` for nonzero `x`, `y`.
pub fn find_transvection(x: u64, y: u64, n: usize) -> (u64, u64) {
    if x == y {
        return (0, 0);
    }
    if symplectic_inner(x, y) == 1 {
        return (x ^ y, 0);
    }
    let mut z = 0u64;
    for q in 0..n {
        let (xp, yp) = (pair(x, q), pair(y, q));
        if xp != 0 && yp != 0 {
            let mut zp = xp ^ yp;
            if zp == 0 {
                // identical non-zero pairs: choose z with <z, x> = <z, y> = 1 on this qubit
                zp = 0b10;
                if xp & 1 != (xp >> 1) & 1 {
                    zp |= 0b01;
                }
            }
            z |= zp << (2 * q);
            return (x ^ z, z ^ y);
        }
    }
    for q in 0..n {
        let (xp, yp) = (pair(x, q), pair(y, q));
        if xp != 0 && yp == 0 {
            let zp = if xp & 1 == (xp >> 1) & 1 {
                0b10
            } else {
                ((xp & 1) << 1) | (xp >> 1)
            };
            z |= zp << (2 * q);
            break;
        }
    }
    for q in 0..n {
        let (xp, yp) = (pair(x, q), pair(y, q));
        if xp == 0 && yp != 0 {
            let zp = if yp & 1 == (yp >> 1) & 1 {
                0b10
            } else {
                ((yp & 1) << 1) | (yp >> 1)
            };
            z |= zp << (2 * q);
            break;
        }
    }
    (x ^ z, z ^ y)
}

/// `|Sp(2n, F_2)| = 2^{n^2} ∏_{j=1}^n (4^j - 1)`.
pub fn group_order(n: usize) -> u128 {
    let mut order: u128 = 1;
    for j in 1..=n {
        order *= ((1u128 << (2 * j)) - 1) << (2 * j - 1);
    }
    order
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl SymplecticMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            rows: (0..2 * n).map(|j| 1u64 << j).collect(),
        }
    }

    /// Validates `<row_i, row_j> = Ω_ij`.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Option<Self> {
        let m = Self { n, rows };
        (m.rows.len() == 2 * n && m.is_symplectic()).then_some(m)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn is_symplectic(&self) -> bool {
        let width_mask = if self.n >= 32 { u64::MAX } else { (1u64 << (2 * self.n)) - 1 };
        for (i, &a) in self.rows.iter().enumerate() {
            if a & !width_mask != 0 {
                return false;
            }
            for (j, &b) in self.rows.iter().enumerate() {
                let expected = u32::from(i / 2 == j / 2 && i != j);
                if symplectic_inner(a, b) != expected {
                    return false;
                }
            }
        }
        true
    }

    /// Image of vector `v` under the linear map.
    pub fn apply(&self, v: u64) -> u64 {
        let mut out = 0;
        for (j, row) in self.rows.iter().enumerate() {
            if (v >> j) & 1 == 1 {
                out ^= row;
            }
        }
        out
    }

    /// Group element number `index`; a bijection on `[0, group_order(n))`.
    pub fn from_index(n: usize, index: u128) -> Self {
        assert!(n >= 1 && index < group_order(n), "symplectic index out of range");
        Self {
            n,
            rows: symplectic_rows(index, n),
        }
    }
}

fn symplectic_rows(mut i: u128, n: usize) -> Vec<u64> {
    let nn = 2 * n;
    let s: u128 = (1u128 << nn) - 1;
    let k = (i % s) + 1;
    i /= s;
    let mut f1 = k as u64;
    let e1 = 1u64;
    let (t0, t1) = find_transvection(e1, f1, n);
    let bits = (i % (1u128 << (nn - 1))) as u64;
    // e' = e1 with bits 2..2n taken from bits[1..]
    let mut eprime = e1;
    for j in 2..nn {
        eprime |= ((bits >> (j - 1)) & 1) << j;
    }
    let h0 = transvection(t1, transvection(t0, eprime));
    if bits & 1 == 1 {
        f1 = 0;
    }
    let mut g: Vec<u64> = vec![0b01, 0b10];
    if n > 1 {
        let sub = symplectic_rows(i >> (nn - 1), n - 1);
        g.extend(sub.into_iter().map(|r| r << 2));
    }
    for row in g.iter_mut() {
        let mut v = *row;
        v = transvection(t0, v);
        v = transvection(t1, v);
        v = transvection(h0, v);
        v = transvection(f1, v);
        *row = v;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn group_orders() {
        assert_eq!(group_order(1), 6);
        assert_eq!(group_order(2), 720);
        assert_eq!(group_order(3), 1_451_520);
    }

    #[test]
    fn transvection_pairs_map_x_to_y() {
        let n = 2;
        for x in 1u64..16 {
            for y in 1u64..16 {
                let (h1, h2) = find_transvection(x, y, n);
                assert_eq!(transvection(h1, transvection(h2, x)), y, "x={x:04b} y={y:04b}");
            }
        }
    }

    #[test]
    fn index_map_is_a_bijection_onto_sp4() {
        let mut seen = HashSet::new();
        for i in 0..group_order(2) {
            let m = SymplecticMatrix::from_index(2, i);
            assert!(m.is_symplectic(), "index {i}");
            assert!(seen.insert(m.rows().to_vec()));
        }
        // brute force: count all 4x4 binary matrices that are symplectic
        let mut brute = 0;
        for bits in 0u64..(1 << 16) {
            let rows: Vec<u64> = (0..4).map(|r| (bits >> (4 * r)) & 0xF).collect();
            if SymplecticMatrix::from_rows(2, rows).is_some() {
                brute += 1;
            }
        }
        assert_eq!(brute, 720);
        assert_eq!(seen.len(), 720);
    }

    #[test]
    fn index_map_single_qubit() {
        let all: HashSet<Vec<u64>> = (0..6)
            .map(|i| SymplecticMatrix::from_index(1, i).rows().to_vec())
            .collect();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn large_indices_are_symplectic() {
        for n in 3..=5 {
            let order = group_order(n);
            for i in [0, 1, order / 3, order / 2 + 17, order - 1] {
                assert!(SymplecticMatrix::from_index(n, i).is_symplectic());
            }
        }
    }
}

//! Dense matrices over the prime field `F_p`.

use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::arith::{mul_mod, pow_mod};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: alloc::vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Entries are reduced mod `p`. Panics on ragged input.
    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x % p);
            }
        }
        m
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let p = self.p;
        let mut out = Self::zeros(p, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = (out.data[idx] + mul_mod(a, other.get(l, j), p)) % p;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |acc, (a, b)| (acc + mul_mod(*a, *b, self.p)) % self.p))
            .collect()
    }

    /// `u^T M v`.
    pub fn bilinear(&self, u: &[u64], v: &[u64]) -> u64 {
        let mv = self.apply(v);
        u.iter().zip(&mv).fold(0, |acc, (a, b)| (acc + mul_mod(*a, *b, self.p)) % self.p)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            m.swap_rows(r, piv);
            let inv = inv_mod(m.get(r, c), p);
            for j in 0..m.cols {
                let x = mul_mod(m.get(r, j), inv, p);
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                let f = m.get(i, c);
                if i == r || f == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let x = (m.get(i, j) + p - mul_mod(f, m.get(r, j), p)) % p;
                    m.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, red.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// Uniformly random invertible matrix by rejection sampling.
    pub fn random_invertible(p: u64, n: usize, rng: &mut impl RngCore) -> Self {
        loop {
            let mut m = Self::zeros(p, n, n);
            for x in &mut m.data {
                *x = rng.next_u64() % p;
            }
            if m.is_invertible() {
                return m;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &p in &[3u64, 5, 7] {
            for n in 1..6 {
                let a = FpMatrix::random_invertible(p, n, &mut rng);
                let inv = a.inverse().unwrap();
                assert_eq!(a.mul(&inv), FpMatrix::identity(p, n));
            }
        }
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = FpMatrix::from_rows(5, &[alloc::vec![1, 2], alloc::vec![2, 4]]);
        assert_eq!(m.rank(), 1);
        assert!(m.inverse().is_none());
    }

    #[test]
    fn rref_is_canonical() {
        let a = FpMatrix::from_rows(3, &[alloc::vec![0, 2, 1, 1], alloc::vec![1, 1, 0, 2]]);
        let b = FpMatrix::from_rows(3, &[alloc::vec![1, 0, 2, 1], alloc::vec![2, 1, 1, 0]]);
        let (ra, pa) = a.rref();
        let (rb, pb) = b.rref();
        assert_eq!(pa, pb);
        assert_eq!(ra.rank(), 2);
        // same row space iff same rref
        assert_eq!(ra == rb, FpMatrix::from_rows(3, &[a.row(0).to_vec(), a.row(1).to_vec(), b.row(0).to_vec(), b.row(1).to_vec()]).rank() == 2);
    }
}

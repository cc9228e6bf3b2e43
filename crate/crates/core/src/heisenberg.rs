//! The Heisenberg group `Γ_{n,p}` of order `p^{2n+1}`.
//!
//! Elements are triples `(x, y, z)` with `x, y ∈ F_p^n` and `z ∈ F_p`, and
//!
//! ```text
//! (x, y, z) · (x', y', z') = (x + x', y + y', z + z' + ⟨x, y'⟩).
//! ```
//!
//! With `[g, h] = g⁻¹h⁻¹gh` this gives `[g, h] = f^{ω(η(g), η(h))}` where
//! `η(x, y, z) = (x, y)` and `ω` is the standard symplectic form.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::{exact_log, is_prime, mul_mod};
use crate::brute::{max_abelian_order, FiniteGroup};
use crate::error::{Error, Result};
use crate::fp::FpMatrix;

/// Default cap on `|Γ|` for exhaustive computations.
pub const BRUTE_FORCE_BUDGET: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisenbergElement {
    pub p: u64,
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    pub z: u64,
}

impl HeisenbergElement {
    pub fn new(p: u64, x: Vec<u64>, y: Vec<u64>, z: u64) -> Self {
        assert_eq!(x.len(), y.len());
        let x = x.into_iter().map(|v| v % p).collect();
        let y = y.into_iter().map(|v| v % p).collect();
        HeisenbergElement { p, x, y, z: z % p }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Image in `F_p^{2n}`, ordered `(x_1..x_n, y_1..y_n)`.
    pub fn eta(&self) -> Vec<u64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.z == 0 && self.x.iter().chain(&self.y).all(|&v| v == 0)
    }
}

fn dot(a: &[u64], b: &[u64], p: u64) -> u64 {
    a.iter().zip(b).fold(0, |acc, (x, y)| (acc + mul_mod(*x, *y, p)) % p)
}

/// `Γ_{n,p}` as a concrete group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeisenbergGroup {
    pub n: usize,
    pub p: u64,
}

impl HeisenbergGroup {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if p == 2 {
            return Err(Error::EvenPrime(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(HeisenbergGroup { n, p })
    }

    /// `p^{2n+1}`, if it fits.
    pub fn order(&self) -> Option<u64> {
        self.p.checked_pow(2 * self.n as u32 + 1)
    }

    pub fn identity(&self) -> HeisenbergElement {
        HeisenbergElement::new(self.p, alloc::vec![0; self.n], alloc::vec![0; self.n], 0)
    }

    fn unit(&self, i: usize) -> Vec<u64> {
        let mut e = alloc::vec![0; self.n];
        e[i - 1] = 1;
        e
    }

    /// `a_i`, 1-based.
    pub fn a(&self, i: usize) -> HeisenbergElement {
        HeisenbergElement::new(self.p, self.unit(i), alloc::vec![0; self.n], 0)
    }

    /// `b_i`, 1-based.
    pub fn b(&self, i: usize) -> HeisenbergElement {
        HeisenbergElement::new(self.p, alloc::vec![0; self.n], self.unit(i), 0)
    }

    /// The central generator.
    pub fn f(&self) -> HeisenbergElement {
        HeisenbergElement::new(self.p, alloc::vec![0; self.n], alloc::vec![0; self.n], 1)
    }

    /// Any element with the given image under `η` and central coordinate.
    pub fn lift(&self, v: &[u64], z: u64) -> HeisenbergElement {
        HeisenbergElement::new(self.p, v[..self.n].to_vec(), v[self.n..].to_vec(), z)
    }

    fn check(&self, g: &HeisenbergElement) -> Result<()> {
        if g.p != self.p || g.n() != self.n {
            return Err(Error::GroupMismatch { n1: self.n, p1: self.p, n2: g.n(), p2: g.p });
        }
        Ok(())
    }

    pub fn mul(&self, g: &HeisenbergElement, h: &HeisenbergElement) -> Result<HeisenbergElement> {
        self.check(g)?;
        self.check(h)?;
        let p = self.p;
        let add = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(s, t)| (s + t) % p).collect();
        Ok(HeisenbergElement {
            p,
            x: add(&g.x, &h.x),
            y: add(&g.y, &h.y),
            z: (g.z + h.z + dot(&g.x, &h.y, p)) % p,
        })
    }

    pub fn inverse(&self, g: &HeisenbergElement) -> Result<HeisenbergElement> {
        self.check(g)?;
        let p = self.p;
        let neg = |a: &[u64]| a.iter().map(|s| (p - s) % p).collect();
        Ok(HeisenbergElement { p, x: neg(&g.x), y: neg(&g.y), z: (p - g.z + dot(&g.x, &g.y, p)) % p })
    }

    pub fn pow(&self, g: &HeisenbergElement, k: u64) -> Result<HeisenbergElement> {
        let mut out = self.identity();
        for _ in 0..k {
            out = self.mul(&out, g)?;
        }
        Ok(out)
    }

    /// `g⁻¹ h⁻¹ g h`.
    pub fn commutator(&self, g: &HeisenbergElement, h: &HeisenbergElement) -> Result<HeisenbergElement> {
        let gi = self.inverse(g)?;
        let hi = self.inverse(h)?;
        self.mul(&self.mul(&gi, &hi)?, &self.mul(g, h)?)
    }

    fn index_of(&self, g: &HeisenbergElement) -> usize {
        let p = self.p as usize;
        g.x.iter().chain(&g.y).chain(core::iter::once(&g.z)).fold(0, |acc, &d| acc * p + d as usize)
    }

    fn element_at(&self, mut idx: usize) -> HeisenbergElement {
        let p = self.p as usize;
        let mut digits = alloc::vec![0u64; 2 * self.n + 1];
        for d in digits.iter_mut().rev() {
            *d = (idx % p) as u64;
            idx /= p;
        }
        let z = digits.pop().unwrap();
        let y = digits.split_off(self.n);
        HeisenbergElement { p: self.p, x: digits, y, z }
    }

    /// Every element, in index order. Only sensible for small groups.
    pub fn elements(&self) -> impl Iterator<Item = HeisenbergElement> + '_ {
        let order = self.order().expect("order overflows u64") as usize;
        (0..order).map(|i| self.element_at(i))
    }
}

impl FiniteGroup for HeisenbergGroup {
    fn order(&self) -> usize {
        HeisenbergGroup::order(self).expect("order overflows u64") as usize
    }

    fn identity_index(&self) -> usize {
        0
    }

    fn mul_index(&self, a: usize, b: usize) -> usize {
        let g = self.element_at(a);
        let h = self.element_at(b);
        self.index_of(&self.mul(&g, &h).expect("same group"))
    }
}

/// A nondegenerate alternating bilinear form on `F_p^{2n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    matrix: FpMatrix,
}

impl SymplecticForm {
    /// `ω((x, y), (x', y')) = Σ (x_j y'_j - x'_j y_j)`.
    pub fn standard(n: usize, p: u64) -> Self {
        let mut m = FpMatrix::zeros(p, 2 * n, 2 * n);
        for i in 0..n {
            m.set(i, n + i, 1);
            m.set(n + i, i, p - 1);
        }
        SymplecticForm { matrix: m }
    }

    pub fn from_matrix(matrix: FpMatrix) -> Result<Self> {
        let d = matrix.rows();
        if d != matrix.cols() || d % 2 == 1 || d == 0 {
            return Err(Error::InvalidParameter(format!("form matrix must be 2n×2n, got {d}×{}", matrix.cols())));
        }
        let p = matrix.p();
        for i in 0..d {
            if matrix.get(i, i) != 0 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..i {
                if !(matrix.get(i, j) + matrix.get(j, i)).is_multiple_of(p) {
                    return Err(Error::InvalidParameter(format!("not antisymmetric at ({i}, {j})")));
                }
            }
        }
        if matrix.rank() != d {
            return Err(Error::InvalidParameter("degenerate form".into()));
        }
        Ok(SymplecticForm { matrix })
    }

    /// `(u, v) ↦ ω(A u, A v)` for an invertible `A`.
    pub fn pullback(&self, a: &FpMatrix) -> Result<Self> {
        if !a.is_invertible() || a.rows() != self.dim() {
            return Err(Error::InvalidParameter("pullback needs an invertible matrix of matching size".into()));
        }
        Self::from_matrix(a.transpose().mul(&self.matrix).mul(a))
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn p(&self) -> u64 {
        self.matrix.p()
    }

    pub fn eval(&self, u: &[u64], v: &[u64]) -> u64 {
        self.matrix.bilinear(u, v)
    }
}

/// Exponent `e` of the largest abelian subgroup order `p^e` of `Γ_{n,p}`.
///
/// Upper bound: an abelian subgroup maps onto an isotropic subspace, and a
/// nondegenerate form on `F_p^{2n}` has isotropic subspaces of dimension at
/// most `n`, so the subgroup has at most `p^{n+1}` elements. Lower bound: the
/// preimage of the Lagrangian `span(e_1..e_n)` is abelian of that order.
pub fn max_abelian_exponent(n: usize, p: u64) -> Result<usize> {
    let group = HeisenbergGroup::new(n, p)?;
    let omega = SymplecticForm::standard(n, p);
    if omega.matrix().rank() != 2 * n {
        return Err(Error::CheckFailed { step: "ω nondegenerate", detail: format!("rank below {}", 2 * n) });
    }
    let mut gens: Vec<HeisenbergElement> = (1..=n).map(|i| group.a(i)).collect();
    gens.push(group.f());
    for g in &gens {
        for h in &gens {
            if !group.commutator(g, h)?.is_identity() {
                return Err(Error::CheckFailed {
                    step: "Lagrangian preimage abelian",
                    detail: format!("{g:?} and {h:?} do not commute"),
                });
            }
        }
    }
    Ok(n + 1)
}

/// Exhaustive abelian-subgroup search on `Γ_{n,p}`.
///
/// Returns the largest abelian subgroup order and `λ = log|A| / log|Γ|`.
pub fn brute_force_lambda(n: usize, p: u64, budget: u64) -> Result<(u64, BigRational)> {
    let group = HeisenbergGroup::new(n, p)?;
    let order = group.order().filter(|&o| o <= budget).ok_or_else(|| Error::BudgetExceeded {
        what: "group order",
        needed: format!("{p}^{}", 2 * n + 1),
        budget,
    })?;
    let best = max_abelian_order(&group) as u64;
    let e = exact_log(best, p).ok_or_else(|| Error::CheckFailed {
        step: "abelian order is a power of p",
        detail: format!("{best}"),
    })?;
    Ok((best, BigRational::new(BigInt::from(e), BigInt::from(exact_log(order, p).unwrap()))))
}

/// Checks `[g, h] = f^{ω(η(g), η(h))}` over all pairs of elements.
/// Returns `(pairs checked, mismatches)`.
pub fn commutator_law_exhaustive(n: usize, p: u64, budget: u64) -> Result<(u64, u64)> {
    let group = HeisenbergGroup::new(n, p)?;
    let order = group.order().filter(|&o| o <= budget).ok_or_else(|| Error::BudgetExceeded {
        what: "group order",
        needed: format!("{p}^{}", 2 * n + 1),
        budget,
    })?;
    let omega = SymplecticForm::standard(n, p);
    let elems: Vec<_> = group.elements().collect();
    let mut mismatches = 0;
    for g in &elems {
        let eg = g.eta();
        for h in &elems {
            let c = group.commutator(g, h)?;
            let expected = group.pow(&group.f(), omega.eval(&eg, &h.eta()))?;
            if c != expected {
                mismatches += 1;
            }
        }
    }
    Ok((order * order, mismatches))
}

//! Integral exterior algebra on the degree-one generators `u_1..u_n, v_1..v_n`,
//! i.e. the cohomology ring of the torus `T^{2n}`, with rational coefficients.
//!
//! A monomial is a bitmask over the `2n` generators. Bit `i - 1` is `u_i` and
//! bit `n + i - 1` is `v_i`, so the canonical order is
//! `u_1 < ... < u_n < v_1 < ... < v_n` and every stored monomial is sorted.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factorial, rat};
use crate::error::{Error, Result};

/// Largest torus half-dimension handled. The symmetrization product ranges
/// over `n!` factors.
pub const DEFAULT_CAP: usize = 6;

/// Hard limit from the `u32` monomial mask.
const MASK_LIMIT: usize = 16;

/// A class in `H*(T^{2n}; Q)` stored in canonical sorted form.
#[derive(Clone, PartialEq, Eq)]
pub struct ExteriorClass {
    n: usize,
    terms: BTreeMap<u32, BigRational>,
}

/// A degree-one generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    U(usize),
    V(usize),
}

impl Generator {
    fn bit(self, n: usize) -> usize {
        match self {
            Generator::U(i) => i - 1,
            Generator::V(i) => n + i - 1,
        }
    }
}

/// Sign of concatenating two disjoint sorted monomials into sorted order.
fn merge_sign(a: u32, b: u32) -> bool {
    // Each generator of `b` must pass every generator of `a` above it.
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    swaps % 2 == 1
}

/// Sorts `gens` in place, returning true when the permutation was odd.
/// Returns `None` on a repeated generator.
fn sort_with_sign(gens: &mut [usize]) -> Option<bool> {
    let mut odd = false;
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j - 1] > gens[j] {
            gens.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
        if j > 0 && gens[j - 1] == gens[j] {
            return None;
        }
    }
    Some(odd)
}

impl ExteriorClass {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MASK_LIMIT, "n={n} too large");
        ExteriorClass { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, BigRational::one())
    }

    pub fn scalar(n: usize, c: BigRational) -> Self {
        let mut out = Self::zero(n);
        out.add_term(0, c);
        out
    }

    pub fn generator(n: usize, g: Generator) -> Self {
        let i = match g {
            Generator::U(i) | Generator::V(i) => i,
        };
        assert!((1..=n).contains(&i), "generator index {i} out of range 1..={n}");
        let mut out = Self::zero(n);
        out.add_term(1 << g.bit(n), BigRational::one());
        out
    }

    pub fn u(n: usize, i: usize) -> Self {
        Self::generator(n, Generator::U(i))
    }

    pub fn v(n: usize, i: usize) -> Self {
        Self::generator(n, Generator::V(i))
    }

    /// Wedge product of the listed generators in the given order.
    pub fn monomial(n: usize, gens: &[Generator]) -> Self {
        let mut bits: Vec<usize> = gens.iter().map(|g| g.bit(n)).collect();
        let mut out = Self::zero(n);
        if let Some(odd) = sort_with_sign(&mut bits) {
            let mask = bits.iter().fold(0u32, |m, &b| m | (1 << b));
            out.add_term(mask, if odd { -BigRational::one() } else { BigRational::one() });
        }
        out
    }

    /// `u_I ∧ v_I` for `I = {i_1 < ... < i_k}` (1-based), already sorted.
    pub fn u_v_block(n: usize, indices: &[usize]) -> Self {
        let mut gens: Vec<Generator> = indices.iter().map(|&i| Generator::U(i)).collect();
        gens.extend(indices.iter().map(|&i| Generator::V(i)));
        Self::monomial(n, &gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates `(mask, coefficient)` in mask order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, mask: u32) -> BigRational {
        self.terms.get(&mask).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Degree of a homogeneous class, `None` for zero or mixed classes.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.count_ones());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Component of cohomological degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        ExteriorClass {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.count_ones() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    fn add_term(&mut self, mask: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mask).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.n);
        for (m, x) in &self.terms {
            out.add_term(*m, x * c);
        }
        out
    }

    /// Cup product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.n);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let c = x * y;
                out.add_term(a | b, if merge_sign(*a, *b) { -c } else { c });
            }
        }
        Ok(out)
    }

    /// `k`-th wedge power, with `self^0 = 1`.
    pub fn power(&self, k: usize) -> Self {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = out.wedge(self).expect("same n");
        }
        out
    }

    /// Pullback along the coordinate permutation of the torus induced by
    /// `sigma`: `u_i ↦ u_{σ(i)}`, `v_i ↦ v_{σ(i)}`, extended multiplicatively.
    pub fn permutation_pullback(&self, sigma: &IndexPermutation) -> Result<Self> {
        if sigma.len() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: sigma.len() });
        }
        let n = self.n;
        let mut out = Self::zero(n);
        for (mask, c) in &self.terms {
            let mut bits: Vec<usize> = (0..2 * n)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| if b < n { sigma.image(b) } else { n + sigma.image(b - n) })
                .collect();
            let odd = sort_with_sign(&mut bits).expect("permutation is injective");
            let image = bits.iter().fold(0u32, |m, &b| m | (1 << b));
            out.add_term(image, if odd { -c.clone() } else { c.clone() });
        }
        Ok(out)
    }
}

impl fmt::Debug for ExteriorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExteriorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.n;
        for (idx, (mask, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if *mask == 0 {
                continue;
            }
            for b in 0..2 * n {
                if mask & (1 << b) != 0 {
                    if b < n {
                        write!(f, "·u{}", b + 1)?;
                    } else {
                        write!(f, "·v{}", b - n + 1)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A permutation of `{1..n}`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexPermutation {
    images: Vec<usize>,
}

impl IndexPermutation {
    /// `images[i]` is the 0-based image of `i`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidParameter(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(IndexPermutation { images })
    }

    /// From 1-based images, e.g. `[2, 1]` for the transposition `(1 2)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidParameter(format!("{images:?} is not 1-based")));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        IndexPermutation { images: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> Permutations {
        Permutations { next: Some((0..n).collect()) }
    }
}

pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = IndexPermutation;

    fn next(&mut self) -> Option<IndexPermutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // Standard lexicographic successor.
        if let Some(i) = (1..succ.len()).rev().find(|&i| succ[i - 1] < succ[i]) {
            let j = (i..succ.len()).rev().find(|&j| succ[j] > succ[i - 1]).unwrap();
            succ.swap(i - 1, j);
            succ[i..].reverse();
            self.next = Some(succ);
        }
        Some(IndexPermutation { images: current })
    }
}

/// `Ω = Σ u_i ∧ v_i`.
pub fn omega(n: usize) -> ExteriorClass {
    let mut out = ExteriorClass::zero(n);
    for i in 1..=n {
        out = out.add(&ExteriorClass::u_v_block(n, &[i])).unwrap();
    }
    out
}

/// One row of the power table of `Ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaPower {
    pub k: usize,
    /// `c_k` with `Ω^k = c_k Σ_{|I|=k} u_I ∧ v_I`, from direct expansion.
    pub coefficient: BigRational,
    /// The closed form `n!/(n-k)! · (-1)^k` for comparison.
    pub closed_form: BigRational,
}

impl OmegaPower {
    pub fn agrees(&self) -> bool {
        self.coefficient == self.closed_form
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(1, n, k, &mut cur, &mut out);
    out
}

/// Expands `Ω^k` for `k = 1..=n` and reads off the common coefficient on the
/// sorted monomials `u_I ∧ v_I`.
pub fn omega_power_table(n: usize) -> Result<Vec<OmegaPower>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if n > MASK_LIMIT {
        return Err(Error::TooLarge { n, cap: MASK_LIMIT });
    }
    let om = omega(n);
    let mut power = ExteriorClass::one(n);
    let mut rows = Vec::with_capacity(n);
    for k in 1..=n {
        power = power.wedge(&om)?;
        let subsets = k_subsets(n, k);
        let lead = power.coefficient(ExteriorClass::u_v_block(n, &subsets[0]).terms().next().unwrap().0);
        let mut expected = ExteriorClass::zero(n);
        for s in &subsets {
            expected = expected.add(&ExteriorClass::u_v_block(n, s))?;
        }
        if power != expected.scale(&lead) {
            return Err(Error::CheckFailed {
                step: "omega power shape",
                detail: format!("Ω^{k} is not a multiple of Σ u_I∧v_I: {power}"),
            });
        }
        let falling = factorial(n) / factorial(n - k);
        let sign = if k % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        rows.push(OmegaPower { k, coefficient: lead, closed_form: rat(falling * sign) });
    }
    Ok(rows)
}

/// Coefficients `a_{k,1}, ..., a_{k,⌊n/k⌋}` with
/// `Π_{σ ∈ S_n} (1 + ν_σ*(u_[k] ∧ v_[k])) = 1 + Σ_j a_{k,j} Ω^{jk}`.
///
/// The product is expanded directly; the result is rejected if anything
/// remains outside the subring generated by `Ω` or if `a_{k,1}` vanishes.
pub fn symmetrization_coefficients(n: usize, k: usize) -> Result<Vec<BigRational>> {
    symmetrization_coefficients_capped(n, k, DEFAULT_CAP)
}

pub fn symmetrization_coefficients_capped(n: usize, k: usize, cap: usize) -> Result<Vec<BigRational>> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    if n > cap || n > MASK_LIMIT {
        return Err(Error::TooLarge { n, cap: cap.min(MASK_LIMIT) });
    }
    let block: Vec<usize> = (1..=k).collect();
    let base = ExteriorClass::u_v_block(n, &block);
    let one = ExteriorClass::one(n);
    let mut product = one.clone();
    for sigma in IndexPermutation::all(n) {
        let factor = one.add(&base.permutation_pullback(&sigma)?)?;
        product = product.wedge(&factor)?;
    }

    let om = omega(n);
    let lead_mask = |d: usize| -> u32 { ((1u32 << d) - 1) | (((1u32 << d) - 1) << n) };
    let mut coeffs = Vec::new();
    let mut residual = product.sub(&one)?;
    for j in 1..=n / k {
        let power = om.power(j * k);
        let mask = lead_mask(j * k);
        let a = residual.coefficient(mask) / power.coefficient(mask);
        residual = residual.sub(&power.scale(&a))?;
        coeffs.push(a);
    }
    if !residual.is_zero() {
        return Err(Error::NonzeroResidual { n, k, detail: format!("{residual}") });
    }
    if coeffs[0].is_zero() {
        return Err(Error::CheckFailed { step: "a_{k,1} != 0", detail: format!("n={n}, k={k}") });
    }
    Ok(coeffs)
}

/// Whether every coefficient is an integer.
pub fn is_integral(c: &ExteriorClass) -> bool {
    c.terms().all(|(_, x)| x.is_integer())
}

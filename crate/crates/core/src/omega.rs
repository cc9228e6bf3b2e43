//! Truncated polynomial ring `Q[Ω]/(Ω^{n+1})` and the bundle descriptors whose
//! total Chern classes live in it.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factorial, rat};
use crate::error::{Error, Result};
use crate::exterior::symmetrization_coefficients;

/// `c_0 + c_1 Ω + ... + c_n Ω^n`.
#[derive(Clone, PartialEq, Eq)]
pub struct OmegaSeries {
    coeffs: Vec<BigRational>,
}

impl OmegaSeries {
    pub fn zero(n: usize) -> Self {
        OmegaSeries { coeffs: alloc::vec![BigRational::zero(); n + 1] }
    }

    pub fn one(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// Builds a series from the given coefficients, padding with zeros up to
    /// `Ω^n` and dropping anything above it.
    pub fn from_coeffs(n: usize, coeffs: impl IntoIterator<Item = BigRational>) -> Self {
        let mut s = Self::zero(n);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = c;
        }
        s
    }

    pub fn from_ints(n: usize, coeffs: &[i64]) -> Self {
        Self::from_coeffs(n, coeffs.iter().map(|&c| rat(c)))
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &BigRational {
        &self.coeffs[j]
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { left: self.n(), right: other.n() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(OmegaSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        OmegaSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Product truncated at `Ω^n`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.n();
        let mut out = Self::zero(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out.coeffs[i + j] += a * b;
            }
        }
        Ok(out)
    }

    /// Inverse of a series `1 + s`, as the alternating sum `Σ_{k≥0} (-s)^k`,
    /// which terminates because `s` has no constant term.
    pub fn inverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::NotUnitSeries(format!("{}", self.coeffs[0])));
        }
        let n = self.n();
        let mut minus_s = self.scale(&-BigRational::one());
        minus_s.coeffs[0] = BigRational::zero();
        let mut out = Self::one(n);
        let mut term = Self::one(n);
        for _ in 0..n {
            term = term.mul(&minus_s)?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Whether `c_j Ω^j` is an integral class for every `j`.
    ///
    /// `Ω^j / j!` is a primitive integral class on the torus, so the
    /// condition is `j! · c_j ∈ Z`.
    pub fn is_integral_class(&self) -> bool {
        self.first_non_integral().is_none()
    }

    pub fn first_non_integral(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(j, c)| !(*c * rat(factorial(*j))).is_integer())
            .map(|(j, _)| j)
    }

    /// Multiplies the `Ω^j` coefficient by `p^{2j}`.
    pub fn scale_degrees(&self, p: &BigInt) -> Self {
        let p2 = p * p;
        let mut factor = BigInt::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c * rat(factor.clone()));
            factor *= &p2;
        }
        OmegaSeries { coeffs }
    }
}

impl fmt::Debug for OmegaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for OmegaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})Ω")?,
                _ => write!(f, "({c})Ω^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// How a bundle was assembled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleLabel {
    /// `L_{n,p}^m`.
    LinePower { m: BigInt, p: u64 },
    /// `F_k(δ)`: the sum over `S_n` of permuted copies of a rank-`k` bundle.
    F { k: usize, delta: BigInt },
    /// `G_k(δ) = w* F_k(δ)` for the `p`-power map `w`.
    G { k: usize, delta: BigInt, p: u64 },
    DirectSum { parts: usize },
}

/// A complex vector bundle over `T^{2n}`, known through its rank and total
/// Chern class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleDescriptor {
    pub label: BundleLabel,
    pub rank: u64,
    pub chern: OmegaSeries,
}

impl BundleDescriptor {
    fn new(label: BundleLabel, rank: u64, chern: OmegaSeries) -> Result<Self> {
        if !chern.coeff(0).is_one() {
            return Err(Error::NotUnitSeries(format!("{}", chern.coeff(0))));
        }
        if let Some(degree) = chern.first_non_integral() {
            return Err(Error::NonIntegralChern { degree, value: format!("{}", chern.coeff(degree)) });
        }
        Ok(BundleDescriptor { label, rank, chern })
    }

    pub fn n(&self) -> usize {
        self.chern.n()
    }
}

/// `(k-1)!^j · a_{k,j}` for every `1 <= k <= n` and `1 <= j <= ⌊n/k⌋`.
///
/// These are the Ω-coefficients of `c(F_k(1))`: each of the `n!` summands of
/// `F_k(δ)` has top Chern class `δ (k-1)! u_[k] ∧ v_[k]` up to permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernTable {
    n: usize,
    rows: Vec<Vec<BigRational>>,
}

impl ChernTable {
    pub fn compute(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let mut rows = Vec::with_capacity(n);
        for k in 1..=n {
            let scale = rat(factorial(k - 1));
            let a = symmetrization_coefficients(n, k)?;
            let mut factor = BigRational::one();
            let row = a
                .into_iter()
                .map(|akj| {
                    factor *= &scale;
                    akj * &factor
                })
                .collect();
            rows.push(row);
        }
        Ok(ChernTable { n, rows })
    }

    /// Builds a table from stored values without recomputing anything.
    pub fn from_rows(n: usize, rows: Vec<Vec<BigRational>>) -> Result<Self> {
        if rows.len() != n || rows.iter().enumerate().any(|(i, r)| r.len() != n / (i + 1)) {
            return Err(Error::InvalidParameter(format!("malformed coefficient table for n={n}")));
        }
        Ok(ChernTable { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ã_{k,j}` (1-based).
    pub fn get(&self, k: usize, j: usize) -> &BigRational {
        &self.rows[k - 1][j - 1]
    }

    pub fn row(&self, k: usize) -> &[BigRational] {
        &self.rows[k - 1]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    /// `1 + Σ_j δ^j ã_{k,j} Ω^{jk}`.
    pub fn chern_f_series(&self, k: usize, delta: &BigInt) -> OmegaSeries {
        let mut s = OmegaSeries::one(self.n);
        let d = rat(delta.clone());
        let mut dj = BigRational::one();
        for (j, a) in self.row(k).iter().enumerate() {
            dj *= &d;
            s.coeffs[(j + 1) * k] = &dj * a;
        }
        s
    }
}

pub fn series_mul(a: &OmegaSeries, b: &OmegaSeries) -> Result<OmegaSeries> {
    a.mul(b)
}

pub fn series_inverse(a: &OmegaSeries) -> Result<OmegaSeries> {
    a.inverse()
}

/// `L_{n,p}^m`, whose first Chern class is `m p Ω`.
pub fn line_power_chern(n: usize, p: u64, m: &BigInt) -> Result<BundleDescriptor> {
    let c1 = rat(m * BigInt::from(p));
    let chern = OmegaSeries::from_coeffs(n, [BigRational::one(), c1]);
    BundleDescriptor::new(BundleLabel::LinePower { m: m.clone(), p }, 1, chern)
}

pub fn chern_f(n: usize, k: usize, delta: &BigInt) -> Result<BundleDescriptor> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    chern_f_with(&ChernTable::compute(n)?, k, delta)
}

pub fn chern_f_with(table: &ChernTable, k: usize, delta: &BigInt) -> Result<BundleDescriptor> {
    let n = table.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let rank = k as u64 * factorial_u64(n);
    BundleDescriptor::new(BundleLabel::F { k, delta: delta.clone() }, rank, table.chern_f_series(k, delta))
}

/// Pullback along the `p`-power map of the torus, which multiplies degree-`i`
/// cohomology by `p^i`.
pub fn pullback_w(b: &BundleDescriptor, p: u64) -> Result<BundleDescriptor> {
    let label = match &b.label {
        BundleLabel::F { k, delta } => BundleLabel::G { k: *k, delta: delta.clone(), p },
        other => other.clone(),
    };
    BundleDescriptor::new(label, b.rank, b.chern.scale_degrees(&BigInt::from(p)))
}

/// Whitney sum.
pub fn direct_sum(bs: &[BundleDescriptor]) -> Result<BundleDescriptor> {
    let first = bs.first().ok_or_else(|| Error::InvalidParameter("empty direct sum".into()))?;
    let mut chern = OmegaSeries::one(first.n());
    let mut rank = 0u64;
    for b in bs {
        chern = chern.mul(&b.chern)?;
        rank += b.rank;
    }
    BundleDescriptor::new(BundleLabel::DirectSum { parts: bs.len() }, rank, chern)
}

pub(crate) fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `n + 1 + n(n+1)/2 · n!`.
pub fn rank_formula(n: usize) -> u64 {
    let n64 = n as u64;
    n64 + 1 + n64 * (n64 + 1) / 2 * factorial_u64(n)
}

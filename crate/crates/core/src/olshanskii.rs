//! Subgroups of `(Γ_{n,p})^r` cut out by a family of symplectic forms with no
//! common `k`-dimensional isotropic subspace.
//!
//! Given `A_1..A_r ∈ GL(2n, F_p)` and `ω_j = ω(A_j ·, A_j ·)`, the subgroup
//! `Γ = {(γ_j) : A_1⁻¹η(γ_1) = ... = A_r⁻¹η(γ_r)}` has order `p^{2n+r}`, and two
//! of its elements commute iff their common image `η'` spans an isotropic
//! subspace for every `ω_j`.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::brute::FiniteGroup;
use crate::construction::olshanskii_k;
use crate::error::{Error, Result};
use crate::fp::FpMatrix;
use crate::heisenberg::{HeisenbergElement, HeisenbergGroup, SymplecticForm};
use crate::isotropic::{self, find_common_isotropic, CommonIsotropic, SearchStats};

/// Default number of random families tried.
pub const SEARCH_ATTEMPTS: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSubgroupSpec {
    pub n: usize,
    pub p: u64,
    pub r: usize,
    pub k: usize,
    pub mats: Vec<FpMatrix>,
    pub forms: Vec<SymplecticForm>,
}

impl ProductSubgroupSpec {
    /// Builds the spec from matrices, deriving `ω_j = ω(A_j ·, A_j ·)`.
    pub fn from_matrices(n: usize, p: u64, k: usize, mats: Vec<FpMatrix>) -> Result<Self> {
        let r = mats.len();
        if r < 2 {
            return Err(Error::InvalidParameter(format!("need r >= 2, got r={r}")));
        }
        if k == 0 || 4 * n >= r * (k - 1) {
            return Err(Error::InvalidParameter(format!("4n < r(k-1) fails for n={n}, r={r}, k={k}")));
        }
        let omega = SymplecticForm::standard(n, p);
        let forms = mats.iter().map(|a| omega.pullback(a)).collect::<Result<Vec<_>>>()?;
        Ok(ProductSubgroupSpec { n, p, r, k, mats, forms })
    }

    /// Checks that every stored form equals the pullback of the standard
    /// form along the matching stored matrix.
    pub fn is_consistent(&self) -> bool {
        let omega = SymplecticForm::standard(self.n, self.p);
        self.mats.len() == self.r
            && self.forms.len() == self.r
            && self.mats.iter().zip(&self.forms).all(|(a, f)| omega.pullback(a).as_ref() == Ok(f))
    }
}

/// Record of one attempted family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attempt {
    pub index: u64,
    /// A common isotropic `k`-subspace refuting this family, if one exists.
    pub witness: Option<isotropic::Subspace>,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OlshanskiiCertificate {
    pub spec: ProductSubgroupSpec,
    pub seed: u64,
    pub attempts: Vec<Attempt>,
    /// Number of `k`-dimensional subspaces covered by the final check.
    pub candidates: u64,
    /// Set when `k > 2n`, where no `k`-dimensional subspace exists at all.
    pub vacuous: bool,
}

/// Seeded search for `A_1 = I, A_2..A_r` whose induced forms have no common
/// isotropic subspace of dimension `k = ⌊4n/r⌋ + 2`.
///
/// `verify` decides each candidate family exhaustively; see
/// [`find_common_isotropic`] for the sequential default.
pub fn olshanskii_search_with(
    n: usize,
    r: usize,
    p: u64,
    seed: u64,
    max_attempts: u64,
    verify: &mut dyn FnMut(&[SymplecticForm], usize) -> Result<CommonIsotropic>,
) -> Result<OlshanskiiCertificate> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("need r >= 2, got r={r}")));
    }
    HeisenbergGroup::new(n, p)?;
    let k = olshanskii_k(n, r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = Vec::new();
    for index in 0..max_attempts {
        let mut mats = alloc::vec![FpMatrix::identity(p, 2 * n)];
        for _ in 1..r {
            mats.push(FpMatrix::random_invertible(p, 2 * n, &mut rng));
        }
        let spec = ProductSubgroupSpec::from_matrices(n, p, k, mats)?;
        let vacuous = k > 2 * n;
        let result = if vacuous {
            CommonIsotropic { witness: None, stats: SearchStats::default(), candidates: 0 }
        } else {
            verify(&spec.forms, k)?
        };
        attempts.push(Attempt { index, witness: result.witness.clone(), stats: result.stats });
        if result.witness.is_none() {
            return Ok(OlshanskiiCertificate { spec, seed, attempts, candidates: result.candidates, vacuous });
        }
    }
    Err(Error::SearchExhausted { what: "no family without a common isotropic subspace", attempts: max_attempts })
}

pub fn olshanskii_search(n: usize, r: usize, p: u64, seed: u64) -> Result<OlshanskiiCertificate> {
    olshanskii_search_with(n, r, p, seed, SEARCH_ATTEMPTS, &mut |forms, k| {
        find_common_isotropic(forms, k, isotropic::ENUMERATION_BUDGET)
    })
}

/// Exponents of `|Γ|` and of the abelian-subgroup bound, plus the exact
/// abelian exponent `r + (max common isotropic dimension)` when it could be
/// computed within `budget`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductBound {
    pub order_exponent: u64,
    pub abelian_bound_exponent: u64,
    pub exact_abelian_exponent: Option<u64>,
}

pub fn product_subgroup_bound(spec: &ProductSubgroupSpec, budget: u64) -> Result<ProductBound> {
    if !spec.is_consistent() {
        return Err(Error::CheckFailed { step: "spec consistency", detail: "forms do not match matrices".into() });
    }
    if spec.k <= 2 * spec.n {
        let check = find_common_isotropic(&spec.forms, spec.k, budget)?;
        if let Some(w) = check.witness {
            return Err(Error::CheckFailed { step: "no common k-isotropic subspace", detail: format!("{w:?}") });
        }
    }
    let exact = match isotropic::max_common_isotropic_dim(&spec.forms, budget) {
        Ok(d) => Some((spec.r + d) as u64),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ProductBound {
        order_exponent: (2 * spec.n + spec.r) as u64,
        abelian_bound_exponent: (spec.r + spec.k) as u64,
        exact_abelian_exponent: exact,
    })
}

/// The subgroup `Γ ⊂ (Γ_{n,p})^r` as a concrete group, elements indexed by
/// `(v, z) ∈ F_p^{2n} × F_p^r` with `γ_j = (A_j v, z_j)`.
pub struct ProductSubgroup<'a> {
    spec: &'a ProductSubgroupSpec,
    group: HeisenbergGroup,
}

impl<'a> ProductSubgroup<'a> {
    pub fn new(spec: &'a ProductSubgroupSpec) -> Result<Self> {
        Ok(ProductSubgroup { spec, group: HeisenbergGroup::new(spec.n, spec.p)? })
    }

    pub fn element(&self, v: &[u64], z: &[u64]) -> Vec<HeisenbergElement> {
        self.spec.mats.iter().zip(z).map(|(a, &zj)| self.group.lift(&a.apply(v), zj)).collect()
    }

    /// `η'(γ) = A_1⁻¹ η(γ_1)`.
    pub fn eta_prime(&self, g: &[HeisenbergElement]) -> Vec<u64> {
        let inv = self.spec.mats[0].inverse().expect("invertible");
        inv.apply(&g[0].eta())
    }

    pub fn is_member(&self, g: &[HeisenbergElement]) -> bool {
        let v = self.eta_prime(g);
        g.iter().zip(&self.spec.mats).all(|(gj, a)| gj.eta() == a.apply(&v))
    }

    pub fn mul(&self, g: &[HeisenbergElement], h: &[HeisenbergElement]) -> Vec<HeisenbergElement> {
        g.iter().zip(h).map(|(a, b)| self.group.mul(a, b).expect("same group")).collect()
    }

    pub fn commute(&self, g: &[HeisenbergElement], h: &[HeisenbergElement]) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    fn coords(&self, mut idx: usize) -> (Vec<u64>, Vec<u64>) {
        let p = self.spec.p as usize;
        let mut digits = alloc::vec![0u64; 2 * self.spec.n + self.spec.r];
        for d in digits.iter_mut().rev() {
            *d = (idx % p) as u64;
            idx /= p;
        }
        let z = digits.split_off(2 * self.spec.n);
        (digits, z)
    }

    fn index(&self, g: &[HeisenbergElement]) -> usize {
        let p = self.spec.p as usize;
        let v = self.eta_prime(g);
        v.iter().chain(g.iter().map(|e| &e.z)).fold(0, |acc, &d| acc * p + d as usize)
    }

    pub fn element_at(&self, idx: usize) -> Vec<HeisenbergElement> {
        let (v, z) = self.coords(idx);
        self.element(&v, &z)
    }
}

impl FiniteGroup for ProductSubgroup<'_> {
    fn order(&self) -> usize {
        (self.spec.p as usize).pow((2 * self.spec.n + self.spec.r) as u32)
    }

    fn identity_index(&self) -> usize {
        0
    }

    fn mul_index(&self, a: usize, b: usize) -> usize {
        self.index(&self.mul(&self.element_at(a), &self.element_at(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuous_small_case() {
        let cert = olshanskii_search(1, 2, 3, 7).unwrap();
        assert!(cert.vacuous);
        assert_eq!(cert.spec.k, 4);
        assert_eq!(cert.spec.mats[0], FpMatrix::identity(3, 2));
        assert!(cert.spec.is_consistent());
    }

    #[test]
    fn r_must_exceed_one() {
        assert!(matches!(olshanskii_search(1, 1, 3, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn equal_matrices_share_a_lagrangian() {
        let id = FpMatrix::identity(3, 2);
        // k is irrelevant to the exact bound; use the vacuous k for n = 1, r = 2.
        let spec = ProductSubgroupSpec::from_matrices(1, 3, 4, alloc::vec![id.clone(), id]).unwrap();
        let b = product_subgroup_bound(&spec, isotropic::ENUMERATION_BUDGET).unwrap();
        assert_eq!(b.order_exponent, 4);
        assert_eq!(b.abelian_bound_exponent, 6);
        assert_eq!(b.exact_abelian_exponent, Some(3));
    }

    #[test]
    fn product_elements_are_members() {
        let cert = olshanskii_search(1, 2, 3, 1).unwrap();
        let g = ProductSubgroup::new(&cert.spec).unwrap();
        assert_eq!(FiniteGroup::order(&g), 81);
        for idx in 0..81 {
            let e = g.element_at(idx);
            assert!(g.is_member(&e));
            assert_eq!(g.index(&e), idx);
        }
    }
}

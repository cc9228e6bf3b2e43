//! Subspaces of `F_p^d` in reduced row echelon form, and exhaustive search
//! for subspaces isotropic under a family of alternating forms.
//!
//! Echelon bases are built from the bottom row up. A row with pivot `c` has
//! a one at `c`, zeros left of `c` and at every pivot already placed below
//! it, and free entries elsewhere. Every subspace is therefore visited
//! exactly once, and partial bases that are already non-isotropic are
//! pruned.

use alloc::format;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::fp::FpMatrix;
use crate::heisenberg::SymplecticForm;

/// Default cap on the number of candidate subspaces.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// A subspace of `F_p^d` given by its reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    pub p: u64,
    pub ambient: usize,
    pub basis: Vec<Vec<u64>>,
}

impl Subspace {
    /// Row space of `vectors`, canonicalized.
    pub fn span(p: u64, ambient: usize, vectors: &[Vec<u64>]) -> Self {
        if vectors.is_empty() {
            return Subspace { p, ambient, basis: Vec::new() };
        }
        let (red, pivots) = FpMatrix::from_rows(p, vectors).rref();
        Subspace { p, ambient, basis: (0..pivots.len()).map(|i| red.row(i).to_vec()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_isotropic(&self, form: &SymplecticForm) -> bool {
        self.basis
            .iter()
            .enumerate()
            .all(|(i, u)| self.basis[..i].iter().all(|v| form.eval(u, v) == 0))
    }

    pub fn is_canonical(&self) -> bool {
        *self == Subspace::span(self.p, self.ambient, &self.basis) && self.basis.len() == self.rank()
    }

    fn rank(&self) -> usize {
        if self.basis.is_empty() {
            0
        } else {
            FpMatrix::from_rows(self.p, &self.basis).rank()
        }
    }
}

/// Number of `k`-dimensional subspaces of `F_p^d`.
pub fn gaussian_binomial(d: usize, k: usize, p: u64) -> BigUint {
    if k > d {
        return BigUint::from(0u32);
    }
    let pb = BigUint::from(p);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= num_traits::pow(pb.clone(), d - i) - 1u32;
        den *= num_traits::pow(pb.clone(), i + 1) - 1u32;
    }
    num / den
}

/// Statistics from one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Partial echelon bases examined.
    pub nodes: u64,
    /// Complete isotropic subspaces reported.
    pub found: u64,
}

impl SearchStats {
    pub fn merge(self, other: SearchStats) -> SearchStats {
        SearchStats { nodes: self.nodes + other.nodes, found: self.found + other.found }
    }
}

fn check_forms(forms: &[SymplecticForm]) -> Result<(u64, usize)> {
    let first = forms.first().ok_or_else(|| Error::InvalidParameter("no forms given".into()))?;
    let (p, d) = (first.p(), first.dim());
    if forms.iter().any(|f| f.p() != p || f.dim() != d) {
        return Err(Error::InvalidParameter("forms differ in p or dimension".into()));
    }
    Ok((p, d))
}

/// Candidate bottom rows. Each is an independent branch of the search.
pub fn branches(p: u64, ambient: usize, k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    if k == 0 || k > ambient {
        return out;
    }
    // The bottom pivot leaves room for k-1 pivots to its left.
    for c in k - 1..ambient {
        let _ = for_each_row(p, ambient, c, &[], &mut |row| {
            out.push(row.to_vec());
            ControlFlow::Continue(())
        });
    }
    out
}

/// Calls `f` with every echelon row having pivot `c` and zeros at `taken`.
fn for_each_row(p: u64, d: usize, c: usize, taken: &[usize], f: &mut dyn FnMut(&[u64]) -> ControlFlow<()>) -> ControlFlow<()> {
    let free: Vec<usize> = (c + 1..d).filter(|j| !taken.contains(j)).collect();
    let mut row = alloc::vec![0u64; d];
    row[c] = 1;
    loop {
        f(&row)?;
        // Odometer over the free positions.
        let mut i = 0;
        loop {
            if i == free.len() {
                return ControlFlow::Continue(());
            }
            let j = free[i];
            row[j] += 1;
            if row[j] < p {
                break;
            }
            row[j] = 0;
            i += 1;
        }
    }
}

fn pivot_of(row: &[u64]) -> usize {
    row.iter().position(|&x| x != 0).unwrap()
}

struct Search<'a, 'f> {
    forms: &'a [SymplecticForm],
    p: u64,
    d: usize,
    k: usize,
    stats: SearchStats,
    visit: &'f mut dyn FnMut(&Subspace) -> ControlFlow<()>,
}

impl Search<'_, '_> {
    fn compatible(&self, rows: &[Vec<u64>], row: &[u64]) -> bool {
        rows.iter().all(|r| self.forms.iter().all(|f| f.eval(row, r) == 0))
    }

    /// `rows` holds the basis from the bottom up.
    fn extend(&mut self, rows: &mut Vec<Vec<u64>>, pivots: &mut Vec<usize>) -> ControlFlow<()> {
        self.stats.nodes += 1;
        if rows.len() == self.k {
            self.stats.found += 1;
            let basis = rows.iter().rev().cloned().collect();
            return (self.visit)(&Subspace { p: self.p, ambient: self.d, basis });
        }
        let left = self.k - rows.len() - 1;
        let top = *pivots.last().unwrap();
        for c in left..top {
            let mut accepted = Vec::new();
            let _ = for_each_row(self.p, self.d, c, pivots, &mut |row| {
                if self.compatible(rows, row) {
                    accepted.push(row.to_vec());
                }
                ControlFlow::Continue(())
            });
            for row in accepted {
                rows.push(row);
                pivots.push(c);
                let flow = self.extend(rows, pivots);
                rows.pop();
                pivots.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Searches the branch rooted at bottom row `branch`, calling `visit` on
/// every `k`-dimensional subspace isotropic for all `forms`.
pub fn search_branch(
    forms: &[SymplecticForm],
    k: usize,
    branch: &[u64],
    visit: &mut dyn FnMut(&Subspace) -> ControlFlow<()>,
) -> Result<(SearchStats, ControlFlow<()>)> {
    let (p, d) = check_forms(forms)?;
    if branch.len() != d || branch.iter().all(|&x| x == 0) {
        return Err(Error::InvalidParameter(format!("branch {branch:?} is not a nonzero vector of length {d}")));
    }
    let mut s = Search { forms, p, d, k, stats: SearchStats::default(), visit };
    let mut rows = alloc::vec![branch.to_vec()];
    let mut pivots = alloc::vec![pivot_of(branch)];
    let flow = s.extend(&mut rows, &mut pivots);
    Ok((s.stats, flow))
}

fn check_budget(d: usize, k: usize, p: u64, budget: u64) -> Result<u64> {
    let count = gaussian_binomial(d, k, p);
    match count.to_u64() {
        Some(c) if c <= budget => Ok(c),
        _ => Err(Error::BudgetExceeded { what: "subspace count", needed: format!("{count}"), budget }),
    }
}

/// Every `k`-dimensional subspace isotropic for all `forms`.
pub fn enumerate_isotropic(forms: &[SymplecticForm], k: usize, budget: u64) -> Result<Vec<Subspace>> {
    let (p, d) = check_forms(forms)?;
    if k > d {
        return Err(Error::InvalidParameter(format!("k={k} exceeds the ambient dimension {d}")));
    }
    check_budget(d, k, p, budget)?;
    if k == 0 {
        return Ok(alloc::vec![Subspace { p, ambient: d, basis: Vec::new() }]);
    }
    let mut out = Vec::new();
    for b in branches(p, d, k) {
        let _ = search_branch(forms, k, &b, &mut |s| {
            out.push(s.clone());
            ControlFlow::Continue(())
        })?;
    }
    Ok(out)
}

/// Outcome of a short-circuiting existence search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonIsotropic {
    pub witness: Option<Subspace>,
    pub stats: SearchStats,
    /// Number of `k`-dimensional subspaces covered by the search.
    pub candidates: u64,
}

/// Finds one common isotropic `k`-dimensional subspace, or certifies there
/// is none.
pub fn find_common_isotropic(forms: &[SymplecticForm], k: usize, budget: u64) -> Result<CommonIsotropic> {
    let (p, d) = check_forms(forms)?;
    if k > d {
        return Ok(CommonIsotropic { witness: None, stats: SearchStats::default(), candidates: 0 });
    }
    let candidates = check_budget(d, k, p, budget)?;
    if k == 0 {
        let witness = Some(Subspace { p, ambient: d, basis: Vec::new() });
        return Ok(CommonIsotropic { witness, stats: SearchStats::default(), candidates });
    }
    let mut stats = SearchStats::default();
    let mut witness = None;
    for b in branches(p, d, k) {
        let (s, flow) = search_branch(forms, k, &b, &mut |s| {
            witness = Some(s.clone());
            ControlFlow::Break(())
        })?;
        stats = stats.merge(s);
        if flow.is_break() {
            break;
        }
    }
    Ok(CommonIsotropic { witness, stats, candidates })
}

/// Largest dimension of a subspace isotropic for all `forms`, searching
/// upward from dimension one.
pub fn max_common_isotropic_dim(forms: &[SymplecticForm], budget: u64) -> Result<usize> {
    let (_, d) = check_forms(forms)?;
    let mut best = 0;
    for k in 1..=d {
        if find_common_isotropic(forms, k, budget)?.witness.is_none() {
            break;
        }
        best = k;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_counts() {
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(8, 6, 3), BigUint::from(896_260u32));
        assert_eq!(gaussian_binomial(3, 5, 3), BigUint::from(0u32));
    }

    #[test]
    fn enumeration_count_matches_gaussian_binomial() {
        // every line is isotropic for an alternating form
        let f = SymplecticForm::standard(2, 3);
        let lines = enumerate_isotropic(&[f], 1, ENUMERATION_BUDGET).unwrap();
        assert_eq!(lines.len() as u64, gaussian_binomial(4, 1, 3).to_u64().unwrap());
        assert!(lines.iter().all(Subspace::is_canonical));
    }

    #[test]
    fn lagrangians_of_standard_form() {
        for &(n, p) in &[(1usize, 3u64), (2, 3), (1, 5), (2, 5)] {
            let f = SymplecticForm::standard(n, p);
            let lag = enumerate_isotropic(core::slice::from_ref(&f), n, ENUMERATION_BUDGET).unwrap();
            // Number of Lagrangians in F_p^{2n} is Π_{i=1}^n (p^i + 1).
            let expected: u64 = (1..=n as u32).map(|i| p.pow(i) + 1).product();
            assert_eq!(lag.len() as u64, expected);
            assert!(lag.iter().all(|s| s.is_isotropic(&f)));
            assert!(enumerate_isotropic(&[f], n + 1, ENUMERATION_BUDGET).unwrap().is_empty());
        }
    }

    #[test]
    fn budget_guard() {
        let f = SymplecticForm::standard(4, 3);
        assert!(matches!(enumerate_isotropic(&[f], 4, 1000), Err(Error::BudgetExceeded { .. })));
    }
}

//! Heisenberg groups, their abelian subgroups, and the product subgroups
//! cut out by families of symplectic forms.

use nonjordan_core::brute::{max_abelian_order, FiniteGroup};
use nonjordan_core::fp::FpMatrix;
use nonjordan_core::heisenberg::{
    brute_force_lambda, commutator_law_exhaustive, max_abelian_exponent, HeisenbergElement, HeisenbergGroup,
    SymplecticForm, BRUTE_FORCE_BUDGET,
};
use nonjordan_core::isotropic::{self, Subspace};
use nonjordan_core::olshanskii::{olshanskii_search, product_subgroup_bound, ProductSubgroup, ProductSubgroupSpec};
use nonjordan_core::{BigRational, Error};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

/// `Σ x_i y'_i - y_i x'_i mod p`, written out without the matrix type.
fn omega_direct(n: usize, p: u64, v: &[u64], w: &[u64]) -> u64 {
    let mut acc = 0i64;
    for i in 0..n {
        acc += (v[i] * w[n + i]) as i64 - (v[n + i] * w[i]) as i64;
    }
    acc.rem_euclid(p as i64) as u64
}

fn element(n: usize, p: u64) -> impl Strategy<Value = HeisenbergElement> {
    (prop::collection::vec(0..p, n), prop::collection::vec(0..p, n), 0..p)
        .prop_map(move |(x, y, z)| HeisenbergElement::new(p, x, y, z))
}

fn group_case() -> impl Strategy<Value = (HeisenbergGroup, HeisenbergElement, HeisenbergElement, HeisenbergElement)> {
    prop::sample::select(vec![(1usize, 3u64), (1, 5), (2, 3), (2, 5), (3, 7)]).prop_flat_map(|(n, p)| {
        (Just(HeisenbergGroup::new(n, p).unwrap()), element(n, p), element(n, p), element(n, p))
    })
}

proptest! {
    #[test]
    fn group_axioms((g, a, b, c) in group_case()) {
        let id = g.identity();
        prop_assert_eq!(g.mul(&g.mul(&a, &b).unwrap(), &c).unwrap(), g.mul(&a, &g.mul(&b, &c).unwrap()).unwrap());
        prop_assert_eq!(g.mul(&a, &id).unwrap(), a.clone());
        prop_assert_eq!(g.mul(&id, &a).unwrap(), a.clone());
        let inv = g.inverse(&a).unwrap();
        prop_assert!(g.mul(&a, &inv).unwrap().is_identity());
        prop_assert!(g.mul(&inv, &a).unwrap().is_identity());
        prop_assert!(g.pow(&a, g.p).unwrap().is_identity());
    }

    #[test]
    fn commutator_is_the_form((g, a, b, _) in group_case()) {
        let c = g.commutator(&a, &b).unwrap();
        let w = omega_direct(g.n, g.p, &a.eta(), &b.eta());
        prop_assert_eq!(c, HeisenbergElement::new(g.p, vec![0; g.n], vec![0; g.n], w));
        prop_assert_eq!(SymplecticForm::standard(g.n, g.p).eval(&a.eta(), &b.eta()), w);
    }

    #[test]
    fn eta_is_a_homomorphism((g, a, b, _) in group_case()) {
        let p = g.p;
        let sum: Vec<u64> = a.eta().iter().zip(b.eta()).map(|(s, t)| (s + t) % p).collect();
        prop_assert_eq!(g.mul(&a, &b).unwrap().eta(), sum);
        // kernel of η is ⟨f⟩
        let in_kernel = a.eta().iter().all(|&t| t == 0);
        prop_assert_eq!(in_kernel, (0..p).any(|k| g.pow(&g.f(), k).unwrap() == a));
    }
}

#[test]
fn presentation_relations() {
    for (n, p) in [(1usize, 3u64), (2, 3), (2, 5), (3, 3)] {
        let g = HeisenbergGroup::new(n, p).unwrap();
        let f = g.f();
        assert!(g.pow(&f, p).unwrap().is_identity());
        for i in 1..=n {
            assert!(g.pow(&g.a(i), p).unwrap().is_identity());
            assert!(g.pow(&g.b(i), p).unwrap().is_identity());
            assert!(g.commutator(&g.a(i), &f).unwrap().is_identity());
            assert!(g.commutator(&g.b(i), &f).unwrap().is_identity());
            for j in 1..=n {
                assert!(g.commutator(&g.a(i), &g.a(j)).unwrap().is_identity());
                assert!(g.commutator(&g.b(i), &g.b(j)).unwrap().is_identity());
                let ab = g.commutator(&g.a(i), &g.b(j)).unwrap();
                if i == j {
                    assert_eq!(ab, f);
                } else {
                    assert!(ab.is_identity());
                }
            }
        }
    }
}

#[test]
fn order_and_elements() {
    let g = HeisenbergGroup::new(2, 3).unwrap();
    assert_eq!(g.order(), Some(243));
    let all: std::collections::BTreeSet<_> = g.elements().map(|e| (e.x, e.y, e.z)).collect();
    assert_eq!(all.len(), 243);
    assert!(matches!(HeisenbergGroup::new(1, 2), Err(Error::EvenPrime(2))));
    assert!(matches!(HeisenbergGroup::new(1, 9), Err(Error::NotPrime(9))));
}

#[test]
fn commutator_law_on_all_pairs() {
    let (pairs, bad) = commutator_law_exhaustive(2, 3, BRUTE_FORCE_BUDGET).unwrap();
    assert_eq!((pairs, bad), (243 * 243, 0));
    let (pairs, bad) = commutator_law_exhaustive(1, 5, BRUTE_FORCE_BUDGET).unwrap();
    assert_eq!((pairs, bad), (125 * 125, 0));
}

#[test]
fn abelian_bound_is_sharp() {
    let two_thirds = BigRational::new(2.into(), 3.into());
    assert_eq!(brute_force_lambda(1, 3, BRUTE_FORCE_BUDGET).unwrap(), (9, two_thirds.clone()));
    assert_eq!(brute_force_lambda(1, 5, BRUTE_FORCE_BUDGET).unwrap(), (25, two_thirds));
    assert_eq!(brute_force_lambda(2, 3, BRUTE_FORCE_BUDGET).unwrap(), (27, BigRational::new(3.into(), 5.into())));
    assert_eq!(max_abelian_exponent(1, 3).unwrap(), 2);
    assert_eq!(max_abelian_exponent(2, 3).unwrap(), 3);
    assert_eq!(max_abelian_exponent(3, 101).unwrap(), 4);
    assert!(matches!(brute_force_lambda(3, 101, BRUTE_FORCE_BUDGET), Err(Error::BudgetExceeded { .. })));
}

/// Echelon matrices listed pivot set by pivot set, with no pruning.
fn all_subspaces(p: u64, d: usize, k: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    for pivots in (0u32..1 << d).filter(|m| m.count_ones() as usize == k) {
        let piv: Vec<usize> = (0..d).filter(|i| pivots >> i & 1 == 1).collect();
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| (c + 1..d).filter(|j| !piv.contains(j)).map(move |j| (r, j)))
            .collect();
        let total = p.pow(free.len() as u32);
        for mut code in 0..total {
            let mut rows = vec![vec![0u64; d]; k];
            for (r, &c) in piv.iter().enumerate() {
                rows[r][c] = 1;
            }
            for &(r, j) in &free {
                rows[r][j] = code % p;
                code /= p;
            }
            out.push(Subspace { p, ambient: d, basis: rows });
        }
    }
    out
}

fn random_forms(n: usize, p: u64, r: usize, seed: u64) -> Vec<SymplecticForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = SymplecticForm::standard(n, p);
    (0..r).map(|_| omega.pullback(&FpMatrix::random_invertible(p, 2 * n, &mut rng)).unwrap()).collect()
}

#[test]
fn isotropic_search_matches_unpruned_listing() {
    for (n, p, r, seed) in [(1usize, 3u64, 1usize, 0u64), (2, 3, 1, 1), (2, 3, 2, 2), (2, 5, 2, 3), (3, 3, 2, 4), (2, 3, 3, 5)] {
        let forms = random_forms(n, p, r, seed);
        for k in 1..=2 * n {
            let listing = all_subspaces(p, 2 * n, k);
            assert_eq!(listing.len() as u64, isotropic::gaussian_binomial(2 * n, k, p).try_into().unwrap());
            let mut expected: Vec<Subspace> =
                listing.into_iter().filter(|s| forms.iter().all(|f| s.is_isotropic(f))).collect();
            let mut got = isotropic::enumerate_isotropic(&forms, k, isotropic::ENUMERATION_BUDGET).unwrap();
            expected.sort();
            got.sort();
            assert_eq!(got, expected, "n={n} p={p} r={r} k={k}");
            let found = isotropic::find_common_isotropic(&forms, k, isotropic::ENUMERATION_BUDGET).unwrap();
            assert_eq!(found.witness.is_some(), !expected.is_empty());
        }
        if r == 1 {
            assert_eq!(isotropic::max_common_isotropic_dim(&forms, isotropic::ENUMERATION_BUDGET).unwrap(), n);
        }
    }
}

#[test]
fn standard_form_isotropic_dimension() {
    for (n, p) in [(1usize, 3u64), (2, 3), (3, 3), (2, 5), (4, 3)] {
        let f = [SymplecticForm::standard(n, p)];
        // the pruned search never visits most of the [2n, n]_p candidates
        assert!(isotropic::find_common_isotropic(&f, n, u64::MAX).unwrap().witness.is_some());
        assert!(isotropic::find_common_isotropic(&f, n + 1, u64::MAX).unwrap().witness.is_none());
    }
}

#[test]
fn olshanskii_examples() {
    let cert = olshanskii_search(1, 2, 3, 7).unwrap();
    assert!(cert.vacuous);
    let b = product_subgroup_bound(&cert.spec, isotropic::ENUMERATION_BUDGET).unwrap();
    assert_eq!((b.order_exponent, b.abelian_bound_exponent), (4, 6));
    assert!(matches!(olshanskii_search(2, 1, 5, 0), Err(Error::InvalidParameter(_))));

    let cert = olshanskii_search(4, 4, 3, 7).unwrap();
    assert_eq!(cert.spec.k, 6);
    assert_eq!(cert.candidates, 896_260);
    assert!(cert.attempts.last().unwrap().witness.is_none());
    let b = product_subgroup_bound(&cert.spec, isotropic::ENUMERATION_BUDGET).unwrap();
    assert_eq!((b.order_exponent, b.abelian_bound_exponent), (12, 10));
}

#[test]
fn same_seed_same_family() {
    let a = olshanskii_search(2, 3, 5, 42).unwrap();
    let b = olshanskii_search(2, 3, 5, 42).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.spec.mats, olshanskii_search(2, 3, 5, 43).unwrap().spec.mats);
}

fn product_spec(seed: u64) -> ProductSubgroupSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats = vec![FpMatrix::identity(3, 2), FpMatrix::random_invertible(3, 2, &mut rng)];
    ProductSubgroupSpec::from_matrices(1, 3, 4, mats).unwrap()
}

proptest! {
    #[test]
    fn commutation_is_common_isotropy(seed in 0u64..50, a in 0usize..81, b in 0usize..81) {
        let spec = product_spec(seed);
        let g = ProductSubgroup::new(&spec).unwrap();
        let (x, y) = (g.element_at(a), g.element_at(b));
        let (vx, vy) = (g.eta_prime(&x), g.eta_prime(&y));
        let isotropic = spec.forms.iter().all(|f| f.eval(&vx, &vy) == 0);
        prop_assert_eq!(g.commute(&x, &y), isotropic);
    }
}

#[test]
fn product_subgroup_abelian_order() {
    for seed in 0..6 {
        let spec = product_spec(seed);
        let g = ProductSubgroup::new(&spec).unwrap();
        let bound = product_subgroup_bound(&spec, isotropic::ENUMERATION_BUDGET).unwrap();
        let brute = max_abelian_order(&g) as u64;
        assert_eq!(FiniteGroup::order(&g), 81);
        assert_eq!(Some(brute), bound.exact_abelian_exponent.map(|e| 3u64.pow(e as u32)), "seed {seed}");
        assert!(bound.exact_abelian_exponent.unwrap() <= bound.abelian_bound_exponent);
    }
}

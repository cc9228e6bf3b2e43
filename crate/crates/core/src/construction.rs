//! The arithmetic behind the effective `Γ_{n,p}`-action on a stably trivial
//! bundle: roots of unity modulo `p^n`, the constant `M(n)`, the integers
//! `δ_1..δ_n` that cancel the Chern classes of the line-bundle part, and the
//! certificate assembling all of it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{big_pow, is_prime, least_multiple_of, least_scaling_into, lcm, prime_factors, rat};
use crate::error::{Error, Result};
use crate::exterior::{omega_power_table, OmegaPower};
use crate::heisenberg;
use crate::omega::{
    chern_f_with, direct_sum, line_power_chern, pullback_w, rank_formula, BundleDescriptor, ChernTable,
    OmegaSeries,
};

/// Default ceiling for [`find_prime`].
pub const PRIME_SEARCH_CEILING: u64 = 1_000_000;

/// How integer representatives of residues mod `p^n` are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LiftMode {
    /// Representatives in `[0, p^n)`.
    #[default]
    LeastNonnegative,
    /// Representatives in `(-p^n/2, p^n/2]`.
    Symmetric,
}

/// The `n+1` solutions of `α^{n+1} = 1` in `(Z/p^n)^*` with integer lifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootFamily {
    pub n: usize,
    pub p: u64,
    /// Sorted residues in `[0, p^n)`.
    pub residues: Vec<BigInt>,
    /// `lifts[j] ≡ residues[j] (mod p^n)`.
    pub lifts: Vec<BigInt>,
}

impl RootFamily {
    pub fn modulus(&self) -> BigInt {
        big_pow(&BigInt::from(self.p), self.n)
    }

    /// Replaces the lifts, checking the congruences.
    pub fn with_lifts(&self, lifts: Vec<BigInt>) -> Result<Self> {
        let q = self.modulus();
        if lifts.len() != self.residues.len()
            || lifts.iter().zip(&self.residues).any(|(a, r)| !(a - r).is_multiple_of(&q))
        {
            return Err(Error::InvalidParameter(format!("lifts {lifts:?} do not match residues mod {q}")));
        }
        Ok(RootFamily { lifts, ..self.clone() })
    }
}

fn check_prime(n: usize, p: u64) -> Result<()> {
    if p.is_multiple_of(2) {
        return Err(if p == 2 { Error::EvenPrime(p) } else { Error::NotPrime(p) });
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let modulus = n as u64 + 1;
    if p % modulus != 1 {
        return Err(Error::NotCongruent { p, modulus });
    }
    Ok(())
}

fn primitive_root_mod_p(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| crate::arith::pow_mod(g, (p - 1) / q, p) != 1))
        .unwrap_or(1)
}

/// Elementary symmetric polynomials `σ_1..σ_m` of `values`.
pub fn elementary_symmetric(values: &[BigInt]) -> Vec<BigInt> {
    let mut e = alloc::vec![BigInt::zero(); values.len() + 1];
    e[0] = BigInt::one();
    for (i, v) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let prev = &e[j - 1] * v;
            e[j] += prev;
        }
    }
    e.remove(0);
    e
}

/// All `α` with `α^{n+1} = 1` in `(Z/p^n)^*`, obtained as powers of
/// `g^{(p-1)p^{n-1}/(n+1)}` for a generator `g` of the cyclic unit group.
pub fn find_roots(n: usize, p: u64, mode: LiftMode) -> Result<RootFamily> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    check_prime(n, p)?;
    let pb = BigInt::from(p);
    let q = big_pow(&pb, n);
    let mut g = BigInt::from(primitive_root_mod_p(p));
    if n >= 2 && g.modpow(&BigInt::from(p - 1), &(&pb * &pb)).is_one() {
        g += &pb;
    }
    let order = BigInt::from(p - 1) * big_pow(&pb, n - 1);
    let zeta = g.modpow(&(order / BigInt::from(n + 1)), &q);

    let mut residues = Vec::with_capacity(n + 1);
    let mut x = BigInt::one();
    for _ in 0..=n {
        residues.push(x.clone());
        x = (x * &zeta) % &q;
    }
    residues.sort();
    residues.dedup();
    let np1 = BigInt::from(n + 1);
    if residues.len() != n + 1 || residues.iter().any(|a| !a.modpow(&np1, &q).is_one()) {
        return Err(Error::CheckFailed {
            step: "roots of unity",
            detail: format!("expected {} distinct roots mod {q}, got {residues:?}", n + 1),
        });
    }
    let half = &q / 2;
    let lifts = residues
        .iter()
        .map(|a| match mode {
            LiftMode::Symmetric if a > &half => a - &q,
            _ => a.clone(),
        })
        .collect();
    Ok(RootFamily { n, p, residues, lifts })
}

/// The constant `M(n)` from the descending recursion over the coefficient
/// table: `m_n` is the least positive multiple of `ã_{n,1}`, and
/// `m_i = m_i' m_i''` with `m_i'` the least positive multiple of `ã_{i,1}`
/// and `m_i''` the least positive integer putting every `m_i'' ã_{i,j}`
/// (`j > 1`) into `m_{i+1} Z`.
pub fn compute_m(n: usize) -> Result<BigInt> {
    Ok(compute_m_with(&ChernTable::compute(n)?))
}

pub fn compute_m_with(table: &ChernTable) -> BigInt {
    let n = table.n();
    let mut m = least_multiple_of(table.get(n, 1));
    for i in (1..n).rev() {
        let m1 = least_multiple_of(table.get(i, 1));
        let m2 = table.row(i)[1..]
            .iter()
            .fold(BigInt::one(), |acc, a| lcm(&acc, &least_scaling_into(a, &m)));
        m = m1 * m2;
    }
    m
}

/// Output of [`solve_deltas`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSolution {
    /// `s_j = σ_j(a_1..a_{n+1})`.
    pub s: Vec<BigInt>,
    /// Coefficients of `(Π_j (1 + a_j M p Ω))^{-1} = 1 + Σ b_j Ω^j`.
    pub b: Vec<BigInt>,
    pub delta: Vec<BigInt>,
}

fn to_integer(q: &BigRational, step: &'static str, what: impl FnOnce() -> String) -> Result<BigInt> {
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(Error::CheckFailed { step, detail: format!("{} = {q} is not an integer", what()) })
    }
}

/// Solves `Π_j c(G_j(δ_j)) = 1 + Σ b_j Ω^j` for integers `δ_j`, one degree
/// at a time: `δ_i` is fixed by the `Ω^i` coefficient of what is left after
/// dividing out `c(G_1(δ_1)) ... c(G_{i-1}(δ_{i-1}))`.
pub fn solve_deltas(table: &ChernTable, p: u64, m: &BigInt, roots: &RootFamily) -> Result<DeltaSolution> {
    let n = table.n();
    if roots.n != n || roots.p != p || roots.lifts.len() != n + 1 {
        return Err(Error::InvalidParameter(format!(
            "root family for (n={}, p={}) does not match (n={n}, p={p})",
            roots.n, roots.p
        )));
    }
    let pb = BigInt::from(p);
    let q = big_pow(&pb, n);

    let s = elementary_symmetric(&roots.lifts)[..n].to_vec();
    for (j, sj) in s.iter().enumerate() {
        if !sj.is_multiple_of(&q) {
            return Err(Error::CheckFailed {
                step: "p^n | σ_j(a)",
                detail: format!("σ_{}(a) = {sj} is not divisible by {q}", j + 1),
            });
        }
    }

    let mp = m * &pb;
    let mut scale = BigInt::one();
    let mut forward = OmegaSeries::one(n).coeffs().to_vec();
    for (j, sj) in s.iter().enumerate() {
        scale *= &mp;
        forward[j + 1] = rat(sj * &scale);
    }
    let inverse = OmegaSeries::from_coeffs(n, forward).inverse()?;

    let mut b = Vec::with_capacity(n);
    for j in 1..=n {
        let bj = to_integer(inverse.coeff(j), "b_j integral", || format!("b_{j}"))?;
        let div = m * big_pow(&pb, 2 * j);
        if !bj.is_multiple_of(&div) {
            return Err(Error::CheckFailed {
                step: "M p^{2j} | b_j",
                detail: format!("b_{j} = {bj} is not divisible by {div}"),
            });
        }
        b.push(bj);
    }

    let mut residual = inverse;
    let mut delta = Vec::with_capacity(n);
    for i in 1..=n {
        let lead = rat(big_pow(&pb, 2 * i)) * table.get(i, 1);
        let d = to_integer(&(residual.coeff(i) / &lead), "δ_i integral", || {
            format!("δ_{i} = {} / {lead}", residual.coeff(i))
        })?;
        let g = table.chern_f_series(i, &d).scale_degrees(&pb);
        residual = residual.mul(&g.inverse()?)?;
        if residual.coeffs()[1..=i].iter().any(|c| !c.is_zero()) {
            return Err(Error::CheckFailed {
                step: "degree-by-degree cancellation",
                detail: format!("residual {residual} after δ_{i} = {d}"),
            });
        }
        delta.push(d);
    }
    if !residual.is_one() {
        return Err(Error::CheckFailed { step: "residual = 1", detail: format!("{residual}") });
    }
    Ok(DeltaSolution { s, b, delta })
}

/// `k = ⌊4n/r⌋ + 2`, the least integer with `4n < r(k-1)` that agrees with
/// `2 + 4n/r` whenever `r | 4n`.
pub fn olshanskii_k(n: usize, r: usize) -> usize {
    4 * n / r + 2
}

#[derive(Clone, Debug, Default)]
pub struct CertifyOptions {
    pub lift_mode: LiftMode,
}

/// A named boolean outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

/// Everything needed to re-check the construction for `(n, r, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionCertificate {
    pub n: usize,
    pub r: usize,
    pub p: u64,
    pub m: BigInt,
    pub lift_mode: LiftMode,
    pub residues: Vec<BigInt>,
    pub a: Vec<BigInt>,
    pub s: Vec<BigInt>,
    pub b: Vec<BigInt>,
    pub delta: Vec<BigInt>,
    /// `ã_{k,j} = (k-1)!^j a_{k,j}`, row `k-1` holding `j = 1..⌊n/k⌋`.
    pub atilde: Vec<Vec<BigRational>>,
    pub omega_powers: Vec<OmegaPower>,
    pub chern_product: OmegaSeries,
    pub rank: u64,
    /// Rank of the bundle before stabilization by a trivial summand.
    pub tau: u64,
    /// Smaller value available for `n = 1` from `L ⊕ L^{-1}` being trivial.
    pub tau_special: Option<u64>,
    pub group_order_exponent: u64,
    pub abelian_exponent: u64,
    /// Isotropic-free dimension used for `r > 1`.
    pub k: Option<usize>,
    pub lambda_gamma: BigRational,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ConstructionCertificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Group-theoretic exponents `(|Γ|, max abelian)` as powers of `p` for
/// the group acting on `T^{2nr} × X`, and `k` when `r > 1`.
pub fn group_exponents(n: usize, r: usize) -> (u64, u64, Option<usize>) {
    let order = (2 * n + r) as u64;
    if r == 1 {
        (order, n as u64 + 1, None)
    } else {
        let k = olshanskii_k(n, r);
        (order, (r + k) as u64, Some(k))
    }
}

pub fn certify(n: usize, r: usize, p: u64, opts: &CertifyOptions) -> Result<ConstructionCertificate> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and r >= 1, got n={n}, r={r}")));
    }
    check_prime(n, p)?;
    let table = ChernTable::compute(n)?;
    let m = compute_m_with(&table);
    if BigInt::from(p) <= m {
        return Err(Error::PrimeTooSmall { p, m: m.to_u64().unwrap_or(u64::MAX) });
    }

    let roots = find_roots(n, p, opts.lift_mode)?;
    let sol = solve_deltas(&table, p, &m, &roots)?;

    let mut parts: Vec<BundleDescriptor> = Vec::with_capacity(2 * n + 1);
    for a in &roots.lifts {
        parts.push(line_power_chern(n, p, &(a * &m))?);
    }
    for (i, d) in sol.delta.iter().enumerate() {
        parts.push(pullback_w(&chern_f_with(&table, i + 1, d)?, p)?);
    }
    let v = direct_sum(&parts)?;

    let pb = BigInt::from(p);
    let q = big_pow(&pb, n);
    let np1 = BigInt::from(n + 1);
    let effective = !m.is_multiple_of(&pb) && roots.lifts.iter().all(|a| !a.is_multiple_of(&pb));
    let roots_ok = roots.residues.len() == n + 1
        && roots.lifts.iter().all(|a| a.modpow(&np1, &q) == BigInt::one() % &q)
        && roots
            .residues
            .iter()
            .all(|x| roots.residues.iter().all(|y| roots.residues.contains(&((x * y) % &q))));

    let (order_exp, abelian_exp, k) = group_exponents(n, r);
    let structural = if r == 1 { heisenberg::max_abelian_exponent(n, p)? as u64 } else { abelian_exp };

    let checks = alloc::vec![
        Check { name: "p_odd_prime", passed: true },
        Check { name: "p_congruent_1_mod_n_plus_1", passed: true },
        Check { name: "p_exceeds_m", passed: BigInt::from(p) > m },
        Check { name: "roots_of_unity", passed: roots_ok },
        Check { name: "sigma_divisible_by_p_pow_n", passed: sol.s.iter().all(|s| s.is_multiple_of(&q)) },
        Check {
            name: "b_divisible_by_m_p_pow_2j",
            passed: sol.b.iter().enumerate().all(|(j, b)| b.is_multiple_of(&(&m * big_pow(&pb, 2 * (j + 1))))),
        },
        Check { name: "chern_product_is_one", passed: v.chern.is_one() },
        Check { name: "chern_classes_integral", passed: parts.iter().all(|b| b.chern.is_integral_class()) },
        Check { name: "action_effective", passed: effective },
        Check { name: "rank_formula", passed: v.rank == rank_formula(n) },
        Check { name: "abelian_bound", passed: structural == abelian_exp },
    ];

    let omega_powers = omega_power_table(n)?;
    let mut notes = Vec::new();
    let mismatched: Vec<usize> = omega_powers.iter().filter(|row| !row.agrees()).map(|row| row.k).collect();
    if !mismatched.is_empty() {
        notes.push(format!(
            "omega powers: direct expansion gives Ω^k = k!·(-1)^(k(k-1)/2)·Σ u_I∧v_I; the closed form \
             n!/(n-k)!·(-1)^k differs for k in {mismatched:?}; only expanded values are used"
        ));
    }
    notes.push(String::from(
        "chern convention: atilde_{k,j} = ((k-1)!)^j·a_{k,j} because each summand of F_k(δ) has top class δ(k-1)!·u_[k]∧v_[k]",
    ));
    notes.push(String::from(
        "integrality: c_j Ω^j is integral iff j!·c_j is an integer; coefficients in the Ω basis may be fractional",
    ));
    notes.push(String::from("tau is the unstabilized rank; the trivial padding needed for stable triviality is not computed"));
    notes.push(String::from("M is the minimal witness of the descending recursion, not a proven optimum"));
    if r > 1 && !(4 * n).is_multiple_of(r) {
        notes.push(format!("r does not divide 4n: k = floor(4n/r)+2 = {}", olshanskii_k(n, r)));
    }
    if r > 1 {
        notes.push(String::from(
            "abelian bound for r > 1 assumes a symplectic family with no common k-dimensional isotropic subspace",
        ));
    }

    Ok(ConstructionCertificate {
        n,
        r,
        p,
        m,
        lift_mode: opts.lift_mode,
        residues: roots.residues,
        a: roots.lifts,
        s: sol.s,
        b: sol.b,
        delta: sol.delta,
        atilde: table.rows().to_vec(),
        omega_powers,
        chern_product: v.chern,
        rank: v.rank,
        tau: v.rank,
        tau_special: (n == 1).then_some(2),
        group_order_exponent: order_exp,
        abelian_exponent: abelian_exp,
        k,
        lambda_gamma: BigRational::new(BigInt::from(abelian_exp), BigInt::from(order_exp)),
        checks,
        notes,
    })
}

/// Least prime `p >= max(min, M(n)+1, 3)` with `p ≡ 1 mod n+1` and `p ∤ h`.
pub fn find_prime(n: usize, h: u64, min: u64) -> Result<u64> {
    find_prime_bounded(n, h, min, PRIME_SEARCH_CEILING)
}

pub fn find_prime_bounded(n: usize, h: u64, min: u64, ceiling: u64) -> Result<u64> {
    if n == 0 || h == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and h >= 1, got n={n}, h={h}")));
    }
    let m = compute_m(n)?.to_u64().ok_or_else(|| Error::TooLarge { n, cap: n - 1 })?;
    let step = n as u64 + 1;
    let start = min.max(m + 1).max(3);
    // First candidate >= start congruent to 1 mod n+1.
    let mut p = start + (step + 1 - start % step) % step;
    let mut attempts = 0;
    while p <= ceiling {
        attempts += 1;
        if p % 2 == 1 && !h.is_multiple_of(p) && is_prime(p) {
            return Ok(p);
        }
        p += step;
    }
    Err(Error::SearchExhausted { what: "no admissible prime below the ceiling", attempts })
}

/// One row of the `λ` bound table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaEntry {
    pub n: usize,
    pub r: usize,
    pub k: Option<usize>,
    pub abelian_exponent: u64,
    pub group_exponent: u64,
    pub bound: BigRational,
    /// False when `r > 1` and `r ∤ 4n`, where `k` is rounded.
    pub exact_form: bool,
}

pub fn lambda_table(max_n: usize, max_r: usize) -> Vec<LambdaEntry> {
    let mut out = Vec::with_capacity(max_n * max_r);
    for n in 1..=max_n {
        for r in 1..=max_r {
            let (group_exponent, abelian_exponent, k) = group_exponents(n, r);
            out.push(LambdaEntry {
                n,
                r,
                k,
                abelian_exponent,
                group_exponent,
                bound: BigRational::new(abelian_exponent.into(), group_exponent.into()),
                exact_form: r == 1 || (4 * n) % r == 0,
            });
        }
    }
    out
}

/// First entry (in `(n, r)` order) whose bound is below `eps`.
pub fn epsilon_witness<'a>(table: &'a [LambdaEntry], eps: &BigRational) -> Option<&'a LambdaEntry> {
    table.iter().find(|e| &e.bound < eps)
}

//! Re-checks a stored certificate from its raw integers.
//!
//! Nothing here calls the producing solver. The Chern coefficients come
//! from the closed form `ã_{k,j} = ((k-1)! (n-k)! ε_k)^j / j!` with
//! `ε_k = (-1)^{k(k-1)/2}`, the constant `M` is recomputed from those, and
//! isotropy is checked by listing every echelon basis without pruning.

use std::collections::BTreeSet;

use nonjordan_core::brute;
use nonjordan_core::heisenberg::HeisenbergGroup;
use nonjordan_core::{BigInt, BigRational};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::wire::*;

/// Outcome of one named re-check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub findings: Vec<Finding>,
}

impl Report {
    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.findings.push(Finding { name: name.into(), passed, detail: if passed { String::new() } else { detail.into() } });
    }

    pub fn passed(&self) -> bool {
        !self.findings.is_empty() && self.findings.iter().all(|f| f.passed)
    }

    pub fn first_failure(&self) -> Option<&Finding> {
        self.findings.iter().find(|f| !f.passed)
    }
}

/// Options for the checker.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Cap on subspaces listed and on group orders searched exhaustively.
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: nonjordan_core::isotropic::ENUMERATION_BUDGET }
    }
}

pub fn verify(doc: &Document, opts: &VerifyOptions) -> Report {
    let mut rep = Report::default();
    rep.check(
        "schema_version",
        doc.schema_version == SCHEMA_VERSION,
        format!("unsupported schema version {:?}", doc.schema_version),
    );
    match &doc.certificate {
        Body::Construction(c) => construction(c, &mut rep),
        Body::Group(g) => group(g, opts, &mut rep),
        Body::Olshanskii(o) => olshanskii(o, opts, &mut rep),
        Body::LambdaTable(l) => lambda(l, &mut rep),
        Body::Prime(p) => prime(p, &mut rep),
    }
    rep
}

fn fact(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn rat(x: BigInt) -> BigRational {
    BigRational::from_integer(x)
}

fn is_prime(p: u64) -> bool {
    if p < (1 << 40) {
        p >= 2 && (2u64..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
    } else {
        nonjordan_core::arith::is_prime(p)
    }
}

fn atilde(n: usize, k: usize, j: usize) -> BigRational {
    let eps = if (k * (k - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    let base = fact(k - 1) * fact(n - k) * eps;
    BigRational::new(num_traits::pow(base, j), fact(j))
}

/// Smallest `t > 0` with `t·q ∈ mZ`, i.e. `m·den / gcd(num, m·den)`.
fn least_scaling(q: &BigRational, m: &BigInt) -> BigInt {
    let num = q.numer().abs();
    let md = m * q.denom();
    &md / num.gcd(&md)
}

fn m_constant(n: usize) -> BigInt {
    let mut m = atilde(n, n, 1).numer().abs();
    for i in (1..n).rev() {
        let first = atilde(n, i, 1).numer().abs();
        let rest = (2..=n / i).fold(BigInt::one(), |acc, j| acc.lcm(&least_scaling(&atilde(n, i, j), &m)));
        m = first * rest;
    }
    m
}

fn truncated_product(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    (0..a.len()).map(|d| (0..=d).map(|i| &a[i] * &b[d - i]).sum()).collect()
}

fn unit_series(n: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n + 1];
    v[0] = BigRational::one();
    v
}

fn is_one(v: &[BigRational]) -> bool {
    v[0].is_one() && v[1..].iter().all(Zero::is_zero)
}

fn big(x: &Int) -> &BigInt {
    &x.0
}

fn construction(c: &ConstructionBody, rep: &mut Report) {
    let n = c.n;
    if n == 0 || c.r == 0 || n > 12 {
        rep.check("parameters", false, format!("unsupported n={n}, r={}", c.r));
        return;
    }
    let Some(p) = c.p.to_u64() else {
        rep.check("parameters", false, format!("p={} does not fit in 64 bits", c.p));
        return;
    };
    rep.check("p_odd_prime", p % 2 == 1 && is_prime(p), format!("p={p} is not an odd prime"));
    rep.check("p_congruent_1_mod_n_plus_1", p % (n as u64 + 1) == 1, format!("p={p} ≢ 1 mod {}", n + 1));

    let lengths_ok = c.residues.len() == n + 1
        && c.a.len() == n + 1
        && c.s.len() == n
        && c.b.len() == n
        && c.delta.len() == n
        && c.chern_product.len() == n + 1
        && c.omega_powers.len() == n
        && c.atilde.len() == n
        && c.atilde.iter().enumerate().all(|(i, row)| row.len() == n / (i + 1));
    rep.check("shape", lengths_ok, "array lengths do not match n");
    if !lengths_ok {
        return;
    }

    let pb = BigInt::from(p);
    let q = pb.pow(n as u32);
    let m = m_constant(n);
    rep.check("m_constant", big(&c.m) == &m, format!("stored M={} but the recursion gives {m}", c.m));
    rep.check("p_exceeds_m", pb > m, format!("p={p} <= M={m}"));

    let table_ok = c
        .atilde
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, x)| x.0 == atilde(n, i + 1, j + 1)));
    rep.check("atilde_table", table_ok, "stored ã differs from the closed form");

    let np1 = BigInt::from(n + 1);
    let residues: Vec<&BigInt> = c.residues.iter().map(big).collect();
    let distinct: BTreeSet<&BigInt> = residues.iter().copied().collect();
    let roots_ok = distinct.len() == n + 1
        && residues.iter().all(|x| !x.is_negative() && *x < &q && x.modpow(&np1, &q).is_one())
        && residues.iter().all(|x| residues.iter().all(|y| distinct.contains(&((*x * *y) % &q))));
    rep.check("roots_of_unity", roots_ok, "residues are not the (n+1)-th roots of unity mod p^n");
    let lifts_ok = c.a.iter().zip(&c.residues).all(|(a, x)| (&a.0 - &x.0).is_multiple_of(&q));
    rep.check("lifts", lifts_ok, "a_j is not congruent to its residue mod p^n");
    let lift_mode_ok = match c.lift_mode.as_str() {
        "least_nonnegative" => c.a == c.residues,
        "symmetric" => c.a.iter().all(|a| {
            let twice = &a.0 * 2;
            twice <= q && twice > -&q
        }),
        _ => false,
    };
    rep.check("lift_mode", lift_mode_ok, format!("lifts do not follow mode {:?}", c.lift_mode));

    // σ_j by the product Π (1 + a_j t).
    let mut sigma = vec![BigInt::zero(); n + 2];
    sigma[0] = BigInt::one();
    for a in &c.a {
        for j in (1..sigma.len()).rev() {
            let add = &sigma[j - 1] * &a.0;
            sigma[j] += add;
        }
    }
    let s_ok = (1..=n).all(|j| sigma[j] == c.s[j - 1].0);
    rep.check("sigma_values", s_ok, "stored s_j differ from σ_j(a)");
    rep.check(
        "sigma_divisible_by_p_pow_n",
        (1..=n).all(|j| sigma[j].is_multiple_of(&q)),
        "some σ_j(a) is not divisible by p^n",
    );
    // The remaining identities use the stored M; m_constant checks it.
    let m = c.m.0.clone();
    let effective = !m.is_multiple_of(&pb) && c.a.iter().all(|a| !a.0.is_multiple_of(&pb));
    rep.check("action_effective", effective, "p divides M or some a_j");

    // Line bundle factor and its inverse.
    let mp = &m * &pb;
    let mut lines = unit_series(n);
    for a in &c.a {
        let mut f = unit_series(n);
        f[1] = rat(&a.0 * &mp);
        lines = truncated_product(&lines, &f);
    }
    let mut inv = unit_series(n);
    for d in 1..=n {
        let acc: BigRational = (1..=d).map(|i| &lines[i] * &inv[d - i]).sum();
        inv[d] = -acc;
    }
    let b_ok = (1..=n).all(|j| inv[j].is_integer() && inv[j].to_integer() == c.b[j - 1].0);
    rep.check("b_values", b_ok, "stored b_j differ from the inverse of the line factor");
    let b_div = (1..=n).all(|j| c.b[j - 1].0.is_multiple_of(&(&m * pb.pow(2 * j as u32))));
    rep.check("b_divisible_by_m_p_pow_2j", b_div, "some b_j is not divisible by M p^{2j}");

    let mut product = lines;
    let mut integral = true;
    for (k0, d) in c.delta.iter().enumerate() {
        let k = k0 + 1;
        let mut g = unit_series(n);
        for j in 1..=n / k {
            let scale = pb.pow((2 * j * k) as u32) * num_traits::pow(d.0.clone(), j);
            g[j * k] = atilde(n, k, j) * rat(scale);
        }
        integral &= g.iter().enumerate().all(|(j, x)| (x * rat(fact(j))).is_integer());
        product = truncated_product(&product, &g);
    }
    rep.check("chern_product_is_one", is_one(&product), "chern_product ≠ 1");
    let stored: Vec<BigRational> = c.chern_product.iter().map(|x| x.0.clone()).collect();
    rep.check("stored_chern_product", stored == product, "stored chern_product differs from the recomputed product");
    rep.check("chern_classes_integral", integral, "some summand has a non-integral Chern class");

    let n64 = n as u64;
    let n_fact: u64 = (1..=n64).product();
    let rank = n64 + 1 + (1..=n64).map(|k| k * n_fact).sum::<u64>();
    rep.check(
        "rank_formula",
        rank == n64 + 1 + n64 * (n64 + 1) / 2 * n_fact && c.rank.0 == BigInt::from(rank),
        format!("stored rank {} but the summands give {rank}", c.rank),
    );
    rep.check("tau", c.tau.0 == c.rank.0, "tau differs from the rank");
    let special_ok = match (&c.tau_special, n) {
        (Some(t), 1) => t.0 == BigInt::from(2),
        (None, n) => n != 1,
        _ => false,
    };
    rep.check("tau_special", special_ok, "tau_special must be 2 exactly when n = 1");

    let mut powers_ok = true;
    let mut mismatch = false;
    for (i, row) in c.omega_powers.iter().enumerate() {
        let k = i + 1;
        let sign = if (k * (k - 1) / 2) % 2 == 0 { 1 } else { -1 };
        let closed_sign = if k % 2 == 0 { 1 } else { -1 };
        powers_ok &= row.k == k
            && row.coefficient.0 == rat(fact(k) * sign)
            && row.closed_form.0 == rat(fact(n) / fact(n - k) * closed_sign);
        mismatch |= row.coefficient != row.closed_form;
    }
    rep.check("omega_powers", powers_ok, "stored Ω-power coefficients are wrong");
    rep.check(
        "omega_power_note",
        !mismatch || c.notes.iter().any(|s| s.starts_with("omega powers")),
        "the closed-form mismatch is not recorded in notes",
    );

    let (r, order) = (c.r as u64, 2 * n64 + c.r as u64);
    let (abelian, k) = if r == 1 { (n64 + 1, None) } else { (r + 4 * n64 / r + 2, Some((4 * n64 / r + 2) as usize)) };
    rep.check(
        "group_exponents",
        c.group_order_exponent == order && c.abelian_exponent == abelian && c.k == k,
        format!("expected exponents ({order}, {abelian}) and k={k:?}"),
    );
    rep.check(
        "lambda_gamma",
        c.lambda_gamma.0 == BigRational::new(abelian.into(), order.into()),
        format!("λ must be {abelian}/{order}"),
    );
    rep.check(
        "stored_checks",
        c.passed && c.checks.iter().all(|x| x.passed),
        "the certificate itself records a failed check",
    );
}

fn group(g: &GroupBody, opts: &VerifyOptions, rep: &mut Report) {
    let n = g.n;
    let Some(p) = g.p.to_u64().filter(|&p| n >= 1 && p % 2 == 1 && is_prime(p)) else {
        rep.check("parameters", false, format!("need n >= 1 and an odd prime, got n={n}, p={}", g.p));
        return;
    };
    let pb = BigInt::from(p);
    let e = n as u64 + 1;
    let order_e = 2 * n as u64 + 1;
    rep.check(
        "group_order",
        g.order_exponent == order_e && g.order.0 == pb.pow(order_e as u32),
        format!("|Γ| must be p^{order_e}"),
    );
    rep.check(
        "abelian_bound",
        g.max_abelian_exponent == e && g.max_abelian_order.0 == pb.pow(e as u32),
        format!("largest abelian subgroup must have order p^{e}"),
    );
    rep.check("lambda", g.lambda.0 == BigRational::new(e.into(), order_e.into()), format!("λ must be {e}/{order_e}"));
    match (g.mode.as_str(), &g.brute) {
        ("structural", None) => {}
        ("brute", Some(b)) => {
            let order = pb.pow(order_e as u32);
            if order > BigInt::from(opts.budget) {
                rep.check("brute_force_agrees", false, format!("group of order {order} exceeds the budget"));
                return;
            }
            let group = HeisenbergGroup::new(n, p).expect("validated above");
            let best = brute::max_abelian_order(&group) as u64;
            rep.check(
                "brute_force_agrees",
                b.agrees
                    && b.max_abelian_order.0 == BigInt::from(best)
                    && BigInt::from(best) == pb.pow(e as u32)
                    && b.lambda == g.lambda,
                format!("exhaustive search gives {best}"),
            );
        }
        _ => rep.check("mode", false, format!("mode {:?} does not match the stored data", g.mode)),
    }
}

/// Dense matrix over `F_p` as plain rows.
type Rows = Vec<Vec<u64>>;

fn rows_of(m: &[Vec<Int>], p: u64) -> Option<Rows> {
    m.iter().map(|r| r.iter().map(|x| x.to_u64().filter(|&v| v < p)).collect()).collect()
}

fn mat_mul(a: &Rows, b: &Rows, p: u64) -> Rows {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).fold(0u128, |acc, t| (acc + a[i][t] as u128 * b[t][j] as u128) % p as u128) as u64).collect())
        .collect()
}

fn transpose(a: &Rows) -> Rows {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

fn rank(a: &Rows, p: u64) -> usize {
    let mut m = a.clone();
    let (rows, cols) = (m.len(), m[0].len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = BigInt::from(m[r][c]).modpow(&BigInt::from(p - 2), &BigInt::from(p)).to_u64().unwrap();
        for x in m[r].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = ((*x as u128 + (p - f) as u128 * *y as u128) % p as u128) as u64;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn standard_gram(n: usize, p: u64) -> Rows {
    let mut j = vec![vec![0u64; 2 * n]; 2 * n];
    for i in 0..n {
        j[i][n + i] = 1;
        j[n + i][i] = p - 1;
    }
    j
}

fn form_eval(g: &Rows, u: &[u64], v: &[u64], p: u64) -> u64 {
    let mut acc = 0u128;
    for (i, ui) in u.iter().enumerate() {
        if *ui == 0 {
            continue;
        }
        for (j, vj) in v.iter().enumerate() {
            acc += *ui as u128 * g[i][j] as u128 % p as u128 * *vj as u128;
        }
    }
    (acc % p as u128) as u64
}

/// Lists every `k`-dimensional subspace of `F_p^d` as an echelon basis and
/// returns the first one isotropic for every form, in pivot-set order.
fn first_common_isotropic(forms: &[Rows], p: u64, d: usize, k: usize) -> Option<Rows> {
    let pivot_sets: Vec<Vec<usize>> = (0u32..1 << d)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..d).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    pivot_sets.par_iter().find_map_first(|piv| {
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| (c + 1..d).filter(|j| !piv.contains(j)).map(move |j| (r, j)))
            .collect();
        let total = p.checked_pow(free.len() as u32)?;
        (0..total).into_par_iter().find_map_first(|mut code| {
            let mut rows = vec![vec![0u64; d]; k];
            for (r, &c) in piv.iter().enumerate() {
                rows[r][c] = 1;
            }
            for &(r, j) in &free {
                rows[r][j] = code % p;
                code /= p;
            }
            let iso = (0..k).all(|a| (0..a).all(|b| forms.iter().all(|g| form_eval(g, &rows[a], &rows[b], p) == 0)));
            iso.then_some(rows)
        })
    })
}

fn gaussian(d: usize, k: usize, p: u64) -> Option<u64> {
    if k > d {
        return Some(0);
    }
    let pb = BigInt::from(p);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= pb.pow((d - i) as u32) - 1;
        den *= pb.pow(i as u32 + 1) - 1;
    }
    (num / den).to_u64()
}

fn olshanskii(o: &OlshanskiiBody, opts: &VerifyOptions, rep: &mut Report) {
    let (n, r, k) = (o.n, o.r, o.k);
    let Some(p) = o.p.to_u64().filter(|&p| n >= 1 && p % 2 == 1 && is_prime(p) && p < (1 << 32)) else {
        rep.check("parameters", false, format!("need n >= 1 and an odd prime below 2^32, got n={n}, p={}", o.p));
        return;
    };
    rep.check(
        "olshanskii_condition",
        r >= 2 && k == 4 * n / r + 2 && 4 * n < r * (k - 1),
        format!("k={k} is not floor(4n/r)+2 for n={n}, r={r} >= 2"),
    );
    if !o.certified {
        rep.check("certified", false, format!("search exhausted after {} attempts", o.attempts.len()));
        return;
    }
    let d = 2 * n;
    let mats: Option<Vec<Rows>> = o.matrices.iter().map(|m| rows_of(m, p)).collect();
    let forms: Option<Vec<Rows>> = o.forms.iter().map(|m| rows_of(m, p)).collect();
    let square = |ms: &Vec<Rows>| ms.len() == r && ms.iter().all(|m| m.len() == d && m.iter().all(|row| row.len() == d));
    let (Some(mats), Some(forms)) = (mats.filter(square), forms.filter(square)) else {
        rep.check("shape", false, format!("need {r} matrices of size {d}x{d} with entries below p"));
        return;
    };
    let identity: Rows = (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect();
    let j = standard_gram(n, p);
    let pullbacks_ok = mats[0] == identity
        && mats.iter().all(|a| rank(a, p) == d)
        && mats.iter().zip(&forms).all(|(a, g)| &mat_mul(&mat_mul(&transpose(a), &j, p), a, p) == g);
    rep.check("forms_are_pullbacks", pullbacks_ok, "some ω_j is not ω(A_j ·, A_j ·), A_1 ≠ I, or some A_j is singular");

    let count = gaussian(d, k, p);
    rep.check(
        "candidates",
        count.map(Int::from).as_ref() == Some(&o.candidates),
        format!("there are {count:?} subspaces of dimension {k}, not {}", o.candidates),
    );
    rep.check("vacuous", o.vacuous == (k > d), "vacuous must be set exactly when k > 2n");
    if k <= d {
        match count.filter(|&c| c <= opts.budget) {
            Some(_) => {
                let w = first_common_isotropic(&forms, p, d, k);
                rep.check("no_common_isotropic", w.is_none(), format!("common isotropic subspace {w:?}"));
            }
            None => rep.check("no_common_isotropic", false, format!("{count:?} candidates exceed the budget {}", opts.budget)),
        }
    } else {
        rep.check("no_common_isotropic", true, "");
    }
    let last_clean = o.attempts.last().is_some_and(|a| a.witness.is_none() && a.found.0.is_zero());
    let earlier_refuted = o.attempts[..o.attempts.len().saturating_sub(1)].iter().all(|a| a.witness.is_some());
    let indices_ok = o.attempts.iter().enumerate().all(|(i, a)| a.index == i as u64);
    rep.check("transcript", last_clean && earlier_refuted && indices_ok, "attempt transcript is inconsistent");

    let order = (2 * n + r) as u64;
    rep.check(
        "product_bound",
        o.order_exponent == Some(order) && o.abelian_bound_exponent == Some((r + k) as u64),
        format!("expected exponents ({order}, {})", r + k),
    );
    if let Some(exact) = o.exact_abelian_exponent {
        // exact = r + the largest common isotropic dimension
        let dim = exact.checked_sub(r as u64).map(|x| x as usize);
        let ok = dim.is_some_and(|dim| {
            let within = |t: usize| gaussian(d, t, p).is_some_and(|c| c <= opts.budget);
            dim >= 1
                && dim < k
                && within(dim)
                && within(dim + 1)
                && first_common_isotropic(&forms, p, d, dim).is_some()
                && first_common_isotropic(&forms, p, d, dim + 1).is_none()
        });
        rep.check("exact_abelian_exponent", ok, format!("r + max common isotropic dimension is not {exact}"));
    }
}

fn lambda(l: &LambdaBody, rep: &mut Report) {
    let mut expected = Vec::new();
    for n in 1..=l.max_n {
        for r in 1..=l.max_r {
            let (k, abelian) = if r == 1 { (None, n + 1) } else { (Some(4 * n / r + 2), r + 4 * n / r + 2) };
            let group = 2 * n + r;
            expected.push(LambdaRow {
                n,
                r,
                k,
                abelian_exponent: abelian as u64,
                group_exponent: group as u64,
                bound: Rat(BigRational::new(abelian.into(), group.into())),
                exact_form: r == 1 || (4 * n) % r == 0,
            });
        }
    }
    rep.check("lambda_rows", l.rows == expected, "stored rows differ from the formula");
    let witness = l
        .eps
        .as_ref()
        .and_then(|e| expected.iter().find(|row| row.bound.0 < e.0))
        .map(|row| Witness { n: row.n, r: row.r });
    rep.check("epsilon_witness", l.witness == witness, format!("expected witness {witness:?}"));
}

fn prime(b: &PrimeBody, rep: &mut Report) {
    let n = b.n;
    let (Some(p), Some(h), Some(min)) = (b.p.to_u64(), b.h.to_u64(), b.min.to_u64()) else {
        rep.check("parameters", false, "p, h and min must fit in 64 bits");
        return;
    };
    if n == 0 || n > 12 || h == 0 {
        rep.check("parameters", false, format!("unsupported n={n}, h={h}"));
        return;
    }
    let m = m_constant(n);
    rep.check("m_constant", b.m.0 == m, format!("stored M={} but the recursion gives {m}", b.m));
    let step = n as u64 + 1;
    let admissible = |q: u64| q % 2 == 1 && q % step == 1 && h % q != 0 && is_prime(q);
    let start = m.to_u64().map(|m| min.max(m + 1).max(3));
    let ok = start.is_some_and(|start| p >= start && admissible(p) && !(start..p).any(admissible));
    rep.check("prime_minimal", ok, format!("{p} is not the least admissible prime"));
}

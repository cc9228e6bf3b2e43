//! Producers for each subcommand.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use nonjordan_core::construction::{self, CertifyOptions, LiftMode};
use nonjordan_core::heisenberg::{self, HeisenbergGroup};
use nonjordan_core::olshanskii::{self, Attempt};
use nonjordan_core::{BigInt, BigRational, Error, Result};

use crate::search;
use crate::wire::*;

/// Statement behind each check name used in certificates.
pub fn statement(name: &str) -> Option<&'static str> {
    Some(match name {
        "p_odd_prime" => "p is an odd prime",
        "p_congruent_1_mod_n_plus_1" => "p ≡ 1 (mod n+1)",
        "p_exceeds_m" => "p > M(n)",
        "roots_of_unity" => "the residues are the n+1 solutions of α^{n+1} = 1 in (Z/p^n)*, closed under products",
        "sigma_divisible_by_p_pow_n" => "p^n divides σ_j(a_1..a_{n+1}) for 1 <= j <= n",
        "b_divisible_by_m_p_pow_2j" => "(Π_j (1 + a_j M p Ω))^{-1} = 1 + Σ b_j Ω^j with M p^{2j} | b_j",
        "chern_product_is_one" => "Π_j (1 + a_j M p Ω) · Π_k c(G_k(δ_k)) = 1 in Q[Ω]/(Ω^{n+1})",
        "chern_classes_integral" => "j!·c_j is an integer for every summand (Ω^j/j! is integral)",
        "action_effective" => "p divides neither M nor any a_j",
        "rank_formula" => "rk V = n + 1 + n(n+1)/2 · n!",
        "abelian_bound" => "the largest abelian subgroup of Γ_{n,p} has order p^{n+1}",
        "group_order" => "|Γ_{n,p}| = p^{2n+1}",
        "brute_force_agrees" => "exhaustive abelian subgroup search matches the structural bound",
        "no_common_isotropic" => "no k-dimensional subspace is isotropic for every ω_j",
        "forms_are_pullbacks" => "ω_j(u, v) = ω(A_j u, A_j v) with A_1 = I and every A_j invertible",
        "olshanskii_condition" => "4n < r(k-1) with k = floor(4n/r) + 2",
        "product_bound" => "|Γ| = p^{2n+r} and abelian subgroups have at most p^{r+k} elements",
        "lambda_rows" => "bound = (n+1)/(2n+1) for r = 1 and (r+k)/(2n+r) otherwise",
        "epsilon_witness" => "first (n, r) whose bound is below ε",
        "prime_minimal" => "least prime p >= max(min, M+1, 3) with p ≡ 1 (mod n+1) and p ∤ h",
        _ => return None,
    })
}

fn provenance(names: &[&str]) -> BTreeMap<String, String> {
    names.iter().filter_map(|n| statement(n).map(|s| (n.to_string(), s.to_string()))).collect()
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set.
pub fn now_unix() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// A produced document and whether every claim in it holds.
pub struct Produced {
    pub doc: Document,
    pub passed: bool,
    /// Human-readable reason when `passed` is false.
    pub failure: Option<String>,
}

fn document(name: &str, args: &[(&str, String)], seed: u64, checks: &[&str], body: Body) -> Document {
    Document {
        schema_version: SCHEMA_VERSION.into(),
        command: Invocation {
            name: name.into(),
            args: args.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        },
        seed: seed.into(),
        created_unix: now_unix().into(),
        provenance: provenance(checks),
        certificate: body,
    }
}

pub fn certify(n: usize, r: usize, p: Option<u64>, lift_mode: LiftMode, seed: u64) -> Result<Produced> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and r >= 1, got n={n}, r={r}")));
    }
    let p = match p {
        Some(p) => p,
        None => construction::find_prime(n, 1, 1)?,
    };
    let cert = construction::certify(n, r, p, &CertifyOptions { lift_mode })?;
    let body = ConstructionBody::from(&cert);
    let names: Vec<&str> = cert.checks.iter().map(|c| c.name).collect();
    let failure = cert.checks.iter().find(|c| !c.passed).map(|c| format!("check {} failed", c.name));
    let args = [
        ("n", n.to_string()),
        ("r", r.to_string()),
        ("p", p.to_string()),
        ("lift", lift_mode_name(lift_mode).to_string()),
    ];
    Ok(Produced {
        doc: document("certify", &args, seed, &names, Body::Construction(body)),
        passed: failure.is_none(),
        failure,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupMode {
    Structural,
    Brute,
}

pub fn group(n: usize, p: u64, mode: GroupMode, budget: u64, seed: u64) -> Result<Produced> {
    HeisenbergGroup::new(n, p)?;
    let e = heisenberg::max_abelian_exponent(n, p)? as u64;
    let order_exponent = 2 * n as u64 + 1;
    let pb = BigInt::from(p);
    let mut checks = vec!["group_order", "abelian_bound"];
    let brute = match mode {
        GroupMode::Structural => None,
        GroupMode::Brute => {
            checks.push("brute_force_agrees");
            let (best, lambda) = heisenberg::brute_force_lambda(n, p, budget)?;
            let agrees = BigInt::from(best) == pb.pow(e as u32);
            Some(BruteRow { max_abelian_order: best.into(), lambda: lambda.into(), agrees })
        }
    };
    let failure = brute.as_ref().filter(|b| !b.agrees).map(|_| "brute-force and structural bounds differ".to_string());
    let body = GroupBody {
        n,
        p: p.into(),
        mode: match mode {
            GroupMode::Structural => "structural",
            GroupMode::Brute => "brute",
        }
        .into(),
        order: Int(pb.pow(order_exponent as u32)),
        order_exponent,
        max_abelian_order: Int(pb.pow(e as u32)),
        max_abelian_exponent: e,
        lambda: BigRational::new(e.into(), order_exponent.into()).into(),
        brute,
    };
    let args = [("n", n.to_string()), ("p", p.to_string()), ("mode", body.mode.clone()), ("budget", budget.to_string())];
    Ok(Produced {
        doc: document("group", &args, seed, &checks, Body::Group(body)),
        passed: failure.is_none(),
        failure,
    })
}

fn attempt_row(a: &Attempt) -> AttemptRow {
    AttemptRow {
        index: a.index,
        witness: a.witness.as_ref().map(|w| w.basis.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect()),
        nodes: a.stats.nodes.into(),
        found: a.stats.found.into(),
    }
}

pub fn olshanskii(n: usize, r: usize, p: u64, seed: u64, budget: u64, max_attempts: u64) -> Result<Produced> {
    let k = construction::olshanskii_k(n, r);
    let mut log: Vec<Attempt> = Vec::new();
    let search = olshanskii::olshanskii_search_with(n, r, p, seed, max_attempts, &mut |forms, k| {
        let out = search::find_common_isotropic(forms, k, budget)?;
        log.push(Attempt { index: log.len() as u64, witness: out.witness.clone(), stats: out.stats });
        Ok(out)
    });
    let args = [
        ("n", n.to_string()),
        ("r", r.to_string()),
        ("p", p.to_string()),
        ("budget", budget.to_string()),
        ("attempts", max_attempts.to_string()),
    ];
    let checks = ["forms_are_pullbacks", "olshanskii_condition", "no_common_isotropic", "product_bound"];
    match search {
        Ok(cert) => {
            let bound = olshanskii::product_subgroup_bound(&cert.spec, budget)?;
            let body = OlshanskiiBody {
                n,
                r,
                p: p.into(),
                k,
                certified: true,
                vacuous: cert.vacuous,
                budget: budget.into(),
                matrices: cert.spec.mats.iter().map(matrix_rows).collect(),
                forms: cert.spec.forms.iter().map(|f| matrix_rows(f.matrix())).collect(),
                attempts: cert.attempts.iter().map(attempt_row).collect(),
                candidates: cert.candidates.into(),
                order_exponent: Some(bound.order_exponent),
                abelian_bound_exponent: Some(bound.abelian_bound_exponent),
                exact_abelian_exponent: bound.exact_abelian_exponent,
            };
            Ok(Produced {
                doc: document("olshanskii", &args, seed, &checks, Body::Olshanskii(body)),
                passed: true,
                failure: None,
            })
        }
        Err(Error::SearchExhausted { attempts, .. }) => {
            let body = OlshanskiiBody {
                n,
                r,
                p: p.into(),
                k,
                certified: false,
                vacuous: false,
                budget: budget.into(),
                matrices: Vec::new(),
                forms: Vec::new(),
                attempts: log.iter().map(attempt_row).collect(),
                candidates: 0u32.into(),
                order_exponent: None,
                abelian_bound_exponent: None,
                exact_abelian_exponent: None,
            };
            Ok(Produced {
                doc: document("olshanskii", &args, seed, &checks, Body::Olshanskii(body)),
                passed: false,
                failure: Some(format!("search exhausted after {attempts} attempts")),
            })
        }
        Err(e) => Err(e),
    }
}

pub fn lambda_table(max_n: usize, max_r: usize, eps: Option<BigRational>, seed: u64) -> Result<Produced> {
    if max_n == 0 || max_r == 0 {
        return Err(Error::InvalidParameter(format!("need max-n >= 1 and max-r >= 1, got {max_n}, {max_r}")));
    }
    let table = construction::lambda_table(max_n, max_r);
    let witness = eps
        .as_ref()
        .and_then(|e| construction::epsilon_witness(&table, e))
        .map(|w| Witness { n: w.n, r: w.r });
    let body = LambdaBody {
        max_n,
        max_r,
        rows: table.iter().map(LambdaRow::from).collect(),
        eps: eps.clone().map(Rat),
        witness,
    };
    let mut args = vec![("max_n", max_n.to_string()), ("max_r", max_r.to_string())];
    if let Some(e) = &eps {
        args.push(("eps", e.to_string()));
    }
    Ok(Produced {
        doc: document("lambda-table", &args, seed, &["lambda_rows", "epsilon_witness"], Body::LambdaTable(body)),
        passed: true,
        failure: None,
    })
}

/// `n,r,k,abelian_exponent,group_exponent,bound_num,bound_den,exact_form`.
pub fn lambda_csv(body: &LambdaBody) -> String {
    let mut out = String::from("n,r,k,abelian_exponent,group_exponent,bound_num,bound_den,exact_form\n");
    for row in &body.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.n,
            row.r,
            row.k.map(|k| k.to_string()).unwrap_or_default(),
            row.abelian_exponent,
            row.group_exponent,
            row.bound.0.numer(),
            row.bound.0.denom(),
            row.exact_form
        ));
    }
    out
}

pub fn find_prime(n: usize, h: u64, min: u64, seed: u64) -> Result<Produced> {
    let p = construction::find_prime(n, h, min)?;
    let m = construction::compute_m(n)?;
    let body = PrimeBody { n, h: h.into(), min: min.into(), m: Int(m), p: p.into() };
    let args = [("n", n.to_string()), ("h", h.to_string()), ("min", min.to_string())];
    Ok(Produced {
        doc: document("find-prime", &args, seed, &["prime_minimal"], Body::Prime(body)),
        passed: true,
        failure: None,
    })
}

/// Exit status for a library error: 2 for bad input, 1 for a failed check.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CheckFailed { .. }
        | Error::NonzeroResidual { .. }
        | Error::NonIntegralChern { .. }
        | Error::NotUnitSeries(_)
        | Error::SearchExhausted { .. } => 1,
        _ => 2,
    }
}

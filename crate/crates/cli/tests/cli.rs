mod common;

use std::fs;
use std::process::Command;

use common::*;
use nonjordan::run::GroupMode;
use nonjordan::wire::{self, Body, Int, Rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_nonjordan"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "0")
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn cert(run: &Run) -> Value {
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["schema_version"], "1");
    v["certificate"].clone()
}

fn rat(v: &Value) -> (String, String) {
    (v["num"].as_str().unwrap().to_string(), v["den"].as_str().unwrap().to_string())
}

#[test]
fn certify_examples() {
    let c = cert(&cli(&["certify", "--n", "1", "--r", "1"]));
    assert_eq!(c["p"], 3);
    assert_eq!(c["passed"], true);
    assert_eq!(rat(&c["lambda_gamma"]), ("2".into(), "3".into()));

    let c = cert(&cli(&["certify", "--n", "2", "--r", "1", "--p", "7"]));
    assert_eq!(c["passed"], true);
    assert_eq!(c["delta"], serde_json::json!([-14, -50]));

    let bad = cli(&["certify", "--n", "1", "--r", "1", "--p", "2"]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("odd primes only"), "{}", bad.stderr);
}

#[test]
fn group_examples() {
    let c = cert(&cli(&["group", "--n", "1", "--p", "3", "--mode", "brute"]));
    assert_eq!(c["order"], 27);
    assert_eq!(c["max_abelian_order"], 9);
    assert_eq!(rat(&c["lambda"]), ("2".into(), "3".into()));
    assert_eq!(c["brute"]["agrees"], true);

    let c = cert(&cli(&["group", "--n", "2", "--p", "3", "--mode", "structural"]));
    assert_eq!(c["order"], 243);
    assert_eq!(c["max_abelian_order"], 27);

    let big = cli(&["group", "--n", "3", "--p", "101", "--mode", "brute"]);
    assert_eq!(big.code, 2);
    assert!(big.stderr.contains("budget"), "{}", big.stderr);
}

#[test]
fn olshanskii_examples() {
    let c = cert(&cli(&["olshanskii", "--n", "1", "--r", "2", "--p", "3", "--seed", "7"]));
    assert_eq!(c["certified"], true);
    assert_eq!(c["vacuous"], true);
    assert_eq!(c["k"], 4);

    let c = cert(&cli(&["olshanskii", "--n", "4", "--r", "4", "--p", "3", "--seed", "7"]));
    assert_eq!(c["certified"], true);
    assert_eq!(c["k"], 6);
    assert_eq!(c["forms"].as_array().unwrap().len(), 4);
    assert_eq!((c["order_exponent"].clone(), c["abelian_bound_exponent"].clone()), (12.into(), 10.into()));
    let last = c["attempts"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["witness"], Value::Null);
    assert_eq!(last["found"], 0);

    assert_eq!(cli(&["olshanskii", "--n", "2", "--r", "1", "--p", "5"]).code, 2);
}

#[test]
fn lambda_table_examples() {
    let c = cert(&cli(&["lambda-table", "--max-n", "5", "--max-r", "3", "--eps", "11/20"]));
    let rows = c["rows"].as_array().unwrap();
    let bound = |n: u64, r: u64| {
        let row = rows.iter().find(|x| x["n"] == n && x["r"] == r).unwrap();
        let (a, b) = rat(&row["bound"]);
        BigRational::new(a.parse().unwrap(), b.parse().unwrap())
    };
    assert_eq!(bound(1, 1), BigRational::new(2.into(), 3.into()));
    assert_eq!(bound(4, 1), BigRational::new(5.into(), 9.into()));
    for n in 1..5 {
        assert!(bound(n + 1, 1) < bound(n, 1));
    }
    assert_eq!(c["witness"], serde_json::json!({"n": 5, "r": 1}));

    let none = cert(&cli(&["lambda-table", "--max-n", "2", "--max-r", "2", "--eps", "1/2"]));
    assert_eq!(none["witness"], Value::Null);

    let csv = cli(&["lambda-table", "--max-n", "2", "--max-r", "1", "--format", "csv"]);
    assert_eq!(csv.code, 0);
    assert_eq!(
        csv.stdout,
        "n,r,k,abelian_exponent,group_exponent,bound_num,bound_den,exact_form\n1,1,,2,3,2,3,true\n2,1,,3,5,3,5,true\n"
    );
}

#[test]
fn find_prime_example() {
    let c = cert(&cli(&["find-prime", "--n", "3"]));
    assert_eq!((c["p"].clone(), c["m"].clone()), (13.into(), 6.into()));
    let c = cert(&cli(&["find-prime", "--n", "3", "--h", "13"]));
    assert_eq!(c["p"], 17);
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let path = good.to_str().unwrap();
    assert_eq!(cli(&["certify", "--n", "1", "--r", "1", "--p", "3", "--out", path]).code, 0);
    let ok = cli(&["verify", path]);
    assert_eq!(ok.code, 0, "{}{}", ok.stdout, ok.stderr);
    assert!(ok.stdout.contains("ok   chern_product_is_one"));
    assert_eq!(cli(&["verify", "--in", path]).code, 0);

    assert_eq!(cli(&["certify", "--n", "2", "--r", "1", "--p", "7", "--out", path]).code, 0);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&good).unwrap()).unwrap();
    let d0 = v["certificate"]["delta"][0].as_i64().unwrap();
    v["certificate"]["delta"][0] = (d0 + 1).into();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let rejected = cli(&["verify", bad.to_str().unwrap()]);
    assert_eq!(rejected.code, 1);
    assert!(rejected.stderr.contains("chern_product ≠ 1"), "{}", rejected.stderr);

    let text = fs::read_to_string(&good).unwrap();
    let cut = dir.path().join("cut.json");
    fs::write(&cut, &text[..text.len() / 2]).unwrap();
    assert_eq!(cli(&["verify", cut.to_str().unwrap()]).code, 2);
    assert_eq!(cli(&["verify", dir.path().join("missing.json").to_str().unwrap()]).code, 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&[]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
    assert_eq!(cli(&["certify", "--n", "x", "--r", "1"]).code, 2);
    assert_eq!(cli(&["certify", "--n", "0", "--r", "1"]).code, 2);
    assert_eq!(cli(&["group", "--n", "1", "--p", "9"]).code, 2);
    assert_eq!(cli(&["lambda-table", "--max-n", "2", "--max-r", "2", "--eps", "1/0"]).code, 2);
    assert_eq!(cli(&["verify"]).code, 2);
}

#[test]
fn output_is_deterministic_and_sorted() {
    let a = cli(&["olshanskii", "--n", "2", "--r", "2", "--p", "3", "--seed", "5"]);
    let b = cli(&["olshanskii", "--n", "2", "--r", "2", "--p", "3", "--seed", "5"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    // serde_json::Value keeps keys in a BTreeMap, so re-printing it yields
    // sorted keys; equality means the original was sorted too.
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", a.stdout);
}

fn assert_exact(v: &Value) {
    match v {
        Value::Number(x) => {
            let x = x.as_i64().map(|x| x.unsigned_abs()).or(x.as_u64()).expect("non-integer number");
            assert!(x <= 1 << 53, "{x} should be a string");
        }
        Value::Array(xs) => xs.iter().for_each(assert_exact),
        Value::Object(m) => m.values().for_each(assert_exact),
        _ => {}
    }
}

#[test]
fn numbers_are_exact_integers() {
    let c = cert(&cli(&["certify", "--n", "4", "--r", "1", "--p", "11"]));
    assert_exact(&c);
    // a_j mod 11^4 and the Chern data at n=4 overflow 2^53 somewhere.
    assert!(serde_json::to_string(&c["delta"]).unwrap().contains('"') || serde_json::to_string(&c["b"]).unwrap().contains('"'));
}

#[test]
fn every_producer_round_trips_and_verifies() {
    let docs = [
        certify(1, 3),
        certify(2, 7),
        run_symmetric(),
        group(1, 3, GroupMode::Brute),
        group(2, 3, GroupMode::Structural),
        olshanskii(1, 2, 3, 7),
        olshanskii(2, 2, 3, 1),
        nonjordan::run::lambda_table(4, 4, Some(BigRational::new(11.into(), 20.into())), 0).unwrap().doc,
        nonjordan::run::find_prime(2, 1, 1, 0).unwrap().doc,
    ];
    for doc in &docs {
        assert_eq!(&reparse(doc), doc);
        assert!(accepted(doc), "{:?}", nonjordan::verify::verify(doc, &Default::default()).first_failure());
    }
}

fn run_symmetric() -> wire::Document {
    let out = nonjordan::run::certify(1, 1, Some(5), nonjordan_core::construction::LiftMode::Symmetric, 3).unwrap();
    assert!(out.passed);
    out.doc
}

#[test]
fn spec_mutations_are_rejected() {
    // Perturbing a_j, δ_j, M or any A_j entry must break a re-check.
    let c = serde_json::to_value(certify(2, 7)).unwrap();
    let o = serde_json::to_value(olshanskii(2, 2, 3, 1)).unwrap();
    let mut targets = Vec::new();
    for field in ["a", "delta"] {
        for i in 0..c["certificate"][field].as_array().unwrap().len() {
            targets.push((&c, vec![Step::Key("certificate".into()), Step::Key(field.into()), Step::Index(i)]));
        }
    }
    targets.push((&c, vec![Step::Key("certificate".into()), Step::Key("m".into())]));
    for (j, m) in o["certificate"]["matrices"].as_array().unwrap().iter().enumerate() {
        for (i, row) in m.as_array().unwrap().iter().enumerate() {
            for e in 0..row.as_array().unwrap().len() {
                targets.push((
                    &o,
                    vec![
                        Step::Key("certificate".into()),
                        Step::Key("matrices".into()),
                        Step::Index(j),
                        Step::Index(i),
                        Step::Index(e),
                    ],
                ));
            }
        }
    }
    let mut equivalent = 0;
    for (doc, path) in targets {
        for delta in [-1, 1] {
            let mutated = perturb(doc, &path, delta);
            if check_value(&mutated) == Outcome::Accepted {
                // A different A_j can induce the same form; then every claim
                // in the document still holds.
                assert!(same_forms(&mutated), "{} {delta:+}", describe(&path));
                equivalent += 1;
            }
        }
    }
    assert!(equivalent <= 2, "{equivalent} mutations kept the forms unchanged");
}

/// Recomputes each ω(A_j ·, A_j ·) and compares it with the stored form.
fn same_forms(doc: &Value) -> bool {
    let c = &doc["certificate"];
    let (n, p) = (c["n"].as_u64().unwrap() as usize, c["p"].as_u64().unwrap());
    let entries = |m: &Value| -> Option<Vec<Vec<u64>>> {
        m.as_array()?.iter().map(|r| r.as_array()?.iter().map(|x| x.as_u64().filter(|&x| x < p)).collect()).collect()
    };
    let standard = nonjordan_core::heisenberg::SymplecticForm::standard(n, p);
    c["matrices"].as_array().unwrap().iter().zip(c["forms"].as_array().unwrap()).all(|(a, g)| {
        match (entries(a), entries(g)) {
            (Some(a), Some(g)) => {
                let a = nonjordan_core::fp::FpMatrix::from_rows(p, &a);
                a.is_invertible() && standard.pullback(&a).unwrap().matrix().to_rows() == g
            }
            _ => false,
        }
    })
}

#[test]
fn random_mutations_are_rejected() {
    let docs = [certify(1, 5), certify(3, 13), group(1, 3, GroupMode::Brute), olshanskii(2, 2, 3, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in mutate_corpus(&docs, 60, &mut rng) {
        assert_ne!(m.outcome, Outcome::Accepted, "doc {} {} {:+}", m.doc_index, m.path, m.delta);
    }
}

fn big_int() -> impl Strategy<Value = BigInt> {
    prop_oneof![
        any::<i64>().prop_map(BigInt::from),
        any::<i128>().prop_map(BigInt::from),
        (any::<i128>(), any::<u64>()).prop_map(|(a, b)| BigInt::from(a) * BigInt::from(b) * BigInt::from(b)),
        Just(BigInt::from(1u64 << 53)),
        Just(BigInt::from((1u64 << 53) + 1)),
        Just(-BigInt::from((1u64 << 53) + 1)),
    ]
}

proptest! {
    #[test]
    fn int_round_trip(x in big_int()) {
        let text = serde_json::to_string(&Int(x.clone())).unwrap();
        let small = x.magnitude() <= &num_bigint::BigUint::from(1u64 << 53);
        prop_assert_eq!(text.starts_with('"'), !small);
        let back: Int = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.0, x);
    }

    #[test]
    fn rat_round_trip(a in big_int(), b in big_int()) {
        prop_assume!(b != BigInt::from(0));
        let q = BigRational::new(a, b);
        let v = serde_json::to_value(Rat(q.clone())).unwrap();
        prop_assert!(v["num"].is_string() && v["den"].is_string());
        let back: Rat = serde_json::from_value(v).unwrap();
        prop_assert_eq!(back.0, q);
    }

    #[test]
    fn lambda_documents_round_trip(max_n in 1usize..6, max_r in 1usize..6, num in 1i64..40, den in 1i64..40) {
        let eps = BigRational::new(num.into(), den.into());
        let doc = nonjordan::run::lambda_table(max_n, max_r, Some(eps), 0).unwrap().doc;
        prop_assert_eq!(&reparse(&doc), &doc);
        prop_assert!(accepted(&doc));
    }

    #[test]
    fn group_documents_round_trip(n in 1usize..4, p in prop::sample::select(vec![3u64, 5, 7, 11, 101])) {
        let doc = group(n, p, GroupMode::Structural);
        prop_assert_eq!(&reparse(&doc), &doc);
        prop_assert!(accepted(&doc));
        let Body::Group(g) = &doc.certificate else { unreachable!() };
        prop_assert_eq!(g.order.0.clone(), BigInt::from(p).pow(2 * n as u32 + 1));
    }
}

#[test]
fn zero_denominator_is_rejected() {
    assert!(serde_json::from_str::<Rat>(r#"{"num":"1","den":"0"}"#).is_err());
    assert!(serde_json::from_str::<Int>("1.5").is_err());
}

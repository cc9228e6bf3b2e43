#![allow(dead_code)]

use nonjordan::run::{self, GroupMode};
use nonjordan::verify::{verify, VerifyOptions};
use nonjordan::wire::{self, Document};
use nonjordan_core::construction::LiftMode;
use nonjordan_core::heisenberg::BRUTE_FORCE_BUDGET;
use nonjordan_core::isotropic::ENUMERATION_BUDGET;
use nonjordan_core::olshanskii::SEARCH_ATTEMPTS;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

pub fn certify(n: usize, p: u64) -> Document {
    let out = run::certify(n, 1, Some(p), LiftMode::LeastNonnegative, 0).unwrap();
    assert!(out.passed, "certify({n}, 1, {p}) failed: {:?}", out.failure);
    out.doc
}

pub fn group(n: usize, p: u64, mode: GroupMode) -> Document {
    let out = run::group(n, p, mode, BRUTE_FORCE_BUDGET, 0).unwrap();
    assert!(out.passed);
    out.doc
}

pub fn olshanskii(n: usize, r: usize, p: u64, seed: u64) -> Document {
    let out = run::olshanskii(n, r, p, seed, ENUMERATION_BUDGET, SEARCH_ATTEMPTS).unwrap();
    assert!(out.passed, "olshanskii({n}, {r}, {p}) failed: {:?}", out.failure);
    out.doc
}

pub fn accepted(doc: &Document) -> bool {
    verify(doc, &VerifyOptions::default()).passed()
}

/// Path from the document root to a numeric leaf.
pub type Path = Vec<Step>;

#[derive(Clone, Debug)]
pub enum Step {
    Key(String),
    Index(usize),
}

fn is_integer_text(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Fields that are search statistics or input thresholds, where a nearby
/// value describes an equally valid run.
fn excluded(key: &str, parent: Option<&str>) -> bool {
    matches!(key, "budget" | "h" | "min" | "eps" | "den") || (parent == Some("attempts") && matches!(key, "nodes" | "found"))
}

fn collect(v: &Value, path: &mut Path, parent: Option<&str>, out: &mut Vec<Path>) {
    match v {
        Value::Number(_) => out.push(path.clone()),
        Value::String(s) if is_integer_text(s) => out.push(path.clone()),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                path.push(Step::Index(i));
                collect(item, path, parent, out);
                path.pop();
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                if excluded(k, parent) {
                    continue;
                }
                path.push(Step::Key(k.clone()));
                collect(item, path, Some(k), out);
                path.pop();
            }
        }
        _ => {}
    }
}

/// Every numeric leaf under `certificate` that a mutation may touch.
pub fn numeric_leaves(doc: &Value) -> Vec<Path> {
    let mut out = Vec::new();
    let mut path = vec![Step::Key("certificate".into())];
    collect(&doc["certificate"], &mut path, None, &mut out);
    out
}

fn leaf_mut<'a>(v: &'a mut Value, path: &[Step]) -> &'a mut Value {
    path.iter().fold(v, |v, s| match s {
        Step::Key(k) => &mut v[k.as_str()],
        Step::Index(i) => &mut v[*i],
    })
}

pub fn describe(path: &[Step]) -> String {
    path.iter()
        .map(|s| match s {
            Step::Key(k) => format!(".{k}"),
            Step::Index(i) => format!("[{i}]"),
        })
        .collect()
}

/// Adds a nonzero `delta` to the integer at `path`, keeping its encoding.
pub fn perturb(doc: &Value, path: &[Step], delta: i64) -> Value {
    let mut out = doc.clone();
    let leaf = leaf_mut(&mut out, path);
    *leaf = match leaf {
        Value::Number(x) => {
            let y = BigInt::from(x.as_i64().map(i128::from).or(x.as_u64().map(i128::from)).unwrap()) + delta;
            serde_json::from_str(&y.to_string()).unwrap()
        }
        Value::String(s) => Value::String((s.parse::<BigInt>().unwrap() + delta).to_string()),
        _ => unreachable!("not a numeric leaf"),
    };
    out
}

/// How the checker treated a mutated document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Failed to parse; the CLI exits with 2.
    Malformed,
    /// Parsed, and the named re-check failed; the CLI exits with 1.
    Rejected(String),
    Accepted,
}

pub fn check_value(v: &Value) -> Outcome {
    let doc: Document = match serde_json::from_value(v.clone()) {
        Ok(d) => d,
        Err(_) => return Outcome::Malformed,
    };
    let report = verify(&doc, &VerifyOptions::default());
    match report.first_failure() {
        Some(f) => Outcome::Rejected(f.name.clone()),
        None => Outcome::Accepted,
    }
}

pub struct Mutation {
    pub doc_index: usize,
    pub path: String,
    pub delta: i64,
    pub outcome: Outcome,
}

/// Applies `count` random single-field perturbations, each to a fresh copy
/// of a randomly chosen document.
pub fn mutate_corpus(docs: &[Document], count: usize, rng: &mut impl Rng) -> Vec<Mutation> {
    let values: Vec<Value> = docs.iter().map(|d| serde_json::to_value(d).unwrap()).collect();
    let leaves: Vec<Vec<Path>> = values.iter().map(numeric_leaves).collect();
    (0..count)
        .map(|_| {
            let doc_index = rng.gen_range(0..docs.len());
            let path = leaves[doc_index].choose(rng).expect("document has numeric fields");
            let delta = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
            let outcome = check_value(&perturb(&values[doc_index], path, delta));
            Mutation { doc_index, path: describe(path), delta, outcome }
        })
        .collect()
}

pub fn reparse(doc: &Document) -> Document {
    wire::from_json(&wire::to_json(doc)).unwrap()
}

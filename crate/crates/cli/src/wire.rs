//! JSON certificate documents.
//!
//! Integers are JSON numbers when `|x| <= 2^53` and decimal strings
//! otherwise. Rationals are `{"num": "..", "den": ".."}` with string parts.
//! Keys are emitted in sorted order.

use std::collections::BTreeMap;
use std::fmt;

use nonjordan_core::construction::{ConstructionCertificate, LambdaEntry, LiftMode};
use nonjordan_core::fp::FpMatrix;
use nonjordan_core::{BigInt, BigRational};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SCHEMA_VERSION: &str = "1";

const SAFE_INT: i64 = 1 << 53;

/// An exact integer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Int(pub BigInt);

impl Int {
    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl<T: Into<BigInt>> From<T> for Int {
    fn from(x: T) -> Self {
        Int(x.into())
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) if x.abs() <= SAFE_INT => s.serialize_i64(x),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = Int;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer or a decimal integer string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
        Ok(Int(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
        Ok(Int(v.into()))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
        v.parse::<BigInt>().map(Int).map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor)
    }
}

/// An exact rational in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub BigRational);

impl From<BigRational> for Rat {
    fn from(q: BigRational) -> Self {
        Rat(q)
    }
}

impl From<&BigRational> for Rat {
    fn from(q: &BigRational) -> Self {
        Rat(q.clone())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatParts {
    num: String,
    den: String,
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RatParts { num: self.0.numer().to_string(), den: self.0.denom().to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let parts = RatParts::deserialize(d)?;
        let num: BigInt = parts.num.parse().map_err(|_| de::Error::custom(format!("bad numerator {:?}", parts.num)))?;
        let den: BigInt = parts.den.parse().map_err(|_| de::Error::custom(format!("bad denominator {:?}", parts.den)))?;
        if den.is_zero() {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Rat(BigRational::new(num, den)))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: String,
    pub command: Invocation,
    pub seed: Int,
    pub created_unix: Int,
    /// Statement checked by each named check.
    pub provenance: BTreeMap<String, String>,
    pub certificate: Body,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Invocation {
    pub name: String,
    pub args: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Body {
    Construction(ConstructionBody),
    Group(GroupBody),
    Olshanskii(OlshanskiiBody),
    LambdaTable(LambdaBody),
    Prime(PrimeBody),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct OmegaPowerRow {
    pub k: usize,
    pub coefficient: Rat,
    pub closed_form: Rat,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ConstructionBody {
    pub n: usize,
    pub r: usize,
    pub p: Int,
    pub m: Int,
    pub lift_mode: String,
    pub residues: Vec<Int>,
    pub a: Vec<Int>,
    pub s: Vec<Int>,
    pub b: Vec<Int>,
    pub delta: Vec<Int>,
    pub atilde: Vec<Vec<Rat>>,
    pub omega_powers: Vec<OmegaPowerRow>,
    pub chern_product: Vec<Rat>,
    pub rank: Int,
    pub tau: Int,
    pub tau_special: Option<Int>,
    pub group_order_exponent: u64,
    pub abelian_exponent: u64,
    pub k: Option<usize>,
    pub lambda_gamma: Rat,
    pub checks: Vec<CheckRow>,
    pub notes: Vec<String>,
    pub passed: bool,
}

pub fn lift_mode_name(mode: LiftMode) -> &'static str {
    match mode {
        LiftMode::LeastNonnegative => "least_nonnegative",
        LiftMode::Symmetric => "symmetric",
    }
}

fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

impl From<&ConstructionCertificate> for ConstructionBody {
    fn from(c: &ConstructionCertificate) -> Self {
        ConstructionBody {
            n: c.n,
            r: c.r,
            p: c.p.into(),
            m: Int(c.m.clone()),
            lift_mode: lift_mode_name(c.lift_mode).into(),
            residues: ints(&c.residues),
            a: ints(&c.a),
            s: ints(&c.s),
            b: ints(&c.b),
            delta: ints(&c.delta),
            atilde: c.atilde.iter().map(|row| row.iter().map(Rat::from).collect()).collect(),
            omega_powers: c
                .omega_powers
                .iter()
                .map(|w| OmegaPowerRow { k: w.k, coefficient: (&w.coefficient).into(), closed_form: (&w.closed_form).into() })
                .collect(),
            chern_product: c.chern_product.coeffs().iter().map(Rat::from).collect(),
            rank: c.rank.into(),
            tau: c.tau.into(),
            tau_special: c.tau_special.map(Int::from),
            group_order_exponent: c.group_order_exponent,
            abelian_exponent: c.abelian_exponent,
            k: c.k,
            lambda_gamma: (&c.lambda_gamma).into(),
            checks: c.checks.iter().map(|x| CheckRow { name: x.name.into(), passed: x.passed }).collect(),
            notes: c.notes.clone(),
            passed: c.passed(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct BruteRow {
    pub max_abelian_order: Int,
    pub lambda: Rat,
    pub agrees: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct GroupBody {
    pub n: usize,
    pub p: Int,
    pub mode: String,
    pub order: Int,
    pub order_exponent: u64,
    pub max_abelian_order: Int,
    pub max_abelian_exponent: u64,
    pub lambda: Rat,
    pub brute: Option<BruteRow>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct AttemptRow {
    pub index: u64,
    /// Echelon basis of a common isotropic subspace refuting the attempt.
    pub witness: Option<Vec<Vec<Int>>>,
    pub nodes: Int,
    pub found: Int,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct OlshanskiiBody {
    pub n: usize,
    pub r: usize,
    pub p: Int,
    pub k: usize,
    pub certified: bool,
    pub vacuous: bool,
    pub budget: Int,
    /// `A_1 .. A_r`, row-major.
    pub matrices: Vec<Vec<Vec<Int>>>,
    /// Gram matrices of `ω_j = ω(A_j ·, A_j ·)`.
    pub forms: Vec<Vec<Vec<Int>>>,
    pub attempts: Vec<AttemptRow>,
    /// Number of `k`-dimensional subspaces covered by the final check.
    pub candidates: Int,
    pub order_exponent: Option<u64>,
    pub abelian_bound_exponent: Option<u64>,
    pub exact_abelian_exponent: Option<u64>,
}

pub fn matrix_rows(m: &FpMatrix) -> Vec<Vec<Int>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(Int::from).collect()).collect()
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct LambdaRow {
    pub n: usize,
    pub r: usize,
    pub k: Option<usize>,
    pub abelian_exponent: u64,
    pub group_exponent: u64,
    pub bound: Rat,
    /// False when `k` was rounded because `r ∤ 4n`.
    pub exact_form: bool,
}

impl From<&LambdaEntry> for LambdaRow {
    fn from(e: &LambdaEntry) -> Self {
        LambdaRow {
            n: e.n,
            r: e.r,
            k: e.k,
            abelian_exponent: e.abelian_exponent,
            group_exponent: e.group_exponent,
            bound: (&e.bound).into(),
            exact_form: e.exact_form,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub n: usize,
    pub r: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct LambdaBody {
    pub max_n: usize,
    pub max_r: usize,
    pub rows: Vec<LambdaRow>,
    pub eps: Option<Rat>,
    /// First `(n, r)` in lexicographic order with bound below `eps`.
    pub witness: Option<Witness>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PrimeBody {
    pub n: usize,
    pub h: Int,
    pub min: Int,
    pub m: Int,
    pub p: Int,
}

/// Serializes with sorted keys and a trailing newline.
pub fn to_json(doc: &Document) -> String {
    // serde_json::Value keeps object keys in a BTreeMap.
    let value = serde_json::to_value(doc).expect("document serializes");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> serde_json::Result<Document> {
    serde_json::from_str(text)
}

/// Parses `a/b` or `a` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: BigInt = num.trim().parse().map_err(|_| format!("bad rational {s:?}"))?;
    let den: BigInt = den.trim().parse().map_err(|_| format!("bad rational {s:?}"))?;
    if den.is_zero() || den.is_negative() {
        return Err(format!("bad rational {s:?}: denominator must be positive"));
    }
    Ok(BigRational::new(num, den))
}

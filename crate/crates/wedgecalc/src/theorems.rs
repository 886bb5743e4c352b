//! Named decompositions as exact identities of truncated series, with
//! instance generators and pass/fail reports.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::expr::{parse, parse_list, ParseError, SpaceExpr};
use crate::freealg::{
    ad_relator, hilbert_product_formula, hilbert_quotient_oracle_with_budget, parse_relators,
    AlgError, GeneratorSet, NcPolynomial, DEFAULT_MATRIX_BUDGET,
};
use crate::series::{reduced_series, series_of, FieldTag, GradedSeries, SeriesError, DEFAULT_MAX_CAP};
use crate::simplicial::{
    desuspend_entries, face_vertices, missing_face_sum, missing_face_wedge, monotone_sequences,
    polyprod_series, polywh_domain_enumerated, polywh_domain_series, SimplicialComplex,
    SimplicialError,
};

pub const DEFAULT_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    Ganea,
    Dbard,
    Mtypealt,
    Adinvcor,
    Etype1,
    Sphereex,
    Mooreex,
    Pdex,
    Connsum,
    Inertideal,
    OmegachlgyXcheck,
    Jamescompat,
    Cpsi,
    Prelcofib,
    PolywhDomain,
}

impl TheoremId {
    pub const ALL: [TheoremId; 15] = [
        TheoremId::Ganea,
        TheoremId::Dbard,
        TheoremId::Mtypealt,
        TheoremId::Adinvcor,
        TheoremId::Etype1,
        TheoremId::Sphereex,
        TheoremId::Mooreex,
        TheoremId::Pdex,
        TheoremId::Connsum,
        TheoremId::Inertideal,
        TheoremId::OmegachlgyXcheck,
        TheoremId::Jamescompat,
        TheoremId::Cpsi,
        TheoremId::Prelcofib,
        TheoremId::PolywhDomain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Ganea => "GANEA",
            TheoremId::Dbard => "DBARD",
            TheoremId::Mtypealt => "MTYPEALT",
            TheoremId::Adinvcor => "ADINVCOR",
            TheoremId::Etype1 => "ETYPE1",
            TheoremId::Sphereex => "SPHEREEX",
            TheoremId::Mooreex => "MOOREEX",
            TheoremId::Pdex => "PDEX",
            TheoremId::Connsum => "CONNSUM",
            TheoremId::Inertideal => "INERTIDEAL",
            TheoremId::OmegachlgyXcheck => "OMEGACHLGY_XCHECK",
            TheoremId::Jamescompat => "JAMESCOMPAT",
            TheoremId::Cpsi => "CPSI",
            TheoremId::Prelcofib => "PRELCOFIB",
            TheoremId::PolywhDomain => "POLYWH_DOMAIN",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<TheoremId, String> {
        let up = s.trim().to_ascii_uppercase();
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str() == up)
            .ok_or_else(|| format!("unknown theorem id '{s}'"))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Level, String> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(format!("unknown level '{s}' (expected quick or full)")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegistryEntry {
    pub id: TheoremId,
    pub schema: &'static str,
    pub anchor: &'static str,
}

pub fn list_theorems() -> Vec<RegistryEntry> {
    use TheoremId::*;
    let row = |id, schema, anchor| RegistryEntry { id, schema, anchor };
    vec![
        row(Ganea, "{a,b} | {x,y}", "Ω(ΣA∨ΣB) ≃ ΩΣA × ΩΣB × ΩΣ(ΩΣA∧ΩΣB)"),
        row(Dbard, "{X,Y} | {a,b}", "Ω(ΣX∨ΣY) ≃ ΩΣX × ΩΣ(ΩΣX⋉Y)"),
        row(Mtypealt, "{m,n,k}", "H(ΩM_k) ≅ T(x,y)/(ad^k(x)(y)), ΩM_k ≃ ΩS^{m+1} × ΩΣ(∨_{t<k} S^{tm+n})"),
        row(Adinvcor, "{m,n,k}", "Ω(S^{m+1}∨S^{n+1}) ≃ ΩM_k × Ω(ΩM_k ⋉ S^{km+n+1})"),
        row(Etype1, "{x,d,a,k[,gens,relators]}", "ΩY ≃ ΩΣX × ΩE', ΣE' ≃ (ΩΣX⋉C) ∨ (J_{k-1}X⋉ΣD)"),
        row(Sphereex, "{n,m,d}", "ΩM ≃ ΩS^n × Ω((ΩS^n⋉C̄) ∨ ∨_{m-1} S^n)"),
        row(Mooreex, "{n,m,p,r,d}", "ΩM ≃ ΩP^{n+1} × Ω((ΩP^{n+1}⋉C̄) ∨ ∨_{m-1} P^{n+1}), C̄ ∋ P^{2n}"),
        row(Pdex, "{p,r,n,m}", "C̄ ≃ (P^n∧∨_{m-2}P^{n+1}) ∨ S^{2n+1} ∨ P^{2n}"),
        row(Connsum, "{M,N}", "Ω(M#N) ≃ ΩM × Ω(ΩM⋉Y), Y = N minus its top cell"),
        row(Inertideal, "{gens_x,f,gens_y[,g]}", "f inert in T(V) ⇒ f+g inert in T(V⊕W)"),
        row(OmegachlgyXcheck, "{[instances]}", "H(ΩM) ≅ T(V)/(R) agrees with loop-space product splittings"),
        row(Jamescompat, "{spaces}", "Σ∏ΩΣX_i ≃ ∨_{k≥1} ∨_{i_1≤…≤i_k} Σ X_{i_1}∧…∧X_{i_k}"),
        row(Cpsi, "{spaces,a}", "(∏ΩΣX_i)⋉ΣA ≃ ∨_{k≥0} ∨_{i_1≤…≤i_k} X_{i_1}∧…∧X_{i_k}∧ΣA"),
        row(Prelcofib, "{m,facets[,missing,spaces]}", "H̃((X,∗)^{K∪S}) = H̃((X,∗)^K) ⊕ ⊕_{σ∈S} ⊗_{i∈σ} H̃(X_i)"),
        row(PolywhDomain, "{spaces,a}", "enumerated wedge domain ∨_{i_1≤…≤i_k} X_{i_1}∧…∧X_{i_k}∧ΣA"),
    ]
}

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error("instance does not match the schema: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Algebra(#[from] AlgError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

impl From<ParseError> for TheoremError {
    fn from(e: ParseError) -> TheoremError {
        TheoremError::SchemaMismatch(e.to_string())
    }
}

impl TheoremError {
    /// Exceeded a matrix or cap budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            TheoremError::Series(SeriesError::CapOverflow { .. })
                | TheoremError::Algebra(AlgError::MatrixBudgetExceeded { .. })
                | TheoremError::Simplicial(SimplicialError::Series(SeriesError::CapOverflow { .. }))
        )
    }

    /// The instance itself is malformed.
    pub fn is_schema(&self) -> bool {
        match self {
            TheoremError::SchemaMismatch(_) => true,
            TheoremError::Algebra(e) => !matches!(e, AlgError::MatrixBudgetExceeded { .. }),
            TheoremError::Simplicial(e) => !matches!(e, SimplicialError::Series(_)),
            TheoremError::Series(SeriesError::InvalidExpr(_)) => true,
            TheoremError::Series(_) => false,
        }
    }
}

fn schema(msg: impl Into<String>) -> TheoremError {
    TheoremError::SchemaMismatch(msg.into())
}

fn bigint_json(c: &BigInt) -> Value {
    Value::Number(c.to_string().parse().expect("integer literal is valid JSON"))
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub field: FieldTag,
    pub label: String,
    pub degree: usize,
    pub lhs: Value,
    pub rhs: Value,
}

/// One checked instance. `fields_checked`, `labels`, `lhs` and `rhs` are
/// parallel lists with one entry per compared pair of series.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub theorem: TheoremId,
    pub instance: Value,
    pub cap: usize,
    pub fields_checked: Vec<FieldTag>,
    pub labels: Vec<String>,
    pub lhs: Vec<GradedSeries>,
    pub rhs: Vec<GradedSeries>,
    pub pass: bool,
    pub first_discrepancy: Option<Discrepancy>,
    pub assumed_hypotheses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summands: Option<Vec<String>>,
}

impl Report {
    pub fn summary_line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut fields: Vec<String> = Vec::new();
        for f in &self.fields_checked {
            let s = f.to_string();
            if !fields.contains(&s) {
                fields.push(s);
            }
        }
        let mut line = format!(
            "{status} {} {} cap={} fields={}",
            self.theorem,
            self.instance,
            self.cap,
            fields.join(",")
        );
        if let Some(d) = &self.first_discrepancy {
            line.push_str(&format!(
                " first discrepancy: {} over {} at degree {}: lhs {} rhs {}",
                d.label, d.field, d.degree, d.lhs, d.rhs
            ));
        }
        line
    }
}

type Pairs = Vec<(String, GradedSeries, GradedSeries)>;

struct Ctx<'a> {
    inst: &'a Map<String, Value>,
    cap: usize,
    budget: usize,
}

const COMMON_KEYS: [&str; 3] = ["cap", "fields", "assumed_hypotheses"];

impl<'a> Ctx<'a> {
    fn allow(&self, keys: &[&str]) -> Result<(), TheoremError> {
        for k in self.inst.keys() {
            if !keys.contains(&k.as_str()) && !COMMON_KEYS.contains(&k.as_str()) {
                return Err(schema(format!("unexpected key '{k}'")));
            }
        }
        Ok(())
    }

    fn has(&self, key: &str) -> bool {
        self.inst.contains_key(key)
    }

    fn u32(&self, key: &str) -> Result<u32, TheoremError> {
        self.inst
            .get(key)
            .ok_or_else(|| schema(format!("missing key '{key}'")))?
            .as_u64()
            .and_then(|v| u32::try_from(v).ok())
            .ok_or_else(|| schema(format!("'{key}' must be a natural number")))
    }

    fn str(&self, key: &str) -> Result<&'a str, TheoremError> {
        self.inst
            .get(key)
            .ok_or_else(|| schema(format!("missing key '{key}'")))?
            .as_str()
            .ok_or_else(|| schema(format!("'{key}' must be a string")))
    }

    fn expr(&self, key: &str) -> Result<SpaceExpr, TheoremError> {
        let e = parse(self.str(key)?)?;
        e.validate().map_err(schema)?;
        Ok(e)
    }

    fn exprs(&self, key: &str) -> Result<Vec<SpaceExpr>, TheoremError> {
        let list = match self.inst.get(key) {
            Some(Value::String(s)) => parse_list(s)?,
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_str()
                        .ok_or_else(|| schema(format!("'{key}' entries must be strings")))
                        .and_then(|s| Ok(parse(s)?))
                })
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(schema(format!("'{key}' must be a list of expressions"))),
            None => return Err(schema(format!("missing key '{key}'"))),
        };
        if list.is_empty() {
            return Err(schema(format!("'{key}' is empty")));
        }
        for e in &list {
            e.validate().map_err(schema)?;
        }
        Ok(list)
    }

    fn ints(&self, key: &str) -> Result<Vec<i64>, TheoremError> {
        self.inst
            .get(key)
            .ok_or_else(|| schema(format!("missing key '{key}'")))?
            .as_array()
            .ok_or_else(|| schema(format!("'{key}' must be an array of integers")))?
            .iter()
            .map(|v| v.as_i64().ok_or_else(|| schema(format!("'{key}' must be an array of integers"))))
            .collect()
    }

    fn faces(&self, key: &str) -> Result<Vec<Vec<usize>>, TheoremError> {
        serde_json::from_value(self.inst[key].clone())
            .map_err(|_| schema(format!("'{key}' must be a list of vertex lists")))
    }

    fn oracle(
        &self,
        gens: &GeneratorSet,
        rels: &[NcPolynomial],
        field: FieldTag,
        cap: usize,
    ) -> Result<GradedSeries, TheoremError> {
        Ok(hilbert_quotient_oracle_with_budget(gens, rels, field, cap, self.budget)?)
    }
}

fn red(e: &SpaceExpr, field: FieldTag, cap: usize) -> Result<GradedSeries, TheoremError> {
    Ok(series_of(e, field, cap, true)?)
}

fn loop_p(e: &SpaceExpr, field: FieldTag, cap: usize) -> Result<GradedSeries, TheoremError> {
    Ok(series_of(&SpaceExpr::loop_of(e.clone()), field, cap, false)?)
}

fn one(field: FieldTag, cap: usize) -> GradedSeries {
    GradedSeries::one(field, cap)
}

/// `1/(1 - s)`.
fn geometric(s: &GradedSeries) -> Result<GradedSeries, TheoremError> {
    Ok(one(s.field, s.cap).sub(s)?.invert()?)
}

fn unreduced(mut s: GradedSeries) -> GradedSeries {
    s.reduced = false;
    s
}

fn copies(e: SpaceExpr, n: usize) -> Vec<SpaceExpr> {
    vec![e; n]
}

/// A wedge of the given summands, `pt` when empty and the summand itself when single.
fn wedge_of(mut parts: Vec<SpaceExpr>) -> SpaceExpr {
    match parts.len() {
        0 => SpaceExpr::Point,
        1 => parts.pop().expect("one part"),
        _ => SpaceExpr::Wedge(parts),
    }
}

fn sphere(n: u32) -> Result<SpaceExpr, TheoremError> {
    if n == 0 {
        return Err(schema("sphere dimensions must be positive"));
    }
    Ok(SpaceExpr::sphere(n))
}

fn commutator(a: usize, b: usize) -> NcPolynomial {
    NcPolynomial::generator(a).commutator(&NcPolynomial::generator(b))
}

fn check_unit_present(d: &[i64], field: FieldTag) -> Result<(), TheoremError> {
    let unit = d.iter().any(|&x| match field {
        FieldTag::Rational => x.abs() == 1,
        FieldTag::Prime(p) => x.rem_euclid(p as i64) != 0,
    });
    if unit {
        Ok(())
    } else {
        Err(schema("some coefficient d_j must be a unit"))
    }
}

fn ganea(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["a", "b", "x", "y"])?;
    let (x, y) = if c.has("a") || c.has("b") {
        (sphere(c.u32("a")? + 1)?, sphere(c.u32("b")? + 1)?)
    } else {
        (c.expr("x")?, c.expr("y")?)
    };
    let cap = c.cap;
    let lhs = loop_p(&SpaceExpr::Wedge(vec![x.clone(), y.clone()]), f, cap)?;
    let l1 = loop_p(&x, f, cap)?;
    let l2 = loop_p(&y, f, cap)?;
    let cross = l1.sub(&one(f, cap))?.mul(&l2.sub(&one(f, cap))?)?;
    let rhs = unreduced(l1.mul(&l2)?.mul(&geometric(&cross)?)?);
    Ok(vec![("loop of wedge".into(), lhs, rhs)])
}

fn dbard(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["X", "Y", "a", "b"])?;
    let (x, y) = if c.has("a") || c.has("b") {
        (sphere(c.u32("a")?)?, sphere(c.u32("b")?)?)
    } else {
        (c.expr("X")?, c.expr("Y")?)
    };
    let cap = c.cap;
    let sx = SpaceExpr::suspend(x.clone(), 1);
    let sy = SpaceExpr::suspend(y.clone(), 1);
    let lhs = loop_p(&SpaceExpr::Wedge(vec![sx.clone(), sy]), f, cap)?;
    let xt = red(&x, f, cap)?;
    let yt = red(&y, f, cap)?;
    let fibre = geometric(&yt.mul(&geometric(&xt)?)?)?;
    let rhs = unreduced(loop_p(&sx, f, cap)?.mul(&fibre)?);
    Ok(vec![("loop of wedge".into(), lhs, rhs)])
}

fn two_cell(c: &Ctx) -> Result<(u32, u32, u32), TheoremError> {
    let (m, n, k) = (c.u32("m")?, c.u32("n")?, c.u32("k")?);
    if m == 0 || n == 0 || k == 0 {
        return Err(schema("m, n and k must be positive"));
    }
    Ok((m, n, k))
}

fn xy_gens(m: u32, n: u32) -> GeneratorSet {
    GeneratorSet::new(vec![("x", m), ("y", n)]).expect("distinct names, positive degrees")
}

fn mtypealt(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["m", "n", "k"])?;
    let (m, n, k) = two_cell(c)?;
    let lhs = c.oracle(&xy_gens(m, n), &[ad_relator(k, 0, 1)], f, c.cap)?;
    let rhs = hilbert_product_formula(m, n, k, f, c.cap);
    Ok(vec![("quotient algebra".into(), lhs, rhs)])
}

fn adinvcor(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["m", "n", "k"])?;
    let (m, n, k) = two_cell(c)?;
    let cap = c.cap;
    let lhs = loop_p(&SpaceExpr::Wedge(vec![sphere(m + 1)?, sphere(n + 1)?]), f, cap)?;
    let p = c.oracle(&xy_gens(m, n), &[ad_relator(k, 0, 1)], f, cap + 1)?;
    let mut factors = copies(sphere(m)?, k as usize);
    factors.push(sphere(n + 1)?);
    let w = red(&SpaceExpr::Smash(factors), f, cap + 1)?;
    let half = p.mul(&w)?;
    let fibre = geometric(&half.shift(-1)?)?;
    let rhs = unreduced(p.truncate(cap).mul(&fibre)?);
    Ok(vec![("loop of wedge".into(), lhs, rhs)])
}

fn etype1(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["x", "d", "a", "k", "gens", "relators"])?;
    let (x, d, a) = (c.expr("x")?, c.expr("d")?, c.expr("a")?);
    let k = c.u32("k")?;
    if k == 0 {
        return Err(schema("k must be positive"));
    }
    let cap = c.cap;
    let w = cap + 1;
    let xt = red(&x, f, w)?;
    let td = red(&SpaceExpr::suspend(d.clone(), 1), f, w)?;
    let ta = red(&SpaceExpr::suspend(a, 1), f, w)?;
    let p = geometric(&xt)?;
    let c_tilde = xt.pow(k).mul(&td)?.sub(&ta)?;
    if !c_tilde.is_nonnegative() {
        return Err(schema(format!("cofibre series {c_tilde} has a negative coefficient")));
    }
    let james_part = red(
        &SpaceExpr::half_smash(SpaceExpr::james(x, k - 1), SpaceExpr::suspend(d, 1)),
        f,
        w,
    )?;
    let via_splitting = p.mul(&c_tilde)?.add(&james_part)?;
    let via_cofibre = p.mul(&td)?.sub(&p.mul(&ta)?)?;
    let mut out = vec![(
        "fibre E'".to_string(),
        via_splitting.truncate(cap),
        via_cofibre.truncate(cap),
    )];
    if c.has("gens") || c.has("relators") {
        let gens = GeneratorSet::parse(c.str("gens")?)?;
        let rels = parse_relators(c.str("relators")?, &gens)?;
        let lhs = c.oracle(&gens, &rels, f, cap)?;
        let loop_e = geometric(&via_splitting.shift(-1)?)?;
        let rhs = unreduced(p.truncate(cap).mul(&loop_e)?);
        out.push(("loop of cofibre".into(), lhs, rhs));
    }
    Ok(out)
}

fn shape(c: &Ctx) -> Result<(u32, usize, Vec<i64>), TheoremError> {
    let n = c.u32("n")?;
    let m = c.u32("m")? as usize;
    let d = c.ints("d")?;
    if n < 2 {
        return Err(schema("n must be at least 2"));
    }
    if m < 2 {
        return Err(schema("m must be at least 2"));
    }
    if d.len() != m - 1 {
        return Err(schema(format!("d must have m-1 = {} entries", m - 1)));
    }
    Ok((n, m, d))
}

fn sphereex(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["n", "m", "d"])?;
    let (n, m, d) = shape(c)?;
    check_unit_present(&d, f)?;
    let gens = GeneratorSet::new((1..=m).map(|i| (format!("x{i}"), n - 1)).collect())?;
    let mut rel = NcPolynomial::zero();
    for (j, dj) in d.iter().enumerate() {
        rel = rel.add(&commutator(0, j + 1).scale(&BigInt::from(*dj)));
    }
    let lhs = c.oracle(&gens, &[rel], f, c.cap)?;
    let sn = sphere(n)?;
    let mut inner = Vec::new();
    if m > 2 {
        let cbar = SpaceExpr::Smash(vec![sphere(n - 1)?, wedge_of(copies(sn.clone(), m - 2))]);
        inner.push(SpaceExpr::half_smash(SpaceExpr::loop_of(sn.clone()), cbar));
    }
    inner.extend(copies(sn.clone(), m - 1));
    let rhs = unreduced(loop_p(&sn, f, c.cap)?.mul(&loop_p(&wedge_of(inner), f, c.cap)?)?);
    Ok(vec![("loop homology".into(), lhs, rhs)])
}

fn prime_field(c: &Ctx, f: FieldTag) -> Result<(u32, u32), TheoremError> {
    let (p, r) = (c.u32("p")?, c.u32("r")?);
    if !crate::expr::is_prime(p) || r == 0 {
        return Err(schema("p must be prime and r positive"));
    }
    if f != FieldTag::Prime(p) {
        return Err(schema(format!("this identity is checked over F{p} only")));
    }
    Ok((p, r))
}

fn mooreex(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["n", "m", "p", "r", "d"])?;
    let (p, r) = prime_field(c, f)?;
    let (n, m, d) = shape(c)?;
    check_unit_present(&d, f)?;
    let mut gens: Vec<(String, u32)> = (1..=m).map(|i| (format!("u{i}"), n - 1)).collect();
    gens.extend((1..=m).map(|i| (format!("v{i}"), n)));
    let gens = GeneratorSet::new(gens)?;
    let (u, v) = (|i: usize| i, |i: usize| m + i);
    let mut top = NcPolynomial::zero();
    let mut bottom = NcPolynomial::zero();
    for (j, dj) in d.iter().enumerate() {
        let dj = BigInt::from(*dj);
        top = top.add(&commutator(v(0), v(j + 1)).scale(&dj));
        bottom = bottom.add(&commutator(u(0), v(j + 1)).add(&commutator(v(0), u(j + 1))).scale(&dj));
    }
    let lhs = c.oracle(&gens, &[top, bottom], f, c.cap)?;
    let moore = |k: u32| SpaceExpr::moore(k, p, r);
    let mut cbar = Vec::new();
    if m > 2 {
        cbar.push(SpaceExpr::Smash(vec![moore(n), wedge_of(copies(moore(n + 1), m - 2))]));
    }
    cbar.push(moore(2 * n));
    let base = moore(n + 1);
    let mut inner = vec![SpaceExpr::half_smash(SpaceExpr::loop_of(base.clone()), wedge_of(cbar))];
    inner.extend(copies(base.clone(), m - 1));
    let rhs = unreduced(loop_p(&base, f, c.cap)?.mul(&loop_p(&wedge_of(inner), f, c.cap)?)?);
    Ok(vec![("loop homology".into(), lhs, rhs)])
}

fn pdex(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["p", "r", "n", "m"])?;
    let (p, r) = prime_field(c, f)?;
    let (n, m) = (c.u32("n")?, c.u32("m")? as usize);
    if n < 2 || m < 2 {
        return Err(schema("n and m must be at least 2"));
    }
    let cap = c.cap;
    let moore = |k: u32| SpaceExpr::moore(k, p, r);
    let mut parts = Vec::new();
    if m > 2 {
        parts.push(SpaceExpr::Smash(vec![moore(n), wedge_of(copies(moore(n + 1), m - 2))]));
    }
    parts.push(sphere(2 * n + 1)?);
    parts.push(moore(2 * n));
    let lhs = red(&wedge_of(parts), f, cap)?;
    let t = red(
        &SpaceExpr::half_smash(moore(n), wedge_of(copies(moore(n + 1), m - 1))),
        f,
        cap,
    )?;
    let top = (2 * n) as usize;
    let c_tilde = if t.coeff(top).is_positive() {
        t.sub(&GradedSeries::monomial(f, cap, top, 1))?
    } else {
        t.add(&GradedSeries::monomial(f, cap, top + 1, 1))?
    };
    let d_tilde = red(&wedge_of(copies(moore(n + 1), m - 1)), f, cap)?;
    let rhs = c_tilde.sub(&d_tilde)?;
    Ok(vec![("cofibre C-bar".into(), lhs, rhs)])
}

fn sphere_product(text: &str) -> Result<(u32, u32), TheoremError> {
    let dim = |s: &str| -> Option<u32> {
        let s = s.trim().strip_prefix('S')?;
        let s = s.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(s);
        s.parse().ok()
    };
    let (a, b) = text
        .split_once('x')
        .and_then(|(a, b)| Some((dim(a)?, dim(b)?)))
        .ok_or_else(|| schema(format!("'{text}' is not of the form SaxSb")))?;
    if a < 2 || b < 2 {
        return Err(schema("sphere factors must have dimension at least 2"));
    }
    Ok((a, b))
}

fn connsum(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["M", "N"])?;
    let (a, b) = sphere_product(c.str("M")?)?;
    let (cc, d) = sphere_product(c.str("N")?)?;
    if a + b != cc + d {
        return Err(schema("M and N must have the same dimension"));
    }
    let gens = GeneratorSet::new(vec![("u1", a - 1), ("v1", b - 1), ("u2", cc - 1), ("v2", d - 1)])?;
    let rel = commutator(0, 1).add(&commutator(2, 3));
    let lhs = c.oracle(&gens, &[rel], f, c.cap)?;
    let lm = SpaceExpr::Product(vec![
        SpaceExpr::loop_of(sphere(a)?),
        SpaceExpr::loop_of(sphere(b)?),
    ]);
    let p_m = series_of(&lm, f, c.cap, false)?;
    let y = SpaceExpr::Wedge(vec![sphere(cc)?, sphere(d)?]);
    let fibre = loop_p(&SpaceExpr::half_smash(lm, y), f, c.cap)?;
    let rhs = unreduced(p_m.mul(&fibre)?);
    Ok(vec![("loop homology".into(), lhs, rhs)])
}

fn shift_generators(p: &NcPolynomial, by: usize) -> NcPolynomial {
    NcPolynomial {
        terms: p
            .terms
            .iter()
            .map(|(w, c)| (w.iter().map(|&g| g + by as u16).collect(), c.clone()))
            .collect(),
    }
}

fn single_relator(text: &str, gens: &GeneratorSet) -> Result<NcPolynomial, TheoremError> {
    let mut rels = parse_relators(text, gens)?;
    if rels.len() != 1 {
        return Err(schema("expected a single relator"));
    }
    Ok(rels.pop().expect("one relator"))
}

fn inertideal(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["gens_x", "f", "gens_y", "g"])?;
    let gx = GeneratorSet::parse(c.str("gens_x")?)?;
    let gy = GeneratorSet::parse(c.str("gens_y")?)?;
    let all = gx.concat(&gy)?;
    let fx = single_relator(c.str("f")?, &gx)?;
    let g = if c.has("g") {
        shift_generators(&single_relator(c.str("g")?, &gy)?, gx.len())
    } else {
        NcPolynomial::zero()
    };
    if !g.is_zero() && fx.degree(&gx) != g.degree(&all) {
        return Err(schema("f and g must have the same degree"));
    }
    let lhs = c.oracle(&all, &[fx.add(&g)], f, c.cap)?;
    let p_m = c.oracle(&gx, &[fx], f, c.cap)?;
    let mut y = GradedSeries::zero(f, c.cap);
    for i in 0..gy.len() {
        y = y.add(&GradedSeries::monomial(f, c.cap, gy.degree(i) as usize, 1))?;
    }
    let rhs = unreduced(p_m.mul(&geometric(&p_m.mul(&y)?)?)?);
    Ok(vec![("quotient algebra".into(), lhs, rhs)])
}

const XCHECK_IDS: [TheoremId; 3] = [TheoremId::Mtypealt, TheoremId::Sphereex, TheoremId::Connsum];

fn omegachlgy(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["instances"])?;
    let items: Vec<(TheoremId, Value)> = match c.inst.get("instances") {
        None => XCHECK_IDS
            .iter()
            .flat_map(|&id| default_instances(id, Level::Quick).into_iter().map(move |v| (id, v)))
            .collect(),
        Some(Value::Array(list)) => list
            .iter()
            .map(|item| {
                let id: TheoremId = item
                    .get("theorem")
                    .and_then(Value::as_str)
                    .ok_or_else(|| schema("each entry needs a 'theorem' string"))?
                    .parse()
                    .map_err(schema)?;
                if !XCHECK_IDS.contains(&id) {
                    return Err(schema(format!("{id} has no quotient presentation to compare")));
                }
                Ok((id, item.get("instance").cloned().unwrap_or_else(|| json!({}))))
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(schema("'instances' must be an array")),
    };
    let mut out = Vec::new();
    for (id, inst) in items {
        let obj = inst.as_object().ok_or_else(|| schema("instances must be objects"))?;
        let own = instance_cap(id, obj)?;
        let sub = Ctx {
            inst: obj,
            cap: own.min(c.cap),
            budget: c.budget,
        };
        for (label, l, r) in checker(id)(&sub, f)? {
            out.push((format!("{id} {inst} {label}"), l, r));
        }
    }
    Ok(out)
}

fn jamescompat(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["spaces"])?;
    let xs = c.exprs("spaces")?;
    let cap = c.cap;
    let prod = SpaceExpr::Product(
        xs.iter().map(|x| SpaceExpr::loop_of(SpaceExpr::suspend(x.clone(), 1))).collect(),
    );
    let lhs = red(&SpaceExpr::suspend(prod, 1), f, cap)?;
    let tilde: Vec<GradedSeries> =
        xs.iter().map(|x| reduced_series(x, f, cap)).collect::<Result<_, _>>()?;
    let lows: Vec<Option<usize>> = tilde.iter().map(GradedSeries::lowest_degree).collect();
    let mut rhs = GradedSeries::zero(f, cap);
    for seq in monotone_sequences(&lows, 1, cap).into_iter().filter(|s| !s.is_empty()) {
        let mut term = GradedSeries::monomial(f, cap, 1, 1);
        for i in seq {
            term = term.mul(&tilde[i])?;
        }
        rhs = rhs.add(&term)?;
    }
    Ok(vec![("suspended product".into(), lhs, rhs)])
}

fn cpsi(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["spaces", "a"])?;
    let xs = c.exprs("spaces")?;
    let a = c.expr("a")?;
    let prod = SpaceExpr::Product(
        xs.iter().map(|x| SpaceExpr::loop_of(SpaceExpr::suspend(x.clone(), 1))).collect(),
    );
    let lhs = red(&SpaceExpr::half_smash(prod, SpaceExpr::suspend(a.clone(), 1)), f, c.cap)?;
    let rhs = polywh_domain_series(&xs, &a, f, c.cap)?;
    Ok(vec![("half-smash".into(), lhs, rhs)])
}

fn prelcofib(c: &Ctx, f: FieldTag) -> Result<Pairs, TheoremError> {
    c.allow(&["m", "facets", "missing", "spaces"])?;
    let m = c.u32("m")? as usize;
    if !c.has("facets") {
        return Err(schema("missing key 'facets'"));
    }
    let k = SimplicialComplex::from_facets(m, &c.faces("facets")?)?;
    let s = if c.has("missing") {
        c.faces("missing")?
    } else {
        k.missing_faces().into_iter().filter(|f| f.len() >= 2).collect()
    };
    if let Some(small) = s.iter().find(|f| f.len() < 2) {
        return Err(SimplicialError::MissingFaceTooSmall(format!("{small:?}")).into());
    }
    let spaces = if c.has("spaces") {
        c.exprs("spaces")?
    } else {
        copies(SpaceExpr::sphere(2), m)
    };
    let cap = c.cap;
    let kbar = k.add_faces(&s)?;
    let lhs = polyprod_series(&kbar, &spaces, f, cap)?.sub(&polyprod_series(&k, &spaces, f, cap)?)?;
    let rhs = missing_face_sum(&s, &spaces, f, cap)?;
    let mut out = vec![("face sum".to_string(), lhs.clone(), rhs)];
    if let Ok(xs) = desuspend_entries(&spaces) {
        let a = missing_face_wedge(&k, &s, &xs)?;
        let sigma_a = red(&SpaceExpr::suspend(a, 1), f, cap + 1)?;
        let shifted = sigma_a.shift(1)?.truncate(cap);
        out.push(("suspended cofibre".into(), lhs, shifted));
    }
    Ok(out)
}

fn polywh_domain(c: &Ctx, f: FieldTag) -> Result<(Pairs, Vec<String>), TheoremError> {
    c.allow(&["spaces", "a"])?;
    let xs = c.exprs("spaces")?;
    let a = c.expr("a")?;
    let (enumerated, summands) = polywh_domain_enumerated(&xs, &a, f, c.cap)?;
    let closed = polywh_domain_series(&xs, &a, f, c.cap)?;
    Ok((
        vec![("domain".into(), enumerated, closed)],
        summands.iter().map(SpaceExpr::render).collect(),
    ))
}

type Checker = fn(&Ctx, FieldTag) -> Result<Pairs, TheoremError>;

fn checker(id: TheoremId) -> Checker {
    use TheoremId::*;
    match id {
        Ganea => ganea,
        Dbard => dbard,
        Mtypealt => mtypealt,
        Adinvcor => adinvcor,
        Etype1 => etype1,
        Sphereex => sphereex,
        Mooreex => mooreex,
        Pdex => pdex,
        Connsum => connsum,
        Inertideal => inertideal,
        OmegachlgyXcheck => omegachlgy,
        Jamescompat => jamescompat,
        Cpsi => cpsi,
        Prelcofib => prelcofib,
        PolywhDomain => |c, f| polywh_domain(c, f).map(|(pairs, _)| pairs),
    }
}

fn instance_cap(id: TheoremId, inst: &Map<String, Value>) -> Result<usize, TheoremError> {
    match inst.get("cap") {
        Some(v) => v
            .as_u64()
            .map(|c| c as usize)
            .ok_or_else(|| schema("'cap' must be a natural number")),
        None => Ok(match id {
            TheoremId::Connsum | TheoremId::Inertideal => 7,
            _ => DEFAULT_CAP,
        }),
    }
}

fn default_fields(id: TheoremId, inst: &Map<String, Value>) -> Vec<FieldTag> {
    use TheoremId::*;
    match id {
        Mooreex | Pdex => match inst.get("p").and_then(Value::as_u64) {
            Some(p) => vec![FieldTag::Prime(p as u32)],
            None => vec![FieldTag::Rational],
        },
        Ganea | Dbard => vec![FieldTag::Rational, FieldTag::Prime(2)],
        Mtypealt => vec![FieldTag::Rational, FieldTag::Prime(2), FieldTag::Prime(3)],
        _ => vec![FieldTag::Rational],
    }
}

fn instance_fields(inst: &Map<String, Value>) -> Result<Option<Vec<FieldTag>>, TheoremError> {
    let Some(v) = inst.get("fields") else { return Ok(None) };
    let list = v.as_array().ok_or_else(|| schema("'fields' must be an array"))?;
    list.iter()
        .map(|f| {
            f.as_str()
                .ok_or_else(|| schema("fields are strings such as \"Q\" or \"F2\""))?
                .parse::<FieldTag>()
                .map_err(|e| schema(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn hypotheses(inst: &Map<String, Value>) -> Result<Vec<String>, TheoremError> {
    match inst.get("assumed_hypotheses") {
        None => Ok(Vec::new()),
        Some(Value::String(s)) => Ok(vec![s.clone()]),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| schema("assumed_hypotheses must be strings"))
            })
            .collect(),
        Some(_) => Err(schema("assumed_hypotheses must be a string list")),
    }
}

/// Checks one instance. `cap` and `fields` override the instance's own
/// `cap`/`fields` keys, which in turn override the per-theorem defaults.
pub fn verify(
    id: TheoremId,
    instance: &Value,
    cap: Option<usize>,
    fields: Option<&[FieldTag]>,
) -> Result<Report, TheoremError> {
    verify_with_budget(id, instance, cap, fields, DEFAULT_MATRIX_BUDGET)
}

pub fn verify_with_budget(
    id: TheoremId,
    instance: &Value,
    cap: Option<usize>,
    fields: Option<&[FieldTag]>,
    budget: usize,
) -> Result<Report, TheoremError> {
    let inst = instance.as_object().ok_or_else(|| schema("an instance is a JSON object"))?;
    let cap = match cap {
        Some(c) => c,
        None => instance_cap(id, inst)?,
    };
    if cap > DEFAULT_MAX_CAP {
        return Err(SeriesError::CapOverflow {
            cap,
            max: DEFAULT_MAX_CAP,
        }
        .into());
    }
    let fields = match fields {
        Some(f) => f.to_vec(),
        None => instance_fields(inst)?.unwrap_or_else(|| default_fields(id, inst)),
    };
    if fields.is_empty() {
        return Err(schema("no fields to check"));
    }
    let assumed_hypotheses = hypotheses(inst)?;
    let ctx = Ctx { inst, cap, budget };
    let mut report = Report {
        theorem: id,
        instance: instance.clone(),
        cap,
        fields_checked: Vec::new(),
        labels: Vec::new(),
        lhs: Vec::new(),
        rhs: Vec::new(),
        pass: true,
        first_discrepancy: None,
        assumed_hypotheses,
        summands: None,
    };
    for &f in &fields {
        let pairs = if id == TheoremId::PolywhDomain {
            let (pairs, summands) = polywh_domain(&ctx, f)?;
            report.summands.get_or_insert(summands);
            pairs
        } else {
            checker(id)(&ctx, f)?
        };
        for (label, lhs, rhs) in pairs {
            if report.first_discrepancy.is_none() {
                report.first_discrepancy = first_difference(&lhs, &rhs).map(|degree| Discrepancy {
                    field: f,
                    label: label.clone(),
                    degree,
                    lhs: bigint_json(&lhs.coeff(degree)),
                    rhs: bigint_json(&rhs.coeff(degree)),
                });
            }
            report.fields_checked.push(f);
            report.labels.push(label);
            report.lhs.push(lhs);
            report.rhs.push(rhs);
        }
    }
    report.pass = report.first_discrepancy.is_none();
    Ok(report)
}

/// The lowest degree where the two series differ, including a cap mismatch.
fn first_difference(a: &GradedSeries, b: &GradedSeries) -> Option<usize> {
    let top = a.cap.max(b.cap);
    (0..=top).find(|&d| d > a.cap || d > b.cap || a.coeff(d) != b.coeff(d))
}

/// The instances checked by `verify` for a theorem at the given level.
pub fn default_instances(id: TheoremId, level: Level) -> Vec<Value> {
    use TheoremId::*;
    let mut out = vec![quick_instance(id)];
    if level == Level::Quick {
        return out;
    }
    match id {
        Ganea | Dbard => {
            for a in 1..=3 {
                for b in 1..=3 {
                    out.push(json!({"a": a, "b": b, "cap": 24, "fields": ["Q", "F2"]}));
                }
            }
            let moore = if id == Ganea {
                json!({"x": "P(3,3,1)", "y": "P(3,3,1)", "cap": 24, "fields": ["F3"]})
            } else {
                json!({"X": "P(3,3,1)", "Y": "P(3,3,1)", "cap": 24, "fields": ["F3"]})
            };
            out.push(moore);
        }
        Mtypealt => {
            out.clear();
            for m in 1..=3 {
                for n in 1..=3 {
                    for k in 1..=3 {
                        out.push(json!({"m": m, "n": n, "k": k, "cap": 12, "fields": ["Q", "F2", "F3"]}));
                    }
                }
            }
        }
        Adinvcor => {
            for m in 1..=2 {
                for n in 1..=2 {
                    for k in 1..=3 {
                        out.push(json!({"m": m, "n": n, "k": k, "cap": 12}));
                    }
                }
            }
        }
        Etype1 => {
            out.push(json!({"x": "S(2)", "d": "S(3)", "a": "smash(S(2),S(2),S(3))", "k": 2,
                            "gens": "x:2,y:3", "relators": "ad(2;x,y)"}));
            out.push(json!({"x": "S(2)", "d": "S(2)", "a": "smash(S(2),S(2),S(2),S(2))", "k": 3,
                            "gens": "x:2,y:2", "relators": "ad(3;x,y)", "fields": ["Q", "F2"]}));
            out.push(json!({"x": "wedge(S(2),S(3))", "d": "S(3)", "a": "S(6)", "k": 1}));
        }
        Sphereex => {
            out.push(json!({"n": 3, "m": 4, "d": [1, 0, 2]}));
            out.push(json!({"n": 4, "m": 3, "d": [-1, 3], "fields": ["Q", "F2"]}));
            out.push(json!({"n": 2, "m": 3, "d": [0, 1], "cap": 10}));
            out.push(json!({"n": 3, "m": 2, "d": [1]}));
        }
        Mooreex => {
            out.push(json!({"n": 2, "m": 3, "p": 3, "r": 1, "d": [1, 2], "cap": 8}));
            out.push(json!({"n": 3, "m": 2, "p": 5, "r": 1, "d": [2]}));
            out.push(json!({"n": 3, "m": 3, "p": 3, "r": 2, "d": [0, 1], "cap": 10}));
        }
        Pdex => {
            out.push(json!({"p": 3, "r": 1, "n": 2, "m": 3, "cap": 6}));
            out.push(json!({"p": 5, "r": 1, "n": 3, "m": 2, "cap": 10}));
            out.push(json!({"p": 3, "r": 2, "n": 2, "m": 4, "cap": 8}));
        }
        Connsum => {
            out.push(json!({"M": "S3xS3", "N": "S3xS3", "cap": 12}));
            out.push(json!({"M": "S2xS3", "N": "S3xS2", "cap": 9}));
        }
        Inertideal => {
            out.push(json!({"gens_x": "a:1,b:1", "f": "com(a,b)", "gens_y": "c:1,d:1",
                            "g": "com(c,d)", "assumed_hypotheses": ["com(a,b) is inert in T(a,b)"]}));
            out.push(json!({"gens_x": "a:1,b:1", "f": "com(a,b)", "gens_y": "c:2", "cap": 10,
                            "assumed_hypotheses": ["com(a,b) is inert in T(a,b)"]}));
        }
        OmegachlgyXcheck => {
            out.push(json!({"instances": [
                {"theorem": "MTYPEALT", "instance": {"m": 2, "n": 3, "k": 2}},
                {"theorem": "SPHEREEX", "instance": {"n": 3, "m": 4, "d": [1, 0, 2]}},
                {"theorem": "CONNSUM", "instance": {"M": "S3xS3", "N": "S3xS3"}}
            ]}));
        }
        Jamescompat | Cpsi | PolywhDomain => {
            let grid = [
                ("S(1)", "S(1)", "Q"),
                ("S(1),S(1)", "S(2)", "Q"),
                ("S(1),S(2),S(3)", "S(1)", "Q"),
                ("wedge(S(1),S(2)),S(2)", "wedge(S(1),S(3))", "Q"),
                ("P(2,2,1),S(1)", "P(3,2,1)", "F2"),
                ("P(2,3,1),P(3,3,1)", "S(2)", "F3"),
            ];
            for (spaces, a, field) in grid {
                let mut inst = json!({"spaces": spaces, "cap": 12, "fields": [field]});
                if id != Jamescompat {
                    inst["a"] = json!(a);
                }
                out.push(inst);
            }
        }
        Prelcofib => out.extend(prelcofib_grid()),
    }
    out
}

fn quick_instance(id: TheoremId) -> Value {
    use TheoremId::*;
    match id {
        Ganea => json!({"a": 1, "b": 2, "cap": 20}),
        Dbard => json!({"X": "S(2)", "Y": "S(2)"}),
        Mtypealt => json!({"m": 2, "n": 2, "k": 1}),
        Adinvcor => json!({"m": 2, "n": 2, "k": 2}),
        Etype1 => json!({"x": "S(2)", "d": "S(2)", "a": "smash(S(2),S(2),S(2))", "k": 2,
                         "gens": "x:2,y:2", "relators": "ad(2;x,y)"}),
        Sphereex => json!({"n": 3, "m": 3, "d": [1, 0]}),
        Mooreex => json!({"n": 2, "m": 2, "p": 3, "r": 1, "d": [1]}),
        Pdex => json!({"p": 3, "r": 1, "n": 2, "m": 2, "cap": 6}),
        Connsum => json!({"M": "S2xS2", "N": "S2xS2", "cap": 7}),
        Inertideal => json!({"gens_x": "a:1,b:1", "f": "ad(2;a,b)", "gens_y": "c:1,d:1",
                             "g": "ad(2;c,d)", "cap": 7,
                             "assumed_hypotheses": ["ad(2;a,b) is inert in T(a,b)"]}),
        OmegachlgyXcheck => json!({}),
        Jamescompat => json!({"spaces": "S(1),S(2)"}),
        Cpsi => json!({"spaces": "S(1),S(2)", "a": "S(1)"}),
        Prelcofib => json!({"m": 3, "facets": [[1], [2], [3]], "missing": [[1, 2], [1, 3], [2, 3]],
                            "spaces": "S(2),S(2),S(2)"}),
        PolywhDomain => json!({"spaces": "S(1),S(1)", "a": "S(2)"}),
    }
}

/// Every simplicial complex on `[m]`, as a sorted face list.
pub fn all_complexes(m: usize) -> Vec<SimplicialComplex> {
    assert!(m <= 4, "exhaustive enumeration is limited to four vertices");
    let n = 1usize << m;
    let mut out = Vec::new();
    // Families over the nonempty subsets; the empty face is implicit.
    for family in 0u64..(1u64 << (n - 1)) {
        let has = |f: usize| f == 0 || family & (1 << (f - 1)) != 0;
        let closed = (1..n).filter(|&f| has(f)).all(|f| (0..m).all(|v| f & (1 << v) == 0 || has(f & !(1 << v))));
        if closed {
            let faces: Vec<Vec<usize>> = (1..n).filter(|&f| has(f)).map(|f| face_vertices(f as u32)).collect();
            out.push(SimplicialComplex::new(m, &faces).expect("closed family"));
        }
    }
    out
}

/// Every nonempty set of missing faces with at least two vertices.
pub fn missing_face_choices(k: &SimplicialComplex) -> Vec<Vec<Vec<usize>>> {
    let cands: Vec<Vec<usize>> = k.missing_faces().into_iter().filter(|f| f.len() >= 2).collect();
    (1u64..(1u64 << cands.len()))
        .map(|mask| {
            (0..cands.len()).filter(|i| mask & (1 << i) != 0).map(|i| cands[i].clone()).collect()
        })
        .collect()
}

/// Random complexes on five vertices with a random set of missing faces.
pub fn sampled_complexes(count: usize, seed: u64) -> Vec<(SimplicialComplex, Vec<Vec<usize>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let facets: Vec<Vec<usize>> = (0..rng.gen_range(1..=5))
            .map(|_| {
                let mask: u32 = rng.gen_range(1..32);
                face_vertices(mask)
            })
            .collect();
        let k = SimplicialComplex::from_facets(5, &facets).expect("vertices in range");
        let cands: Vec<Vec<usize>> = k.missing_faces().into_iter().filter(|f| f.len() >= 2).collect();
        if cands.is_empty() {
            continue;
        }
        let mut s: Vec<Vec<usize>> = cands.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if s.is_empty() {
            s.push(cands[rng.gen_range(0..cands.len())].clone());
        }
        out.push((k, s));
    }
    out
}

fn prelcofib_grid() -> Vec<Value> {
    let mut out = Vec::new();
    let inst = |k: &SimplicialComplex, s: &[Vec<usize>]| {
        let m = k.m();
        json!({"m": m, "facets": k.facets(), "missing": s,
               "spaces": vec!["S(2)"; m].join(",")})
    };
    for m in 1..=4 {
        for k in all_complexes(m) {
            for s in missing_face_choices(&k) {
                out.push(inst(&k, &s));
            }
        }
    }
    for (k, s) in sampled_complexes(40, 5) {
        out.push(inst(&k, &s));
    }
    out
}

/// The result of checking one instance in a batch.
pub struct Outcome {
    pub id: TheoremId,
    pub instance: Value,
    pub result: Result<Report, TheoremError>,
}

/// Runs the default instances of `ids` at `level`, in registry order, on
/// all available cores.
pub fn verify_all(ids: &[TheoremId], level: Level, cap: Option<usize>, budget: usize) -> Vec<Outcome> {
    let jobs: Vec<(TheoremId, Value)> = ids
        .iter()
        .flat_map(|&id| default_instances(id, level).into_iter().map(move |v| (id, v)))
        .collect();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<Report, TheoremError>>> = Vec::new();
    slots.resize_with(jobs.len(), || None);
    let slots = std::sync::Mutex::new(slots);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some((id, inst)) = jobs.get(i) else { break };
                let r = verify_with_budget(*id, inst, cap, None, budget);
                slots.lock().expect("no poisoned workers")[i] = Some(r);
            });
        }
    });
    let slots = slots.into_inner().expect("no poisoned workers");
    jobs.into_iter()
        .zip(slots)
        .map(|((id, instance), r)| Outcome {
            id,
            instance,
            result: r.expect("every job ran"),
        })
        .collect()
}

fn random_leaf(rng: &mut ChaCha8Rng) -> SpaceExpr {
    match rng.gen_range(0..20) {
        0 => SpaceExpr::Point,
        1..=11 => SpaceExpr::sphere(rng.gen_range(1..=4)),
        _ => SpaceExpr::moore(rng.gen_range(2..=4), [2, 3, 5][rng.gen_range(0..3)], rng.gen_range(1..=2)),
    }
}

fn simply_connected(e: SpaceExpr) -> SpaceExpr {
    match e.connectivity().finite() {
        Some(c) if c < 1 => SpaceExpr::suspend(e, (1 - c) as u32),
        _ => e,
    }
}

/// A random expression of depth at most `depth`; loop children are
/// suspended until simply connected.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> SpaceExpr {
    if depth <= 1 || rng.gen_bool(0.3) {
        return random_leaf(rng);
    }
    let d = depth - 1;
    let kids = |rng: &mut ChaCha8Rng| -> Vec<SpaceExpr> {
        let n = rng.gen_range(2..=3);
        (0..n).map(|_| random_expr(rng, d)).collect()
    };
    match rng.gen_range(0..7) {
        0 => SpaceExpr::Wedge(kids(rng)),
        1 => SpaceExpr::Smash(kids(rng)),
        2 => SpaceExpr::Product(kids(rng)),
        3 => SpaceExpr::half_smash(random_expr(rng, d), random_expr(rng, d)),
        4 => SpaceExpr::suspend(random_expr(rng, d), rng.gen_range(1..=2)),
        5 if d >= 2 => SpaceExpr::loop_of(simply_connected(random_expr(rng, d - 1))),
        5 => random_leaf(rng),
        _ => SpaceExpr::james(random_expr(rng, d), rng.gen_range(1..=3)),
    }
}

pub const SUITE_FIELDS: [FieldTag; 4] =
    [FieldTag::Rational, FieldTag::Prime(2), FieldTag::Prime(3), FieldTag::Prime(5)];
pub const SUITE_CAPS: [usize; 2] = [8, 12];
pub const SUITE_SEED: u64 = 2024;
pub const SUITE_SIZE: usize = 500;

/// Evaluable over every suite field and normalizable at every suite cap.
pub fn suite_evaluable(e: &SpaceExpr) -> bool {
    e.node_count() <= 40
        && SUITE_FIELDS.iter().all(|&f| series_of(e, f, 12, true).is_ok())
        && SUITE_CAPS.iter().all(|&c| crate::rewrite::normalize(e, c).is_ok())
}

/// `count` random evaluable expressions of depth at most 5.
pub fn random_corpus(count: usize, seed: u64) -> Vec<SpaceExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let e = random_expr(&mut rng, 5);
        if suite_evaluable(&e) {
            out.push(e);
        }
    }
    out
}

/// Outcome of the rewrite property suite over a corpus.
#[derive(Clone, Debug, Serialize)]
pub struct RewriteSuiteReport {
    pub expressions: usize,
    pub caps: Vec<usize>,
    pub fields: Vec<FieldTag>,
    pub failures: Vec<String>,
}

impl RewriteSuiteReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary_line(&self) -> String {
        let fields: Vec<String> = self.fields.iter().map(ToString::to_string).collect();
        let mut line = format!(
            "{} REWRITE_SUITE expressions={} caps={:?} fields={}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.expressions,
            self.caps,
            fields.join(",")
        );
        if let Some(f) = self.failures.first() {
            line.push_str(&format!(" first failure: {f}"));
        }
        line
    }
}

/// Soundness, idempotence and monotone truncation of `normalize` on `exprs`.
pub fn rewrite_suite(exprs: &[SpaceExpr]) -> RewriteSuiteReport {
    use crate::rewrite::normalize;
    let mut failures = Vec::new();
    for e in exprs {
        let mut fail = |what: &str| failures.push(format!("{what}: {e}"));
        let mut forms = Vec::new();
        for &cap in &SUITE_CAPS {
            let Ok(nf) = normalize(e, cap) else {
                fail("normalize failed");
                continue;
            };
            let back = nf.to_expr();
            for &f in &SUITE_FIELDS {
                let a = series_of(e, f, cap, true);
                let b = series_of(&back, f, cap, true);
                if a.is_err() || a.ok() != b.ok() {
                    fail(&format!("series differ over {f} at cap {cap}"));
                }
            }
            match normalize(&back, cap) {
                Ok(again) if again.summands == nf.summands => {}
                _ => fail(&format!("not idempotent at cap {cap}")),
            }
            forms.push((cap, nf));
        }
        for (i, (low, small)) in forms.iter().enumerate() {
            for (_, big) in &forms[i + 1..] {
                let restricted: Vec<_> = big
                    .summands
                    .iter()
                    .filter(|s| !s.connectivity().at_least(*low))
                    .cloned()
                    .collect();
                if restricted != small.summands {
                    fail(&format!("truncation at cap {low} is not a restriction"));
                }
            }
        }
    }
    RewriteSuiteReport {
        expressions: exprs.len(),
        caps: SUITE_CAPS.to_vec(),
        fields: SUITE_FIELDS.to_vec(),
        failures,
    }
}

//! Graded free associative algebras, iterated-commutator relators and the
//! Hilbert series of quotients `T(V)/(R)`.
//!
//! Two independent computations are provided:
//!
//! - [`hilbert_quotient_oracle`] counts, degree by degree, the words of that
//!   degree minus the rank of the span of all products `a·r·b`;
//! - [`hilbert_product_formula`] evaluates
//!   `1/(1-t^m) · 1/(1 - Σ_{t<k} t^{tm+n})` for the algebra `T(x,y)/(ad^k(x)(y))`.
//!
//! Words are sequences of generator indices, ordered graded-lexicographically
//! by generator index; that order fixes the matrix columns.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::series::{FieldTag, GradedSeries};

pub const DEFAULT_MATRIX_BUDGET: usize = 200_000;

pub type Word = Vec<u16>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("no generators given")]
    EmptyGenerators,
    #[error("generator '{0}' declared twice")]
    DuplicateGenerator(String),
    #[error("generator '{0}' must have degree at least 1")]
    ZeroDegree(String),
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("relator {0} is not homogeneous")]
    NotHomogeneous(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("degree {degree} has {columns} words, over the matrix budget of {budget}")]
    MatrixBudgetExceeded {
        degree: usize,
        columns: u128,
        budget: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    names: Vec<String>,
    degrees: Vec<u32>,
}

impl GeneratorSet {
    pub fn new<S: Into<String>>(gens: Vec<(S, u32)>) -> Result<GeneratorSet, AlgError> {
        if gens.is_empty() {
            return Err(AlgError::EmptyGenerators);
        }
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (name, d) in gens {
            let name = name.into();
            if names.contains(&name) {
                return Err(AlgError::DuplicateGenerator(name));
            }
            if d == 0 {
                return Err(AlgError::ZeroDegree(name));
            }
            names.push(name);
            degrees.push(d);
        }
        Ok(GeneratorSet { names, degrees })
    }

    /// Parses `x:2,y:3`.
    pub fn parse(text: &str) -> Result<GeneratorSet, AlgError> {
        let mut gens = Vec::new();
        let mut offset = 0;
        for part in text.split(',') {
            let bad = |message: &str| AlgError::Parse {
                offset,
                message: message.to_string(),
            };
            let (name, deg) = part.split_once(':').ok_or_else(|| bad("expected name:degree"))?;
            let name = name.trim();
            if !is_ident(name) {
                return Err(bad("generator names are letters, digits and '_'"));
            }
            let deg: u32 = deg.trim().parse().map_err(|_| bad("degree must be a natural number"))?;
            gens.push((name.to_string(), deg));
            offset += part.len() + 1;
        }
        GeneratorSet::new(gens)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AlgError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| AlgError::UnknownGenerator(name.to_string()))
    }

    pub fn word_degree(&self, w: &[u16]) -> u32 {
        w.iter().map(|&g| self.degrees[g as usize]).sum()
    }

    /// Concatenation of two generator sets (names must stay distinct).
    pub fn concat(&self, other: &GeneratorSet) -> Result<GeneratorSet, AlgError> {
        let gens = self
            .names
            .iter()
            .chain(&other.names)
            .cloned()
            .zip(self.degrees.iter().chain(&other.degrees).copied())
            .collect();
        GeneratorSet::new(gens)
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.names.iter().zip(&self.degrees).map(|(n, d)| format!("{n}:{d}")).collect();
        f.write_str(&parts.join(","))
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A noncommutative polynomial with integer coefficients, read in whatever
/// field the quotient is taken over.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NcPolynomial {
    pub terms: BTreeMap<Word, BigInt>,
}

impl NcPolynomial {
    pub fn zero() -> NcPolynomial {
        NcPolynomial::default()
    }

    pub fn word(w: Word) -> NcPolynomial {
        let mut terms = BTreeMap::new();
        terms.insert(w, BigInt::one());
        NcPolynomial { terms }
    }

    pub fn generator(g: usize) -> NcPolynomial {
        NcPolynomial::word(vec![g as u16])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, w: Word, c: BigInt) {
        let entry = self.terms.entry(w.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &NcPolynomial) -> NcPolynomial {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NcPolynomial) -> NcPolynomial {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> NcPolynomial {
        if c.is_zero() {
            return NcPolynomial::zero();
        }
        NcPolynomial {
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &NcPolynomial) -> NcPolynomial {
        let mut out = NcPolynomial::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, x * y);
            }
        }
        out
    }

    /// The ungraded commutator `ab - ba`.
    pub fn commutator(&self, other: &NcPolynomial) -> NcPolynomial {
        self.mul(other).sub(&other.mul(self))
    }

    /// The common degree of all terms, or `None` when not homogeneous or zero.
    pub fn degree(&self, gens: &GeneratorSet) -> Option<u32> {
        let mut degs = self.terms.keys().map(|w| gens.word_degree(w));
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn render(&self, gens: &GeneratorSet) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let word: Vec<&str> = w.iter().map(|&g| gens.name(g as usize)).collect();
            let word = if word.is_empty() { "1".to_string() } else { word.join("*") };
            let mag = c.abs();
            let body = if mag.is_one() { word } else { format!("{mag}*{word}") };
            match (i, c.is_negative()) {
                (0, false) => out.push_str(&body),
                (0, true) => out.push_str(&format!("-{body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
                (_, true) => out.push_str(&format!(" - {body}")),
            }
        }
        out
    }
}

/// `ad^k(x)(y)`: `ad^0 = y`, `ad^k = x·ad^{k-1} - ad^{k-1}·x`.
pub fn ad_relator(k: u32, x: usize, y: usize) -> NcPolynomial {
    ad_poly(k, &NcPolynomial::generator(x), &NcPolynomial::generator(y))
}

pub fn ad_poly(k: u32, x: &NcPolynomial, y: &NcPolynomial) -> NcPolynomial {
    let mut acc = y.clone();
    for _ in 0..k {
        acc = x.commutator(&acc);
    }
    acc
}

/// Parses a comma-separated relator list in the mini-language
/// `ad(k;a,b)`, `com(a,b)`, `sum(a,...)`, `scale(c,a)`, `x*y*x`.
pub fn parse_relators(text: &str, gens: &GeneratorSet) -> Result<Vec<NcPolynomial>, AlgError> {
    let mut p = RelParser { src: text.as_bytes(), pos: 0, gens };
    let mut out = vec![p.rel()?];
    loop {
        p.skip_ws();
        if p.pos == p.src.len() {
            break;
        }
        p.expect(b',')?;
        out.push(p.rel()?);
    }
    for r in &out {
        if !r.is_zero() && r.degree(gens).is_none() {
            return Err(AlgError::NotHomogeneous(r.render(gens)));
        }
    }
    Ok(out)
}

struct RelParser<'a> {
    src: &'a [u8],
    pos: usize,
    gens: &'a GeneratorSet,
}

impl<'a> RelParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, message: &str) -> AlgError {
        AlgError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), AlgError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, AlgError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn int(&mut self) -> Result<BigInt, AlgError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| AlgError::Parse {
                offset: start,
                message: "expected an integer".into(),
            })
    }

    fn rel(&mut self) -> Result<NcPolynomial, AlgError> {
        let start = self.pos;
        let name = self.ident()?;
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let out = match name.as_str() {
                "ad" => {
                    let k = self.int()?.to_u32().ok_or_else(|| self.err("bad ad exponent"))?;
                    self.expect(b';')?;
                    let x = self.rel()?;
                    self.expect(b',')?;
                    let y = self.rel()?;
                    ad_poly(k, &x, &y)
                }
                "com" => {
                    let a = self.rel()?;
                    self.expect(b',')?;
                    let b = self.rel()?;
                    a.commutator(&b)
                }
                "sum" => {
                    let mut acc = self.rel()?;
                    while self.peek() == Some(b',') {
                        self.pos += 1;
                        acc = acc.add(&self.rel()?);
                    }
                    acc
                }
                "scale" => {
                    let c = self.int()?;
                    self.expect(b',')?;
                    self.rel()?.scale(&c)
                }
                _ => {
                    return Err(AlgError::Parse {
                        offset: start,
                        message: format!("unknown function '{name}'"),
                    })
                }
            };
            self.expect(b')')?;
            return Ok(out);
        }
        let mut word = vec![self.gens.index_of(&name)? as u16];
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let g = self.ident()?;
            word.push(self.gens.index_of(&g)? as u16);
        }
        Ok(NcPolynomial::word(word))
    }
}

/// Dimensions of the free algebra `T(V)` in degrees `0..=cap`.
pub fn free_dimensions(gens: &GeneratorSet, cap: usize) -> Vec<u128> {
    let mut dims = vec![0u128; cap + 1];
    dims[0] = 1;
    for d in 1..=cap {
        let mut acc = 0u128;
        for g in 0..gens.len() {
            let e = gens.degree(g) as usize;
            if e <= d {
                acc = acc.saturating_add(dims[d - e]);
            }
        }
        dims[d] = acc;
    }
    dims
}

fn words_by_degree(gens: &GeneratorSet, cap: usize) -> Vec<Vec<Word>> {
    let mut words: Vec<Vec<Word>> = vec![Vec::new(); cap + 1];
    words[0].push(Vec::new());
    for d in 1..=cap {
        let mut here = Vec::new();
        for g in 0..gens.len() {
            let e = gens.degree(g) as usize;
            if e > d {
                continue;
            }
            for suffix in &words[d - e] {
                let mut w = Vec::with_capacity(suffix.len() + 1);
                w.push(g as u16);
                w.extend_from_slice(suffix);
                here.push(w);
            }
        }
        words[d] = here;
    }
    words
}

/// Hilbert series of `T(V)/(R)` by degreewise linear algebra.
pub fn hilbert_quotient_oracle(
    gens: &GeneratorSet,
    relators: &[NcPolynomial],
    field: FieldTag,
    cap: usize,
) -> Result<GradedSeries, AlgError> {
    hilbert_quotient_oracle_with_budget(gens, relators, field, cap, DEFAULT_MATRIX_BUDGET)
}

pub fn hilbert_quotient_oracle_with_budget(
    gens: &GeneratorSet,
    relators: &[NcPolynomial],
    field: FieldTag,
    cap: usize,
    budget: usize,
) -> Result<GradedSeries, AlgError> {
    if gens.is_empty() {
        return Err(AlgError::EmptyGenerators);
    }
    let free = free_dimensions(gens, cap);
    if let Some(d) = free.iter().position(|&c| c > budget as u128) {
        return Err(AlgError::MatrixBudgetExceeded {
            degree: d,
            columns: free[d],
            budget,
        });
    }
    let mut rels: Vec<(usize, Vec<(Word, BigInt)>)> = Vec::new();
    for r in relators {
        let reduced = reduce_for_field(r, field);
        if reduced.is_empty() {
            continue;
        }
        let deg = r.degree(gens).ok_or_else(|| AlgError::NotHomogeneous(r.render(gens)))?;
        rels.push((deg as usize, reduced));
    }
    let words = words_by_degree(gens, cap);
    let mut dims = Vec::with_capacity(cap + 1);
    for d in 0..=cap {
        let index: HashMap<&[u16], u32> =
            words[d].iter().enumerate().map(|(i, w)| (w.as_slice(), i as u32)).collect();
        let mut rows: Vec<Vec<(u32, BigInt)>> = Vec::new();
        for (e, terms) in &rels {
            if *e > d {
                continue;
            }
            for i in 0..=(d - e) {
                for a in &words[i] {
                    for b in &words[d - e - i] {
                        let mut row: Vec<(u32, BigInt)> = terms
                            .iter()
                            .map(|(w, c)| {
                                let mut full = Vec::with_capacity(a.len() + w.len() + b.len());
                                full.extend_from_slice(a);
                                full.extend_from_slice(w);
                                full.extend_from_slice(b);
                                (index[full.as_slice()], c.clone())
                            })
                            .collect();
                        row.sort_by_key(|(c, _)| *c);
                        rows.push(row);
                    }
                }
            }
        }
        let rank = match field {
            FieldTag::Prime(p) => rank_mod_p(rows, p as u64),
            FieldTag::Rational => rank_rational(rows),
        };
        dims.push(BigInt::from(words[d].len() - rank));
    }
    let mut s = GradedSeries::from_coeffs(field, dims);
    s.reduced = false;
    Ok(s)
}

fn reduce_for_field(r: &NcPolynomial, field: FieldTag) -> Vec<(Word, BigInt)> {
    r.terms
        .iter()
        .filter_map(|(w, c)| {
            let c = match field {
                FieldTag::Rational => c.clone(),
                FieldTag::Prime(p) => c.mod_floor(&BigInt::from(p)),
            };
            (!c.is_zero()).then(|| (w.clone(), c))
        })
        .collect()
}

fn rank_mod_p(rows: Vec<Vec<(u32, BigInt)>>, p: u64) -> usize {
    let inv = |a: u64| -> u64 {
        // a^(p-2) mod p
        let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc
    };
    let mut pivots: HashMap<u32, Vec<(u32, u64)>> = HashMap::new();
    for row in rows {
        let mut row: Vec<(u32, u64)> = row
            .into_iter()
            .map(|(c, v)| (c, v.mod_floor(&BigInt::from(p)).to_u64().unwrap()))
            .filter(|(_, v)| *v != 0)
            .collect();
        while let Some(&(lead, v)) = row.first() {
            match pivots.get(&lead) {
                Some(piv) => row = axpy_mod(&row, p - v, piv, p),
                None => {
                    let s = inv(v);
                    for e in row.iter_mut() {
                        e.1 = e.1 * s % p;
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `x + a·y` over `Z/p`, both sparse and sorted by column.
fn axpy_mod(x: &[(u32, u64)], a: u64, y: &[(u32, u64)], p: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            out.push((y[j].0, a * y[j].1 % p));
            j += 1;
        } else {
            let v = (x[i].1 + a * y[j].1) % p;
            if v != 0 {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn rank_rational(rows: Vec<Vec<(u32, BigInt)>>) -> usize {
    let mut pivots: HashMap<u32, Vec<(u32, BigInt)>> = HashMap::new();
    for mut row in rows {
        row.retain(|(_, v)| !v.is_zero());
        make_primitive(&mut row);
        while let Some((lead, v)) = row.first().cloned() {
            match pivots.get(&lead) {
                Some(piv) => {
                    // piv_lead·row - v·piv, then strip the content.
                    let pl = &piv[0].1;
                    let g = v.gcd(pl);
                    let (a, b) = (pl / &g, &v / &g);
                    row = combine(&row, &a, piv, &b);
                    make_primitive(&mut row);
                }
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `a·x - b·y`, sparse and sorted by column.
fn combine(x: &[(u32, BigInt)], a: &BigInt, y: &[(u32, BigInt)], b: &BigInt) -> Vec<(u32, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, a * &x[i].1));
            i += 1;
        } else if take_y {
            out.push((y[j].0, -(b * &y[j].1)));
            j += 1;
        } else {
            let v = a * &x[i].1 - b * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn make_primitive(row: &mut [(u32, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if row.first().is_some_and(|(_, v)| v.is_negative()) {
        g = -g;
    }
    if !g.is_zero() && !g.is_one() {
        for e in row.iter_mut() {
            e.1 = &e.1 / &g;
        }
    }
}

/// `1/(1-t^m) · 1/(1 - Σ_{t=0}^{k-1} t^{tm+n})`, the loop homology series of
/// the cofibre of `ad^k` on `S^{m+1} ∨ S^{n+1}`.
pub fn hilbert_product_formula(
    m: u32,
    n: u32,
    k: u32,
    field: FieldTag,
    cap: usize,
) -> GradedSeries {
    assert!(m >= 1 && n >= 1 && k >= 1, "m, n, k must be positive");
    let one = GradedSeries::one(field, cap);
    let first = one
        .sub(&GradedSeries::monomial(field, cap, m as usize, 1))
        .and_then(|s| s.invert())
        .expect("constant term 1");
    let mut w = GradedSeries::zero(field, cap);
    for t in 0..k {
        let d = (t * m + n) as usize;
        w = w.add(&GradedSeries::monomial(field, cap, d, 1)).expect("same field");
    }
    let second = one.sub(&w).and_then(|s| s.invert()).expect("constant term 1");
    let mut out = first.mul(&second).expect("same field");
    out.reduced = false;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldTag = FieldTag::Rational;

    fn coeffs(s: &GradedSeries) -> Vec<i64> {
        s.coeffs.iter().map(|c| c.to_i64().unwrap()).collect()
    }

    fn xy(m: u32, n: u32) -> GeneratorSet {
        GeneratorSet::new(vec![("x", m), ("y", n)]).unwrap()
    }

    #[test]
    fn ad_expansions() {
        let g = xy(1, 1);
        assert_eq!(ad_relator(0, 0, 1).render(&g), "y");
        assert_eq!(ad_relator(1, 0, 1).render(&g), "x*y - y*x");
        assert_eq!(ad_relator(2, 0, 1).render(&g), "x*x*y - 2*x*y*x + y*x*x");
        assert_eq!(ad_relator(3, 0, 1).degree(&xy(2, 3)), Some(9));
    }

    #[test]
    fn polynomial_algebra() {
        let g = xy(1, 1);
        let s = hilbert_quotient_oracle(&g, &[ad_relator(1, 0, 1)], Q, 6).unwrap();
        assert_eq!(coeffs(&s), vec![1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn second_commutator_even_degrees() {
        let g = xy(2, 2);
        let s = hilbert_quotient_oracle(&g, &[ad_relator(2, 0, 1)], Q, 10).unwrap();
        let even: Vec<i64> = coeffs(&s).into_iter().step_by(2).collect();
        assert_eq!(even, vec![1, 2, 4, 7, 12, 20]);
        assert_eq!(s, hilbert_product_formula(2, 2, 2, Q, 10));
    }

    #[test]
    fn killing_a_generator() {
        let g = xy(2, 3);
        let s = hilbert_quotient_oracle(&g, &[NcPolynomial::generator(1)], Q, 8).unwrap();
        assert_eq!(coeffs(&s), vec![1, 0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn connected_sum_relator() {
        let g = GeneratorSet::parse("a:1,b:1,c:1,d:1").unwrap();
        let r = parse_relators("sum(com(a,b),com(c,d))", &g).unwrap();
        for f in [Q, FieldTag::Prime(2), FieldTag::Prime(3)] {
            let s = hilbert_quotient_oracle(&g, &r, f, 7).unwrap();
            assert_eq!(coeffs(&s), vec![1, 4, 15, 56, 209, 780, 2911, 10864]);
        }
    }

    #[test]
    fn formula_examples() {
        let s = hilbert_product_formula(2, 2, 1, Q, 8);
        assert_eq!(coeffs(&s), vec![1, 0, 2, 0, 3, 0, 4, 0, 5]);
        // 1/(1-t²) · 1/(1-t³-t⁵)
        let s = hilbert_product_formula(2, 3, 2, Q, 10);
        let one = GradedSeries::one(Q, 10);
        let a = one.sub(&GradedSeries::monomial(Q, 10, 2, 1)).unwrap().invert().unwrap();
        let b = one
            .sub(&GradedSeries::monomial(Q, 10, 3, 1))
            .unwrap()
            .sub(&GradedSeries::monomial(Q, 10, 5, 1))
            .unwrap()
            .invert()
            .unwrap();
        assert_eq!(s.coeffs, a.mul(&b).unwrap().coeffs);
    }

    #[test]
    fn relator_language() {
        let g = GeneratorSet::parse("x:2, y:3").unwrap();
        let r = parse_relators("ad(2;x,y), scale(3, x*y*x), com(x,x*x)", &g).unwrap();
        assert_eq!(r[0], ad_relator(2, 0, 1));
        assert_eq!(r[1].render(&g), "3*x*y*x");
        assert!(r[2].is_zero());
        assert!(matches!(parse_relators("sum(x,y)", &g), Err(AlgError::NotHomogeneous(_))));
        assert!(matches!(parse_relators("z", &g), Err(AlgError::UnknownGenerator(_))));
        assert!(matches!(parse_relators("foo(x)", &g), Err(AlgError::Parse { .. })));
    }

    #[test]
    fn generator_errors() {
        assert!(matches!(GeneratorSet::parse("x:1,x:2"), Err(AlgError::DuplicateGenerator(_))));
        assert!(matches!(GeneratorSet::parse("x:0"), Err(AlgError::ZeroDegree(_))));
        assert!(matches!(GeneratorSet::parse("x"), Err(AlgError::Parse { .. })));
        assert!(matches!(
            GeneratorSet::new(Vec::<(String, u32)>::new()),
            Err(AlgError::EmptyGenerators)
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let g = xy(1, 1);
        let err = hilbert_quotient_oracle_with_budget(&g, &[], Q, 12, 1000).unwrap_err();
        assert_eq!(
            err,
            AlgError::MatrixBudgetExceeded {
                degree: 10,
                columns: 1024,
                budget: 1000
            }
        );
    }

    #[test]
    fn free_algebra_without_relators() {
        let g = xy(1, 2);
        let s = hilbert_quotient_oracle(&g, &[], Q, 6).unwrap();
        // 1/(1-t-t²)
        assert_eq!(coeffs(&s), vec![1, 1, 2, 3, 5, 8, 13]);
    }

    #[test]
    fn field_matters_for_non_unit_coefficients() {
        // 2y kills y over Q but not over F2.
        let g = xy(1, 1);
        let r = vec![NcPolynomial::generator(1).scale(&BigInt::from(2))];
        let q = hilbert_quotient_oracle(&g, &r, Q, 4).unwrap();
        let f2 = hilbert_quotient_oracle(&g, &r, FieldTag::Prime(2), 4).unwrap();
        assert_eq!(coeffs(&q), vec![1, 1, 1, 1, 1]);
        assert_eq!(coeffs(&f2), vec![1, 2, 4, 8, 16]);
    }
}

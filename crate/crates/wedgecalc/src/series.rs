//! Truncated graded dimension series and the homology evaluator for space
//! expressions.
//!
//! Coefficients are exact big integers. A series carries its truncation
//! degree `cap` (coefficients `0..=cap` are meaningful), the coefficient
//! field it was computed over, and whether it is reduced.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::expr::{is_prime, SpaceExpr};
use crate::rewrite;

pub const DEFAULT_MAX_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldTag {
    Rational,
    Prime(u32),
}

impl FieldTag {
    pub fn characteristic(self) -> u32 {
        match self {
            FieldTag::Rational => 0,
            FieldTag::Prime(p) => p,
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rational => f.write_str("Q"),
            FieldTag::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for FieldTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(FieldTag::Rational);
        }
        let digits = t
            .strip_prefix('F')
            .or_else(|| t.strip_prefix('f'))
            .ok_or_else(|| format!("unknown field '{s}' (expected Q or F<p>)"))?;
        let p: u32 = digits
            .parse()
            .map_err(|_| format!("unknown field '{s}' (expected Q or F<p>)"))?;
        if !is_prime(p) {
            return Err(format!("{p} is not prime"));
        }
        Ok(FieldTag::Prime(p))
    }
}

impl Serialize for FieldTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("constant term must be 1 to invert")]
    NotInvertible,
    #[error("shift by {shift} would move a nonzero coefficient below degree 0")]
    NegativeShift { shift: i64 },
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldTag, FieldTag),
    #[error("loop of a space that is not simply connected: {0}")]
    NotSimplyConnected(String),
    #[error("loop homology not available for {0}: child is neither a product nor a suspension")]
    UnsupportedLoop(String),
    #[error("cap {cap} exceeds the maximum {max}")]
    CapOverflow { cap: usize, max: usize },
    #[error("invalid expression: {0}")]
    InvalidExpr(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    pub coeffs: Vec<BigInt>,
    pub cap: usize,
    pub field: FieldTag,
    pub reduced: bool,
}

impl GradedSeries {
    pub fn zero(field: FieldTag, cap: usize) -> GradedSeries {
        GradedSeries {
            coeffs: vec![BigInt::zero(); cap + 1],
            cap,
            field,
            reduced: true,
        }
    }

    pub fn one(field: FieldTag, cap: usize) -> GradedSeries {
        GradedSeries::monomial(field, cap, 0, 1)
    }

    /// `c·t^d`, truncated.
    pub fn monomial(field: FieldTag, cap: usize, d: usize, c: i64) -> GradedSeries {
        let mut s = GradedSeries::zero(field, cap);
        if d <= cap {
            s.coeffs[d] = BigInt::from(c);
        }
        s.reduced = s.coeffs[0].is_zero();
        s
    }

    pub fn from_coeffs<I, T>(field: FieldTag, coeffs: I) -> GradedSeries
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let coeffs: Vec<BigInt> = coeffs.into_iter().map(Into::into).collect();
        assert!(!coeffs.is_empty(), "a series needs at least the degree-0 coefficient");
        let reduced = coeffs[0].is_zero();
        GradedSeries {
            cap: coeffs.len() - 1,
            coeffs,
            field,
            reduced,
        }
    }

    pub fn coeff(&self, d: usize) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn truncate(&self, cap: usize) -> GradedSeries {
        let cap = cap.min(self.cap);
        GradedSeries {
            coeffs: self.coeffs[..=cap].to_vec(),
            cap,
            field: self.field,
            reduced: self.reduced,
        }
    }

    fn with_coeffs(&self, coeffs: Vec<BigInt>) -> GradedSeries {
        let reduced = coeffs[0].is_zero();
        GradedSeries {
            cap: coeffs.len() - 1,
            coeffs,
            field: self.field,
            reduced,
        }
    }

    fn check_field(&self, other: &GradedSeries) -> Result<(), SeriesError> {
        if self.field != other.field {
            return Err(SeriesError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedSeries) -> Result<GradedSeries, SeriesError> {
        self.check_field(other)?;
        let cap = self.cap.min(other.cap);
        Ok(self.with_coeffs((0..=cap).map(|d| &self.coeffs[d] + &other.coeffs[d]).collect()))
    }

    pub fn sub(&self, other: &GradedSeries) -> Result<GradedSeries, SeriesError> {
        self.check_field(other)?;
        let cap = self.cap.min(other.cap);
        Ok(self.with_coeffs((0..=cap).map(|d| &self.coeffs[d] - &other.coeffs[d]).collect()))
    }

    pub fn mul(&self, other: &GradedSeries) -> Result<GradedSeries, SeriesError> {
        self.check_field(other)?;
        let cap = self.cap.min(other.cap);
        let mut out = vec![BigInt::zero(); cap + 1];
        for (i, a) in self.coeffs[..=cap].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=cap - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(self.with_coeffs(out))
    }

    pub fn scale(&self, c: i64) -> GradedSeries {
        let c = BigInt::from(c);
        self.with_coeffs(self.coeffs.iter().map(|x| x * &c).collect())
    }

    pub fn pow(&self, k: u32) -> GradedSeries {
        let mut acc = GradedSeries::one(self.field, self.cap);
        for _ in 0..k {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Multiplicative inverse; the constant term must be 1.
    pub fn invert(&self) -> Result<GradedSeries, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::NotInvertible);
        }
        let cap = self.cap;
        let mut inv = vec![BigInt::zero(); cap + 1];
        inv[0] = BigInt::one();
        for d in 1..=cap {
            let mut acc = BigInt::zero();
            for i in 1..=d {
                if !self.coeffs[i].is_zero() && !inv[d - i].is_zero() {
                    acc += &self.coeffs[i] * &inv[d - i];
                }
            }
            inv[d] = -acc;
        }
        Ok(self.with_coeffs(inv))
    }

    /// Multiplies by `t^d`. A negative shift drops the bottom `|d|` degrees,
    /// which must be zero, and lowers the cap accordingly.
    pub fn shift(&self, d: i64) -> Result<GradedSeries, SeriesError> {
        if d >= 0 {
            let d = d as usize;
            let mut out = vec![BigInt::zero(); self.cap + 1];
            for i in 0..=self.cap {
                if i + d <= self.cap {
                    out[i + d] = self.coeffs[i].clone();
                }
            }
            Ok(self.with_coeffs(out))
        } else {
            let k = (-d) as usize;
            if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
                return Err(SeriesError::NegativeShift { shift: d });
            }
            if k > self.cap {
                return Ok(self.with_coeffs(vec![BigInt::zero()]));
            }
            Ok(self.with_coeffs(self.coeffs[k..].to_vec()))
        }
    }

    /// Sparse polynomial text such as `1 + 2t^4 + t^6`.
    pub fn to_poly_string(&self) -> String {
        let mut parts = Vec::new();
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let coef = if d > 0 && mag.is_one() { String::new() } else { mag.to_string() };
            let term = match d {
                0 => coef,
                1 => format!("{coef}t"),
                _ => format!("{coef}t^{d}"),
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() { format!("-{term}") } else { term });
            } else {
                parts.push(if c.is_negative() { format!("- {term}") } else { format!("+ {term}") });
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ")
        }
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_poly_string())
    }
}

fn bigint_to_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::Number(
            c.to_string().parse().expect("integer literal is valid JSON"),
        ),
    }
}

impl Serialize for GradedSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coeffs: Vec<serde_json::Value> = self.coeffs.iter().map(bigint_to_json).collect();
        let mut st = s.serialize_struct("GradedSeries", 4)?;
        st.serialize_field("field", &self.field)?;
        st.serialize_field("cap", &self.cap)?;
        st.serialize_field("reduced", &self.reduced)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for GradedSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            field: FieldTag,
            cap: usize,
            reduced: bool,
            coeffs: Vec<serde_json::Value>,
        }
        let raw = Raw::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|v| v.to_string().parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs.len() != raw.cap + 1 {
            return Err(serde::de::Error::custom("coefficient count must be cap + 1"));
        }
        Ok(GradedSeries {
            coeffs,
            cap: raw.cap,
            field: raw.field,
            reduced: raw.reduced,
        })
    }
}

/// Homology dimension series of `e` over `field`, truncated at `cap`.
pub fn series_of(
    e: &SpaceExpr,
    field: FieldTag,
    cap: usize,
    reduced: bool,
) -> Result<GradedSeries, SeriesError> {
    series_of_with_max(e, field, cap, reduced, DEFAULT_MAX_CAP)
}

pub fn series_of_with_max(
    e: &SpaceExpr,
    field: FieldTag,
    cap: usize,
    reduced: bool,
    max_cap: usize,
) -> Result<GradedSeries, SeriesError> {
    if cap > max_cap {
        return Err(SeriesError::CapOverflow { cap, max: max_cap });
    }
    e.validate().map_err(SeriesError::InvalidExpr)?;
    let red = reduced_series(e, field, cap)?;
    if reduced {
        Ok(GradedSeries { reduced: true, ..red })
    } else {
        let mut s = red.add(&GradedSeries::one(field, cap))?;
        s.reduced = false;
        Ok(s)
    }
}

/// Reduced series of `e`, recursively. Loop children are evaluated one
/// degree higher to absorb the shift in `1/(1 - W/t)`.
pub fn reduced_series(
    e: &SpaceExpr,
    field: FieldTag,
    cap: usize,
) -> Result<GradedSeries, SeriesError> {
    let one = || GradedSeries::one(field, cap);
    Ok(match e {
        SpaceExpr::Point => GradedSeries::zero(field, cap),
        SpaceExpr::Sphere(n) => GradedSeries::monomial(field, cap, *n as usize, 1),
        SpaceExpr::Moore { n, p, .. } => {
            if field == FieldTag::Prime(*p) {
                let n = *n as usize;
                GradedSeries::monomial(field, cap, n - 1, 1)
                    .add(&GradedSeries::monomial(field, cap, n, 1))?
            } else {
                GradedSeries::zero(field, cap)
            }
        }
        SpaceExpr::Wedge(cs) => {
            let mut acc = GradedSeries::zero(field, cap);
            for c in cs {
                acc = acc.add(&reduced_series(c, field, cap)?)?;
            }
            acc
        }
        SpaceExpr::Smash(cs) => {
            let mut acc = one();
            for c in cs {
                acc = acc.mul(&reduced_series(c, field, cap)?)?;
            }
            acc
        }
        SpaceExpr::Product(cs) => {
            let mut acc = one();
            for c in cs {
                acc = acc.mul(&reduced_series(c, field, cap)?.add(&one())?)?;
            }
            acc.sub(&one())?
        }
        SpaceExpr::HalfSmash(a, b) => {
            let ra = reduced_series(a, field, cap)?;
            let rb = reduced_series(b, field, cap)?;
            ra.add(&one())?.mul(&rb)?
        }
        SpaceExpr::Suspend(c, t) => reduced_series(c, field, cap)?.shift(*t as i64)?,
        SpaceExpr::James(c, k) => {
            let x = reduced_series(c, field, cap)?;
            let mut acc = GradedSeries::zero(field, cap);
            let mut power = one();
            for _ in 0..*k {
                power = power.mul(&x)?;
                if power.is_zero() {
                    break;
                }
                acc = acc.add(&power)?;
            }
            acc
        }
        SpaceExpr::Loop(c) => loop_series(c, field, cap)?.sub(&one())?,
    }
    .truncate(cap))
}

/// Unreduced series of `Ω child`.
pub fn loop_series(
    child: &SpaceExpr,
    field: FieldTag,
    cap: usize,
) -> Result<GradedSeries, SeriesError> {
    let conn = child.connectivity();
    match conn.finite() {
        None => return Ok(GradedSeries::one(field, cap)),
        Some(c) if c < 1 => return Err(SeriesError::NotSimplyConnected(child.render())),
        _ => {}
    }
    if let SpaceExpr::Product(fs) = child {
        let mut acc = GradedSeries::one(field, cap);
        for f in fs {
            acc = acc.mul(&loop_series(f, field, cap)?)?;
        }
        return Ok(acc);
    }
    if !child.is_suspension_like() {
        let normal = rewrite::normalize_exact(child)
            .map_err(|_| SeriesError::UnsupportedLoop(child.render()))?;
        if matches!(normal, SpaceExpr::Product(_)) {
            return loop_series(&normal, field, cap);
        }
        let ok = match &normal {
            SpaceExpr::Point => true,
            SpaceExpr::Wedge(cs) => cs.iter().all(|c| c.is_suspension_like()),
            other => other.is_suspension_like(),
        };
        if !ok {
            return Err(SeriesError::UnsupportedLoop(child.render()));
        }
    }
    let w = reduced_series(child, field, cap + 1)?;
    let desuspended = w.shift(-1)?;
    GradedSeries::one(field, cap).sub(&desuspended)?.invert()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    const Q: FieldTag = FieldTag::Rational;

    fn s(e: &str, f: FieldTag, cap: usize, reduced: bool) -> Vec<i64> {
        series_of(&parse(e).unwrap(), f, cap, reduced)
            .unwrap()
            .coeffs
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn loop_sphere() {
        assert_eq!(s("loop(S(3))", Q, 8, false), vec![1, 0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn moore_depends_on_field() {
        assert_eq!(s("P(3,3,1)", FieldTag::Prime(3), 5, true), vec![0, 0, 1, 1, 0, 0]);
        assert_eq!(s("P(3,3,1)", Q, 5, true), vec![0; 6]);
        assert_eq!(s("P(3,3,1)", FieldTag::Prime(2), 5, true), vec![0; 6]);
    }

    #[test]
    fn loop_of_wedge_is_tensor_algebra() {
        assert_eq!(s("loop(wedge(S(3),S(3)))", Q, 8, false), vec![1, 0, 2, 0, 4, 0, 8, 0, 16]);
    }

    #[test]
    fn half_smash_with_loop() {
        let v = s("hsm(loop(S(3)),S(4))", FieldTag::Prime(2), 11, true);
        assert_eq!(v, vec![0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn product_and_james() {
        assert_eq!(s("prod(S(2),S(3))", Q, 6, true), vec![0, 0, 1, 1, 0, 1, 0]);
        assert_eq!(s("james(S(2),2)", Q, 6, true), vec![0, 0, 1, 0, 1, 0, 0]);
        assert_eq!(s("james(S(2),0)", Q, 6, true), vec![0; 7]);
    }

    #[test]
    fn loop_errors() {
        let e = parse("loop(S(1))").unwrap();
        assert!(matches!(series_of(&e, Q, 5, false), Err(SeriesError::NotSimplyConnected(_))));
        let e = parse("loop(loop(S(4)))").unwrap();
        assert!(matches!(series_of(&e, Q, 5, false), Err(SeriesError::UnsupportedLoop(_))));
        let e = parse("S(2)").unwrap();
        assert!(matches!(series_of(&e, Q, 65, false), Err(SeriesError::CapOverflow { .. })));
    }

    #[test]
    fn loop_of_product_and_point() {
        assert_eq!(s("loop(prod(S(3),S(3)))", Q, 6, false), vec![1, 0, 2, 0, 3, 0, 4]);
        assert_eq!(s("loop(pt)", Q, 3, false), vec![1, 0, 0, 0]);
    }

    #[test]
    fn loop_after_normalizing_child() {
        // hsm(A, ΣB) is a suspension only after rewriting.
        let v = s("loop(hsm(loop(S(3)),S(3)))", Q, 6, false);
        // ΩS³⋉S³ has reduced series t³/(1-t²); its loop is 1/(1 - t²/(1-t²)).
        assert_eq!(v, vec![1, 0, 1, 0, 2, 0, 4]);
    }

    #[test]
    fn arithmetic_examples() {
        let a = GradedSeries::from_coeffs(Q, [1, -1, 0, 0, 0]);
        assert_eq!(a.invert().unwrap(), GradedSeries::from_coeffs(Q, [1, 1, 1, 1, 1]));
        let t2 = GradedSeries::monomial(Q, 6, 2, 1);
        let t3 = GradedSeries::monomial(Q, 6, 3, 1);
        assert_eq!(t2.mul(&t3).unwrap(), GradedSeries::monomial(Q, 6, 5, 1));
        let p = GradedSeries::from_coeffs(Q, [0, 0, 0, 1, 0, 1]);
        assert_eq!(p.shift(-1).unwrap(), GradedSeries::from_coeffs(Q, [0, 0, 1, 0, 1]));
        assert!(matches!(p.shift(-4), Err(SeriesError::NegativeShift { .. })));
        assert!(matches!(p.invert(), Err(SeriesError::NotInvertible)));
        let f2 = GradedSeries::one(FieldTag::Prime(2), 3);
        assert!(matches!(f2.add(&a), Err(SeriesError::FieldMismatch(..))));
    }

    #[test]
    fn caps_combine_to_min() {
        let a = GradedSeries::one(Q, 3);
        let b = GradedSeries::one(Q, 7);
        assert_eq!(a.mul(&b).unwrap().cap, 3);
        assert_eq!(b.add(&a).unwrap().cap, 3);
    }

    #[test]
    fn poly_text() {
        let v = series_of(&parse("loop(S(3))").unwrap(), Q, 6, false).unwrap();
        assert_eq!(v.to_poly_string(), "1 + t^2 + t^4 + t^6");
        let w = GradedSeries::from_coeffs(Q, [0, 1, -2, 0, 3]);
        assert_eq!(w.to_poly_string(), "t - 2t^2 + 3t^4");
        assert_eq!(GradedSeries::zero(Q, 3).to_poly_string(), "0");
    }

    #[test]
    fn json_shape() {
        let v = series_of(&parse("S(2)").unwrap(), FieldTag::Prime(2), 3, true).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, r#"{"field":"F2","cap":3,"reduced":true,"coeffs":[0,0,1,0]}"#);
        let back: GradedSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn big_coefficients_serialize_exactly() {
        let v = series_of(&parse("loop(wedge(S(2),S(2),S(2),S(2)))").unwrap(), Q, 40, false)
            .unwrap();
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("1208925819614629174706176"));
        let back: GradedSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn field_tags() {
        assert_eq!("q".parse::<FieldTag>().unwrap(), Q);
        assert_eq!("f3".parse::<FieldTag>().unwrap(), FieldTag::Prime(3));
        assert_eq!("F5".parse::<FieldTag>().unwrap(), FieldTag::Prime(5));
        assert!("F4".parse::<FieldTag>().is_err());
        assert!("R".parse::<FieldTag>().is_err());
    }
}

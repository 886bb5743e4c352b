//! Space expressions: the AST, its parser and printer, and structural queries.
//!
//! The concrete syntax is
//!
//! ```text
//! expr := pt | S(n) | P(n,p,r)
//!       | wedge(e, ...) | smash(e, ...) | prod(e, ...)
//!       | hsm(e, e) | sus(e[, t]) | loop(e) | james(e, k)
//! ```
//!
//! `render` produces the canonical form of this syntax and `parse` inverts it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceExpr {
    Point,
    Sphere(u32),
    /// `P^n(p^r)`: the cofibre of the degree `p^r` map on `S^{n-1}`.
    Moore { n: u32, p: u32, r: u32 },
    Wedge(Vec<SpaceExpr>),
    Smash(Vec<SpaceExpr>),
    Product(Vec<SpaceExpr>),
    /// `left ⋉ right`.
    HalfSmash(Box<SpaceExpr>, Box<SpaceExpr>),
    Suspend(Box<SpaceExpr>, u32),
    Loop(Box<SpaceExpr>),
    /// The `k`-th James stage `J_k(child)`.
    James(Box<SpaceExpr>, u32),
}

/// Connectivity of a space; `Infinite` for contractible expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connectivity {
    Finite(i64),
    Infinite,
}

impl Connectivity {
    pub fn finite(self) -> Option<i64> {
        match self {
            Connectivity::Finite(c) => Some(c),
            Connectivity::Infinite => None,
        }
    }

    fn shift(self, by: i64) -> Connectivity {
        match self {
            Connectivity::Finite(c) => Connectivity::Finite(c + by),
            Connectivity::Infinite => Connectivity::Infinite,
        }
    }

    /// True when every nonzero reduced degree exceeds `cap`.
    pub fn at_least(self, cap: usize) -> bool {
        match self {
            Connectivity::Finite(c) => c >= cap as i64,
            Connectivity::Infinite => true,
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connectivity::Finite(c) => write!(f, "{c}"),
            Connectivity::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("arity error at byte {offset}: {constructor} expects {expected}, found {found}")]
    Arity {
        offset: usize,
        constructor: String,
        expected: String,
        found: usize,
    },
    #[error("parameter error at byte {offset}: {message}")]
    Parameter { offset: usize, message: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::Arity { offset, .. }
            | ParseError::Parameter { offset, .. } => *offset,
        }
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl SpaceExpr {
    pub fn sphere(n: u32) -> SpaceExpr {
        SpaceExpr::Sphere(n)
    }

    pub fn moore(n: u32, p: u32, r: u32) -> SpaceExpr {
        SpaceExpr::Moore { n, p, r }
    }

    pub fn suspend(e: SpaceExpr, times: u32) -> SpaceExpr {
        SpaceExpr::Suspend(Box::new(e), times)
    }

    pub fn loop_of(e: SpaceExpr) -> SpaceExpr {
        SpaceExpr::Loop(Box::new(e))
    }

    pub fn half_smash(a: SpaceExpr, b: SpaceExpr) -> SpaceExpr {
        SpaceExpr::HalfSmash(Box::new(a), Box::new(b))
    }

    pub fn james(e: SpaceExpr, k: u32) -> SpaceExpr {
        SpaceExpr::James(Box::new(e), k)
    }

    /// Direct subterms in left-to-right order.
    pub fn children(&self) -> Vec<&SpaceExpr> {
        match self {
            SpaceExpr::Point | SpaceExpr::Sphere(_) | SpaceExpr::Moore { .. } => Vec::new(),
            SpaceExpr::Wedge(cs) | SpaceExpr::Smash(cs) | SpaceExpr::Product(cs) => {
                cs.iter().collect()
            }
            SpaceExpr::HalfSmash(a, b) => vec![a, b],
            SpaceExpr::Suspend(c, _) | SpaceExpr::Loop(c) | SpaceExpr::James(c, _) => vec![c],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut SpaceExpr> {
        match self {
            SpaceExpr::Point | SpaceExpr::Sphere(_) | SpaceExpr::Moore { .. } => Vec::new(),
            SpaceExpr::Wedge(cs) | SpaceExpr::Smash(cs) | SpaceExpr::Product(cs) => {
                cs.iter_mut().collect()
            }
            SpaceExpr::HalfSmash(a, b) => vec![a.as_mut(), b.as_mut()],
            SpaceExpr::Suspend(c, _) | SpaceExpr::Loop(c) | SpaceExpr::James(c, _) => {
                vec![c.as_mut()]
            }
        }
    }

    /// The subterm at `path` (child indices from the root).
    pub fn subterm(&self, path: &[usize]) -> Option<&SpaceExpr> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn subterm_mut(&mut self, path: &[usize]) -> Option<&mut SpaceExpr> {
        let mut cur = self;
        for &i in path {
            cur = cur.children_mut().into_iter().nth(i)?;
        }
        Some(cur)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn count_loops(&self) -> usize {
        let own = usize::from(matches!(self, SpaceExpr::Loop(_)));
        own + self.children().iter().map(|c| c.count_loops()).sum::<usize>()
    }

    /// Structural connectivity, valid over every coefficient field.
    pub fn connectivity(&self) -> Connectivity {
        use Connectivity::*;
        match self {
            SpaceExpr::Point => Infinite,
            SpaceExpr::Sphere(n) => Finite(*n as i64 - 1),
            SpaceExpr::Moore { n, .. } => Finite(*n as i64 - 2),
            SpaceExpr::Wedge(cs) | SpaceExpr::Product(cs) => {
                cs.iter().map(|c| c.connectivity()).min().unwrap_or(Infinite)
            }
            SpaceExpr::Smash(cs) => {
                let mut total = 0i64;
                for c in cs {
                    match c.connectivity() {
                        Infinite => return Infinite,
                        Finite(k) => total += k + 1,
                    }
                }
                Finite(total - 1)
            }
            SpaceExpr::HalfSmash(_, b) => b.connectivity(),
            SpaceExpr::Suspend(c, t) => c.connectivity().shift(*t as i64),
            SpaceExpr::Loop(c) => c.connectivity().shift(-1),
            SpaceExpr::James(c, k) => {
                if *k == 0 {
                    Infinite
                } else {
                    c.connectivity()
                }
            }
        }
    }

    /// Structurally a suspension.
    pub fn is_suspension_like(&self) -> bool {
        match self {
            SpaceExpr::Sphere(_) | SpaceExpr::Moore { .. } | SpaceExpr::Suspend(..) => true,
            SpaceExpr::Wedge(cs) => cs.iter().all(|c| c.is_suspension_like()),
            SpaceExpr::Smash(cs) => cs.iter().any(|c| c.is_suspension_like()),
            _ => false,
        }
    }

    /// Returns `X` with `ΣX` structurally equal to `self`, when one is visible.
    pub fn desuspend(&self) -> Option<SpaceExpr> {
        match self {
            SpaceExpr::Sphere(n) if *n >= 2 => Some(SpaceExpr::Sphere(n - 1)),
            SpaceExpr::Moore { n, p, r } if *n >= 3 => Some(SpaceExpr::moore(n - 1, *p, *r)),
            SpaceExpr::Suspend(c, 1) => Some((**c).clone()),
            SpaceExpr::Suspend(c, t) => Some(SpaceExpr::suspend((**c).clone(), t - 1)),
            SpaceExpr::Wedge(cs) => cs
                .iter()
                .map(|c| c.desuspend())
                .collect::<Option<Vec<_>>>()
                .map(SpaceExpr::Wedge),
            SpaceExpr::Smash(cs) => {
                let (i, d) = cs
                    .iter()
                    .enumerate()
                    .find_map(|(i, c)| c.desuspend().map(|d| (i, d)))?;
                let mut out = cs.clone();
                out[i] = d;
                Some(SpaceExpr::Smash(out))
            }
            _ => None,
        }
    }

    /// Checks the parameter invariants of every node.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            SpaceExpr::Sphere(0) => return Err("sphere degree must be at least 1".into()),
            SpaceExpr::Moore { n, p, r } => {
                if *n < 2 {
                    return Err(format!("Moore space degree {n} must be at least 2"));
                }
                if !is_prime(*p) {
                    return Err(format!("{p} is not prime"));
                }
                if *r < 1 {
                    return Err("Moore space exponent must be at least 1".into());
                }
            }
            SpaceExpr::Wedge(cs) | SpaceExpr::Smash(cs) | SpaceExpr::Product(cs)
                if cs.is_empty() =>
            {
                return Err("empty argument list".into())
            }
            SpaceExpr::Suspend(_, 0) => return Err("suspension count must be at least 1".into()),
            _ => {}
        }
        self.children().iter().try_for_each(|c| c.validate())
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, name: &str, cs: &[SpaceExpr]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str(")")
}

impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceExpr::Point => f.write_str("pt"),
            SpaceExpr::Sphere(n) => write!(f, "S({n})"),
            SpaceExpr::Moore { n, p, r } => write!(f, "P({n},{p},{r})"),
            SpaceExpr::Wedge(cs) => write_list(f, "wedge", cs),
            SpaceExpr::Smash(cs) => write_list(f, "smash", cs),
            SpaceExpr::Product(cs) => write_list(f, "prod", cs),
            SpaceExpr::HalfSmash(a, b) => write!(f, "hsm({a},{b})"),
            SpaceExpr::Suspend(c, 1) => write!(f, "sus({c})"),
            SpaceExpr::Suspend(c, t) => write!(f, "sus({c},{t})"),
            SpaceExpr::Loop(c) => write!(f, "loop({c})"),
            SpaceExpr::James(c, k) => write!(f, "james({c},{k})"),
        }
    }
}

impl FromStr for SpaceExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Sort key for wedge summands: connectivity, then spheres before Moore
/// spaces before everything else, then parameters, then rendered text.
pub fn summand_key(e: &SpaceExpr) -> (Connectivity, (u8, u32, u32, u32), String) {
    let rank = match e {
        SpaceExpr::Sphere(n) => (0, *n, 0, 0),
        SpaceExpr::Moore { n, p, r } => (1, *n, *p, *r),
        _ => (2, 0, 0, 0),
    };
    (e.connectivity(), rank, e.render())
}

pub fn summand_cmp(a: &SpaceExpr, b: &SpaceExpr) -> Ordering {
    summand_key(a).cmp(&summand_key(b))
}

pub fn parse(text: &str) -> Result<SpaceExpr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses a comma-separated list of expressions, splitting at top-level commas.
pub fn parse_list(text: &str) -> Result<Vec<SpaceExpr>, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut out = vec![p.expr()?];
    loop {
        p.skip_ws();
        if p.pos == p.src.len() {
            return Ok(out);
        }
        p.expect(b',')?;
        out.push(p.expr()?);
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

enum Arg {
    Expr(SpaceExpr),
    Nat(u32, usize),
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected a constructor name"));
        }
        let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        Ok((name, start))
    }

    fn nat(&mut self) -> Result<(u32, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        digits.parse::<u32>().map(|v| (v, start)).map_err(|_| ParseError::Parameter {
            offset: start,
            message: format!("number {digits} is too large"),
        })
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let (v, at) = self.nat()?;
                Ok(Arg::Nat(v, at))
            }
            _ => Ok(Arg::Expr(self.expr()?)),
        }
    }

    fn args(&mut self) -> Result<Vec<Arg>, ParseError> {
        self.expect(b'(')?;
        let mut out = vec![self.arg()?];
        loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    out.push(self.arg()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.syntax("expected ',' or ')'")),
            }
        }
    }

    fn expr(&mut self) -> Result<SpaceExpr, ParseError> {
        let (name, at) = self.ident()?;
        if name == "pt" {
            return Ok(SpaceExpr::Point);
        }
        let args = self.args()?;
        let arity = |expected: &str| ParseError::Arity {
            offset: at,
            constructor: name.clone(),
            expected: expected.to_string(),
            found: args.len(),
        };
        let nat_at = |i: usize| -> Result<(u32, usize), ParseError> {
            match &args[i] {
                Arg::Nat(v, o) => Ok((*v, *o)),
                Arg::Expr(_) => Err(ParseError::Syntax {
                    offset: at,
                    message: format!("argument {} of {name} must be a natural number", i + 1),
                }),
            }
        };
        let expr_at = |i: usize| -> Result<SpaceExpr, ParseError> {
            match &args[i] {
                Arg::Expr(e) => Ok(e.clone()),
                Arg::Nat(_, o) => Err(ParseError::Syntax {
                    offset: *o,
                    message: format!("argument {} of {name} must be an expression", i + 1),
                }),
            }
        };
        let param = |offset: usize, message: String| ParseError::Parameter { offset, message };
        match name.as_str() {
            "S" => {
                if args.len() != 1 {
                    return Err(arity("1 argument"));
                }
                let (n, o) = nat_at(0)?;
                if n == 0 {
                    return Err(param(o, "sphere degree must be at least 1".into()));
                }
                Ok(SpaceExpr::Sphere(n))
            }
            "P" => {
                if args.len() != 3 {
                    return Err(arity("3 arguments"));
                }
                let (n, on) = nat_at(0)?;
                let (p, op) = nat_at(1)?;
                let (r, or) = nat_at(2)?;
                if n < 2 {
                    return Err(param(on, format!("Moore space degree {n} must be at least 2")));
                }
                if !is_prime(p) {
                    return Err(param(op, format!("{p} is not prime")));
                }
                if r < 1 {
                    return Err(param(or, "Moore space exponent must be at least 1".into()));
                }
                Ok(SpaceExpr::moore(n, p, r))
            }
            "wedge" | "smash" | "prod" => {
                let cs = (0..args.len()).map(expr_at).collect::<Result<Vec<_>, _>>()?;
                Ok(match name.as_str() {
                    "wedge" => SpaceExpr::Wedge(cs),
                    "smash" => SpaceExpr::Smash(cs),
                    _ => SpaceExpr::Product(cs),
                })
            }
            "hsm" => {
                if args.len() != 2 {
                    return Err(arity("exactly 2 arguments"));
                }
                Ok(SpaceExpr::half_smash(expr_at(0)?, expr_at(1)?))
            }
            "sus" => {
                let times = match args.len() {
                    1 => 1,
                    2 => {
                        let (t, o) = nat_at(1)?;
                        if t == 0 {
                            return Err(param(o, "suspension count must be at least 1".into()));
                        }
                        t
                    }
                    _ => return Err(arity("1 or 2 arguments")),
                };
                Ok(SpaceExpr::suspend(expr_at(0)?, times))
            }
            "loop" => {
                if args.len() != 1 {
                    return Err(arity("1 argument"));
                }
                Ok(SpaceExpr::loop_of(expr_at(0)?))
            }
            "james" => {
                if args.len() != 2 {
                    return Err(arity("2 arguments"));
                }
                let (k, _) = nat_at(1)?;
                Ok(SpaceExpr::james(expr_at(0)?, k))
            }
            other => Err(ParseError::Syntax {
                offset: at,
                message: format!("unknown constructor '{other}'"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> SpaceExpr {
        parse(s).unwrap()
    }

    #[test]
    fn parses_atoms() {
        assert_eq!(p("S(3)"), SpaceExpr::Sphere(3));
        assert_eq!(p(" P( 4 , 3 , 1 ) "), SpaceExpr::moore(4, 3, 1));
        assert_eq!(p("pt"), SpaceExpr::Point);
    }

    #[test]
    fn parses_nested() {
        let e = p("hsm(loop(S(3)), wedge(S(2), P(4,3,1)))");
        assert_eq!(
            e,
            SpaceExpr::half_smash(
                SpaceExpr::loop_of(SpaceExpr::Sphere(3)),
                SpaceExpr::Wedge(vec![SpaceExpr::Sphere(2), SpaceExpr::moore(4, 3, 1)])
            )
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(parse("P(4,4,1)"), Err(ParseError::Parameter { offset: 4, .. })));
        assert!(matches!(parse("S(0)"), Err(ParseError::Parameter { .. })));
        assert!(matches!(parse("P(1,3,1)"), Err(ParseError::Parameter { .. })));
        assert!(matches!(parse("sus(S(2),0)"), Err(ParseError::Parameter { .. })));
    }

    #[test]
    fn rejects_bad_arity_and_syntax() {
        assert!(matches!(parse("hsm(S(2))"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse("hsm(S(2),S(2),S(2))"), Err(ParseError::Arity { .. })));
        let err = parse("wedge(S(2),").unwrap_err();
        assert_eq!(err.offset(), 11);
        assert!(matches!(parse("S(2) x"), Err(ParseError::Syntax { offset: 5, .. })));
        assert!(matches!(parse("foo(S(2))"), Err(ParseError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn renders_canonically() {
        assert_eq!(SpaceExpr::Sphere(3).render(), "S(3)");
        assert_eq!(SpaceExpr::suspend(SpaceExpr::Sphere(2), 2).render(), "sus(S(2),2)");
        assert_eq!(
            SpaceExpr::Wedge(vec![SpaceExpr::Sphere(2), SpaceExpr::Sphere(2)]).render(),
            "wedge(S(2),S(2))"
        );
        assert_eq!(p("sus(S(2), 1)").render(), "sus(S(2))");
    }

    #[test]
    fn connectivity_examples() {
        use Connectivity::*;
        assert_eq!(p("smash(S(2),S(3))").connectivity(), Finite(4));
        assert_eq!(p("P(3,3,1)").connectivity(), Finite(1));
        assert_eq!(p("loop(S(3))").connectivity(), Finite(1));
        assert_eq!(p("pt").connectivity(), Infinite);
        assert_eq!(p("hsm(S(5),S(2))").connectivity(), Finite(1));
        assert_eq!(p("james(S(2),0)").connectivity(), Infinite);
        assert_eq!(p("james(S(2),3)").connectivity(), Finite(1));
        assert_eq!(p("smash(S(2),pt)").connectivity(), Infinite);
    }

    #[test]
    fn suspension_like_examples() {
        assert!(p("S(1)").is_suspension_like());
        assert!(!p("prod(S(2),S(3))").is_suspension_like());
        assert!(p("smash(loop(S(3)),S(4))").is_suspension_like());
        assert!(!p("loop(S(3))").is_suspension_like());
        assert!(p("wedge(S(2),sus(loop(S(3))))").is_suspension_like());
    }

    #[test]
    fn desuspension() {
        assert_eq!(p("S(3)").desuspend(), Some(p("S(2)")));
        assert_eq!(p("S(1)").desuspend(), None);
        assert_eq!(p("P(3,2,1)").desuspend(), Some(p("P(2,2,1)")));
        assert_eq!(p("P(2,2,1)").desuspend(), None);
        assert_eq!(p("sus(loop(S(3)),2)").desuspend(), Some(p("sus(loop(S(3)))")));
        assert_eq!(p("smash(loop(S(3)),S(4))").desuspend(), Some(p("smash(loop(S(3)),S(3))")));
    }

    #[test]
    fn list_parsing_respects_nesting() {
        let v = parse_list("S(2), wedge(S(2),S(3)) ,P(3,2,1)").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[1], p("wedge(S(2),S(3))"));
    }

    #[test]
    fn primes() {
        let ps: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    pub(crate) fn arb_expr() -> impl Strategy<Value = SpaceExpr> {
        let leaf = prop_oneof![
            Just(SpaceExpr::Point),
            (1u32..6).prop_map(SpaceExpr::Sphere),
            (2u32..6, prop::sample::select(vec![2u32, 3, 5, 7]), 1u32..3)
                .prop_map(|(n, p, r)| SpaceExpr::moore(n, p, r)),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..4).prop_map(SpaceExpr::Wedge),
                prop::collection::vec(inner.clone(), 1..4).prop_map(SpaceExpr::Smash),
                prop::collection::vec(inner.clone(), 1..4).prop_map(SpaceExpr::Product),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SpaceExpr::half_smash(a, b)),
                (inner.clone(), 1u32..4).prop_map(|(a, t)| SpaceExpr::suspend(a, t)),
                inner.clone().prop_map(SpaceExpr::loop_of),
                (inner, 0u32..4).prop_map(|(a, k)| SpaceExpr::james(a, k)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(e in arb_expr()) {
            let text = e.render();
            prop_assert_eq!(parse(&text).unwrap(), e);
        }

        #[test]
        fn suspension_adds_to_connectivity(e in arb_expr(), t in 1u32..5) {
            if let Connectivity::Finite(c) = e.connectivity() {
                prop_assert_eq!(
                    SpaceExpr::suspend(e, t).connectivity(),
                    Connectivity::Finite(c + t as i64)
                );
            }
        }

        #[test]
        fn whitespace_is_ignored(e in arb_expr()) {
            let spaced = e.render().replace(',', " , ").replace('(', " ( ");
            prop_assert_eq!(parse(&spaced).unwrap(), e);
        }
    }
}

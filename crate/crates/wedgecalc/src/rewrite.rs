//! Rewriting of space expressions to wedge normal form.
//!
//! The rewriter works innermost-leftmost: children are normalized before
//! their parent, and at each node the first applicable rule fires, after
//! which the node is normalized again. Rule families:
//!
//! - `R1` suspension: absorption into spheres and Moore spaces, distribution
//!   over wedges, the splitting of suspended products and half-smashes.
//! - `R2` smash: distribution over wedges, sphere and Moore smashes, pulling
//!   suspension coordinates out of smash factors.
//! - `R3` product bookkeeping (points, nesting).
//! - `R4` half-smash with a suspension on the right.
//! - `R5` loops of products, and the splitting of `ΣΩΣX` at the cap.
//! - `R6` James stages and their suspension splitting.
//! - `W` wedge flattening and sorting, `T` truncation at the cap.
//!
//! Only the outermost wedge/smash/suspension layers are truncated. Below a
//! loop, product, half-smash or James node the rewriter runs in exact mode,
//! which never truncates and never applies the infinite `ΣΩΣX` splitting, so
//! residues are independent of the cap.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{summand_cmp, summand_key, Connectivity, SpaceExpr};

pub const DEFAULT_STEP_BUDGET: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    R1,
    R2,
    R2Distribute,
    R2Moore,
    R3,
    R4,
    R5,
    R6,
    Wedge,
    Truncate,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R2Distribute => "R2-distribute",
            Rule::R2Moore => "R2-moore",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
            Rule::R5 => "R5",
            Rule::R6 => "R6",
            Rule::Wedge => "W",
            Rule::Truncate => "T",
        })
    }
}

impl Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One rewrite: the subterm at `path` changed from `before` to `after`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub path: Vec<usize>,
    pub before: SpaceExpr,
    pub after: SpaceExpr,
}

impl TraceStep {
    /// Tab-separated `rule, before, after`.
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}", self.rule, self.before, self.after)
    }
}

impl Serialize for TraceStep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TraceStep", 4)?;
        st.serialize_field("rule", &self.rule)?;
        st.serialize_field("path", &self.path)?;
        st.serialize_field("before", &self.before.render())?;
        st.serialize_field("after", &self.after.render())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Summand {
    Sphere(u32),
    Moore { n: u32, p: u32, r: u32 },
    Residue(SpaceExpr),
}

impl Summand {
    pub fn from_expr(e: SpaceExpr) -> Summand {
        match e {
            SpaceExpr::Sphere(n) => Summand::Sphere(n),
            SpaceExpr::Moore { n, p, r } => Summand::Moore { n, p, r },
            other => Summand::Residue(other),
        }
    }

    pub fn to_expr(&self) -> SpaceExpr {
        match self {
            Summand::Sphere(n) => SpaceExpr::Sphere(*n),
            Summand::Moore { n, p, r } => SpaceExpr::moore(*n, *p, *r),
            Summand::Residue(e) => e.clone(),
        }
    }

    pub fn connectivity(&self) -> Connectivity {
        self.to_expr().connectivity()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Summand::Sphere(_) => "sphere",
            Summand::Moore { .. } => "moore",
            Summand::Residue(_) => "residue",
        }
    }
}

impl Serialize for Summand {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Summand", 3)?;
        st.serialize_field("kind", self.kind())?;
        st.serialize_field("text", &self.to_expr().render())?;
        st.serialize_field("connectivity", &self.connectivity().finite())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WedgeNormalForm {
    pub summands: Vec<Summand>,
    pub cap: usize,
    pub complete: bool,
}

impl WedgeNormalForm {
    /// The normal form read back as an expression (`pt` when empty).
    pub fn to_expr(&self) -> SpaceExpr {
        match self.summands.len() {
            0 => SpaceExpr::Point,
            1 => self.summands[0].to_expr(),
            _ => SpaceExpr::Wedge(self.summands.iter().map(Summand::to_expr).collect()),
        }
    }

    pub fn residues(&self) -> impl Iterator<Item = &SpaceExpr> {
        self.summands.iter().filter_map(|s| match s {
            Summand::Residue(e) => Some(e),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("invalid expression: {0}")]
    InvalidExpr(String),
    #[error("cap must be at least 1")]
    InvalidCap,
    #[error("rewrite budget of {0} steps exceeded")]
    BudgetExceeded(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Top,
    Exact,
}

struct Engine {
    cap: usize,
    record: bool,
    trace: Vec<TraceStep>,
    complete: bool,
    steps: usize,
    budget: usize,
}

pub fn normalize(e: &SpaceExpr, cap: usize) -> Result<WedgeNormalForm, RewriteError> {
    run(e, cap, false).map(|(nf, _)| nf)
}

/// The ordered rule applications performed by `normalize`.
pub fn trace(e: &SpaceExpr, cap: usize) -> Result<Vec<TraceStep>, RewriteError> {
    run(e, cap, true).map(|(_, t)| t)
}

pub fn normalize_with_trace(
    e: &SpaceExpr,
    cap: usize,
) -> Result<(WedgeNormalForm, Vec<TraceStep>), RewriteError> {
    run(e, cap, true)
}

/// Normalizes without truncation and without infinite splittings.
pub fn normalize_exact(e: &SpaceExpr) -> Result<SpaceExpr, RewriteError> {
    e.validate().map_err(RewriteError::InvalidExpr)?;
    let mut engine = Engine::new(usize::MAX, false);
    engine.norm(e.clone(), &mut Vec::new(), Mode::Exact)
}

/// Applies a trace to `e`, checking every step against the current term.
pub fn replay(e: &SpaceExpr, steps: &[TraceStep]) -> Result<SpaceExpr, String> {
    let mut cur = e.clone();
    for (i, s) in steps.iter().enumerate() {
        let sub = cur
            .subterm_mut(&s.path)
            .ok_or_else(|| format!("step {i}: no subterm at {:?}", s.path))?;
        if *sub != s.before {
            return Err(format!("step {i}: expected {} at {:?}, found {}", s.before, s.path, sub));
        }
        *sub = s.after.clone();
    }
    Ok(cur)
}

fn run(
    e: &SpaceExpr,
    cap: usize,
    record: bool,
) -> Result<(WedgeNormalForm, Vec<TraceStep>), RewriteError> {
    if cap == 0 {
        return Err(RewriteError::InvalidCap);
    }
    e.validate().map_err(RewriteError::InvalidExpr)?;
    let mut engine = Engine::new(cap, record);
    let out = engine.norm(e.clone(), &mut Vec::new(), Mode::Top)?;
    let summands = match out {
        SpaceExpr::Point => Vec::new(),
        SpaceExpr::Wedge(cs) => cs.into_iter().map(Summand::from_expr).collect(),
        other => vec![Summand::from_expr(other)],
    };
    let nf = WedgeNormalForm {
        summands,
        cap,
        complete: engine.complete,
    };
    Ok((nf, engine.trace))
}

fn smash_or_single(mut fs: Vec<SpaceExpr>) -> SpaceExpr {
    if fs.len() == 1 {
        fs.pop().unwrap()
    } else {
        SpaceExpr::Smash(fs)
    }
}

fn smash_power(x: &SpaceExpr, j: usize) -> SpaceExpr {
    smash_or_single(vec![x.clone(); j])
}

fn replace_at(fs: &[SpaceExpr], i: usize, with: SpaceExpr) -> Vec<SpaceExpr> {
    let mut out = fs.to_vec();
    out[i] = with;
    out
}

impl Engine {
    fn new(cap: usize, record: bool) -> Engine {
        Engine {
            cap,
            record,
            trace: Vec::new(),
            complete: true,
            steps: 0,
            budget: DEFAULT_STEP_BUDGET,
        }
    }

    fn fire(
        &mut self,
        rule: Rule,
        path: &[usize],
        before: &SpaceExpr,
        after: &SpaceExpr,
    ) -> Result<(), RewriteError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(RewriteError::BudgetExceeded(self.budget));
        }
        if self.record {
            self.trace.push(TraceStep {
                rule,
                path: path.to_vec(),
                before: before.clone(),
                after: after.clone(),
            });
        }
        Ok(())
    }

    fn norm(
        &mut self,
        mut e: SpaceExpr,
        path: &mut Vec<usize>,
        mode: Mode,
    ) -> Result<SpaceExpr, RewriteError> {
        loop {
            if mode == Mode::Top && e != SpaceExpr::Point && e.connectivity().at_least(self.cap) {
                self.complete = false;
                self.fire(Rule::Truncate, path, &e, &SpaceExpr::Point)?;
                return Ok(SpaceExpr::Point);
            }
            e = self.norm_children(e, path, mode)?;
            match self.rewrite_at(&e, mode) {
                Some((rule, next)) => {
                    self.fire(rule, path, &e, &next)?;
                    e = next;
                }
                None => return Ok(e),
            }
        }
    }

    fn norm_list(
        &mut self,
        cs: Vec<SpaceExpr>,
        path: &mut Vec<usize>,
        mode: Mode,
    ) -> Result<Vec<SpaceExpr>, RewriteError> {
        let mut out = Vec::with_capacity(cs.len());
        for (i, c) in cs.into_iter().enumerate() {
            path.push(i);
            let r = self.norm(c, path, mode);
            path.pop();
            out.push(r?);
        }
        Ok(out)
    }

    fn norm_child(
        &mut self,
        c: SpaceExpr,
        index: usize,
        path: &mut Vec<usize>,
        mode: Mode,
    ) -> Result<SpaceExpr, RewriteError> {
        path.push(index);
        let r = self.norm(c, path, mode);
        path.pop();
        r
    }

    fn norm_children(
        &mut self,
        e: SpaceExpr,
        path: &mut Vec<usize>,
        mode: Mode,
    ) -> Result<SpaceExpr, RewriteError> {
        use SpaceExpr::*;
        let exact = Mode::Exact;
        Ok(match e {
            Point | Sphere(_) | Moore { .. } => e,
            Wedge(cs) => Wedge(self.norm_list(cs, path, mode)?),
            Smash(cs) => Smash(self.norm_list(cs, path, mode)?),
            Product(cs) => Product(self.norm_list(cs, path, exact)?),
            HalfSmash(a, b) => {
                let a = self.norm_child(*a, 0, path, exact)?;
                let b = self.norm_child(*b, 1, path, exact)?;
                SpaceExpr::half_smash(a, b)
            }
            Suspend(c, t) => SpaceExpr::suspend(self.norm_child(*c, 0, path, mode)?, t),
            Loop(c) => SpaceExpr::loop_of(self.norm_child(*c, 0, path, exact)?),
            James(c, k) => SpaceExpr::james(self.norm_child(*c, 0, path, exact)?, k),
        })
    }

    fn rewrite_at(&mut self, e: &SpaceExpr, mode: Mode) -> Option<(Rule, SpaceExpr)> {
        match e {
            SpaceExpr::Point | SpaceExpr::Sphere(_) | SpaceExpr::Moore { .. } => None,
            SpaceExpr::Wedge(cs) => wedge_rule(e, cs),
            SpaceExpr::Suspend(c, t) => self.suspend_rule(c, *t, mode),
            SpaceExpr::Smash(fs) => smash_rule(fs),
            SpaceExpr::HalfSmash(a, b) => half_smash_rule(a, b),
            SpaceExpr::Product(fs) => product_rule(e, fs),
            SpaceExpr::Loop(c) => loop_rule(c),
            SpaceExpr::James(x, k) => james_rule(x, *k),
        }
    }

    fn suspend_rule(&mut self, c: &SpaceExpr, t: u32, mode: Mode) -> Option<(Rule, SpaceExpr)> {
        use SpaceExpr::*;
        let sus = |x: SpaceExpr| SpaceExpr::suspend(x, t);
        let out = match c {
            Point => (Rule::R1, Point),
            Suspend(inner, t2) => (Rule::R1, SpaceExpr::suspend((**inner).clone(), t + t2)),
            Sphere(n) => (Rule::R1, Sphere(n + t)),
            Moore { n, p, r } => (Rule::R1, SpaceExpr::moore(n + t, *p, *r)),
            Wedge(cs) => (Rule::R1, Wedge(cs.iter().cloned().map(sus).collect())),
            Product(fs) => {
                let n = fs.len();
                let mut parts = Vec::new();
                for mask in 1u64..(1u64 << n) {
                    let sub: Vec<SpaceExpr> = (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| fs[i].clone())
                        .collect();
                    parts.push(sus(smash_or_single(sub)));
                }
                (Rule::R1, Wedge(parts))
            }
            HalfSmash(a, b) => (
                Rule::R1,
                Wedge(vec![
                    sus((**b).clone()),
                    sus(Smash(vec![(**a).clone(), (**b).clone()])),
                ]),
            ),
            James(x, k) => (
                Rule::R6,
                Wedge((1..=*k as usize).map(|j| sus(smash_power(x, j))).collect()),
            ),
            Loop(w) => {
                if mode != Mode::Top {
                    return None;
                }
                let x = w.desuspend()?;
                let cx = x.connectivity().finite()?;
                // conn(Σ^t X^∧j) = j(cx+1) - 1 + t must stay below the cap.
                let mut parts = Vec::new();
                let mut j = 1usize;
                while (j as i64) * (cx + 1) - 1 + (t as i64) < self.cap as i64 {
                    parts.push(sus(smash_power(&x, j)));
                    j += 1;
                }
                self.complete = false;
                (Rule::R5, Wedge(parts))
            }
            Smash(fs) => {
                if let Some(i) = fs.iter().position(|f| matches!(f, Moore { .. })) {
                    let Moore { n, p, r } = &fs[i] else { unreachable!() };
                    let moved = SpaceExpr::moore(n + t, *p, *r);
                    (Rule::R1, Smash(replace_at(fs, i, moved)))
                } else {
                    let i = fs.iter().position(|f| splits_under_suspension(f, mode))?;
                    (Rule::R1, Smash(replace_at(fs, i, sus(fs[i].clone()))))
                }
            }
        };
        Some(out)
    }
}

fn splits_under_suspension(f: &SpaceExpr, mode: Mode) -> bool {
    match f {
        SpaceExpr::Product(_) | SpaceExpr::HalfSmash(..) | SpaceExpr::James(..) => true,
        SpaceExpr::Loop(w) => mode == Mode::Top && w.desuspend().is_some(),
        _ => false,
    }
}

fn wedge_rule(e: &SpaceExpr, cs: &[SpaceExpr]) -> Option<(Rule, SpaceExpr)> {
    let mut flat = Vec::with_capacity(cs.len());
    for c in cs {
        match c {
            SpaceExpr::Point => {}
            SpaceExpr::Wedge(inner) => flat.extend(inner.iter().cloned()),
            other => flat.push(other.clone()),
        }
    }
    flat.sort_by_cached_key(summand_key);
    let canonical = match flat.len() {
        0 => SpaceExpr::Point,
        1 => flat.pop().unwrap(),
        _ => SpaceExpr::Wedge(flat),
    };
    (canonical != *e).then_some((Rule::Wedge, canonical))
}

fn is_moore_pair(a: &SpaceExpr, b: &SpaceExpr) -> bool {
    match (a, b) {
        (
            SpaceExpr::Moore { p, r, .. },
            SpaceExpr::Moore { p: q, r: s, .. },
        ) => p == q && r == s && !(*p == 2 && *r == 1),
        _ => false,
    }
}

fn smash_rule(fs: &[SpaceExpr]) -> Option<(Rule, SpaceExpr)> {
    use SpaceExpr::*;
    if fs.len() == 1 {
        return Some((Rule::R2, fs[0].clone()));
    }
    if fs.contains(&Point) {
        return Some((Rule::R2, Point));
    }
    if fs.iter().any(|f| matches!(f, Smash(_))) {
        let mut flat = Vec::new();
        for f in fs {
            match f {
                Smash(inner) => flat.extend(inner.iter().cloned()),
                other => flat.push(other.clone()),
            }
        }
        return Some((Rule::R2, Smash(flat)));
    }
    if let Some(i) = fs.iter().position(|f| matches!(f, Wedge(_))) {
        let Wedge(ws) = &fs[i] else { unreachable!() };
        let parts = ws.iter().map(|w| Smash(replace_at(fs, i, w.clone()))).collect();
        return Some((Rule::R2Distribute, Wedge(parts)));
    }
    let moores = fs.iter().filter(|f| matches!(f, Moore { .. })).count();
    if moores <= 1 && fs.iter().all(|f| matches!(f, Sphere(_) | Moore { .. })) {
        let dims: u32 = fs
            .iter()
            .map(|f| match f {
                Sphere(n) => *n,
                _ => 0,
            })
            .sum();
        let out = match fs.iter().find(|f| matches!(f, Moore { .. })) {
            Some(Moore { n, p, r }) => SpaceExpr::moore(n + dims, *p, *r),
            _ => Sphere(dims),
        };
        return Some((Rule::R2, out));
    }
    if let Some(i) = fs.iter().position(|f| matches!(f, Sphere(_))) {
        let Sphere(n) = fs[i] else { unreachable!() };
        let mut rest = fs.to_vec();
        rest.remove(i);
        return Some((Rule::R2, SpaceExpr::suspend(smash_or_single(rest), n)));
    }
    if let Some(i) = fs.iter().position(|f| matches!(f, Suspend(..))) {
        let Suspend(inner, t) = &fs[i] else { unreachable!() };
        let pulled = Smash(replace_at(fs, i, (**inner).clone()));
        return Some((Rule::R2, SpaceExpr::suspend(pulled, *t)));
    }
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            if is_moore_pair(&fs[i], &fs[j]) {
                let (Moore { n: s, p, r }, Moore { n: t, .. }) = (&fs[i], &fs[j]) else {
                    unreachable!()
                };
                let build = |deg: u32| {
                    let mut out = replace_at(fs, i, SpaceExpr::moore(deg, *p, *r));
                    out.remove(j);
                    smash_or_single(out)
                };
                return Some((Rule::R2Moore, Wedge(vec![build(s + t), build(s + t - 1)])));
            }
        }
    }
    None
}

fn half_smash_rule(a: &SpaceExpr, b: &SpaceExpr) -> Option<(Rule, SpaceExpr)> {
    if *b == SpaceExpr::Point {
        return Some((Rule::R4, SpaceExpr::Point));
    }
    if *a == SpaceExpr::Point {
        return Some((Rule::R4, b.clone()));
    }
    if b.is_suspension_like() {
        return Some((
            Rule::R4,
            SpaceExpr::Wedge(vec![SpaceExpr::Smash(vec![a.clone(), b.clone()]), b.clone()]),
        ));
    }
    None
}

fn product_rule(e: &SpaceExpr, fs: &[SpaceExpr]) -> Option<(Rule, SpaceExpr)> {
    let mut flat = Vec::with_capacity(fs.len());
    for f in fs {
        match f {
            SpaceExpr::Point => {}
            SpaceExpr::Product(inner) => flat.extend(inner.iter().cloned()),
            other => flat.push(other.clone()),
        }
    }
    let out = match flat.len() {
        0 => SpaceExpr::Point,
        1 => flat.pop().unwrap(),
        _ => SpaceExpr::Product(flat),
    };
    (out != *e).then_some((Rule::R3, out))
}

fn loop_rule(c: &SpaceExpr) -> Option<(Rule, SpaceExpr)> {
    match c {
        SpaceExpr::Point => Some((Rule::R5, SpaceExpr::Point)),
        SpaceExpr::Product(fs) => Some((
            Rule::R5,
            SpaceExpr::Product(fs.iter().cloned().map(SpaceExpr::loop_of).collect()),
        )),
        _ => None,
    }
}

fn james_rule(x: &SpaceExpr, k: u32) -> Option<(Rule, SpaceExpr)> {
    if k == 0 || *x == SpaceExpr::Point {
        Some((Rule::R6, SpaceExpr::Point))
    } else if k == 1 {
        Some((Rule::R6, x.clone()))
    } else {
        None
    }
}

/// Sorts summands into canonical order.
pub fn sort_summands(v: &mut [Summand]) {
    v.sort_by(|a, b| summand_cmp(&a.to_expr(), &b.to_expr()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::series::{series_of, FieldTag};

    fn p(s: &str) -> SpaceExpr {
        parse(s).unwrap()
    }

    fn texts(nf: &WedgeNormalForm) -> Vec<String> {
        nf.summands.iter().map(|s| s.to_expr().render()).collect()
    }

    #[test]
    fn suspended_product() {
        let nf = normalize(&p("sus(prod(S(2),S(3)))"), 10).unwrap();
        assert_eq!(texts(&nf), vec!["S(3)", "S(4)", "S(6)"]);
        assert!(nf.complete);
    }

    #[test]
    fn moore_smash() {
        let nf = normalize(&p("smash(P(3,3,1),P(3,3,1))"), 10).unwrap();
        assert_eq!(texts(&nf), vec!["P(5,3,1)", "P(6,3,1)"]);
        assert!(nf.complete);
    }

    #[test]
    fn half_smash_with_loop_splits_and_truncates() {
        let nf = normalize(&p("hsm(loop(S(3)),S(4))"), 11).unwrap();
        assert_eq!(texts(&nf), vec!["S(4)", "S(6)", "S(8)", "S(10)"]);
        assert!(!nf.complete);
    }

    #[test]
    fn mod_two_moore_smash_is_residue() {
        let nf = normalize(&p("smash(P(3,2,1),P(3,2,1))"), 10).unwrap();
        assert_eq!(nf.summands, vec![Summand::Residue(p("smash(P(3,2,1),P(3,2,1))"))]);
    }

    #[test]
    fn mixed_moore_smash_is_residue() {
        let nf = normalize(&p("smash(P(3,3,1),P(3,5,1))"), 10).unwrap();
        assert_eq!(nf.residues().count(), 1);
        let nf = normalize(&p("smash(P(3,3,1),P(3,3,2))"), 10).unwrap();
        assert_eq!(nf.residues().count(), 1);
        // p^r = 4 is allowed.
        let nf = normalize(&p("smash(P(3,2,2),P(3,2,2))"), 10).unwrap();
        assert_eq!(texts(&nf), vec!["P(5,2,2)", "P(6,2,2)"]);
    }

    #[test]
    fn trace_examples() {
        let t = trace(&p("sus(S(2))"), 12).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].to_line(), "R1\tsus(S(2))\tS(3)");
        assert!(trace(&p("pt"), 12).unwrap().is_empty());
        let t = trace(&p("smash(S(2),wedge(S(2),S(3)))"), 12).unwrap();
        assert_eq!(t[0].rule, Rule::R2Distribute);
        assert_eq!(t[0].before, p("smash(S(2),wedge(S(2),S(3)))"));
    }

    #[test]
    fn trace_folds_to_normal_form() {
        for s in [
            "hsm(loop(S(3)),S(4))",
            "sus(prod(S(2),loop(S(3)),P(3,3,1)))",
            "smash(wedge(S(2),P(3,3,1)),sus(james(S(2),3)),P(4,3,1))",
            "wedge(S(20),S(2))",
        ] {
            let e = p(s);
            let (nf, steps) = normalize_with_trace(&e, 12).unwrap();
            assert_eq!(replay(&e, &steps).unwrap(), nf.to_expr(), "{s}");
        }
    }

    #[test]
    fn too_highly_connected_is_empty() {
        let nf = normalize(&p("S(20)"), 10).unwrap();
        assert!(nf.summands.is_empty());
        assert!(!nf.complete);
        assert!(normalize(&p("S(2)"), 0).is_err());
    }

    #[test]
    fn james_under_suspension() {
        let nf = normalize(&p("sus(james(S(2),3))"), 12).unwrap();
        assert_eq!(texts(&nf), vec!["S(3)", "S(5)", "S(7)"]);
        assert!(nf.complete);
        let nf = normalize(&p("james(S(2),3)"), 12).unwrap();
        assert_eq!(texts(&nf), vec!["james(S(2),3)"]);
    }

    #[test]
    fn loops_stay_residues_without_suspension() {
        let nf = normalize(&p("loop(prod(S(3),wedge(S(4),S(4))))"), 12).unwrap();
        assert_eq!(texts(&nf), vec!["prod(loop(S(3)),loop(wedge(S(4),S(4))))"]);
        assert!(nf.complete);
    }

    #[test]
    fn suspension_enters_smash_through_moore_factor() {
        let nf = normalize(&p("sus(smash(P(3,3,1),loop(loop(S(5)))),2)"), 12).unwrap();
        assert_eq!(texts(&nf), vec!["smash(P(5,3,1),loop(loop(S(5))))"]);
    }

    #[test]
    fn exact_mode_keeps_infinite_splitting_folded() {
        let e = normalize_exact(&p("sus(loop(S(3)))")).unwrap();
        assert_eq!(e, p("sus(loop(S(3)))"));
        let nf = normalize(&p("sus(loop(S(3)))"), 9).unwrap();
        assert_eq!(texts(&nf), vec!["S(3)", "S(5)", "S(7)", "S(9)"]);
    }

    #[test]
    fn residue_is_minimal() {
        let nf = normalize(&p("hsm(prod(S(2),S(3)),prod(S(2),S(2)))"), 12).unwrap();
        let again = trace(&nf.to_expr(), 12).unwrap();
        assert!(again.is_empty(), "{again:?}");
    }

    #[test]
    fn soundness_on_examples() {
        for s in [
            "hsm(loop(S(3)),S(4))",
            "sus(prod(S(2),loop(S(3)),P(3,3,1)))",
            "smash(wedge(S(2),P(3,3,1)),sus(james(S(2),3)),P(4,3,1))",
            "sus(hsm(prod(S(2),S(2)),prod(S(2),S(3))))",
            "smash(P(3,2,1),P(4,2,1),S(2))",
            "sus(loop(wedge(S(2),S(3))),2)",
        ] {
            let e = p(s);
            for cap in [8, 12] {
                let nf = normalize(&e, cap).unwrap();
                for f in [FieldTag::Rational, FieldTag::Prime(2), FieldTag::Prime(3)] {
                    let lhs = series_of(&nf.to_expr(), f, cap, true).unwrap();
                    let rhs = series_of(&e, f, cap, true).unwrap();
                    assert_eq!(lhs, rhs, "{s} at cap {cap} over {f}");
                }
            }
        }
    }
}

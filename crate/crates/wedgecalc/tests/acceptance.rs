//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. All comparisons are exact.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{ints, Ps};
use serde_json::{json, Value};
use wedgecalc::expr::parse;
use wedgecalc::freealg::{ad_relator, hilbert_product_formula, hilbert_quotient_oracle, parse_relators, GeneratorSet};
use wedgecalc::simplicial::{
    desuspend_entries, missing_face_sum, missing_face_wedge, polyprod_series, polywh_domain_enumerated,
    polywh_domain_series, SimplicialComplex,
};
use wedgecalc::theorems::{
    random_corpus, rewrite_suite, sampled_complexes, verify, TheoremId, SUITE_SEED, SUITE_SIZE,
};
use wedgecalc::{series_of, FieldTag, SpaceExpr};

const Q: FieldTag = FieldTag::Rational;
const F2: FieldTag = FieldTag::Prime(2);
const F3: FieldTag = FieldTag::Prime(3);

/// Collects failures for one criterion and reports a single line.
struct Criterion {
    number: u32,
    title: &'static str,
    start: Instant,
    limit: Duration,
    failures: Vec<String>,
}

impl Criterion {
    fn new(number: u32, title: &'static str, limit_secs: u64) -> Criterion {
        Criterion {
            number,
            title,
            start: Instant::now(),
            limit: Duration::from_secs(limit_secs),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, lhs: T, rhs: T, what: &str) {
        if lhs != rhs {
            self.failures.push(format!("{what}: {lhs:?} != {rhs:?}"));
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        if elapsed > self.limit {
            self.failures.push(format!("took {elapsed:?}, limit {:?}", self.limit));
        }
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {} [{}]: {status} ({:.2?})", self.number, self.title, elapsed);
        for f in self.failures.iter().take(10) {
            println!("    {f}");
        }
        assert!(self.failures.is_empty(), "criterion {} failed", self.number);
    }
}

/// `1/(1-t^m) · 1/(1 - Σ_{j<k} t^{jm+n})`.
fn two_cell_oracle(m: usize, n: usize, k: usize, cap: usize) -> Ps {
    let first = Ps::one(cap).sub(&Ps::mono(cap, m, 1)).inv();
    let mut w = Ps::zero(cap);
    for j in 0..k {
        w = w.add(&Ps::mono(cap, j * m + n, 1));
    }
    first.mul(&Ps::one(cap).sub(&w).inv())
}

#[test]
fn criterion_1_one_relator_cross_check() {
    let mut c = Criterion::new(1, "ad^k quotient algebra: oracle vs product formula", 120);
    let cap = 12;
    for m in 1..=3u32 {
        for n in 1..=3u32 {
            for k in 1..=3u32 {
                let gens = GeneratorSet::new(vec![("x", m), ("y", n)]).unwrap();
                let expected = two_cell_oracle(m as usize, n as usize, k as usize, cap).as_i64();
                for f in [Q, F2, F3] {
                    let oracle = hilbert_quotient_oracle(&gens, &[ad_relator(k, 0, 1)], f, cap).unwrap();
                    let formula = hilbert_product_formula(m, n, k, f, cap);
                    c.check(oracle == formula, || format!("(m,n,k)=({m},{n},{k}) over {f}: {oracle} vs {formula}"));
                    c.eq(ints(&formula), expected.clone(), &format!("formula ({m},{n},{k}) over {f}"));
                }
                if k == 1 {
                    let poly = Ps::one(cap)
                        .sub(&Ps::mono(cap, m as usize, 1))
                        .inv()
                        .mul(&Ps::one(cap).sub(&Ps::mono(cap, n as usize, 1)).inv());
                    c.eq(expected.clone(), poly.as_i64(), &format!("polynomial algebra ({m},{n})"));
                }
            }
        }
    }
    let gens = GeneratorSet::new(vec![("x", 2), ("y", 2)]).unwrap();
    let s = hilbert_quotient_oracle(&gens, &[ad_relator(2, 0, 1)], Q, 10).unwrap();
    let even: Vec<i64> = ints(&s).into_iter().step_by(2).collect();
    c.eq(even, vec![1, 2, 4, 7, 12, 20], "even degrees at (2,2,2)");
    c.finish();
}

#[test]
fn criterion_2_connected_sum() {
    let mut c = Criterion::new(2, "connected sum of two copies of S2xS2", 180);
    let cap = 7;
    let gens = GeneratorSet::parse("v1:1,v2:1,v3:1,v4:1").unwrap();
    let rels = parse_relators("sum(com(v1,v2),com(v3,v4))", &gens).unwrap();
    let expected = vec![1, 4, 15, 56, 209, 780, 2911, 10864];
    let closed = Ps::from(cap, &[(0, 1), (1, -4), (2, 1)]).inv().as_i64();
    c.eq(closed.clone(), expected.clone(), "1/(1-4t+t^2)");
    for f in [Q, F2, F3] {
        let oracle = hilbert_quotient_oracle(&gens, &rels, f, cap).unwrap();
        c.eq(ints(&oracle), expected.clone(), &format!("oracle over {f}"));
        let p_m = series_of(&parse("loop(prod(S(2),S(2)))").unwrap(), f, cap, false).unwrap();
        let fibre = series_of(
            &parse("loop(hsm(prod(loop(S(2)),loop(S(2))),wedge(S(2),S(2))))").unwrap(),
            f,
            cap,
            false,
        )
        .unwrap();
        let product = p_m.mul(&fibre).unwrap();
        c.eq(ints(&product), expected.clone(), &format!("loop-space product over {f}"));
    }
    let r = verify(TheoremId::Connsum, &json!({"M": "S2xS2", "N": "S2xS2"}), Some(cap), None).unwrap();
    c.check(r.pass, || r.summary_line());
    c.finish();
}

#[test]
fn criterion_3_ganea_and_dbard() {
    let mut c = Criterion::new(3, "Ganea and wedge-fibre identities", 5);
    let cap = 24;
    for a in 1..=3usize {
        for b in 1..=3usize {
            let expected = Ps::from(cap, &[(0, 1), (a, -1), (b, -1)]).inv().as_i64();
            for id in [TheoremId::Ganea, TheoremId::Dbard] {
                let r = verify(id, &json!({"a": a, "b": b}), Some(cap), Some(&[Q, F2])).unwrap();
                c.check(r.pass, || r.summary_line());
                for l in &r.lhs {
                    c.eq(ints(l), expected.clone(), &format!("{id} ({a},{b}) over {}", l.field));
                }
            }
        }
    }
    // Ω(P³(3) ∨ P³(3)) and Ω(P⁴(3) ∨ P⁴(3)) over F3.
    let ganea = verify(TheoremId::Ganea, &json!({"x": "P(3,3,1)", "y": "P(3,3,1)"}), Some(cap), Some(&[F3])).unwrap();
    c.check(ganea.pass, || ganea.summary_line());
    c.eq(ints(&ganea.lhs[0]), Ps::from(cap, &[(0, 1), (1, -2), (2, -2)]).inv().as_i64(), "Ganea Moore");
    let dbard = verify(TheoremId::Dbard, &json!({"X": "P(3,3,1)", "Y": "P(3,3,1)"}), Some(cap), Some(&[F3])).unwrap();
    c.check(dbard.pass, || dbard.summary_line());
    c.eq(ints(&dbard.lhs[0]), Ps::from(cap, &[(0, 1), (2, -2), (3, -2)]).inv().as_i64(), "dbard Moore");
    c.finish();
}

#[test]
fn criterion_4_pdex_consistency() {
    let mut c = Criterion::new(4, "stated cofibre of the mod-p example", 1);
    let cap = 6;
    // (P²∧P³) ∨ S⁵ ∨ P⁴ over F3: (t+t²)(t²+t³) + t⁵ + t³ + t⁴.
    let moore = |n: usize| Ps::from(cap, &[(n - 1, 1), (n, 1)]);
    let smash_part = moore(2).mul(&moore(3));
    let cases = [
        (2, Ps::from(cap, &[(5, 1)]).add(&moore(4))),
        (3, smash_part.add(&Ps::from(cap, &[(5, 1)])).add(&moore(4))),
    ];
    for (m, oracle) in &cases {
        let r = verify(TheoremId::Pdex, &json!({"p": 3, "r": 1, "n": 2, "m": m}), Some(cap), None).unwrap();
        c.check(r.pass, || r.summary_line());
        c.eq(r.fields_checked.clone(), vec![F3], "field");
        c.eq(ints(&r.lhs[0]), oracle.as_i64(), &format!("stated C-bar, m={m}"));
        c.eq(ints(&r.rhs[0]), oracle.as_i64(), &format!("cofibration C-bar, m={m}"));
    }
    c.eq(cases[0].1.as_i64(), vec![0, 0, 0, 1, 1, 1, 0], "t^3+t^4+t^5");
    c.eq(cases[1].1.as_i64(), vec![0, 0, 0, 2, 3, 2, 0], "2t^3+3t^4+2t^5");
    c.finish();
}

#[test]
fn criterion_5_rewrite_soundness() {
    let mut c = Criterion::new(5, "rewrite soundness, idempotence, monotone truncation", 120);
    let corpus = random_corpus(SUITE_SIZE, SUITE_SEED);
    c.eq(corpus.len(), 500, "corpus size");
    c.check(corpus.iter().all(|e| e.depth() <= 5), || "depth above 5".into());
    c.check(
        corpus.iter().all(loops_on_simply_connected),
        || "a loop has a non-simply-connected child".into(),
    );
    let report = rewrite_suite(&corpus);
    for f in &report.failures {
        c.failures.push(f.clone());
    }
    c.finish();
}

fn loops_on_simply_connected(e: &SpaceExpr) -> bool {
    let here = match e {
        SpaceExpr::Loop(child) => child.connectivity().finite().is_none_or(|c| c >= 1),
        _ => true,
    };
    here && e.children().into_iter().all(loops_on_simply_connected)
}

/// Every downward-closed family of nonempty subsets of `[m]`, as face lists.
fn complexes(m: usize) -> Vec<Vec<u32>> {
    let n = 1u32 << m;
    let mut out = Vec::new();
    for family in 0u64..(1u64 << (n - 1)) {
        let faces: Vec<u32> = (1..n).filter(|f| family & (1 << (f - 1)) != 0).collect();
        let set: BTreeSet<u32> = faces.iter().copied().collect();
        let closed = faces.iter().all(|&f| {
            (0..m).filter(|v| f & (1 << v) != 0).all(|v| {
                let g = f & !(1 << v);
                g == 0 || set.contains(&g)
            })
        });
        if closed {
            out.push(faces);
        }
    }
    out
}

fn verts(f: u32) -> Vec<usize> {
    (0..32).filter(|i| f & (1 << i) != 0).map(|i| i + 1).collect()
}

/// Minimal non-faces by brute force.
fn brute_missing(m: usize, faces: &[u32]) -> Vec<u32> {
    let set: BTreeSet<u32> = faces.iter().copied().chain([0]).collect();
    (1..(1u32 << m))
        .filter(|s| !set.contains(s) && (0..m).filter(|v| s & (1 << v) != 0).all(|v| set.contains(&(s & !(1 << v)))))
        .collect()
}

/// Checks additivity for `K` and `S` with `S²` entries against a direct face count.
fn check_additivity(c: &mut Criterion, k: &SimplicialComplex, s: &[Vec<usize>], cap: usize) {
    let m = k.m();
    let spheres = vec![SpaceExpr::sphere(2); m];
    let kbar = k.add_faces(s).unwrap();
    let diff = polyprod_series(&kbar, &spheres, Q, cap)
        .unwrap()
        .sub(&polyprod_series(k, &spheres, Q, cap).unwrap())
        .unwrap();
    let mut oracle = Ps::zero(cap);
    for sigma in s {
        oracle = oracle.add(&Ps::mono(cap, 2 * sigma.len(), 1));
    }
    c.eq(ints(&diff), oracle.as_i64(), &format!("additivity {k} + {s:?}"));
    let sum = missing_face_sum(s, &spheres, Q, cap).unwrap();
    c.eq(ints(&sum), oracle.as_i64(), &format!("face sum {k} + {s:?}"));
    let a = missing_face_wedge(k, s, &desuspend_entries(&spheres).unwrap()).unwrap();
    let sigma_a = series_of(&SpaceExpr::suspend(a, 1), Q, cap + 1, true).unwrap();
    let shifted = sigma_a.shift(1).unwrap().truncate(cap);
    c.eq(ints(&shifted), oracle.as_i64(), &format!("suspended cofibre {k} + {s:?}"));
}

/// Number of sequences `i_1 ≤ … ≤ i_k` from `dims` with `Σ dims[i_j] = d`.
fn count_sequences(dims: &[usize], start: usize, d: usize) -> i64 {
    if d == 0 {
        return 1;
    }
    (start..dims.len())
        .filter(|&i| dims[i] <= d)
        .map(|i| count_sequences(dims, i, d - dims[i]))
        .sum()
}

#[test]
fn criterion_6_polyhedral_suite() {
    let mut c = Criterion::new(6, "polyhedral products: additivity, domain series, missing faces", 60);
    let cap = 12;
    let mut checked = 0usize;
    for m in 1..=4 {
        for faces in complexes(m) {
            let list: Vec<Vec<usize>> = faces.iter().map(|&f| verts(f)).collect();
            let k = SimplicialComplex::new(m, &list).unwrap();
            let missing: Vec<u32> = brute_missing(m, &faces);
            let lib: BTreeSet<Vec<usize>> = k.missing_faces().into_iter().collect();
            let brute: BTreeSet<Vec<usize>> = missing.iter().map(|&f| verts(f)).collect();
            c.eq(lib, brute, &format!("missing faces of {k}"));
            let all: Vec<Vec<usize>> = missing.iter().map(|&f| verts(f)).collect();
            let kbar = k.add_faces(&all).unwrap();
            c.eq(kbar.face_count(), k.face_count() + all.len(), "face count after adding");
            for f in &all {
                c.check(kbar.contains(f) && !kbar.missing_faces().contains(f), || format!("{f:?} in {kbar}"));
            }
            let big: Vec<u32> = missing.iter().copied().filter(|f| f.count_ones() >= 2).collect();
            for mask in 1u64..(1u64 << big.len()) {
                let s: Vec<Vec<usize>> =
                    (0..big.len()).filter(|i| mask & (1 << i) != 0).map(|i| verts(big[i])).collect();
                check_additivity(&mut c, &k, &s, cap);
                checked += 1;
            }
        }
    }
    for (k, s) in sampled_complexes(200, 11) {
        check_additivity(&mut c, &k, &s, cap);
        checked += 1;
    }
    c.check(checked > 1000, || format!("only {checked} additivity instances"));

    let domain_cases = [
        (vec![1usize], 2usize),
        (vec![1, 1], 2),
        (vec![1, 2, 3], 1),
        (vec![2, 2, 3, 5], 1),
    ];
    for (dims, a) in domain_cases {
        let spaces: Vec<SpaceExpr> = dims.iter().map(|&d| SpaceExpr::sphere(d as u32)).collect();
        let a_expr = SpaceExpr::sphere(a as u32);
        let closed = polywh_domain_series(&spaces, &a_expr, Q, cap).unwrap();
        let (enumerated, summands) = polywh_domain_enumerated(&spaces, &a_expr, Q, cap).unwrap();
        let oracle: Vec<i64> =
            (0..=cap).map(|d| if d < a + 1 { 0 } else { count_sequences(&dims, 0, d - a - 1) }).collect();
        c.eq(ints(&closed), oracle.clone(), &format!("closed domain {dims:?}, a={a}"));
        c.eq(ints(&enumerated), oracle.clone(), &format!("enumerated domain {dims:?}, a={a}"));
        c.eq(summands.len() as i64, oracle.iter().sum::<i64>(), "one summand per sphere class");
        let spaces_text = dims.iter().map(|d| format!("S({d})")).collect::<Vec<_>>().join(",");
        let inst = json!({"spaces": spaces_text, "a": format!("S({a})")});
        for id in [TheoremId::Cpsi, TheoremId::PolywhDomain] {
            let r = verify(id, &inst, Some(cap), None).unwrap();
            c.check(r.pass, || r.summary_line());
        }
    }
    for (spaces, a, f) in [("P(2,2,1),S(1)", "P(3,2,1)", F2), ("P(2,3,1),P(3,3,1)", "S(2)", F3)] {
        let inst = json!({"spaces": spaces, "a": a});
        for id in [TheoremId::Cpsi, TheoremId::PolywhDomain] {
            let r = verify(id, &inst, Some(cap), Some(&[f])).unwrap();
            c.check(r.pass, || r.summary_line());
        }
    }
    c.finish();
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wedgecalc")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn criterion_7_cli_verify_levels() {
    let mut c = Criterion::new(7, "verify --all at quick and full levels", 600);
    let start = Instant::now();
    let (code, out) = run_cli(&["verify", "--all", "--level", "quick"]);
    let quick_time = start.elapsed();
    c.eq(code, 0, "quick exit code");
    c.check(quick_time < Duration::from_secs(30), || format!("quick took {quick_time:?}"));
    c.eq(out.lines().filter(|l| l.starts_with("PASS ")).count(), TheoremId::ALL.len(), "quick PASS lines");

    let (code, out) = run_cli(&["verify", "--all", "--level", "full", "--output", "json"]);
    c.eq(code, 0, "full exit code");
    let v: Value = serde_json::from_str(&out).expect("full run emits JSON");
    c.eq(v["pass"].clone(), json!(true), "full pass flag");
    let reports = v["reports"].as_array().cloned().unwrap_or_default();
    let count = |id: &str| reports.iter().filter(|r| r["theorem"] == id).count();
    let has = |id: &str, inst: Value| {
        reports.iter().any(|r| {
            r["theorem"] == id
                && inst.as_object().unwrap().iter().all(|(k, val)| &r["instance"][k] == val)
                && r["pass"] == json!(true)
        })
    };
    c.eq(count("MTYPEALT"), 27, "item 1 grid");
    c.check(reports.iter().filter(|r| r["theorem"] == "MTYPEALT").all(|r| r["cap"] == 12
        && r["fields_checked"].as_array().unwrap().len() == 3), || "item 1 caps/fields".into());
    c.check(has("CONNSUM", json!({"M": "S2xS2", "N": "S2xS2"})), || "item 2".into());
    for a in 1..=3 {
        for b in 1..=3 {
            for id in ["GANEA", "DBARD"] {
                c.check(has(id, json!({"a": a, "b": b, "cap": 24})), || format!("item 3 {id} ({a},{b})"));
            }
        }
    }
    c.check(has("GANEA", json!({"x": "P(3,3,1)", "y": "P(3,3,1)"})), || "item 3 Moore".into());
    c.check(has("DBARD", json!({"X": "P(3,3,1)", "Y": "P(3,3,1)"})), || "item 3 Moore".into());
    for m in [2, 3] {
        c.check(has("PDEX", json!({"p": 3, "r": 1, "n": 2, "m": m})), || format!("item 4 m={m}"));
    }
    let suite = &v["rewrite_suite"];
    c.eq(suite["expressions"].clone(), json!(500), "item 5 corpus");
    c.eq(suite["failures"].clone(), json!([]), "item 5 failures");
    c.check(count("PRELCOFIB") > 1000, || "item 6 additivity grid".into());
    c.check(count("CPSI") >= 6 && count("POLYWH_DOMAIN") >= 6, || "item 6 domain grid".into());
    c.eq(v["errors"].clone(), json!([]), "full errors");
    c.finish();
}

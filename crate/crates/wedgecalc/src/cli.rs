//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 input or usage error,
//! 3 budget exceeded.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::expr::{parse, parse_list, SpaceExpr};
use crate::freealg::{
    ad_relator, hilbert_product_formula, hilbert_quotient_oracle_with_budget, parse_relators,
    AlgError, GeneratorSet, DEFAULT_MATRIX_BUDGET,
};
use crate::rewrite::{normalize_with_trace, RewriteError};
use crate::series::{series_of, FieldTag, SeriesError};
use crate::simplicial::{
    desuspend_entries, missing_face_wedge, parse_face_list, polyprod_series, SimplicialComplex,
    SimplicialError,
};
use crate::theorems::{
    list_theorems, random_corpus, rewrite_suite, verify_all, verify_with_budget, Level, Outcome,
    TheoremError, TheoremId, SUITE_SEED, SUITE_SIZE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wedgecalc", version, about = "Wedge normal forms and loop-space homology series")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Column limit for the free-algebra linear algebra.
    #[arg(long, global = true, default_value_t = DEFAULT_MATRIX_BUDGET)]
    budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Oracle,
    Formula,
    Both,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 12)]
    cap: usize,
    /// `q` or `f<p>`.
    #[arg(long, default_value = "q")]
    field: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rewrite an expression to a wedge of spheres, Moore spaces and residues.
    Normalize {
        expr: String,
        #[arg(long, default_value_t = 12)]
        cap: usize,
        #[arg(long)]
        trace: bool,
    },
    /// Homology dimension series of an expression.
    Series {
        expr: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        reduced: bool,
    },
    /// Hilbert series of a quotient of a free algebra.
    Hilbert {
        #[arg(long)]
        gens: String,
        #[arg(long)]
        relators: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Mode::Oracle)]
        mode: Mode,
    },
    /// Homology series of a polyhedral product.
    Polyprod {
        #[arg(long)]
        complex: String,
        #[arg(long)]
        spaces: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        missing_faces: bool,
        /// JSON file holding a list of faces such as [[1,2],[2,3]].
        #[arg(long)]
        add_faces: Option<String>,
        #[arg(long)]
        sigma_a: bool,
    },
    /// Check named identities on their default or given instances.
    Verify {
        id: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        instance: Option<String>,
        #[arg(long, default_value = "quick")]
        level: String,
        #[arg(long)]
        cap: Option<usize>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Failure {
        let code = match e {
            SeriesError::CapOverflow { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<AlgError> for Failure {
    fn from(e: AlgError) -> Failure {
        let code = match e {
            AlgError::MatrixBudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<RewriteError> for Failure {
    fn from(e: RewriteError) -> Failure {
        let code = match e {
            RewriteError::BudgetExceeded(_) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SimplicialError> for Failure {
    fn from(e: SimplicialError) -> Failure {
        match e {
            SimplicialError::Series(s) => s.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

fn theorem_exit_code(e: &TheoremError) -> i32 {
    if e.is_budget() {
        EXIT_BUDGET
    } else if e.is_schema() {
        EXIT_USAGE
    } else {
        EXIT_FAIL
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }

    fn emit<T: Serialize>(&mut self, v: &T) {
        let text = serde_json::to_string_pretty(v).expect("serializable output");
        self.line(text);
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io {
        out,
        json: cli.output == Output::Json,
    };
    match dispatch(&cli, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> Result<i32, Failure> {
    match &cli.command {
        Command::Normalize { expr, cap, trace } => normalize_cmd(io, expr, *cap, *trace),
        Command::Series {
            expr,
            common,
            reduced,
        } => series_cmd(io, expr, common, *reduced),
        Command::Hilbert {
            gens,
            relators,
            common,
            mode,
        } => hilbert_cmd(io, gens, relators, common, *mode, cli.budget),
        Command::Polyprod {
            complex,
            spaces,
            common,
            missing_faces,
            add_faces,
            sigma_a,
        } => polyprod_cmd(io, complex, spaces, common, *missing_faces, add_faces.as_deref(), *sigma_a),
        Command::Verify {
            id,
            all,
            list,
            instance,
            level,
            cap,
        } => verify_cmd(io, id.as_deref(), *all, *list, instance.as_deref(), level, *cap, cli.budget),
    }
}

fn parse_expr(text: &str) -> Result<SpaceExpr, Failure> {
    let e = parse(text).map_err(|e| Failure::usage(e.to_string()))?;
    e.validate().map_err(Failure::usage)?;
    Ok(e)
}

fn parse_field(text: &str) -> Result<FieldTag, Failure> {
    text.parse().map_err(Failure::usage)
}

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))
}

fn normalize_cmd(io: &mut Io, text: &str, cap: usize, trace: bool) -> Result<i32, Failure> {
    let e = parse_expr(text)?;
    let (nf, steps) = normalize_with_trace(&e, cap)?;
    if io.json {
        let mut v = json!({
            "input": e.render(),
            "cap": cap,
            "normal_form": nf,
            "expr": nf.to_expr().render(),
        });
        if trace {
            v["trace"] = serde_json::to_value(&steps).expect("serializable trace");
        }
        io.emit(&v);
    } else {
        if trace {
            for s in &steps {
                io.line(s.to_line());
            }
        }
        io.line(nf.to_expr().render());
        io.line(format!("complete: {}", nf.complete));
    }
    Ok(EXIT_OK)
}

fn series_cmd(io: &mut Io, text: &str, common: &Common, reduced: bool) -> Result<i32, Failure> {
    let e = parse_expr(text)?;
    let field = parse_field(&common.field)?;
    let s = series_of(&e, field, common.cap, reduced)?;
    if io.json {
        io.emit(&s);
    } else {
        io.line(s.to_poly_string());
    }
    Ok(EXIT_OK)
}

/// `(m, n, k)` when the single relator is `ad^k(x)(y)` on generators `x, y`.
fn ad_shape(gens: &GeneratorSet, rels: &[crate::freealg::NcPolynomial]) -> Option<(u32, u32, u32)> {
    if gens.len() != 2 || rels.len() != 1 {
        return None;
    }
    let r = &rels[0];
    let deg = r.degree(gens)?;
    for (x, y) in [(0, 1), (1, 0)] {
        let (m, n) = (gens.degree(x), gens.degree(y));
        if deg > n && (deg - n) % m == 0 {
            let k = (deg - n) / m;
            let ad = ad_relator(k, x, y);
            if *r == ad || *r == ad.scale(&(-1).into()) {
                return Some((m, n, k));
            }
        }
    }
    None
}

fn hilbert_cmd(
    io: &mut Io,
    gens: &str,
    relators: &str,
    common: &Common,
    mode: Mode,
    budget: usize,
) -> Result<i32, Failure> {
    let field = parse_field(&common.field)?;
    let cap = common.cap;
    let g = GeneratorSet::parse(gens)?;
    let rels = parse_relators(relators, &g)?;
    let oracle = match mode {
        Mode::Formula => None,
        _ => Some(hilbert_quotient_oracle_with_budget(&g, &rels, field, cap, budget)?),
    };
    let formula = match mode {
        Mode::Oracle => None,
        _ => {
            let (m, n, k) = ad_shape(&g, &rels).ok_or_else(|| {
                Failure::usage("formula mode needs a single relator ad(k;x,y) on two generators")
            })?;
            Some(hilbert_product_formula(m, n, k, field, cap))
        }
    };
    let agree = match (&oracle, &formula) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    if io.json {
        let mut v = json!({"gens": g.to_string(), "relators": relators, "field": field, "cap": cap});
        if let Some(s) = &oracle {
            v["oracle"] = serde_json::to_value(s).expect("serializable");
        }
        if let Some(s) = &formula {
            v["formula"] = serde_json::to_value(s).expect("serializable");
        }
        if let Some(a) = agree {
            v["agree"] = json!(a);
        }
        io.emit(&v);
    } else {
        match (&oracle, &formula) {
            (Some(s), None) | (None, Some(s)) => io.line(s.to_poly_string()),
            (Some(a), Some(b)) => {
                io.line(format!("oracle: {}", a.to_poly_string()));
                io.line(format!("formula: {}", b.to_poly_string()));
                io.line(format!("agree: {}", agree == Some(true)));
            }
            (None, None) => unreachable!("every mode computes something"),
        }
    }
    Ok(if agree == Some(false) { EXIT_FAIL } else { EXIT_OK })
}

fn faces_json(faces: &[Vec<usize>]) -> Value {
    json!(faces)
}

fn faces_text(faces: &[Vec<usize>]) -> String {
    let parts: Vec<String> = faces
        .iter()
        .map(|f| format!("{{{}}}", f.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    if parts.is_empty() {
        "none".to_string()
    } else {
        parts.join(" ")
    }
}

fn polyprod_cmd(
    io: &mut Io,
    complex: &str,
    spaces: &str,
    common: &Common,
    show_missing: bool,
    add_faces: Option<&str>,
    sigma_a: bool,
) -> Result<i32, Failure> {
    let field = parse_field(&common.field)?;
    let cap = common.cap;
    let base = SimplicialComplex::from_json(&read_file(complex)?)?;
    let xs = parse_list(spaces).map_err(|e| Failure::usage(e.to_string()))?;
    for x in &xs {
        x.validate().map_err(Failure::usage)?;
    }
    let added = match add_faces {
        Some(path) => Some(parse_face_list(&read_file(path)?)?),
        None => None,
    };
    let k = match &added {
        Some(s) => base.add_faces(s)?,
        None => base.clone(),
    };
    let s = polyprod_series(&k, &xs, field, cap)?;
    let missing = show_missing.then(|| k.missing_faces());
    let sigma = if sigma_a {
        let faces = added
            .as_ref()
            .ok_or_else(|| Failure::usage("--sigma-a needs --add-faces"))?;
        let a = missing_face_wedge(&base, faces, &desuspend_entries(&xs)?)?;
        let sa = SpaceExpr::suspend(a, 1);
        let series = series_of(&sa, field, cap, true)?;
        Some((sa, series))
    } else {
        None
    };
    if io.json {
        let mut v = json!({
            "complex": k.to_json(),
            "spaces": xs.iter().map(SpaceExpr::render).collect::<Vec<_>>(),
            "field": field,
            "cap": cap,
            "series": s,
        });
        if let Some(m) = &missing {
            v["missing_faces"] = faces_json(m);
        }
        if let Some((e, series)) = &sigma {
            v["sigma_a"] = json!({"expr": e.render(), "series": series});
        }
        io.emit(&v);
    } else {
        io.line(s.to_poly_string());
        if let Some(m) = &missing {
            io.line(format!("missing faces: {}", faces_text(m)));
        }
        if let Some((e, series)) = &sigma {
            io.line(format!("sigma-A: {}", e.render()));
            io.line(format!("sigma-A series: {}", series.to_poly_string()));
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn verify_cmd(
    io: &mut Io,
    id: Option<&str>,
    all: bool,
    list: bool,
    instance: Option<&str>,
    level: &str,
    cap: Option<usize>,
    budget: usize,
) -> Result<i32, Failure> {
    if list {
        let rows = list_theorems();
        if io.json {
            io.emit(&rows);
        } else {
            for r in rows {
                io.line(format!("{}\t{}\t{}", r.id, r.schema, r.anchor));
            }
        }
        return Ok(EXIT_OK);
    }
    let level: Level = level.parse().map_err(Failure::usage)?;
    let run_suite = all && level == Level::Full;
    let outcomes: Vec<Outcome> = match (id, all) {
        (Some(_), true) => return Err(Failure::usage("give either an id or --all, not both")),
        (None, false) => return Err(Failure::usage("give a theorem id or --all")),
        (None, true) => {
            if instance.is_some() {
                return Err(Failure::usage("--instance needs a single theorem id"));
            }
            verify_all(&TheoremId::ALL, level, cap, budget)
        }
        (Some(id), false) => {
            let id: TheoremId = id.parse().map_err(Failure::usage)?;
            match instance {
                None => verify_all(&[id], level, cap, budget),
                Some(path) => {
                    let v: Value = serde_json::from_str(&read_file(path)?)
                        .map_err(|e| Failure::usage(format!("invalid instance JSON: {e}")))?;
                    let items = match v {
                        Value::Array(items) => items,
                        other => vec![other],
                    };
                    items
                        .into_iter()
                        .map(|inst| Outcome {
                            id,
                            result: verify_with_budget(id, &inst, cap, None, budget),
                            instance: inst,
                        })
                        .collect()
                }
            }
        }
    };
    let mut code = EXIT_OK;
    let rank = |c: i32| match c {
        EXIT_USAGE => 3,
        EXIT_BUDGET => 2,
        EXIT_FAIL => 1,
        _ => 0,
    };
    let mut bump = |c: i32| {
        if rank(c) > rank(code) {
            code = c;
        }
    };
    let (mut passed, mut failed) = (0usize, 0usize);
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for o in &outcomes {
        match &o.result {
            Ok(r) => {
                if r.pass {
                    passed += 1;
                } else {
                    failed += 1;
                    bump(EXIT_FAIL);
                }
                if !io.json {
                    io.line(r.summary_line());
                }
                reports.push(r);
            }
            Err(e) => {
                failed += 1;
                bump(theorem_exit_code(e));
                if !io.json {
                    io.line(format!("ERROR {} {}: {e}", o.id, o.instance));
                }
                errors.push(json!({"theorem": o.id, "instance": o.instance, "error": e.to_string()}));
            }
        }
    }
    let suite = run_suite.then(|| rewrite_suite(&random_corpus(SUITE_SIZE, SUITE_SEED)));
    if let Some(s) = &suite {
        if s.pass() {
            passed += 1;
        } else {
            failed += 1;
            bump(EXIT_FAIL);
        }
        if !io.json {
            io.line(s.summary_line());
        }
    }
    if io.json {
        let mut v = json!({
            "pass": code == EXIT_OK,
            "passed": passed,
            "failed": failed,
            "reports": reports,
            "errors": errors,
        });
        if let Some(s) = &suite {
            v["rewrite_suite"] = serde_json::to_value(s).expect("serializable");
        }
        io.emit(&v);
    } else {
        io.line(format!("{passed} passed, {failed} failed"));
    }
    Ok(code)
}

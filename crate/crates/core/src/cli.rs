//! The `excalc` command line. Exit codes: 0 for a proof or a valid result,
//! 1 for a disproof or a violation, 2 for usage and parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::deduction::{DeductionError, Store};
use crate::dsl;
use crate::fuzz;
use crate::model::{self, AuditReport, Evaluator, FiniteModel, ModelError};
use crate::syntax::{Equation, Logic, Specification};
use crate::translate::{self, Expansion};

#[derive(Parser, Debug)]
#[command(name = "excalc", version, about = "Deduction and model checking for specifications with exceptions")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a specification and report well-formedness.
    Check { file: PathBuf },
    /// Decide an equation `lhs == rhs`.
    Prove {
        file: PathBuf,
        equation: String,
        /// Print the proof steps.
        #[arg(long)]
        trace: bool,
        /// Bound on nested proof goals.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Print a decorated specification in another logic.
    Translate {
        file: PathBuf,
        #[arg(long, conflicts_with = "expand", required_unless_present = "expand")]
        undecorate: bool,
        #[arg(long)]
        expand: bool,
        /// Precede the output with one comment per generated item.
        #[arg(long)]
        provenance: bool,
    },
    /// Evaluate a term at an element of a model.
    Eval {
        spec: PathBuf,
        model: PathBuf,
        term: String,
        element: String,
    },
    /// Check derived equations in a model, or in every small model.
    Audit {
        /// A specification, or a directory of `.deco` files.
        spec: PathBuf,
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_carrier: usize,
        /// Most candidate models enumerated before falling back to a
        /// smaller bound plus a random sample.
        #[arg(long, default_value_t = 2000)]
        cap: u128,
        #[arg(long, default_value_t = fuzz::DEFAULT_SEED)]
        seed: u64,
        /// Extra equations to prove and audit.
        #[arg(long = "eq")]
        equations: Vec<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Write a corpus of random decorated specifications.
    Fuzz {
        #[arg(long, default_value_t = fuzz::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn violation(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let res = match cli.command {
        Command::Check { ref file } => check(file, cli.format, out),
        Command::Prove {
            ref file,
            ref equation,
            trace,
            depth,
        } => prove(file, equation, trace, depth, cli.format, out),
        Command::Translate {
            ref file,
            undecorate,
            expand: _,
            provenance,
        } => translate_cmd(file, undecorate, provenance, out),
        Command::Eval {
            ref spec,
            ref model,
            ref term,
            ref element,
        } => eval(spec, model, term, element, cli.format, out, err),
        Command::Audit {
            ref spec,
            ref model,
            max_carrier,
            cap,
            seed,
            ref equations,
            depth,
        } => audit(
            spec,
            model.as_deref(),
            &AuditOptions {
                max_carrier,
                cap,
                seed,
                equations: equations.clone(),
                depth,
            },
            cli.format,
            out,
        ),
        Command::Fuzz { seed, count, ref out } => fuzz_cmd(seed, count, out, &mut *err),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Specification, Failure> {
    let src = read(path)?;
    dsl::parse(&src).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn check(file: &Path, format: Format, out: &mut dyn Write) -> Outcome {
    let src = read(file)?;
    let parsed = dsl::parse_with_notes(&src).map_err(|e| Failure::usage(format!("{}:{e}", file.display())))?;
    let report = crate::syntax::well_formed(&parsed.spec);
    // the builder and the checker can both notice the same thing
    let mut notes: Vec<String> = parsed.notes.clone();
    for n in &report.notes {
        if !notes.contains(n) {
            notes.push(n.clone());
        }
    }
    if format == Format::Json {
        let v = json!({
            "logic": parsed.spec.logic.as_str(),
            "valid": report.is_empty(),
            "violations": report.violations,
            "notes": notes,
        });
        let _ = writeln!(out, "{v:#}");
    } else {
        for v in &report.violations {
            let _ = writeln!(out, "violation: {v}");
        }
        for n in &notes {
            let _ = writeln!(out, "note: {n}");
        }
        if report.is_empty() {
            let _ = writeln!(out, "ok: {} specification", parsed.spec.logic.as_str());
        }
    }
    Ok(if report.is_empty() { 0 } else { 1 })
}

fn prove(
    file: &Path,
    equation: &str,
    trace: bool,
    depth: Option<usize>,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let spec = load(file)?;
    let (l, r) = dsl::parse_equation(&spec, equation).map_err(|e| Failure::usage(format!("in the equation: {e}")))?;
    let mut st = Store::new(spec);
    if let Some(d) = depth {
        st.depth = d;
    }
    let (verdict, code, proof) = match st.equiv(&l, &r) {
        Ok(p) if p.is_yes() => ("YES", 0, Some(p)),
        Ok(p) => ("NO-WITHIN-BOUND", 1, Some(p)),
        Err(DeductionError::DepthExceeded(d)) => {
            let _ = d;
            ("NO-WITHIN-BOUND", 1, None)
        }
        Err(e) => return Err(Failure::usage(e.to_string())),
    };
    if format == Format::Json {
        let v = json!({
            "verdict": verdict,
            "bound_reached": proof.is_none(),
            "goals": proof.as_ref().map(|p| p.goals),
            "trace": proof.as_ref().map(|p| p.trace.to_json(&st)),
        });
        let _ = writeln!(out, "{v:#}");
    } else {
        match &proof {
            None => {
                let _ = writeln!(out, "{verdict} (search bound {} reached)", st.depth);
            }
            Some(_) => {
                let _ = writeln!(out, "{verdict}");
            }
        }
        if trace {
            if let Some(p) = &proof {
                let _ = write!(out, "{}", p.trace.render_text(&st));
            }
        }
    }
    Ok(code)
}

fn translate_cmd(file: &Path, undecorate: bool, provenance: bool, out: &mut dyn Write) -> Outcome {
    let spec = load(file)?;
    let res = if undecorate {
        translate::undecorate(&spec)
    } else {
        translate::expand(&spec)
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    if provenance {
        for p in &res.provenance {
            let _ = writeln!(out, "# {p}");
        }
    }
    let _ = write!(out, "{}", dsl::print_spec(&res.target));
    Ok(0)
}

fn model_error(e: ModelError) -> Failure {
    match e {
        ModelError::Undefined(..) | ModelError::EmptySourceUnreachable => Failure::violation(e.to_string()),
        _ => Failure::usage(e.to_string()),
    }
}

fn load_model(store: &mut Store, path: &Path, err: &mut dyn Write) -> Result<FiniteModel, Failure> {
    let text = read(path)?;
    let m = model::parse_model(store, &text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let report = model::validate_model(store, &m);
    for n in &report.notes {
        let _ = writeln!(err, "note: {n}");
    }
    if !report.is_valid() {
        let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure::violation(format!("invalid model:\n  {}", lines.join("\n  "))));
    }
    Ok(m)
}

fn eval(
    spec_path: &Path,
    model_path: &Path,
    term: &str,
    element: &str,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let spec = load(spec_path)?;
    let t = dsl::parse_term(&spec, term, None).map_err(|e| Failure::usage(format!("in the term: {e}")))?;
    let (mut store, t) = if spec.logic == Logic::Decorated {
        let mut x = Expansion::new(Store::new(spec)).map_err(|e| Failure::usage(e.to_string()))?;
        let image = x.term(&t).map_err(|e| Failure::usage(e.to_string()))?;
        (x.expl, image)
    } else {
        (Store::new(spec), t)
    };
    let m = load_model(&mut store, model_path, err)?;
    let (src, tgt) = store.signature(&t).map_err(|e| Failure::usage(e.to_string()))?;
    let mut ev = Evaluator::new(&mut store, &m);
    let x = ev.element(&src, element).map_err(model_error)?;
    let v = ev.apply(&t, &x).map_err(model_error)?;
    let shown = ev.show_tagged(&tgt, &v);
    if format == Format::Json {
        let _ = writeln!(out, "{:#}", json!({ "value": shown }));
    } else {
        let _ = writeln!(out, "{shown}");
    }
    Ok(0)
}

struct AuditOptions {
    max_carrier: usize,
    cap: u128,
    seed: u64,
    equations: Vec<String>,
    depth: Option<usize>,
}

/// Proves the theorem instances of a decorated specification, and the
/// extra equations, and returns the store holding what was derived along
/// with the extra equations that were not proved.
pub fn derive(spec: &Specification, extra: &[String], depth: Option<usize>) -> Result<(Store, Vec<String>), String> {
    let mut st = Store::new(spec.clone());
    if let Some(d) = depth {
        st.depth = d;
    }
    let goals = fuzz::theorem_goals(spec, 4);
    let texts = goals.iter().flat_map(|g| g.premise.iter().chain(std::iter::once(&g.text)));
    for text in texts {
        let (l, r) = dsl::parse_equation(spec, text).map_err(|e| format!("`{text}`: {e}"))?;
        // an unproved goal is simply not audited
        let _ = st.equiv(&l, &r);
    }
    let mut unproved = Vec::new();
    for text in extra {
        let (l, r) = dsl::parse_equation(spec, text).map_err(|e| format!("`{text}`: {e}"))?;
        if !st.equiv(&l, &r).is_ok_and(|p| p.is_yes()) {
            unproved.push(text.clone());
        }
    }
    Ok((st, unproved))
}

fn audit_file(path: &Path, model_path: Option<&Path>, o: &AuditOptions, err: &mut dyn Write) -> Result<AuditReport, Failure> {
    let spec = load(path)?;
    if spec.logic != Logic::Decorated {
        return audit_plain(spec, model_path, o, err);
    }
    let (st, unproved) = derive(&spec, &o.equations, o.depth).map_err(Failure::usage)?;
    let mut eqs: Vec<Equation> = spec.axioms.clone();
    eqs.extend(st.derived().iter().cloned());
    let mut x = Expansion::new(st).map_err(|e| Failure::usage(e.to_string()))?;
    let (models, note) = match model_path {
        Some(mp) => (vec![load_model(&mut x.expl, mp, err)?], None),
        None => {
            let set = model::models_for(&x.expl, o.max_carrier, o.cap, 30, o.seed);
            let note = set.describe(o.max_carrier);
            (set.models, Some(note))
        }
    };
    let mut r = model::audit_models(&mut x, &eqs, &models);
    r.notes.extend(unproved.iter().map(|e| format!("not derived, so not audited: {e}")));
    r.notes.extend(note);
    Ok(r)
}

/// For a basic or explicit specification there is nothing to expand: the
/// report lists how many models there are and which types are empty in
/// all of them.
fn audit_plain(spec: Specification, model_path: Option<&Path>, o: &AuditOptions, err: &mut dyn Write) -> Result<AuditReport, Failure> {
    let mut st = Store::new(spec.clone());
    let models = match model_path {
        Some(mp) => vec![load_model(&mut st, mp, err)?],
        None => model::enumerate_models(&st, o.max_carrier, o.cap)
            .map_err(|e| Failure::usage(e.to_string()))?
            .collect(),
    };
    let mut r = AuditReport::default();
    r.notes.push(format!("{} models with carriers up to {}", models.len(), o.max_carrier));
    for t in &spec.types {
        if models.iter().all(|m| m.carrier(t).is_none_or(|c| c.is_empty())) {
            r.notes.push(format!("{t} is empty in every model"));
        }
    }
    Ok(r)
}

fn audit(
    target: &Path,
    model_path: Option<&Path>,
    o: &AuditOptions,
    format: Format,
    out: &mut dyn Write,
) -> Outcome {
    let files: Vec<PathBuf> = if target.is_dir() {
        let mut v: Vec<PathBuf> = std::fs::read_dir(target)
            .map_err(|e| Failure::usage(format!("{}: {e}", target.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "deco"))
            .collect();
        v.sort();
        v
    } else {
        vec![target.to_path_buf()]
    };
    let mut failures = 0;
    let mut reports = Vec::new();
    let mut sink = Vec::new();
    for f in &files {
        let r = audit_file(f, model_path, o, &mut sink)?;
        failures += r.failures();
        reports.push((f.display().to_string(), r));
    }
    if format == Format::Json {
        let files: Vec<_> = reports
            .iter()
            .map(|(f, r)| {
                json!({
                    "file": f,
                    "entries": r.entries.iter().map(|e| json!({
                        "index": e.index,
                        "equation": e.equation,
                        "holds": e.holds,
                        "detail": e.detail,
                    })).collect::<Vec<_>>(),
                    "notes": r.notes,
                })
            })
            .collect();
        let _ = writeln!(out, "{:#}", json!({ "files": files, "failures": failures }));
    } else {
        for (f, r) in &reports {
            if reports.len() > 1 {
                let _ = writeln!(out, "== {f}");
            }
            let _ = write!(out, "{}", r.render());
        }
        if reports.len() > 1 {
            let _ = writeln!(out, "files: {}\ntotal failures: {failures}", reports.len());
        }
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn fuzz_cmd(seed: u64, count: usize, dir: &Path, err: &mut dyn Write) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    for (name, text) in fuzz::corpus(seed, count) {
        let p = dir.join(&name);
        std::fs::write(&p, format!("# seed {seed}\n{text}"))
            .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
    }
    let _ = writeln!(err, "wrote {count} specifications to {}", dir.display());
    Ok(0)
}

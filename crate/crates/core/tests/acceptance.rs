//! One test per acceptance criterion. Each prints a single PASS or FAIL
//! line; 4, 5 and 6 share one pass over the fuzz corpus.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use excalc::deduction::{replay, Store, Trace};
use excalc::dsl;
use excalc::fuzz::{corpus, theorem_goals, GoalKind, DEFAULT_SEED};
use excalc::model::{audit_models, enumerate_models, models_for};
use excalc::syntax::{Decoration, Equation, Origin};
use excalc::translate::{self, Expansion};

const FUZZ_SPECS: usize = 200;
const MAX_CARRIER: usize = 3;
const CAP: u128 = 2_000;
const SAMPLE: usize = 30;

fn corpus_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn excalc(args: &[&str]) -> (i32, String, Duration) {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_excalc"))
        .args(args)
        .output()
        .expect("the binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        t.elapsed(),
    )
}

fn report(n: u32, title: &str, res: Result<String, String>) {
    match res {
        Ok(detail) => println!("criterion {n} PASS {title}: {detail}"),
        Err(why) => {
            println!("criterion {n} FAIL {title}: {why}");
            panic!("criterion {n} failed: {why}");
        }
    }
}

#[test]
fn criterion_1_predecessor_derivations() {
    let file = corpus_file("nat.basic");
    let file = file.to_str().unwrap();
    let res = (|| {
        let mut times = Vec::new();
        for eq in ["p . z == z", "p . s == id(Nat)"] {
            let (code, out, took) = excalc(&["prove", file, eq]);
            if code != 0 {
                return Err(format!("`{eq}` exited {code}: {out}"));
            }
            if took >= Duration::from_secs(1) {
                return Err(format!("`{eq}` took {took:?}"));
            }
            times.push(format!("{took:?}"));
        }
        Ok(format!("both YES in {}", times.join(" and ")))
    })();
    report(1, "predecessor derivations", res);
}

/// Index of the first line at or after `from` satisfying `pred`.
fn find(lines: &[&str], from: usize, pred: impl Fn(&str) -> bool) -> Option<usize> {
    (from..lines.len()).find(|&i| pred(lines[i]))
}

#[test]
fn criterion_2_flagship_proof() {
    let file = corpus_file("nat.deco");
    let res = (|| {
        let (code, out, took) = excalc(&["prove", file.to_str().unwrap(), "p'' == p", "--trace"]);
        if code != 0 || !out.starts_with("YES") {
            return Err(format!("exit {code}: {out}"));
        }
        if took >= Duration::from_secs(1) {
            return Err(format!("took {took:?}"));
        }
        let lines: Vec<&str> = out.lines().collect();
        let a = find(&lines, 0, |l| {
            l.contains("inverse image of Nat = Nat + 0")
                && l.contains("along p': Nat = Nat + Unit with coprojections s, z")
        })
        .ok_or("no inverse image of Nat = Nat + 0 along p'")?;
        let b = find(&lines, a, |l| {
            l.contains("unfold-case-t") && l.contains("~> [s => id(Nat) | z => case^e t of [t => z]]")
        })
        .ok_or("no case^t unfolding to [s => id | z => w]")?;
        let c = find(&lines, b, |l| {
            l.contains("exceptional inverse image") && l.contains("along t") && l.contains("restrictions id(Unit)")
        })
        .ok_or("no exceptional inverse image of t")?;
        let c2 = find(&lines, c, |l| l.contains("~> [s => id(Nat) | z => z]"))
            .ok_or("w is not reduced to z")?;
        let d = find(&lines, c2, |l| l.contains("match-uniqueness"))
            .ok_or("no match uniqueness step")?;
        Ok(format!("YES in {took:?}, phases at trace lines {}, {}, {}, {}", a + 1, b + 1, c + 1, d + 1))
    })();
    report(2, "flagship proof", res);
}

#[test]
fn criterion_3_explicit_model_values() {
    let spec = corpus_file("nat.deco");
    let model = corpus_file("mnat.model");
    let res = (|| {
        let mut checked = 0;
        for n in 0..=9u32 {
            let pre = if n == 0 { "Nat:0".to_string() } else { format!("Nat:{}", n - 1) };
            let pre1 = if n == 0 { "E:ε".to_string() } else { format!("Nat:{}", n - 1) };
            for (term, want) in [("p", &pre), ("p'", &pre1), ("p''", &pre)] {
                let mut out = Vec::new();
                let mut err = Vec::new();
                let code = excalc::cli::run(
                    ["excalc", "eval", spec.to_str().unwrap(), model.to_str().unwrap(), term, &n.to_string()],
                    &mut out,
                    &mut err,
                );
                let got = String::from_utf8_lossy(&out).trim().to_string();
                if code != 0 || got != *want {
                    return Err(format!(
                        "{term}({n}) = `{got}` (exit {code}, {}), expected {want}",
                        String::from_utf8_lossy(&err).trim()
                    ));
                }
                checked += 1;
            }
        }
        Ok(format!("{checked} values match"))
    })();
    report(3, "explicit model values", res);
}

#[derive(Default)]
struct Tally {
    proved: usize,
    not_proved: Vec<String>,
    audited: usize,
    audit_failures: Vec<String>,
}

#[derive(Default)]
struct FuzzRun {
    specs: usize,
    by_kind: BTreeMap<&'static str, Tally>,
    derived: usize,
    derived_failures: Vec<String>,
    models: usize,
    truncated: usize,
    handle_traces: usize,
    replay_failures: Vec<String>,
    errors: Vec<String>,
    elapsed: Duration,
}

/// Proves every theorem instance of every corpus specification, then checks
/// the instances and everything else the engine derived in the small
/// explicit models of the expansion.
fn fuzz_run() -> &'static FuzzRun {
    static RUN: OnceLock<FuzzRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let t0 = Instant::now();
        let mut run = FuzzRun::default();
        for (name, text) in corpus(DEFAULT_SEED, FUZZ_SPECS) {
            run.specs += 1;
            let spec = match dsl::parse(&text) {
                Ok(s) => s,
                Err(e) => {
                    run.errors.push(format!("{name}: {e}"));
                    continue;
                }
            };
            let mut st = Store::new(spec.clone());
            let mut goal_eqs: Vec<(GoalKind, Equation)> = Vec::new();
            let mut traces: Vec<(String, Trace)> = Vec::new();
            for g in theorem_goals(&spec, 4) {
                let tally = run.by_kind.entry(g.kind.as_str()).or_default();
                let parsed = g
                    .premise
                    .iter()
                    .chain(std::iter::once(&g.text))
                    .map(|t| dsl::parse_equation(&spec, t))
                    .collect::<Result<Vec<_>, _>>();
                let eqs = match parsed {
                    Ok(e) => e,
                    Err(e) => {
                        tally.not_proved.push(format!("{name}: {}: {e}", g.text));
                        continue;
                    }
                };
                let mut all_yes = true;
                for (l, r) in &eqs {
                    match st.equiv(l, r) {
                        Ok(p) if p.is_yes() => {
                            if g.kind != GoalKind::Propagation {
                                traces.push((g.text.clone(), p.trace));
                            }
                        }
                        Ok(_) => all_yes = false,
                        Err(e) => {
                            tally.not_proved.push(format!("{name}: {}: {e}", g.text));
                            all_yes = false;
                        }
                    }
                }
                if all_yes {
                    tally.proved += 1;
                    let (l, r) = eqs.last().expect("the goal itself").clone();
                    goal_eqs.push((
                        g.kind,
                        Equation {
                            lhs: l,
                            rhs: r,
                            level: Decoration::Computation,
                            origin: Origin::Derived,
                        },
                    ));
                } else {
                    tally.not_proved.push(format!("{name}: {}", g.text));
                }
            }

            let mut basic = st.undecorated();
            for (text, tr) in &traces {
                run.handle_traces += 1;
                if let Err(e) = replay(&mut basic, tr) {
                    run.replay_failures.push(format!("{name}: {text}: {e}"));
                }
            }

            let derived: Vec<Equation> = st.derived().to_vec();
            let mut x = match Expansion::new(st) {
                Ok(x) => x,
                Err(e) => {
                    run.errors.push(format!("{name}: expansion: {e}"));
                    continue;
                }
            };
            let set = models_for(&x.expl, MAX_CARRIER, CAP, SAMPLE, DEFAULT_SEED);
            run.models += set.models.len();
            if !set.exhaustive {
                run.truncated += 1;
            }
            let mut eqs: Vec<Equation> = goal_eqs.iter().map(|(_, e)| e.clone()).collect();
            eqs.extend(derived.iter().cloned());
            let audit = audit_models(&mut x, &eqs, &set.models);
            for (i, entry) in audit.entries.iter().enumerate() {
                let line = format!("{name}: {} ({})", entry.equation, entry.detail);
                if let Some((kind, _)) = goal_eqs.get(i) {
                    let tally = run.by_kind.entry(kind.as_str()).or_default();
                    tally.audited += 1;
                    if !entry.holds {
                        tally.audit_failures.push(line);
                    }
                } else {
                    run.derived += 1;
                    if !entry.holds {
                        run.derived_failures.push(line);
                    }
                }
            }
        }
        run.elapsed = t0.elapsed();
        run
    })
}

fn kind_summary(run: &FuzzRun, kinds: &[GoalKind]) -> Result<String, String> {
    if !run.errors.is_empty() {
        return Err(format!("{} corpus errors, first: {}", run.errors.len(), run.errors[0]));
    }
    let mut parts = Vec::new();
    for k in kinds {
        let t = run
            .by_kind
            .get(k.as_str())
            .ok_or(format!("no {} instance in the corpus", k.as_str()))?;
        if let Some(f) = t.not_proved.first() {
            return Err(format!("{} {} not proved, first: {f}", t.not_proved.len(), k.as_str()));
        }
        if let Some(f) = t.audit_failures.first() {
            return Err(format!("{} {} fail in a model, first: {f}", t.audit_failures.len(), k.as_str()));
        }
        if t.proved == 0 {
            return Err(format!("no {} instance in the corpus", k.as_str()));
        }
        parts.push(format!("{} {} YES and HOLDS", t.proved, k.as_str()));
    }
    Ok(parts.join(", "))
}

#[test]
fn criterion_4_propagation() {
    let run = fuzz_run();
    let res = kind_summary(run, &[GoalKind::Propagation]).and_then(|s| {
        if run.elapsed >= Duration::from_secs(60) {
            return Err(format!("fuzz pass took {:?}", run.elapsed));
        }
        Ok(format!("{s} over {} specs, {} models, {:?}", run.specs, run.models, run.elapsed))
    });
    report(4, "propagation", res);
}

#[test]
fn criterion_5_handling() {
    let run = fuzz_run();
    let res = kind_summary(
        run,
        &[
            GoalKind::HandleCongruence,
            GoalKind::HandleValue,
            GoalKind::HandleRaise,
            GoalKind::HandleCaught,
            GoalKind::HandleUncaught,
        ],
    );
    report(5, "handling", res);
}

#[test]
fn criterion_6_soundness_audit() {
    let run = fuzz_run();
    let res = if let Some(f) = run.derived_failures.first() {
        Err(format!("{} derived equations fail, first: {f}", run.derived_failures.len()))
    } else if !run.errors.is_empty() {
        Err(format!("{} corpus errors, first: {}", run.errors.len(), run.errors[0]))
    } else {
        Ok(format!(
            "{} derived equations hold in {} models; {} of {} specs over the cap of {CAP} candidates \
             were checked exhaustively at a smaller bound plus {SAMPLE} sampled models",
            run.derived, run.models, run.truncated, run.specs
        ))
    };
    report(6, "soundness audit", res);
}

#[test]
fn criterion_7_undecoration() {
    let run = fuzz_run();
    let res = (|| {
        // the flagship trace
        let spec = dsl::parse(&std::fs::read_to_string(corpus_file("nat.deco")).unwrap()).unwrap();
        let mut st = Store::new(spec.clone());
        let (l, r) = dsl::parse_equation(&spec, "p'' == p").unwrap();
        let proof = st.equiv(&l, &r).map_err(|e| e.to_string())?;
        replay(&mut st.undecorated(), &proof.trace).map_err(|e| format!("flagship trace: {e}"))?;
        if let Some(f) = run.replay_failures.first() {
            return Err(format!("{} handling traces fail to replay, first: {f}", run.replay_failures.len()));
        }

        let basic = translate::undecorate(&spec).map_err(|e| e.to_string())?;
        let printed = dsl::print_spec(&basic.target);
        if !printed.contains("fun t : Unit -> 0;") {
            return Err("the undecorated specification lacks t : Unit -> 0".into());
        }
        let store = Store::new(basic.target);
        let mut counts = Vec::new();
        for bound in 1..=MAX_CARRIER {
            let models: Vec<_> = enumerate_models(&store, bound, CAP).map_err(|e| e.to_string())?.collect();
            if let Some(m) = models.iter().find(|m| !m.carrier("Unit").unwrap_or(&[]).is_empty()) {
                return Err(format!("a model with Unit = {:?}", m.carrier("Unit")));
            }
            counts.push(models.len());
        }
        Ok(format!(
            "flagship and {} handling traces replay; models at bounds 1..={MAX_CARRIER}: {counts:?}, none with Unit inhabited",
            run.handle_traces
        ))
    })();
    report(7, "undecoration transport", res);
}

#[test]
fn criterion_8_engine_hygiene() {
    // the property suites live in tests/properties.rs; here they run once
    // more at a fixed size so the criterion has its own line
    let res = hygiene::run(64);
    report(8, "engine hygiene", res);
}

#[path = "support/hygiene.rs"]
#[allow(dead_code)]
mod hygiene;

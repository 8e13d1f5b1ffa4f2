//! Seeded random decorated specifications, and the instances of the
//! propagation and handling theorems they support.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Decoration, Specification, Ty};

pub const DEFAULT_SEED: u64 = 20_090_401;

/// Text of a decorated specification with at most 3 types (a sum vertex
/// counts as one), 4 generators and 2 exceptions.
pub fn random_spec_text(rng: &mut impl Rng) -> String {
    let mut out = String::from("logic decorated;\n");
    let named = rng.gen_range(1..=3usize);
    let mut types: Vec<String> = (0..named).map(|i| format!("T{i}")).collect();
    for t in &types {
        out.push_str(&format!("type {t};\n"));
    }
    if named < 3 && rng.gen_bool(0.3) {
        let a = types.choose(rng).expect("at least one type").clone();
        let b = types.choose(rng).expect("at least one type").clone();
        out.push_str(&format!("sum S = a: {a} + b: {b};\n"));
        types.push("S".into());
    }
    for i in 0..rng.gen_range(0..=2) {
        out.push_str(&format!("exception e{i} of {};\n", types.choose(rng).expect("nonempty")));
    }
    for i in 0..rng.gen_range(1..=4) {
        let x = types.choose(rng).expect("nonempty");
        let y = types.choose(rng).expect("nonempty");
        let d = if rng.gen_bool(0.5) { "value" } else { "computation" };
        out.push_str(&format!("fun g{i} : {x} -> {y} @{d};\n"));
    }
    out
}

/// `n` specifications drawn from `seed`, named `fuzz-000.deco` and so on.
pub fn corpus(seed: u64, n: usize) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| (format!("fuzz-{i:03}.deco"), random_spec_text(&mut rng)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GoalKind {
    Propagation,
    HandleCongruence,
    HandleValue,
    HandleRaise,
    HandleCaught,
    HandleUncaught,
}

impl GoalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GoalKind::Propagation => "propagation",
            GoalKind::HandleCongruence => "handle-congruence",
            GoalKind::HandleValue => "handle-value",
            GoalKind::HandleRaise => "handle-raise",
            GoalKind::HandleCaught => "handle-caught",
            GoalKind::HandleUncaught => "handle-uncaught",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub kind: GoalKind,
    /// An equation in the DSL, `lhs == rhs`.
    pub text: String,
    /// A side condition to prove first, for congruence goals.
    pub premise: Option<String>,
}

struct Sig {
    text: String,
    source: String,
    target: String,
}

fn ty_name(spec: &Specification, t: &Ty) -> String {
    crate::print::ty(spec, t)
}

/// Theorem instances over the generators and exceptions of `spec`, in a
/// fixed order, at most `per_kind` of each kind.
pub fn theorem_goals(spec: &Specification, per_kind: usize) -> Vec<Goal> {
    let mut types: Vec<String> = spec.types.iter().map(|t| t.to_string()).collect();
    for (i, s) in spec.sums.iter().enumerate() {
        if s.vertex == Ty::Vertex(crate::syntax::SumId(i as u32)) && spec.exceptional_sum != Some(crate::syntax::SumId(i as u32)) {
            types.push(s.name.to_string());
        }
    }
    let gens: Vec<(Sig, Decoration)> = spec
        .generators
        .iter()
        .filter(|g| !g.exception)
        .map(|g| {
            (
                Sig {
                    text: g.name.to_string(),
                    source: ty_name(spec, &g.source),
                    target: ty_name(spec, &g.target),
                },
                g.decoration,
            )
        })
        .filter(|(s, _)| s.target != "0")
        .collect();
    let excs: Vec<(String, String)> = spec
        .exceptions
        .iter()
        .map(|e| (e.name.to_string(), ty_name(spec, &e.param)))
        .collect();

    // computations into 0
    let mut raisers: Vec<Sig> = Vec::new();
    for (t, p) in &excs {
        raisers.push(Sig {
            text: t.clone(),
            source: p.clone(),
            target: "0".into(),
        });
        for (g, _) in gens.iter().filter(|(g, _)| g.target == *p) {
            raisers.push(Sig {
                text: format!("{t} . {}", g.text),
                source: g.source.clone(),
                target: "0".into(),
            });
        }
    }
    let values: Vec<Sig> = types
        .iter()
        .map(|t| Sig {
            text: format!("id({t})"),
            source: t.clone(),
            target: t.clone(),
        })
        .chain(
            gens.iter()
                .filter(|(_, d)| *d != Decoration::Computation)
                .map(|(g, _)| Sig {
                    text: g.text.clone(),
                    source: g.source.clone(),
                    target: g.target.clone(),
                }),
        )
        .collect();
    // a handler branch for exception `i` in type `y`
    let branch = |i: usize, y: &str, alt: bool| -> String {
        let (t, p) = &excs[i];
        let own: Vec<&Sig> = gens
            .iter()
            .map(|(g, _)| g)
            .filter(|g| g.source == *p && g.target == y)
            .collect();
        match own.first() {
            Some(g) if !alt => g.text.clone(),
            _ if p == y && alt => format!("id({y})"),
            _ => format!("raise({y}) . {t}"),
        }
    };
    let handlers = |y: &str| -> Vec<(Vec<usize>, String)> {
        let k = excs.len();
        let mut out = Vec::new();
        let subsets: Vec<Vec<usize>> = match k {
            0 => vec![vec![]],
            1 => vec![vec![0], vec![]],
            _ => vec![vec![0, 1], vec![0], vec![1]],
        };
        for (n, ids) in subsets.into_iter().enumerate() {
            let bs: Vec<String> = ids
                .iter()
                .map(|&i| format!("{} => {}", excs[i].0, branch(i, y, n % 2 == 1)))
                .collect();
            out.push((ids, format!("[{}]", bs.join(", "))));
        }
        out
    };

    let mut goals = Vec::new();
    let push = |goals: &mut Vec<Goal>, kind: GoalKind, text: String, premise: Option<String>| {
        if goals.iter().filter(|g: &&Goal| g.kind == kind).count() < per_kind {
            goals.push(Goal { kind, text, premise });
        }
    };

    for f in &raisers {
        for (g, _) in &gens {
            push(
                &mut goals,
                GoalKind::Propagation,
                format!("{} . raise({}) . {} == raise({}) . {}", g.text, g.source, f.text, g.target, f.text),
                None,
            );
        }
    }
    for u in &values {
        for (_, b) in handlers(&u.target) {
            push(&mut goals, GoalKind::HandleValue, format!("{} handle {b} == {}", u.text, u.text), None);
        }
    }
    for f in &raisers {
        for y in &types {
            for (ids, b) in handlers(y) {
                let cb = if ids.is_empty() { String::new() } else { b.clone() };
                let rhs = if cb.is_empty() {
                    format!("case^e {} of [] to {y}", f.text)
                } else {
                    format!("case^e {} of {cb} to {y}", f.text)
                };
                push(
                    &mut goals,
                    GoalKind::HandleRaise,
                    format!("(raise({y}) . {}) handle {b} == {rhs}", f.text),
                    None,
                );
            }
        }
    }
    // branches are read on the parts of the inverse image: the part of the
    // raised exception is the source of `v`, the others are empty
    for (j, (t, p)) in excs.iter().enumerate() {
        for v in values.iter().filter(|v| v.target == *p) {
            for y in &types {
                let u = format!("raise({y}) . {t} . {}", v.text);
                let direct: Vec<String> = gens
                    .iter()
                    .map(|(g, _)| g)
                    .filter(|g| g.source == v.source && g.target == *y)
                    .map(|g| g.text.clone())
                    .chain((v.source == *y).then(|| format!("id({y})")))
                    .chain(std::iter::once(u.clone()))
                    .collect();
                for (n, (ids, _)) in handlers(y).into_iter().enumerate() {
                    let fj = &direct[n % direct.len()];
                    let bs: Vec<String> = ids
                        .iter()
                        .map(|&i| {
                            if i == j {
                                format!("{t} => {fj}")
                            } else {
                                format!("{} => raise({y}) . {}", excs[i].0, excs[i].0)
                            }
                        })
                        .collect();
                    let b = format!("[{}]", bs.join(", "));
                    if ids.contains(&j) {
                        push(&mut goals, GoalKind::HandleCaught, format!("({u}) handle {b} == {fj}"), None);
                    } else {
                        push(&mut goals, GoalKind::HandleUncaught, format!("({u}) handle {b} == {u}"), None);
                    }
                }
            }
        }
    }
    for f in &raisers {
        for (g, _) in &gens {
            for (_, b) in handlers(&g.target) {
                let u1 = format!("{} . raise({}) . {}", g.text, g.source, f.text);
                let u2 = format!("raise({}) . {}", g.target, f.text);
                push(
                    &mut goals,
                    GoalKind::HandleCongruence,
                    format!("({u1}) handle {b} == ({u2}) handle {b}"),
                    Some(format!("{u1} == {u2}")),
                );
            }
        }
    }
    goals
}

//! Surface rendering of types and terms.

use crate::syntax::{Env, Logic, SumKind, Term, Ty};

pub fn ty<E: Env + ?Sized>(env: &E, t: &Ty) -> String {
    match t {
        Ty::Named(n) => n.to_string(),
        Ty::Zero => "0".into(),
        Ty::Exc => "E".into(),
        Ty::Vertex(s) => match env.sum_info(*s) {
            Some(info) if info.kind != SumKind::Derived => info.name.to_string(),
            Some(info) => {
                let parts: Vec<String> = info.summands.iter().map(|y| ty(env, y)).collect();
                format!("({})", parts.join(" + "))
            }
            None => format!("<sum {}>", s.0),
        },
        Ty::Part(ii, k) => match env.inverse(*ii) {
            Some(inv) => {
                let target = env
                    .sum_info(inv.target)
                    .and_then(|s| s.summands.get(*k as usize).cloned())
                    .map(|y| ty(env, &y))
                    .unwrap_or_else(|| "?".into());
                format!("{}⁻¹({})", atom(env, &inv.along), target)
            }
            None => format!("<part {}.{}>", ii.0, k),
        },
    }
}

pub fn term<E: Env + ?Sized>(env: &E, t: &Term) -> String {
    let decorated = env.logic() == Logic::Decorated;
    match t {
        Term::Gen(n) => n.to_string(),
        Term::Id(y) => format!("id({})", ty(env, y)),
        Term::Empty(y) => {
            if decorated {
                format!("raise({})", ty(env, y))
            } else {
                format!("[]({})", ty(env, y))
            }
        }
        Term::Comp(items) => items
            .iter()
            .map(|x| match x {
                Term::Case { .. } | Term::CaseT { .. } | Term::CaseE { .. } | Term::Handle { .. } => {
                    format!("({})", term(env, x))
                }
                _ => term(env, x),
            })
            .collect::<Vec<_>>()
            .join(" . "),
        Term::Coproj(s, i) => coproj_label(env, *s, *i as usize),
        Term::Match(s, fs) => {
            let branches: Vec<String> = fs
                .iter()
                .enumerate()
                .map(|(i, f)| format!("{} => {}", coproj_label(env, *s, i), term(env, f)))
                .collect();
            format!("[{}]", branches.join(" | "))
        }
        Term::Case {
            scrut,
            sum,
            branches,
        } => {
            let bs: Vec<String> = branches
                .iter()
                .enumerate()
                .map(|(i, f)| format!("{} => {}", coproj_label(env, *sum, i), term(env, f)))
                .collect();
            format!("case {} of [{}]", term(env, scrut), bs.join(" | "))
        }
        Term::CaseT {
            scrut,
            on_value,
            on_raise,
        } => format!(
            "case^t {} of [id => {} | raise => {}]",
            term(env, scrut),
            term(env, on_value),
            term(env, on_raise)
        ),
        Term::CaseE {
            scrut,
            branches,
            target,
        } => {
            let bs = exc_branches(env, branches);
            if branches.iter().all(|b| b.is_none()) {
                format!("case^e {} of [{}] to {}", term(env, scrut), bs, ty(env, target))
            } else {
                format!("case^e {} of [{}]", term(env, scrut), bs)
            }
        }
        Term::Handle { body, branches } => {
            let b = match **body {
                Term::Comp(_) | Term::Case { .. } | Term::CaseT { .. } | Term::CaseE { .. } | Term::Handle { .. } => {
                    format!("({})", term(env, body))
                }
                _ => term(env, body),
            };
            format!("{} handle [{}]", b, exc_branches(env, branches))
        }
        Term::InvCoproj(ii, k) => match env.inverse(*ii) {
            Some(inv) => format!(
                "{}⁻¹({})",
                atom(env, &inv.along),
                coproj_label(env, inv.target, *k as usize)
            ),
            None => format!("<inv {}.{}>", ii.0, k),
        },
        Term::Restrict(ii, k) => match env.inverse(*ii) {
            Some(inv) => format!(
                "{}|{}",
                atom(env, &inv.along),
                coproj_label(env, inv.target, *k as usize)
            ),
            None => format!("<restrict {}.{}>", ii.0, k),
        },
    }
}

/// A term printed so it can stand as an operand.
pub fn atom<E: Env + ?Sized>(env: &E, t: &Term) -> String {
    match t {
        Term::Gen(_) | Term::Id(_) | Term::Empty(_) | Term::Coproj(..) | Term::Match(..) => {
            term(env, t)
        }
        _ => format!("({})", term(env, t)),
    }
}

fn exc_branches<E: Env + ?Sized>(env: &E, branches: &[Option<crate::syntax::Term>]) -> String {
    let sid = env.exceptional_sum();
    branches
        .iter()
        .enumerate()
        .filter_map(|(i, b)| {
            b.as_ref().map(|f| {
                let label = sid
                    .and_then(|s| env.sum_info(s))
                    .and_then(|s| s.labels.get(i).cloned())
                    .map(|l| l.to_string())
                    .unwrap_or_else(|| format!("#{i}"));
                format!("{label} => {}", term(env, f))
            })
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// The name used for coprojection `i` of a sum: its declared label, or the
/// coprojection term itself for generated sums.
pub fn coproj_label<E: Env + ?Sized>(env: &E, s: crate::syntax::SumId, i: usize) -> String {
    match env.sum_info(s) {
        Some(info) if matches!(info.kind, SumKind::Derived | SumKind::PlusZero) => {
            match info.coprojections.get(i) {
                Some(Term::Id(_)) => "id".into(),
                Some(Term::Empty(_)) if info.kind == SumKind::PlusZero => "raise".into(),
                // a sum generated with its own coprojections
                Some(Term::Coproj(s2, j)) if *s2 == s && *j as usize == i => info
                    .labels
                    .get(i)
                    .map(|l| l.to_string())
                    .unwrap_or_else(|| format!("#{i}")),
                Some(c) => atom(env, c),
                None => format!("#{i}"),
            }
        }
        Some(info) => info
            .labels
            .get(i)
            .map(|l| l.to_string())
            .unwrap_or_else(|| format!("#{i}")),
        None => format!("<sum {}>#{i}", s.0),
    }
}

/// `Y = Y1 + Y2 via [c1 | c2]`.
pub fn sum_decl<E: Env + ?Sized>(env: &E, s: crate::syntax::SumId) -> String {
    match env.sum_info(s) {
        Some(info) => {
            let parts: Vec<String> = info.summands.iter().map(|y| ty(env, y)).collect();
            let cs: Vec<String> = (0..info.arity()).map(|i| coproj_label(env, s, i)).collect();
            format!(
                "{} = {} via [{}]",
                ty(env, &info.vertex),
                if parts.is_empty() { "0".into() } else { parts.join(" + ") },
                cs.join(" | ")
            )
        }
        None => format!("<sum {}>", s.0),
    }
}

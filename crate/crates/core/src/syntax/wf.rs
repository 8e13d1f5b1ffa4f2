//! Well-formedness diagnostics for whole specifications.

use std::collections::HashSet;

use super::spec::{Specification, SumKind};
use super::term::{Decoration, Logic, Term, Ty};
use super::typing::{decoration, signature, TermError};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<String>,
    /// Remarks that do not make the specification invalid.
    pub notes: Vec<String>,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

fn mentions_exc(t: &Term) -> bool {
    t.any(&|x| match x {
        Term::Id(ty) | Term::Empty(ty) => *ty == Ty::Exc,
        Term::CaseE { target, .. } => *target == Ty::Exc,
        _ => false,
    })
}

fn has_decorated_only(t: &Term) -> bool {
    t.any(&|x| matches!(x, Term::CaseT { .. } | Term::CaseE { .. } | Term::Handle { .. }))
}

fn has_generated(t: &Term) -> bool {
    t.any(&|x| matches!(x, Term::InvCoproj(..) | Term::Restrict(..)))
}

fn has_bare_case_t_or_e(t: &Term) -> bool {
    t.any(&|x| matches!(x, Term::CaseT { .. } | Term::CaseE { .. }))
}

pub fn well_formed(spec: &Specification) -> Report {
    let mut r = Report::default();
    let decorated = spec.logic == Logic::Decorated;

    let mut seen = HashSet::new();
    for n in spec.types.iter().chain(spec.generators.iter().map(|g| &g.name)) {
        if !seen.insert(n.clone()) {
            r.violations.push(format!("duplicate name `{n}`"));
        }
    }

    let check_ty = |ty: &Ty, at: &str, r: &mut Report| match ty {
        Ty::Exc if spec.logic != Logic::Explicit => r
            .violations
            .push(format!("{at}: distinguished type outside explicit logic")),
        Ty::Named(n) if !spec.has_type(n) => {
            r.violations.push(format!("{at}: unknown type `{n}`"))
        }
        Ty::Vertex(s) if s.index() >= spec.sums.len() => r
            .violations
            .push(format!("{at}: sum vertex #{} has no sum declaration", s.0)),
        Ty::Part(..) => r
            .violations
            .push(format!("{at}: generated summand type in a specification")),
        _ => {}
    };

    let check_term = |t: &Term, at: &str, r: &mut Report| {
        match signature(spec, t) {
            Err(TermError::BranchTarget) => {
                r.violations.push(format!("{at}: match branches disagree on target"))
            }
            Err(e) => r.violations.push(format!("{at}: {e}")),
            Ok(_) => {}
        }
        if spec.logic != Logic::Explicit && mentions_exc(t) {
            r.violations
                .push(format!("{at}: distinguished type outside explicit logic"));
        }
        if spec.logic == Logic::Explicit && has_decorated_only(t) {
            r.violations
                .push(format!("{at}: case^t, case^e and handle need a decorated specification"));
        }
        if has_generated(t) {
            r.violations
                .push(format!("{at}: generated inverse-image terms in a specification"));
        }
    };

    for g in &spec.generators {
        let at = format!("fun {}", g.name);
        check_ty(&g.source, &at, &mut r);
        check_ty(&g.target, &at, &mut r);
        match (decorated, g.decoration) {
            (true, Decoration::Plain) => r
                .violations
                .push(format!("{at}: undecorated function in a decorated specification")),
            (false, Decoration::Value | Decoration::Computation) => r
                .violations
                .push(format!("{at}: decoration outside the decorated logic")),
            _ => {}
        }
        if g.exception && (g.target != Ty::Zero || g.decoration != Decoration::Computation) {
            r.violations
                .push(format!("{at}: an exception must be a computation into 0"));
        }
        if let Some(b) = &g.body {
            check_term(b, &at, &mut r);
            if let Ok((s, t)) = signature(spec, b) {
                if s != g.source || t != g.target {
                    r.violations
                        .push(format!("{at}: body does not have the declared signature"));
                }
            }
            if let Ok(d) = decoration(spec, b) {
                if decorated && g.decoration == Decoration::Value && d == Decoration::Computation {
                    r.violations
                        .push(format!("{at}: declared value has a computation body"));
                }
            }
            if decorated && has_bare_case_t_or_e(b) {
                r.notes.push(format!(
                    "{at}: case^t or case^e used outside a handle construction"
                ));
            }
        }
    }

    let mut exceptional = 0;
    for (id, s) in spec.declared_sums() {
        let at = format!("sum {}", s.name);
        check_ty(&s.vertex, &at, &mut r);
        for ty in &s.summands {
            check_ty(ty, &at, &mut r);
        }
        if s.summands.len() != s.coprojections.len() || s.labels.len() != s.summands.len() {
            r.violations
                .push(format!("{at}: coprojection list does not match summands"));
            continue;
        }
        if s.summands.is_empty() && s.vertex != Ty::Zero && s.vertex != Ty::Exc {
            r.violations
                .push(format!("{at}: a sum with no summands must have vertex 0"));
        }
        if let Ty::Vertex(v) = s.vertex {
            if v != id {
                r.violations
                    .push(format!("{at}: vertex belongs to another sum"));
            }
        }
        for (i, c) in s.coprojections.iter().enumerate() {
            match signature(spec, c) {
                Ok((src, tgt)) if src == s.summands[i] && tgt == s.vertex => {}
                _ => r
                    .violations
                    .push(format!("{at}: coprojection {i} has the wrong type")),
            }
        }
        match s.kind {
            SumKind::Exceptional => {
                exceptional += 1;
                if !decorated {
                    r.violations
                        .push(format!("{at}: exceptional sum outside the decorated logic"));
                }
                if s.vertex != Ty::Zero {
                    r.violations
                        .push(format!("{at}: the exceptional sum must have vertex 0"));
                }
                let params: Vec<&Ty> = spec.exceptions.iter().map(|e| &e.param).collect();
                let labels: Vec<&str> = spec.exceptions.iter().map(|e| &*e.name).collect();
                if s.summands.iter().collect::<Vec<_>>() != params
                    || s.labels.iter().map(|l| &**l).collect::<Vec<_>>() != labels
                {
                    r.violations.push(format!(
                        "{at}: summands must be the exception parameters in declaration order"
                    ));
                }
            }
            _ => {
                if decorated {
                    for g in s.labels.iter().filter_map(|l| spec.generator(l)) {
                        if g.decoration == Decoration::Computation {
                            r.violations
                                .push(format!("{at}: coprojection `{}` must be a value", g.name));
                        }
                    }
                }
            }
        }
    }
    if decorated {
        if exceptional != 1 || spec.exceptional_sum.is_none() {
            r.violations.push(
                "a decorated specification needs exactly one exceptional sum".into(),
            );
        }
        if spec.exceptions.is_empty() {
            r.notes
                .push("decorated specification declares no exceptions".into());
        }
    } else if !spec.exceptions.is_empty() {
        r.violations.push(format!(
            "exception declarations in a {} specification",
            spec.logic
        ));
    }

    for (i, eq) in spec.axioms.iter().enumerate() {
        let at = format!("equation {}", i + 1);
        check_term(&eq.lhs, &at, &mut r);
        check_term(&eq.rhs, &at, &mut r);
        if let (Ok(a), Ok(b)) = (signature(spec, &eq.lhs), signature(spec, &eq.rhs)) {
            if a != b {
                r.violations
                    .push(format!("{at}: sides have different signatures"));
            }
        }
        if let (Ok(a), Ok(b)) = (decoration(spec, &eq.lhs), decoration(spec, &eq.rhs)) {
            if eq.level != a.join(b) {
                r.violations
                    .push(format!("{at}: level is not the join of the side decorations"));
            }
        }
    }
    r
}

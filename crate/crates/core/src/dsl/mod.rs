//! The specification language: parsing, elaboration and printing.

mod elab;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::syntax::{
    Decoration, Item, Logic, Name, SpecBuilder, SpecError, Specification, SumKind, SumVertex, Term, TermError, Ty,
};
use elab::Elab;
use lexer::{lex, Span};
use parser::{Decl, Node, Parser};

pub use elab::{resolve_fun, resolve_type};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslErrorKind {
    Syntax(String),
    UnknownReference(String),
    MissingHint(String),
    Term(TermError),
    Spec(SpecError),
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            DslErrorKind::UnknownReference(n) => write!(f, "unknown reference `{n}`"),
            DslErrorKind::MissingHint(w) => write!(f, "cannot infer the type of {w}; annotate it"),
            DslErrorKind::Term(e) => write!(f, "{e}"),
            DslErrorKind::Spec(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub kind: DslErrorKind,
}

impl DslError {
    fn new(span: Span, kind: DslErrorKind) -> DslError {
        DslError {
            line: span.line,
            col: span.col,
            kind,
        }
    }

    fn syntax(span: Span, msg: String) -> DslError {
        DslError::new(span, DslErrorKind::Syntax(msg))
    }

    fn is_missing_hint(&self) -> bool {
        matches!(self.kind, DslErrorKind::MissingHint(_))
    }
}

/// A parsed specification with the construction notes (warnings).
#[derive(Clone, Debug)]
pub struct Parsed {
    pub spec: Specification,
    pub notes: Vec<String>,
}

pub fn parse(src: &str) -> Result<Specification, DslError> {
    parse_with_notes(src).map(|p| p.spec)
}

pub fn parse_with_notes(src: &str) -> Result<Parsed, DslError> {
    let mut p = Parser::new(lex(src)?);
    let hspan = p.span();
    let logic = match p.header()?.as_str() {
        "basic" => Logic::Basic,
        "decorated" => Logic::Decorated,
        "explicit" => Logic::Explicit,
        other => return Err(DslError::syntax(hspan, format!("unknown logic `{other}`"))),
    };
    let mut b = SpecBuilder::new(logic);
    let mut last = hspan;
    while !p.at_end() {
        let (d, span) = p.decl()?;
        last = span;
        declare(&mut b, d, span)?;
    }
    let notes = b.notes().to_vec();
    let spec = b
        .build()
        .map_err(|e| DslError::new(last, DslErrorKind::Spec(e)))?;
    let mut notes = notes;
    notes.extend(crate::syntax::well_formed(&spec).notes);
    Ok(Parsed { spec, notes })
}

fn declare(b: &mut SpecBuilder, d: Decl, span: Span) -> Result<(), DslError> {
    let spec_err = |e: SpecError| DslError::new(span, DslErrorKind::Spec(e));
    let ty = |b: &SpecBuilder, n: &str| {
        b.resolve_type(n)
            .ok_or_else(|| DslError::new(span, DslErrorKind::UnknownReference(n.to_string())))
    };
    match d {
        Decl::Type(n) => b.declare_type(crate::syntax::name(&n)).map_err(spec_err),
        Decl::Fun {
            name,
            source,
            target,
            decoration,
            body,
        } => {
            let s = ty(b, &source)?;
            let t = ty(b, &target)?;
            let deco = match decoration.as_deref() {
                None => None,
                Some("value") => Some(Decoration::Value),
                Some("computation") => Some(Decoration::Computation),
                Some(other) => return Err(DslError::syntax(span, format!("unknown decoration `@{other}`"))),
            };
            let body = match body {
                Some(n) => {
                    b.freeze_exceptions();
                    Some(Elab { spec: b.spec() }.term(&n, Some(&s), Some(&t))?)
                }
                None => None,
            };
            b.declare_fun(crate::syntax::name(&name), s, t, deco, body)
                .map_err(spec_err)
        }
        Decl::Sum { vertex, summands } => {
            let mut parts = Vec::new();
            for (c, t) in &summands {
                parts.push((crate::syntax::name(c), ty(b, t)?));
            }
            let v = match b.resolve_type(&vertex) {
                Some(t) => SumVertex::Existing(t),
                None => SumVertex::Fresh(crate::syntax::name(&vertex)),
            };
            let id = b.declare_sum(v, parts.clone()).map_err(spec_err)?;
            if b.logic() == Logic::Explicit
                && parts.len() == 2
                && parts[1].1 == Ty::Exc
                && vertex == format!("{}+E", crate::print::ty(b.spec(), &parts[0].1))
            {
                b.set_sum_kind(id, SumKind::PlusExc);
            }
            Ok(())
        }
        Decl::Exception { name, param } => {
            let p = ty(b, &param)?;
            b.declare_exception(crate::syntax::name(&name), p)
                .map_err(spec_err)
        }
        Decl::Eq(l, r) => {
            b.freeze_exceptions();
            let (lhs, rhs) = elab_equation(b.spec(), &l, &r)?;
            b.add_equation(lhs, rhs).map_err(spec_err)
        }
    }
}

fn elab_equation(spec: &Specification, l: &Node, r: &Node) -> Result<(Term, Term), DslError> {
    let e = Elab { spec };
    match e.term(l, None, None) {
        Ok(lhs) => {
            let (s, t) = crate::syntax::signature(spec, &lhs)
                .map_err(|err| DslError::new(l.span, DslErrorKind::Term(err)))?;
            let rhs = e.term(r, Some(&s), Some(&t))?;
            Ok((lhs, rhs))
        }
        Err(err) if err.is_missing_hint() => {
            let rhs = e.term(r, None, None)?;
            let (s, t) = crate::syntax::signature(spec, &rhs)
                .map_err(|err| DslError::new(r.span, DslErrorKind::Term(err)))?;
            let lhs = e.term(l, Some(&s), Some(&t))?;
            Ok((lhs, rhs))
        }
        Err(err) => Err(err),
    }
}

/// Parses a term against `spec`, optionally with its expected signature.
pub fn parse_term(spec: &Specification, text: &str, hint: Option<(&Ty, &Ty)>) -> Result<Term, DslError> {
    let mut p = Parser::new(lex(text)?);
    let n = p.term()?;
    if !p.at_end() {
        return Err(DslError::syntax(p.span(), "trailing input after the term".into()));
    }
    let t = Elab { spec }.term(&n, hint.map(|h| h.0), hint.map(|h| h.1))?;
    crate::syntax::signature(spec, &t).map_err(|e| DslError::new(n.span, DslErrorKind::Term(e)))?;
    Ok(t)
}

/// Parses `lhs == rhs` against `spec`.
pub fn parse_equation(spec: &Specification, text: &str) -> Result<(Term, Term), DslError> {
    let mut p = Parser::new(lex(text)?);
    let (l, r) = p.equation()?;
    if !p.at_end() {
        return Err(DslError::syntax(p.span(), "trailing input after the equation".into()));
    }
    elab_equation(spec, &l, &r)
}

/// Renders a specification in the surface language.
pub fn print_spec(spec: &Specification) -> String {
    let show = |t: &Term| crate::print::term(spec, t);
    let ty = |t: &Ty| crate::print::ty(spec, t);
    let mut out = format!("logic {};\n", spec.logic);
    for item in &spec.items {
        let line = match item {
            Item::Type(i) => format!("type {};", spec.types[*i]),
            Item::Fun(i) => {
                let g = &spec.generators[*i];
                let deco = match (spec.logic, g.decoration) {
                    (Logic::Decorated, Decoration::Computation) => " @computation",
                    (Logic::Decorated, _) => " @value",
                    _ => "",
                };
                match &g.body {
                    Some(b) => format!("fun {} : {} -> {}{} = {};", g.name, ty(&g.source), ty(&g.target), deco, show(b)),
                    None => format!("fun {} : {} -> {}{};", g.name, ty(&g.source), ty(&g.target), deco),
                }
            }
            Item::Exception(i) => {
                let e = &spec.exceptions[*i];
                format!("exception {} of {};", e.name, ty(&e.param))
            }
            Item::Sum(id) => {
                let s = spec.sum(*id);
                let parts: Vec<String> = s
                    .labels
                    .iter()
                    .zip(&s.summands)
                    .map(|(l, y)| format!("{l}: {}", ty(y)))
                    .collect();
                format!(
                    "sum {} = {};",
                    ty(&s.vertex),
                    if parts.is_empty() { "0".into() } else { parts.join(" + ") }
                )
            }
            Item::Axiom(i) => {
                let e = &spec.axioms[*i];
                format!("eq {} == {};", show(&e.lhs), show(&e.rhs))
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Names of the declared generators, in order.
pub fn generator_names(spec: &Specification) -> Vec<Name> {
    spec.generators.iter().map(|g| g.name.clone()).collect()
}

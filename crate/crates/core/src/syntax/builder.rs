//! Constructing validated specifications from ordered declarations.

use thiserror::Error;

use super::spec::{
    Equation, ExceptionDecl, GenDecl, Item, Origin, Specification, SumInfo, SumKind,
};
use super::term::{name, Decoration, InvId, Logic, Name, SumId, Term, Ty};
use super::typing::{decoration, signature, Env, TermError};
use super::wf::{well_formed, Report};
use crate::deduction::InverseImage;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown reference `{0}`")]
    UnknownReference(String),
    #[error("{0}")]
    KindMismatch(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("ill-formed specification: {}", .0.violations.join("; "))]
    IllFormed(Report),
}

/// Vertex of a declared sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumVertex {
    /// A new type; the coprojection names become new coprojections.
    Fresh(Name),
    /// An existing type; the coprojection names refer to existing generators.
    Existing(Ty),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Declaration {
    Type(Name),
    Fun {
        name: Name,
        source: Ty,
        target: Ty,
        decoration: Option<Decoration>,
        body: Option<Term>,
    },
    Sum {
        vertex: SumVertex,
        summands: Vec<(Name, Ty)>,
    },
    Exception {
        name: Name,
        param: Ty,
    },
    Equation {
        lhs: Term,
        rhs: Term,
    },
}

/// Incremental builder; every declaration is checked against the ones
/// before it.
pub struct SpecBuilder {
    spec: Specification,
    /// Named vertex types introduced by `sum V = ...` with a fresh `V`.
    fresh_vertices: Vec<(Name, SumId)>,
    notes: Vec<String>,
}

impl Env for Specification {
    fn logic(&self) -> Logic {
        self.logic
    }
    fn generator(&self, name: &str) -> Option<&GenDecl> {
        Specification::generator(self, name)
    }
    fn sum_info(&self, id: SumId) -> Option<&SumInfo> {
        self.sums.get(id.index())
    }
    fn inverse(&self, _id: InvId) -> Option<&InverseImage> {
        None
    }
    fn exceptional_sum(&self) -> Option<SumId> {
        self.exceptional_sum
    }
}

impl SpecBuilder {
    pub fn new(logic: Logic) -> SpecBuilder {
        SpecBuilder {
            spec: Specification::empty(logic),
            fresh_vertices: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn logic(&self) -> Logic {
        self.spec.logic
    }

    pub fn spec(&self) -> &Specification {
        &self.spec
    }

    fn name_taken(&self, n: &str) -> bool {
        self.spec.has_type(n)
            || self.spec.generator(n).is_some()
            || self.spec.alias(n).is_some()
            || self.fresh_vertices.iter().any(|(v, _)| &**v == n)
    }

    fn claim(&self, n: &str) -> Result<(), SpecError> {
        if self.name_taken(n) || n == "E" || n == "0" || n == "id" || n == "raise" {
            return Err(SpecError::DuplicateName(n.to_string()));
        }
        Ok(())
    }

    /// Resolves a type name as written in a declaration.
    pub fn resolve_type(&self, n: &str) -> Option<Ty> {
        match n {
            "0" => Some(Ty::Zero),
            "E" if self.spec.logic == Logic::Explicit => Some(Ty::Exc),
            _ if self.spec.has_type(n) => Some(Ty::Named(name(n))),
            _ => self
                .fresh_vertices
                .iter()
                .find(|(v, _)| &**v == n)
                .map(|(_, s)| Ty::Vertex(*s)),
        }
    }

    /// Resolves a function identifier: coprojection aliases win over
    /// generators.
    pub fn resolve_fun(&self, n: &str) -> Option<Term> {
        if let Some((s, i)) = self.spec.alias(n) {
            return Some(Term::Coproj(s, i));
        }
        self.spec.generator(n).map(|_| Term::Gen(name(n)))
    }

    fn check_ty(&self, ty: &Ty) -> Result<(), SpecError> {
        match ty {
            Ty::Named(n) if !self.spec.has_type(n) => {
                Err(SpecError::UnknownReference(n.to_string()))
            }
            Ty::Exc if self.spec.logic != Logic::Explicit => Err(SpecError::KindMismatch(
                "distinguished type outside explicit logic".into(),
            )),
            Ty::Vertex(s) if s.index() >= self.spec.sums.len() => {
                Err(SpecError::UnknownReference(format!("sum #{}", s.0)))
            }
            Ty::Part(..) => Err(SpecError::KindMismatch(
                "generated summand types cannot be declared".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn declare(&mut self, d: Declaration) -> Result<(), SpecError> {
        match d {
            Declaration::Type(n) => self.declare_type(n),
            Declaration::Fun {
                name,
                source,
                target,
                decoration,
                body,
            } => self.declare_fun(name, source, target, decoration, body),
            Declaration::Sum { vertex, summands } => self.declare_sum(vertex, summands).map(|_| ()),
            Declaration::Exception { name, param } => self.declare_exception(name, param),
            Declaration::Equation { lhs, rhs } => self.add_equation(lhs, rhs),
        }
    }

    pub fn declare_type(&mut self, n: Name) -> Result<(), SpecError> {
        self.claim(&n)?;
        self.spec.items.push(Item::Type(self.spec.types.len()));
        self.spec.types.push(n);
        Ok(())
    }

    pub fn declare_fun(
        &mut self,
        n: Name,
        source: Ty,
        target: Ty,
        deco: Option<Decoration>,
        body: Option<Term>,
    ) -> Result<(), SpecError> {
        self.claim(&n)?;
        self.check_ty(&source)?;
        self.check_ty(&target)?;
        let logic = self.spec.logic;
        if logic != Logic::Decorated && matches!(deco, Some(Decoration::Value | Decoration::Computation)) {
            return Err(SpecError::KindMismatch(format!(
                "decoration on `{n}` in a {logic} specification"
            )));
        }
        let mut decoration = match (logic, deco) {
            (Logic::Decorated, Some(d)) if d != Decoration::Plain => d,
            (Logic::Decorated, _) => Decoration::Value,
            _ => Decoration::Plain,
        };
        if let Some(b) = &body {
            let (s, t) = signature(&self.spec, b)?;
            if s != source || t != target {
                return Err(SpecError::SignatureMismatch(format!(
                    "body of `{n}` has type {s} -> {t}, declared {source} -> {target}"
                )));
            }
            let inferred = decoration_of(&self.spec, b)?;
            if logic == Logic::Decorated {
                match deco {
                    Some(Decoration::Value) if inferred == Decoration::Computation => {
                        return Err(SpecError::KindMismatch(format!(
                            "`{n}` is declared a value but its body is a computation"
                        )))
                    }
                    None => decoration = inferred,
                    _ => {}
                }
            }
        }
        self.spec.push_generator(GenDecl {
            name: n,
            source,
            target,
            decoration,
            exception: false,
            body,
        });
        Ok(())
    }

    /// Declares a sum and returns its id.
    pub fn declare_sum(
        &mut self,
        vertex: SumVertex,
        summands: Vec<(Name, Ty)>,
    ) -> Result<SumId, SpecError> {
        for (_, ty) in &summands {
            self.check_ty(ty)?;
        }
        let id = SumId(self.spec.sums.len() as u32);
        match vertex {
            SumVertex::Fresh(v) => {
                self.claim(&v)?;
                for (i, (c, _)) in summands.iter().enumerate() {
                    self.claim(c)?;
                    if summands[..i].iter().any(|(d, _)| d == c) {
                        return Err(SpecError::DuplicateName(c.to_string()));
                    }
                }
                if summands.is_empty() {
                    return Err(SpecError::KindMismatch(
                        "an empty sum must have vertex 0".into(),
                    ));
                }
                let info = SumInfo {
                    name: v.clone(),
                    vertex: Ty::Vertex(id),
                    summands: summands.iter().map(|(_, t)| t.clone()).collect(),
                    coprojections: (0..summands.len() as u32)
                        .map(|i| Term::Coproj(id, i))
                        .collect(),
                    labels: summands.iter().map(|(c, _)| c.clone()).collect(),
                    kind: SumKind::Ordinary,
                };
                self.spec.push_sum(info);
                self.fresh_vertices.push((v, id));
                for (i, (c, _)) in summands.iter().enumerate() {
                    self.spec.set_alias(c.clone(), id, i as u32);
                }
            }
            SumVertex::Existing(vty) => {
                self.check_ty(&vty)?;
                if self.spec.logic == Logic::Decorated && vty == Ty::Zero {
                    return Err(SpecError::KindMismatch(
                        "the exceptional sum of a decorated specification is implicit".into(),
                    ));
                }
                if summands.is_empty() && vty != Ty::Zero && vty != Ty::Exc {
                    return Err(SpecError::KindMismatch(
                        "an empty sum must have vertex 0".into(),
                    ));
                }
                for (c, ty) in &summands {
                    let g = self
                        .spec
                        .generator(c)
                        .ok_or_else(|| SpecError::UnknownReference(c.to_string()))?;
                    if g.body.is_some() || self.spec.alias(c).is_some() {
                        return Err(SpecError::KindMismatch(format!(
                            "`{c}` cannot serve as a coprojection"
                        )));
                    }
                    if g.source != *ty || g.target != vty {
                        return Err(SpecError::SignatureMismatch(format!(
                            "coprojection `{c}` has type {} -> {}, expected {ty} -> {vty}",
                            g.source, g.target
                        )));
                    }
                    if g.decoration == Decoration::Computation {
                        return Err(SpecError::KindMismatch(format!(
                            "coprojection `{c}` must be a value"
                        )));
                    }
                }
                let nm = match &vty {
                    Ty::Named(n) => n.clone(),
                    other => name(&other.to_string()),
                };
                let info = SumInfo {
                    name: nm,
                    vertex: vty.clone(),
                    summands: summands.iter().map(|(_, t)| t.clone()).collect(),
                    coprojections: (0..summands.len() as u32)
                        .map(|i| Term::Coproj(id, i))
                        .collect(),
                    labels: summands.iter().map(|(c, _)| c.clone()).collect(),
                    kind: SumKind::Ordinary,
                };
                self.spec.push_sum(info);
                for (i, (c, _)) in summands.iter().enumerate() {
                    self.spec.set_alias(c.clone(), id, i as u32);
                }
                // an undecorated exceptional sum keeps its case notation
                if vty == Ty::Zero
                    && self.spec.logic == Logic::Basic
                    && self.spec.exceptional_sum.is_none()
                {
                    self.spec.exceptional_sum = Some(id);
                }
                if vty == Ty::Exc && self.spec.exc_sum.is_none() {
                    self.spec.exc_sum = Some(id);
                }
            }
        }
        self.spec.items.push(Item::Sum(id));
        Ok(id)
    }

    /// Marks a declared sum with a kind other than ordinary.
    pub fn set_sum_kind(&mut self, id: SumId, kind: SumKind) {
        self.spec.sums[id.index()].kind = kind;
    }

    pub fn declare_exception(&mut self, n: Name, param: Ty) -> Result<(), SpecError> {
        if self.spec.logic != Logic::Decorated {
            return Err(SpecError::KindMismatch(format!(
                "exception `{n}` in a {} specification",
                self.spec.logic
            )));
        }
        if self.spec.exceptional_sum.is_some() {
            return Err(SpecError::KindMismatch(
                "exceptions are fixed once the exceptional sum is in use".into(),
            ));
        }
        self.claim(&n)?;
        self.check_ty(&param)?;
        let idx = self.spec.exceptions.len();
        self.spec.exceptions.push(ExceptionDecl {
            name: n.clone(),
            param: param.clone(),
        });
        self.spec.push_generator(GenDecl {
            name: n,
            source: param,
            target: Ty::Zero,
            decoration: Decoration::Computation,
            exception: true,
            body: None,
        });
        // the generator item is reported as the exception declaration
        self.spec.items.pop();
        self.spec.items.push(Item::Exception(idx));
        Ok(())
    }

    /// Creates the exceptional sum. Called automatically by the first
    /// declaration that may mention exceptional cases, and by `build`.
    pub fn freeze_exceptions(&mut self) {
        if self.spec.logic != Logic::Decorated || self.spec.exceptional_sum.is_some() {
            return;
        }
        let id = SumId(self.spec.sums.len() as u32);
        let info = SumInfo {
            name: name("0"),
            vertex: Ty::Zero,
            summands: self.spec.exceptions.iter().map(|e| e.param.clone()).collect(),
            coprojections: (0..self.spec.exceptions.len() as u32)
                .map(|i| Term::Coproj(id, i))
                .collect(),
            labels: self.spec.exceptions.iter().map(|e| e.name.clone()).collect(),
            kind: SumKind::Exceptional,
        };
        self.spec.push_sum(info);
        self.spec.exceptional_sum = Some(id);
        let names: Vec<Name> = self.spec.exceptions.iter().map(|e| e.name.clone()).collect();
        for (i, n) in names.into_iter().enumerate() {
            self.spec.set_alias(n, id, i as u32);
        }
        if self.spec.exceptions.is_empty() {
            self.notes
                .push("decorated specification declares no exceptions".into());
        }
    }

    pub fn add_equation(&mut self, lhs: Term, rhs: Term) -> Result<(), SpecError> {
        let (s1, t1) = signature(&self.spec, &lhs)?;
        let (s2, t2) = signature(&self.spec, &rhs)?;
        if s1 != s2 || t1 != t2 {
            return Err(SpecError::SignatureMismatch(format!(
                "equation sides have types {s1} -> {t1} and {s2} -> {t2}"
            )));
        }
        let level = decoration_of(&self.spec, &lhs)?.join(decoration_of(&self.spec, &rhs)?);
        self.spec.items.push(Item::Axiom(self.spec.axioms.len()));
        self.spec.axioms.push(Equation {
            lhs,
            rhs,
            level,
            origin: Origin::Axiom,
        });
        Ok(())
    }

    /// Finishes construction and validates the result.
    pub fn build(mut self) -> Result<Specification, SpecError> {
        self.freeze_exceptions();
        let report = well_formed(&self.spec);
        if !report.violations.is_empty() {
            return Err(SpecError::IllFormed(report));
        }
        Ok(self.spec)
    }

    /// Notes collected during construction (not violations).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }
}

/// Decoration of a term in a specification.
pub fn decoration_of(spec: &Specification, t: &Term) -> Result<Decoration, TermError> {
    signature(spec, t)?;
    decoration(spec, t)
}

/// Builds a specification from an ordered declaration list.
pub fn build_specification(
    logic: Logic,
    decls: Vec<Declaration>,
) -> Result<Specification, SpecError> {
    let mut b = SpecBuilder::new(logic);
    for d in decls {
        b.declare(d)?;
    }
    b.build()
}

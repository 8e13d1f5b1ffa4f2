//! Resolution of surface terms against a specification.

use super::lexer::Span;
use super::parser::{Ast, Node};
use super::{DslError, DslErrorKind};
use crate::syntax::{name, signature, Logic, Specification, SumId, SumKind, Term, Ty};

/// Resolves a type name in `spec`.
pub fn resolve_type(spec: &Specification, n: &str) -> Option<Ty> {
    match n {
        "0" => Some(Ty::Zero),
        "E" if spec.logic == Logic::Explicit => Some(Ty::Exc),
        _ if spec.has_type(n) => Some(Ty::Named(name(n))),
        _ => spec
            .sums
            .iter()
            .enumerate()
            .find(|(i, s)| {
                s.kind != SumKind::Derived && s.vertex == Ty::Vertex(SumId(*i as u32)) && &*s.name == n
            })
            .map(|(i, _)| Ty::Vertex(SumId(i as u32))),
    }
}

/// Resolves a function name: coprojections first, then generators.
pub fn resolve_fun(spec: &Specification, n: &str) -> Option<Term> {
    if let Some((s, i)) = spec.alias(n) {
        return Some(Term::Coproj(s, i));
    }
    spec.generator(n).map(|_| Term::Gen(name(n)))
}

pub struct Elab<'a> {
    pub spec: &'a Specification,
}

type R = Result<Term, DslError>;

impl Elab<'_> {
    fn ty(&self, n: &str, span: Span) -> Result<Ty, DslError> {
        resolve_type(self.spec, n)
            .ok_or_else(|| DslError::new(span, DslErrorKind::UnknownReference(n.to_string())))
    }

    fn sig(&self, t: &Term, span: Span) -> Result<(Ty, Ty), DslError> {
        signature(self.spec, t).map_err(|e| DslError::new(span, DslErrorKind::Term(e)))
    }

    fn hint(span: Span, what: &str) -> DslError {
        DslError::new(span, DslErrorKind::MissingHint(what.to_string()))
    }

    pub fn term(&self, n: &Node, s: Option<&Ty>, t: Option<&Ty>) -> R {
        let span = n.span;
        match &n.ast {
            Ast::Name(x) => resolve_fun(self.spec, x)
                .ok_or_else(|| DslError::new(span, DslErrorKind::UnknownReference(x.clone()))),
            Ast::Id(Some(y)) => Ok(Term::Id(self.ty(y, span)?)),
            Ast::Id(None) => s
                .or(t)
                .map(|y| Term::Id(y.clone()))
                .ok_or_else(|| Self::hint(span, "id")),
            Ast::Raise(Some(y)) | Ast::Empty(y) => Ok(Term::Empty(self.ty(y, span)?)),
            Ast::Raise(None) => t
                .map(|y| Term::Empty(y.clone()))
                .ok_or_else(|| Self::hint(span, "raise")),
            Ast::RaiseExc(y, e) => {
                let y = self.ty(y, span)?;
                let i = self.exception(e, span)?;
                let esum = self.spec.exceptional_sum.unwrap();
                Ok(Term::comp(vec![Term::Empty(y), Term::Coproj(esum, i as u32)]))
            }
            Ast::Comp(items) => self.comp(items, s, t),
            Ast::Match(bs) => {
                let (sum, order) = self.labelled(bs, span)?;
                let srcs: Vec<Option<Ty>> = self.spec.sum(sum).summands.iter().cloned().map(Some).collect();
                let nodes: Vec<&Node> = order.iter().map(|&j| &bs[j].1).collect();
                let fs = self.branches(&nodes, &srcs, t)?;
                Ok(Term::Match(sum, fs))
            }
            Ast::Case(u, bs) => {
                let scrut = self.term(u, s, None)?;
                let (sum, order) = self.labelled(bs, span)?;
                let srcs: Vec<Option<Ty>> = self.spec.sum(sum).summands.iter().cloned().map(Some).collect();
                let nodes: Vec<&Node> = order.iter().map(|&j| &bs[j].1).collect();
                let fs = self.branches(&nodes, &srcs, t)?;
                Ok(Term::Case {
                    scrut: Box::new(scrut),
                    sum,
                    branches: fs,
                })
            }
            Ast::CaseT(u, f1, f0) => {
                let scrut = self.term(u, s, None)?;
                let (_, y) = self.sig(&scrut, u.span)?;
                let fs = self.branches(&[&**f1, &**f0], &[Some(y), None], t)?;
                let mut it = fs.into_iter();
                Ok(Term::CaseT {
                    scrut: Box::new(scrut),
                    on_value: Box::new(it.next().unwrap()),
                    on_raise: Box::new(it.next().unwrap()),
                })
            }
            Ast::CaseE(u, bs, to) => {
                let scrut = self.term(u, s, Some(&Ty::Zero))?;
                let to = match to {
                    Some(y) => Some(self.ty(y, span)?),
                    None => t.cloned(),
                };
                let branches = self.exc_branches(bs, to.as_ref(), span)?;
                let target = match to {
                    Some(y) => y,
                    None => match branches.iter().flatten().next() {
                        Some(f) => self.sig(f, span)?.1,
                        None => return Err(Self::hint(span, "case^e without branches")),
                    },
                };
                Ok(Term::CaseE {
                    scrut: Box::new(scrut),
                    branches,
                    target,
                })
            }
            Ast::Handle(body, bs) => {
                let b = self.term(body, s, t)?;
                let (_, y) = self.sig(&b, body.span)?;
                let branches = self.exc_branches(bs, Some(&y), span)?;
                Ok(Term::Handle {
                    body: Box::new(b),
                    branches,
                })
            }
        }
    }

    fn comp(&self, items: &[Node], s: Option<&Ty>, t: Option<&Ty>) -> R {
        let n = items.len();
        // innermost first
        let mut out = Vec::with_capacity(n);
        let mut cur = s.cloned();
        let mut stuck = false;
        for i in (0..n).rev() {
            match self.term(&items[i], cur.as_ref(), if i == 0 { t } else { None }) {
                Ok(x) => {
                    cur = Some(self.sig(&x, items[i].span)?.1);
                    out.push(x);
                }
                Err(e) if e.is_missing_hint() => {
                    stuck = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !stuck {
            out.reverse();
            return Ok(Term::comp(out));
        }
        // outermost first
        let mut out = Vec::with_capacity(n);
        let mut cur = t.cloned();
        for (i, item) in items.iter().enumerate() {
            let x = self.term(item, if i + 1 == n { s } else { None }, cur.as_ref())?;
            cur = Some(self.sig(&x, item.span)?.0);
            out.push(x);
        }
        Ok(Term::comp(out))
    }

    /// Elaborates sibling branches that share a target; branches that
    /// need a target hint wait for the others.
    fn branches(&self, nodes: &[&Node], srcs: &[Option<Ty>], t: Option<&Ty>) -> Result<Vec<Term>, DslError> {
        let mut out: Vec<Option<Term>> = vec![None; nodes.len()];
        let mut target = t.cloned();
        for _pass in 0..2 {
            for (i, n) in nodes.iter().enumerate() {
                if out[i].is_some() {
                    continue;
                }
                match self.term(n, srcs[i].as_ref(), target.as_ref()) {
                    Ok(x) => {
                        if target.is_none() {
                            target = Some(self.sig(&x, n.span)?.1);
                        }
                        out[i] = Some(x);
                    }
                    Err(e) if e.is_missing_hint() => {}
                    Err(e) => return Err(e),
                }
            }
        }
        out.into_iter()
            .zip(nodes)
            .map(|(x, n)| x.ok_or_else(|| Self::hint(n.span, "branch")))
            .collect()
    }

    fn exception(&self, e: &str, span: Span) -> Result<usize, DslError> {
        let esum = self
            .spec
            .exceptional_sum
            .ok_or_else(|| DslError::new(span, DslErrorKind::UnknownReference(e.to_string())))?;
        self.spec
            .sum(esum)
            .label_index(e)
            .ok_or_else(|| DslError::new(span, DslErrorKind::UnknownReference(e.to_string())))
    }

    fn exc_branches(
        &self,
        bs: &[(String, Node)],
        t: Option<&Ty>,
        span: Span,
    ) -> Result<Vec<Option<Term>>, DslError> {
        let esum = self
            .spec
            .exceptional_sum
            .ok_or_else(|| DslError::new(span, DslErrorKind::Syntax("no exceptions are declared".into())))?;
        let info = self.spec.sum(esum);
        let mut idx = Vec::new();
        for (l, n) in bs {
            let i = self.exception(l, n.span)?;
            if idx.contains(&i) {
                return Err(DslError::new(n.span, DslErrorKind::Syntax(format!("branch `{l}` given twice"))));
            }
            idx.push(i);
        }
        let srcs: Vec<Option<Ty>> = idx.iter().map(|&i| Some(info.summands[i].clone())).collect();
        let nodes: Vec<&Node> = bs.iter().map(|(_, n)| n).collect();
        let fs = self.branches(&nodes, &srcs, t)?;
        let mut out = vec![None; info.arity()];
        for (i, f) in idx.into_iter().zip(fs) {
            out[i] = Some(f);
        }
        Ok(out)
    }

    /// The sum named by a complete set of branch labels, and the branch
    /// order that lines them up with its summands.
    fn labelled(&self, bs: &[(String, Node)], span: Span) -> Result<(SumId, Vec<usize>), DslError> {
        let first = &bs[0].0;
        let (sum, _) = self
            .spec
            .alias(first)
            .ok_or_else(|| DslError::new(bs[0].1.span, DslErrorKind::UnknownReference(first.clone())))?;
        let info = self.spec.sum(sum);
        let mut order = vec![usize::MAX; info.arity()];
        for (j, (l, n)) in bs.iter().enumerate() {
            match self.spec.alias(l) {
                Some((s, i)) if s == sum && order[i as usize] == usize::MAX => order[i as usize] = j,
                Some(_) => {
                    return Err(DslError::new(
                        n.span,
                        DslErrorKind::Syntax(format!("`{l}` is not a fresh branch of {}", info.name)),
                    ))
                }
                None => return Err(DslError::new(n.span, DslErrorKind::UnknownReference(l.clone()))),
            }
        }
        if order.contains(&usize::MAX) {
            return Err(DslError::new(
                span,
                DslErrorKind::Syntax(format!("missing branches for {}", info.name)),
            ));
        }
        Ok((sum, order))
    }
}

use std::collections::HashMap;

use super::{FiniteModel, ModelError, Val};
use crate::deduction::Store;
use crate::syntax::{SumId, SumKind, Term, Ty};

/// Interprets the terms of a store in a model. Sums with a vertex of their
/// own are tagged unions, other sums are read through their coprojections,
/// and a case is evaluated through the inverse image it unfolds to.
pub struct Evaluator<'a> {
    pub store: &'a mut Store,
    pub model: &'a FiniteModel,
    carriers: HashMap<Ty, Vec<Val>>,
    unfolded: HashMap<Term, Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The first element of the source where the sides differ.
    Fails { element: Val, lhs: Val, rhs: Val },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        *self == Verdict::Holds
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(store: &'a mut Store, model: &'a FiniteModel) -> Evaluator<'a> {
        Evaluator {
            store,
            model,
            carriers: HashMap::new(),
            unfolded: HashMap::new(),
        }
    }

    pub fn carrier(&mut self, ty: &Ty) -> Result<Vec<Val>, ModelError> {
        if let Some(c) = self.carriers.get(ty) {
            return Ok(c.clone());
        }
        let c = match ty {
            Ty::Zero => Vec::new(),
            Ty::Named(n) => {
                let c = self
                    .model
                    .carrier(n)
                    .ok_or_else(|| ModelError::MissingCarrier(n.to_string()))?;
                (0..c.len() as u32).map(Val::Atom).collect()
            }
            Ty::Exc => {
                let c = self
                    .model
                    .exceptions
                    .as_ref()
                    .ok_or_else(|| ModelError::MissingCarrier("E".into()))?;
                (0..c.len() as u32).map(Val::Atom).collect()
            }
            Ty::Vertex(s) => {
                let info = self.store.sum(*s).clone();
                if info.vertex != *ty {
                    return self.carrier(&info.vertex);
                }
                let mut out = Vec::new();
                for (i, t) in info.summands.iter().enumerate() {
                    for w in self.carrier(t)? {
                        out.push(Val::tag(i as u32, w));
                    }
                }
                out
            }
            Ty::Part(ii, k) => {
                let inv = self.store.inverse_image_by_id(*ii).clone();
                let mut out = Vec::new();
                for x in self.carrier(&inv.source)? {
                    let Ok(y) = self.eval(&inv.along, &x) else { continue };
                    if let Some((i, _)) = self.preimage(inv.target, &y)? {
                        if i == *k {
                            out.push(x);
                        }
                    }
                }
                out
            }
        };
        self.carriers.insert(ty.clone(), c.clone());
        Ok(c)
    }

    /// Carries the unfolded cases over to an evaluator for another model
    /// of the same store.
    pub fn take_unfolded(&mut self) -> HashMap<Term, Term> {
        std::mem::take(&mut self.unfolded)
    }

    pub fn with_unfolded(mut self, unfolded: HashMap<Term, Term>) -> Self {
        self.unfolded = unfolded;
        self
    }

    /// Evaluates `t` at `x`, checking that `x` lies in the source carrier.
    pub fn apply(&mut self, t: &Term, x: &Val) -> Result<Val, ModelError> {
        let (src, _) = self.store.signature(t)?;
        if !self.carrier(&src)?.contains(x) {
            return Err(ModelError::ElementOutOfCarrier(format!("{x:?}"), self.store.show_ty(&src)));
        }
        self.eval(t, x)
    }

    pub fn eval(&mut self, t: &Term, x: &Val) -> Result<Val, ModelError> {
        match t {
            Term::Id(_) => Ok(x.clone()),
            Term::Empty(_) => Err(ModelError::EmptySourceUnreachable),
            Term::Comp(items) => {
                let mut v = x.clone();
                for f in items.iter().rev() {
                    v = self.eval(f, &v)?;
                }
                Ok(v)
            }
            Term::Gen(n) => {
                if let Some(body) = self.store.spec().generator(n).and_then(|g| g.body.clone()) {
                    return self.eval(&body, x);
                }
                if let Some(m) = self.model.maps.get(n) {
                    return self.lookup(n, m, x);
                }
                if let Some((s, i)) = self.store.spec().alias(n) {
                    return self.coproj(s, i, x);
                }
                Err(ModelError::MissingMap(n.to_string()))
            }
            Term::Coproj(s, i) => self.coproj(*s, *i, x),
            Term::Match(s, fs) => match self.preimage(*s, x)? {
                Some((i, w)) => self.eval(&fs[i as usize], &w),
                None => Err(ModelError::Undefined(self.store.show(t), format!("{x:?}"))),
            },
            Term::Case { .. } | Term::CaseT { .. } | Term::CaseE { .. } | Term::Handle { .. } => {
                let u = match self.unfolded.get(t) {
                    Some(u) => u.clone(),
                    None => {
                        let u = self
                            .store
                            .unfold_root(t)?
                            .ok_or_else(|| ModelError::Unsupported(self.store.show(t)))?;
                        self.unfolded.insert(t.clone(), u.clone());
                        u
                    }
                };
                self.eval(&u, x)
            }
            Term::InvCoproj(ii, k) => {
                let inv = self.store.inverse_image_by_id(*ii).clone();
                let c = self.store.sum(inv.sum).coprojections[*k as usize].clone();
                if c == *t {
                    Ok(x.clone())
                } else {
                    self.eval(&c, x)
                }
            }
            Term::Restrict(ii, k) => {
                let inv = self.store.inverse_image_by_id(*ii).clone();
                let r = inv.restrictions[*k as usize].clone();
                if r != *t {
                    return self.eval(&r, x);
                }
                let y = self.eval(&inv.along, x)?;
                match self.preimage(inv.target, &y)? {
                    Some((i, w)) if i == *k => Ok(w),
                    _ => Err(ModelError::Undefined(self.store.show(t), format!("{x:?}"))),
                }
            }
        }
    }

    fn lookup(&self, n: &str, m: &std::collections::BTreeMap<Val, Val>, x: &Val) -> Result<Val, ModelError> {
        m.get(x)
            .cloned()
            .ok_or_else(|| ModelError::Undefined(n.to_string(), format!("{x:?}")))
    }

    fn coproj(&mut self, s: SumId, i: u32, x: &Val) -> Result<Val, ModelError> {
        let info = self.store.sum(s);
        if info.vertex == Ty::Vertex(s) {
            return Ok(Val::tag(i, x.clone()));
        }
        let c = &info.coprojections[i as usize];
        if *c != Term::Coproj(s, i) {
            let c = c.clone();
            return self.eval(&c, x);
        }
        let label = &info.labels[i as usize];
        let model = self.model;
        match model.maps.get(label) {
            Some(m) => self.lookup(label, m, x),
            None => Err(ModelError::MissingMap(label.to_string())),
        }
    }

    /// The summand and element a coprojection of `s` sends to `y`.
    pub fn preimage(&mut self, s: SumId, y: &Val) -> Result<Option<(u32, Val)>, ModelError> {
        if self.store.sum(s).vertex == Ty::Vertex(s) {
            return Ok(match y {
                Val::Tag(i, w) => Some((*i, (**w).clone())),
                Val::Atom(_) => None,
            });
        }
        let summands = self.store.sum(s).summands.clone();
        for (i, t) in summands.iter().enumerate() {
            for w in self.carrier(t)? {
                match self.coproj(s, i as u32, &w) {
                    Ok(v) if v == *y => return Ok(Some((i as u32, w))),
                    Ok(_) | Err(ModelError::Undefined(..)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(None)
    }

    /// Evaluation where an undefined map gives `None`.
    pub fn eval_partial(&mut self, t: &Term, x: &Val) -> Result<Option<Val>, ModelError> {
        match self.eval(t, x) {
            Ok(v) => Ok(Some(v)),
            Err(ModelError::Undefined(..)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn show(&self, ty: &Ty, v: &Val) -> String {
        match (ty, v) {
            (Ty::Named(n), Val::Atom(i)) => self
                .model
                .carrier(n)
                .and_then(|c| c.get(*i as usize))
                .cloned()
                .unwrap_or_else(|| format!("#{i}")),
            (Ty::Exc, Val::Atom(i)) => self
                .model
                .exceptions
                .as_ref()
                .and_then(|c| c.get(*i as usize))
                .cloned()
                .unwrap_or_else(|| format!("#{i}")),
            (Ty::Vertex(s), Val::Tag(i, w)) => {
                let info = self.store.sum(*s);
                let inner = self.show(&info.summands[*i as usize], w);
                if info.kind == SumKind::PlusExc {
                    inner
                } else {
                    format!("{}({inner})", info.labels[*i as usize])
                }
            }
            (Ty::Vertex(s), v) => {
                let info = self.store.sum(*s);
                if info.vertex != *ty {
                    self.show(&info.vertex, v)
                } else {
                    format!("{v:?}")
                }
            }
            (Ty::Part(ii, _), v) => {
                let src = self.store.inverse_image_by_id(*ii).source.clone();
                self.show(&src, v)
            }
            (_, v) => format!("{v:?}"),
        }
    }

    /// The form `element` reads back: tagged elements always carry their
    /// coprojection.
    pub fn show_entry(&self, ty: &Ty, v: &Val) -> String {
        if let (Ty::Vertex(s), Val::Tag(i, w)) = (ty, v) {
            let info = self.store.sum(*s);
            if info.vertex == *ty {
                let inner = self.show_entry(&info.summands[*i as usize], w);
                return format!("{}({inner})", info.labels[*i as usize]);
            }
        }
        self.show(ty, v)
    }

    /// `Type:label`, with an element of `Y+E` shown in its own part.
    pub fn show_tagged(&self, ty: &Ty, v: &Val) -> String {
        if let (Ty::Vertex(s), Val::Tag(i, w)) = (ty, v) {
            let info = self.store.sum(*s);
            if info.kind == SumKind::PlusExc {
                let part = &info.summands[*i as usize];
                return format!("{}:{}", self.store.show_ty(part), self.show(part, w));
            }
        }
        format!("{}:{}", self.store.show_ty(ty), self.show(ty, v))
    }

    /// Reads an element of `ty` written as a label, `c(inner)` for a tagged
    /// element, or `Y:label` / `E:label` for an element of `Y+E`.
    pub fn element(&mut self, ty: &Ty, text: &str) -> Result<Val, ModelError> {
        let text = text.trim();
        let out = |ty: &Ty, st: &Store| ModelError::ElementOutOfCarrier(text.to_string(), st.show_ty(ty));
        match ty {
            Ty::Named(n) => self
                .model
                .carrier(n)
                .and_then(|c| c.iter().position(|l| l == text))
                .map(|i| Val::Atom(i as u32))
                .ok_or_else(|| out(ty, self.store)),
            Ty::Exc => self
                .model
                .exceptions
                .as_ref()
                .and_then(|c| c.iter().position(|l| l == text))
                .map(|i| Val::Atom(i as u32))
                .ok_or_else(|| out(ty, self.store)),
            Ty::Zero => Err(out(ty, self.store)),
            Ty::Vertex(s) => {
                let info = self.store.sum(*s).clone();
                if info.vertex != *ty {
                    return self.element(&info.vertex, text);
                }
                if let Some(open) = text.find('(') {
                    if let Some(inner) = text.strip_suffix(')') {
                        let lab = &text[..open];
                        if let Some(i) = info.labels.iter().position(|l| &**l == lab) {
                            let w = self.element(&info.summands[i], &inner[open + 1..])?;
                            return Ok(Val::tag(i as u32, w));
                        }
                    }
                }
                if info.kind == SumKind::PlusExc {
                    if let Some((part, lab)) = text.split_once(':') {
                        let i = if part.trim() == "E" { 1 } else { 0 };
                        if i == 1 || self.store.show_ty(&info.summands[0]) == part.trim() {
                            let w = self.element(&info.summands[i], lab)?;
                            return Ok(Val::tag(i as u32, w));
                        }
                    }
                }
                Err(out(ty, self.store))
            }
            Ty::Part(ii, _) => {
                let src = self.store.inverse_image_by_id(*ii).source.clone();
                let v = self.element(&src, text)?;
                if self.carrier(ty)?.contains(&v) {
                    Ok(v)
                } else {
                    Err(out(ty, self.store))
                }
            }
        }
    }
}

/// Compares both sides on every element of their source where both are
/// defined.
pub fn check_equation(ev: &mut Evaluator, lhs: &Term, rhs: &Term) -> Result<Verdict, ModelError> {
    let (src, _) = ev.store.signature(lhs)?;
    for x in ev.carrier(&src)? {
        // a side undefined only where a partial map truncates the model
        let (Some(a), Some(b)) = (ev.eval_partial(lhs, &x)?, ev.eval_partial(rhs, &x)?) else {
            continue;
        };
        if a != b {
            return Ok(Verdict::Fails {
                element: x,
                lhs: a,
                rhs: b,
            });
        }
    }
    Ok(Verdict::Holds)
}

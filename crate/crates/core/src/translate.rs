//! Translations out of the decorated logic: undecoration into the basic
//! logic and expansion into the explicit logic.

use std::collections::HashMap;

use thiserror::Error;

use crate::deduction::{BranchMode, DeductionError, Flavor, Store};
use crate::syntax::{
    name, Decoration, Equation, GenDecl, InvId, Item, Logic, Origin, SpecBuilder, SpecError, Specification,
    SumId, SumKind, SumVertex, Term, Ty,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("expected a decorated specification, found a {0} one")]
    KindMismatch(Logic),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Deduction(#[from] DeductionError),
    #[error("cannot translate {0}")]
    Unsupported(String),
}

#[derive(Clone, Debug)]
pub struct TranslationResult {
    pub target: Specification,
    /// Generators and their images, in declaration order.
    pub terms: Vec<(Term, Term)>,
    /// Axioms and their images.
    pub equations: Vec<(Equation, Equation)>,
    /// One line per generated or rewritten item.
    pub provenance: Vec<String>,
}

/// The basic specification with the same graph: decorations are dropped,
/// exceptions become ordinary generators into 0 and the exceptional sum a
/// declared sum with vertex 0.
pub fn undecorate_spec(spec: &Specification) -> Specification {
    let mut out = spec.clone();
    if spec.logic != Logic::Decorated {
        return out;
    }
    out.logic = Logic::Basic;
    for g in &mut out.generators {
        g.decoration = Decoration::Plain;
        g.exception = false;
    }
    for eq in &mut out.axioms {
        eq.level = Decoration::Plain;
    }
    let esum = out.exceptional_sum;
    if let Some(e) = esum {
        out.sums[e.index()].kind = SumKind::Ordinary;
    }
    let last = spec.items.iter().rposition(|i| matches!(i, Item::Exception(_)));
    let mut items = Vec::with_capacity(spec.items.len() + 1);
    if let (None, Some(e)) = (last, esum) {
        items.push(Item::Sum(e));
    }
    for (pos, item) in spec.items.iter().enumerate() {
        match item {
            Item::Exception(i) => {
                let g = spec.gen_index[&spec.exceptions[*i].name];
                items.push(Item::Fun(g));
            }
            other => items.push(other.clone()),
        }
        if Some(pos) == last {
            items.push(Item::Sum(esum.expect("exceptions imply an exceptional sum")));
        }
    }
    out.items = items;
    out.exceptions.clear();
    out
}

pub fn undecorate(spec: &Specification) -> Result<TranslationResult, TranslateError> {
    if spec.logic != Logic::Decorated {
        return Err(TranslateError::KindMismatch(spec.logic));
    }
    let target = undecorate_spec(spec);
    let mut terms = Vec::new();
    let mut provenance = Vec::new();
    for g in &spec.generators {
        let t = Term::Gen(g.name.clone());
        terms.push((t.clone(), t));
        provenance.push(format!(
            "fun {}: {} {} kept undecorated",
            g.name,
            if g.exception { "exception" } else { g.decoration.as_str() },
            g.name
        ));
    }
    if let Some(e) = spec.exceptional_sum {
        provenance.push(format!(
            "sum 0: exceptional sum {}",
            crate::print::sum_decl(spec, e)
        ));
    }
    let equations = spec
        .axioms
        .iter()
        .map(|e| {
            let mut f = e.clone();
            f.level = Decoration::Plain;
            (e.clone(), f)
        })
        .collect();
    Ok(TranslationResult {
        target,
        terms,
        equations,
        provenance,
    })
}

/// Translated term: a value keeps its signature, a computation `X -> Y`
/// becomes a function `X -> Y+E`.
#[derive(Clone, Debug)]
enum Tr {
    V(Term),
    C(Term),
}

/// The expansion of a decorated store into an explicit one.
pub struct Expansion {
    pub deco: Store,
    pub expl: Store,
    sum_map: HashMap<SumId, SumId>,
    inv_map: HashMap<InvId, InvId>,
    esum: Option<SumId>,
    esum_x: SumId,
    terms: Vec<(Term, Term)>,
    equations: Vec<(Equation, Equation)>,
    provenance: Vec<String>,
}

fn plus_exc_decl(
    b: &mut SpecBuilder,
    y: Ty,
    prov: &mut Vec<String>,
) -> Result<(), TranslateError> {
    let shown = crate::print::ty(b.spec(), &y);
    let id = b.declare_sum(
        SumVertex::Fresh(name(&format!("{shown}+E"))),
        vec![
            (name(&format!("inl@{shown}")), y),
            (name(&format!("inr@{shown}")), Ty::Exc),
        ],
    )?;
    b.set_sum_kind(id, SumKind::PlusExc);
    prov.push(format!("sum {shown}+E: generated for {shown}"));
    Ok(())
}

impl Expansion {
    pub fn new(deco: Store) -> Result<Expansion, TranslateError> {
        let spec = deco.spec().clone();
        if spec.logic != Logic::Decorated {
            return Err(TranslateError::KindMismatch(spec.logic));
        }
        let mut b = SpecBuilder::new(Logic::Explicit);
        let mut prov = Vec::new();
        let mut sum_map = HashMap::new();
        let mut pe: HashMap<Ty, Ty> = HashMap::new();
        let pe_vertex = |b: &SpecBuilder, y: &Ty| -> Ty {
            b.resolve_type(&format!("{}+E", crate::print::ty(b.spec(), y))).expect("declared with its type")
        };
        plus_exc_decl(&mut b, Ty::Zero, &mut prov)?;
        pe.insert(Ty::Zero, pe_vertex(&b, &Ty::Zero));
        let mut esum_x = None;
        if spec.exceptions.is_empty() {
            esum_x = Some(b.declare_sum(SumVertex::Existing(Ty::Exc), Vec::new())?);
            prov.push("sum E = 0: no exceptions are declared".into());
        }
        let last = spec.items.iter().rposition(|i| matches!(i, Item::Exception(_)));
        let map_ty = |sum_map: &HashMap<SumId, SumId>, t: &Ty| -> Ty {
            match t {
                Ty::Vertex(s) => Ty::Vertex(sum_map[s]),
                other => other.clone(),
            }
        };
        for (pos, item) in spec.items.iter().enumerate() {
            match item {
                Item::Type(i) => {
                    let n = spec.types[*i].clone();
                    b.declare_type(n.clone())?;
                    let y = Ty::Named(n);
                    plus_exc_decl(&mut b, y.clone(), &mut prov)?;
                    pe.insert(y.clone(), pe_vertex(&b, &y));
                }
                Item::Sum(id) => {
                    let info = spec.sum(*id).clone();
                    let summands: Vec<_> = info
                        .labels
                        .iter()
                        .cloned()
                        .zip(info.summands.iter().map(|t| map_ty(&sum_map, t)))
                        .collect();
                    let fresh = info.vertex == Ty::Vertex(*id);
                    let v = if fresh {
                        SumVertex::Fresh(info.name.clone())
                    } else {
                        SumVertex::Existing(map_ty(&sum_map, &info.vertex))
                    };
                    let new = b.declare_sum(v, summands)?;
                    sum_map.insert(*id, new);
                    if fresh {
                        let y = Ty::Vertex(new);
                        plus_exc_decl(&mut b, y.clone(), &mut prov)?;
                        pe.insert(y.clone(), pe_vertex(&b, &y));
                    }
                }
                Item::Exception(i) => {
                    let e = &spec.exceptions[*i];
                    b.declare_fun(e.name.clone(), map_ty(&sum_map, &e.param), Ty::Exc, None, None)?;
                    prov.push(format!(
                        "fun {}: exception {} of {}",
                        e.name,
                        e.name,
                        crate::print::ty(&spec, &e.param)
                    ));
                    if Some(pos) == last {
                        let parts = spec
                            .exceptions
                            .iter()
                            .map(|e| (e.name.clone(), map_ty(&sum_map, &e.param)))
                            .collect();
                        esum_x = Some(b.declare_sum(SumVertex::Existing(Ty::Exc), parts)?);
                        prov.push("sum E: the exceptional sum, with the exceptions as coprojections".into());
                    }
                }
                Item::Fun(i) => {
                    let g = &spec.generators[*i];
                    if g.body.is_some() {
                        continue;
                    }
                    let src = map_ty(&sum_map, &g.source);
                    let tgt = map_ty(&sum_map, &g.target);
                    let tgt = if g.decoration == Decoration::Computation { pe[&tgt].clone() } else { tgt };
                    b.declare_fun(g.name.clone(), src, tgt, None, None)?;
                    prov.push(format!("fun {}: {} {}", g.name, g.decoration.as_str(), g.name));
                }
                Item::Axiom(_) => {}
            }
        }
        let skeleton = b.build()?;
        let mut expl = Store::new(skeleton);
        expl.depth = deco.depth;
        expl.budget = deco.budget;
        let esum = spec.exceptional_sum;
        let esum_x = esum_x.expect("the exceptional sum is always translated");
        if let Some(e) = esum {
            sum_map.insert(e, esum_x);
        }
        let mut x = Expansion {
            deco,
            expl,
            sum_map,
            inv_map: HashMap::new(),
            esum,
            esum_x,
            terms: Vec::new(),
            equations: Vec::new(),
            provenance: prov,
        };
        x.definitions(&spec)?;
        Ok(x)
    }

    /// Translates definitions and axioms, in declaration order.
    fn definitions(&mut self, spec: &Specification) -> Result<(), TranslateError> {
        for item in &spec.items {
            match item {
                Item::Fun(i) => {
                    let g = spec.generators[*i].clone();
                    if let Some(body) = &g.body {
                        let t = self.term(body)?;
                        let (s, tg) = self.expl.signature(&t)?;
                        self.expl.define(GenDecl {
                            name: g.name.clone(),
                            source: s,
                            target: tg,
                            decoration: Decoration::Plain,
                            exception: false,
                            body: Some(t),
                        });
                        self.provenance
                            .push(format!("fun {}: {} definition {}", g.name, g.decoration.as_str(), g.name));
                    }
                    let src = Term::Gen(g.name.clone());
                    let img = self.term(&src)?;
                    self.terms.push((src, img));
                }
                Item::Exception(i) => {
                    let src = Term::Gen(spec.exceptions[*i].name.clone());
                    let img = self.term(&src)?;
                    self.terms.push((src, img));
                }
                Item::Axiom(i) => {
                    let eq = spec.axioms[*i].clone();
                    let (l, r) = self.equation(&eq.lhs, &eq.rhs)?;
                    let out = Equation {
                        lhs: l,
                        rhs: r,
                        level: Decoration::Plain,
                        origin: Origin::Axiom,
                    };
                    self.expl.add_axiom(out.clone());
                    self.provenance.push(format!("eq #{}: {} axiom", i + 1, eq.level.as_str()));
                    self.equations.push((eq, out));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn result(&self) -> TranslationResult {
        TranslationResult {
            target: self.expl.spec().clone(),
            terms: self.terms.clone(),
            equations: self.equations.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// The image of a decorated term: values keep their signature,
    /// computations target `Y+E`.
    pub fn term(&mut self, t: &Term) -> Result<Term, TranslateError> {
        let d = self.deco.decoration(t)?;
        match (self.tr(t)?, d) {
            (Tr::V(v), Decoration::Computation) => Ok(self.lift_value(v)?),
            (Tr::V(v), _) => Ok(v),
            (Tr::C(c), Decoration::Computation) => Ok(c),
            (Tr::C(_), _) => Err(TranslateError::Unsupported(format!(
                "value {} translated as a computation",
                self.deco.show(t)
            ))),
        }
    }

    /// The image of a decorated term as a function into `Y+E`.
    pub fn computation(&mut self, t: &Term) -> Result<Term, TranslateError> {
        let x = self.tr(t)?;
        self.c(x)
    }

    /// The image of an equation; both sides are taken at the level of the
    /// equation.
    pub fn equation(&mut self, l: &Term, r: &Term) -> Result<(Term, Term), TranslateError> {
        let level = self.deco.decoration(l)?.join(self.deco.decoration(r)?);
        if level == Decoration::Computation {
            Ok((self.computation(l)?, self.computation(r)?))
        } else {
            Ok((self.term(l)?, self.term(r)?))
        }
    }

    pub fn map_ty(&mut self, t: &Ty) -> Result<Ty, TranslateError> {
        Ok(match t {
            Ty::Named(_) | Ty::Zero => t.clone(),
            Ty::Exc => return Err(TranslateError::Unsupported("E in a decorated term".into())),
            Ty::Vertex(s) => Ty::Vertex(self.map_sum(*s)?),
            Ty::Part(ii, k) => {
                let x = self.map_inv(*ii)?;
                let s = self.expl.inverse_image_by_id(x).sum;
                self.expl.sum(s).summands[*k as usize].clone()
            }
        })
    }

    pub fn map_sum(&mut self, s: SumId) -> Result<SumId, TranslateError> {
        if let Some(&x) = self.sum_map.get(&s) {
            return Ok(x);
        }
        let info = self.deco.sum(s).clone();
        let x = match info.kind {
            SumKind::PlusZero => {
                let y = self.map_ty(&info.summands[0])?;
                self.expl.plus_zero(&y)
            }
            SumKind::Derived => {
                let owner = self
                    .deco
                    .inverse_images()
                    .iter()
                    .find(|i| i.sum == s)
                    .map(|i| i.id);
                match owner {
                    Some(ii) => {
                        let x = self.map_inv(ii)?;
                        self.expl.inverse_image_by_id(x).sum
                    }
                    None => {
                        let mut tys = Vec::with_capacity(info.arity());
                        for t in &info.summands {
                            tys.push(self.map_ty(t)?);
                        }
                        let id = SumId(self.expl.sums().len() as u32);
                        let cs = (0..tys.len() as u32).map(|j| Term::Coproj(id, j)).collect();
                        self.expl
                            .add_sum(info.name.clone(), None, tys, cs, SumKind::Derived, Some(info.labels.clone()))
                    }
                }
            }
            _ => {
                return Err(TranslateError::Unsupported(format!("sum {}", info.name)));
            }
        };
        self.sum_map.insert(s, x);
        Ok(x)
    }

    /// The explicit inverse image standing for a decorated one: the one the
    /// explicit store computes itself when its summands line up, otherwise
    /// the translated data registered as is.
    pub fn map_inv(&mut self, ii: InvId) -> Result<InvId, TranslateError> {
        if let Some(&x) = self.inv_map.get(&ii) {
            return Ok(x);
        }
        let inv = self.deco.inverse_image_by_id(ii).clone();
        let (target, along) = match inv.flavor {
            Flavor::Value => (self.map_sum(inv.target)?, self.value(&inv.along)?),
            Flavor::Computation => {
                let y = self.map_ty(&self.deco.sum(inv.target).vertex.clone())?;
                (self.expl.plus_exc(&y), self.computation(&inv.along)?)
            }
            Flavor::Exceptional => (self.esum_x, self.collapse_term(&inv.along)?),
        };
        let source = self.map_ty(&inv.source)?;
        let natural = self.expl.inverse_image(target, &along).ok();
        let x = if inv.opaque {
            match natural {
                Some(n) => n,
                None => self.expl.import_inverse(target, &along, source, None)?,
            }
        } else {
            let dsum = self.deco.sum(inv.sum).clone();
            let mut tys = Vec::with_capacity(dsum.arity());
            for t in &dsum.summands {
                tys.push(self.map_ty(t)?);
            }
            let lines_up = natural.filter(|&n| {
                let s = self.expl.inverse_image_by_id(n).sum;
                self.expl.sum(s).summands == tys
            });
            match lines_up {
                Some(n) => n,
                None => {
                    let mut cs = Vec::new();
                    for c in &dsum.coprojections {
                        cs.push(self.value(c)?);
                    }
                    let mut rs = Vec::new();
                    for (k, r) in inv.restrictions.iter().enumerate() {
                        rs.push(if inv.flavor == Flavor::Computation && k == 1 {
                            self.collapse_term(r)?
                        } else {
                            self.value(r)?
                        });
                    }
                    self.expl.import_inverse(target, &along, source, Some((tys, cs, rs)))?
                }
            }
        };
        self.inv_map.insert(ii, x);
        Ok(x)
    }

    fn value(&mut self, t: &Term) -> Result<Term, TranslateError> {
        match self.tr(t)? {
            Tr::V(v) => Ok(v),
            Tr::C(_) => Err(TranslateError::Unsupported(format!(
                "{} is expected to be a value",
                self.deco.show(t)
            ))),
        }
    }

    /// The image of `t : X -> 0` as a function `X -> E`.
    fn collapse_term(&mut self, t: &Term) -> Result<Term, TranslateError> {
        match self.tr(t)? {
            Tr::V(v) => Ok(Term::comp(vec![Term::Empty(Ty::Exc), v])),
            Tr::C(c) => self.collapse(c),
        }
    }

    /// `X -> 0+E` seen as `X -> E`.
    fn collapse(&mut self, c: Term) -> Result<Term, TranslateError> {
        let p0 = self.expl.plus_exc(&Ty::Zero);
        let chain = c.chain();
        if chain.first() == Some(&Term::Coproj(p0, 1)) {
            if chain.len() == 1 {
                return Ok(Term::Id(Ty::Exc));
            }
            return Ok(Term::comp(chain[1..].to_vec()));
        }
        Ok(Term::comp(vec![
            Term::Match(p0, vec![Term::Empty(Ty::Exc), Term::Id(Ty::Exc)]),
            c,
        ]))
    }

    fn c(&mut self, x: Tr) -> Result<Term, TranslateError> {
        match x {
            Tr::V(v) => self.lift_value(v),
            Tr::C(c) => Ok(c),
        }
    }

    fn lift_value(&mut self, v: Term) -> Result<Term, TranslateError> {
        let (_, y) = self.expl.signature(&v)?;
        let pe = self.expl.plus_exc(&y);
        Ok(Term::comp(vec![Term::Coproj(pe, 0), v]))
    }

    fn inl(&mut self, y: &Ty) -> Term {
        Term::Coproj(self.expl.plus_exc(y), 0)
    }

    fn inr(&mut self, y: &Ty) -> Term {
        Term::Coproj(self.expl.plus_exc(y), 1)
    }

    /// `Y` for a vertex `Y+E`.
    fn exc_base(&self, t: &Ty) -> Result<(SumId, Ty), TranslateError> {
        if let Ty::Vertex(s) = t {
            let info = self.expl.sum(*s);
            if info.kind == SumKind::PlusExc {
                return Ok((*s, info.summands[0].clone()));
            }
        }
        Err(TranslateError::Unsupported(format!(
            "{} is not of the form Y+E",
            self.expl.show_ty(t)
        )))
    }

    /// `h` after `f`, propagating exceptions raised by `f`.
    fn seq(&mut self, f: Tr, h: Tr) -> Result<Tr, TranslateError> {
        Ok(match (f, h) {
            (Tr::V(f), Tr::V(g)) => Tr::V(Term::comp(vec![g, f])),
            (Tr::V(f), Tr::C(g)) => Tr::C(Term::comp(vec![g, f])),
            (Tr::C(f), h) => {
                let (_, fe) = self.expl.signature(&f)?;
                let (pa, a) = self.exc_base(&fe)?;
                let b = match &h {
                    Tr::V(g) => self.expl.signature(g)?.1,
                    Tr::C(g) => {
                        let (_, ge) = self.expl.signature(g)?;
                        self.exc_base(&ge)?.1
                    }
                };
                let inr = self.inr(&b);
                if a == Ty::Zero {
                    let e = self.collapse(f)?;
                    Tr::C(Term::comp(vec![inr, e]))
                } else {
                    let left = match h {
                        Tr::V(g) => Term::comp(vec![self.inl(&b), g]),
                        Tr::C(g) => g,
                    };
                    Tr::C(Term::comp(vec![Term::Match(pa, vec![left, inr]), f]))
                }
            }
        })
    }

    fn tr(&mut self, t: &Term) -> Result<Tr, TranslateError> {
        Ok(match t {
            Term::Gen(n) => {
                if let Some((s, i)) = self.deco.spec().alias(n) {
                    return self.tr(&Term::Coproj(s, i));
                }
                let g = self
                    .deco
                    .spec()
                    .generator(n)
                    .ok_or_else(|| TranslateError::Unsupported(format!("unknown generator {n}")))?;
                if g.decoration == Decoration::Computation {
                    Tr::C(t.clone())
                } else {
                    Tr::V(t.clone())
                }
            }
            Term::Id(y) => Tr::V(Term::Id(self.map_ty(y)?)),
            Term::Empty(y) => Tr::V(Term::Empty(self.map_ty(y)?)),
            Term::Coproj(s, i) => {
                if Some(*s) == self.esum {
                    let inr = self.inr(&Ty::Zero);
                    Tr::C(Term::comp(vec![inr, Term::Coproj(self.esum_x, *i)]))
                } else {
                    Tr::V(Term::Coproj(self.map_sum(*s)?, *i))
                }
            }
            Term::Comp(items) => {
                let mut acc: Option<Tr> = None;
                for item in items.iter().rev() {
                    let x = self.tr(item)?;
                    acc = Some(match acc {
                        None => x,
                        Some(a) => self.seq(a, x)?,
                    });
                }
                acc.ok_or_else(|| TranslateError::Unsupported("empty composition".into()))?
            }
            Term::Match(s, fs) => {
                if Some(*s) == self.esum {
                    let (_, z) = self.deco.signature(t)?;
                    let z = self.map_ty(&z)?;
                    return Ok(Tr::V(if z == Ty::Zero { Term::Id(Ty::Zero) } else { Term::Empty(z) }));
                }
                let s2 = self.map_sum(*s)?;
                let bs = self.branches(fs)?;
                match bs {
                    Ok(vs) => Tr::V(Term::Match(s2, vs)),
                    Err(cs) => Tr::C(Term::Match(s2, cs)),
                }
            }
            Term::Case {
                scrut,
                sum,
                branches,
            } => {
                let u = self.value(scrut)?;
                let s2 = self.map_sum(*sum)?;
                let ii = self.deco.inverse_image(*sum, scrut)?;
                let jj = self.expl.inverse_image(s2, &u)?;
                if self.surface_ok(ii, jj, branches)? {
                    match self.branches(branches)? {
                        Ok(vs) => Tr::V(Term::Case {
                            scrut: Box::new(u),
                            sum: s2,
                            branches: vs,
                        }),
                        Err(cs) => Tr::C(Term::Case {
                            scrut: Box::new(u),
                            sum: s2,
                            branches: cs,
                        }),
                    }
                } else {
                    self.unfolded(t)?
                }
            }
            Term::CaseT {
                scrut,
                on_value,
                on_raise,
            } => {
                let u = self.computation(scrut)?;
                let (_, y) = self.deco.signature(scrut)?;
                let y2 = self.map_ty(&y)?;
                let pe = self.expl.plus_exc(&y2);
                let ii = self.deco.inverse_image_comp(scrut)?;
                let jj = self.expl.inverse_image(pe, &u)?;
                let (r_src, _) = self.deco.signature(on_raise)?;
                let propagate = r_src == Ty::Zero;
                let ok = if propagate {
                    self.surface_ok(ii, jj, std::slice::from_ref(on_value))?
                } else {
                    self.surface_ok(ii, jj, &[(**on_value).clone(), (**on_raise).clone()])?
                };
                if ok {
                    let (_, z) = self.deco.signature(t)?;
                    let z2 = self.map_ty(&z)?;
                    let b1 = self.computation(on_value)?;
                    let b0 = if propagate { self.inr(&z2) } else { self.computation(on_raise)? };
                    Tr::C(Term::Case {
                        scrut: Box::new(u),
                        sum: pe,
                        branches: vec![b1, b0],
                    })
                } else {
                    self.unfolded(t)?
                }
            }
            Term::CaseE {
                scrut,
                branches,
                target,
            } => {
                let y2 = self.map_ty(target)?;
                let e = self.collapse_term(scrut)?;
                if branches.iter().all(|b| b.is_none()) {
                    let inr = self.inr(&y2);
                    return Ok(Tr::C(Term::comp(vec![inr, e])));
                }
                let ii = self
                    .deco
                    .exceptional_inverse_image(scrut)?;
                let jj = self.expl.inverse_image(self.esum_x, &e)?;
                let given: Vec<(usize, Term)> = branches
                    .iter()
                    .enumerate()
                    .filter_map(|(i, b)| b.clone().map(|f| (i, f)))
                    .collect();
                if self.surface_ok_at(ii, jj, &given)? {
                    let bs = self.exc_branches(branches, &y2)?;
                    Tr::C(Term::Case {
                        scrut: Box::new(e),
                        sum: self.esum_x,
                        branches: bs,
                    })
                } else {
                    self.unfolded(t)?
                }
            }
            Term::Handle { body, branches } => {
                let (_, y) = self.deco.signature(body)?;
                let y2 = self.map_ty(&y)?;
                let u = self.computation(body)?;
                if branches.iter().all(|b| b.is_none()) {
                    return Ok(Tr::C(u));
                }
                // branches must read the exception parameter itself
                let ii = self.deco.inverse_image_comp(body)?;
                let u0 = self.deco.inverse_image_by_id(ii).restrictions[1].clone();
                let kk = self.deco.exceptional_inverse_image(&u0)?;
                let mut ok = true;
                for (i, b) in branches.iter().enumerate() {
                    if let Some(f) = b {
                        let (src, _) = self.deco.signature(f)?;
                        let m = self.deco.branch_mode(kk, i, &src);
                        ok &= matches!(m, Some(BranchMode::Original | BranchMode::Either));
                    }
                }
                if ok {
                    let h = Term::Match(self.esum_x, self.exc_branches(branches, &y2)?);
                    let pe = self.expl.plus_exc(&y2);
                    let inl = self.inl(&y2);
                    Tr::C(Term::comp(vec![Term::Match(pe, vec![inl, h]), u]))
                } else {
                    self.unfolded(t)?
                }
            }
            Term::InvCoproj(ii, k) => {
                let x = self.map_inv(*ii)?;
                let s = self.expl.inverse_image_by_id(x).sum;
                Tr::V(self.expl.sum(s).coprojections[*k as usize].clone())
            }
            Term::Restrict(ii, k) => {
                let x = self.map_inv(*ii)?;
                let r = self.expl.inverse_image_by_id(x).restrictions[*k as usize].clone();
                if self.deco.inverse_image_by_id(*ii).flavor == Flavor::Computation && *k == 1 {
                    let inr = self.inr(&Ty::Zero);
                    Tr::C(Term::comp(vec![inr, r]))
                } else {
                    Tr::V(r)
                }
            }
        })
    }

    fn unfolded(&mut self, t: &Term) -> Result<Tr, TranslateError> {
        let u = self
            .deco
            .unfold_root(t)?
            .ok_or_else(|| TranslateError::Unsupported(self.deco.show(t)))?;
        self.tr(&u)
    }

    /// Branches of a match or case: all values, or all computations.
    fn branches(&mut self, fs: &[Term]) -> Result<Result<Vec<Term>, Vec<Term>>, TranslateError> {
        let mut trs = Vec::with_capacity(fs.len());
        for f in fs {
            trs.push(self.tr(f)?);
        }
        if trs.iter().all(|x| matches!(x, Tr::V(_))) {
            return Ok(Ok(trs
                .into_iter()
                .map(|x| match x {
                    Tr::V(v) => v,
                    Tr::C(c) => c,
                })
                .collect()));
        }
        let mut cs = Vec::with_capacity(trs.len());
        for x in trs {
            cs.push(self.c(x)?);
        }
        Ok(Err(cs))
    }

    /// Exceptional branches over `E`, defaults re-raising.
    fn exc_branches(&mut self, branches: &[Option<Term>], y2: &Ty) -> Result<Vec<Term>, TranslateError> {
        let mut out = Vec::with_capacity(branches.len());
        for (i, b) in branches.iter().enumerate() {
            out.push(match b {
                Some(f) => self.computation(f)?,
                None => {
                    let inr = self.inr(y2);
                    Term::comp(vec![inr, Term::Coproj(self.esum_x, i as u32)])
                }
            });
        }
        Ok(out)
    }

    fn surface_ok(&mut self, ii: InvId, jj: InvId, fs: &[Term]) -> Result<bool, TranslateError> {
        let given: Vec<(usize, Term)> = fs.iter().cloned().enumerate().collect();
        self.surface_ok_at(ii, jj, &given)
    }

    /// True when every branch is read the same way on both sides, so the
    /// case can be translated without unfolding it.
    fn surface_ok_at(&mut self, ii: InvId, jj: InvId, given: &[(usize, Term)]) -> Result<bool, TranslateError> {
        for (k, f) in given {
            let (src, _) = self.deco.signature(f)?;
            let src2 = self.map_ty(&src)?;
            let a = self.deco.branch_mode(ii, *k, &src);
            let b = self.expl.branch_mode(jj, *k, &src2);
            match (a, b) {
                (Some(a), Some(b)) if a.agrees(b) => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

/// Expands a decorated specification into an explicit one.
pub fn expand(spec: &Specification) -> Result<TranslationResult, TranslateError> {
    if spec.logic != Logic::Decorated {
        return Err(TranslateError::KindMismatch(spec.logic));
    }
    Ok(Expansion::new(Store::new(spec.clone()))?.result())
}

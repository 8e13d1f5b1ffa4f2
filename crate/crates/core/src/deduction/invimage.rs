//! Inverse images of sums along terms, with the recognized special forms.

use super::trace::{Rule, Step};
use super::{DeductionError, ExtRule, Flavor, InverseImage, Store};
use crate::syntax::{name, Decoration, InvId, SumId, SumKind, Term, Ty};

/// One summand of a pulled-back sum.
#[derive(Clone, Debug)]
struct Piece {
    ty: Ty,
    coproj: Term,
    restr: Term,
}

fn empty_to(ty: &Ty) -> Term {
    if *ty == Ty::Zero {
        Term::Id(Ty::Zero)
    } else {
        Term::Empty(ty.clone())
    }
}

fn rest_or_id(rest: &[Term], x: &Ty) -> Term {
    if rest.is_empty() {
        Term::Id(x.clone())
    } else {
        Term::comp(rest.to_vec())
    }
}

enum Analysis {
    Pieces(Vec<Piece>),
    /// The pulled-back sum is the target sum itself.
    Itself,
    Opaque,
}

impl Store {
    /// Value-flavor inverse image of `sum` along the value `u`.
    pub fn inverse_image(&mut self, sum: SumId, u: &Term) -> Result<InvId, DeductionError> {
        self.inverse_image_flavored(sum, u, Flavor::Value)
    }

    /// Computation-flavor inverse image of `Y = Y + 0` along `u : X -> Y`.
    pub fn inverse_image_comp(&mut self, u: &Term) -> Result<InvId, DeductionError> {
        let (_, y) = self.signature(u)?;
        let pz = self.plus_zero(&y);
        self.inverse_image_flavored(pz, u, Flavor::Computation)
    }

    /// Inverse image of the exceptional sum along `u : X -> 0`.
    pub fn exceptional_inverse_image(&mut self, u: &Term) -> Result<InvId, DeductionError> {
        let esum = self
            .spec
            .exceptional_sum
            .ok_or_else(|| DeductionError::Unsupported("no exceptional sum".into()))?;
        self.inverse_image_flavored(esum, u, Flavor::Exceptional)
    }

    pub(crate) fn inverse_image_traced(
        &mut self,
        sum: SumId,
        u: &Term,
        flavor: Flavor,
        info: &mut Vec<Step>,
    ) -> Result<InvId, DeductionError> {
        let ii = self.inverse_image_flavored(sum, u, flavor)?;
        info.push(Step {
            rule: Rule::InverseImage,
            position: String::new(),
            path: Vec::new(),
            before: u.clone(),
            after: u.clone(),
            inv: Some(ii),
            sum: Some(sum),
            detail: self.describe_inverse(ii, u),
        });
        Ok(ii)
    }

    /// Human-readable account of an inverse image taken along `u`.
    pub fn describe_inverse(&self, ii: InvId, u: &Term) -> String {
        let inv = &self.invs[ii.index()];
        let s = self.sum(inv.sum);
        let parts: Vec<String> = s.summands.iter().map(|y| self.show_ty(y)).collect();
        let coprojs: Vec<String> = s.coprojections.iter().map(|c| self.show(c)).collect();
        let restr: Vec<String> = inv.restrictions.iter().map(|r| self.show(r)).collect();
        format!(
            "{} inverse image of {} along {}: {} = {} with coprojections {}; restrictions {}",
            inv.flavor.as_str(),
            crate::print::sum_decl(self, inv.target),
            self.show(u),
            self.show_ty(&inv.source),
            if parts.is_empty() { "0".into() } else { parts.join(" + ") },
            coprojs.join(", "),
            restr.join(", ")
        )
    }

    pub(crate) fn inverse_image_flavored(
        &mut self,
        sum: SumId,
        u: &Term,
        flavor: Flavor,
    ) -> Result<InvId, DeductionError> {
        let (x, y) = self.signature(u)?;
        let info = self.sum(sum).clone();
        match flavor {
            Flavor::Value => {
                if self.decoration(u)? == Decoration::Computation {
                    return Err(DeductionError::NotAValue(self.show(u)));
                }
                if y != info.vertex {
                    return Err(DeductionError::TypeMismatch(format!(
                        "{} does not target the vertex {}",
                        self.show(u),
                        self.show_ty(&info.vertex)
                    )));
                }
            }
            Flavor::Computation => {
                if info.kind != SumKind::PlusZero || y != info.vertex {
                    return Err(DeductionError::TypeMismatch(
                        "computation inverse images are taken of Y = Y + 0".into(),
                    ));
                }
            }
            Flavor::Exceptional => {
                if y != Ty::Zero {
                    return Err(DeductionError::TargetNotZero(self.show(u)));
                }
            }
        }
        let u_nf = self.nf(u)?;
        let key = (sum, u_nf.clone(), flavor);
        if let Some(&ii) = self.inv_keys.get(&key) {
            return Ok(ii);
        }
        let analysis = self.analyze(sum, &u_nf, &x, flavor)?;
        let ii = match analysis {
            Analysis::Itself => {
                let restrictions = info.summands.iter().map(|t| Term::Id(t.clone())).collect();
                self.register(key, x, sum, restrictions, false)
            }
            Analysis::Pieces(pieces) => {
                let mut coprojs = Vec::new();
                let mut restr = Vec::new();
                let mut tys = Vec::new();
                for p in pieces {
                    tys.push(p.ty);
                    coprojs.push(self.nf(&p.coproj)?);
                    restr.push(self.nf(&p.restr)?);
                }
                let label = format!("{}⁻¹({})", crate::print::atom(self, &u_nf), info.name);
                let s = self.add_sum(name(&label), Some(x.clone()), tys, coprojs, SumKind::Derived, None);
                self.register(key, x, s, restr, false)
            }
            Analysis::Opaque => self.opaque(key, x, &info.coprojections)?,
        };
        Ok(ii)
    }

    fn register(
        &mut self,
        key: super::InvKey,
        source: Ty,
        sum: SumId,
        restrictions: Vec<Term>,
        opaque: bool,
    ) -> InvId {
        let id = InvId(self.invs.len() as u32);
        let (target, along, flavor) = key.clone();
        self.invs.push(InverseImage {
            id,
            target,
            along: along.clone(),
            flavor,
            source,
            sum,
            restrictions: restrictions.clone(),
            opaque,
        });
        self.inv_keys.entry(key).or_insert(id);
        let target_coprojs = self.sum(target).coprojections.clone();
        let coprojs = self.sum(sum).coprojections.clone();
        for k in 0..coprojs.len() {
            let lhs = Term::comp(vec![along.clone(), coprojs[k].clone()]);
            let rhs = Term::comp(vec![target_coprojs[k].clone(), restrictions[k].clone()]);
            self.record(lhs, rhs);
        }
        id
    }

    fn opaque(
        &mut self,
        key: super::InvKey,
        source: Ty,
        target_coprojs: &[Term],
    ) -> Result<InvId, DeductionError> {
        let (target, along, flavor) = key.clone();
        if !self.reuse_guard {
            let candidates: Vec<InvId> = self
                .invs
                .iter()
                .filter(|i| i.opaque && i.target == target && i.flavor == flavor && i.source == source)
                .map(|i| i.id)
                .collect();
            for c in candidates {
                let other = self.invs[c.index()].along.clone();
                self.reuse_guard = true;
                let same = self.quiet_equiv(&along, &other, 6);
                self.reuse_guard = false;
                if same {
                    self.inv_keys.insert(key, c);
                    self.add_ext_rules(c, &along, target_coprojs);
                    return Ok(c);
                }
            }
        }
        let id = InvId(self.invs.len() as u32);
        let n = target_coprojs.len();
        let tys: Vec<Ty> = (0..n as u32).map(|k| Ty::Part(id, k)).collect();
        let coprojs: Vec<Term> = (0..n as u32).map(|k| Term::InvCoproj(id, k)).collect();
        let restr: Vec<Term> = (0..n as u32).map(|k| Term::Restrict(id, k)).collect();
        // the sum id is allocated before the image so both refer to each other
        let label = format!("{}⁻¹", crate::print::atom(self, &along));
        let s = self.add_sum(name(&label), Some(source.clone()), tys, coprojs, SumKind::Derived, None);
        let ii = self.register(key, source, s, restr, true);
        debug_assert_eq!(ii, id);
        self.add_ext_rules(ii, &along, target_coprojs);
        Ok(ii)
    }

    fn add_ext_rules(&mut self, ii: InvId, along: &Term, target_coprojs: &[Term]) {
        for (k, c) in target_coprojs.iter().enumerate() {
            let mut lhs = along.chain();
            lhs.push(Term::InvCoproj(ii, k as u32));
            let rhs = Term::comp(vec![c.clone(), Term::Restrict(ii, k as u32)]);
            let rhs = match rhs {
                Term::Comp(v) => Term::comp(v.into_iter().filter(|t| !matches!(t, Term::Id(_))).collect()),
                other => other,
            };
            self.rules.push(ExtRule { lhs, rhs });
        }
        self.nf_cache.clear();
    }

    fn analyze(
        &mut self,
        target: SumId,
        u: &Term,
        x: &Ty,
        flavor: Flavor,
    ) -> Result<Analysis, DeductionError> {
        let info = self.sum(target).clone();
        let n = info.arity();
        let zero_piece = |k: usize| Piece {
            ty: Ty::Zero,
            coproj: empty_to(x),
            restr: empty_to(&info.summands[k]),
        };
        if *x == Ty::Zero {
            return Ok(Analysis::Pieces((0..n).map(zero_piece).collect()));
        }
        let chain = u.chain();
        let deco = self.decoration(u)?;
        let is_value = deco != Decoration::Computation;

        if flavor == Flavor::Value && *u == Term::Id(info.vertex.clone()) {
            return Ok(Analysis::Itself);
        }
        // u = c_k . rest where c_k is a (non-identity) coprojection of the target
        for k in 0..n {
            let c = info.coprojections[k].chain();
            if c.is_empty() || chain.len() < c.len() || chain[..c.len()] != c[..] {
                continue;
            }
            let rest = &chain[c.len()..];
            let r = rest_or_id(rest, x);
            // exceptional restrictions must be values
            if flavor == Flavor::Exceptional && self.decoration(&r)? == Decoration::Computation {
                break;
            }
            let mut pieces: Vec<Piece> = (0..n).map(zero_piece).collect();
            pieces[k] = Piece {
                ty: x.clone(),
                coproj: Term::Id(x.clone()),
                restr: r,
            };
            return Ok(Analysis::Pieces(pieces));
        }
        if flavor == Flavor::Value && info.kind == SumKind::PlusZero {
            return Ok(Analysis::Pieces(vec![
                Piece {
                    ty: x.clone(),
                    coproj: Term::Id(x.clone()),
                    restr: u.clone(),
                },
                zero_piece(1),
            ]));
        }
        if flavor == Flavor::Computation {
            if is_value && !self.plain() {
                return Ok(Analysis::Pieces(vec![
                    Piece {
                        ty: x.clone(),
                        coproj: Term::Id(x.clone()),
                        restr: u.clone(),
                    },
                    zero_piece(1),
                ]));
            }
            // value post-composition keeps the pullback of the inner part
            if !self.plain() && chain.len() >= 2 {
                let mut split = 0;
                while split < chain.len() - 1 && self.decoration(&chain[split])? != Decoration::Computation {
                    split += 1;
                }
                if split > 0 {
                    let outer = Term::comp(chain[..split].to_vec());
                    let inner = Term::comp(chain[split..].to_vec());
                    let ii = self.inverse_image_comp(&inner)?;
                    let inv = self.invs[ii.index()].clone();
                    let s = self.sum(inv.sum).clone();
                    return Ok(Analysis::Pieces(vec![
                        Piece {
                            ty: s.summands[0].clone(),
                            coproj: s.coprojections[0].clone(),
                            restr: Term::comp(vec![outer, inv.restrictions[0].clone()]),
                        },
                        Piece {
                            ty: s.summands[1].clone(),
                            coproj: s.coprojections[1].clone(),
                            restr: inv.restrictions[1].clone(),
                        },
                    ]));
                }
            }
        }
        if let Term::Match(src_sum, fs) = u {
            return self.analyze_match(target, *src_sum, fs, x, flavor);
        }
        if flavor == Flavor::Computation && self.plain() {
            return Ok(Analysis::Pieces(vec![
                Piece {
                    ty: x.clone(),
                    coproj: Term::Id(x.clone()),
                    restr: u.clone(),
                },
                zero_piece(1),
            ]));
        }
        Ok(Analysis::Opaque)
    }

    /// Pulls back along each branch and regroups the pieces per summand.
    fn analyze_match(
        &mut self,
        target: SumId,
        src_sum: SumId,
        fs: &[Term],
        x: &Ty,
        flavor: Flavor,
    ) -> Result<Analysis, DeductionError> {
        let info = self.sum(target).clone();
        let src = self.sum(src_sum).clone();
        let n = info.arity();
        let mut groups: Vec<Vec<Piece>> = vec![Vec::new(); n];
        for (i, f) in fs.iter().enumerate() {
            let ii = self.inverse_image_flavored(target, f, flavor)?;
            let inv = self.invs[ii.index()].clone();
            let bs = self.sum(inv.sum).clone();
            for (k, group) in groups.iter_mut().enumerate() {
                if bs.summands[k] == Ty::Zero {
                    continue;
                }
                group.push(Piece {
                    ty: bs.summands[k].clone(),
                    coproj: Term::comp(vec![src.coprojections[i].clone(), bs.coprojections[k].clone()]),
                    restr: inv.restrictions[k].clone(),
                });
            }
        }
        let mut pieces = Vec::with_capacity(n);
        for (k, g) in groups.into_iter().enumerate() {
            pieces.push(match g.len() {
                0 => Piece {
                    ty: Ty::Zero,
                    coproj: empty_to(x),
                    restr: empty_to(&info.summands[k]),
                },
                1 => g.into_iter().next().unwrap(),
                _ => {
                    let tys: Vec<Ty> = g.iter().map(|p| p.ty.clone()).collect();
                    let id = SumId(self.sums.len() as u32);
                    let labels: Vec<String> = tys.iter().map(|t| self.show_ty(t)).collect();
                    let sub = self.add_sum(
                        name(&labels.join("+")),
                        None,
                        tys,
                        (0..g.len() as u32).map(|j| Term::Coproj(id, j)).collect(),
                        SumKind::Derived,
                        None,
                    );
                    debug_assert_eq!(sub, id);
                    let mut cps = Vec::new();
                    let mut rs = Vec::new();
                    for p in &g {
                        cps.push(self.nf(&p.coproj)?);
                        rs.push(self.nf(&p.restr)?);
                    }
                    Piece {
                        ty: Ty::Vertex(sub),
                        coproj: Term::Match(sub, cps),
                        restr: Term::Match(sub, rs),
                    }
                }
            });
        }
        Ok(Analysis::Pieces(pieces))
    }

    /// Registers an inverse image computed elsewhere (by a translation).
    /// `parts` gives summands, coprojections and restrictions; `None`
    /// makes a fresh opaque image.
    pub(crate) fn import_inverse(
        &mut self,
        target: SumId,
        along: &Term,
        source: Ty,
        parts: Option<(Vec<Ty>, Vec<Term>, Vec<Term>)>,
    ) -> Result<InvId, DeductionError> {
        let along = self.nf(along)?;
        let key = (target, along.clone(), Flavor::Value);
        match parts {
            None => {
                let id = InvId(self.invs.len() as u32);
                let coprojs = self.sum(target).coprojections.clone();
                let n = coprojs.len();
                let tys: Vec<Ty> = (0..n as u32).map(|k| Ty::Part(id, k)).collect();
                let cs: Vec<Term> = (0..n as u32).map(|k| Term::InvCoproj(id, k)).collect();
                let rs: Vec<Term> = (0..n as u32).map(|k| Term::Restrict(id, k)).collect();
                let label = format!("{}⁻¹", crate::print::atom(self, &along));
                let s = self.add_sum(name(&label), Some(source.clone()), tys, cs, SumKind::Derived, None);
                let ii = self.register(key, source, s, rs, true);
                self.add_ext_rules(ii, &along, &coprojs);
                Ok(ii)
            }
            Some((tys, cs, rs)) => {
                let label = format!("{}⁻¹({})", crate::print::atom(self, &along), self.sum(target).name);
                let mut coprojs = Vec::with_capacity(cs.len());
                let mut restr = Vec::with_capacity(rs.len());
                for c in &cs {
                    coprojs.push(self.nf(c)?);
                }
                for r in &rs {
                    restr.push(self.nf(r)?);
                }
                let s = self.add_sum(name(&label), Some(source.clone()), tys, coprojs, SumKind::Derived, None);
                Ok(self.register(key, source, s, restr, false))
            }
        }
    }
}

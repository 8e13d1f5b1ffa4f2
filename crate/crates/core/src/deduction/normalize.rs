//! Single-step rewriting and normal forms.

use super::trace::{Rule, Step};
use super::{DeductionError, Flavor, Store};
use crate::syntax::{Decoration, Logic, SumId, Term, Ty};

const STEP_LIMIT: usize = 200_000;

/// Rebuilds `t` with its `idx`-th child (in `Term::children` order) replaced.
pub(crate) fn replace_child(t: &Term, idx: usize, new: Term) -> Term {
    let mut slot = Some(new);
    let mut i = 0usize;
    let mut pick = |old: &Term| -> Term {
        let r = if i == idx { slot.take().unwrap() } else { old.clone() };
        i += 1;
        r
    };
    match t {
        Term::Comp(v) => Term::Comp(v.iter().map(&mut pick).collect()),
        Term::Match(s, v) => Term::Match(*s, v.iter().map(&mut pick).collect()),
        Term::Case {
            scrut,
            sum,
            branches,
        } => {
            let scrut = Box::new(pick(scrut));
            Term::Case {
                scrut,
                sum: *sum,
                branches: branches.iter().map(&mut pick).collect(),
            }
        }
        Term::CaseT {
            scrut,
            on_value,
            on_raise,
        } => {
            let scrut = Box::new(pick(scrut));
            let on_value = Box::new(pick(on_value));
            let on_raise = Box::new(pick(on_raise));
            Term::CaseT {
                scrut,
                on_value,
                on_raise,
            }
        }
        Term::CaseE {
            scrut,
            branches,
            target,
        } => {
            let scrut = Box::new(pick(scrut));
            Term::CaseE {
                scrut,
                branches: branches.iter().map(|b| b.as_ref().map(&mut pick)).collect(),
                target: target.clone(),
            }
        }
        Term::Handle { body, branches } => {
            let body = Box::new(pick(body));
            Term::Handle {
                body,
                branches: branches.iter().map(|b| b.as_ref().map(&mut pick)).collect(),
            }
        }
        other => other.clone(),
    }
}

/// Follows a path of child indices.
pub(crate) fn subterm_at<'a>(t: &'a Term, path: &[usize]) -> Option<&'a Term> {
    let mut cur = t;
    for &i in path {
        cur = *cur.children().get(i)?;
    }
    Some(cur)
}

fn window(items: &[Term], pat: &[Term]) -> Option<usize> {
    if pat.is_empty() || pat.len() > items.len() {
        return None;
    }
    (0..=items.len() - pat.len()).find(|&p| items[p..p + pat.len()] == *pat)
}

impl Store {
    /// Normal form of `t`; records `t == nf` as a derived equation.
    pub fn normalize(&mut self, t: &Term) -> Result<Term, DeductionError> {
        let n = self.nf(t)?;
        self.record(t.clone(), n.clone());
        Ok(n)
    }

    /// Normal form without recording.
    pub(crate) fn nf(&mut self, t: &Term) -> Result<Term, DeductionError> {
        if let Some(n) = self.nf_cache.get(t) {
            return Ok(n.clone());
        }
        self.signature(t)?;
        let mut cur = t.clone();
        let mut scratch = Vec::new();
        for _ in 0..STEP_LIMIT {
            scratch.clear();
            match self.rewrite_once(&cur, &mut scratch)? {
                Some((_, _, next)) => cur = next,
                None => {
                    self.nf_cache.insert(t.clone(), cur.clone());
                    return Ok(cur);
                }
            }
        }
        Err(DeductionError::Unsupported(format!(
            "normalization of {} did not terminate",
            self.show(t)
        )))
    }

    /// Normal form with every rewrite step appended to `steps`.
    pub fn normalize_traced(
        &mut self,
        t: &Term,
        position: &str,
        steps: &mut Vec<Step>,
    ) -> Result<Term, DeductionError> {
        self.signature(t)?;
        let mut cur = t.clone();
        for _ in 0..STEP_LIMIT {
            let mut info = Vec::new();
            match self.rewrite_once(&cur, &mut info)? {
                Some((rule, path, next)) => {
                    for mut s in info {
                        s.position = position.to_string();
                        steps.push(s);
                    }
                    let detail = self.step_detail(rule, &cur, &path);
                    steps.push(Step {
                        rule,
                        position: position.to_string(),
                        path,
                        before: cur.clone(),
                        after: next.clone(),
                        inv: None,
                        sum: None,
                        detail,
                    });
                    cur = next;
                }
                None => {
                    self.nf_cache.insert(t.clone(), cur.clone());
                    return Ok(cur);
                }
            }
        }
        Err(DeductionError::Unsupported(format!(
            "normalization of {} did not terminate",
            self.show(t)
        )))
    }

    fn step_detail(&self, rule: Rule, t: &Term, path: &[usize]) -> String {
        let sub = subterm_at(t, path).map(|s| self.show(s)).unwrap_or_default();
        format!("{} at {}", rule.as_str(), sub)
    }

    /// Performs the leftmost-outermost rewrite step, if any. Returns the rule,
    /// the path of the rewritten subterm and the whole new term. Inverse
    /// images consulted on the way are reported in `info`.
    pub fn rewrite_once(
        &mut self,
        t: &Term,
        info: &mut Vec<Step>,
    ) -> Result<Option<(Rule, Vec<usize>, Term)>, DeductionError> {
        if let Some((rule, new)) = self.root_step(t, info)? {
            return Ok(Some((rule, Vec::new(), new)));
        }
        let n = t.children().len();
        for i in 0..n {
            let child = t.children()[i].clone();
            let mark = info.len();
            if let Some((rule, mut path, new_child)) = self.rewrite_once(&child, info)? {
                for s in &mut info[mark..] {
                    s.path.insert(0, i);
                }
                path.insert(0, i);
                return Ok(Some((rule, path, replace_child(t, i, new_child))));
            }
        }
        Ok(None)
    }

    /// One definitional unfolding of a case form or handler at the root.
    pub(crate) fn unfold_root(&mut self, t: &Term) -> Result<Option<Term>, DeductionError> {
        match t {
            Term::Case { .. } | Term::CaseT { .. } | Term::CaseE { .. } | Term::Handle { .. } => {
                Ok(self.root_step(t, &mut Vec::new())?.map(|(_, r)| r))
            }
            _ => Ok(None),
        }
    }

    fn root_step(
        &mut self,
        t: &Term,
        info: &mut Vec<Step>,
    ) -> Result<Option<(Rule, Term)>, DeductionError> {
        match t {
            Term::Gen(n) => {
                if let Some((s, i)) = self.spec.alias(n) {
                    return Ok(Some((Rule::Alias, Term::Coproj(s, i))));
                }
                if let Some(body) = self.spec.generator(n).and_then(|g| g.body.clone()) {
                    return Ok(Some((Rule::Delta, body)));
                }
                self.initial(t)
            }
            Term::Empty(Ty::Zero) => Ok(Some((Rule::Unit, Term::Id(Ty::Zero)))),
            Term::Id(_) | Term::Empty(_) => Ok(None),
            Term::Comp(items) => self.comp_step(t, items),
            Term::Match(s, fs) => {
                if let Some(r) = self.initial(t)? {
                    return Ok(Some(r));
                }
                let info_s = self.sum(*s).clone();
                if let Some(i) = info_s.coprojections.iter().position(|c| matches!(c, Term::Id(_))) {
                    return Ok(Some((Rule::BetaId, fs[i].clone())));
                }
                if fs.iter().zip(&info_s.coprojections).all(|(f, c)| f == c) {
                    return Ok(Some((Rule::EtaId, Term::Id(info_s.vertex.clone()))));
                }
                Ok(None)
            }
            Term::Case {
                scrut,
                sum,
                branches,
            } => {
                let r = self.unfold_case(scrut, *sum, branches, info)?;
                Ok(Some((Rule::UnfoldCase, r)))
            }
            Term::CaseT {
                scrut,
                on_value,
                on_raise,
            } => {
                let r = self.unfold_case_t(scrut, on_value, on_raise, info)?;
                Ok(Some((Rule::UnfoldCaseT, r)))
            }
            Term::CaseE {
                scrut,
                branches,
                target,
            } => {
                let r = self.unfold_case_e(scrut, branches, target, info)?;
                Ok(Some((Rule::UnfoldCaseE, r)))
            }
            Term::Handle { body, branches } => {
                let r = self.unfold_handle(body, branches, info)?;
                Ok(Some((Rule::UnfoldHandle, r)))
            }
            Term::Coproj(..) | Term::InvCoproj(..) | Term::Restrict(..) => self.initial(t),
        }
    }

    /// Any function out of 0 is the empty match.
    fn initial(&self, t: &Term) -> Result<Option<(Rule, Term)>, DeductionError> {
        let (s, tgt) = self.signature(t)?;
        if s == Ty::Zero {
            if tgt == Ty::Zero {
                return Ok(Some((Rule::Initial, Term::Id(Ty::Zero))));
            }
            return Ok(Some((Rule::Initial, Term::Empty(tgt))));
        }
        Ok(None)
    }

    fn comp_step(
        &mut self,
        t: &Term,
        items: &[Term],
    ) -> Result<Option<(Rule, Term)>, DeductionError> {
        if items.iter().any(|x| matches!(x, Term::Comp(_))) {
            return Ok(Some((Rule::Assoc, Term::comp(items.to_vec()))));
        }
        if items.len() < 2 || items.iter().any(|x| matches!(x, Term::Id(_) | Term::Empty(Ty::Zero))) {
            let kept: Vec<Term> = items
                .iter()
                .filter(|x| !matches!(x, Term::Id(_) | Term::Empty(Ty::Zero)))
                .cloned()
                .collect();
            let new = if kept.is_empty() {
                let (src, _) = self.signature(t)?;
                Term::Id(src)
            } else {
                Term::comp(kept)
            };
            return Ok(Some((Rule::Unit, new)));
        }
        // innermost atom whose source is 0: everything outside it collapses
        for idx in (0..items.len()).rev() {
            let (s, _) = self.signature(&items[idx])?;
            if s == Ty::Zero {
                if idx == 0 && matches!(items[0], Term::Empty(_)) {
                    break;
                }
                let (_, tgt) = self.signature(t)?;
                let mut v = vec![if tgt == Ty::Zero { Term::Id(Ty::Zero) } else { Term::Empty(tgt) }];
                v.extend(items[idx + 1..].iter().cloned());
                return Ok(Some((Rule::Initial, Term::comp(v))));
            }
        }
        for r in &self.rules {
            if let Some(p) = window(items, &r.lhs) {
                let mut v = items[..p].to_vec();
                v.push(r.rhs.clone());
                v.extend(items[p + r.lhs.len()..].iter().cloned());
                return Ok(Some((Rule::Extensivity, Term::comp(v))));
            }
        }
        for p in 0..items.len() {
            if let Term::Match(s, fs) = &items[p] {
                let info = self.sum(*s);
                for (i, c) in info.coprojections.iter().enumerate() {
                    let chain = c.chain();
                    if chain.is_empty() {
                        continue;
                    }
                    if items.len() >= p + 1 + chain.len() && items[p + 1..p + 1 + chain.len()] == chain[..] {
                        let mut v = items[..p].to_vec();
                        v.push(fs[i].clone());
                        v.extend(items[p + 1 + chain.len()..].iter().cloned());
                        return Ok(Some((Rule::Beta, Term::comp(v))));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Adapts a branch to the summand it is attached to: a branch given on
    /// the pulled-back summand is used as is, one given on the original
    /// summand is composed with the restriction.
    pub(crate) fn styled_branch(
        &mut self,
        ii: crate::syntax::InvId,
        k: usize,
        f: &Term,
    ) -> Result<Term, DeductionError> {
        let inv = self.inverse_image_by_id(ii).clone();
        let part = self.sum(inv.sum).summands[k].clone();
        let original = self.sum(inv.target).summands[k].clone();
        let (src, _) = self.signature(f)?;
        if src == part {
            Ok(f.clone())
        } else if src == original {
            Ok(Term::comp(vec![f.clone(), inv.restrictions[k].clone()]))
        } else {
            Err(DeductionError::BranchSourceMismatch {
                index: k,
                expected: self.show_ty(&part),
                found: self.show_ty(&src),
            })
        }
    }

    fn require_value(&self, u: &Term) -> Result<(), DeductionError> {
        if self.decoration(u)? == Decoration::Computation {
            return Err(DeductionError::NotAValue(self.show(u)));
        }
        Ok(())
    }

    fn unfold_case(
        &mut self,
        scrut: &Term,
        sum: SumId,
        branches: &[Term],
        info: &mut Vec<Step>,
    ) -> Result<Term, DeductionError> {
        self.require_value(scrut)?;
        let ii = self.inverse_image_traced(sum, scrut, Flavor::Value, info)?;
        let target_sum = self.inverse_image_by_id(ii).sum;
        let mut bs = Vec::with_capacity(branches.len());
        for (k, f) in branches.iter().enumerate() {
            bs.push(self.styled_branch(ii, k, f)?);
        }
        Ok(Term::Match(target_sum, bs))
    }

    fn unfold_case_t(
        &mut self,
        scrut: &Term,
        on_value: &Term,
        on_raise: &Term,
        info: &mut Vec<Step>,
    ) -> Result<Term, DeductionError> {
        let (_, y) = self.signature(scrut)?;
        let pz = self.plus_zero(&y);
        let ii = self.inverse_image_traced(pz, scrut, Flavor::Computation, info)?;
        let s = self.inverse_image_by_id(ii).sum;
        let f1 = self.styled_branch(ii, 0, on_value)?;
        let f0 = self.styled_branch(ii, 1, on_raise)?;
        Ok(Term::Match(s, vec![f1, f0]))
    }

    fn unfold_case_e(
        &mut self,
        scrut: &Term,
        branches: &[Option<Term>],
        target: &Ty,
        info: &mut Vec<Step>,
    ) -> Result<Term, DeductionError> {
        let esum = self
            .spec
            .exceptional_sum
            .ok_or_else(|| DeductionError::Unsupported("no exceptional sum".into()))?;
        if branches.is_empty() {
            return Ok(Term::comp(vec![Term::Empty(target.clone()), scrut.clone()]));
        }
        let ii = self.inverse_image_traced(esum, scrut, Flavor::Exceptional, info)?;
        let inv = self.inverse_image_by_id(ii).clone();
        let coprojs = self.sum(inv.sum).coprojections.clone();
        let mut bs = Vec::with_capacity(branches.len());
        for (k, b) in branches.iter().enumerate() {
            bs.push(match b {
                Some(f) => self.styled_branch(ii, k, f)?,
                None => Term::comp(vec![
                    Term::Empty(target.clone()),
                    scrut.clone(),
                    coprojs[k].clone(),
                ]),
            });
        }
        Ok(Term::Match(inv.sum, bs))
    }

    fn unfold_handle(
        &mut self,
        body: &Term,
        branches: &[Option<Term>],
        info: &mut Vec<Step>,
    ) -> Result<Term, DeductionError> {
        let (_, y) = self.signature(body)?;
        let pz = self.plus_zero(&y);
        let ii = self.inverse_image_traced(pz, body, Flavor::Computation, info)?;
        let inv = self.inverse_image_by_id(ii).clone();
        Ok(Term::CaseT {
            scrut: Box::new(body.clone()),
            on_value: Box::new(inv.restrictions[0].clone()),
            on_raise: Box::new(Term::CaseE {
                scrut: Box::new(inv.restrictions[1].clone()),
                branches: branches.to_vec(),
                target: y,
            }),
        })
    }

    /// True when the logic treats undecorated terms as values.
    pub(crate) fn plain(&self) -> bool {
        self.spec.logic != Logic::Decorated
    }
}

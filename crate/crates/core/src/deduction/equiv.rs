//! Deciding equations by normalization, congruence and match uniqueness.

use std::collections::HashSet;

use super::trace::{Rule, Step, Trace};
use super::{DeductionError, Store};
use crate::syntax::{SumId, SumKind, Term, Ty};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Yes,
    /// No derivation found; the search was exhaustive within its bound.
    NoWithinBound,
}

#[derive(Clone, Debug)]
pub struct Proof {
    pub outcome: Outcome,
    pub trace: Trace,
    pub goals: usize,
}

impl Proof {
    pub fn is_yes(&self) -> bool {
        self.outcome == Outcome::Yes
    }
}

struct Search {
    visits: usize,
    budget: usize,
    bound_hit: bool,
    failed: HashSet<(Term, Term)>,
}

impl Store {
    /// Decides `a == b`. Gives `DepthExceeded` when the search ran into its
    /// bound without finding a derivation.
    pub fn equiv(&mut self, a: &Term, b: &Term) -> Result<Proof, DeductionError> {
        let sa = self.signature(a)?;
        let sb = self.signature(b)?;
        if sa != sb {
            return Err(DeductionError::TypeMismatch(format!(
                "{} : {} -> {} and {} : {} -> {}",
                self.show(a),
                self.show_ty(&sa.0),
                self.show_ty(&sa.1),
                self.show(b),
                self.show_ty(&sb.0),
                self.show_ty(&sb.1)
            )));
        }
        let mut ctx = Search {
            visits: 0,
            budget: self.budget,
            bound_hit: false,
            failed: HashSet::new(),
        };
        let mut steps = Vec::new();
        let depth = self.depth;
        let ok = self.prove(a, b, depth, "goal", &mut steps, &mut ctx)?;
        if ok {
            self.record(a.clone(), b.clone());
            return Ok(Proof {
                outcome: Outcome::Yes,
                trace: Trace { steps },
                goals: ctx.visits,
            });
        }
        if ctx.bound_hit {
            return Err(DeductionError::DepthExceeded(depth));
        }
        Ok(Proof {
            outcome: Outcome::NoWithinBound,
            trace: Trace::default(),
            goals: ctx.visits,
        })
    }

    /// Bounded search without trace or recording.
    pub(crate) fn quiet_equiv(&mut self, a: &Term, b: &Term, depth: usize) -> bool {
        let mut ctx = Search {
            visits: 0,
            budget: 500,
            bound_hit: false,
            failed: HashSet::new(),
        };
        let mut steps = Vec::new();
        matches!(self.prove(a, b, depth, "q", &mut steps, &mut ctx), Ok(true))
    }

    fn prove(
        &mut self,
        a: &Term,
        b: &Term,
        depth: usize,
        pos: &str,
        steps: &mut Vec<Step>,
        ctx: &mut Search,
    ) -> Result<bool, DeductionError> {
        ctx.visits += 1;
        if ctx.visits > ctx.budget {
            ctx.bound_hit = true;
            return Ok(false);
        }
        let mark = steps.len();
        steps.push(Step {
            rule: Rule::Goal,
            position: pos.to_string(),
            path: Vec::new(),
            before: a.clone(),
            after: b.clone(),
            inv: None,
            sum: None,
            detail: String::new(),
        });
        let na = self.normalize_traced(a, &format!("{pos}.lhs"), steps)?;
        let nb = self.normalize_traced(b, &format!("{pos}.rhs"), steps)?;
        if na == nb {
            steps.push(Step {
                rule: Rule::Refl,
                position: pos.to_string(),
                path: Vec::new(),
                before: na.clone(),
                after: nb,
                inv: None,
                sum: None,
                detail: String::new(),
            });
            return Ok(true);
        }
        if depth == 0 {
            ctx.bound_hit = true;
            steps.truncate(mark);
            return Ok(false);
        }
        let key = (na.clone(), nb.clone());
        if ctx.failed.contains(&key) {
            steps.truncate(mark);
            return Ok(false);
        }

        let ca = na.chain();
        let cb = nb.chain();
        // common inner part
        let mut s = 0;
        while s < ca.len() && s < cb.len() && ca[ca.len() - 1 - s] == cb[cb.len() - 1 - s] {
            s += 1;
        }
        if s > 0 && s < ca.len() && s < cb.len() {
            let ra = Term::comp(ca[..ca.len() - s].to_vec());
            let rb = Term::comp(cb[..cb.len() - s].to_vec());
            if self.try_congruence(&na, &nb, ra, rb, 0, s, depth, pos, steps, ctx)? {
                return Ok(true);
            }
        }
        // common outer part
        let mut p = 0;
        while p < ca.len() && p < cb.len() && ca[p] == cb[p] {
            p += 1;
        }
        if p > 0 && p < ca.len() && p < cb.len() {
            let ra = Term::comp(ca[p..].to_vec());
            let rb = Term::comp(cb[p..].to_vec());
            if self.try_congruence(&na, &nb, ra, rb, 1, p, depth, pos, steps, ctx)? {
                return Ok(true);
            }
        }

        let (src, _) = self.signature(&na)?;
        for sum in self.split_candidates(&src, &na, &nb)? {
            let m = steps.len();
            steps.push(Step {
                rule: Rule::MatchUniqueness,
                position: pos.to_string(),
                path: Vec::new(),
                before: na.clone(),
                after: nb.clone(),
                inv: None,
                sum: Some(sum),
                detail: format!("over {}", crate::print::sum_decl(self, sum)),
            });
            let coprojs = self.sum(sum).coprojections.clone();
            let mut all = true;
            for (k, c) in coprojs.iter().enumerate() {
                let ga = Term::comp(vec![na.clone(), c.clone()]);
                let gb = Term::comp(vec![nb.clone(), c.clone()]);
                if !self.prove(&ga, &gb, depth - 1, &format!("{pos}.{}", k + 1), steps, ctx)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
            steps.truncate(m);
        }
        ctx.failed.insert(key);
        steps.truncate(mark);
        Ok(false)
    }

    #[allow(clippy::too_many_arguments)]
    fn try_congruence(
        &mut self,
        na: &Term,
        nb: &Term,
        ra: Term,
        rb: Term,
        side: usize,
        n: usize,
        depth: usize,
        pos: &str,
        steps: &mut Vec<Step>,
        ctx: &mut Search,
    ) -> Result<bool, DeductionError> {
        let m = steps.len();
        steps.push(Step {
            rule: Rule::Congruence,
            position: pos.to_string(),
            path: vec![side, n],
            before: na.clone(),
            after: nb.clone(),
            inv: None,
            sum: None,
            detail: format!(
                "common {} part of length {n}",
                if side == 0 { "inner" } else { "outer" }
            ),
        });
        if self.prove(&ra, &rb, depth - 1, &format!("{pos}.c"), steps, ctx)? {
            return Ok(true);
        }
        steps.truncate(m);
        Ok(false)
    }

    /// Sums on `src` worth splitting on: those matched on innermost in
    /// either side first, then every other known sum, keeping only splits
    /// that let at least one side reduce.
    fn split_candidates(
        &mut self,
        src: &Ty,
        na: &Term,
        nb: &Term,
    ) -> Result<Vec<SumId>, DeductionError> {
        let mut order: Vec<SumId> = Vec::new();
        for t in [na, nb] {
            if let Some(Term::Match(s, _)) = t.chain().last() {
                if !order.contains(s) {
                    order.push(*s);
                }
            }
        }
        for i in 0..self.sums.len() {
            let s = SumId(i as u32);
            if !order.contains(&s) {
                order.push(s);
            }
        }
        let mut out = Vec::new();
        for s in order {
            let info = self.sum(s).clone();
            if info.vertex != *src
                || info.arity() == 0
                || info.kind == SumKind::Exceptional
                || info.coprojections.iter().any(|c| matches!(c, Term::Id(_)))
            {
                continue;
            }
            let mut progress = false;
            for c in &info.coprojections {
                for t in [na, nb] {
                    let raw = Term::comp(vec![t.clone(), c.clone()]);
                    if self.nf(&raw)? != raw {
                        progress = true;
                    }
                }
            }
            if progress {
                out.push(s);
            }
            if out.len() >= 8 {
                break;
            }
        }
        Ok(out)
    }
}

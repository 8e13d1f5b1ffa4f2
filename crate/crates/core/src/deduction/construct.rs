//! Matches and cases built through the store, with their defining
//! equations recorded.

use super::{DeductionError, Flavor, Store};
use crate::syntax::{Decoration, SumId, Term};

impl Store {
    /// `[f_1 | ... | f_n]` over `sum`. Records `match . j_i == f_i`.
    pub fn mk_match(&mut self, sum: SumId, branches: Vec<Term>) -> Result<Term, DeductionError> {
        if self.sum(sum).arity() == 0 {
            return Err(DeductionError::Unsupported(
                "a match over the empty sum is the empty match of its target".into(),
            ));
        }
        let m = Term::Match(sum, branches.clone());
        self.signature(&m)?;
        let coprojs = self.sum(sum).coprojections.clone();
        for (c, f) in coprojs.into_iter().zip(branches) {
            self.record(Term::comp(vec![m.clone(), c]), f);
        }
        Ok(m)
    }

    /// `case u of [f_1 | ... | f_n]` for a value `u` into the vertex of
    /// `sum`. Each branch may start either at the original summand or at
    /// the pulled-back one.
    pub fn mk_case(
        &mut self,
        u: &Term,
        sum: SumId,
        branches: Vec<Term>,
    ) -> Result<Term, DeductionError> {
        if self.decoration(u)? == Decoration::Computation {
            return Err(DeductionError::NotAValue(self.show(u)));
        }
        let t = Term::Case {
            scrut: Box::new(u.clone()),
            sum,
            branches: branches.clone(),
        };
        self.signature(&t)?;
        let ii = self.inverse_image_flavored(sum, u, Flavor::Value)?;
        let mut styled = Vec::with_capacity(branches.len());
        for (k, f) in branches.iter().enumerate() {
            styled.push(self.styled_branch(ii, k, f)?);
        }
        let target = self.inverse_image_by_id(ii).sum;
        let unfolded = Term::Match(target, styled);
        self.signature(&unfolded)?;
        self.record(t.clone(), unfolded);
        Ok(t)
    }
}

/// How a case branch attaches to its summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BranchMode {
    /// Used as is on the pulled-back summand.
    Direct,
    /// Composed with the restriction.
    Original,
    /// Both readings coincide (the restriction is an identity).
    Either,
}

impl BranchMode {
    pub(crate) fn agrees(self, other: BranchMode) -> bool {
        self == other || self == BranchMode::Either || other == BranchMode::Either
    }
}

impl Store {
    /// The reading `styled_branch` gives to a branch with source `src`.
    pub(crate) fn branch_mode(&self, ii: crate::syntax::InvId, k: usize, src: &crate::syntax::Ty) -> Option<BranchMode> {
        let inv = self.inverse_image_by_id(ii);
        let part = &self.sum(inv.sum).summands[k];
        let original = &self.sum(inv.target).summands[k];
        if src == part {
            if part == original && inv.restrictions[k] == Term::Id(original.clone()) {
                Some(BranchMode::Either)
            } else {
                Some(BranchMode::Direct)
            }
        } else if src == original {
            Some(BranchMode::Original)
        } else {
            None
        }
    }
}

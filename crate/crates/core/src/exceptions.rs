//! Raising, exceptional cases and handling in the decorated logic.

use thiserror::Error;

use crate::deduction::{DeductionError, Flavor, Store};
use crate::syntax::{Decoration, Specification, Term, Ty};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExceptionError {
    #[error("unknown exception `{0}`")]
    UnknownException(String),
    #[error("an exceptional case without branches needs an explicit target")]
    MissingTargetForEmptyI,
    #[error("branches disagree on their target")]
    BranchTargetMismatch,
    #[error("{0} does not target 0")]
    TargetNotZero(String),
    #[error("{0} has {1} branches, expected {2}")]
    BranchCount(&'static str, usize, usize),
    #[error(transparent)]
    Deduction(#[from] DeductionError),
}

/// `raise_Y : 0 -> Y`.
pub fn mk_raise(y: Ty) -> Term {
    Term::Empty(y)
}

/// `raise_Y . t : P -> Y` for the exception `t`.
pub fn raise_at(spec: &Specification, y: Ty, exc: &str) -> Result<Term, ExceptionError> {
    let esum = spec
        .exceptional_sum
        .ok_or_else(|| ExceptionError::UnknownException(exc.to_string()))?;
    let i = spec
        .sum(esum)
        .label_index(exc)
        .ok_or_else(|| ExceptionError::UnknownException(exc.to_string()))?;
    Ok(Term::comp(vec![mk_raise(y), Term::Coproj(esum, i as u32)]))
}

impl Store {
    fn exception_arity(&self) -> Result<usize, ExceptionError> {
        let esum = self
            .exceptional_sum_id()
            .ok_or_else(|| ExceptionError::Deduction(DeductionError::Unsupported("no exceptional sum".into())))?;
        Ok(self.sum(esum).arity())
    }

    /// `case^t u of [id => f1 | raise => f0]`. Records its unfolding.
    pub fn mk_case_t(&mut self, u: &Term, f1: &Term, f0: &Term) -> Result<Term, ExceptionError> {
        let ii = self.inverse_image_comp(u)?;
        let a = self.styled_branch(ii, 0, f1)?;
        let b = self.styled_branch(ii, 1, f0)?;
        let (_, t1) = self.signature(f1)?;
        let (_, t0) = self.signature(f0)?;
        if t1 != t0 {
            return Err(ExceptionError::BranchTargetMismatch);
        }
        let t = Term::CaseT {
            scrut: Box::new(u.clone()),
            on_value: Box::new(f1.clone()),
            on_raise: Box::new(f0.clone()),
        };
        let m = Term::Match(self.inverse_image_by_id(ii).sum, vec![a, b]);
        self.record(t.clone(), m);
        Ok(t)
    }

    /// `case^e u of [t_i => f_i]`, missing branches re-raise. `target` is
    /// required when no branch is given.
    pub fn mk_case_e(
        &mut self,
        u: &Term,
        branches: Vec<Option<Term>>,
        target: Option<Ty>,
    ) -> Result<Term, ExceptionError> {
        let k = self.exception_arity()?;
        if branches.len() != k {
            return Err(ExceptionError::BranchCount("exceptional case", branches.len(), k));
        }
        let (_, tgt) = self.signature(u)?;
        if tgt != Ty::Zero {
            return Err(ExceptionError::TargetNotZero(self.show(u)));
        }
        let mut y = target;
        for f in branches.iter().flatten() {
            let (_, t) = self.signature(f)?;
            match &y {
                None => y = Some(t),
                Some(y0) if *y0 != t => return Err(ExceptionError::BranchTargetMismatch),
                _ => {}
            }
        }
        let y = y.ok_or(ExceptionError::MissingTargetForEmptyI)?;
        if k > 0 {
            let ii = self.inverse_image_flavored(self.exceptional_sum_id().unwrap(), u, Flavor::Exceptional)?;
            for (i, f) in branches.iter().enumerate() {
                if let Some(f) = f {
                    self.styled_branch(ii, i, f)?;
                }
            }
        }
        let t = Term::CaseE {
            scrut: Box::new(u.clone()),
            branches,
            target: y,
        };
        self.signature(&t)?;
        Ok(t)
    }

    /// `u handle [t_i => f_i]`.
    pub fn mk_handle(&mut self, u: &Term, branches: Vec<Option<Term>>) -> Result<Term, ExceptionError> {
        let k = self.exception_arity()?;
        if branches.len() != k {
            return Err(ExceptionError::BranchCount("handler", branches.len(), k));
        }
        let ii = self.inverse_image_comp(u)?;
        let u0 = self.inverse_image_by_id(ii).restrictions[1].clone();
        let (_, y) = self.signature(u)?;
        // validates the inner exceptional case
        self.mk_case_e(&u0, branches.clone(), Some(y))?;
        let t = Term::Handle {
            body: Box::new(u.clone()),
            branches,
        };
        self.signature(&t)?;
        Ok(t)
    }

    /// True when `u` may raise.
    pub fn is_computation(&self, u: &Term) -> Result<bool, DeductionError> {
        Ok(self.decoration(u)? == Decoration::Computation)
    }
}

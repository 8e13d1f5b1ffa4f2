//! Signatures and decoration inference.

use thiserror::Error;

use super::spec::{GenDecl, SumInfo, SumKind};
use super::term::{Decoration, InvId, Logic, SumId, Term, Ty};
use crate::deduction::{Flavor, InverseImage};

/// Lookup context for typing terms.
pub trait Env {
    fn logic(&self) -> Logic;
    fn generator(&self, name: &str) -> Option<&GenDecl>;
    fn sum_info(&self, id: SumId) -> Option<&SumInfo>;
    fn inverse(&self, id: InvId) -> Option<&InverseImage>;
    fn exceptional_sum(&self) -> Option<SumId>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown sum #{0}")]
    UnknownSum(u32),
    #[error("unknown inverse image #{0}")]
    UnknownInverse(u32),
    #[error("coprojection index {index} out of range for sum `{sum}`")]
    CoprojIndex { sum: String, index: u32 },
    #[error("empty composition")]
    EmptyComposition,
    #[error("composition is not consecutive at position {position}: {found} does not match {expected}")]
    NotConsecutive {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("{what}: expected {expected} branches, found {found}")]
    BranchArity {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("match branch {index} has source {found}, expected {expected}")]
    BranchSource {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("match branches disagree on target")]
    BranchTarget,
    #[error("case scrutinee has target {found}, expected {expected}")]
    ScrutineeTarget { expected: String, found: String },
    #[error("exceptional case needs a scrutinee into 0, found {0}")]
    NotIntoZero(String),
    #[error("no exceptional sum in this specification")]
    NoExceptionalSum,
    #[error("{0} is only available in decorated specifications")]
    NotDecorated(&'static str),
    #[error("case over a computation requires a value scrutinee; use case^t")]
    NotAValue,
    #[error("{0}")]
    Other(String),
}

fn ty_str(t: &Ty) -> String {
    t.to_string()
}

fn sum_of<E: Env + ?Sized>(env: &E, id: SumId) -> Result<&SumInfo, TermError> {
    env.sum_info(id).ok_or(TermError::UnknownSum(id.0))
}

fn inv_of<E: Env + ?Sized>(env: &E, id: InvId) -> Result<&InverseImage, TermError> {
    env.inverse(id).ok_or(TermError::UnknownInverse(id.0))
}

/// Source and target of a term.
pub fn signature<E: Env + ?Sized>(env: &E, t: &Term) -> Result<(Ty, Ty), TermError> {
    match t {
        Term::Gen(n) => {
            let g = env
                .generator(n)
                .ok_or_else(|| TermError::UnknownGenerator(n.to_string()))?;
            Ok((g.source.clone(), g.target.clone()))
        }
        Term::Id(ty) => Ok((ty.clone(), ty.clone())),
        Term::Empty(ty) => Ok((Ty::Zero, ty.clone())),
        Term::Comp(items) => {
            let (last, rest) = items.split_last().ok_or(TermError::EmptyComposition)?;
            let (source, mut cur) = signature(env, last)?;
            for (pos, g) in rest.iter().enumerate().rev() {
                let (s, t) = signature(env, g)?;
                if s != cur {
                    return Err(TermError::NotConsecutive {
                        position: pos,
                        expected: ty_str(&cur),
                        found: ty_str(&s),
                    });
                }
                cur = t;
            }
            Ok((source, cur))
        }
        Term::Coproj(s, i) => {
            let info = sum_of(env, *s)?;
            let ty = info
                .summands
                .get(*i as usize)
                .ok_or_else(|| TermError::CoprojIndex {
                    sum: info.name.to_string(),
                    index: *i,
                })?;
            Ok((ty.clone(), info.vertex.clone()))
        }
        Term::Match(s, fs) => {
            let info = sum_of(env, *s)?;
            if fs.len() != info.arity() || fs.is_empty() {
                return Err(TermError::BranchArity {
                    what: "match",
                    expected: info.arity(),
                    found: fs.len(),
                });
            }
            let mut target: Option<Ty> = None;
            for (i, f) in fs.iter().enumerate() {
                let (src, tgt) = signature(env, f)?;
                if src != info.summands[i] {
                    return Err(TermError::BranchSource {
                        index: i,
                        expected: ty_str(&info.summands[i]),
                        found: ty_str(&src),
                    });
                }
                match &target {
                    None => target = Some(tgt),
                    Some(t0) if *t0 != tgt => return Err(TermError::BranchTarget),
                    _ => {}
                }
            }
            Ok((info.vertex.clone(), target.unwrap()))
        }
        Term::Case {
            scrut,
            sum,
            branches,
        } => {
            let info = sum_of(env, *sum)?;
            let (src, tgt) = signature(env, scrut)?;
            if tgt != info.vertex {
                return Err(TermError::ScrutineeTarget {
                    expected: ty_str(&info.vertex),
                    found: ty_str(&tgt),
                });
            }
            if branches.len() != info.arity() || branches.is_empty() {
                return Err(TermError::BranchArity {
                    what: "case",
                    expected: info.arity(),
                    found: branches.len(),
                });
            }
            let target = common_target(env, branches.iter())?;
            Ok((src, target.unwrap()))
        }
        Term::CaseT {
            scrut,
            on_value,
            on_raise,
        } => {
            let (src, _) = signature(env, scrut)?;
            let target = common_target(env, [&**on_value, &**on_raise].into_iter())?;
            Ok((src, target.unwrap()))
        }
        Term::CaseE {
            scrut,
            branches,
            target,
        } => {
            let (src, tgt) = signature(env, scrut)?;
            if tgt != Ty::Zero {
                return Err(TermError::NotIntoZero(ty_str(&tgt)));
            }
            check_exception_arity(env, branches.len())?;
            if let Some(t) = common_target(env, branches.iter().flatten())? {
                if t != *target {
                    return Err(TermError::BranchTarget);
                }
            }
            Ok((src, target.clone()))
        }
        Term::Handle { body, branches } => {
            let (src, tgt) = signature(env, body)?;
            check_exception_arity(env, branches.len())?;
            if let Some(t) = common_target(env, branches.iter().flatten())? {
                if t != tgt {
                    return Err(TermError::BranchTarget);
                }
            }
            Ok((src, tgt))
        }
        Term::InvCoproj(ii, k) => {
            let inv = inv_of(env, *ii)?;
            Ok((Ty::Part(*ii, *k), inv.source.clone()))
        }
        Term::Restrict(ii, k) => {
            let inv = inv_of(env, *ii)?;
            let target = sum_of(env, inv.target)?;
            let ty = target
                .summands
                .get(*k as usize)
                .ok_or_else(|| TermError::CoprojIndex {
                    sum: target.name.to_string(),
                    index: *k,
                })?;
            Ok((Ty::Part(*ii, *k), ty.clone()))
        }
    }
}

fn check_exception_arity<E: Env + ?Sized>(env: &E, n: usize) -> Result<(), TermError> {
    let sid = env.exceptional_sum().ok_or(TermError::NoExceptionalSum)?;
    let k = sum_of(env, sid)?.arity();
    if k != n {
        return Err(TermError::BranchArity {
            what: "exceptional branches",
            expected: k,
            found: n,
        });
    }
    Ok(())
}

fn common_target<'a, E: Env + ?Sized>(
    env: &E,
    terms: impl Iterator<Item = &'a Term>,
) -> Result<Option<Ty>, TermError> {
    let mut target: Option<Ty> = None;
    for f in terms {
        let (_, tgt) = signature(env, f)?;
        match &target {
            None => target = Some(tgt),
            Some(t0) if *t0 != tgt => return Err(TermError::BranchTarget),
            _ => {}
        }
    }
    Ok(target)
}

/// Decoration of a well-typed term. Basic and explicit logics give `Plain`.
pub fn decoration<E: Env + ?Sized>(env: &E, t: &Term) -> Result<Decoration, TermError> {
    if env.logic() != Logic::Decorated {
        return Ok(Decoration::Plain);
    }
    deco(env, t)
}

fn deco<E: Env + ?Sized>(env: &E, t: &Term) -> Result<Decoration, TermError> {
    use Decoration::*;
    Ok(match t {
        Term::Gen(n) => {
            env.generator(n)
                .ok_or_else(|| TermError::UnknownGenerator(n.to_string()))?
                .decoration
        }
        Term::Id(_) | Term::Empty(_) | Term::InvCoproj(..) => Value,
        Term::Coproj(s, _) => {
            if sum_of(env, *s)?.kind == SumKind::Exceptional {
                Computation
            } else {
                Value
            }
        }
        Term::CaseT { .. } | Term::CaseE { .. } | Term::Handle { .. } => Computation,
        Term::Restrict(ii, k) => {
            let inv = inv_of(env, *ii)?;
            if inv.flavor == Flavor::Computation && *k == 1 {
                Computation
            } else {
                Value
            }
        }
        Term::Comp(v) | Term::Match(_, v) => {
            let mut d = Value;
            for x in v {
                d = d.join(deco(env, x)?);
            }
            d
        }
        Term::Case {
            scrut, branches, ..
        } => {
            let mut d = deco(env, scrut)?;
            for x in branches {
                d = d.join(deco(env, x)?);
            }
            d
        }
    })
}

/// The decoration a generator gets in a specification of the given logic.
pub fn default_decoration(logic: Logic) -> Decoration {
    match logic {
        Logic::Decorated => Decoration::Value,
        _ => Decoration::Plain,
    }
}

//! Finite set-valued models of basic and explicit specifications.

mod audit;
mod enumerate;
mod eval;
mod file;
mod validate;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::syntax::Name;

pub use audit::{audit_models, soundness_audit, AuditEntry, AuditReport};
pub use enumerate::{candidate_count, enumerate_models, models_for, sample_models, Enumeration, ModelSet};
pub use eval::{check_equation, Evaluator, Verdict};
pub use file::{parse_model, print_model};
pub use validate::{validate_model, Report, Violation};

/// An element. Elements of named types and of `E` are indices into their
/// carrier; elements of a sum with a vertex of its own are tagged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Val {
    Atom(u32),
    Tag(u32, Box<Val>),
}

impl Val {
    pub fn tag(i: u32, v: Val) -> Val {
        Val::Tag(i, Box::new(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{0} is not in the carrier of {1}")]
    ElementOutOfCarrier(String, String),
    #[error("the unique map out of 0 was applied")]
    EmptySourceUnreachable,
    #[error("{0} is undefined at {1}")]
    Undefined(String, String),
    #[error("no carrier for {0}")]
    MissingCarrier(String),
    #[error("no map for {0}")]
    MissingMap(String),
    #[error("enumeration needs {candidates} candidates, over the cap of {cap}")]
    BudgetExceeded { candidates: u128, cap: u128 },
    #[error("model file line {0}: {1}")]
    Syntax(usize, String),
    #[error("cannot evaluate {0}")]
    Unsupported(String),
    #[error(transparent)]
    Deduction(#[from] crate::deduction::DeductionError),
}

/// Carriers for the named types, maps for the generators and, for explicit
/// specifications, the exception set. Maps may be partial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteModel {
    pub carriers: BTreeMap<Name, Vec<String>>,
    pub exceptions: Option<Vec<String>>,
    pub maps: HashMap<Name, BTreeMap<Val, Val>>,
}

impl FiniteModel {
    pub fn carrier(&self, n: &str) -> Option<&[String]> {
        self.carriers.get(n).map(|c| c.as_slice())
    }
}

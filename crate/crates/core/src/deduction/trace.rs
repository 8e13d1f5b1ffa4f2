//! Proof traces and their replay.

use thiserror::Error;

use super::Store;
use crate::syntax::{InvId, SumId, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Delta,
    Alias,
    Assoc,
    Unit,
    Initial,
    Beta,
    BetaId,
    EtaId,
    Extensivity,
    UnfoldCase,
    UnfoldCaseT,
    UnfoldCaseE,
    UnfoldHandle,
    InverseImage,
    Goal,
    Refl,
    Congruence,
    MatchUniqueness,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Delta => "delta",
            Rule::Alias => "alias",
            Rule::Assoc => "assoc",
            Rule::Unit => "unit",
            Rule::Initial => "initial",
            Rule::Beta => "beta",
            Rule::BetaId => "beta-id",
            Rule::EtaId => "eta-id",
            Rule::Extensivity => "extensivity",
            Rule::UnfoldCase => "unfold-case",
            Rule::UnfoldCaseT => "unfold-case-t",
            Rule::UnfoldCaseE => "unfold-case-e",
            Rule::UnfoldHandle => "unfold-handle",
            Rule::InverseImage => "inverse-image",
            Rule::Goal => "goal",
            Rule::Refl => "refl",
            Rule::Congruence => "congruence",
            Rule::MatchUniqueness => "match-uniqueness",
        }
    }

    /// Rules that rewrite a term in one step.
    pub fn is_rewrite(self) -> bool {
        !matches!(
            self,
            Rule::InverseImage | Rule::Goal | Rule::Refl | Rule::Congruence | Rule::MatchUniqueness
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    /// Goal position, e.g. `goal.1.lhs`.
    pub position: String,
    /// Child-index path of the rewritten subterm.
    pub path: Vec<usize>,
    pub before: Term,
    pub after: Term,
    pub inv: Option<InvId>,
    pub sum: Option<SumId>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn render_text(&self, store: &Store) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let line = match s.rule {
                Rule::InverseImage => format!("{:>3} {} inverse-image: {}", i + 1, s.position, s.detail),
                Rule::Goal => format!(
                    "{:>3} {} goal: {} == {}",
                    i + 1,
                    s.position,
                    store.show(&s.before),
                    store.show(&s.after)
                ),
                Rule::Congruence | Rule::MatchUniqueness | Rule::Refl => format!(
                    "{:>3} {} {}: {} == {}{}",
                    i + 1,
                    s.position,
                    s.rule.as_str(),
                    store.show(&s.before),
                    store.show(&s.after),
                    if s.detail.is_empty() { String::new() } else { format!(" [{}]", s.detail) }
                ),
                _ => format!(
                    "{:>3} {} {} @{}: {} ~> {}",
                    i + 1,
                    s.position,
                    s.rule.as_str(),
                    path_str(&s.path),
                    store.show(&s.before),
                    store.show(&s.after)
                ),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, store: &Store) -> serde_json::Value {
        serde_json::Value::Array(
            self.steps
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "rule": s.rule.as_str(),
                        "position": s.position,
                        "path": path_str(&s.path),
                        "before": store.show(&s.before),
                        "after": store.show(&s.after),
                        "detail": s.detail,
                    })
                })
                .collect(),
        )
    }
}

fn path_str(p: &[usize]) -> String {
    if p.is_empty() {
        "root".into()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step} ({rule}): {reason}")]
pub struct ReplayError {
    pub step: usize,
    pub rule: &'static str,
    pub reason: String,
}

/// Checks every step of `trace` against `store`: rewrite steps must be
/// exactly what the store's own rewriting produces, inverse images must be
/// the store's canonical ones, and decision steps must be well-typed.
pub fn replay(store: &mut Store, trace: &Trace) -> Result<(), ReplayError> {
    for (i, s) in trace.steps.iter().enumerate() {
        let fail = |reason: String| ReplayError {
            step: i + 1,
            rule: s.rule.as_str(),
            reason,
        };
        if s.rule.is_rewrite() {
            let mut info = Vec::new();
            let got = store
                .rewrite_once(&s.before, &mut info)
                .map_err(|e| fail(e.to_string()))?;
            match got {
                Some((rule, path, after)) if rule == s.rule && path == s.path && after == s.after => {}
                Some((rule, path, _)) => {
                    return Err(fail(format!(
                        "store rewrites with {} at {} instead",
                        rule.as_str(),
                        path_str(&path)
                    )))
                }
                None => return Err(fail("term is already normal".into())),
            }
            continue;
        }
        match s.rule {
            Rule::InverseImage => {
                let (ii, sum) = match (s.inv, s.sum) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(fail("missing inverse image reference".into())),
                };
                if ii.index() >= store.inverse_images().len() {
                    return Err(fail("unknown inverse image".into()));
                }
                let inv = store.inverse_image_by_id(ii).clone();
                if inv.target != sum {
                    return Err(fail("inverse image of a different sum".into()));
                }
                let u = store.nf(&s.before).map_err(|e| fail(e.to_string()))?;
                let again = store
                    .inverse_image_flavored(sum, &s.before, inv.flavor)
                    .map_err(|e| fail(e.to_string()))?;
                if again != ii || u != inv.along {
                    return Err(fail("inverse image is not the canonical one".into()));
                }
            }
            Rule::Goal | Rule::MatchUniqueness | Rule::Congruence => {
                let a = store.signature(&s.before).map_err(|e| fail(e.to_string()))?;
                let b = store.signature(&s.after).map_err(|e| fail(e.to_string()))?;
                if a != b {
                    return Err(fail("sides have different types".into()));
                }
                if s.rule == Rule::MatchUniqueness {
                    let sum = s.sum.ok_or_else(|| fail("missing sum".into()))?;
                    if store.sum(sum).vertex != a.0 {
                        return Err(fail("sum vertex is not the goal source".into()));
                    }
                }
            }
            Rule::Refl => {
                if s.before != s.after {
                    return Err(fail("sides differ".into()));
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(())
}

use std::fmt;

use super::{check_equation, Evaluator, FiniteModel, ModelError, Val, Verdict};
use crate::deduction::Store;
use crate::syntax::{Item, Logic, Ty};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingCarrier(String),
    MissingMap(String),
    OutOfCarrier { generator: String, element: String },
    /// A map into an empty carrier from a nonempty one.
    NoMapIntoEmpty(String),
    NotDisjointUnion { sum: String, detail: String },
    ExceptionsNotDisjointUnion(String),
    AxiomFails { index: usize, element: String },
    Eval(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingCarrier(t) => write!(f, "no carrier for type {t}"),
            Violation::MissingMap(g) => write!(f, "no map for {g}"),
            Violation::OutOfCarrier { generator, element } => {
                write!(f, "{generator}: {element} is outside its carrier")
            }
            Violation::NoMapIntoEmpty(g) => write!(f, "{g} maps a nonempty set into an empty one"),
            Violation::NotDisjointUnion { sum, detail } => {
                write!(f, "{sum} is not the disjoint union of its summands: {detail}")
            }
            Violation::ExceptionsNotDisjointUnion(d) => {
                write!(f, "E is not the disjoint union of the M(P_i): {d}")
            }
            Violation::AxiomFails { index, element } => write!(f, "axiom #{index} fails at {element}"),
            Violation::Eval(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a model against a basic or explicit store. Partial maps are
/// allowed, as a way to truncate infinite carriers, and are reported as
/// notes.
pub fn validate_model(store: &mut Store, model: &FiniteModel) -> Report {
    let mut r = Report::default();
    let spec = store.spec().clone();
    for t in &spec.types {
        if model.carrier(t).is_none() {
            r.violations.push(Violation::MissingCarrier(t.to_string()));
        }
    }
    if spec.logic == Logic::Explicit && model.exceptions.is_none() {
        r.violations.push(Violation::MissingCarrier("E".into()));
    }
    if !r.violations.is_empty() {
        return r;
    }
    let mut ev = Evaluator::new(store, model);
    for g in &spec.generators {
        if g.body.is_some() {
            continue;
        }
        if let Some((s, _)) = spec.alias(&g.name) {
            if spec.sum(s).vertex == Ty::Vertex(s) {
                continue;
            }
        }
        let Some(m) = model.maps.get(&g.name) else {
            r.violations.push(Violation::MissingMap(g.name.to_string()));
            continue;
        };
        let (src, tgt) = match (ev.carrier(&g.source), ev.carrier(&g.target)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                r.violations.push(Violation::Eval(e.to_string()));
                continue;
            }
        };
        for (x, y) in m {
            if !src.contains(x) {
                r.violations.push(Violation::OutOfCarrier {
                    generator: g.name.to_string(),
                    element: ev.show_entry(&g.source, x),
                });
            }
            if !tgt.contains(y) {
                r.violations.push(Violation::OutOfCarrier {
                    generator: g.name.to_string(),
                    element: ev.show_entry(&g.target, y),
                });
            }
        }
        let missing: Vec<String> = src
            .iter()
            .filter(|x| !m.contains_key(*x))
            .map(|x| ev.show(&g.source, x))
            .collect();
        if !missing.is_empty() {
            if tgt.is_empty() {
                r.violations.push(Violation::NoMapIntoEmpty(g.name.to_string()));
            } else {
                r.notes.push(format!("{} is partial: undefined at {}", g.name, missing.join(", ")));
            }
        }
    }
    if !r.violations.is_empty() {
        return r;
    }
    for item in &spec.items {
        let Item::Sum(s) = item else { continue };
        let info = spec.sum(*s).clone();
        if info.vertex == Ty::Vertex(*s) {
            continue;
        }
        if let Err(detail) = disjoint_union(&mut ev, *s) {
            let v = if info.vertex == Ty::Exc {
                Violation::ExceptionsNotDisjointUnion(detail)
            } else {
                Violation::NotDisjointUnion {
                    sum: crate::print::sum_decl(&*ev.store, *s),
                    detail,
                }
            };
            r.violations.push(v);
        }
    }
    for (i, eq) in spec.axioms.iter().enumerate() {
        match check_equation(&mut ev, &eq.lhs, &eq.rhs) {
            Ok(Verdict::Holds) => {}
            Ok(Verdict::Fails { element, .. }) => {
                let (src, _) = ev.store.signature(&eq.lhs).expect("checked above");
                r.violations.push(Violation::AxiomFails {
                    index: i + 1,
                    element: ev.show(&src, &element),
                })
            }
            Err(e) => r.violations.push(Violation::Eval(e.to_string())),
        }
    }
    r
}

/// The copairing of the coprojections, where defined, must be a bijection
/// onto the vertex.
fn disjoint_union(ev: &mut Evaluator, s: crate::syntax::SumId) -> Result<(), String> {
    let info = ev.store.sum(s).clone();
    let vertex = ev.carrier(&info.vertex).map_err(|e| e.to_string())?;
    let mut hit: Vec<Option<(usize, Val)>> = vec![None; vertex.len()];
    for (i, t) in info.summands.iter().enumerate() {
        for w in ev.carrier(t).map_err(|e| e.to_string())? {
            let c = crate::syntax::Term::Coproj(s, i as u32);
            let y = match ev.eval(&c, &w) {
                Ok(y) => y,
                Err(ModelError::Undefined(..)) => continue,
                Err(e) => return Err(e.to_string()),
            };
            let Some(pos) = vertex.iter().position(|v| *v == y) else {
                return Err(format!("{} lands outside the vertex", info.labels[i]));
            };
            if let Some((j, _)) = &hit[pos] {
                return Err(format!(
                    "{} and {} overlap at {}",
                    info.labels[*j],
                    info.labels[i],
                    ev.show(&info.vertex, &y)
                ));
            }
            hit[pos] = Some((i, w));
        }
    }
    if let Some(pos) = hit.iter().position(|h| h.is_none()) {
        return Err(format!("{} is not covered", ev.show(&info.vertex, &vertex[pos])));
    }
    Ok(())
}

use super::{check_equation, Evaluator, FiniteModel, Verdict};
use crate::syntax::{Equation, Term};
use crate::translate::Expansion;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditEntry {
    /// Position of the equation in the audited list, from 1.
    pub index: usize,
    pub equation: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.holds).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "eq #{} {} {}{}\n",
                e.index,
                if e.holds { "HOLDS" } else { "FAILS" },
                e.equation,
                if e.detail.is_empty() { String::new() } else { format!(" ({})", e.detail) }
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!("checked: {}\nfailures: {}\n", self.entries.len(), self.failures()));
        out
    }
}

/// Expands each decorated equation and checks it in an explicit model.
/// The equations must live in the decorated store of `x`.
pub fn soundness_audit(x: &mut Expansion, equations: &[Equation], model: &FiniteModel) -> AuditReport {
    audit_models(x, equations, std::slice::from_ref(model))
}

/// `soundness_audit` over several models; an equation holds when it holds
/// in all of them, and its detail names the first model where it fails.
pub fn audit_models(x: &mut Expansion, equations: &[Equation], models: &[FiniteModel]) -> AuditReport {
    let mut entries = Vec::with_capacity(equations.len());
    let mut images: Vec<Option<(Term, Term)>> = Vec::with_capacity(equations.len());
    for (i, eq) in equations.iter().enumerate() {
        let equation = format!("{} == {}", x.deco.show(&eq.lhs), x.deco.show(&eq.rhs));
        let (holds, detail, image) = match x.equation(&eq.lhs, &eq.rhs) {
            Ok(p) => (true, String::new(), Some(p)),
            Err(e) => (false, format!("expansion failed: {e}"), None),
        };
        entries.push(AuditEntry {
            index: i + 1,
            equation,
            holds,
            detail,
        });
        images.push(image);
    }
    let mut unfolded = Default::default();
    for (m, model) in models.iter().enumerate() {
        let mut ev = Evaluator::new(&mut x.expl, model).with_unfolded(unfolded);
        for (e, image) in entries.iter_mut().zip(&images) {
            let Some((l, r)) = image else { continue };
            if !e.holds {
                continue;
            }
            let detail = match check_equation(&mut ev, l, r) {
                Ok(Verdict::Holds) => continue,
                Ok(Verdict::Fails { element, lhs, rhs }) => {
                    let (src, tgt) = ev.store.signature(l).expect("checked when evaluated");
                    format!(
                        "at {}: {} vs {}",
                        ev.show(&src, &element),
                        ev.show_tagged(&tgt, &lhs),
                        ev.show_tagged(&tgt, &rhs)
                    )
                }
                Err(err) => format!("evaluation failed: {err}"),
            };
            e.holds = false;
            e.detail = if models.len() > 1 { format!("model #{}: {detail}", m + 1) } else { detail };
        }
        unfolded = ev.take_unfolded();
    }
    AuditReport {
        entries,
        notes: vec![format!("{} models checked", models.len())],
    }
}

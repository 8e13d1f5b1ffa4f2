//! The model file format:
//!
//! ```text
//! type Nat = {0, 1, 2};
//! exceptions = {ε};
//! fun s : 0 -> 1, 1 -> 2;
//! ```
//!
//! `fun` lines may repeat; entries accumulate. Leaving an element out makes
//! the map partial there.

use std::collections::BTreeMap;

use super::{Evaluator, FiniteModel, ModelError};
use crate::deduction::Store;
use crate::syntax::name;

fn braces(line: usize, s: &str) -> Result<Vec<String>, ModelError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| ModelError::Syntax(line, format!("expected {{...}}, found `{s}`")))?;
    let labels: Vec<String> = inner
        .split(',')
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(ModelError::Syntax(line, format!("label `{l}` repeated")));
        }
    }
    Ok(labels)
}

pub fn parse_model(store: &mut Store, text: &str) -> Result<FiniteModel, ModelError> {
    let mut model = FiniteModel::default();
    let mut funs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let line = line.strip_suffix(';').unwrap_or(line).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("type ") {
            let (n, c) = rest
                .split_once('=')
                .ok_or_else(|| ModelError::Syntax(ln, "expected `type X = {...}`".into()))?;
            model.carriers.insert(name(n.trim()), braces(ln, c)?);
        } else if let Some(rest) = line.strip_prefix("exceptions") {
            let c = rest
                .trim()
                .strip_prefix('=')
                .ok_or_else(|| ModelError::Syntax(ln, "expected `exceptions = {...}`".into()))?;
            model.exceptions = Some(braces(ln, c)?);
        } else if let Some(rest) = line.strip_prefix("fun ") {
            let (n, entries) = rest
                .split_once(':')
                .ok_or_else(|| ModelError::Syntax(ln, "expected `fun f : a -> b, ...`".into()))?;
            funs.push((ln, n.trim().to_string(), entries.to_string()));
        } else {
            return Err(ModelError::Syntax(ln, format!("unexpected `{line}`")));
        }
    }
    let mut maps: Vec<(String, BTreeMap<_, _>)> = Vec::new();
    {
        let mut ev = Evaluator::new(store, &model);
        for (ln, n, entries) in funs {
            let g = ev
                .store
                .spec()
                .generator(&n)
                .cloned()
                .ok_or_else(|| ModelError::Syntax(ln, format!("unknown generator `{n}`")))?;
            if g.body.is_some() {
                return Err(ModelError::Syntax(ln, format!("`{n}` is defined, not interpreted")));
            }
            let mut m = BTreeMap::new();
            for e in entries.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                let (a, b) = e
                    .split_once("->")
                    .ok_or_else(|| ModelError::Syntax(ln, format!("expected `a -> b`, found `{e}`")))?;
                let x = ev.element(&g.source, a)?;
                let y = ev.element(&g.target, b)?;
                if m.insert(x, y).is_some() {
                    return Err(ModelError::Syntax(ln, format!("`{n}` is given twice at `{}`", a.trim())));
                }
            }
            match maps.iter_mut().find(|(k, _)| *k == n) {
                Some((_, old)) => {
                    for (x, y) in m {
                        if old.insert(x, y).is_some() {
                            return Err(ModelError::Syntax(ln, format!("`{n}` is given twice")));
                        }
                    }
                }
                None => maps.push((n, m)),
            }
        }
    }
    for (n, m) in maps {
        model.maps.insert(name(&n), m);
    }
    Ok(model)
}

pub fn print_model(store: &mut Store, model: &FiniteModel) -> String {
    let mut out = String::new();
    let spec = store.spec().clone();
    let mut seen = Vec::new();
    for t in &spec.types {
        if let Some(c) = model.carrier(t) {
            out.push_str(&format!("type {t} = {{{}}};\n", c.join(", ")));
            seen.push(t.clone());
        }
    }
    for (t, c) in &model.carriers {
        if !seen.contains(t) {
            out.push_str(&format!("type {t} = {{{}}};\n", c.join(", ")));
        }
    }
    if let Some(e) = &model.exceptions {
        out.push_str(&format!("exceptions = {{{}}};\n", e.join(", ")));
    }
    let ev = Evaluator::new(store, model);
    for g in &spec.generators {
        if let Some(m) = model.maps.get(&g.name) {
            let entries: Vec<String> = m
                .iter()
                .map(|(x, y)| format!("{} -> {}", ev.show(&g.source, x), ev.show_entry(&g.target, y)))
                .collect();
            out.push_str(&format!("fun {} : {};\n", g.name, entries.join(", ")));
        }
    }
    out
}

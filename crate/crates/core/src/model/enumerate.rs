//! Exhaustive and sampled model search, used as a test oracle.
//!
//! Carriers get the canonical labels `e0, e1, ...`. The exception set of an
//! explicit specification is fixed to the disjoint union of the parameter
//! carriers with the tag injections as exceptions, which is every valid
//! choice up to relabeling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{validate_model, Evaluator, FiniteModel, ModelError, Val};
use crate::deduction::Store;
use crate::syntax::{Logic, Name, Ty};

/// Generators whose maps are chosen freely.
fn free_generators(store: &Store) -> Vec<(Name, Ty, Ty)> {
    let spec = store.spec();
    spec.generators
        .iter()
        .filter(|g| g.body.is_none())
        .filter(|g| match spec.alias(&g.name) {
            Some((s, _)) => {
                let v = &spec.sum(s).vertex;
                *v != Ty::Vertex(s) && !(spec.logic == Logic::Explicit && *v == Ty::Exc)
            }
            None => true,
        })
        .map(|g| (g.name.clone(), g.source.clone(), g.target.clone()))
        .collect()
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// A model with the given carrier sizes and no free maps yet.
fn skeleton(store: &mut Store, sizes: &[usize]) -> Result<FiniteModel, ModelError> {
    let spec = store.spec().clone();
    let mut m = FiniteModel::default();
    for (t, n) in spec.types.iter().zip(sizes) {
        m.carriers.insert(t.clone(), labels(*n));
    }
    if spec.logic == Logic::Explicit {
        let mut exc = Vec::new();
        let mut maps = Vec::new();
        if let Some(es) = spec.exc_sum {
            let info = spec.sum(es).clone();
            let ev = &mut Evaluator::new(store, &m);
            for (lab, p) in info.labels.iter().zip(&info.summands) {
                let mut map = BTreeMap::new();
                for w in ev.carrier(p)? {
                    map.insert(w, Val::Atom(exc.len() as u32));
                    exc.push(format!("e{}", exc.len()));
                }
                maps.push((lab.clone(), map));
            }
        }
        m.exceptions = Some(exc);
        m.maps.extend(maps);
    }
    Ok(m)
}

fn size_vectors(types: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..types {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |n| {
                    let mut w = v.clone();
                    w.push(n);
                    w
                })
            })
            .collect();
    }
    out
}

/// For each free generator, its source carrier and target carrier.
type Space = Vec<(Name, Vec<Val>, Vec<Val>)>;

fn space(store: &mut Store, base: &FiniteModel) -> Result<Space, ModelError> {
    let gens = free_generators(store);
    let mut ev = Evaluator::new(store, base);
    let mut out = Vec::new();
    for (n, s, t) in gens {
        out.push((n, ev.carrier(&s)?, ev.carrier(&t)?));
    }
    Ok(out)
}

fn count(space: &Space) -> u128 {
    space.iter().fold(1u128, |acc, (_, s, t)| {
        acc.saturating_mul((t.len() as u128).saturating_pow(s.len() as u32))
    })
}

/// The number of candidate models with carriers up to `max_carrier`.
pub fn candidate_count(store: &Store, max_carrier: usize) -> Result<u128, ModelError> {
    let mut st = store.clone();
    let mut total = 0u128;
    for sizes in size_vectors(st.spec().types.len(), max_carrier) {
        let base = skeleton(&mut st, &sizes)?;
        total = total.saturating_add(count(&space(&mut st, &base)?));
    }
    Ok(total)
}

/// Every valid model with carriers up to `max_carrier`, in a fixed order.
pub struct Enumeration {
    store: Store,
    sizes: std::vec::IntoIter<Vec<usize>>,
    base: Option<FiniteModel>,
    space: Space,
    digits: Vec<usize>,
    done: bool,
}

pub fn enumerate_models(store: &Store, max_carrier: usize, cap: u128) -> Result<Enumeration, ModelError> {
    let candidates = candidate_count(store, max_carrier)?;
    if candidates > cap {
        return Err(ModelError::BudgetExceeded { candidates, cap });
    }
    Ok(Enumeration {
        store: store.clone(),
        sizes: size_vectors(store.spec().types.len(), max_carrier).into_iter(),
        base: None,
        space: Vec::new(),
        digits: Vec::new(),
        done: true,
    })
}

fn assemble(base: &FiniteModel, space: &Space, digits: &[usize]) -> FiniteModel {
    let mut m = base.clone();
    let mut d = digits.iter();
    for (n, src, tgt) in space {
        let map = src
            .iter()
            .map(|x| (x.clone(), tgt[*d.next().expect("one digit per entry")].clone()))
            .collect();
        m.maps.insert(n.clone(), map);
    }
    m
}

impl Iterator for Enumeration {
    type Item = FiniteModel;

    fn next(&mut self) -> Option<FiniteModel> {
        loop {
            if self.done {
                let sizes = self.sizes.next()?;
                let base = skeleton(&mut self.store, &sizes).ok()?;
                self.space = space(&mut self.store, &base).ok()?;
                let entries: usize = self.space.iter().map(|(_, s, _)| s.len()).sum();
                self.digits = vec![0; entries];
                self.done = count(&self.space) == 0;
                self.base = Some(base);
                continue;
            }
            let m = assemble(self.base.as_ref().expect("set with the space"), &self.space, &self.digits);
            // odometer step
            let bases: Vec<usize> = self
                .space
                .iter()
                .flat_map(|(_, s, t)| std::iter::repeat_n(t.len(), s.len()))
                .collect();
            let mut i = 0;
            loop {
                if i == self.digits.len() {
                    self.done = true;
                    break;
                }
                self.digits[i] += 1;
                if self.digits[i] < bases[i] {
                    break;
                }
                self.digits[i] = 0;
                i += 1;
            }
            if validate_model(&mut self.store, &m).is_valid() {
                return Some(m);
            }
        }
    }
}

/// Valid models drawn at random with carriers up to `max_carrier`; at most
/// `count` of them, from at most `20 * count` candidates.
pub fn sample_models(store: &Store, max_carrier: usize, count: usize, seed: u64) -> Vec<FiniteModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = store.clone();
    let types = st.spec().types.len();
    let mut out = Vec::new();
    for _ in 0..count * 20 {
        if out.len() == count {
            break;
        }
        let sizes: Vec<usize> = (0..types).map(|_| rng.gen_range(0..=max_carrier)).collect();
        let Ok(base) = skeleton(&mut st, &sizes) else { continue };
        let Ok(sp) = space(&mut st, &base) else { continue };
        if sp.iter().any(|(_, s, t)| !s.is_empty() && t.is_empty()) {
            continue;
        }
        let digits: Vec<usize> = sp
            .iter()
            .flat_map(|(_, s, t)| std::iter::repeat_n(t.len(), s.len()))
            .map(|b| rng.gen_range(0..b))
            .collect();
        let m = assemble(&base, &sp, &digits);
        if validate_model(&mut st, &m).is_valid() && !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// Models to check against: every valid model up to `max_carrier` when the
/// candidates fit under `cap`; otherwise every model at the largest bound
/// that fits, plus `sample` random ones at `max_carrier`.
pub struct ModelSet {
    pub models: Vec<FiniteModel>,
    /// Largest bound enumerated exhaustively.
    pub bound: Option<usize>,
    pub exhaustive: bool,
}

impl ModelSet {
    pub fn describe(&self, max_carrier: usize) -> String {
        match (self.exhaustive, self.bound) {
            (true, _) => format!("{} models, all with carriers up to {max_carrier}", self.models.len()),
            (false, Some(b)) => format!(
                "{} models: all with carriers up to {b}, plus a sample up to {max_carrier}",
                self.models.len()
            ),
            (false, None) => format!("{} sampled models with carriers up to {max_carrier}", self.models.len()),
        }
    }
}

pub fn models_for(store: &Store, max_carrier: usize, cap: u128, sample: usize, seed: u64) -> ModelSet {
    for b in (0..=max_carrier).rev() {
        if let Ok(e) = enumerate_models(store, b, cap) {
            let mut models: Vec<FiniteModel> = e.collect();
            let exhaustive = b == max_carrier;
            if !exhaustive {
                for m in sample_models(store, max_carrier, sample, seed) {
                    if !models.contains(&m) {
                        models.push(m);
                    }
                }
            }
            return ModelSet {
                models,
                bound: Some(b),
                exhaustive,
            };
        }
    }
    ModelSet {
        models: sample_models(store, max_carrier, sample, seed),
        bound: None,
        exhaustive: false,
    }
}

//! Engine properties over seeded random specifications. Terms come from
//! the theorem instances of each specification, so a pool holds many terms
//! of the same signature, both sides of known equations among them.

use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use excalc::deduction::Store;
use excalc::dsl;
use excalc::fuzz::{random_spec_text, theorem_goals};
use excalc::syntax::{Term, Ty};

pub const NAT_DECO: &str = include_str!("../../corpus/nat.deco");

pub fn spec_text(seed: u64) -> String {
    if seed.is_multiple_of(8) {
        return NAT_DECO.to_string();
    }
    random_spec_text(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub struct Pool {
    pub text: String,
    pub store: Store,
    /// Terms grouped by signature.
    pub groups: Vec<Vec<Term>>,
}

impl Pool {
    pub fn new(seed: u64) -> Pool {
        let text = spec_text(seed);
        let spec = dsl::parse(&text).expect("corpus specifications parse");
        let store = Store::new(spec.clone());
        let mut by_sig: BTreeMap<(String, String), Vec<Term>> = BTreeMap::new();
        let mut seen = HashSet::new();
        let mut goals: Vec<String> = theorem_goals(&spec, 3).into_iter().map(|g| g.text).collect();
        if text == NAT_DECO {
            goals.extend(["p'' == p", "p . z == z", "p' . s == s . p'"].map(String::from));
        }
        for g in goals {
            let Ok((l, r)) = dsl::parse_equation(&spec, &g) else { continue };
            let Ok((x, y)) = store.signature(&l) else { continue };
            let padded = [
                Term::then(l.clone(), Term::Id(y.clone())),
                Term::then(Term::Id(x.clone()), r.clone()),
            ];
            for t in [l, r].into_iter().chain(padded) {
                if seen.insert(t.clone()) {
                    by_sig.entry((store.show_ty(&x), store.show_ty(&y))).or_default().push(t);
                }
            }
        }
        Pool {
            text,
            store,
            groups: by_sig.into_values().collect(),
        }
    }

    fn pick(&self, n: usize, pick: u64) -> Option<Vec<&Term>> {
        if self.groups.is_empty() {
            return None;
        }
        let g = &self.groups[(pick % self.groups.len() as u64) as usize];
        let mut k = pick / 7 + 1;
        Some(
            (0..n)
                .map(|_| {
                    k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    &g[((k >> 33) % g.len() as u64) as usize]
                })
                .collect(),
        )
    }

    fn all(&self) -> impl Iterator<Item = &Term> {
        self.groups.iter().flatten()
    }
}

fn yes(store: &mut Store, a: &Term, b: &Term) -> Result<bool, String> {
    match store.equiv(a, b) {
        Ok(p) => Ok(p.is_yes()),
        Err(excalc::deduction::DeductionError::DepthExceeded(_)) => Ok(false),
        Err(e) => Err(format!("{} == {}: {e}", store.show(a), store.show(b))),
    }
}

pub fn normalize_idempotent(seed: u64) -> Result<(), String> {
    let mut p = Pool::new(seed);
    let terms: Vec<Term> = p.all().cloned().collect();
    for t in terms {
        let n = p.store.normalize(&t).map_err(|e| e.to_string())?;
        let nn = p.store.normalize(&n).map_err(|e| e.to_string())?;
        if n != nn {
            return Err(format!("{} normalizes to {} then {}", p.store.show(&t), p.store.show(&n), p.store.show(&nn)));
        }
    }
    Ok(())
}

pub fn equiv_reflexive(seed: u64) -> Result<(), String> {
    let mut p = Pool::new(seed);
    let terms: Vec<Term> = p.all().cloned().collect();
    for t in terms {
        if !yes(&mut p.store, &t, &t)? {
            return Err(format!("{} is not equivalent to itself", p.store.show(&t)));
        }
    }
    Ok(())
}

pub fn equiv_symmetric(seed: u64, pick: u64) -> Result<(), String> {
    let mut p = Pool::new(seed);
    let Some(ts) = p.pick(2, pick) else { return Ok(()) };
    let (a, b) = (ts[0].clone(), ts[1].clone());
    let ab = yes(&mut p.store, &a, &b)?;
    let ba = yes(&mut p.store, &b, &a)?;
    if ab != ba {
        return Err(format!("{} vs {}: {ab} one way, {ba} the other", p.store.show(&a), p.store.show(&b)));
    }
    Ok(())
}

pub fn equiv_transitive(seed: u64, pick: u64) -> Result<(), String> {
    let mut p = Pool::new(seed);
    let Some(ts) = p.pick(3, pick) else { return Ok(()) };
    let (a, b, c) = (ts[0].clone(), ts[1].clone(), ts[2].clone());
    if yes(&mut p.store, &a, &b)? && yes(&mut p.store, &b, &c)? && !yes(&mut p.store, &a, &c)? {
        let s = &p.store;
        return Err(format!("{} == {} == {} but not the ends", s.show(&a), s.show(&b), s.show(&c)));
    }
    Ok(())
}

/// Asking twice, or along an equivalent spelling, gives the same inverse
/// image, and no two cached images share a key.
pub fn inverse_image_canonical(seed: u64) -> Result<(), String> {
    let mut p = Pool::new(seed);
    let terms: Vec<Term> = p.all().cloned().collect();
    for t in terms {
        let Ok((_, y)) = p.store.signature(&t) else { continue };
        let padded = Term::then(Term::then(t.clone(), Term::Id(y.clone())), Term::Id(y.clone()));
        let first = p.store.inverse_image_comp(&t);
        let again = p.store.inverse_image_comp(&t);
        let other = p.store.inverse_image_comp(&padded);
        match (first, again, other) {
            (Ok(a), Ok(b), Ok(c)) if a == b && b == c => {}
            (Err(_), Err(_), Err(_)) => {}
            (a, b, c) => return Err(format!("{}: {a:?}, {b:?}, {c:?}", p.store.show(&t))),
        }
        if y == Ty::Zero && p.store.exceptional_sum_id().is_some() {
            let a = p.store.exceptional_inverse_image(&t).map_err(|e| e.to_string())?;
            let b = p.store.exceptional_inverse_image(&t).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("exceptional image of {}: {a:?} then {b:?}", p.store.show(&t)));
            }
        }
    }
    let mut keys = HashSet::new();
    for ii in p.store.inverse_images() {
        if !keys.insert((ii.target, ii.along.clone(), ii.flavor)) {
            return Err(format!("two cached images along {}", p.store.show(&ii.along)));
        }
    }
    Ok(())
}

/// Printing a specification and parsing it back gives the same
/// specification, and every pooled term survives the same trip.
pub fn parse_print_round_trip(seed: u64) -> Result<(), String> {
    let p = Pool::new(seed);
    let spec = p.store.spec().clone();
    let printed = dsl::print_spec(&spec);
    let back = dsl::parse(&printed).map_err(|e| format!("{e} in\n{printed}"))?;
    if back != dsl::parse(&p.text).expect("parsed before") {
        return Err(format!("reparse differs:\n{printed}"));
    }
    if dsl::print_spec(&back) != printed {
        return Err(format!("printing is not stable:\n{printed}"));
    }
    for t in p.all() {
        let shown = excalc::print::term(&spec, t);
        let (x, y) = p.store.signature(t).map_err(|e| e.to_string())?;
        let t2 = dsl::parse_term(&spec, &shown, Some((&x, &y))).map_err(|e| format!("`{shown}`: {e}"))?;
        if t2 != *t {
            return Err(format!("`{shown}` reparses as `{}`", excalc::print::term(&spec, &t2)));
        }
    }
    Ok(())
}

/// Every property over `cases` seeds, through a deterministic runner.
pub fn run(cases: u32) -> Result<String, String> {
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    type Check = fn(u64, u64) -> Result<(), String>;
    let checks: [(&str, Check); 6] = [
        ("normalize idempotence", |s, _| normalize_idempotent(s)),
        ("equiv reflexivity", |s, _| equiv_reflexive(s)),
        ("equiv symmetry", equiv_symmetric),
        ("equiv transitivity", equiv_transitive),
        ("inverse-image canonicity", |s, _| inverse_image_canonical(s)),
        ("parse/print round trip", |s, _| parse_print_round_trip(s)),
    ];
    for (name, check) in checks {
        runner
            .run(&(any::<u64>(), any::<u64>()), |(s, k)| check(s, k).map_err(TestCaseError::fail))
            .map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("6 properties, {cases} cases each"))
}

#![allow(dead_code)]

use std::path::PathBuf;

use excalc::deduction::Store;
use excalc::dsl;
use excalc::model::{parse_model, FiniteModel, Val};
use excalc::syntax::{Specification, SumId, Term, Ty};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

pub fn spec(name: &str) -> Specification {
    dsl::parse(&std::fs::read_to_string(corpus_path(name)).unwrap()).unwrap()
}

pub fn store(name: &str) -> Store {
    Store::new(spec(name))
}

pub fn parse(text: &str) -> Store {
    Store::new(dsl::parse(text).unwrap_or_else(|e| panic!("{e}\n{text}")))
}

pub fn term(st: &Store, text: &str) -> Term {
    dsl::parse_term(st.spec(), text, None).unwrap_or_else(|e| panic!("`{text}`: {e}"))
}

/// True when the equation is proved.
pub fn proves(st: &mut Store, eq: &str) -> bool {
    let (l, r) = dsl::parse_equation(st.spec(), eq).unwrap_or_else(|e| panic!("`{eq}`: {e}"));
    st.equiv(&l, &r).unwrap_or_else(|e| panic!("`{eq}`: {e}")).is_yes()
}

pub fn model(st: &mut Store, name: &str) -> FiniteModel {
    parse_model(st, &std::fs::read_to_string(corpus_path(name)).unwrap()).unwrap()
}

pub fn nat_sum(st: &Store) -> SumId {
    st.spec().sum_with_vertex(&Ty::named("Nat")).expect("Nat is a sum")
}

/// Naturals in the truncated model are stored by value.
pub fn n(k: u32) -> Val {
    Val::Atom(k)
}

/// Successor on {0..9}, undefined at 9.
pub fn suc(k: u32) -> Option<u32> {
    (k < 9).then_some(k + 1)
}

pub fn pre(k: u32) -> u32 {
    k.saturating_sub(1)
}

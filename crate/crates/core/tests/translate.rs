mod common;

use common::*;
use excalc::deduction::Store;
use excalc::dsl;
use excalc::model::{check_equation, enumerate_models, parse_model, Evaluator, Val};
use excalc::syntax::{Logic, Ty};
use excalc::translate::{expand, undecorate, Expansion, TranslateError};

const VALUES_ONLY: &str = "logic decorated; type Unit; type Nat; fun z : Unit -> Nat @value; \
    fun s : Nat -> Nat @value; sum Nat = s: Nat + z: Unit; \
    fun p : Nat -> Nat = case id of [s => id | z => z]; eq p . s == id(Nat);";

#[test]
fn undecorating_the_naturals() {
    let r = undecorate(&spec("nat.deco")).unwrap();
    assert_eq!(r.target.logic, Logic::Basic);
    let printed = dsl::print_spec(&r.target);
    assert!(printed.contains("fun t : Unit -> 0;"), "{printed}");
    assert!(printed.contains("fun p'' : Nat -> Nat = p' handle [t => z];"), "{printed}");
    assert_eq!(dsl::parse(&printed).unwrap(), r.target);
    assert!(r.provenance.iter().any(|l| l.contains("t")));
}

#[test]
fn undecorating_values_only_keeps_the_value_part() {
    let deco = dsl::parse(VALUES_ONLY).unwrap();
    let basic = dsl::parse(&VALUES_ONLY.replace("decorated", "basic").replace(" @value", "")).unwrap();
    let r = undecorate(&deco).unwrap().target;
    assert_eq!(r.types, basic.types);
    assert_eq!(r.generators, basic.generators);
    assert_eq!(r.axioms, basic.axioms);
    // the only extra sum is the empty one on 0
    let extra: Vec<_> = r.sums.iter().filter(|s| !basic.sums.contains(s)).collect();
    assert_eq!(extra.len(), 1);
    assert_eq!(extra[0].vertex, Ty::Zero);
    assert!(extra[0].summands.is_empty());
    // and it changes no model
    let (mut a, mut b) = (Store::new(r), Store::new(basic));
    for max in 1..=3 {
        let na = enumerate_models(&a, max, 10_000).unwrap().count();
        let nb = enumerate_models(&b, max, 10_000).unwrap().count();
        assert_eq!(na, nb, "at bound {max}");
    }
    assert!(proves(&mut a, "p . s == id(Nat)"));
    assert!(proves(&mut b, "p . s == id(Nat)"));
}

#[test]
fn expanding_the_naturals() {
    let r = expand(&spec("nat.deco")).unwrap();
    assert_eq!(r.target.logic, Logic::Explicit);
    let printed = dsl::print_spec(&r.target);
    for line in [
        "fun p' : Nat -> Nat+E = ",
        "fun p : Nat -> Nat = case id(Nat) of [s => id(Nat) | z => z];",
        "fun t : Unit -> E;",
        "sum E = t: Unit;",
        "sum Nat+E = inl@Nat: Nat + inr@Nat: E;",
    ] {
        assert!(printed.contains(line), "missing `{line}` in\n{printed}");
    }
    assert_eq!(dsl::parse(&printed).unwrap(), r.target);
}

#[test]
fn expanded_raising_predecessor() {
    let mut x = Expansion::new(store("nat.deco")).unwrap();
    let st = &mut x.expl;
    assert!(proves(st, "p' . z == inr@Nat . t"));
    assert!(proves(st, "p' . s == inl@Nat"));
    assert!(!proves(st, "p' . s == inl@Nat . s"));

    let text = std::fs::read_to_string(corpus_path("mnat.model")).unwrap();
    let m = parse_model(st, &text).unwrap();
    let (p1, z, s) = (term(st, "p'"), term(st, "z"), term(st, "s"));
    let (inr_t, inl) = (term(st, "inr@Nat . t"), term(st, "inl@Nat"));
    let (_, nat_e) = st.signature(&inr_t).unwrap();
    let pz = term(st, "p' . z");
    let ps = term(st, "p' . s");
    let mut ev = Evaluator::new(st, &m);
    let star = Val::Atom(0);
    let eps = ev.apply(&inr_t, &star).unwrap();
    assert_eq!(ev.show_tagged(&nat_e, &eps), "E:ε");
    // the oracle: p'(0) raises, p'(k) = k - 1 otherwise
    for k in 0..=9 {
        let want = if k == 0 { eps.clone() } else { ev.apply(&inl, &n(k - 1)).unwrap() };
        assert_eq!(ev.apply(&p1, &n(k)).unwrap(), want, "at {k}");
    }
    let zero = ev.apply(&z, &star).unwrap();
    assert_eq!(ev.apply(&p1, &zero).unwrap(), ev.apply(&pz, &star).unwrap());
    for k in 0..9 {
        let sk = ev.apply(&s, &n(k)).unwrap();
        assert_eq!(ev.apply(&ps, &n(k)).unwrap(), ev.apply(&p1, &sk).unwrap());
        assert_eq!(ev.apply(&ps, &n(k)).unwrap(), ev.apply(&inl, &n(k)).unwrap());
    }
    assert!(check_equation(&mut ev, &pz, &inr_t).unwrap().holds());
    assert!(check_equation(&mut ev, &ps, &inl).unwrap().holds());
}

#[test]
fn expanded_equations_are_derivable() {
    let mut x = Expansion::new(store("nat.deco")).unwrap();
    for eq in ["p'' == p", "p' . s == p . s", "p . z == z"] {
        let (l, r) = dsl::parse_equation(x.deco.spec(), eq).unwrap();
        assert!(x.deco.equiv(&l, &r).unwrap().is_yes(), "{eq}");
        let (l2, r2) = x.equation(&l, &r).unwrap();
        let proof = x.expl.equiv(&l2, &r2).unwrap();
        assert!(proof.is_yes(), "{eq} expands to {} == {}", x.expl.show(&l2), x.expl.show(&r2));
    }
}

#[test]
fn only_decorated_input_is_translated() {
    let basic = spec("nat.basic");
    assert!(matches!(undecorate(&basic), Err(TranslateError::KindMismatch(Logic::Basic))));
    assert!(matches!(expand(&basic), Err(TranslateError::KindMismatch(Logic::Basic))));
    let expl = expand(&spec("nat.deco")).unwrap().target;
    assert!(matches!(expand(&expl), Err(TranslateError::KindMismatch(Logic::Explicit))));
}

mod common;

use common::*;
use excalc::dsl;
use excalc::model::{
    check_equation, enumerate_models, parse_model, print_model, soundness_audit, validate_model, Evaluator,
    ModelError, Violation,
};
use excalc::syntax::{Decoration, Equation, Origin};
use excalc::translate::Expansion;

fn expansion() -> Expansion {
    Expansion::new(store("nat.deco")).unwrap()
}

fn mnat(x: &mut Expansion) -> excalc::model::FiniteModel {
    model(&mut x.expl, "mnat.model")
}

fn equation(x: &Expansion, text: &str) -> Equation {
    let (lhs, rhs) = dsl::parse_equation(x.deco.spec(), text).unwrap();
    Equation {
        lhs,
        rhs,
        level: Decoration::Computation,
        origin: Origin::Derived,
    }
}

#[test]
fn truncated_naturals_are_a_model() {
    let mut st = store("nat.basic");
    let m = model(&mut st, "nat.model");
    let r = validate_model(&mut st, &m);
    assert!(r.is_valid(), "{r:?}");
    assert!(r.notes.iter().any(|n| n == "s is partial: undefined at 9"), "{r:?}");

    let mut x = expansion();
    let m = mnat(&mut x);
    let r = validate_model(&mut x.expl, &m);
    assert!(r.is_valid(), "{r:?}");
}

#[test]
fn exceptions_must_be_the_disjoint_union() {
    let mut x = expansion();
    let text = std::fs::read_to_string(corpus_path("mnat.model"))
        .unwrap()
        .replace("exceptions = {ε};", "exceptions = {ε1, ε2};")
        .replace("fun t : * -> ε;", "fun t : * -> ε1;");
    let m = parse_model(&mut x.expl, &text).unwrap();
    let r = validate_model(&mut x.expl, &m);
    assert!(
        r.violations.iter().any(|v| matches!(v, Violation::ExceptionsNotDisjointUnion(_))),
        "{r:?}"
    );
    assert!(r.violations.iter().any(|v| v.to_string().starts_with("E is not the disjoint union of the M(P_i)")));
}

#[test]
fn auditing_single_equations() {
    let mut x = expansion();
    let m = mnat(&mut x);
    let eqs = [equation(&x, "p'' == p"), equation(&x, "p' == p"), equation(&x, "s == s")];
    let r = soundness_audit(&mut x, &eqs, &m);
    let verdicts: Vec<bool> = r.entries.iter().map(|e| e.holds).collect();
    assert_eq!(verdicts, [true, false, true]);
    let d = &r.entries[1].detail;
    assert!(d.contains("0") && d.contains("E:ε") && d.contains("Nat:0"), "{d}");
    assert_eq!(r.failures(), 1);
}

#[test]
fn derived_equations_hold_in_the_truncated_model() {
    let spec = spec("nat.deco");
    let (st, unproved) = excalc::cli::derive(&spec, &["p'' == p".to_string()], None).unwrap();
    assert!(unproved.is_empty());
    let eqs = st.derived().to_vec();
    assert!(eqs.len() >= 5, "{}", eqs.len());
    let mut x = Expansion::new(st).unwrap();
    let m = mnat(&mut x);
    let r = soundness_audit(&mut x, &eqs, &m);
    assert_eq!(r.entries.len(), eqs.len());
    assert_eq!(r.failures(), 0, "{}", r.render());

    let empty = soundness_audit(&mut x, &[], &m);
    assert!(empty.entries.is_empty());
    assert_eq!(empty.failures(), 0);
}

#[test]
fn enumeration_respects_axioms() {
    let free = parse("logic basic; type A; fun f : A -> A; fun g : A -> A;");
    let mut tied = parse("logic basic; type A; fun f : A -> A; fun g : A -> A; eq f == g;");
    let (f, g) = (term(&tied, "f"), term(&tied, "g"));
    // the oracle: the free models in which f and g agree
    let mut expected = 0;
    for m in enumerate_models(&free, 2, 1_000).unwrap() {
        let mut ev = Evaluator::new(&mut tied, &m);
        if check_equation(&mut ev, &f, &g).unwrap().holds() {
            expected += 1;
        }
    }
    let got = enumerate_models(&tied, 2, 1_000).unwrap().count();
    assert_eq!(got, expected);
    assert_eq!(got, 6);
}

#[test]
fn naturals_model_counts() {
    // with Nat declared a sum, Unit is empty in every small model
    let st = store("nat.basic");
    let counts: Vec<usize> = (1..=2).map(|b| enumerate_models(&st, b, 10_000).unwrap().count()).collect();
    assert_eq!(counts, [2, 4]);
    for m in enumerate_models(&st, 2, 10_000).unwrap() {
        assert!(m.carrier("Unit").unwrap().is_empty());
    }
}

#[test]
fn the_enumeration_cap_is_enforced() {
    let st = store("nat.basic");
    match enumerate_models(&st, 6, 100) {
        Err(ModelError::BudgetExceeded { candidates, cap }) => {
            assert_eq!(cap, 100);
            assert!(candidates > 100);
        }
        Err(e) => panic!("{e}"),
        Ok(_) => panic!("expected the cap to be hit"),
    }
}

#[test]
fn model_files_round_trip() {
    let mut x = expansion();
    let m = mnat(&mut x);
    let printed = print_model(&mut x.expl, &m);
    assert_eq!(parse_model(&mut x.expl, &printed).unwrap(), m);

    let mut st = store("nat.basic");
    let m = model(&mut st, "nat.model");
    let printed = print_model(&mut st, &m);
    assert_eq!(parse_model(&mut st, &printed).unwrap(), m);
}

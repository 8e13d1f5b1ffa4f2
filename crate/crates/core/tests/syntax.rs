mod common;

use common::*;
use excalc::syntax::{
    build_specification, decoration_of, name, well_formed, Declaration, Decoration, Logic, SpecError, SumKind,
    Term, Ty,
};

fn nat_decls() -> Vec<Declaration> {
    vec![
        Declaration::Type(name("Unit")),
        Declaration::Type(name("Nat")),
        Declaration::Fun {
            name: name("z"),
            source: Ty::named("Unit"),
            target: Ty::named("Nat"),
            decoration: None,
            body: None,
        },
        Declaration::Fun {
            name: name("s"),
            source: Ty::named("Nat"),
            target: Ty::named("Nat"),
            decoration: None,
            body: None,
        },
    ]
}

#[test]
fn the_naturals() {
    let spec = build_specification(Logic::Basic, nat_decls()).unwrap();
    assert_eq!(spec.types.len(), 2);
    assert_eq!(spec.generators.len(), 2);
    assert!(spec.axioms.is_empty());
    assert!(well_formed(&spec).is_empty());
}

#[test]
fn the_empty_specification() {
    let spec = build_specification(Logic::Basic, vec![]).unwrap();
    assert!(spec.types.is_empty());
    assert!(well_formed(&spec).is_empty());
}

#[test]
fn the_decorated_naturals() {
    let spec = spec("nat.deco");
    assert_eq!(spec.exceptions.len(), 1);
    let esum = spec.sum(spec.exceptional_sum.unwrap());
    assert_eq!(esum.kind, SumKind::Exceptional);
    assert_eq!(esum.vertex, Ty::Zero);
    assert_eq!(esum.summands, vec![Ty::named("Unit")]);
    assert!(well_formed(&spec).is_empty());
}

#[test]
fn no_exceptions_is_allowed_and_noted() {
    let mut decls = nat_decls();
    for d in &mut decls {
        if let Declaration::Fun { decoration, .. } = d {
            *decoration = Some(Decoration::Value);
        }
    }
    let spec = build_specification(Logic::Decorated, decls).unwrap();
    let esum = spec.sum(spec.exceptional_sum.unwrap());
    assert!(esum.summands.is_empty());
    let report = well_formed(&spec);
    assert!(report.is_empty());
    assert!(report.notes.iter().any(|n| n.contains("no exceptions")));
}

#[test]
fn construction_errors() {
    let mut dup = nat_decls();
    dup.push(Declaration::Type(name("Nat")));
    assert!(matches!(build_specification(Logic::Basic, dup), Err(SpecError::DuplicateName(_))));

    let unknown = vec![Declaration::Fun {
        name: name("f"),
        source: Ty::named("A"),
        target: Ty::named("A"),
        decoration: None,
        body: None,
    }];
    assert!(build_specification(Logic::Basic, unknown).is_err());

    let mut exc = nat_decls();
    exc.push(Declaration::Exception {
        name: name("t"),
        param: Ty::named("Unit"),
    });
    assert!(matches!(build_specification(Logic::Basic, exc), Err(SpecError::KindMismatch(_))));

    let mut e = nat_decls();
    e.push(Declaration::Fun {
        name: name("f"),
        source: Ty::named("Nat"),
        target: Ty::Exc,
        decoration: None,
        body: None,
    });
    let err = build_specification(Logic::Basic, e).unwrap_err();
    assert!(err.to_string().contains("distinguished type outside explicit logic"), "{err}");
}

#[test]
fn decorations() {
    let deco = spec("nat.deco");
    let p = deco.generator("p").unwrap().body.clone().unwrap();
    let p1 = deco.generator("p'").unwrap().body.clone().unwrap();
    assert_eq!(decoration_of(&deco, &p).unwrap(), Decoration::Value);
    assert_eq!(decoration_of(&deco, &p1).unwrap(), Decoration::Computation);
    assert_eq!(decoration_of(&deco, &Term::Id(Ty::named("Nat"))).unwrap(), Decoration::Value);
    assert_eq!(decoration_of(&deco, &Term::gen("t")).unwrap(), Decoration::Computation);
    let basic = spec("nat.basic");
    assert_eq!(decoration_of(&basic, &Term::gen("s")).unwrap(), Decoration::Plain);
}

#[test]
fn composition_is_a_computation_iff_a_factor_is() {
    let st = store("nat.deco");
    let pairs = [("s", "s", false), ("p'", "s", true), ("s", "p'", true), ("p'", "p'", true), ("p''", "p", true)];
    for (g, f, comp) in pairs {
        let t = term(&st, &format!("{g} . {f}"));
        let d = decoration_of(st.spec(), &t).unwrap();
        assert_eq!(d == Decoration::Computation, comp, "{g} . {f}");
    }
}

#[test]
fn mismatched_branches_are_reported() {
    let mut spec = spec("nat.basic");
    let sum = spec.sum_with_vertex(&Ty::named("Nat")).unwrap();
    let i = spec.generators.iter().position(|g| &*g.name == "p").unwrap();
    spec.generators[i].body = Some(Term::Match(sum, vec![Term::Id(Ty::named("Nat")), Term::Id(Ty::named("Unit"))]));
    let report = well_formed(&spec);
    assert!(report.violations.iter().any(|v| v.contains("match branches disagree on target")), "{report:?}");
}

#[test]
fn values_are_accepted_where_computations_are_expected() {
    let mut st = store("nat.deco");
    // a value branch next to a raising one, and a value handled like a computation
    assert!(proves(&mut st, "case id(Nat) of [s => id(Nat) | z => raise(Nat) . t] == p'"));
    assert!(proves(&mut st, "(z) handle [t => z] == z"));
}

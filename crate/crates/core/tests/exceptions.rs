mod common;

use common::*;
use excalc::deduction::Store;
use excalc::exceptions::{mk_raise, raise_at, ExceptionError};
use excalc::model::{check_equation, models_for, Evaluator, FiniteModel, Val};
use excalc::syntax::{Decoration, Term, Ty};
use excalc::translate::Expansion;

fn models(x: &Expansion, max: usize) -> Vec<FiniteModel> {
    let set = models_for(&x.expl, max, 5_000, 0, 1);
    assert!(set.exhaustive, "{}", set.describe(max));
    assert!(!set.models.is_empty());
    set.models
}

#[test]
fn raise_is_the_empty_match() {
    let mut st = store("nat.deco");
    let r = mk_raise(Ty::named("Nat"));
    assert_eq!(r, Term::Empty(Ty::named("Nat")));
    assert_eq!(st.decoration(&r).unwrap(), Decoration::Value);
    assert_eq!(st.signature(&r).unwrap(), (Ty::Zero, Ty::named("Nat")));
    assert_eq!(st.normalize(&mk_raise(Ty::Zero)).unwrap(), Term::Id(Ty::Zero));
    assert!(st.equiv(&r, &term(&st, "raise(Nat)")).unwrap().is_yes());
}

#[test]
fn raising_an_exception() {
    let mut st = store("nat.deco");
    let r = raise_at(st.spec(), Ty::named("Nat"), "t").unwrap();
    assert_eq!(st.signature(&r).unwrap(), (Ty::named("Unit"), Ty::named("Nat")));
    assert_eq!(st.decoration(&r).unwrap(), Decoration::Computation);
    assert_eq!(
        raise_at(st.spec(), Ty::named("Nat"), "nope"),
        Err(ExceptionError::UnknownException("nope".into()))
    );
    // propagation through any computation
    let g = Term::comp(vec![term(&st, "p'"), r.clone()]);
    let want = raise_at(st.spec(), Ty::named("Nat"), "t").unwrap();
    assert_eq!(st.normalize(&g).unwrap(), st.normalize(&want).unwrap());
}

#[test]
fn raising_evaluates_to_the_exception() {
    let st = store("nat.deco");
    let r = raise_at(st.spec(), Ty::named("Nat"), "t").unwrap();
    let mut x = Expansion::new(st).unwrap();
    let e = x.term(&r).unwrap();
    let m = model(&mut x.expl, "mnat.model");
    let mut ev = Evaluator::new(&mut x.expl, &m);
    let v = ev.apply(&e, &Val::Atom(0)).unwrap();
    assert_eq!(ev.show_tagged(&ev.store.signature(&e).unwrap().1, &v), "E:ε");
}

#[test]
fn computation_inverse_images() {
    let mut st = store("nat.deco");
    let p1 = term(&st, "p'");
    let ii = st.inverse_image_comp(&p1).unwrap();
    let text = st.describe_inverse(ii, &p1);
    assert!(
        text.contains("Nat = Nat + Unit with coprojections s, z; restrictions id(Nat), t"),
        "{text}"
    );

    // a value pulls back to X = X + 0
    let ii = st.inverse_image_comp(&term(&st, "p")).unwrap();
    let inv = st.inverse_image_by_id(ii).clone();
    assert_eq!(st.sum(inv.sum).summands, vec![Ty::named("Nat"), Ty::Zero]);

    // a raise pulls back to 0 + P
    let r = term(&st, "raise(Nat) . t");
    let ii = st.inverse_image_comp(&r).unwrap();
    let inv = st.inverse_image_by_id(ii).clone();
    assert_eq!(st.sum(inv.sum).summands, vec![Ty::Zero, Ty::named("Unit")]);
    assert_eq!(inv.restrictions[1], term(&st, "t"));
    assert_eq!(st.decoration(&inv.restrictions[1]).unwrap(), Decoration::Computation);
}

#[test]
fn case_over_a_computation() {
    let mut st = store("nat.deco");
    assert!(proves(
        &mut st,
        "case^t p' of [id => id(Nat) | raise => case^e t of [t => z]] \
         == [s => id(Nat) | z => case^e t of [t => z]]"
    ));
    // a value never takes the raise branch
    assert!(proves(&mut st, "case^t s of [id => p | raise => raise(Nat)] == p"));
    let u = term(&st, "p'");
    let bad = st.mk_case_t(&u, &term(&st, "id(Nat)"), &term(&st, "raise(Unit)"));
    assert!(bad.is_err());
}

const ONE_EXC: &str = "logic decorated; type A; type B; exception e of A; \
                       fun u : A -> B @computation; fun g : B -> B @value; fun h : A -> B @value;";

/// The value of the decorated `u` at `a` read directly off the model maps:
/// `Ok(b)` when it returns, `Err(x)` when it raises `e` with parameter `x`.
fn run_u(ev: &mut Evaluator, u: &Term, e: &Term, a: &Val) -> Result<Val, Val> {
    let (_, tgt) = ev.store.signature(u).unwrap();
    let v = ev.apply(u, a).unwrap();
    let shown = ev.show_tagged(&tgt, &v);
    if !shown.starts_with("E:") {
        return Ok(match v {
            Val::Tag(_, b) => *b,
            other => other,
        });
    }
    let inner = match v {
        Val::Tag(_, x) => *x,
        other => other,
    };
    let params = ev.carrier(&Ty::named("A")).unwrap();
    let x = params
        .into_iter()
        .find(|x| ev.apply(e, x).unwrap() == inner)
        .expect("E is the image of the exception");
    Err(x)
}

#[test]
fn case_t_and_handle_agree_with_brute_force() {
    let st = parse(ONE_EXC);
    let st2 = st.clone();
    let ct = term(&st, "case^t u of [id => g | raise => raise(B)]");
    let hd = term(&st, "u handle [e => h]");
    let mut x = Expansion::new(st2).unwrap();
    let ct_x = x.term(&ct).unwrap();
    let hd_x = x.term(&hd).unwrap();
    let u_x = x.term(&Term::gen("u")).unwrap();
    let e_x = Term::gen("e");
    let g = Term::gen("g");
    let h = Term::gen("h");
    let ms = models(&x, 2);
    let mut checked = 0;
    for m in &ms {
        let mut ev = Evaluator::new(&mut x.expl, m);
        let (_, bx) = ev.store.signature(&ct_x).unwrap();
        for a in ev.carrier(&Ty::named("A")).unwrap() {
            let want_ct = match run_u(&mut ev, &u_x, &e_x, &a) {
                Ok(b) => {
                    let gb = ev.apply(&g, &b).unwrap();
                    format!("B:{}", ev.show(&Ty::named("B"), &gb))
                }
                Err(_) => {
                    let raised = ev.apply(&u_x, &a).unwrap();
                    ev.show_tagged(&bx, &raised)
                }
            };
            let want_hd = match run_u(&mut ev, &u_x, &e_x, &a) {
                Ok(b) => format!("B:{}", ev.show(&Ty::named("B"), &b)),
                Err(p) => {
                    let hp = ev.apply(&h, &p).unwrap();
                    format!("B:{}", ev.show(&Ty::named("B"), &hp))
                }
            };
            let got_ct = ev.apply(&ct_x, &a).unwrap();
            let got_hd = ev.apply(&hd_x, &a).unwrap();
            assert_eq!(ev.show_tagged(&bx, &got_ct), want_ct);
            assert_eq!(ev.show_tagged(&bx, &got_hd), want_hd);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn exceptional_inverse_images() {
    let mut st = store("nat.deco");
    let t = term(&st, "t");
    let ii = st.exceptional_inverse_image(&t).unwrap();
    let inv = st.inverse_image_by_id(ii).clone();
    assert_eq!(st.sum(inv.sum).summands, vec![Ty::named("Unit")]);
    assert_eq!(inv.restrictions, vec![Term::Id(Ty::named("Unit"))]);
    assert!(st.exceptional_inverse_image(&term(&st, "z")).is_err());
}

const TWO_EXC: &str = "logic decorated; type P; type Q; type X; \
                       exception t1 of P; exception t2 of Q; fun v : X -> Q @value;";

#[test]
fn exceptional_inverse_image_through_the_second_exception() {
    let mut st = parse(TWO_EXC);
    let u = term(&st, "t2 . v");
    let ii = st.exceptional_inverse_image(&u).unwrap();
    let inv = st.inverse_image_by_id(ii).clone();
    assert_eq!(st.sum(inv.sum).summands, vec![Ty::Zero, Ty::named("X")]);
    assert_eq!(inv.restrictions[1], Term::gen("v"));

    // the oracle: preimages of the images of t1 and t2 under u
    let t1 = Term::gen("t1");
    let t2 = Term::gen("t2");
    let mut x = Expansion::new(st).unwrap();
    let ux = x.term(&u).unwrap();
    for m in models(&x, 2) {
        assert_eq!(m.exceptions.as_ref().unwrap().len(), m.carrier("P").unwrap().len() + m.carrier("Q").unwrap().len());
        let mut ev = Evaluator::new(&mut x.expl, &m);
        let xs = ev.carrier(&Ty::named("X")).unwrap();
        let img = |ev: &mut Evaluator, t: &Term, ty: &str| -> Vec<Val> {
            ev.carrier(&Ty::named(ty)).unwrap().iter().map(|p| ev.apply(t, p).unwrap()).collect()
        };
        let (i1, i2) = (img(&mut ev, &t1, "P"), img(&mut ev, &t2, "Q"));
        let mut pre1 = Vec::new();
        let mut pre2 = Vec::new();
        for a in &xs {
            let w = match ev.apply(&ux, a).unwrap() {
                Val::Tag(_, w) => *w,
                other => other,
            };
            if i1.contains(&w) {
                pre1.push(a.clone());
            }
            if i2.contains(&w) {
                pre2.push(a.clone());
            }
        }
        assert!(pre1.is_empty());
        assert_eq!(pre2, xs);
    }
}

#[test]
fn exceptional_cases() {
    let mut st = store("nat.deco");
    assert!(proves(&mut st, "case^e t of [t => z] == z"));
    assert!(proves(&mut st, "case^e t of [] to Nat == raise(Nat) . t"));
    let t = term(&st, "t");
    assert_eq!(st.mk_case_e(&t, vec![None], None), Err(ExceptionError::MissingTargetForEmptyI));
    assert!(matches!(
        st.mk_case_e(&term(&st, "z"), vec![None], Some(Ty::named("Nat"))),
        Err(ExceptionError::TargetNotZero(_))
    ));
    assert!(matches!(st.mk_case_e(&t, vec![], None), Err(ExceptionError::BranchCount(..))));
}

#[test]
fn explicit_defaults_re_raise() {
    let mut st = parse(TWO_EXC);
    let u = term(&st, "t2 . v");
    let ii = st.exceptional_inverse_image(&u).unwrap();
    let sum = st.inverse_image_by_id(ii).sum;
    let coprojs = st.sum(sum).coprojections.clone();
    let y = Ty::named("X");
    let branches: Vec<Option<Term>> = coprojs
        .iter()
        .map(|c| Some(Term::comp(vec![Term::Empty(y.clone()), u.clone(), c.clone()])))
        .collect();
    let all = st.mk_case_e(&u, branches.clone(), None).unwrap();
    let none = st.mk_case_e(&u, vec![None, None], Some(y.clone())).unwrap();
    let reraise = Term::comp(vec![Term::Empty(y.clone()), u.clone()]);
    assert!(st.equiv(&all, &reraise).unwrap().is_yes());
    assert!(st.equiv(&none, &reraise).unwrap().is_yes());
    // dropping a branch that equals its default changes nothing
    let one = st.mk_case_e(&u, vec![branches[0].clone(), None], None).unwrap();
    assert_eq!(st.normalize(&one).unwrap(), st.normalize(&all).unwrap());

    let mut x = Expansion::new(st).unwrap();
    let (l, r) = x.equation(&all, &reraise).unwrap();
    for m in models(&x, 2) {
        let mut ev = Evaluator::new(&mut x.expl, &m);
        assert!(check_equation(&mut ev, &l, &r).unwrap().holds());
    }
}

#[test]
fn handling() {
    let mut st = store("nat.deco");
    assert!(proves(&mut st, "p'' == p"));
    assert!(proves(&mut st, "s handle [t => z] == s"));
    assert!(proves(&mut st, "(raise(Nat) . t . id(Unit)) handle [t => z] == z"));
    assert!(proves(&mut st, "(raise(Nat) . t) handle [] == raise(Nat) . t"));
    let bad = st.mk_handle(&term(&st, "p'"), vec![]);
    assert!(matches!(bad, Err(ExceptionError::BranchCount(..))));

    let mut st = parse(&format!("{TWO_EXC} fun w : X -> P @value; fun k : P -> X @value;"));
    // caught by its own branch, or passed through when only the other is handled
    assert!(proves(&mut st, "(raise(X) . t1 . w) handle [t1 => id(X), t2 => raise(X) . t2] == id(X)"));
    assert!(proves(&mut st, "(raise(X) . t2 . v) handle [t1 => k] == raise(X) . t2 . v"));
}

#[test]
fn handling_is_a_congruence() {
    let mut st = store("nat.deco");
    assert!(proves(&mut st, "s . raise(Nat) . t == raise(Nat) . t"));
    assert!(proves(&mut st, "(s . raise(Nat) . t) handle [t => z] == (raise(Nat) . t) handle [t => z]"));
    assert!(proves(&mut st, "(p' . s) handle [t => z] == (id(Nat)) handle [t => z]"));
}

#[test]
fn the_decorated_store_keeps_exceptions_apart() {
    let st: Store = parse(TWO_EXC);
    let esum = st.exceptional_sum_id().unwrap();
    assert_eq!(st.sum(esum).summands, vec![Ty::named("P"), Ty::named("Q")]);
    assert!(!st.is_computation(&Term::gen("v")).unwrap());
    assert!(st.is_computation(&Term::gen("t1")).unwrap());
}

mod common;

use std::process::Command;

use common::corpus_path;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn excalc(args: &[&str]) -> Run {
    let o = Command::new(env!("CARGO_BIN_EXE_excalc"))
        .args(args)
        .current_dir(corpus_path(""))
        .output()
        .unwrap();
    Run {
        code: o.status.code().unwrap(),
        out: String::from_utf8(o.stdout).unwrap(),
        err: String::from_utf8(o.stderr).unwrap(),
    }
}

#[test]
fn check() {
    let r = excalc(&["check", "nat.deco"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, "ok: decorated specification\n");
    let r = excalc(&["check", "empty.deco"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.out.matches("no exceptions").count(), 1, "{}", r.out);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.deco");
    std::fs::write(&bad, "logic decorated;\nfun f : A -> A;\n").unwrap();
    let r = excalc(&["check", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.err.starts_with("error: ") && r.err.contains("bad.deco:2:"), "{}", r.err);
    assert_eq!(excalc(&["prove", "nat.deco", "p' =="]).code, 2);
    assert_eq!(excalc(&["check", "missing.deco"]).code, 2);
    assert_eq!(excalc(&["frobnicate"]).code, 2);
}

#[test]
fn prove() {
    let r = excalc(&["prove", "nat.deco", "p'' == p"]);
    assert_eq!((r.code, r.out.as_str()), (0, "YES\n"));
    let r = excalc(&["prove", "nat.deco", "p' == p"]);
    assert_eq!(r.code, 1);
    assert!(r.out.starts_with("NO-WITHIN-BOUND"));
    let r = excalc(&["prove", "nat.deco", "p'' == p", "--trace"]);
    assert!(r.out.lines().count() > 3, "{}", r.out);
}

#[test]
fn json_output() {
    let r = excalc(&["--format", "json", "prove", "nat.deco", "p'' == p"]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["verdict"], "YES");
    assert_eq!(v["bound_reached"], false);
    assert!(!v["trace"].as_array().unwrap().is_empty());

    let r = excalc(&["--format", "json", "check", "nat.deco"]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["logic"], "decorated");
}

#[test]
fn translate() {
    let r = excalc(&["translate", "nat.deco", "--undecorate"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("logic basic;"));
    assert!(r.out.contains("fun t : Unit -> 0;"));
    let r = excalc(&["translate", "nat.deco", "--expand", "--provenance"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("fun p' : Nat -> Nat+E"));
    assert!(r.out.lines().any(|l| l.starts_with("# ")));
    excalc::dsl::parse(&r.out).unwrap();
    assert_eq!(excalc(&["translate", "nat.basic", "--expand"]).code, 2);
}

#[test]
fn eval() {
    let cases = [("id(Nat)", "3", "Nat:3"), ("p'", "0", "E:ε"), ("p''", "0", "Nat:0"), ("p'", "4", "Nat:3")];
    for (t, x, want) in cases {
        let r = excalc(&["eval", "nat.deco", "mnat.model", t, x]);
        assert_eq!(r.code, 0, "{t} at {x}: {}", r.err);
        assert_eq!(r.out.trim(), want, "{t} at {x}");
    }
    let r = excalc(&["eval", "nat.basic", "nat.model", "p . s", "4"]);
    assert_eq!((r.code, r.out.trim()), (0, "Nat:4"));
    assert_eq!(excalc(&["eval", "nat.deco", "mnat.model", "p", "12"]).code, 2);
}

#[test]
fn audit() {
    let r = excalc(&["audit", "nat.deco", "mnat.model"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.contains("failures: 0"));
    let r = excalc(&["audit", "nat.deco", "mnat.model", "--eq", "p' == p"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("note: not derived, so not audited: p' == p"), "{}", r.out);
    let r = excalc(&["audit", "empty.deco", "--max-carrier", "2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let r = excalc(&["audit", "nat.basic", "--max-carrier", "2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("Unit is empty in every model"), "{}", r.out);
}

#[test]
fn fuzz_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let r = excalc(&["fuzz", "--seed", "7", "--count", "6", "--out", d]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 6);
    let first = std::fs::read_to_string(&files[0]).unwrap();
    assert!(first.starts_with("# seed "));
    let again = tempfile::tempdir().unwrap();
    excalc(&["fuzz", "--seed", "7", "--count", "6", "--out", again.path().to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(again.path().join(files[0].file_name().unwrap())).unwrap(), first);

    let r = excalc(&["audit", d, "--max-carrier", "3"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.ends_with("files: 6\ntotal failures: 0\n"), "{}", r.out);
}

//! End-to-end runs of the `polymeasure` binary and workspace round trips.

use std::path::PathBuf;
use std::process::{Command, Output};

use polymeasure::algebra::algebra_homs;
use polymeasure::builtin::{automaton_f, bin_tree_f, bounded_tree_f, compose, const_monoid, list_f, maybe};
use polymeasure::convolution::convolution_algebra;
use polymeasure::fixpoints::quotient_algebra;
use polymeasure::measuring::{enumerate_measurings, Strategy};
use polymeasure::stock::{list_alg, list_coalg, std_alg, std_coalg, truncation_algebra, truncation_coalgebra};
use polymeasure::tensor::measuring_tensor;
use polymeasure::{Carrier, PolyFunctor, PositionMonoid};
use polymeasure_cli::workspace::{write_algebra, write_coalgebra, write_functor, write_measuring};
use polymeasure_cli::Workspace;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polymeasure"));
    c.env_remove("POLYMEASURE_MAX_ELEMENTS")
        .env_remove("POLYMEASURE_MAX_SUBCOALGEBRA_CARRIER")
        .env_remove("POLYMEASURE_TENSOR_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn workspaces() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("workspaces");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "ws"))
        .collect();
    v.sort();
    v
}

#[test]
fn every_example_workspace_passes() {
    let files = workspaces();
    assert!(files.len() >= 8);
    for f in files {
        let o = run(&["run", "--workspace", f.to_str().unwrap()]);
        let r = report(&o);
        assert_eq!(o.status.code(), Some(0), "{}: {}", f.display(), r["summary"]);
        assert!(r["results"].as_array().unwrap().iter().all(|x| x["report"]["passed"] == Value::Bool(true)));
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let f = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("workspaces/maybe.ws");
    let args = ["run", "--workspace", f.to_str().unwrap()];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let args = ["enumerate-measurings", "--A", "list_alg(Z2, 1)", "--B", "list_alg(Z2, 1)", "--C", "list_coalg(Z2, 1)", "--format", "text"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn unit_coalgebra_measurings_count_total_homs() {
    for (n, m) in [(1, 1), (2, 1), (3, 2), (2, 3), (4, 4), (3, 0)] {
        let (a, b) = (format!("std_alg({n})"), format!("std_alg({m})"));
        let r = report(&run(&["enumerate-measurings", "--C", "unit", "--A", &a, "--B", &b]));
        let homs = algebra_homs(&std_alg(n), &std_alg(m)).unwrap().len();
        assert_eq!(r["count"].as_u64().unwrap() as usize, homs, "n={n} m={m}");
    }
    let r = report(&run(&["enumerate-measurings", "--C", "unit", "--A", "list_alg(Z2, 1)", "--B", "list_alg(Z2, 2)"]));
    let f = list_f(&PositionMonoid::cyclic(2));
    let homs = algebra_homs(&list_alg(&f, 1).unwrap(), &list_alg(&f, 2).unwrap()).unwrap().len();
    assert_eq!(r["count"].as_u64().unwrap() as usize, homs);
}

#[test]
fn universal_classifies_truncated_naturals() {
    let o = run(&["universal", "--A", "std_alg(2)", "--B", "std_alg(4)", "--functor", "maybe"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["descriptor"]["name"], "std_coalg(2)");
    let o = run(&["universal", "--A", "std_alg(4)", "--B", "std_alg(2)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["descriptor"]["name"], "Ninf");
}

#[test]
fn malformed_table_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.ws");
    std::fs::write(&p, "# header\nalgebra B : maybe {\n  carrier [0, 1]\n  (Zero, []) -> 0\n  (Succ, [0]) -> 7\n}\n").unwrap();
    let o = run(&["preinitial", "--workspace", p.to_str().unwrap(), "--A", "B"]);
    assert_eq!(o.status.code(), Some(2));
    let r = report(&o);
    assert_eq!(r["location"]["line"], 5);
    assert!(r["error"].as_str().unwrap().contains("line 5"));

    std::fs::write(&p, "algebra B : maybe {\n  carrier [0, 1]\n  (Zero, []) -> 0\n}\n").unwrap();
    let o = run(&["preinitial", "--workspace", p.to_str().unwrap(), "--A", "B"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(report(&o)["error"].as_str().unwrap().contains("undefined at (Succ, [0])"));

    std::fs::write(&p, "algebra B : maybe {\n  carrier [0, 1\n}\n").unwrap();
    let o = run(&["preinitial", "--workspace", p.to_str().unwrap(), "--A", "B"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(report(&o)["location"], serde_json::json!({"line": 2, "column": 16}));
}

#[test]
fn failed_checks_exit_1_with_witness() {
    let o = run(&["check-hom", "--A", "std_alg(2)", "--B", "std_alg(2)", "--map", "[(0, 0), (1, 2), (2, 2)]"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&o)["witness"], "(Succ, [0])");
    let o = run(&["subterminal", "--C", "unit", "--functor", "id"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("twins.ws");
    std::fs::write(&p, "coalgebra twins : id {\n  carrier [a, b]\n  a -> (*, [b])\n  b -> (*, [a])\n}\ncommands {\n  subterminal --C twins\n}\n").unwrap();
    let o = run(&["run", "--workspace", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&o)["results"][0]["report"]["witness"], serde_json::json!(["a", "b"]));
}

#[test]
fn guards_are_configurable_and_named() {
    let args = ["enumerate-measurings", "--C", "std_coalg(1)", "--A", "std_alg(2)", "--B", "std_alg(2)", "--strategy", "brute"];
    assert_eq!(run(&args).status.code(), Some(0));
    let mut with_flag = args.to_vec();
    with_flag.extend(["--max-elements", "100"]);
    let o = run(&with_flag);
    assert_eq!(o.status.code(), Some(2));
    assert!(report(&o)["error"].as_str().unwrap().contains("bound is 100"));
    let o = bin().args(args).env("POLYMEASURE_MAX_ELEMENTS", "100").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["subcoalgebras", "--C", "std_coalg(3)", "--max-subcoalgebra-carrier", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["tensor", "--A", "std_alg(1)", "--C", "std_coalg(1)", "--budget", "2"]);
    assert_eq!(report(&o)["status"]["budget"], 2);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let o = run(&["preinitial", "--A", "std_alg(3)", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let direct = run(&["preinitial", "--A", "std_alg(3)"]);
    assert_eq!(std::fs::read(&p).unwrap(), direct.stdout);
}

#[test]
fn every_command_has_a_report() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["validate-functor", "--functor", "btree(Z2, 1)"],
        vec!["apply", "--functor", "list(Z2)", "--set", "[x, y]"],
        vec!["cata", "--A", "std_alg(3)", "--term", "(Succ, [(Succ, [(Zero, [])])])"],
        vec!["unfold", "--C", "nat_inf(3)", "--state", "2"],
        vec!["adamek", "--functor", "const(Z3)"],
        vec!["preinitial", "--A", "lasso_alg(3, 1)"],
        vec!["subterminal", "--C", "std_coalg(2)"],
        vec!["subcoalgebras", "--C", "nat_inf(2)"],
        vec!["quotient", "--A", "std_alg(3)", "--pairs", "[(1, 2)]"],
        vec!["check-hom", "--C", "std_coalg(1)", "--D", "std_coalg(2)", "--map", "[(0, 0), (1, 1)]"],
        vec!["enumerate-measurings", "--C", "std_coalg(1)", "--A", "std_alg(1)", "--B", "std_alg(1)", "--strategy", "convolution"],
        vec!["convolution", "--C", "std_coalg(1)", "--B", "std_alg(1)"],
        vec!["tensor", "--C", "unit", "--A", "terminal", "--functor", "const(Z2)"],
        vec!["universal", "--A", "std_alg(1)", "--B", "std_alg(1)", "--verify", "2"],
        vec!["dual", "--A", "std_alg(2)", "--C", "std_coalg(2)", "--pairing"],
        vec!["tower", "--A", "std_alg(3)", "--B", "std_alg(1)", "--n-max", "3"],
        vec!["c-initial", "--A", "std_alg(1)", "--C", "std_coalg(1)"],
        vec!["terminal-c-initial", "--C", "unit", "--functor", "const(Z2)", "--candidates", "[terminal]"],
        vec!["mixed-check", "--outer", "maybe", "--inner", "maybe"],
        vec!["compose", "--outer", "list(Z1)", "--inner", "maybe"],
    ];
    for args in cases {
        let o = run(&args);
        let r = report(&o);
        assert_eq!(r["command"], args[0]);
        assert!(r["summary"].is_string());
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1), "{args:?}: {}", r["summary"]);
    }
}

#[test]
fn computed_objects_round_trip() {
    let z2 = PositionMonoid::cyclic(2);
    let functors = [
        maybe(),
        const_monoid(&z2),
        list_f(&z2),
        bin_tree_f(&PositionMonoid::trivial()),
        bounded_tree_f(&PositionMonoid::trivial(), 2),
        automaton_f(&Carrier::symbols(&["a", "b"]).unwrap()),
        compose(&maybe(), &automaton_f(&Carrier::symbols(&["a"]).unwrap())).unwrap(),
    ];
    for f in &functors {
        let text = write_functor("F", f);
        let ws = Workspace::parse(&text).unwrap();
        assert!(PolyFunctor::same(&ws.functors["F"], f), "{text}");
        assert_eq!(write_functor("F", &ws.functors["F"]), text);
    }

    let m = maybe();
    let conv = convolution_algebra(&std_coalg(1), &std_alg(1)).unwrap().algebra;
    let quot = quotient_algebra(&std_alg(4), &[(2, 3)]).unwrap().algebra;
    let tens = measuring_tensor(&std_coalg(1), &std_alg(1), 6);
    let lf = list_f(&z2);
    let mut algebras = vec![conv, quot, list_alg(&lf, 2).unwrap(), truncation_algebra(&bin_tree_f(&z2), 1).unwrap()];
    if let Some(a) = tens.ok().and_then(|p| p.algebra) {
        algebras.push(a);
    }
    let coalgebras = vec![list_coalg(&lf, 2).unwrap(), truncation_coalgebra(&m, 3).unwrap()];
    for a in &algebras {
        let text = format!("{}{}", write_functor("F", a.functor()), write_algebra("X", "F", a));
        let ws = Workspace::parse(&text).unwrap();
        let back = &ws.algebras["X"];
        assert_eq!(back.carrier(), a.carrier());
        assert_eq!(back.table(), a.table());
        assert!(PolyFunctor::same(back.functor(), a.functor()));
        assert_eq!(write_algebra("X", "F", back), write_algebra("X", "F", a));
    }
    for c in &coalgebras {
        let text = format!("{}{}", write_functor("F", c.functor()), write_coalgebra("Y", "F", c));
        let ws = Workspace::parse(&text).unwrap();
        assert_eq!(&ws.coalgebras["Y"], c);
    }

    let (c, a) = (std_coalg(2), std_alg(2));
    for phi in enumerate_measurings(&c, &a, &a, Strategy::Propagate).unwrap() {
        let text = format!(
            "{}{}{}",
            write_coalgebra("C", "maybe", &c),
            write_algebra("A", "maybe", &a),
            write_measuring("phi", ("C", "A", "A"), &phi)
        );
        let ws = Workspace::parse(&text).unwrap();
        assert_eq!(ws.measurings["phi"].table(), phi.table());
        assert!(ws.measurings["phi"].validated);
    }
}

//! End-to-end runs of the `uryson` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use uryson::lattice::{AtomSet, LatVec, MeasureSpace};
use uryson::narrowness::DecompositionWitness;
use uryson::rational::parse_q;
use uryson::{OrthAdd, Q, UrysonMatrix};

fn uryson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uryson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn put(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn qv(v: &Value) -> Q {
    parse_q(v.as_str().unwrap()).unwrap()
}

fn sign_mixing_op() -> Value {
    json!({
        "kind": "uryson_matrix",
        "space": { "weights": [1, 1] },
        "rows": [[{ "fn": "linear", "c": 1 }, { "fn": "linear", "c": -1 }]]
    })
}

fn positive_op() -> Value {
    json!({
        "kind": "uryson_matrix",
        "space": { "weights": ["1/2", "1/4", "1/4", 1] },
        "output": { "weights": [1, 2] },
        "rows": [
            [{ "fn": "abs_power", "coeff": 2, "p": 1 }, { "fn": "abs_power", "coeff": 1, "p": 2 }, { "fn": "zero" }, { "fn": "abs_power", "coeff": 1, "p": 1 }],
            [{ "fn": "zero" }, { "fn": "abs_power", "coeff": 3, "p": 1 }, { "fn": "threshold", "scale": 1 }, { "fn": "indicator", "value": "1/2" }]
        ]
    })
}

#[test]
fn modulus_example_output() {
    let d = TempDir::new().unwrap();
    let op = put(&d, "op.json", &sign_mixing_op());
    let x = put(&d, "x.json", &json!({ "coeffs": [1, 1] }));
    let o = uryson(&["modulus", "--op", s(&op), "--vec", s(&x)]);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8(o.stdout).unwrap().trim(),
        r#"{"value":["2"],"argmin_partition":[[0],[1]]}"#
    );
}

#[test]
fn identity_l1_example_output() {
    let d = TempDir::new().unwrap();
    let f = put(&d, "f.json", &json!({ "coeffs": ["1/2", -3, 0] }));
    let o = uryson(&["identity-l1", "--f", s(&f), "--g", s(&f)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), r#"{"lhs":"0","rhs":"0","ok":true}"#);
}

#[test]
fn exit_code_taxonomy() {
    let d = TempDir::new().unwrap();
    let op = put(&d, "op.json", &sign_mixing_op());
    let x = put(&d, "x.json", &json!({ "coeffs": [1, 1] }));
    let wide = put(&d, "wide.json", &json!({ "coeffs": [1, 2, 3, 4] }));
    let id = put(&d, "id.json", &json!({ "kind": "identity" }));
    let bad = d.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();

    assert_eq!(uryson(&["--help"]).status.code(), Some(0));
    assert_eq!(uryson(&["modulus", "--op", s(&op), "--vec", s(&x)]).status.code(), Some(0));
    // Usage errors, unreadable and ill-formed input, contract violations.
    assert_eq!(uryson(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(uryson(&["modulus", "--op", s(&op)]).status.code(), Some(2));
    assert_eq!(uryson(&["modulus", "--op", "/nonexistent.json", "--vec", s(&x)]).status.code(), Some(2));
    assert_eq!(uryson(&["modulus", "--op", s(&bad), "--vec", s(&x)]).status.code(), Some(2));
    assert_eq!(uryson(&["modulus", "--op", s(&op), "--vec", s(&wide)]).status.code(), Some(2));
    assert_eq!(uryson(&["lambda", "--op", s(&op), "--vec", s(&x), "--mode", "greedy"]).status.code(), Some(2));
    assert_eq!(uryson(&["modulus", "--cap-fragments", "0", "--op", s(&op), "--vec", s(&x)]).status.code(), Some(2));
    // Cap refusals.
    let o = uryson(&["modulus", "--cap-partitions", "3", "--op", s(&id), "--vec", s(&wide)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let o = uryson(&["narrow-search", "--cap-fragments", "2", "--op", s(&id), "--vec", s(&wide)]);
    assert!(matches!(o.status.code(), Some(0) | Some(3)));
    // Internal errors map to 1; they are not reachable from valid input.
    assert_eq!(uryson::Error::internal("x").exit_code(), 1);
}

#[test]
fn parse_errors_name_the_field() {
    let d = TempDir::new().unwrap();
    let mut op = sign_mixing_op();
    op["rows"][0][1] = json!({ "fn": "linear", "c": "1/0" });
    let op = put(&d, "op.json", &op);
    let x = put(&d, "x.json", &json!({ "coeffs": [1, 1] }));
    let o = uryson(&["modulus", "--op", s(&op), "--vec", s(&x)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("op.json") && err.contains("rows[0][1]") && err.contains("c"), "{err}");

    let unknown = put(&d, "u.json", &json!({ "kind": "uryson_matrix", "rows": [[{ "fn": "cosine" }]] }));
    let o = uryson(&["modulus", "--op", s(&unknown), "--vec", s(&x)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("rows[0][0]"));
}

#[test]
fn out_flag_writes_the_report() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("curve.csv");
    let o = uryson(&["diagnose", "--family", "identity", "--levels", "3", "--format", "csv", "--out", s(&out)]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "level,delta,num,den");
    assert_eq!(lines[1..], ["0,1,1,1", "1,1,1,1", "2,1,1,1", "3,1,1,1"]);
}

#[test]
fn suite_is_byte_identical_across_runs() {
    let a = uryson(&["suite", "--seed", "7"]);
    let b = uryson(&["suite", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["passed"], json!(true));
}

#[test]
fn narrow_search_witness_round_trips() {
    let d = TempDir::new().unwrap();
    let op = put(&d, "op.json", &positive_op());
    let x = put(&d, "x.json", &json!({ "coeffs": [1, 2, "1/2", 3] }));
    let w = stdout_json(&uryson(&["narrow-search", "--op", s(&op), "--vec", s(&x)]));

    let space = MeasureSpace::new(vec![parse_q("1/2").unwrap(), parse_q("1/4").unwrap(), parse_q("1/4").unwrap(), Q::from_integer(1.into())]).unwrap();
    let base = LatVec::new(space.clone(), w["base"].as_array().unwrap().iter().map(qv).collect()).unwrap();
    let mask = |k: &str| -> AtomSet { w[k].as_array().unwrap().iter().map(|a| a.as_u64().unwrap() as usize).collect() };
    let spec: uryson::io::Tagged<uryson::io::OpSpec> = serde_json::from_value(positive_op()).unwrap();
    let t = spec.0.build(None).unwrap();
    let again = DecompositionWitness::from_masks(&t, &base, mask("e1"), mask("e2")).unwrap();
    assert_eq!(again.discrepancy, qv(&w["discrepancy"]));
}

#[test]
fn extracted_minorant_round_trips() {
    let d = TempDir::new().unwrap();
    let op = put(&d, "op.json", &positive_op());
    let x = put(&d, "x.json", &json!({ "coeffs": [1, 2, "1/2", 3] }));
    let w = stdout_json(&uryson(&["extract-dp", "--op", s(&op), "--vec", s(&x)]));
    let witness = &w["witness"];
    assert_eq!(witness["report"]["dp"], json!(true));

    // The emitted S is a valid operator spec that passes the DP check again.
    let s_path = put(&d, "s.json", &witness["s"]);
    let check = stdout_json(&uryson(&["check-oa", "--op", s(&s_path)]));
    assert_eq!(check["orthogonally_additive"], json!(true));
    assert_eq!(check["dp"]["dp"], json!(true), "{check}");

    // S(e) = f, and S ≤ T entrywise on the grid.
    let spec: uryson::io::Tagged<uryson::io::OpSpec> = serde_json::from_value(witness["s"].clone()).unwrap();
    let sm: UrysonMatrix = spec.0.build(None).unwrap().as_matrix().unwrap();
    let tspec: uryson::io::Tagged<uryson::io::OpSpec> = serde_json::from_value(positive_op()).unwrap();
    let tm = tspec.0.build(None).unwrap().as_matrix().unwrap();
    let e = LatVec::new(sm.input().clone(), witness["e"].as_array().unwrap().iter().map(qv).collect()).unwrap();
    let f: Vec<Q> = witness["f"].as_array().unwrap().iter().map(qv).collect();
    assert_eq!(sm.apply(&e).unwrap().coeffs(), &f[..]);
    assert!(sm.le_on_grid(&tm, &uryson::rational::default_grid()).unwrap());
    assert!(f.iter().any(|c| *c > Q::from_integer(0.into())));
}

#[test]
fn monteiro_example() {
    let d = TempDir::new().unwrap();
    let spec = put(&d, "m.json", &json!({ "domain_atoms": 2, "codomain_atoms": 1, "phi": [0, 1, 1, 1], "psi0": [1] }));
    let w = stdout_json(&uryson(&["monteiro", "--input", s(&spec)]));
    assert_eq!(w["atom_images"], json!([1, 0]));
    assert_eq!(w["table"], json!([0, 1, 0, 1]));

    // The extension is itself join preserving, so it extends again to itself.
    let again = put(&d, "m2.json", &json!({ "domain_atoms": 2, "codomain_atoms": 1, "phi": w["table"], "psi0": [1] }));
    assert_eq!(stdout_json(&uryson(&["monteiro", "--input", s(&again)]))["table"], w["table"]);
}

#[test]
fn rounding_and_permutation_examples() {
    let d = TempDir::new().unwrap();
    let r = put(&d, "r.json", &json!({ "vectors": [[1], [1], [1]], "lambdas": ["1/2", "1/2", "1/2"] }));
    let w = stdout_json(&uryson(&["rounding", "--input", s(&r)]));
    assert_eq!(w["achieved"], json!("1/2"));
    assert_eq!(w["bound"], json!("1/2"));

    let p = put(&d, "p.json", &json!({ "vectors": [[1, 0], [0, 1], [1, 0], [0, 1]] }));
    let w = stdout_json(&uryson(&["permutation", "--input", s(&p), "--mode", "brute"]));
    assert_eq!(w["certified"], json!(true));
    assert_eq!(w["witness"]["achieved"], json!("0"));
    assert_eq!(w["witness"]["alpha"], json!("2"));
    assert_eq!(w["witness"]["k"], json!("4"));
    assert_eq!(w["witness"]["bound_sq"], json!("16"));
}

#[test]
fn lambda_and_pipeline_reports() {
    let d = TempDir::new().unwrap();
    let op = put(&d, "op.json", &positive_op());
    let x = put(&d, "x.json", &json!({ "coeffs": [1, 2, "1/2", 3] }));
    let brute = stdout_json(&uryson(&["lambda", "--op", s(&op), "--vec", s(&x), "--mode", "brute"]));
    let bb = stdout_json(&uryson(&["lambda", "--op", s(&op), "--vec", s(&x), "--mode", "bb"]));
    assert_eq!(brute["value"], bb["value"]);
    assert_eq!(brute["value"], brute["shortcut"]);

    let p = stdout_json(&uryson(&["pipeline", "--op", s(&op), "--vec", s(&x), "--target", "100"]));
    let disc = qv(&p["witness"]["discrepancy"]);
    assert!(&disc * &disc <= qv(&p["bound_sq"]));
    assert_eq!(p["meets_target"], json!(true));
}

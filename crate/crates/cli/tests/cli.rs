use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cspdich::algebra::library::nand;
use cspdich::algebra::num::{int, parse_rational, to_f64};
use cspdich::algebra::Signature;
use cspdich::reduce::transform_signature;
use cspdich_cli::file::{InstanceFile, SignatureSpec};
use tempfile::TempDir;

fn cspdich(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cspdich"))
        .args(args)
        .env_remove("CSPDICH_ARITY_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const NAND_TRIANGLE: &str = r#"{
  "variables": { "a": {}, "b": {}, "c": {} },
  "atoms": [
    { "sig": "NAND", "scope": ["a", "b"] },
    { "sig": "NAND", "scope": ["b", "c"] },
    { "sig": "NAND", "scope": ["c", "a"] }
  ]
}"#;

/// NAND atoms from a centre to `leaves` leaves.
fn nand_star(leaves: usize) -> String {
    let mut vars = vec![r#""c": { "w1": "2" }"#.to_string()];
    let mut atoms = Vec::new();
    for i in 0..leaves {
        vars.push(format!(r#""l{i}": {{ "w0": "1", "w1": "1/2" }}"#));
        atoms.push(format!(r#"{{ "sig": "N", "scope": ["c", "l{i}"] }}"#));
    }
    format!(
        r#"{{ "signatures": {{ "N": {{ "builtin": "NAND" }} }},
             "variables": {{ {} }}, "atoms": [ {} ] }}"#,
        vars.join(", "),
        atoms.join(", ")
    )
}

#[test]
fn classify_pm3_is_pm_hard() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "pm3.json", r#"{ "signatures": { "P": { "builtin": "PM_3" } } }"#);
    let out = cspdich(&["classify", s(&path), "--relations", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["verdict"], "PM_HARD");
    assert_eq!(report["signatures"][0]["memberships"]["delta matroid"]["member"], true);
}

#[test]
fn classify_nand_is_fpras() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "tri.json", NAND_TRIANGLE);
    let out = cspdich(&["classify", s(&path)]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("verdict: FPRAS"), "{}", stdout(&out));
}

#[test]
fn classify_weighted_reports_finite_weight_conditions() {
    let dir = TempDir::new().unwrap();
    let text = r#"{ "signatures": { "F": { "arity": 2, "table": { "00": "1", "01": "2", "10": "3", "11": "1" } } } }"#;
    let path = write(&dir, "f.json", text);
    let out = cspdich(&["classify", s(&path), "--signatures", "--json"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["finite_weights"].is_object());
    let out = cspdich(&["classify", s(&path), "--relations"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_bitstring_key_exits_2_with_path() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "bad.json",
        r#"{ "signatures": { "F": { "arity": 2, "table": { "0x": "1" } } } }"#,
    );
    let out = cspdich(&["classify", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("signatures.F.table.0x"), "{}", stderr(&out));
}

#[test]
fn unknown_field_exits_2_with_line() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bad.json", "{\n  \"variables\": { \"x\": {} },\n  \"atom\": []\n}");
    let out = cspdich(&["eval", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown field `atom`"), "{}", stderr(&out));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn nand_triangle_brute_force_is_4() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "tri.json", NAND_TRIANGLE);
    let out = cspdich(&["eval", s(&path), "--exact", "--brute"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "4\n");
    let out = cspdich(&["eval", s(&path), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], "4");
}

#[test]
fn bb2_on_degree_3_is_an_applicability_error() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "star.json", &nand_star(3));
    let out = cspdich(&["eval", s(&path), "--bb2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degree"), "{}", stderr(&out));
    assert!(cspdich(&["eval", s(&path), "--auto"]).status.success());
}

fn in_regime_ring(n: usize) -> String {
    let vars: Vec<String> = (0..n).map(|i| format!(r#""x{i}": {{ "w0": "1", "w1": "{}/3" }}"#, i + 1)).collect();
    let atoms: Vec<String> = (0..n)
        .map(|i| format!(r#"{{ "sig": "F", "scope": ["x{i}", "x{}"] }}"#, (i + 1) % n))
        .collect();
    format!(
        r#"{{ "signatures": {{ "F": {{ "arity": 2, "table": {{ "00": "1", "10": "11/10", "01": "21/20", "11": "6/5" }} }} }},
             "variables": {{ {} }}, "atoms": [ {} ] }}"#,
        vars.join(", "),
        atoms.join(", ")
    )
}

#[test]
fn approx_within_epsilon_and_stable() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "ring.json", &in_regime_ring(6));
    let exact = cspdich(&["eval", s(&path), "--brute"]);
    let z = to_f64(&parse_rational(stdout(&exact).trim()).unwrap());
    let args = ["eval", s(&path), "--approx", "--eps", "0.1", "--seed", "7", "--json"];
    let first = cspdich(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    let v: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    let est = v["value"].as_f64().unwrap();
    assert!((est / z).ln().abs() <= 0.1, "{est} vs {z}");
    assert_eq!(v["seed"], 7);
    assert!(v["t"].as_u64().unwrap() >= 1);
    assert_eq!(cspdich(&args).stdout, first.stdout);
}

#[test]
fn approx_out_of_regime_and_missing_seed() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "tri.json", NAND_TRIANGLE);
    let out = cspdich(&["eval", s(&path), "--approx", "--eps", "0.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NAND"), "{}", stderr(&out));
    let ring = write(&dir, "ring.json", &in_regime_ring(4));
    let out = cspdich(&["eval", s(&ring), "--approx", "--eps", "0.3"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("seed 0"), "{}", stderr(&out));
}

#[test]
fn two_sim_eq_lowers_degree() {
    let dir = TempDir::new().unwrap();
    let mut text = nand_star(5);
    text = text.replacen(
        r#""signatures": {"#,
        r#""signatures": { "R": { "arity": 3, "table": { "001": "1", "110": "1" } },"#,
        1,
    );
    let path = write(&dir, "star.json", &text);
    let out_path = dir.path().join("out.json");
    let out = cspdich(&["reduce", s(&path), "two-sim-eq", "--relation", "R", "-o", s(&out_path), "--verify"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("verified"));
    let reduced = InstanceFile::read(&out_path).unwrap().to_instance().unwrap();
    assert!(reduced.max_degree() <= 2);
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.cert.json")).unwrap()).unwrap();
    assert_eq!(cert["relation"]["kind"], "equal");
    assert_eq!(cert["verification"]["holds"], true);
    assert_eq!(cert["verification"]["z_in"], cert["verification"]["z_out"]);
}

#[test]
fn holant_on_transformed_formula() {
    let dir = TempDir::new().unwrap();
    let t = Signature::numbered(vec![int(1), int(2), int(1), int(3)]).unwrap();
    let h = transform_signature(&t, &nand(), 1).unwrap();
    let file = format!(
        r#"{{ "signatures": {{ "T": {}, "H": {} }},
             "variables": {{ "x": {{}}, "y": {{ "w1": "2" }}, "z": {{}} }},
             "atoms": [ {{ "sig": "H", "scope": ["x", "y"] }}, {{ "sig": "H", "scope": ["y", "z"] }} ] }}"#,
        serde_json::to_string(&SignatureSpec::table_of(&t)).unwrap(),
        serde_json::to_string(&SignatureSpec::table_of(&h)).unwrap()
    );
    let path = write(&dir, "h.json", &file);
    let out_path = dir.path().join("holant.json");
    let out = cspdich(&[
        "reduce", s(&path), "holant", "--t", "T", "--bases", "H=NAND", "-o", s(&out_path), "--verify",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let reduced = InstanceFile::read(&out_path).unwrap().to_instance().unwrap();
    assert!(reduced.degrees().iter().all(|&d| d == 2));
}

#[test]
fn monomer_dimer_export_verifies() {
    let dir = TempDir::new().unwrap();
    let text = r#"{
      "signatures": { "A": { "builtin": "AMO_3" } },
      "variables": { "e01": {}, "e12": {}, "e20": { "w1": "3/2" },
                     "p0": { "w1": "0" }, "p1": { "w1": "0" }, "p2": { "w1": "0" } },
      "atoms": [ { "sig": "A", "scope": ["e01", "e20", "p0"] },
                 { "sig": "A", "scope": ["e01", "e12", "p1"] },
                 { "sig": "A", "scope": ["e12", "e20", "p2"] },
                 { "sig": "A", "scope": ["p0", "p1", "p2"] } ]
    }"#;
    let path = write(&dir, "md.json", text);
    let graph = dir.path().join("graph.json");
    let out = cspdich(&["reduce", s(&path), "monomer-dimer", "-o", s(&graph), "--verify"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let g: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&graph).unwrap()).unwrap();
    assert_eq!(g["vertices"], 4);
    // The pad variables have weight (1, 0) and contribute no edges.
    assert_eq!(g["edges"].as_array().unwrap().len(), 3);
}

#[test]
fn weights_round_trip_through_registry() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "star.json", &nand_star(3));
    let fwd = dir.path().join("fwd.json");
    let out = cspdich(&["reduce", s(&path), "weights-to-signatures", "-o", s(&fwd), "--verify"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let back = dir.path().join("back.json");
    let registry = dir.path().join("fwd.cert.json");
    let out = cspdich(&[
        "reduce", s(&fwd), "signatures-to-weights", "--registry", s(&registry), "-o", s(&back), "--verify",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let z = |p: &Path| stdout(&cspdich(&["eval", s(p), "--brute"]));
    assert_eq!(z(&path), z(&back));
}

#[test]
fn flip_and_hmax_transforms() {
    let dir = TempDir::new().unwrap();
    let text = r#"{
      "signatures": { "H": { "arity": 2, "table": { "00": "2", "01": "1", "11": "3" } } },
      "variables": { "x": { "w1": "1/2" }, "y": {}, "z": { "w0": "3" } },
      "atoms": [ { "sig": "H", "scope": ["x", "y"] }, { "sig": "H", "scope": ["z", "y"] } ]
    }"#;
    let path = write(&dir, "h.json", text);
    let out_path = dir.path().join("flip.json");
    let out = cspdich(&["reduce", s(&path), "flip-gadget", "--sig", "H", "--flip", "10", "-o", s(&out_path), "--verify"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let text = r#"{
      "signatures": { "G": { "arity": 2, "table": { "00": "1", "10": "2", "01": "1/2", "11": "1" } },
                      "GH": { "arity": 2, "table": { "10": "2" } } },
      "variables": { "x": {}, "y": { "w1": "3" } },
      "atoms": [ { "sig": "GH", "scope": ["x", "y"] } ]
    }"#;
    let path = write(&dir, "g.json", text);
    let out_path = dir.path().join("hmax.json");
    let out = cspdich(&[
        "reduce", s(&path), "hmax", "--sig", "GH", "--base", "G", "--h", "1,-1", "-o", s(&out_path), "--verify",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("hmax.cert.json")).unwrap()).unwrap();
    assert_eq!(cert["relation"]["kind"], "approximate-with-threshold");
}

#[test]
fn reduce_precondition_failure_exits_2() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "tri.json", NAND_TRIANGLE);
    let out_path = dir.path().join("o.json");
    let out = cspdich(&["reduce", s(&path), "two-sim-eq", "--relation", "NAND", "-o", s(&out_path)]);
    assert_eq!(out.status.code(), Some(2));
    let out = cspdich(&["reduce", s(&path), "no-such-transform", "-o", s(&out_path)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_dmterr_passes() {
    let out = cspdich(&["check", "--suite", "dmterr", "--arity-max", "3", "--seed", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("PASS dmterr"), "{}", stdout(&out));
}

#[test]
fn check_reduction_certificates_passes() {
    let out = cspdich(&["check", "--suite", "reduction-certificates", "--trials", "100", "--seed", "1"]);
    assert!(out.status.success(), "{}{}", stdout(&out), stderr(&out));
}

#[test]
fn check_unknown_suite_is_usage_error() {
    let out = cspdich(&["check", "--suite", "unknown", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown suite"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cspdich(&["eval"]).status.code(), Some(2));
    assert_eq!(cspdich(&["eval", "x.json", "--approx"]).status.code(), Some(2));
    assert_eq!(cspdich(&["eval", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn arity_cap_from_environment() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "pm3.json", r#"{ "signatures": { "P": { "builtin": "PM_3" } } }"#);
    let out = Command::new(env!("CARGO_BIN_EXE_cspdich"))
        .args(["classify", s(&path)])
        .env("CSPDICH_ARITY_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
}

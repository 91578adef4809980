use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn courant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_courant")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gallery(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let p = dir.path().join(name);
    let mut all = vec!["gallery"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", s(&p)]);
    assert_eq!(code(&courant(&all)), 0);
    p
}

fn check<'a>(d: &'a Value, name: &str) -> &'a Value {
    d["report"]["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn constant(n: usize, c: &str) -> Value {
    json!([{"e": vec![0; n], "c": c}])
}

fn var(n: usize, i: usize) -> Value {
    let mut e = vec![0; n];
    e[i] = 1;
    json!([{"e": e, "c": "1"}])
}

fn form(terms: &[(&[usize], Value)]) -> Value {
    Value::Array(terms.iter().map(|(idx, coeff)| json!({"idx": idx, "coeff": coeff})).collect())
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.json", &form(&[(&[1, 2, 3], constant(4, "1"))]));
    let bn = gallery(&dir, "bn.json", &["bn", "--n", "4", "--h", s(&h)]);
    let o = courant(&["validate", s(&bn), "--trials", "20"]);
    assert_eq!(code(&o), 0);
    assert_eq!(doc(&o)["passed"], json!(true));

    let het = gallery(&dir, "het.json", &["heterotic"]);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&het).unwrap()).unwrap();
    v["H"] = json!([]);
    let zeroed = write(&dir, "het0.json", &v);
    let o = courant(&["validate", s(&zeroed), "--trials", "20"]);
    assert_eq!(code(&o), 1);
    let d = doc(&o);
    assert!(check(&d, "validate/pontryagin")["witness"]["defect"].is_array());
    assert_eq!(check(&d, "axioms/loday")["passed"], json!(false));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&courant(&["validate", s(&bad)])), 2);
    assert_eq!(code(&courant(&["validate", s(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&courant(&["validate", s(&bn), "--trials", "0"])), 2);
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let het = gallery(&dir, "het.json", &["heterotic"]);
    let run = || courant(&["validate", s(&het), "--trials", "15", "--seed", "9", "--max-degree", "2"]).stdout;
    assert_eq!(run(), run());
}

#[test]
fn transform_b_shift_on_dn() {
    let dir = TempDir::new().unwrap();
    let dn = gallery(&dir, "dn.json", &["dn", "--n", "3"]);
    // B = x1 dx2∧dx3, so H becomes −dx1∧dx2∧dx3
    let delta = write(&dir, "delta.json", &json!({"B": form(&[(&[2, 3], var(3, 0))])}));
    let next = dir.path().join("next.json");
    let o = courant(&["transform", s(&dn), s(&delta), "--trials", "20", "--instance-out", s(&next)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let h = &doc(&o)["result"]["H"];
    assert_eq!(h, &form(&[(&[1, 2, 3], constant(3, "-1/1"))]));
    assert_eq!(code(&courant(&["validate", s(&next), "--trials", "10"])), 0);
}

#[test]
fn transform_on_bn_with_and_without_strict_mode() {
    let dir = TempDir::new().unwrap();
    let bn = gallery(&dir, "bn.json", &["bn", "--n", "3"]);
    // τ = −1, A = d(x1 x2) e, B = x1 dx1∧dx2
    let closed = json!({
        "tau": {"T": [["-1"]]},
        "A": {"components": [form(&[(&[1], var(3, 1)), (&[2], var(3, 0))])]},
        "B": form(&[(&[1, 2], var(3, 0))]),
    });
    let delta = write(&dir, "closed.json", &closed);
    let o = courant(&["transform", s(&bn), s(&delta), "--trials", "20", "--strict-aut"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let open = json!({"A": {"components": [form(&[(&[2], var(3, 0))])]}});
    let delta = write(&dir, "open.json", &open);
    assert_eq!(code(&courant(&["transform", s(&bn), s(&delta), "--trials", "20"])), 0);
    let o = courant(&["transform", s(&bn), s(&delta), "--trials", "20", "--strict-aut"]);
    assert_eq!(code(&o), 1);
    assert_eq!(check(&doc(&o), "aut/curvature_condition")["passed"], json!(false));
}

#[test]
fn group_compose_with_inverse_is_identity() {
    let dir = TempDir::new().unwrap();
    let dn = gallery(&dir, "dn.json", &["dn", "--n", "3"]);
    let phi = json!({"L": [["2", "0", "0"], ["1", "1", "0"], ["0", "0", "1"]], "c": ["1", "0", "-1"]});
    let f = write(&dir, "f.json", &json!({"phi": phi, "A": {"components": []}, "B": form(&[(&[1, 3], var(3, 1))])}));
    let inv = dir.path().join("inv.json");
    let o = courant(&["group", "invert", s(&dn), s(&f)]);
    assert_eq!(code(&o), 0);
    fs::write(&inv, serde_json::to_string(&doc(&o)["result"]).unwrap()).unwrap();

    let id = write(&dir, "id.json", &json!({"A": {"components": []}, "B": []}));
    let o = courant(&["group", "compose", s(&dn), s(&f), s(&inv), "--expect", s(&id)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(check(&doc(&o), "matches_expected")["passed"], json!(true));

    let o = courant(&["group", "compose", s(&dn), s(&f), s(&f), "--expect", s(&id)]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&courant(&["group", "check", s(&dn), s(&f), "--trials", "5"])), 1);
    assert_eq!(code(&courant(&["group", "check", s(&dn), s(&id), "--trials", "5"])), 0);
}

#[test]
fn inf_bracket_and_linearize() {
    let dir = TempDir::new().unwrap();
    let bn = gallery(&dir, "bn.json", &["bn", "--n", "2"]);
    let a = |i: usize| json!({"components": [form(&[(&[i], constant(2, "1"))])]});
    let d1 = write(&dir, "d1.json", &json!({"a": a(1), "b": []}));
    let d2 = write(&dir, "d2.json", &json!({"a": a(2), "b": []}));
    // ⟨dx1 e ∧ dx2 e⟩ = dx1∧dx2
    let want = write(&dir, "want.json", &json!({"a": {"components": [[]]}, "b": form(&[(&[1, 2], constant(2, "1"))])}));
    let o = courant(&["inf", "bracket", s(&bn), s(&d1), s(&d2), "--expect", s(&want)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&courant(&["inf", "check", s(&bn), s(&d1), "--trials", "5"])), 0);

    let path = write(&dir, "path.json", &json!({"A": a(1), "B": form(&[(&[1, 2], var(2, 0))])}));
    let gen = write(&dir, "gen.json", &json!({"a": a(1), "b": form(&[(&[1, 2], var(2, 0))])}));
    let o = courant(&["inf", "linearize", s(&bn), s(&path), "--expect", s(&gen)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(check(&doc(&o), "matches_expected")["passed"], json!(true));
}

#[test]
fn gallery_families() {
    let dir = TempDir::new().unwrap();
    for fam in ["dn", "bn", "heterotic", "so3"] {
        let p = gallery(&dir, &format!("{fam}.json"), &[fam]);
        assert_eq!(code(&courant(&["validate", s(&p), "--trials", "5"])), 0, "{fam}");
    }
    let o = courant(&["gallery", "manin"]);
    assert_eq!(code(&o), 0);
    assert_eq!(doc(&o)["dim"], json!(4));

    let open = write(&dir, "open.json", &form(&[(&[1, 2, 3], var(4, 3))]));
    let o = courant(&["gallery", "dn", "--n", "4", "--h", s(&open)]);
    assert_eq!(code(&o), 1);
    assert_eq!(check(&doc(&o), "closed_h")["passed"], json!(false));

    let z = vec![vec![vec!["0"; 3]; 3]; 3];
    let mut c = z.clone();
    c[0][1][1] = "1";
    c[1][0][1] = "-1";
    let mut f = z;
    f[1][2][2] = "1";
    f[2][1][2] = "-1";
    let bi = write(&dir, "bi.json", &json!({"c": c, "f": f}));
    let o = courant(&["gallery", "manin", "--bialgebra", s(&bi)]);
    assert_eq!(code(&o), 1);
    assert_eq!(check(&doc(&o), "jacobi")["witness"]["triple"], json!([1, 3, 5]));
}

use std::fs;
use std::path::{Path, PathBuf};

use sc_jordan::cli::{self, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use sc_jordan::io;
use sc_jordan::linalg::{self, C64, CMat};
use sc_jordan::random::{self, stream};
use sc_jordan::Conjugation;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sc-jordan").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    io::write_json(&path, value).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn takagi_reports_small_residuals() {
    let dir = TempDir::new().unwrap();
    let mut rng = stream(1, "cli-test", 5, 0);
    let g = random::ginibre(5, &mut rng);
    let a = (&g + g.transpose()).scale(0.5);
    let path = write(&dir, "a.json", &io::matrix_value(&a, "matrix"));
    let (code, out, _) = run(&["takagi", "--in", s(&path)]);
    assert_eq!(code, EXIT_PASS);
    let report = json(&out);
    assert_eq!(report["pass"], true);
    assert!(report["relative_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["sigma"].as_array().unwrap().len(), 5);
}

#[test]
fn bad_inputs_exit_with_usage_code() {
    let dir = TempDir::new().unwrap();
    let nonsym = CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let path = write(&dir, "n.json", &io::matrix_value(&nonsym, "matrix"));
    assert_eq!(run(&["takagi", "--in", s(&path)]).0, EXIT_USAGE);

    let broken = dir.path().join("broken.json");
    fs::write(&broken, r#"{"kind": "matrix", "n": 2, "data": [[1, 0]]}"#).unwrap();
    let (code, _, err) = run(&["takagi", "--in", s(&broken)]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("data"));

    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["wvn", "--p", "0.5"]).0, EXIT_USAGE);
    assert_eq!(run(&["wvn", "--tol", "-1"]).0, EXIT_USAGE);
}

#[test]
fn wvn_certificate_passes_every_invariant() {
    let (code, out, _) = run(&["wvn", "--dim", "12", "--intervals", "8", "--p", "2", "--seed", "3"]);
    assert_eq!(code, EXIT_PASS);
    let cert = json(&out);
    for (name, ok) in cert["checks"].as_object().unwrap() {
        assert_eq!(ok, &Value::Bool(true), "{name}");
    }
    assert!(cert["measured_norm"].as_f64().unwrap() <= cert["bound"].as_f64().unwrap());
    let (_, again, _) = run(&["wvn", "--dim", "12", "--intervals", "8", "--p", "2", "--seed", "3"]);
    assert_eq!(out, again);
}

#[test]
fn lspec_accepts_element_documents() {
    let dir = TempDir::new().unwrap();
    let mut rng = stream(2, "cli-test", 4, 0);
    let c = random::random_conjugation(4, &mut rng);
    let t = random::random_sc(&c, &mut rng);
    let path = write(&dir, "t.json", &io::sc_element_value(&t));
    let (code, out, _) = run(&["lspec", "--in", s(&path)]);
    assert_eq!(code, EXIT_PASS);
    let report = json(&out);
    assert_eq!(report["l_eigenvalues"].as_array().unwrap().len(), 10);
    assert_eq!(report["pair_means"].as_array().unwrap().len(), 10);
}

#[test]
fn sylvester_writes_solution_and_flags_singular_multiplier() {
    let dir = TempDir::new().unwrap();
    let c = Conjugation::standard(2).unwrap();
    let d = CMat::from_diagonal(&linalg::CVec::from_column_slice(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
    let y = CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(2.0, 0.0)]);
    let tp = write(&dir, "t.json", &io::matrix_value(&d, "matrix"));
    let yp = write(&dir, "y.json", &io::matrix_value(&y, "matrix"));
    let xp = dir.path().join("x.json");
    let (code, _, err) = run(&["sylvester", "--t", s(&tp), "--y", s(&yp), "--out", s(&xp)]);
    assert_eq!(code, EXIT_FAIL);
    assert!(err.contains("sigma(T)+sigma(T)"));
    assert!(!xp.exists());

    let t = d + linalg::identity(2).scale(2.0);
    let tp = write(&dir, "t2.json", &io::sc_element_value(&sc_jordan::ScElement::new(t.clone(), &c).unwrap()));
    let (code, out, _) = run(&["sylvester", "--t", s(&tp), "--y", s(&yp), "--out", s(&xp)]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(json(&out)["projected_to_sc"], true);
    let x = io::load_matrix(&xp).unwrap();
    let lhs = &t * &x + &x * &t;
    assert!((lhs - y).norm() < 1e-12);
}

#[test]
fn autocheck_separates_real_orthogonal_from_generic_unitaries() {
    let dir = TempDir::new().unwrap();
    let mut rng = stream(4, "cli-test", 4, 0);
    let o = random::real_orthogonal(4, &mut rng);
    let w = random::haar_unitary(4, &mut rng);
    let cp = write(&dir, "c.json", &io::conjugation_value(&Conjugation::standard(4).unwrap()));
    let op = write(&dir, "o.json", &io::matrix_value(&o, "matrix"));
    let wp = write(&dir, "w.json", &io::matrix_value(&w, "matrix"));
    let (code, out, _) = run(&["autocheck", "--v", s(&op), "--c", s(&cp)]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(json(&out)["preserves_sc"], true);
    let (code, out, _) = run(&["autocheck", "--v", s(&wp)]);
    assert_eq!(code, EXIT_FAIL);
    let report = json(&out);
    assert_eq!(report["preserves_sc"], false);
    assert!(report["counterexample"].is_object());
}

#[test]
fn irreducible_exit_status() {
    let dir = TempDir::new().unwrap();
    let mut rng = stream(5, "cli-test", 3, 0);
    let g = write(&dir, "g.json", &io::matrix_value(&random::ginibre(3, &mut rng), "matrix"));
    let i = write(&dir, "i.json", &io::matrix_value(&linalg::identity(3), "matrix"));
    assert_eq!(run(&["irreducible", "--in", s(&g)]).0, EXIT_PASS);
    let (code, out, _) = run(&["irreducible", "--in", s(&i)]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(json(&out)["commutant_dimension"], 9);
}

#[test]
fn path_emits_requested_samples() {
    let dir = TempDir::new().unwrap();
    let mut rng = stream(6, "cli-test", 4, 0);
    let c = random::random_conjugation(4, &mut rng);
    let t = random::random_sc(&c, &mut rng);
    let tp = write(&dir, "t.json", &io::sc_element_value(&t));
    let report_path = dir.path().join("path.json");
    let (code, out, _) = run(&["path", "--in", s(&tp), "--samples", "50", "--out", s(&report_path)]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.is_empty());
    let report = json(&fs::read_to_string(&report_path).unwrap());
    let samples = report["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 50);
    assert!(samples.iter().all(|p| p["sigma_min"].as_f64().unwrap() > 0.0));
}

#[test]
fn suite_reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &Path| vec!["suite".to_string(), "--dims".into(), "4".into(), "--trials".into(), "10".into(), "--seed".into(), "7".into(), "--out".into(), s(p).into()];
    let run_owned = |v: Vec<String>| run(&v.iter().map(String::as_str).collect::<Vec<_>>()).0;
    assert_eq!(run_owned(args(&a)), EXIT_PASS);
    assert_eq!(run_owned(args(&b)), EXIT_PASS);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let report = json(&fs::read_to_string(&a).unwrap());
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["config"]["seed"], 7);
}

#[test]
fn suite_config_errors_exit_with_usage_code() {
    let (code, _, err) = run(&["suite", "--dims", "1", "--checks", "lspec"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("needs n >= 2"));
    let (code, out, _) = run(&["suite", "--checks", ""]);
    assert_eq!(code, EXIT_PASS);
    assert!(json(&out)["records"].as_array().unwrap().is_empty());
}

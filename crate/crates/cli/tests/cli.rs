use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lilypond"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn radii(v: &Value) -> Vec<String> {
    v["radii"].as_array().unwrap().iter().map(|r| r.to_string()).collect()
}

#[test]
fn generate_writes_sampled_realization_and_manifest() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "generate", "--lambda", "1", "--window", "30x30", "--seed", "7", "--out", "r.json",
        ],
    );
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["seed"], 7);
    let n = r["points"].as_array().unwrap().len();
    assert!((750..1050).contains(&n), "{n} points");
    let m = json(&dir.path().join("r.json.manifest.json"));
    assert_eq!(m["invocation"]["command"], "generate");
    assert_eq!(m["seeds"][0], 7);
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn generate_pinned_origin_and_stdout() {
    let dir = TempDir::new().unwrap();
    let text = ok(
        dir.path(),
        &["generate", "--disk", "10", "--n-closest", "41", "--seed", "7"],
    );
    let r: Value = serde_json::from_str(&text).unwrap();
    let pts = r["points"].as_array().unwrap();
    assert_eq!(pts.len(), 42);
    assert_eq!((pts[0]["x"].as_f64(), pts[0]["y"].as_f64()), (Some(0.0), Some(0.0)));
    assert_eq!(r["window"]["kind"], "disk");
    assert!(!dir.path().join("-.manifest.json").exists());
}

#[test]
fn invalid_flags_exit_with_two() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["generate", "--window", "3x"],
        vec!["generate", "--lambda", "-1", "--window", "3x3"],
        vec!["generate"],
        vec!["solve", "--model", "3", "--in", "x.json"],
        vec!["solve", "--model", "1", "--in", "missing.json"],
    ] {
        assert_eq!(run(dir.path(), &args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn solve_fixtures() {
    let dir = TempDir::new().unwrap();
    let f2 = data("f2.json");
    let f3 = data("f3.json");
    let s: Value = serde_json::from_str(&ok(
        dir.path(),
        &["solve", "--model", "2", "--in", f2.to_str().unwrap()],
    ))
    .unwrap();
    assert_eq!(radii(&s), ["4.0", "4.0"]);
    assert_eq!(s["model"], 2);
    let s: Value = serde_json::from_str(&ok(
        dir.path(),
        &["solve", "--model", "1", "--method", "all", "--in", f3.to_str().unwrap()],
    ))
    .unwrap();
    let r = radii(&s);
    assert_eq!(r[..2], ["4.0", "\"inf\""]);
    assert!(r[2].starts_with("7.0710678"));
    assert_eq!(s["method"], "chain");
}

#[test]
fn degenerate_input_reports_offending_pair() {
    let dir = TempDir::new().unwrap();
    let c = data("collinear.json");
    let out = run(dir.path(), &["solve", "--model", "1", "--in", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(0, 1)"));
}

fn solved(dir: &Path, fixture: &str, model: &str) -> PathBuf {
    let out = dir.join(format!("{fixture}-{model}.json"));
    ok(
        dir,
        &[
            "solve",
            "--model",
            model,
            "--in",
            data(&format!("{fixture}.json")).to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
    );
    out
}

#[test]
fn analyze_fixtures() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let a: Value = serde_json::from_str(&ok(d, &["analyze", "--in", solved(d, "f3", "1").to_str().unwrap()])).unwrap();
    assert_eq!(a["structure"]["clusters"], serde_json::json!([[0, 1, 2]]));
    assert_eq!(a["structure"]["cycles"], serde_json::json!([]));
    assert_eq!(a["checks"]["mass_transport"]["lhs"], 2);
    assert_eq!(a["checks"]["mass_transport"]["rhs"], 2);

    let a: Value = serde_json::from_str(&ok(d, &["analyze", "--in", solved(d, "f3c", "1").to_str().unwrap()])).unwrap();
    assert_eq!(a["structure"]["cycles"], serde_json::json!([[0, 1, 2]]));
    assert_eq!(a["checks"]["mass_transport"]["rhs"], 3);

    let a: Value = serde_json::from_str(&ok(d, &["analyze", "--in", solved(d, "f2", "2").to_str().unwrap()])).unwrap();
    assert_eq!(a["structure"]["doublets"], serde_json::json!([[0, 1]]));
    assert_eq!(a["checks"]["contact_identity"]["holds"], true);
    assert_eq!(a["checks"]["mass_transport"]["lhs"], 2);
}

#[test]
fn analyze_rejects_tampered_radii() {
    let dir = TempDir::new().unwrap();
    let path = solved(dir.path(), "f3", "1");
    let text = fs::read_to_string(&path).unwrap().replacen("4.0", "4.1", 1);
    fs::write(&path, text).unwrap();
    let out = run(dir.path(), &["analyze", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_fixtures() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let svg = ok(d, &["render", "--in", solved(d, "f3", "1").to_str().unwrap()]);
    assert_eq!(svg.matches("class=\"germ\"").count(), 3);
    assert_eq!(svg.matches("class=\"segment\"").count(), 2);
    assert_eq!(svg.matches("class=\"segment infinite\"").count(), 1);

    let svg = ok(
        d,
        &[
            "render",
            "--in",
            solved(d, "f2", "2").to_str().unwrap(),
            "--highlight",
            "doublets",
        ],
    );
    assert_eq!(svg.matches("segment doublet").count(), 2);

    let empty = d.join("empty-solution.json");
    ok(
        d,
        &[
            "solve",
            "--model",
            "1",
            "--in",
            data("empty.json").to_str().unwrap(),
            "--out",
            empty.to_str().unwrap(),
        ],
    );
    let svg = ok(d, &["render", "--in", empty.to_str().unwrap()]);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("<line"));
}

#[test]
fn render_clips_to_window() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--window", "12x12", "--seed", "3", "--out", "r.json"]);
    ok(d, &["solve", "--model", "1", "--in", "r.json", "--out", "s.json"]);
    let svg = ok(d, &["render", "--in", "s.json", "--clip"]);
    assert!(svg.contains("viewBox=\"0 0 12 12\""));
    assert!(svg.contains("clip-path"));
}

#[test]
fn mc_writes_estimator_tables() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let common = ["--window", "16x16", "--margin", "3", "--reps", "4", "--seed", "1"];
    let mut args = vec!["mc", "--model", "2", "--estimators", "nu,varpi,mu", "--out-dir", "m2"];
    args.extend(common);
    ok(d, &args);
    let csv = fs::read_to_string(d.join("m2/estimates.csv")).unwrap();
    assert!(csv.starts_with("name,estimate,stderr,n_effective,config_hash\n"));
    for name in [
        "nu_mean,",
        "varpi,",
        "mu_mean_cluster,",
        "mu_formula,",
        "mu_relative_discrepancy,",
    ] {
        assert!(csv.contains(name), "{name} missing from\n{csv}");
    }
    assert!(d.join("m2/manifest.json").exists());

    let mut args = vec!["mc", "--model", "1", "--estimators", "nu", "--out-dir", "m1"];
    args.extend(common);
    ok(d, &args);
    let csv = fs::read_to_string(d.join("m1/estimates.csv")).unwrap();
    assert!(csv.contains("\nnu_mean,"));

    let mut args = vec![
        "mc",
        "--model",
        "2",
        "--estimators",
        "trend",
        "--sizes",
        "5,6,7",
        "--out-dir",
        "tr",
    ];
    args.extend(common);
    ok(d, &args);
    let trend = fs::read_to_string(d.join("tr/trend.csv")).unwrap();
    assert_eq!(trend.lines().count(), 4);
}

#[test]
fn mc_validation_errors() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for args in [
        vec!["mc", "--model", "1", "--estimators", "nope", "--out-dir", "x"],
        vec![
            "mc",
            "--model",
            "2",
            "--estimators",
            "trend",
            "--sizes",
            "10",
            "--out-dir",
            "x",
        ],
        vec![
            "mc",
            "--model",
            "1",
            "--window",
            "10x10",
            "--margin",
            "6",
            "--out-dir",
            "x",
        ],
    ] {
        assert_eq!(run(d, &args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn replay_detects_changed_outputs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--window", "10x10", "--seed", "4", "--out", "r.json"]);
    ok(d, &["solve", "--model", "2", "--in", "r.json", "--out", "s.json"]);
    ok(d, &["replay", "s.json.manifest.json"]);
    let manifest = fs::read_to_string(d.join("s.json.manifest.json")).unwrap();
    let tampered = manifest.replacen("\"sha256\": \"", "\"sha256\": \"0", 2);
    fs::write(d.join("bad.json"), tampered).unwrap();
    assert_eq!(run(d, &["replay", "bad.json"]).status.code(), Some(2), "changed input");
    let m: Value = serde_json::from_str(&manifest).unwrap();
    let out_hash = m["outputs"][0]["sha256"].as_str().unwrap();
    fs::write(d.join("bad.json"), manifest.replace(out_hash, &"0".repeat(64))).unwrap();
    assert_eq!(
        run(d, &["replay", "bad.json", "--out-dir", "again"]).status.code(),
        Some(3)
    );
}

#[test]
fn pipeline_round_trip_on_many_seeds() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for seed in 0..100 {
        let s = seed.to_string();
        let model = if seed % 2 == 0 { "1" } else { "2" };
        ok(d, &["generate", "--window", "20x20", "--seed", &s, "--out", "r.json"]);
        let out = run(d, &["solve", "--model", model, "--in", "r.json", "--out", "s.json"]);
        match out.status.code() {
            Some(0) => {}
            // A non-generic sample is reported, not solved.
            Some(2) => continue,
            c => panic!("seed {seed}: exit {c:?}: {}", String::from_utf8_lossy(&out.stderr)),
        }
        ok(d, &["analyze", "--in", "s.json", "--margin", "4", "--out", "a.json"]);
        ok(
            d,
            &["render", "--in", "a.json", "--out", "p.svg", "--highlight", "cycles"],
        );
    }
}

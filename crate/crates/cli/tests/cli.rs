use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gmr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmr"))
        .args(args)
        .output()
        .expect("gmr runs")
}

fn ok(args: &[&str]) -> String {
    let out = gmr(args);
    assert!(
        out.status.success(),
        "gmr {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    gmr(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("json on stdout")
}

fn write_univariate(dir: &Path, name: &str, w: &[f64], mu: &[f64], var: &[f64]) -> PathBuf {
    let components: Vec<Value> = mu
        .iter()
        .zip(var)
        .map(|(m, v)| serde_json::json!({ "mean": [m], "cov": [[v]] }))
        .collect();
    let doc = serde_json::json!({ "d": 1, "weights": w, "components": components });
    let path = dir.join(name);
    fs::write(&path, doc.to_string()).unwrap();
    path
}

fn test_gm(dir: &Path) -> PathBuf {
    write_univariate(
        dir,
        "test.json",
        &[0.083, 0.167, 0.25, 0.333, 0.167],
        &[1.0, 2.0, 3.0, 4.0, 10.0],
        &[0.1, 20.0, 2.0, 2.0, 2.0],
    )
}

fn case_study(dir: &Path, mu2: f64) -> PathBuf {
    write_univariate(dir, &format!("case{mu2}.json"), &[0.45, 0.55], &[-1.0, mu2], &[0.15, 0.15])
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dissim_of_a_file_with_itself_is_zero() {
    let dir = TempDir::new().unwrap();
    let f = test_gm(dir.path());
    for m in ["ise", "nise", "kld"] {
        let v = json(&["dissim", s(&f), s(&f), "--measure", m]);
        assert!(v["value"].as_f64().unwrap().abs() < 1e-9, "{m}: {v}");
    }
}

#[test]
fn closed_form_and_numeric_kld_agree_for_single_gaussians() {
    let dir = TempDir::new().unwrap();
    let f = write_univariate(dir.path(), "f.json", &[1.0], &[0.3], &[1.7]);
    let g = write_univariate(dir.path(), "g.json", &[1.0], &[-1.1], &[0.6]);
    let exact = json(&["dissim", s(&f), s(&g), "--measure", "kld", "--closed-form"]);
    let numeric = json(&["dissim", s(&f), s(&g), "--measure", "kld"]);
    let (a, b) = (exact["value"].as_f64().unwrap(), numeric["value"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    assert_eq!(numeric["method"], "quadrature");
}

#[test]
fn closed_form_kld_rejects_mixtures() {
    let dir = TempDir::new().unwrap();
    let f = test_gm(dir.path());
    assert_eq!(code(&["dissim", s(&f), s(&f), "--measure", "kld", "--closed-form"]), 4);
}

#[test]
fn dissim_error_codes() {
    let dir = TempDir::new().unwrap();
    let f = test_gm(dir.path());
    let g = dir.path().join("g2.json");
    fs::write(
        &g,
        r#"{"d":2,"weights":[1],"components":[{"mean":[0,0],"cov":[[1,0],[0,1]]}]}"#,
    )
    .unwrap();
    assert_eq!(code(&["dissim", s(&f), s(&g), "--measure", "ise"]), 3);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&["dissim", s(&f), s(&bad), "--measure", "ise"]), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&["dissim", s(&f), s(&missing), "--measure", "ise"]), 2);
    assert_eq!(code(&["dissim", s(&f), s(&f), "--measure", "bogus"]), 4);
}

#[test]
fn reduce_prints_expected_traces() {
    let dir = TempDir::new().unwrap();
    let f = test_gm(dir.path());
    let out = ok(&["reduce", s(&f), "--target", "2", "--pipeline", "williams"]);
    let steps: Vec<&str> = out.lines().filter(|l| l.starts_with("step")).collect();
    assert!(steps[0].contains("merge 3+4"), "{out}");
    assert!(steps[1].contains("prune 2"), "{out}");
    assert!(steps[2].contains("merge 1+2"), "{out}");
    let final_ise: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("final ISE: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((final_ise - 0.0059636).abs() < 5e-7);

    let out = ok(&["reduce", s(&f), "--target", "2", "--pipeline", "williams-ise"]);
    let steps: Vec<&str> = out.lines().filter(|l| l.starts_with("step")).collect();
    assert!(steps[0].contains("merge 3+4"));
    assert!(steps[1].contains("merge 2+3"));
    assert!(steps[2].contains("merge 1+2"));
}

#[test]
fn reduce_rejects_target_equal_to_size() {
    let dir = TempDir::new().unwrap();
    let f = test_gm(dir.path());
    assert_eq!(code(&["reduce", s(&f), "--target", "5", "--pipeline", "williams"]), 4);
    assert_eq!(code(&["reduce", s(&f), "--target", "0", "--pipeline", "runnalls"]), 4);
}

#[test]
fn reduced_mixture_and_trace_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = test_gm(dir.path());
    let out = dir.path().join("r.json");
    let trace = dir.path().join("t.json");
    ok(&[
        "reduce", s(&f), "--target", "2", "--pipeline", "williams", "--out", s(&out), "--trace",
        s(&trace),
    ]);
    let zero = json(&["dissim", s(&out), s(&out), "--measure", "ise"]);
    assert_eq!(zero["value"].as_f64().unwrap(), 0.0);

    // Values survive a parse and compact rewrite bit for bit.
    let again = dir.path().join("again.json");
    let first = fs::read(&out).unwrap();
    let reloaded: Value = serde_json::from_slice(&first).unwrap();
    fs::write(&again, reloaded.to_string()).unwrap();
    let score = json(&["dissim", s(&f), s(&out), "--measure", "ise"]);
    let score_again = json(&["dissim", s(&f), s(&again), "--measure", "ise"]);
    assert_eq!(score["value"], score_again["value"]);

    let t: Value = serde_json::from_slice(&fs::read(&trace).unwrap()).unwrap();
    assert_eq!(t["measure"], "ise");
    let kinds: Vec<&str> = t["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["type"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["merge", "prune", "merge"]);
    assert_eq!(t["final_cost"], score["value"]);
}

#[test]
fn bsga_of_a_single_gaussian_is_itself() {
    let dir = TempDir::new().unwrap();
    let f = write_univariate(dir.path(), "one.json", &[1.0], &[0.5], &[2.0]);
    for m in ["ise", "nise", "kld"] {
        let v = json(&["bsga", s(&f), "--measure", m]);
        assert!(v["objective"].as_f64().unwrap().abs() < 1e-10, "{m}: {v}");
        assert!((v["mean"][0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    }
}

#[test]
fn bsga_case_studies() {
    let dir = TempDir::new().unwrap();
    let far = case_study(dir.path(), 10.0);
    let v = json(&["bsga", s(&far), "--measure", "nise", "--multistart", "--strict"]);
    assert!((v["mean"][0].as_f64().unwrap() - 10.0).abs() < 1e-3, "{v}");

    let mid = case_study(dir.path(), 4.0);
    let v = json(&["bsga", s(&mid), "--measure", "ise", "--init", "kld"]);
    assert!((v["mean"][0].as_f64().unwrap() - 2.0419).abs() < 1e-3, "{v}");
    assert!((v["cov"][0][0].as_f64().unwrap() - 11.1479).abs() < 1e-3, "{v}");
    let v = json(&["bsga", s(&mid), "--measure", "ise", "--multistart"]);
    assert!((v["mean"][0].as_f64().unwrap() - 4.0).abs() < 1e-3, "{v}");
}

#[test]
fn bsga_init_from_file() {
    let dir = TempDir::new().unwrap();
    let mid = case_study(dir.path(), 4.0);
    let init = write_univariate(dir.path(), "init.json", &[1.0], &[3.5], &[0.5]);
    let v = json(&["bsga", s(&mid), "--measure", "ise", "--init", s(&init)]);
    assert!((v["mean"][0].as_f64().unwrap() - 4.0).abs() < 1e-3, "{v}");
    assert_eq!(v["initial"]["mean"][0].as_f64().unwrap(), 3.5);

    let two = case_study(dir.path(), 1.0);
    assert_eq!(code(&["bsga", s(&mid), "--measure", "ise", "--init", s(&two)]), 4);
}

#[test]
fn refine_does_not_increase_cost() {
    let dir = TempDir::new().unwrap();
    let f = test_gm(dir.path());
    let start = dir.path().join("start.json");
    let refined = dir.path().join("refined.json");
    ok(&["reduce", s(&f), "--target", "2", "--pipeline", "williams-ise", "--out", s(&start)]);
    let v = json(&["refine", s(&f), s(&start), "--measure", "ise", "--out", s(&refined)]);
    let (a, b) = (v["initial_cost"].as_f64().unwrap(), v["final_cost"].as_f64().unwrap());
    assert!(b <= a, "{v}");
    let check = json(&["dissim", s(&f), s(&refined), "--measure", "ise"]);
    assert!((check["value"].as_f64().unwrap() - b).abs() < 1e-12);
    assert_eq!(code(&["refine", s(&f), s(&start), "--measure", "kld"]), 4);
}

fn manifest(dir: &Path, id: &str) -> Value {
    serde_json::from_slice(&fs::read(dir.join(format!("{id}_manifest.json"))).unwrap()).unwrap()
}

#[test]
fn repro_density_figures() {
    let dir = TempDir::new().unwrap();
    ok(&["repro", "fig1", "--outdir", s(dir.path())]);
    let m = manifest(dir.path(), "fig1");
    assert_eq!(m["density_columns"].as_array().unwrap().len(), 4);
    let csv = fs::read_to_string(dir.path().join("fig1_density.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,original,kld,ise,nise");
    assert_eq!(lines.count(), 2048);
    for f in m["files"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).exists());
    }
}

#[test]
fn repro_reduction_score() {
    let dir = TempDir::new().unwrap();
    ok(&["repro", "fig6", "--outdir", s(dir.path())]);
    let m = manifest(dir.path(), "fig6");
    assert!((m["score"].as_f64().unwrap() - 0.0059636).abs() < 5e-7);
    assert_eq!(m["trace"], serde_json::json!(["merge 3+4", "prune 2", "merge 1+2"]));
}

#[test]
fn repro_surface_has_a_nise_basin_at_each_mode() {
    let dir = TempDir::new().unwrap();
    ok(&["repro", "fig5", "--outdir", s(dir.path())]);
    let m = manifest(dir.path(), "fig5");
    let minima = m["local_minima"]["nise"].as_array().unwrap();
    let near = |mu: f64| {
        minima
            .iter()
            .any(|p| (p["mu"].as_f64().unwrap() - mu).abs() < 0.1)
    };
    assert!(near(-1.0) && near(2.0), "{m}");
}

#[test]
fn repro_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(&["repro", "all", "--outdir", s(a.path())]);
    ok(&["repro", "all", "--outdir", s(b.path())]);
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 25);
    for n in names {
        assert_eq!(
            fs::read(a.path().join(&n)).unwrap(),
            fs::read(b.path().join(&n)).unwrap(),
            "{n:?} differs"
        );
    }
}

#[test]
fn repro_rejects_unknown_case() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&["repro", "fig9", "--outdir", s(dir.path())]), 4);
}

use std::path::Path;
use std::process::{Command, Output};

use gkflow_cli::config::RunConfig;

fn gkflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkflow"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn defaults(dir: &Path) -> String {
    let o = gkflow(&["print-defaults"], dir);
    assert_eq!(code(&o), 0);
    String::from_utf8(o.stdout).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SPHERE: &str = r#"
n = 3
kappa = 0.0
points = 200
t_max = 1.0
seed = 0
output_dir = "sphere-out"

[shape]
kind = "sphere"
r = 1.0
"#;

#[test]
fn printed_defaults_parse_back_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let text = defaults(tmp.path());
    let c = RunConfig::from_toml(&text).unwrap();
    assert_eq!(c, RunConfig::default());
    assert_eq!(c.to_toml(), text);
}

#[test]
fn sphere_run_reports_the_extinction_time() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sphere.toml", SPHERE);
    let o = gkflow(&["flow", "run", &cfg], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = tmp.path().join("sphere-out");
    let v = json(&out.join("verdict.json"));
    let t = v["extinction_time"].as_f64().unwrap();
    assert!((t - 0.75).abs() < 0.01, "{t}");
    assert_eq!(v["passed"], true);
    for f in [
        "monitors.csv",
        "checkpoint_initial.csv",
        "checkpoint_final.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfl0 =
        SPHERE.to_string() + "\n[step]\ncfl = 0.0\nreparam_interval = 10\nmonitor_interval = 10\n";
    let cfg = write_config(tmp.path(), "cfl0.toml", &cfl0);
    assert_eq!(code(&gkflow(&["flow", "run", &cfg], tmp.path())), 2);

    let cfg = write_config(tmp.path(), "unknown.toml", &format!("colour = 1\n{SPHERE}"));
    assert_eq!(code(&gkflow(&["flow", "run", &cfg], tmp.path())), 2);

    assert_eq!(
        code(&gkflow(&["flow", "run", "missing.toml"], tmp.path())),
        2
    );
}

#[test]
fn dumbbell_with_surgery_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let text = defaults(tmp.path());
    let mut histories = Vec::new();
    for run in ["a", "b"] {
        let cfg = write_config(
            tmp.path(),
            &format!("{run}.toml"),
            &text.replace("gkflow-out", &format!("out-{run}")),
        );
        let o = gkflow(&["flow", "run", &cfg], tmp.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let out = tmp.path().join(format!("out-{run}"));
        let history = std::fs::read(out.join("history.jsonl")).unwrap();
        let verdict = std::fs::read(out.join("verdict.json")).unwrap();
        let surgeries = String::from_utf8_lossy(&history)
            .lines()
            .filter(|l| l.contains("\"event\":\"surgery\""))
            .count();
        assert_eq!(surgeries, 1);
        histories.push((history, verdict));
    }
    assert_eq!(histories[0], histories[1]);
}

#[test]
fn verify_algebra_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(
        code(&gkflow(
            &["verify", "algebra", "--samples", "0", "--seed", "1"],
            dir
        )),
        2
    );

    let o = gkflow(
        &[
            "verify",
            "algebra",
            "--samples",
            "100",
            "--seed",
            "7",
            "--out",
            "r.json",
        ],
        dir,
    );
    assert_eq!(code(&o), 0);
    let r = json(&dir.join("r.json"));
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
    assert_eq!(r["suites"].as_array().unwrap().len(), 4);

    // lambda_1 + lambda_2 < 0: outside the cone, so the checks must fail
    let bad = r#"{"suite":"pinching","condition":"inequality","index":0,"sample_seed":3,
        "n":3,"kappa":0.0,"lambdas":[-2.0,1.0,1.0],"worst":0.0}"#;
    std::fs::write(dir.join("bad.json"), bad).unwrap();
    let o = gkflow(
        &[
            "verify",
            "algebra",
            "--replay",
            "bad.json",
            "--out",
            "bad-out.json",
        ],
        dir,
    );
    assert_eq!(code(&o), 4);
    let r = json(&dir.join("bad-out.json"));
    let failure = &r["failures"][0];
    assert_eq!(failure["lambdas"], serde_json::json!([-2.0, 1.0, 1.0]));
    assert_eq!(failure["sample_seed"], 3);
}

#[test]
fn surgery_demo_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let text = defaults(dir);

    let cfg = write_config(dir, "default.toml", &text);
    let o = gkflow(&["surgery", "demo", &cfg], dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["pre.csv", "post_0.csv", "post_1.csv", "report.json"] {
        assert!(dir.join("gkflow-out").join(f).exists(), "{f}");
    }
    let report = json(&dir.join("gkflow-out/report.json"));
    assert_eq!(report["verdicts"]["g_nondecreasing"], true);

    let weak = text
        .replace("b = 50.0", "b = 1.0")
        .replace("gkflow-out", "weak");
    let cfg = write_config(dir, "weak.toml", &weak);
    assert_eq!(code(&gkflow(&["surgery", "demo", &cfg], dir)), 4);
    assert!(dir.join("weak/report.json").exists());

    let identity = text
        .replace("tau0 = 0.05", "tau0 = 0.0")
        .replace("gkflow-out", "identity");
    let cfg = write_config(dir, "identity.toml", &identity);
    assert_eq!(code(&gkflow(&["surgery", "demo", &cfg], dir)), 0);
    assert!(dir.join("identity/post_0.csv").exists());
}

use std::process::{Command, Output};

use serde_json::Value;

fn rfe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfe"))
        .args(args)
        .env_remove("RFE_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const BAN: &str = r#"{"kind":"ban","eta_bar":0.05,"strategy":"sign_flip"}"#;

#[test]
fn bounds_reports_ban_sizes() {
    let out = rfe(&["bounds", "--epsilon", "0.1", "--delta", "0.1", "--noise", BAN]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["M"], 12510);
    assert_eq!(v["K"], 63);
    assert_eq!(v["config"]["noise"]["strategy"], "sign_flip");
}

#[test]
fn bounds_extras_for_gaussian_and_dephasing() {
    let v = json(&rfe(&["bounds", "--noise", r#"{"kind":"gaussian","sigma":1.0}"#]));
    assert_eq!(v["M"], 5543);
    assert!(v["derivation_check"]["sigma_max_stated"].as_f64().unwrap() > 4.6);
    let v = json(&rfe(&["bounds", "--epsilon", "0.0004", "--noise", r#"{"kind":"high_coherence","t2":1e9}"#]));
    assert_eq!(v["K"], 15708);
    let ratio = v["high_coherence"]["min_t2_over_k_probability_bound"].as_f64().unwrap();
    assert!((ratio - 4.998243).abs() < 1e-6);
}

#[test]
fn spectrum_reproduces_single_run_csv() {
    let args = ["spectrum", "--theta", "2.25", "--epsilon", "0.08", "--samples", "80", "--seed", "7"];
    let out = rfe(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("j,re,im,abs\n"));
    assert_eq!(text.lines().count(), 1 + 79);
    assert!(!text.contains('\r'));
    assert_eq!(rfe(&args).stdout, out.stdout);

    let with = rfe(&[&args[..], &["--with-expected"]].concat());
    let text = String::from_utf8(with.stdout).unwrap();
    assert!(text.starts_with("j,re,im,abs,expected_re,expected_im,expected_abs\n"));
}

#[test]
fn output_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, workers) in [(&a, "1"), (&b, "3")] {
        let out = rfe(&[
            "run", "--epsilon", "0.3", "--trials", "25", "--seed", "42", "--workers", workers,
            "--output", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (a_bytes, b_bytes) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let a_text = String::from_utf8(a_bytes).unwrap().replace("a.json", "b.json");
    assert_eq!(a_text.into_bytes(), b_bytes);
}

#[test]
fn rfe_seed_overrides_flag() {
    let base = ["run", "--epsilon", "0.3", "--theta", "1.0"];
    let with_env = Command::new(env!("CARGO_BIN_EXE_rfe"))
        .args(base)
        .args(["--seed", "1"])
        .env("RFE_SEED", "9")
        .output()
        .unwrap();
    let v = json(&with_env);
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(with_env.stdout, rfe(&[&base[..], &["--seed", "9"]].concat()).stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_rfe"))
        .args(base)
        .env("RFE_SEED", "nine")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn emitted_config_round_trips() {
    let out = rfe(&["run", "--epsilon", "0.2", "--theta", "random", "--noise", BAN, "--seed", "3"]);
    let v = json(&out);
    let config: rfe::cli::CliConfig = serde_json::from_value(v["config"].clone()).unwrap();
    let again = serde_json::to_value(&config).unwrap();
    assert_eq!(again, v["config"]);
    assert_eq!(config.noise, serde_json::from_str(BAN).unwrap());
}

#[test]
fn run_reports_estimate() {
    let v = json(&rfe(&["run", "--theta", "1.0", "--seed", "4"]));
    assert_eq!(v["spectrum"]["samples_used"], 3130);
    assert_eq!(v["spectrum"]["coefficients"].as_array().unwrap().len(), 63);
    let theta_hat = v["theta_hat"].as_f64().unwrap();
    assert!((theta_hat - 1.0).abs() <= 0.1);

    let v = json(&rfe(&["run", "--theta", "1.0", "--samples", "200", "--grid", "16"]));
    assert_eq!(v["spectrum"]["samples_used"], 200);
}

#[test]
fn sweep_csv_marks_unachievable_points() {
    let out = rfe(&["sweep", "--family", "ban", "--values", "0,0.05,0.2", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "parameter,M_predicted,trials,successes,rate,ci_lo,ci_hi");
    assert!(lines[2].starts_with("0.05,12510,5,"));
    assert_eq!(lines[3], "0.2,unachievable,0,0,,,");
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        vec!["bounds", "--noise", "{not json"],
        vec!["bounds", "--noise", r#"{"kind":"ban","eta_bar":0.2,"strategy":"zero"}"#],
        vec!["bounds", "--noise", r#"{"kind":"gaussian_linear","sigma":0.01}"#],
        vec!["bounds", "--delta", "1.5"],
        vec!["run", "--theta", "7"],
        vec!["run", "--unknown-flag"],
        vec!["bounds", "--format", "csv"],
        vec!["frobnicate"],
    ] {
        let out = rfe(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("error"), "{args:?}: {err}");
    }
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(rfe(&["--help"]).status.code(), Some(0));
    assert_eq!(rfe(&["--version"]).status.code(), Some(0));
}

#[test]
fn verify_lemmas_passes() {
    let out = rfe(&["verify", "--suite", "lemmas"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"][0]["id"], 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("PASS [2]"));
}

#[test]
fn verify_reductions_fails_with_exit_1() {
    let out = rfe(&["verify", "--suite", "reductions"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn verify_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = rfe(&["verify", "--suite", "single_run", "--artifacts", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("criterion_9.csv")).unwrap();
    assert_eq!(csv.lines().count(), 80);
}

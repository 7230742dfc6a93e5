use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_str().unwrap().to_string()
}

fn qdecomp(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qdecomp")).args(args).env_remove("QDECOMP_CONFIG").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn renyi_decomposition_of_bundled_trine() {
    let (code, out) = qdecomp(&["compute", "decompose", &fixture("trine.json"), "--decomposition", "renyi"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
    assert!(v["q"].as_f64().unwrap() >= 1.5f64.log2() - 1e-6);
}

#[test]
fn entropy_and_mu_fixtures() {
    let (_, out) = qdecomp(&["compute", "entropy", &fixture("uniform4.json"), "--log-base", "2"]);
    assert_eq!(json(&out)["probabilities"]["shannon"].as_f64().unwrap(), 2.0);
    let (code, out) = qdecomp(&["compute", "bound", &fixture("mub_pair.json"), "--check", "mu"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["mu"].as_f64().unwrap(), 0.5);
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        vec!["compute", "asymmetry", &fixture("trine.json") as &str, "--seed", "3"],
        vec!["compute", "bound", &fixture("mub_pair.json"), "--check", "strong"],
        vec!["--format", "csv", "fig1", "--steps", "50"],
    ] {
        let a = qdecomp(&args);
        let b = qdecomp(&args);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1, "{args:?}");
    }
}

#[test]
fn bundled_campaign_is_clean() {
    let (code, out) = qdecomp(&["fuzz", &fixture("thm2_campaign.json")]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["instances_run"], 200);
    assert_eq!(v["violating_instances"].as_array().unwrap().len(), 0);
}

#[test]
fn config_file_sets_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"log_base": 2.718281828459045, "format": "csv"}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qdecomp"))
        .args(["compute", "entropy", &fixture("uniform4.json")])
        .env("QDECOMP_CONFIG", &cfg)
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("probabilities.shannon,1.38629436112"));
    // flags win over the file
    let out = Command::new(env!("CARGO_BIN_EXE_qdecomp"))
        .args(["--format", "json", "compute", "entropy", &fixture("uniform4.json")])
        .env("QDECOMP_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().starts_with('{'));
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    assert_eq!(qdecomp(&["validate", &fixture("trine.json")]).0, 0);
    assert_eq!(qdecomp(&["validate", "--campaign", &fixture("thm2_campaign.json")]).0, 0);
    assert_eq!(qdecomp(&["validate", &fixture("thm2_campaign.json")]).0, 2);
    assert_eq!(qdecomp(&["compute", "asymmetry", &fixture("trine.json"), "--method", "closed-form"]).0, 3);
    assert_eq!(qdecomp(&["compute", "asymmetry", &fixture("trine.json"), "--method", "oracle", "--out", out.to_str().unwrap()]).0, 0);
    let v = json(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(v["method"], "oracle");
}

//! End-to-end tests of the `osserman` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn osserman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osserman"))
        .args(args)
        .env_remove("OSSERMAN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_then_validate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        (
            "model.json",
            vec!["build", "m-eps-model", "--dim", "4", "--eps", "-2"],
        ),
        (
            "quaternion.json",
            vec![
                "build",
                "quaternion-model",
                "--k",
                "2",
                "--lambda",
                "1,0.25,0.5,0.75",
                "--eps",
                "1",
            ],
        ),
        (
            "connection.json",
            vec!["build", "m-eps-connection", "--dim", "3", "--eps", "1"],
        ),
        (
            "metric.json",
            vec!["build", "product-sphere-metric", "--p", "1", "--q", "2"],
        ),
    ] {
        let file = dir.path().join(name);
        let mut a = args.clone();
        a.extend(["--out", path_str(&file)]);
        let out = osserman(&a);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v = osserman(&["validate", path_str(&file)]);
        assert_eq!(v.status.code(), Some(0), "{name}");
        assert_eq!(stdout_json(&v)["valid"], Value::Bool(true), "{name}");
    }
}

#[test]
fn extension_built_from_connection_file() {
    let dir = tempfile::tempdir().unwrap();
    let conn = dir.path().join("c.json");
    let ext = dir.path().join("g.json");
    assert!(osserman(&[
        "build",
        "nilpotent-connection",
        "--dim",
        "2",
        "--seed",
        "3",
        "--out",
        path_str(&conn)
    ])
    .status
    .success());
    let out = osserman(&[
        "build",
        "modified-extension",
        "--connection",
        path_str(&conn),
        "--out",
        path_str(&ext),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&osserman(&["validate", path_str(&ext)]));
    assert_eq!(v["kind"], "metric");
    assert_eq!(v["signature"], serde_json::json!([2, 2]));
}

#[test]
fn corrupted_model_reports_bianchi_violation() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    let out = osserman(&["build", "m-eps-model", "--dim", "3", "--eps", "0"]);
    let mut doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    doc["components"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!({ "i": 1, "j": 2, "k": 3, "l": 1, "value": 0.5 }));
    fs::write(&file, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let v = osserman(&["validate", path_str(&file)]);
    assert_eq!(v.status.code(), Some(1));
    let report = stdout_json(&v);
    assert_eq!(report["valid"], Value::Bool(false));
    let identities: Vec<&str> = report["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["identity"].as_str().unwrap())
        .collect();
    assert!(
        identities.iter().any(|i| i.contains("bianchi")),
        "{identities:?}"
    );

    let check = osserman(&["check", path_str(&file), "--json", "-"]);
    assert_eq!(check.status.code(), Some(1));
    assert_eq!(stdout_json(&check)["passed"], Value::Bool(false));
}

#[test]
fn parse_error_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.json");
    fs::write(
        &file,
        "{\n  \"dimension\": 3,\n  \"components\": [ oops ]\n}\n",
    )
    .unwrap();
    let out = osserman(&["validate", path_str(&file)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn unknown_check_is_a_usage_error() {
    let out = osserman(&["check", "no-such-check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-check"));
}

#[test]
fn check_json_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let ra = osserman(&["check", "all", "--seed", "42", "--json", path_str(&a)]);
    let rb = osserman(&["check", "all", "--seed", "42", "--json", path_str(&b)]);
    assert_eq!(
        ra.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ra.stdout)
    );
    assert_eq!(rb.status.code(), Some(0));
    let (ja, jb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ja, jb, "reports differ");
    let serial = dir.path().join("s.json");
    osserman(&[
        "check",
        "all",
        "--seed",
        "42",
        "--serial",
        "--json",
        path_str(&serial),
    ]);
    assert_eq!(
        ja,
        fs::read(&serial).unwrap(),
        "serial and parallel reports differ"
    );
}

#[test]
fn seed_comes_from_environment_and_flags_override_tolerances() {
    let env = Command::new(env!("CARGO_BIN_EXE_osserman"))
        .args(["check", "ricci,jordan", "--json", "-"])
        .env("OSSERMAN_SEED", "7")
        .output()
        .unwrap();
    let flag = osserman(&["check", "ricci,jordan", "--seed", "7", "--json", "-"]);
    assert_eq!(env.stdout, flag.stdout);
    assert_eq!(stdout_json(&env)["seed"], 7);

    let loose = stdout_json(&osserman(&[
        "check",
        "ricci",
        "--exact-tol",
        "1e-3",
        "--json",
        "-",
    ]));
    assert_eq!(loose["checks"][0]["tolerance"], 1e-3);
}

#[test]
fn samples_flag_limits_sampled_directions() {
    let r = stdout_json(&osserman(&[
        "check",
        "catalog-spectra",
        "--samples",
        "5",
        "--json",
        "-",
    ]));
    let per_item = r["checks"][0]["samples"].as_u64().unwrap();
    let items = r["checks"][0]["details"]["items"].as_array().unwrap().len() as u64;
    assert_eq!(per_item, 5 * items);
}

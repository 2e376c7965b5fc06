//! End-to-end tests of the `ncover` binary: outputs, exit codes and JSON schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn model(name: &str) -> String {
    data().join("models").join(format!("{name}.json")).display().to_string()
}

fn curve(name: &str) -> String {
    data().join("curves").join(format!("{name}.json")).display().to_string()
}

fn ncover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncover")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = data().join("schemas").join(format!("{name}.json"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&s).expect("schema compiles")
}

fn assert_valid(name: &str, v: &Value) {
    let s = schema(name);
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{name} output fails its schema: {msgs:?}\n{v}");
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn invariants_of_xyz_have_reference_scaling() {
    let out = ncover(&["invariants", "--model", &model("cubic_xyz")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("c4 = 1\n") && text.contains("c6 = -1\n"), "{text}");
    let out = ncover(&["--json", "invariants", "--model", &model("cubic_xyz")]);
    let v = stdout_json(&out);
    assert_eq!((v["c4"].as_str(), v["c6"].as_str()), (Some("1"), Some("-1")));
    assert_valid("invariants", &v);
}

#[test]
fn tamagawa_at_83_on_rank_two_cubic() {
    let out = ncover(&["--json", "tamagawa", "--model", &model("c3_120267g1"), "--prime", "83"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["distances"], serde_json::json!([0, 1, 2]));
    assert_valid("tamagawa", &v);
    let text = String::from_utf8(ncover(&["tamagawa", "--model", &model("c3_120267g1"), "--prime", "83"]).stdout).unwrap();
    assert_eq!(text, "A_83 = {0, 1, 2}\n");
}

#[test]
fn height_bounds_of_mordell_two_covering() {
    let out = ncover(&["--json", "height-bounds", "--model", &model("c2_7823"), "--curve", &curve("e_7823")]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["b1"].as_f64().unwrap() + 1.94921).abs() < 1e-4, "{v}");
    assert!((v["b2"].as_f64().unwrap() + 0.92414).abs() < 1e-4, "{v}");
    assert_valid("height-bounds", &v);
    let text = String::from_utf8(
        ncover(&["height-bounds", "--model", &model("c2_7823"), "--curve", &curve("e_7823")]).stdout,
    )
    .unwrap();
    let line = text.lines().find(|l| l.contains("<= h(P) - h_E(pi P)/4 <=")).expect("bounds line");
    let fields: Vec<&str> = line.split_whitespace().collect();
    let (b1, b2): (f64, f64) = (fields[0].parse().unwrap(), fields[fields.len() - 1].parse().unwrap());
    assert!((b1 + 1.94921).abs() < 1e-4 && (b2 + 0.92414).abs() < 1e-4, "{line}");
}

#[test]
fn every_subcommand_output_matches_its_schema() {
    let (c3, e) = (model("c3_120267g1"), curve("e_120267g1"));
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("classify", vec!["classify", "--model", &c3, "--prime", "83"]),
        ("is-soluble", vec!["is-soluble", "--model", &c3, "--prime", "7", "--lift", "3"]),
        ("is-soluble", vec!["is-soluble", "--model", &c3]),
        ("real-bounds", vec!["real-bounds", "--model", &c3, "--curve", &e]),
        ("search", vec!["search", "--model", &c3, "--height", "20"]),
        ("point-report", vec!["point-report", "--model", &c3, "--curve", &e, "--point", "-1:1:1"]),
    ];
    for (name, args) in cases {
        let mut full = vec!["--json"];
        full.extend(args);
        let out = ncover(&full);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_valid(name, &stdout_json(&out));
    }
}

#[test]
fn shipped_fixtures_match_model_and_curve_schemas() {
    for (dir, name) in [("models", "model"), ("curves", "curve")] {
        let s = schema(name);
        for entry in std::fs::read_dir(data().join(dir)).unwrap() {
            let path = entry.unwrap().path();
            let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
            assert!(s.is_valid(&v), "{} fails the {name} schema", path.display());
        }
    }
}

#[test]
fn point_report_reproduces_a_table_row() {
    let out = ncover(&[
        "--json",
        "point-report",
        "--model",
        &model("c3_120267g1"),
        "--curve",
        &curve("e_120267g1"),
        "--point",
        "-1:1:1",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["contributions"], serde_json::json!([[3, 3], [7, 1], [83, 0]]));
}

#[test]
fn output_is_byte_stable() {
    let args = ["--json", "height-bounds", "--model", &model("c3_7823"), "--curve", &curve("e_7823")];
    let a = ncover(&args);
    let b = ncover(&args);
    assert_eq!(a.stdout, b.stdout);
    let jobs = ncover(&["--jobs", "1", args[0], args[1], args[2], args[3], args[4], args[5]]);
    assert_eq!(a.stdout, jobs.stdout);
}

#[test]
fn usage_and_input_errors_exit_with_one() {
    assert_eq!(ncover(&["tamagawa", "--model", &model("c3_7823")]).status.code(), Some(1));
    assert_eq!(ncover(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(ncover(&["invariants", "--model", "/nonexistent/model.json"]).status.code(), Some(1));
    assert_eq!(ncover(&["tamagawa", "--model", &model("c3_7823"), "--prime", "84"]).status.code(), Some(1));
    let bad = write_temp("bad.json", r#"{"degree": 5, "coeffs": []}"#);
    assert_eq!(ncover(&["invariants", "--model", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn domain_errors_exit_with_two() {
    // x1 x2 x3 is singular.
    let out = ncover(&["tamagawa", "--model", &model("cubic_xyz"), "--prime", "5"]);
    assert_eq!(out.status.code(), Some(2));
    // The Mordell curve is not the Jacobian of the rank two covering.
    let out = ncover(&["height-bounds", "--model", &model("c3_120267g1"), "--curve", &curve("e_7823")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn errors_are_json_on_stderr_with_json_flag() {
    let err = write_temp("missing-prime.txt", "");
    let (xyz, c3) = (model("cubic_xyz"), model("c3_7823"));
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["--json", "tamagawa", "--model", &xyz, "--prime", "5"], "domain"),
        (vec!["--json", "tamagawa", "--model", &c3, "--prime", "84"], "input"),
        (vec!["--json", "invariants", "--model", err.to_str().unwrap()], "input"),
        (vec!["--json", "tamagawa", "--model", &c3], "usage"),
    ];
    for (args, kind) in cases {
        let out = ncover(&args);
        assert!(out.stdout.is_empty());
        let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
        assert_eq!(v["error"].as_str(), Some(kind), "{v}");
        assert_valid("error", &v);
    }
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

#[test]
fn selftest_filter_selects_tamagawa_criteria() {
    let out = ncover(&["--json", "selftest", "--filter", "tamagawa"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let names: Vec<&str> = lines.iter().map(|v| v["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["tamagawa-tables", "tamagawa-distance-bounds"]);
    for v in &lines {
        assert_valid("selftest", v);
    }
}

#[test]
fn corrupted_fixture_fails_the_named_criterion() {
    let dir = std::env::temp_dir().join(format!("ncover-corrupt-{}", std::process::id()));
    copy_dir(&data(), &dir);
    let path = dir.join("expected.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["rank_two"]["models"][0]["bounds"][0] = serde_json::json!(-3.5);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = ncover(&["selftest", "--data", dir.to_str().unwrap(), "--filter", "rank-two"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("height-bounds-rank-two") && text.contains("FAIL"), "{text}");
    std::fs::remove_file(dir.join("models").join("c3_7823.json")).unwrap();
    let out = ncover(&["selftest", "--data", dir.to_str().unwrap(), "--filter", "mordell"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("mordell-curve"));
    std::fs::remove_dir_all(&dir).unwrap();
}

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use mv2b::io::{parse_mvnet, to_json};
use mv2b::pipeline::{run_codes, run_convert, RunConfig};
use mv2b::Coding;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

fn mv2b(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mv2b"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn convert_summing_prints_bnet() {
    let o = mv2b(&["convert", data("fig1.mvnet").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), fs::read_to_string(data("fig4.bnet")).unwrap());
}

#[test]
fn convert_gray_prints_bnet() {
    let o = mv2b(&[
        "convert",
        data("fig1.mvnet").to_str().unwrap(),
        "--coding",
        "gray",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), fs::read_to_string(data("fig5.bnet")).unwrap());
}

#[test]
fn convert_output_matches_library_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("fig1.mvnet");
    let o = mv2b(&[
        "convert",
        input.to_str().unwrap(),
        "--coding",
        "vanham",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let net = parse_mvnet(&fs::read_to_string(&input).unwrap()).unwrap();
    let cfg = RunConfig {
        coding: Coding::van_ham(),
        ..RunConfig::default()
    };
    let lib = run_convert(&net, &cfg).unwrap();
    assert_eq!(
        fs::read_to_string(dir.path().join("fig1.bnet")).unwrap(),
        lib.bnet
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("report.json")).unwrap(),
        to_json("conversion", lib.report()).unwrap()
    );
}

#[test]
fn codes_json_matches_library_bytes() {
    let o = mv2b(&["codes", "--coding", "gray", "--max-level", "4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lib = run_codes(&Coding::gray(), 4).unwrap();
    assert_eq!(stdout(&o), to_json("codes", &lib).unwrap());
}

#[test]
fn non_unitary_input_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("jump.mvnet");
    fs::write(&path, "var x : 0..2;\nrules x: 2 <- x = 0;\n").unwrap();
    let o = mv2b(&["convert", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("not unitary stepwise"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn parse_errors_exit_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mvnet");
    fs::write(&path, "var x : 0..1;\nrules x: 1 <- z = 0;\n").unwrap();
    let o = mv2b(&["convert", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("bad.mvnet:2:15: undeclared variable `z`"),
        "{}",
        stderr(&o)
    );
    let o = mv2b(&[
        "convert",
        dir.path().join("missing.mvnet").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn capacity_exceeded_exits_four() {
    let o = mv2b(&["verify", data("fig1.mvnet").to_str().unwrap(), "--cap", "3"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn verify_both_codings_pass() {
    for coding in ["summing", "gray", "vanham"] {
        let o = mv2b(&[
            "verify",
            data("fig1.mvnet").to_str().unwrap(),
            "--coding",
            coding,
        ]);
        assert_eq!(o.status.code(), Some(0), "{coding}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("verdict: true"));
    }
}

#[test]
fn tampered_network_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tampered.bnet");
    let text = fs::read_to_string(data("fig4.bnet"))
        .unwrap()
        .replace("y_2, x_1", "y_2, !x_1");
    fs::write(&path, text).unwrap();
    let o = mv2b(&[
        "verify",
        data("fig1.mvnet").to_str().unwrap(),
        "--bnet",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["data"]["verdict"], false);
    let bisim = &report["data"]["bisimulation"];
    assert_eq!(bisim["verdict"], false);
    assert!(
        !bisim["forward_counterexample"].is_null() || !bisim["backward_counterexample"].is_null()
    );
}

#[test]
fn analyze_writes_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = mv2b(&[
        "analyze",
        data("fig1.mvnet").to_str().unwrap(),
        "--coding",
        "gray",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("stable states: 00, 13"));
    for f in [
        "attractors.json",
        "stg.dot",
        "migs.dot",
        "bigs.dot",
        "sig.dot",
        "recovered-migs.dot",
    ] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn analyze_boolean_networks() {
    let o = mv2b(&["analyze", data("fig4.bnet").to_str().unwrap()]);
    assert!(stdout(&o).contains("stable states: 0000, 1111"));
    let o = mv2b(&["analyze", data("fig5.bnet").to_str().unwrap()]);
    assert!(stdout(&o).contains("stable states: 000, 110"));
}

#[test]
fn admissibility_lists_all_mode_pairs() {
    let o = mv2b(&[
        "admissibility",
        data("fig1.mvnet").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["data"]["pairs"].as_array().unwrap().len(), 9);
}

#[test]
fn custom_mode_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let mode = dir.path().join("mode.json");
    fs::write(&mode, r#"[["x_1"], ["y_1", "y_2", "y_3"]]"#).unwrap();
    let o = mv2b(&[
        "convert",
        data("fig1.mvnet").to_str().unwrap(),
        "--mode",
        mode.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["data"]["mode"], "custom");
}

#[test]
fn sample_is_seed_reproducible() {
    let a = mv2b(&["sample", "--seed", "9", "--count", "4"]);
    let b = mv2b(&["sample", "--seed", "9", "--count", "4", "--threads", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let dir = tempfile::tempdir().unwrap();
    mv2b(&[
        "sample",
        "--seed",
        "9",
        "--count",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    for i in 0..4 {
        let text = fs::read_to_string(dir.path().join(format!("random-{i:03}.mvnet"))).unwrap();
        assert!(parse_mvnet(&text).is_ok());
    }
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nsit_core::datagen::generate_dataset;
use nsit_core::schema;
use nsit_core::GenerationConfig;

fn nsit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const PLUS_X: &str = r#"{"schema":"rho-v1","dim":2,"re":[[0.5,0.5],[0.5,0.5]],"im":[[0.0,0.0],[0.0,0.0]]}"#;

#[test]
fn witness_prints_gamma_to_ten_digits() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plusx.rho"), PLUS_X).unwrap();
    let out = nsit(&["witness", "--dim", "2", "--state", "plusx.rho", "--measure", "y"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let value = text.trim().strip_prefix("gamma = ").unwrap();
    assert_eq!(value, "0.2071067812");
    let exact = (2f64.sqrt() - 1.0) / 2.0;
    assert!((value.parse::<f64>().unwrap() - exact).abs() < 1e-10);
}

#[test]
fn witness_file_uses_one_based_indices() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plusx.rho"), PLUS_X).unwrap();
    let out = nsit(
        &["witness", "--dim", "2", "--state", "plusx.rho", "--measure", "z", "--outcome", "-1", "--out", "w.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let w = schema::read_witness(&fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!((w.generator, w.outcome), (3, 2));
    assert_eq!(w.negative_eigenvalues.len(), 1);
}

#[test]
fn evolve_at_zero_time_returns_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plusx.rho"), PLUS_X).unwrap();
    let made = nsit(&["measure", "--dim", "2", "--state", "plusx.rho", "--measure", "y", "--out", "in.json"], dir.path());
    assert!(made.status.success());
    let out = nsit(
        &["evolve", "--dim", "2", "--state", "in.json", "--bz", "1", "--t", "0", "--out", "out.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let read = |f: &str| schema::read_probability_vector(&fs::read_to_string(dir.path().join(f)).unwrap()).unwrap();
    assert_eq!(read("in.json"), read("out.json"));
}

#[test]
fn datagen_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = nsit(&["datagen", "--dim", "4", "--count", "1000", "--seed", "7", "--out", name], dir.path());
        assert!(out.status.success());
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn datagen_matches_library_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsit(&["datagen", "--dim", "3", "--count", "51", "--seed", "11"], dir.path());
    assert!(out.status.success());
    let cfg = GenerationConfig {
        conforming: 26,
        violating: 25,
        ..GenerationConfig::balanced(3, 0, 11)
    };
    let mut expected = Vec::new();
    schema::write_dataset(&generate_dataset(&cfg).unwrap(), &mut expected).unwrap();
    assert_eq!(out.stdout, expected);
}

#[test]
fn stochastic_commands_require_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["datagen", "--dim", "2", "--count", "10"][..],
        &["sample-bloch", "--count", "10"][..],
        &["classical-check", "--samples", "100", "--t-end", "1"][..],
    ] {
        assert_eq!(nsit(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exit_codes_separate_validation_from_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plusx.rho"), PLUS_X).unwrap();
    fs::write(dir.path().join("tmat.json"), r#"{"schema":"tmat-v1","dim":2,"rows":[]}"#).unwrap();
    let code = |args: &[&str]| nsit(args, dir.path()).status.code();

    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["basis", "--dim", "1"]), Some(2));
    assert_eq!(code(&["witness", "--dim", "3", "--state", "plusx.rho", "--generator", "1"]), Some(2));
    assert_eq!(code(&["witness", "--dim", "2", "--state", "tmat.json", "--measure", "x"]), Some(2));
    assert_eq!(code(&["witness", "--dim", "2", "--state", "missing.rho", "--measure", "x"]), Some(2));
    assert_eq!(code(&["witness", "--dim", "2", "--state", "plusx.rho", "--measure", "x", "--outcome", "2"]), Some(2));
    assert_eq!(code(&["basis", "--dim", "2", "--out", "no/such/dir/basis.json"]), Some(1));
    assert_eq!(code(&["basis", "--dim", "2", "--out", "basis.json"]), Some(0));
}

#[test]
fn train_classify_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ok = |args: &[&str]| {
        let out = nsit(args, dir.path());
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        stdout(&out)
    };
    ok(&["datagen", "--dim", "2", "--count", "400", "--seed", "1", "--out", "train.csv"]);
    ok(&["datagen", "--dim", "2", "--count", "200", "--seed", "2", "--out", "test.csv"]);
    ok(&["train", "--input", "train.csv", "--seed", "3", "--epochs", "500", "--out", "model.json"]);
    let report = ok(&["evaluate", "--model", "model.json", "--input", "test.csv"]);
    let accuracy: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("accuracy = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(accuracy > 0.5, "{report}");
    let predictions = ok(&["classify", "--model", "model.json", "--input", "test.csv"]);
    assert_eq!(predictions.lines().filter(|l| !l.starts_with('#')).count(), 201);
}

#[test]
fn tables_carry_schema_headers() {
    let dir = tempfile::tempdir().unwrap();
    let first_line = |args: &[&str]| {
        let out = nsit(args, dir.path());
        assert!(out.status.success(), "{args:?}");
        stdout(&out).lines().next().unwrap().to_string()
    };
    assert_eq!(first_line(&["qubit-delta", "--grid", "3"]), "# schema: qubit-delta-v1");
    assert_eq!(first_line(&["sample-bloch", "--count", "3", "--seed", "1"]), "# schema: bloch-sample-v1");
    assert_eq!(
        first_line(&["evolve", "--dim", "2", "--bloch", "1,0,0", "--bz", "1", "--t-end", "1", "--steps", "4"]),
        "# schema: evolution-v1"
    );
    assert_eq!(
        first_line(&["classical-check", "--samples", "200", "--seed", "4", "--bz", "1", "--t-end", "1", "--steps", "2"]),
        "# schema: classical-v1"
    );
}

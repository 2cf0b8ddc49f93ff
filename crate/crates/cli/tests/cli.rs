//! End-to-end smoke tests of the binary: exit codes, stream discipline,
//! and command pipelines.

use std::process::Command;

fn qtk(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qtk"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("spawn qtk")
}

fn stdout_str(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn bound_prints_the_closed_form_value() {
    let out = qtk(&["usynth", "bound", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_str(&out).trim(), "3");
}

#[test]
fn qlc_check_reports_the_type() {
    let out = qtk(&["qlc", "check", "testdata/dup_thunk.q"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_str(&out).trim(), "qbit ⊗ qbit");
}

#[test]
fn qlc_check_rejection_exits_one() {
    let path = "/tmp/qtk_reject.q";
    std::fs::write(path, "fun x -> CNOT (x, x)").unwrap();
    let out = qtk(&["qlc", "check", path]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn qlc_parse_error_exits_two() {
    let path = "/tmp/qtk_parse_error.q";
    std::fs::write(path, "fun ->").unwrap();
    let out = qtk(&["qlc", "check", path]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_exits_two() {
    let out = qtk(&["qlc", "check", "/nonexistent/nope.q"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coin_counts_conserve_shots() {
    let out = qtk(&[
        "--json", "qlc", "run", "testdata/coin.q", "--seed", "7", "--shots", "10000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let tt = v["tt"].as_u64().unwrap();
    let ff = v["ff"].as_u64().unwrap();
    assert_eq!(tt + ff, 10_000);
    assert_eq!(v["shots"].as_u64(), Some(10_000));
}

#[test]
fn qlc_run_trace_writes_step_lines_to_stderr() {
    let out = qtk(&[
        "qlc", "run", "testdata/coin.q", "--trace", "--shots", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("qinit"), "trace missing qinit: {err}");
    assert!(err.contains("meas"), "trace missing meas: {err}");
}

#[test]
fn oracle_pipeline_synth_then_verify() {
    let circuit_path = "/tmp/qtk_majority.json";
    let out = qtk(&["oracle", "synth", "testdata/majority.b", "--inputs", "3"]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::write(circuit_path, out.stdout).unwrap();
    let out = qtk(&["oracle", "verify", circuit_path, "testdata/majority.b"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_str(&out).trim(), "COINCIDES");
    // a wrong spec of the same arity is a counterexample and exit 1
    let wrong = "/tmp/qtk_and3.b";
    std::fs::write(wrong, "fun a b c -> and a (and b c)").unwrap();
    let out = qtk(&["oracle", "verify", circuit_path, wrong, "--inputs", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_synth_stdout_is_pure_circuit_json() {
    let out = qtk(&["oracle", "synth", "testdata/and.b", "--inputs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let circuit = qtk_core::Circuit::from_json(&stdout_str(&out)).unwrap();
    assert_eq!(circuit.inputs.len(), 3); // x, y and one target wire
}

#[test]
fn pathsum_verdicts_map_to_exit_codes() {
    let eq = qtk(&["pathsum", "verify", "testdata/tt.json", "testdata/s.json"]);
    assert_eq!(eq.status.code(), Some(0));
    assert_eq!(stdout_str(&eq).trim(), "EQUIV");
    let ne = qtk(&["pathsum", "verify", "testdata/hth.json", "testdata/t.json"]);
    assert_eq!(ne.status.code(), Some(1));
    assert!(stdout_str(&ne).starts_with("DISTINCT"));
}

#[test]
fn iso_workflow() {
    let out = qtk(&["iso", "check", "testdata/mapnot.iso"]);
    assert_eq!(out.status.code(), Some(0));
    let listing = stdout_str(&out);
    assert!(listing.contains("mapnot"));

    let out = qtk(&[
        "iso", "run", "testdata/mapnot.iso", "--value", "[tt, tt, ff]",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_str(&out).trim(), "[ff, ff, tt]");

    let out = qtk(&["iso", "matrix", "testdata/had.iso"]);
    assert_eq!(out.status.code(), Some(0));
    let matrix = qtk_core::UMatrix::from_text(&stdout_str(&out)).unwrap();
    let h = qtk_core::qnum::gate_matrix(qtk_core::GateName::H, &[]).unwrap();
    assert!(matrix.distance(&h) < 1e-12);
}

#[test]
fn iso_check_rejects_bad_files_with_exit_one() {
    let path = "/tmp/qtk_bad.iso";
    std::fs::write(
        path,
        "iso partial : bool <-> bool {\n  | ff <-> tt\n}\n",
    )
    .unwrap();
    let out = qtk(&["iso", "check", path]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usynth_householder_emits_circuit_and_report() {
    let path = "/tmp/qtk_cnot.txt";
    let cnot = qtk_core::qnum::gate_matrix(qtk_core::GateName::Cnot, &[]).unwrap();
    std::fs::write(path, cnot.to_text()).unwrap();
    let out = qtk(&["usynth", "householder", path]);
    assert_eq!(out.status.code(), Some(0));
    let circuit = qtk_core::Circuit::from_json(&stdout_str(&out)).unwrap();
    assert_eq!(circuit.inputs.len(), 2);
    let report = String::from_utf8_lossy(&out.stderr);
    assert!(report.contains("cnot_count"), "{report}");
}

#[test]
fn global_flags_accepted_after_subcommand() {
    let a = qtk(&["--json", "usynth", "bound", "--n", "3"]);
    let b = qtk(&["usynth", "bound", "--n", "3", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

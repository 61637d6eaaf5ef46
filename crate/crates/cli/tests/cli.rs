//! End-to-end checks of the superalg binary: exit-code convention, report
//! shapes in all three formats, determinism, file output, and the
//! environment cap.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superalg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

#[test]
fn verify_zero_passes_with_exit_zero() {
    let out = run(&["verify-zero", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["relations"], 8);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["detail"].as_array().unwrap().len(), 9);
}

#[test]
fn audit_algebra_documents_mismatches_with_exit_one() {
    let out = run(&["audit-algebra", "--format", "json"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "mismatches present, report emitted"
    );
    let v = json(&out);
    assert_eq!(v["summary"]["relations"], 27);
    assert_eq!(v["summary"]["exact_matches"], 23);
    assert_eq!(v["summary"]["mismatches"], 4);
    assert_eq!(v["summary"]["closure_failures"], 0);
    // every mismatching row carries a corrected right-hand side
    for row in v["relations"].as_array().unwrap() {
        if row["verdict"] == "mismatch" {
            assert!(row["corrected_rhs"].is_string(), "row {row}");
        }
    }
}

#[test]
fn casimir_documents_the_misprint_with_exit_one() {
    let out = run(&["casimir", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["k1_commutes"], true);
    assert_eq!(v["k2_printed_commutes"], false);
    assert_eq!(v["k2_corrected_commutes"], true);
    assert_eq!(v["k1_central_exact"], true);
    assert_eq!(v["k2_central_exact"], true);
    assert!(v["k2_printed_residual"]
        .as_str()
        .unwrap()
        .starts_with("[K2, B2] ="));
}

#[test]
fn equivalence_check_documents_the_offset_with_exit_one() {
    let out = run(&["equivalence-check", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["points_checked"], 20);
    assert_eq!(v["tuples_checked"], 10);
    assert_eq!(v["cylindrical_exact"], true);
    assert_eq!(v["paraboloidal_stated_exact"], false);
    assert_eq!(v["paraboloidal_offset"], "(2)*m1");
    assert_eq!(v["paraboloidal_corrected_exact"], true);
    assert_eq!(v["cylindrical_parity_consistent"], true);
    assert_eq!(v["paraboloidal_parity_consistent"], true);
}

#[test]
fn spectrum_ladder_at_the_reference_point() {
    let out = run(&[
        "--c1",
        "1",
        "--c2",
        "0",
        "--c3",
        "0.75",
        "--c4",
        "0.75",
        "spectrum-algebraic",
        "--nmax",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let levels = v["levels"].as_array().unwrap();
    let energies: Vec<&str> = levels.iter().map(|l| l["E"].as_str().unwrap()).collect();
    assert_eq!(energies, ["10", "14", "18"]);
    let mult: Vec<u64> = levels
        .iter()
        .map(|l| l["multiplicity"].as_u64().unwrap())
        .collect();
    assert_eq!(mult, [1, 3, 6]);

    // plain text carries the same ladder
    let out = run(&["spectrum-algebraic", "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for line in ["E = 10", "E = 14", "E = 18"] {
        assert!(text.contains(line), "missing {line:?} in {text}");
    }
}

#[test]
fn shifted_ladder_with_a_linear_term() {
    let out = run(&[
        "--c2",
        "4",
        "spectrum-algebraic",
        "--nmax",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["levels"][0]["E"], "9");
    assert_eq!(v["levels"][1]["E"], "13");
}

#[test]
fn float_parameters_are_accepted() {
    let out = run(&[
        "--float",
        "--c1",
        "1.0",
        "spectrum-algebraic",
        "--nmax",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("E = 10"));
}

#[test]
fn reports_are_deterministic() {
    let a = run(&["audit-algebra", "--format", "json"]);
    let b = run(&["audit-algebra", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["casimir"]);
    let b = run(&["casimir"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_lands_in_the_output_file() {
    let dir = std::env::temp_dir().join(format!("superalg-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("verify.json");
    let out = run(&[
        "verify-zero",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).is_empty(),
        "file output should keep stdout quiet"
    );
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["relations"], 8);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn csv_format_has_a_header_row() {
    let out = run(&["audit-algebra", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    assert_eq!(
        first,
        "relation,verdict,symmetrized_match,closure_exact,corrected_rhs"
    );
    assert_eq!(text.lines().count(), 28);
}

#[test]
fn eval_normal_orders_and_flags_zero() {
    let out = run(&["eval", "[A1, H]", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["is_zero"], true);
    assert_eq!(v["normal_form"], "0");

    let out = run(&["eval", "A1", "--commutator-with", "B1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["is_zero"], false);
    assert_eq!(v["momentum_degree"], 3);
    assert_eq!(v["formally_self_adjoint"], false);
}

#[test]
fn structure_function_reports_the_four_singlets() {
    let out = run(&[
        "structure-function",
        "--sub",
        "1",
        "--E",
        "10",
        "--p",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["subalgebra"], 1);
    assert_eq!(v["energy"], "10");
    let families = v["families"].as_array().unwrap();
    assert_eq!(families.len(), 1);
    assert_eq!(families[0]["solutions"].as_array().unwrap().len(), 4);
    assert_eq!(v["proportionality"]["ratio"], "16");
    assert_eq!(v["proportionality"]["exact_multiple"], true);
}

#[test]
fn compare_passes_within_tolerance() {
    let out = run(&[
        "compare", "--levels", "3", "--grid", "2000", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["within_tolerance"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_and_config_errors_exit_two() {
    // unknown subcommand
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    // c1 must be positive where parameters are consumed
    assert_eq!(
        run(&["--c1", "0", "spectrum-algebraic"]).status.code(),
        Some(2)
    );
    // unparseable parameter
    assert_eq!(
        run(&["--c1", "zebra", "spectrum-algebraic"]).status.code(),
        Some(2)
    );
    // subalgebra index out of range
    assert_eq!(
        run(&["structure-function", "--sub", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn parameter_degree_cap_env_is_honored() {
    // invalid value
    let out = bin()
        .env("SUPERALG_MAX_PARAM_DEGREE", "abc")
        .args(["verify-zero"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // too small for the model's own structure constants: config error
    let out = bin()
        .env("SUPERALG_MAX_PARAM_DEGREE", "1")
        .args(["audit-algebra"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("exceeds cap"), "stderr: {err}");

    // roomier cap leaves results unchanged
    let out = bin()
        .env("SUPERALG_MAX_PARAM_DEGREE", "8")
        .args(["verify-zero"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("superalg"));
    assert!(Path::new(env!("CARGO_BIN_EXE_superalg")).exists());
}

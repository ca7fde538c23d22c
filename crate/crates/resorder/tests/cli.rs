//! End-to-end checks of the compiled binary: flags, formats, exit codes.

use std::process::Command;

fn resorder(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_resorder"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn density_order_human() {
    let out = resorder(&[
        "density", "order", "--g", "2", "--d", "4", "--class", "3/4", "--j", "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1/8 - A_psi1/8"), "{text}");
    assert!(text.contains("0.04454366"), "{text}");
    assert!(text.contains("(GRH)"), "{text}");
}

#[test]
fn constants_defaults() {
    let out = resorder(&["constants", "--cutoff", "100000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("A_psi1"), "{text}");
    assert!(text.contains("0.6436"), "{text}");
    assert!(text.contains("0.1739"), "{text}");
}

#[test]
fn table_csv_row_count() {
    let out = resorder(&["table", "--which", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "label,exact,numeric,empirical,deviation");
    assert_eq!(rows.len(), 12, "header + 11 data rows: {text}");
    assert!(rows[9].contains("-489A_psi1/2396"), "{text}");
    assert!(rows[9].contains("-0.13136276"), "{text}");
}

#[test]
fn table_selected_rows_with_census() {
    let out = resorder(&[
        "table", "--which", "1", "--rows", "12", "--primes", "100000", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains("g=5"), "{text}");
    assert!(row.contains("67A_xi1/94"), "{text}");
    // empirical and deviation columns populated
    let fields: Vec<&str> = row.split(',').collect();
    assert!(fields[3].parse::<f64>().is_ok(), "{row}");
    assert!(fields[4].parse::<f64>().is_ok(), "{row}");
}

#[test]
fn json_output_parses_and_roundtrips() {
    let out = resorder(&[
        "density", "order", "--g", "-3", "--d", "3", "--format", "json",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "density order");
    assert_eq!(v["g"], "-3");
    assert!(v["rows"].as_array().unwrap().len() >= 3);
    assert_eq!(v["meta"]["grh_conditional"], true);
    // exact values carry structured rationals
    let row = &v["rows"][1];
    assert_eq!(row["exact"]["constant"], "AXi1");
}

#[test]
fn census_small_run() {
    let out = resorder(&[
        "census", "--g", "2", "--d", "3", "--primes", "20000", "--jobs", "2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3A_xi1/8"), "{text}");
    assert!(text.contains("skipped"), "{text}");
}

#[test]
fn oracle_target() {
    let out = resorder(&[
        "oracle", "--g", "2", "--target", "diff:3", "--cutoff", "20000",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("diff mod 3 series"), "{text}");
    assert!(text.contains("0.0652"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(resorder(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        resorder(&["density", "order", "--g", "-1", "--d", "4"]).status.code(),
        Some(3)
    );
    assert_eq!(
        resorder(&["density", "order", "--g", "2", "--d", "4", "--class", "5/7"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(resorder(&["--help"]).status.code(), Some(0));
}

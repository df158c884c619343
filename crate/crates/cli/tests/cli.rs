use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geodiscover"))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../constructions")
        .join(format!("{name}.geo"))
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("geodiscover-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

/// Checks `value` against the subset of JSON Schema used by the published report schema.
fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            return Err(format!("{path}: {value} not in {options:?}"));
        }
    }
    if let Some(ty) = schema.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "boolean" => value.is_boolean(),
            "integer" => value.is_u64() || value.is_i64(),
            other => return Err(format!("{path}: schema type {other} unsupported")),
        };
        if !ok {
            return Err(format!("{path}: expected {ty}, got {value}"));
        }
    }
    if let Some(n) = value.as_f64() {
        if schema
            .get("minimum")
            .and_then(Value::as_f64)
            .is_some_and(|m| n < m)
            || schema
                .get("maximum")
                .and_then(Value::as_f64)
                .is_some_and(|m| n > m)
        {
            return Err(format!("{path}: {n} out of range"));
        }
    }
    if let Some(obj) = value.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        for key in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("{path}: missing `{key}`"));
            }
        }
        for (key, v) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => validate(sub, v, &format!("{path}.{key}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{path}: unexpected `{key}`"))
                }
                None => {}
            }
        }
    }
    if let Some(items) = value.as_array() {
        if schema
            .get("minItems")
            .and_then(Value::as_u64)
            .is_some_and(|m| (items.len() as u64) < m)
            || schema
                .get("maxItems")
                .and_then(Value::as_u64)
                .is_some_and(|m| (items.len() as u64) > m)
        {
            return Err(format!("{path}: {} items", items.len()));
        }
        if let Some(sub) = schema.get("items") {
            for (i, v) in items.iter().enumerate() {
                validate(sub, v, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

#[test]
fn discover_prints_two_theorems_for_the_midline() {
    let o = run(&["discover", &fixture("midline")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "DE is parallel to AB\nBD and CD are congruent\n");
}

#[test]
fn json_reports_follow_the_published_schema() {
    let schema: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    for name in ["midline", "hexagon", "euler", "parallelogram"] {
        let o = run(&["discover", &fixture(name), "--json"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
        validate(&schema, &report, name).unwrap();
    }
}

#[test]
fn untimed_json_is_reproducible() {
    let args = ["discover", &fixture("hexagon"), "--json", "--no-timings"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let report: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["timings"]["symbolic_ms"], 0);
}

#[test]
fn target_and_hide_flags_apply() {
    // with E hidden the parallel class has no second line through D
    let o = run(&["discover", &fixture("midline"), "--hide", "E"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "BD and CD are congruent\n");
    let o = run(&["discover", &fixture("midline"), "--target", "Z"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("`Z`"));
}

#[test]
fn prove_exit_codes_follow_the_verdict() {
    let o = run(&["prove", &fixture("midline"), "parallel", "D", "E", "A", "B"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("parallel D E A B: proved"));

    let o = run(&["prove", &fixture("midline"), "collinear(A,B,C)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("refuted"));
    assert!(stdout(&o).contains("counterexample"));

    let o = run(&[
        "prove",
        &fixture("midline"),
        "congruent",
        "B",
        "D",
        "C",
        "D",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "proved");
}

#[test]
fn unknown_identity_halts_with_redraw_message() {
    // too small a budget to settle G = H
    let o = run(&["discover", &fixture("hexagon"), "--timeout", "0.000001"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("redraw"), "{}", stderr(&o));
}

#[test]
fn check_reports_numeric_truth() {
    let o = run(&["check", &fixture("midline"), "congruent B D C D"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("holds"));
    let o = run(&["check", &fixture("midline"), "perpendicular A B A C"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fails"));
}

#[test]
fn dump_ideal_names_variables() {
    let o = run(&["dump-ideal", &fixture("hexagon"), "--statement", "identical G H"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("variables: x_A, y_A, x_B, y_B"));
    assert!(out.contains("aux_1"));
    assert!(out.contains("theses:"));
}

#[test]
fn errors_map_to_exit_codes() {
    let o = run(&["discover", "/nonexistent/file.geo"]);
    assert_eq!(o.status.code(), Some(66));

    let bad = temp_file("bad.geo", "point A 0 0\nmidpoint D A\n");
    let o = run(&["discover", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let parallel = temp_file(
        "parallel.geo",
        "point A 0 0\npoint B 4 0\npoint C 2 2\nmidpoint D B C\nmidpoint E A C\nintersect X line(D,E) line(A,B)\n",
    );
    let o = run(&["discover", parallel.to_str().unwrap(), "--target", "D"]);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));

    let o = run(&["discover", &fixture("midline"), "--timeout", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));

    let empty = temp_file("empty.geo", "");
    let o = run(&["discover", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("no target"));
}

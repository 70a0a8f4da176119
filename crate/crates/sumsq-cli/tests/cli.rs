use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn sumsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumsq")).args(args).env_remove("SUMSQ_TRUNC").output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn classify_irreducible_cubic() {
    let v = json_of(&sumsq(&["classify", "x^3+2*y^3", "--json"]));
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["normal_form"]["case"], "irreducible_cubic");
    assert_eq!(v["order"], 3);
}

#[test]
fn report_keys_in_schema_order() {
    let out = sumsq(&["classify", "x^2*y - y^3", "--json"]);
    let v = json_of(&out);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    let expected = [
        "input", "trunc", "order", "normal_form", "verdict", "reason", "witness", "unit", "verified_to", "determinacy",
    ];
    assert_eq!(&keys[..expected.len()], &expected);
    assert!(keys.contains(&"notes"));
    assert!(v["witness"].as_array().unwrap().iter().all(|s| s["sub"].is_object()));
}

#[test]
fn zero_reports_infinite_order() {
    let v = json_of(&sumsq(&["classify", "0", "--json"]));
    assert_eq!(v["order"], "infinity");
    assert_eq!(v["verdict"], "no");
}

#[test]
fn json_is_byte_stable() {
    let a = sumsq(&["classify", "x^3 - y^4", "--json"]);
    let b = sumsq(&["classify", "x^3 - y^4", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(serde_json::to_string(&v).unwrap() + "\n", String::from_utf8(a.stdout).unwrap());
}

#[test]
fn determinacy_of_x3_xy3() {
    let v = json_of(&sumsq(&["determinacy", "x^3+x*y^3", "--max-k", "8", "--json"]));
    assert_eq!(v["kind"], "determined");
    assert_eq!(v["k"], 5);
}

#[test]
fn sturm_counts_roots() {
    let v = json_of(&sumsq(&["sturm", "x^3-x", "--json"]));
    assert_eq!(v["real_roots"], 3);
    assert_eq!(v["chain"].as_array().unwrap().len(), 4);
    let v = json_of(&sumsq(&["sturm", "x^3-x", "--lo", "-1/2", "--hi", "2", "--json"]));
    assert_eq!(v["real_roots"], 2);
}

#[test]
fn psd_check_answers() {
    assert_eq!(json_of(&sumsq(&["psd-check", "1", "0", "1", "--json"]))["answer"], "yes");
    assert_eq!(json_of(&sumsq(&["psd-check", "x^2", "2*x", "1", "--json"]))["answer"], "yes");
    let v = json_of(&sumsq(&["psd-check", "x^2", "3*x", "1", "--json"]));
    assert_eq!(v["answer"], "no");
    assert_eq!(v["failing"], "4*a0*a2 - a1^2");
}

#[test]
fn witness_is_verified() {
    let v = json_of(&sumsq(&["witness", "x^3+y^3", "x^3+y^3+x^2*y^2", "-k", "3", "-n", "8", "--json"]));
    assert_eq!(v["verified_to"], 8);
    assert_eq!(v["unit"], "1");
}

#[test]
fn weierstrass_preparation() {
    let v = json_of(&sumsq(&["weierstrass", "x^2 + x*y^2 + y^3", "--var", "x", "--json"]));
    assert_eq!(v["degree"], 2);
    assert_eq!(v["unit"], "1");
}

#[test]
fn parse_error_exits_2() {
    let out = sumsq(&["classify", "x^^2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 2"));
}

#[test]
fn precision_violation_exits_3() {
    // x²y + x y^200 needs a working truncation beyond the series cap
    let out = sumsq(&["classify", "x^2*y + x*y^200", "--json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision_violation"));
}

#[test]
fn erase_denominators_worked_instance() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, r#"{{"target":"x^2+y^2","weights":[1,1],"summands":["x*y","y^2"],"modulus":{{"h":"y","g":"1","k":1,"r":1}}}}"#).unwrap();
    let v = json_of(&sumsq(&["erase-denominators", f.path().to_str().unwrap(), "--json"]));
    assert_eq!(v["target"], "x^2 + y^2");
    assert_eq!(v["summands"], serde_json::json!(["x", "y"]));
}

#[test]
fn erase_denominators_failure_names_equation() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, r#"{{"target":"x","summands":["x*y"],"modulus":{{"h":"y","g":"1","k":1,"r":1}}}}"#).unwrap();
    let out = sumsq(&["erase-denominators", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("division_failed"));
}

#[test]
fn batch_preserves_order() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    let inputs = ["x^2 + y^3", "# comment", "x^3", "x^2*y + y^3", "", "x^3 + y^5", "-x^2"];
    writeln!(f, "{}", inputs.join("\n")).unwrap();
    let out = sumsq(&["batch", f.path().to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let got: Vec<&str> = lines.iter().map(|v| v["input"].as_str().unwrap()).collect();
    assert_eq!(got, ["x^2 + y^3", "x^3", "x^2*y + y^3", "x^3 + y^5", "-x^2"]);
    let verdicts: Vec<&str> = lines.iter().map(|v| v["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["yes", "no", "no", "yes", "no"]);
}

#[test]
fn trunc_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_sumsq"))
        .args(["classify", "x^2 + y^3", "--json"])
        .env("SUMSQ_TRUNC", "20")
        .output()
        .unwrap();
    assert_eq!(json_of(&out)["trunc"], 20);
}

#[test]
fn human_output_lists_chain_then_unit() {
    let out = sumsq(&["classify", "x^2*y - y^3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let unit_line = text.lines().position(|l| l.trim_start().starts_with("unit:")).unwrap();
    let flow_line = text.lines().position(|l| l.contains("flow onto")).unwrap();
    assert!(flow_line < unit_line);
}

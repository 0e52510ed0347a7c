use gct::catalogue;
use serde_json::Value;
use std::process::{Command, Output};

fn gct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gct"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json", "-"];
    full.extend_from_slice(args);
    let out = gct(&full);
    let value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (code(&out), value)
}

fn failed_expectations(report: &Value) -> Vec<String> {
    report["expectations"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["pass"] != Value::Bool(true))
        .map(|e| e["key"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn list_names_every_entry() {
    let out = gct(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for id in catalogue::ids() {
        let id = if id == "r2n1-new" {
            "r2n1-new(n)".to_string()
        } else {
            id
        };
        assert!(text.contains(&id), "{id}");
    }
}

#[test]
fn catalogue_entries_meet_their_expectations() {
    for id in catalogue::ids() {
        let (status, report) = json(&["catalogue", &id]);
        let failed = failed_expectations(&report);
        if id == "t2xs1" {
            assert_eq!(status, 1);
            assert_eq!(report["passed"], Value::Bool(false));
        } else {
            assert_eq!(status, 0, "{id}: {failed:?}");
            assert!(failed.is_empty(), "{id}: {failed:?}");
        }
    }
}

#[test]
fn t2xs1_failures_are_the_known_ones() {
    let (_, report) = json(&["catalogue", "t2xs1"]);
    let failing: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] != "pass")
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"classify"), "{failing:?}");
    assert_eq!(report["checks"][0]["status"], "pass");
    assert!(failed_expectations(&report).is_empty());
}

#[test]
fn json_output_is_byte_stable() {
    let run = || gct(&["--json", "-", "catalogue", "heisenberg"]).stdout;
    assert_eq!(run(), run());
}

#[test]
fn parameterized_entry_accepts_range() {
    assert_eq!(
        code(&gct(&["catalogue", "r2n1-new(3)", "--checks", "axioms"])),
        0
    );
    assert_eq!(code(&gct(&["catalogue", "r2n1-new(9)"])), 2);
    assert_eq!(code(&gct(&["catalogue", "no-such-entry"])), 2);
}

#[test]
fn battery_reports_five_conditions() {
    let (status, report) = json(&["battery", "r3-new", "--side", "+"]);
    assert_eq!(status, 0);
    let facts = &report["checks"][0]["facts"];
    assert_eq!(facts["battery.plus.conditions"], "yes,yes,yes,yes,yes");
}

#[test]
fn quotient_on_contact_entry() {
    let (status, report) = json(&["quotient", "contact-r3", "--fiber", "z"]);
    assert_eq!(status, 0);
    assert_eq!(report["checks"][0]["facts"]["quotient.omega"], "dx^dy");
}

#[test]
fn check_runs_a_source_file() {
    let dir = std::env::temp_dir().join(format!("gct-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("contact.gct");
    std::fs::write(&path, catalogue::source("contact-r3").unwrap()).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&gct(&["check", p])), 0);
    let (status, reports) = json(&["check", p, p, "--checks", "axioms"]);
    assert_eq!(status, 0);
    assert_eq!(reports.as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&gct(&["check", "/nonexistent/file.gct"])), 2);
    assert_eq!(code(&gct(&["frobnicate"])), 2);
    assert_eq!(
        code(&gct(&[
            "--tol-accept",
            "1",
            "--tol-reject",
            "0.1",
            "catalogue",
            "r3-new"
        ])),
        2
    );
    let dir = std::env::temp_dir().join(format!("gct-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.gct");
    std::fs::write(&path, "model ??? coordinates").unwrap();
    assert_eq!(code(&gct(&["check", path.to_str().unwrap()])), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

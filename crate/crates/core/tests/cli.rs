use std::process::Command;

fn rdlab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rdlab")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn unknown_check_exits_2() {
    let (code, _, err) = rdlab(&["check", "nosuch"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown check id"));
}

#[test]
fn cone_closure_passes() {
    let (code, out, _) = rdlab(&["check", "lem5.1d.cone-closure", "--n", "7", "--q", "7"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["status"], "pass");
    assert!(v["seed"].as_u64().is_some());
    for key in ["id", "params", "status", "witness", "stats", "seed", "anchor"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v.get("elapsed_ms").is_none());
}

#[test]
fn closure_precondition_is_config_error() {
    let (code, out, _) = rdlab(&["check", "lem5.1d.cone-closure", "--n", "6", "--q", "5"]);
    assert_eq!(code, 2);
    assert!(out.contains("\"status\":\"error\""));
}

#[test]
fn min_vanish_reports_degree_5() {
    let (code, out, _) = rdlab(&["check", "prop3.1b.min-vanish", "--n", "3", "--q", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["stats"]["results"][0]["degree"], 5);
}

#[test]
fn injected_negative_fails() {
    let (code, out, _) = rdlab(&["verify-all", "--select", "*.control", "--inject-negative"]);
    assert_eq!(code, 1);
    let fails: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|v| v["status"] == "fail")
        .collect();
    assert_eq!(fails.len(), 4);
    assert!(fails.iter().all(|v| !v["witness"].is_null()));
}

#[test]
fn controls_pass_by_default() {
    let (code, _, err) = rdlab(&["verify-all", "--select", "*.control", "--jobs", "2"]);
    assert_eq!(code, 0);
    assert!(err.contains("4 checks: 4 pass"));
}

#[test]
fn table_and_explain() {
    let (code, out, _) = rdlab(&["table", "--format", "plain"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<String>> = out.lines().skip(1).map(|l| l.split_whitespace().map(String::from).collect()).collect();
    assert_eq!(rows[1], ["S7", "3", "3", "2", "2", "2"]);

    let (code, out, _) = rdlab(&["explain", "S7", "3", "--format", "plain"]);
    assert_eq!(code, 0);
    assert!(out.contains("Bray-Holt-Roney-Dougal, Table 8.11"));

    let (code, out, _) = rdlab(&["explain", "S8", "2", "--format", "plain"]);
    assert_eq!(code, 0);
    assert!(out.lines().next().unwrap().contains("[invariant-variety]"));

    let (code, _, _) = rdlab(&["explain", "S9", "2"]);
    assert_eq!(code, 1);
}

#[test]
fn report_file_written() {
    let path = std::env::temp_dir().join(format!("rdlab-report-{}.jsonl", std::process::id()));
    let (code, out, _) = rdlab(&["verify-all", "--select", "thm1.3.*", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    std::fs::remove_file(path).ok();
}

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minui-a11y")).args(args).env_remove("MINUI_A11Y_API_KEY").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn scan_into(project: &str, run: &Path) {
    let o = bin(&["scan", s(&fixture(project)), "--out", s(run)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

fn issue_ids(run: &Path) -> Vec<String> {
    json(&run.join("issues.json"))["reports"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r["issues"].as_array().unwrap().iter().map(|i| i["id"].as_str().unwrap().to_string()))
        .collect()
}

fn records(run: &Path) -> Vec<Value> {
    let mut out = Vec::new();
    let dir = run.join("suggestions");
    let Ok(entries) = fs::read_dir(&dir) else { return out };
    let mut paths: Vec<_> = entries
        .flat_map(|e| fs::read_dir(e.unwrap().path()).unwrap().map(|f| f.unwrap().path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    for p in paths {
        out.push(json(&p));
    }
    out
}

/// Every file under `dir` except the log, keyed by relative path.
fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "log.jsonl" {
                out.insert(p.strip_prefix(dir).unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn scan_writes_issues_and_honours_fail_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    scan_into("nine_issues", &run);
    let issues = json(&run.join("issues.json"));
    assert_eq!(issues["schemaVersion"], 1);
    assert_eq!(issue_ids(&run).len(), 9);
    assert!(run.join("minui.json").is_file());
    assert!(run.join("source/views/landmark_row.minui").is_file());
    assert!(run.join("scenes/HomeView.json").is_file());

    let o = bin(&["scan", s(&fixture("nine_issues")), "--out", s(&run), "--fail-on-issues"]);
    assert_eq!(code(&o), 1);
    let o = bin(&["scan", s(&fixture("nine_issues")), "--screen", "Detail", "--out", s(&run)]);
    assert_eq!(code(&o), 0);
    assert_eq!(issue_ids(&run).len(), 5);
}

#[test]
fn clean_project_scans_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let o = bin(&["scan", s(&fixture("clean")), "--out", s(&run), "--fail-on-issues"]);
    assert_eq!(code(&o), 0);
    assert!(issue_ids(&run).is_empty());

    let o = bin(&["report", s(&run), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["totals"]["n"], 0);
    assert!(report["issues"].as_array().unwrap().is_empty());
    assert!(report["kinds"].as_array().unwrap().is_empty());
    let o = bin(&["report", s(&run)]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("Screen") && text.contains("Issue kind"), "{text}");
}

#[test]
fn error_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(code(&bin(&["scan", s(tmp.path()), "--out", s(&run)])), 2);
    assert_eq!(code(&bin(&["scan", s(&fixture("clean")), "--screen", "Nope", "--out", s(&run)])), 2);
    assert_eq!(code(&bin(&["scan", s(&fixture("clean")), "--device", "4", "--out", s(&run)])), 2);
    assert_eq!(code(&bin(&["report", s(&tmp.path().join("missing"))])), 2);
    assert_eq!(code(&bin(&["suggest", s(&tmp.path().join("missing"))])), 2);
    assert_eq!(code(&bin(&["frobnicate"])), 2);

    scan_into("theme_picker", &run);
    assert_eq!(code(&bin(&["suggest", s(&run), "--issue", "0000000000000000"])), 2);
    assert_eq!(code(&bin(&["suggest", s(&run), "--backend", "scripted"])), 2);
    // No API key in the environment.
    assert_eq!(code(&bin(&["suggest", s(&run), "--backend", "http", "--endpoint", "http://127.0.0.1:9/v1"])), 2);

    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let endpoint = format!("http://127.0.0.1:{port}/v1/chat/completions");
    let o = Command::new(env!("CARGO_BIN_EXE_minui-a11y"))
        .args(["suggest", s(&run), "--backend", "http", "--endpoint", &endpoint])
        .env("MINUI_A11Y_API_KEY", "k")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!run.join("suggestions").exists());
}

#[test]
fn plans_flag_limits_records() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    scan_into("nine_issues", &run);
    let o = bin(&["suggest", s(&run), "--plans", "1"]);
    assert_eq!(code(&o), 0);
    let recs = records(&run);
    assert_eq!(recs.len(), 9);
    assert!(recs.iter().all(|r| r["planIndex"] == 1 && r["schemaVersion"] == 1));
}

#[test]
fn single_issue_and_idempotent_rerun() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    scan_into("nine_issues", &run);
    let id = issue_ids(&run)[0].clone();
    assert_eq!(code(&bin(&["suggest", s(&run), "--issue", &id])), 0);
    let first = tree(&run);
    assert_eq!(records(&run).len(), 3);
    assert_eq!(code(&bin(&["suggest", s(&run), "--issue", &id])), 0);
    assert_eq!(tree(&run), first);
    assert_eq!(records(&run).len(), 3);
}

#[test]
fn unmatched_script_yields_backend_error_records() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    scan_into("theme_picker", &run);
    let script = tmp.path().join("script.json");
    fs::write(
        &script,
        r#"[{"match": "alternative fix plans",
             "response": "1. Darken the label.\nRationale: contrast.\nGuideline: WCAG 1.4.3\n2. Add a background.\nRationale: contrast.\nGuideline: WCAG 1.4.3\n3. Use a bolder style.\nRationale: size.\nGuideline: WCAG 1.4.3"}]"#,
    )
    .unwrap();
    let o = bin(&["suggest", s(&run), "--backend", "scripted", "--fixture", s(&script)]);
    assert_eq!(code(&o), 0);
    let recs = records(&run);
    assert_eq!(recs.len(), 3);
    assert!(recs.iter().all(|r| r["error"].as_str().is_some_and(|e| e.contains("no scripted response"))));

    let report: Value = serde_json::from_slice(&bin(&["report", s(&run), "--format", "json"]).stdout).unwrap();
    assert!(report["issues"][0]["suggestions"].as_array().unwrap().iter().all(|x| x["status"] == "BackendError"));
}

#[test]
fn heuristic_runs_are_reproducible_and_reports_recount() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<PathBuf> = (0..2).map(|i| tmp.path().join(format!("run{i}"))).collect();
    for (run, jobs) in runs.iter().zip(["1", "4"]) {
        scan_into("nine_issues", run);
        assert_eq!(code(&bin(&["suggest", s(run), "--jobs", jobs])), 0);
        assert!(run.join("log.jsonl").is_file());
    }
    assert_eq!(tree(&runs[0]), tree(&runs[1]));

    let recs = records(&runs[0]);
    assert_eq!(recs.len(), 27);
    let plausible = recs.iter().filter(|r| r["verdict"]["type"] == "plausible").count();
    let o = bin(&["report", s(&runs[0]), "--format", "json"]);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["schemaVersion"], 1);
    assert_eq!(report["totals"]["n"], 9);
    assert_eq!(report["totals"]["suggestions"], 27);
    assert_eq!(report["totals"]["plausible"], plausible);
    assert_eq!(report["totals"]["fixed"], 9);
    for k in report["kinds"].as_array().unwrap() {
        assert!(k["plausible"].as_u64().unwrap() >= 1, "{k}");
    }

    let text = String::from_utf8(bin(&["report", s(&runs[0])]).stdout).unwrap();
    assert!(text.contains("Description: Image has no accessibility label."));
    assert!(text.contains("+++ views/landmark_row.minui"));
    assert!(text.contains("Verdict: Plausible"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use notional::diagnosis::{diagnose, MatchMode, Observation, SearchConfig};
use notional::exec::{run_reference, Limits};
use notional::lang::parse;
use notional::registry::shipped;
use serde_json::Value;

const BIRNE: &str = "for (i = 10; i > 0; i = i - 4) {\n  print(\"Birne\", i);\n}\nprint(\"Apfel\");\n";

fn notional(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_notional"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn birne(dir: &tempfile::TempDir) -> String {
    write(dir.path(), "birne.ml", BIRNE).display().to_string()
}

#[test]
fn run_prints_reference_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let out = notional(&["run", &birne(&dir)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "Birne 10\nBirne 6\nBirne 2\nApfel\n");
}

#[test]
fn run_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let out = notional(&["run", &birne(&dir), "--trace", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let program = parse(BIRNE).unwrap();
    let expected = run_reference(&program, Limits::default()).trace_jsonl();
    assert_eq!(std::fs::read_to_string(trace).unwrap(), expected);
}

#[test]
fn simulate_under_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = notional(&["simulate", &birne(&dir), "--profile", "ITER.3.b.ii.A"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "Birne 6\nBirne 2\nBirne -2\nApfel\n");
    let both = notional(&["simulate", &birne(&dir), "--profile", "ITER.3.b.ii.A,ITER.3.a.ii"]);
    assert_eq!(stdout(&both), "Birne 10\nBirne 6\nBirne 2\nBirne -2\nApfel\n");
}

#[test]
fn simulate_rejects_bad_profiles() {
    let dir = tempfile::tempdir().unwrap();
    for profile in ["ITER.1.c", "ITER.3.a.ii,ITER.3.b.iii", "ITER.5.a.i(k=9)", "NOPE"] {
        let out = notional(&["simulate", &birne(&dir), "--profile", profile]);
        assert_eq!(out.status.code(), Some(1), "{profile}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn diagnose_second_wrong_answer_json() {
    let dir = tempfile::tempdir().unwrap();
    let answer = write(dir.path(), "answer.txt", "Birne 10\nBirne 6\nBirne 2\nBirne -2\nApfel\n");
    let out = notional(&[
        "diagnose",
        &birne(&dir),
        "--answer",
        answer.to_str().unwrap(),
        "--max-k",
        "2",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["verdict"], "explained");
    let sets: Vec<Vec<String>> = report["explanations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| serde_json::from_value(e["codes"].clone()).unwrap())
        .collect();
    assert!(sets.contains(&vec!["ITER.3.a.ii".to_string(), "ITER.3.b.ii.A".to_string()]));

    let program = parse(BIRNE).unwrap();
    let obs = Observation::from_text("Birne 10\nBirne 6\nBirne 2\nBirne -2\nApfel\n", MatchMode::Exact);
    let lib = diagnose(shipped(), &program, &obs, &SearchConfig::with_k(2));
    let mut expected = serde_json::to_string_pretty(&lib.to_json()).unwrap();
    expected.push('\n');
    assert_eq!(stdout(&out), expected);
}

#[test]
fn diagnose_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = birne(&dir);
    assert_eq!(notional(&["diagnose", &file, "--answer-text", "Banane"]).status.code(), Some(3));
    let correct = notional(&["diagnose", &file, "--answer-text", "Birne 10\nBirne 6\nBirne 2\nApfel"]);
    assert_eq!(correct.status.code(), Some(0));
    assert!(stdout(&correct).contains("{ITER.3.a.ii}"));
    let normalized = notional(&[
        "diagnose",
        &file,
        "--answer-text",
        "Birne 6 Birne 2 Birne -2 Apfel",
        "--match",
        "normalized",
    ]);
    assert_eq!(normalized.status.code(), Some(0));
    assert!(stdout(&normalized).contains("{ITER.3.b.ii.A}"));
    assert_eq!(notional(&["diagnose", &file]).status.code(), Some(1));
    assert_eq!(
        notional(&["diagnose", &file, "--answer-text", "x", "--max-k", "4"]).status.code(),
        Some(1)
    );
}

#[test]
fn syntax_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.ml", "print(1;\n");
    let out = notional(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.ml"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(notional(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(notional(&["run", "/nonexistent/x.ml"]).status.code(), Some(1));
    assert_eq!(notional(&["taxonomy", "show", "ITER.9"]).status.code(), Some(1));
    assert_eq!(notional(&["--help"]).status.code(), Some(0));
}

#[test]
fn taxonomy_show_and_list() {
    let out = notional(&["taxonomy", "show", "ITER.1.b"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("quote: \"loop is if\""));
    let json: Value = serde_json::from_str(&stdout(&notional(&["taxonomy", "show", "ITER.1.b", "--json"]))).unwrap();
    assert_eq!(json["quote"], "loop is if");
    let all = stdout(&notional(&["taxonomy", "list"]));
    assert_eq!(all.lines().count(), 72);
    let jumps = stdout(&notional(&["taxonomy", "list", "ITER.7"]));
    assert_eq!(jumps.lines().count(), 4);
}

#[test]
fn custom_registry_extends_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value = serde_json::from_str(notional::registry::shipped_source()).unwrap();
    doc["entries"].as_array_mut().unwrap().push(serde_json::json!({
        "code": "ITER.8",
        "title": "loops are magic",
        "quote": "magic",
        "status": "descriptive",
        "rationale": "no single semantics",
    }));
    let reg = write(dir.path(), "reg.json", &doc.to_string());
    let out = notional(&["taxonomy", "show", "ITER.8", "--registry", reg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("loops are magic"));
    let broken = write(dir.path(), "broken.json", "{");
    assert_eq!(
        notional(&["taxonomy", "list", "--registry", broken.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn distractors_include_observed_wrong_answers() {
    let dir = tempfile::tempdir().unwrap();
    let file = birne(&dir);
    let k1: Value = serde_json::from_str(&stdout(&notional(&["distractors", &file, "--json"]))).unwrap();
    let transcripts = |v: &Value| -> Vec<Vec<String>> {
        v.as_array()
            .unwrap()
            .iter()
            .map(|d| serde_json::from_value(d["transcript"].clone()).unwrap())
            .collect()
    };
    assert!(transcripts(&k1).contains(&vec![
        "Birne 6".into(),
        "Birne 2".into(),
        "Birne -2".into(),
        "Apfel".into()
    ]));
    let straight = write(dir.path(), "one.ml", "print(1);");
    assert_eq!(stdout(&notional(&["distractors", straight.to_str().unwrap()])), "");
}

#[test]
fn batch_over_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = serde_json::json!({
        "version": "1",
        "tasks": [{
            "id": "birne",
            "source": BIRNE,
            "referenceTranscript": ["Birne 10", "Birne 6", "Birne 2", "Apfel"],
            "responses": [
                {"studentId": "a", "answer": "Birne 10\nBirne 6\nBirne 2\nApfel"},
                {"studentId": "b", "answer": "Birne 6\nBirne 2\nBirne -2\nApfel"},
                {"answer": "Birne 10\nBirne 6\nBirne 2\nBirne -2\nApfel"}
            ]
        }]
    });
    let path = write(dir.path(), "corpus.json", &corpus.to_string());
    let out = notional(&["batch", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let stats: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(stats["totals"]["responses"], 3);
    assert_eq!(stats["totals"]["correct"], 1);
    assert!(stats["weights"]["ITER.3.b.ii.A"].as_f64().unwrap() > 0.0);
    assert_eq!(stats["counts"]["ITER.3.b.ii.A"], 2);

    let stale = write(
        dir.path(),
        "stale.json",
        &corpus.to_string().replace("\"Birne 10\",", "\"Birne 11\","),
    );
    assert_eq!(notional(&["batch", stale.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn limits_flag_caps_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spin = write(dir.path(), "spin.ml", "x = 0; while (true) { print(x); x = x + 1; }");
    let out = notional(&["run", spin.to_str().unwrap(), "--limits", "outputs=3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"], "output_cap");
    assert_eq!(v["transcript"].as_array().unwrap().len(), 3);
    assert_eq!(
        notional(&["run", spin.to_str().unwrap(), "--limits", "steps=3"]).status.code(),
        Some(1)
    );
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let file = birne(&dir);
    let args = ["distractors", file.as_str(), "--max-k", "2", "--json"];
    assert_eq!(stdout(&notional(&args)), stdout(&notional(&args)));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entail-audit"))
        .args(args)
        .output()
        .expect("spawn entail-audit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn without_error(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("error");
    v
}

fn assert_close(got: &Value, want: &Value, path: &str) {
    match (got, want) {
        (Value::Object(g), Value::Object(w)) => {
            let mut gk: Vec<_> = g.keys().collect();
            let mut wk: Vec<_> = w.keys().collect();
            gk.sort();
            wk.sort();
            assert_eq!(gk, wk, "{path}: key sets differ");
            for (k, wv) in w {
                assert_close(&g[k], wv, &format!("{path}.{k}"));
            }
        }
        (Value::Number(g), Value::Number(w)) => {
            let (g, w) = (g.as_f64().unwrap(), w.as_f64().unwrap());
            assert!((g - w).abs() < 1e-12, "{path}: {g} vs {w}");
        }
        _ => assert_eq!(got, want, "{path}"),
    }
}

#[test]
fn taxonomy_fixture_matches_oracle() {
    let kb = fixture("toy.kbl");
    let input = fixture("taxonomy.jsonl");
    let out = run(&["audit", "--kb", p(&kb), "--in", p(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let expected = json_lines(&std::fs::read_to_string(fixture("taxonomy.expected.jsonl")).unwrap());
    assert_eq!(json_lines(&stdout(&out)), expected);
    let classes: Vec<&str> = expected.iter().map(|v| v["id"].as_str().unwrap()).collect();
    assert_eq!(
        classes,
        ["supported", "unsupported", "missed", "correctly_excluded"]
    );
}

#[test]
fn text_reports_through_lexicon() {
    let out = run(&[
        "audit",
        "--kb",
        p(&fixture("toy.kbl")),
        "--lexicon",
        p(&fixture("toy_lexicon.json")),
        "--in",
        p(&fixture("text_reports.jsonl")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_lines(&stdout(&out));
    assert_eq!(v.len(), 3);
    assert!(v.iter().all(|r| r["status"] == "consistent"));
    assert_eq!(v[0]["per_diagnosis"]["pe"], "supported");
    assert_eq!(v[1]["per_diagnosis"]["pna"], "supported");
    // hedged "possible small effusion" is not a claim
    assert_eq!(v[1]["per_diagnosis"]["pe"], "correctly_excluded");
    assert_eq!(v[2]["per_diagnosis"]["pna"], "unsupported");
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 consistent"));
}

#[test]
fn empty_input_is_clean() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let out = run(&["audit", "--kb", p(&fixture("toy.kbl")), "--in", p(&empty)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_diagnosis_is_malformed() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.jsonl");
    std::fs::write(
        &input,
        "{\"id\":\"ok\",\"findings\":{},\"impression_diagnoses\":[]}\n{\"id\":\"x\",\"findings\":{},\"impression_diagnoses\":[\"flu\"]}\n",
    )
    .unwrap();
    let out = run(&["audit", "--kb", p(&fixture("toy.kbl")), "--in", p(&input)]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_lines(&stdout(&out));
    assert_eq!(v.len(), 2);
    assert_eq!(v[1]["status"], "malformed");
    assert!(v[1]["error"].as_str().unwrap().contains("flu"));
}

#[test]
fn metrics_pipeline_matches_golden() {
    let dir = TempDir::new().unwrap();
    let verdicts = dir.path().join("verdicts.jsonl");
    let kb = fixture("conflict.kbl");
    let reports = fixture("metrics_reports.jsonl");
    let out = run(&[
        "audit",
        "--kb",
        p(&kb),
        "--in",
        p(&reports),
        "--out",
        p(&verdicts),
    ]);
    assert_eq!(out.status.code(), Some(2), "m7 is malformed");
    let got: Vec<Value> = json_lines(&std::fs::read_to_string(&verdicts).unwrap())
        .into_iter()
        .map(without_error)
        .collect();
    let want = json_lines(&std::fs::read_to_string(fixture("metrics_verdicts.expected.jsonl")).unwrap());
    assert_eq!(got, want);

    let csv = dir.path().join("m.csv");
    let out = run(&[
        "metrics",
        "--kb",
        p(&kb),
        "--in",
        p(&verdicts),
        "--labels",
        p(&reports),
        "--compare-filtered",
        "--csv",
        p(&csv),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let got: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("metrics_golden.json")).unwrap()).unwrap();
    assert_close(&got, &golden, "$");

    let csv = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3, "{csv}");
    assert_eq!(
        &rows[0][..7],
        [
            "dataset",
            "variant",
            "n_total",
            "n_consistent",
            "n_inconsistent",
            "n_malformed",
            "micro_soundness"
        ]
    );
    assert_eq!(&rows[1][..7], ["verdicts", "vlm", "8", "6", "1", "1", "0.5"]);
    assert_eq!(&rows[2][..7], ["verdicts", "ours", "8", "6", "1", "1", "1"]);
}

#[test]
fn metrics_without_labels_omit_confusion() {
    let dir = TempDir::new().unwrap();
    let verdicts = dir.path().join("v.jsonl");
    run(&[
        "audit",
        "--kb",
        p(&fixture("toy.kbl")),
        "--in",
        p(&fixture("taxonomy.jsonl")),
        "--out",
        p(&verdicts),
    ]);
    let out = run(&["metrics", "--kb", p(&fixture("toy.kbl")), "--in", p(&verdicts)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["vlm"].get("confusion").is_none());
    assert_eq!(v["vlm"]["micro_soundness"], 0.5);
    assert_eq!(v["vlm"]["micro_completeness"], 0.5);
    assert!(v.get("ours").is_none());
}

#[test]
fn filter_removes_hallucination_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let filtered = dir.path().join("f.jsonl");
    let kb = fixture("conflict.kbl");
    let out = run(&[
        "filter",
        "--kb",
        p(&kb),
        "--in",
        p(&fixture("metrics_reports.jsonl")),
        "--out",
        p(&filtered),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = std::fs::read_to_string(&filtered).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[1],
        r#"{"id":"m2","findings":{"cb":true,"ms":true,"lo":false,"ab":true},"impression_diagnoses":["pe"],"labels":{"pe":true,"pna":false}}"#
    );
    // fully supported record is unchanged
    assert_eq!(
        lines[0],
        std::fs::read_to_string(fixture("metrics_reports.jsonl"))
            .unwrap()
            .lines()
            .next()
            .unwrap()
    );
    assert!(lines[5].ends_with(
        r#""impression_diagnoses":[],"labels":{"pe":false},"verification_status":"inconsistent"}"#
    ));

    let out = run(&["audit", "--kb", p(&kb), "--in", p(&filtered)]);
    for v in json_lines(&stdout(&out)) {
        if v["status"] == "consistent" {
            let classes = v["per_diagnosis"].as_object().unwrap();
            assert!(classes.values().all(|c| c != "unsupported"), "{v}");
        }
    }
}

#[test]
fn jobs_do_not_change_output() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("c.jsonl");
    let kb = fixture("toy.kbl");
    let out = run(&[
        "synth",
        "--kb",
        p(&kb),
        "--n",
        "400",
        "--halluc-rate",
        "0.2",
        "--omit-rate",
        "0.1",
        "--seed",
        "5",
        "--out",
        p(&corpus),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let a = run(&[
        "audit",
        "--kb",
        p(&kb),
        "--in",
        p(&corpus),
        "--jobs",
        "1",
        "--emit-countermodels",
    ]);
    let b = run(&[
        "audit",
        "--kb",
        p(&kb),
        "--in",
        p(&corpus),
        "--jobs",
        "8",
        "--emit-countermodels",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let f1 = run(&["filter", "--kb", p(&kb), "--in", p(&corpus), "--jobs", "1"]);
    let f8 = run(&["filter", "--kb", p(&kb), "--in", p(&corpus), "--jobs", "8"]);
    assert_eq!(f1.stdout, f8.stdout);
}

#[test]
fn synth_is_seed_deterministic() {
    let dir = TempDir::new().unwrap();
    let kb = fixture("toy.kbl");
    let mut outputs = Vec::new();
    for (i, seed) in ["9", "9", "10"].iter().enumerate() {
        let log = dir.path().join(format!("log{i}"));
        let out = run(&[
            "synth",
            "--kb",
            p(&kb),
            "--n",
            "50",
            "--halluc-rate",
            "0.3",
            "--seed",
            seed,
            "--log",
            p(&log),
        ]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push((out.stdout, std::fs::read(&log).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_ne!(outputs[0], outputs[2]);
    assert_eq!(
        stdout(&run(&["synth", "--kb", p(&kb), "--n", "50", "--seed", "9"]))
            .lines()
            .count(),
        50
    );
}

#[test]
fn synth_rejects_inconsistent_kb() {
    let dir = TempDir::new().unwrap();
    let kb = dir.path().join("bad.kbl");
    std::fs::write(&kb, "finding a\ndiagnosis d\nrule r1: a & !a\nrule r2: a -> d\n").unwrap();
    let out = run(&["synth", "--kb", p(&kb), "--n", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lint_exit_codes() {
    let out = run(&["lint", "--kb", p(&fixture("toy.kbl"))]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["reachability"]["pe"]["status"], "entailable_by_some_evidence");

    let dir = TempDir::new().unwrap();
    let kb = dir.path().join("bad.kbl");
    std::fs::write(&kb, "finding a\ndiagnosis d\nrule r1: a & !a\nrule r2: a -> d\n").unwrap();
    let out = run(&["lint", "--kb", p(&kb)]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["global_consistent"], false);
}

#[test]
fn extract_blunted_angle() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.jsonl");
    std::fs::write(
        &input,
        "{\"id\":\"e1\",\"findings_text\":\"blunted costophrenic angle is seen.\"}\n",
    )
    .unwrap();
    let out = run(&[
        "extract",
        "--kb",
        p(&fixture("toy.kbl")),
        "--lexicon",
        p(&fixture("toy_lexicon.json")),
        "--in",
        p(&input),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_lines(&stdout(&out));
    assert_eq!(v[0]["findings"]["cb"], true);
    assert_eq!(v[0]["findings"]["ms"], false);
    assert_eq!(
        stdout(&out),
        "{\"id\":\"e1\",\"findings_text\":\"blunted costophrenic angle is seen.\",\"findings\":{\"cb\":true,\"ms\":false,\"lo\":false,\"ab\":false}}\n"
    );
}

#[test]
fn lexical_identity() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("in.jsonl");
    std::fs::write(
        &input,
        "{\"id\":\"a\",\"findings_text\":\"Small left pleural effusion.\",\"impression_text\":\"Effusion.\",\"reference_findings_text\":\"Small left pleural effusion.\",\"reference_impression_text\":\"Effusion.\"}\n",
    )
    .unwrap();
    let out = run(&["lexical", "--in", p(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bleu"], 1.0);
    assert_eq!(v["rouge_l"], 1.0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["audit", "--kb"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let missing = run(&["audit", "--kb", "/nonexistent.kbl", "--in", "/nonexistent.jsonl"]);
    assert_eq!(missing.status.code(), Some(1));
}

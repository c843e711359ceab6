use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nonsense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonsense"))
        .args(args)
        .env_remove("NONSENSE_SCHEME")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn step_generation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for out in [&a, &b] {
        let o = nonsense(&[
            "gen",
            "step",
            "--kind",
            "sr",
            "--count",
            "1000",
            "--seed",
            "7",
            "--out",
            path_str(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("records/s"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let sidecar: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("a.jsonl.config.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(sidecar["config"]["seed"], 7);

    let c = dir.path().join("c.jsonl");
    nonsense(&[
        "gen",
        "step",
        "--kind",
        "sr",
        "--count",
        "1000",
        "--seed",
        "8",
        "--out",
        path_str(&c),
    ]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    for args in [
        vec![
            "gen",
            "step",
            "--kind",
            "bogus",
            "--count",
            "1",
            "--seed",
            "1",
            "--out",
            path_str(&out),
        ],
        vec![
            "gen",
            "tasks",
            "--kind",
            "NotAKind",
            "--count",
            "1",
            "--seed",
            "1",
            "--out",
            path_str(&out),
        ],
        vec![
            "gen",
            "step",
            "--kind",
            "sr",
            "--count",
            "1",
            "--out",
            path_str(&out),
        ],
        vec![
            "gen",
            "step",
            "--kind",
            "sr",
            "--count",
            "0",
            "--seed",
            "1",
            "--out",
            path_str(&out),
        ],
        vec!["frobnicate"],
    ] {
        let o = nonsense(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert!(!out.exists());
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonsense(&["verify", path_str(&dir.path().join("missing.jsonl"))]);
    assert_eq!(o.status.code(), Some(1));
    let bad_scheme = dir.path().join("bad.toml");
    std::fs::write(&bad_scheme, "[markers]\nbullet = \"aaa\"\n").unwrap();
    let o = nonsense(&[
        "--scheme",
        path_str(&bad_scheme),
        "gen",
        "tasks",
        "--kind",
        "CopyBulleted",
        "--count",
        "1",
        "--seed",
        "1",
        "--out",
        path_str(&dir.path().join("o.jsonl")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("vocabulary"));
}

#[test]
fn scheme_from_environment_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    let good = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemes/default.toml");
    let out = dir.path().join("o.jsonl");
    let run = |flag: Option<&Path>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nonsense"));
        cmd.env("NONSENSE_SCHEME", &bad);
        if let Some(f) = flag {
            cmd.arg("--scheme").arg(f);
        }
        cmd.args([
            "gen",
            "tasks",
            "--kind",
            "CopyQuoted",
            "--count",
            "5",
            "--seed",
            "1",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap()
    };
    assert_eq!(run(None).status.code(), Some(1));
    assert!(run(Some(&good)).status.success());
}

#[test]
fn verify_reports_exactly_one_corrupted_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.jsonl");
    let o = nonsense(&[
        "gen",
        "tasks",
        "--kind",
        "ensemble",
        "--count",
        "200",
        "--seed",
        "3",
        "--out",
        path_str(&path),
    ]);
    assert!(o.status.success());
    let o = nonsense(&["verify", path_str(&path)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("200 passed, 0 failed"));

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut rec: Value = serde_json::from_str(&lines[17]).unwrap();
    rec["target"] = Value::String(format!("{} zzz", rec["target"].as_str().unwrap()));
    lines[17] = serde_json::to_string(&rec).unwrap();
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let o = nonsense(&["verify", path_str(&path), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["total"], 200);
    assert_eq!(report["passed"], 199);
    assert_eq!(report["failures"].as_array().unwrap().len(), 1);
    assert_eq!(report["failures"][0]["line"], 18);
}

#[test]
fn verify_step_and_missing_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    for kind in ["nsg", "sr", "sr-adjusted", "mdg", "mdg_adjusted"] {
        let o = nonsense(&[
            "gen",
            "step",
            "--kind",
            kind,
            "--count",
            "20",
            "--seed",
            "1",
            "--out",
            path_str(&path),
        ]);
        assert!(o.status.success(), "{kind}");
        assert!(
            nonsense(&["verify", path_str(&path)]).status.success(),
            "{kind}"
        );
    }
    let bare = dir.path().join("bare.jsonl");
    std::fs::write(
        &bare,
        "{\"id\":\"a\",\"task\":\"sr\",\"source\":\"aaa .\",\"target\":\"aaa .\",\"meta\":{}}\n",
    )
    .unwrap();
    let o = nonsense(&["verify", path_str(&bare)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no task metadata"));
}

#[test]
fn copy_first_sentence_targets() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let o = nonsense(&[
        "gen",
        "tasks",
        "--kind",
        "CopyFirstSentence",
        "--count",
        "10",
        "--seed",
        "1",
        "--out",
        path_str(&path),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let records: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 10);
    for r in records {
        let source = r["source"].as_str().unwrap();
        let first_end = source.find(" .").unwrap() + 2;
        assert_eq!(r["target"].as_str().unwrap(), &source[..first_end]);
    }
}

#[test]
fn standalone_excluded_kind_is_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let o = nonsense(&[
        "gen",
        "tasks",
        "--kind",
        "SumOfNumbers",
        "--count",
        "20",
        "--seed",
        "1",
        "--out",
        path_str(&path),
    ]);
    assert!(o.status.success());
    assert!(nonsense(&["verify", path_str(&path)]).status.success());
}

#[test]
fn rouge_scores() {
    let dir = tempfile::tempdir().unwrap();
    let refs = dir.path().join("refs.txt");
    let cands = dir.path().join("cands.txt");
    std::fs::write(&refs, "aaa caa\naaa baa daa\nbaa\n").unwrap();
    let o = nonsense(&["rouge", path_str(&refs), path_str(&refs), "--json"]);
    assert!(o.status.success());
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for m in ["r1", "r2", "rl"] {
        // Single-token lines have no bigrams and score 0 on ROUGE-2.
        let expected = if m == "r2" { 2.0 / 3.0 } else { 1.0 };
        assert!(
            (report["mean"][m]["f1"].as_f64().unwrap() - expected).abs() < 1e-9,
            "{m}"
        );
    }

    let multi = dir.path().join("multi.txt");
    std::fs::write(&multi, "aaa caa\naaa baa daa\n").unwrap();
    let o = nonsense(&["rouge", path_str(&multi), path_str(&multi), "--json"]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for m in ["r1", "r2", "rl"] {
        for k in ["p", "r", "f1"] {
            assert_eq!(report["mean"][m][k].as_f64().unwrap(), 1.0);
        }
    }

    std::fs::write(&cands, "aaa baa caa\naaa baa caa\n\n").unwrap();
    let o = nonsense(&["rouge", path_str(&cands), path_str(&refs), "--json"]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pairs = report["per_pair"].as_array().unwrap();
    assert!((pairs[0]["r1"]["f1"].as_f64().unwrap() - 0.8).abs() < 1e-9);
    assert!((pairs[0]["rl"]["f1"].as_f64().unwrap() - 0.8).abs() < 1e-9);
    assert!((pairs[1]["r2"]["f1"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(pairs[2]["r1"]["f1"].as_f64().unwrap(), 0.0);

    let o = nonsense(&["rouge", path_str(&cands), path_str(&refs)]);
    assert!(stdout(&o).contains("mean"));

    std::fs::write(&cands, "aaa\n").unwrap();
    let o = nonsense(&["rouge", path_str(&cands), path_str(&refs)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ingest_then_generate_from_documents() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("text.txt");
    let body: String = (0..300)
        .map(|i| format!("Sentence number{i} has some plain words in it. "))
        .collect();
    std::fs::write(&text, body).unwrap();
    let docs = dir.path().join("docs.txt");
    let o = nonsense(&[
        "ingest",
        "--input",
        path_str(&text),
        "--out",
        path_str(&docs),
        "--seed",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("real.jsonl");
    let o = nonsense(&[
        "gen",
        "tasks",
        "--kind",
        "ensemble",
        "--count",
        "30",
        "--seed",
        "1",
        "--documents",
        path_str(&docs),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(nonsense(&["verify", path_str(&out)]).status.success());

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let o = nonsense(&[
        "ingest",
        "--input",
        path_str(&empty),
        "--out",
        path_str(&docs),
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn stats_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    nonsense(&[
        "gen",
        "step",
        "--kind",
        "mdg",
        "--count",
        "50",
        "--seed",
        "2",
        "--out",
        path_str(&path),
    ]);
    let o = nonsense(&["stats", path_str(&path), "--json"]);
    assert!(o.status.success());
    let s: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(s["records"], 50);
    assert_eq!(s["tasks"]["mdg"], 50);
    let p50 = s["source_tokens"]["p50"].as_u64().unwrap();
    assert!((512..=527).contains(&p50));
}

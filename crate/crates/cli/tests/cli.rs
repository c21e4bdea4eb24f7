//! End-to-end behavior of the `viperkit` binary on edge cases: skipped
//! files, disagreement reporting, missing predictions, and config handling.

use std::path::Path;
use std::process::{Command, Output};

fn viperkit(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_viperkit"));
    cmd.args(args).current_dir(dir).env_remove("VIPERKIT_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn gen(dir: &Path) {
    let out = viperkit(dir, &["gen-corpus", "--out", "corpus", "--seed", "9"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
}

fn append_manifest_line(dir: &Path, line: &str) {
    let path = dir.join("corpus/manifest.jsonl");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str(line);
    text.push('\n');
    std::fs::write(&path, text).unwrap();
}

#[test]
fn empty_corpus_summary_is_all_zeros() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("corpus")).unwrap();
    std::fs::write(tmp.path().join("corpus/manifest.jsonl"), "").unwrap();
    let out = viperkit(tmp.path(), &["detect", "--corpus", "corpus"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("samples: 0"), "{text}");
    assert!(text.contains("witnesses: 0"), "{text}");
    assert!(text.contains("skipped: 0"), "{text}");
}

#[test]
fn unparseable_file_is_skipped_and_listed() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path());
    std::fs::write(
        tmp.path().join("corpus/goto.c"),
        "void f() {\nstart:\n  goto start;\n}\n",
    )
    .unwrap();
    append_manifest_line(
        tmp.path(),
        r#"{"sample_id":"goto","path":"goto.c","label":"non_vulnerable"}"#,
    );
    let out = viperkit(tmp.path(), &["detect", "--corpus", "corpus"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("samples: 41"), "{text}");
    assert!(text.contains("skipped: 1"), "{text}");
    assert!(text.contains("goto.c"), "{text}");

    // but a ceiling of zero turns the same corpus into a failure
    let out = viperkit(
        tmp.path(),
        &["detect", "--corpus", "corpus", "--max-skip-rate", "0"],
        &[],
    );
    assert!(!out.status.success());
}

#[test]
fn validate_reports_full_agreement_and_flags_mislabeled_fixtures() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path());
    let out = viperkit(tmp.path(), &["validate", "--corpus", "corpus"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("agreement rate: 20/20 (1.00)"), "{}", stdout(&out));

    // move one FLAW comment onto an unrelated line: agreement drops to 19/20
    let manifest = std::fs::read_to_string(tmp.path().join("corpus/manifest.jsonl")).unwrap();
    let first = manifest.lines().next().unwrap();
    let path: String = serde_json::from_str::<serde_json::Value>(first).unwrap()["path"]
        .as_str()
        .unwrap()
        .to_string();
    let file = tmp.path().join("corpus").join(&path);
    let source = std::fs::read_to_string(&file).unwrap();
    let moved = format!("/* FLAW: mislabeled fixture */\n{}", source.replace("FLAW", "NOTE"));
    std::fs::write(&file, moved).unwrap();
    let out = viperkit(tmp.path(), &["validate", "--corpus", "corpus"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("agreement rate: 19/20"), "{text}");
    assert!(text.contains("disagreement"), "{text}");
}

#[test]
fn validate_warns_on_annotation_free_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("corpus")).unwrap();
    std::fs::write(tmp.path().join("corpus/plain.c"), "int id(int x) {\n  return x;\n}\n").unwrap();
    std::fs::write(
        tmp.path().join("corpus/manifest.jsonl"),
        "{\"sample_id\":\"plain\",\"path\":\"plain.c\",\"label\":\"non_vulnerable\"}\n",
    )
    .unwrap();
    let out = viperkit(tmp.path(), &["validate", "--corpus", "corpus"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("UNDEFINED"), "{}", stdout(&out));
}

#[test]
fn evaluate_lists_every_missing_prediction_and_fails() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path());
    let out = viperkit(tmp.path(), &["perturb", "--corpus", "corpus"], &[]);
    assert!(out.status.success(), "{}", stderr(&out));

    // predictions for everything except three variants
    let variants = std::fs::read_to_string(tmp.path().join("corpus/variants/variants.jsonl")).unwrap();
    let manifest = std::fs::read_to_string(tmp.path().join("corpus/manifest.jsonl")).unwrap();
    let mut ids: Vec<String> = manifest
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["sample_id"].as_str().unwrap().into())
        .collect();
    ids.extend(variants.lines().map(|l| {
        serde_json::from_str::<serde_json::Value>(l).unwrap()["variant_id"]
            .as_str()
            .unwrap()
            .to_string()
    }));
    let withheld: Vec<String> = ids.split_off(ids.len() - 3);
    let preds: String = ids
        .iter()
        .map(|id| format!("{{\"id\":\"{id}\",\"predicted_label\":\"vulnerable\",\"detector_id\":\"stub\"}}\n"))
        .collect();
    std::fs::write(tmp.path().join("preds.jsonl"), preds).unwrap();
    let out = viperkit(
        tmp.path(),
        &["evaluate", "--corpus", "corpus", "--predictions", "preds.jsonl"],
        &[],
    );
    assert!(!out.status.success());
    let text = stderr(&out);
    for id in &withheld {
        assert!(text.contains(id.as_str()), "missing id {id} not listed in: {text}");
    }
    assert!(text.contains("3 predictions missing"), "{text}");
}

#[test]
fn evaluate_writes_reports_and_report_rerenders_them() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path());
    assert!(viperkit(tmp.path(), &["perturb", "--corpus", "corpus"], &[]).status.success());
    let out = viperkit(
        tmp.path(),
        &["evaluate", "--corpus", "corpus", "--reference", "oracle", "--format", "json"],
        &[],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(tmp.path().join("corpus/variants/report.json").exists());
    assert!(tmp.path().join("corpus/variants/report.txt").exists());

    let rendered = viperkit(
        tmp.path(),
        &["report", "corpus/variants/report.json", "--format", "table"],
        &[],
    );
    assert!(rendered.status.success(), "{}", stderr(&rendered));
    assert!(stdout(&rendered).contains("detector: oracle"), "{}", stdout(&rendered));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("viperkit.conf"),
        "out = confdir\nseed = 9\nper_feature = 1\n",
    )
    .unwrap();
    let conf = tmp.path().join("viperkit.conf");
    let conf = conf.to_str().unwrap();

    // config alone: writes 20 samples into confdir
    let out = viperkit(tmp.path(), &["gen-corpus"], &[("VIPERKIT_CONFIG", conf)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("wrote 20 samples"), "{}", stdout(&out));
    assert!(tmp.path().join("confdir/manifest.jsonl").exists());

    // flag overrides the configured output directory
    let out = viperkit(
        tmp.path(),
        &["gen-corpus", "--out", "flagdir"],
        &[("VIPERKIT_CONFIG", conf)],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(tmp.path().join("flagdir/manifest.jsonl").exists());
}

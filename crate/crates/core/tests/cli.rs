mod common;

use std::path::Path;
use std::process::{Command, Output};

fn abcforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abcforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn help_lists_every_subcommand() {
    let out = abcforge(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in [
        "validate",
        "stats",
        "degrade",
        "build-dataset",
        "pair",
        "fmd",
        "ppl",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from help");
        assert!(abcforge(&[cmd, "--help"]).status.success());
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(abcforge(&[]).status.code(), Some(2));
    assert_eq!(abcforge(&["frobnicate"]).status.code(), Some(2));
    let tunes = common::fixture("tunes.abc");
    // --seed is mandatory for anything random
    assert_eq!(abcforge(&["degrade", path(&tunes)]).status.code(), Some(2));
    let bad_p = abcforge(&["degrade", path(&tunes), "--seed", "1", "--p", "1.5"]);
    assert_eq!(bad_p.status.code(), Some(2));
}

#[test]
fn validate_reports_and_sets_exit_code() {
    let ok = abcforge(&["validate", path(&common::fixture("tunes.abc"))]);
    assert_eq!(ok.status.code(), Some(0));
    let report = stdout_json(&ok);
    assert_eq!(report["tunes"], 60);
    assert_eq!(report["valid"], 60);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.abc");
    std::fs::write(&bad, "X:1\nK:C\nCDEF|\n\nX:2\nT:no key\n").unwrap();
    let out = abcforge(&["validate", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["invalid"], 1);
    assert_eq!(
        abcforge(&["validate", "/no/such/file.abc"]).status.code(),
        Some(1)
    );
}

#[test]
fn degrade_is_deterministic_and_independent_of_jobs() {
    let tunes = common::fixture("tunes.abc");
    let args = |jobs: &'static str| {
        vec![
            "degrade",
            path(&tunes),
            "--seed",
            "42",
            "--p",
            "0.1",
            "--b-max",
            "4",
            "--jobs",
            jobs,
        ]
    };
    let a = abcforge(&args("1"));
    let b = abcforge(&args("1"));
    let c = abcforge(&args("8"));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let other_seed = abcforge(&["degrade", path(&tunes), "--seed", "43"]);
    assert_ne!(a.stdout, other_seed.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(abcforge::abc::split_tunes(&text).len(), 60);
}

#[test]
fn build_dataset_writes_all_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("fx");
    let run = |jobs: &str, prefix: &Path| {
        abcforge(&[
            "build-dataset",
            "--mapping",
            path(&common::fixture("run.toml")),
            "--seed",
            "42",
            "--jobs",
            jobs,
            "--out",
            path(prefix),
        ])
    };
    let out = run("8", &prefix);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = stdout_json(&out);
    assert_eq!(summary["ingested"], 75);
    for suffix in [
        ".sft.jsonl",
        ".dpo.jsonl",
        ".filtered.jsonl",
        ".rejected.jsonl",
    ] {
        assert!(dir.path().join(format!("fx{suffix}")).exists(), "{suffix}");
    }
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("run_manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["run"]["config"]["degradation"]["seed"], 42);
    assert_eq!(
        manifest["run"]["config"]["degradation"]["swap_probability"],
        0.1
    );

    let single = dir.path().join("single");
    assert!(run("1", &single).status.success());
    for suffix in [".sft.jsonl", ".dpo.jsonl"] {
        assert_eq!(
            std::fs::read(dir.path().join(format!("fx{suffix}"))).unwrap(),
            std::fs::read(dir.path().join(format!("single{suffix}"))).unwrap()
        );
    }
    assert_eq!(
        std::fs::read_to_string(dir.path().join("fx.dpo.jsonl")).unwrap(),
        std::fs::read_to_string(common::golden("fixture.seed42.dpo.jsonl")).unwrap()
    );
}

#[test]
fn pair_matches_build_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("pairs.dpo.jsonl");
    let out = abcforge(&[
        "pair",
        path(&common::golden("fixture.sft.jsonl")),
        "--seed",
        "42",
        "--out",
        path(&out_path),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        std::fs::read_to_string(&out_path).unwrap(),
        std::fs::read_to_string(common::golden("fixture.seed42.dpo.jsonl")).unwrap()
    );
}

#[test]
fn stats_by_split_matches_golden() {
    let out = abcforge(&[
        "stats",
        "--by-split",
        path(&common::golden("fixture.sft.jsonl")),
    ]);
    assert!(out.status.success());
    let got = stdout_json(&out);
    let want: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(common::golden("fixture_stats.json")).unwrap(),
    )
    .unwrap();
    let table = got["table"].as_object().unwrap();
    let names: Vec<&str> = table.keys().map(String::as_str).collect();
    let mut expected = abcforge::stats::ROW_NAMES.to_vec();
    expected.sort();
    assert_eq!(names, expected);
    for (row, cols) in want["table"].as_object().unwrap() {
        for col in ["short", "long"] {
            let (g, w) = (
                table[row][col].as_f64().unwrap(),
                cols[col].as_f64().unwrap(),
            );
            assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0), "{row}/{col}");
        }
    }

    let table_out = abcforge(&[
        "stats",
        "--by-split",
        "--format",
        "table",
        path(&common::golden("fixture.sft.jsonl")),
    ]);
    let text = String::from_utf8(table_out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    for (line, name) in lines[1..].iter().zip(abcforge::stats::ROW_NAMES) {
        assert!(line.starts_with(name));
    }
}

#[test]
fn fmd_prints_golden_distance() {
    let out = abcforge(&[
        "fmd",
        path(&common::fixture("ref.emb")),
        path(&common::fixture("cand.emb")),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["fmd"].as_f64().unwrap() - 1.7372475115842985).abs() < 1e-6);
    assert_eq!(v["dim"], 8);
    let mismatch_dir = tempfile::tempdir().unwrap();
    let one_d = mismatch_dir.path().join("one.emb");
    std::fs::write(&one_d, "dim=1 count=2\n0.0\n1.0\n").unwrap();
    let bad = abcforge(&["fmd", path(&common::fixture("ref.emb")), path(&one_d)]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn ppl_prints_perplexity() {
    let out = abcforge(&["ppl", path(&common::fixture("loglik.jsonl"))]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["perplexity"].as_f64().unwrap() - 1.7573962998035932).abs() < 1e-12);
    assert_eq!(v["tokens"], 127);
}

#[test]
fn out_flag_refuses_to_overwrite_input() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("t.abc");
    std::fs::copy(common::fixture("tunes.abc"), &copy).unwrap();
    let out = abcforge(&["degrade", path(&copy), "--seed", "1", "--out", path(&copy)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        std::fs::read(&copy).unwrap(),
        std::fs::read(common::fixture("tunes.abc")).unwrap()
    );
}

use std::fs;
use std::path::Path;
use std::process::Command;

use chemtext::cli::{run, ExitStatus};

fn call(args: &[&str], stdin: &str) -> (ExitStatus, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["chemtext"];
    argv.extend_from_slice(args);
    let status = run(argv, stdin.as_bytes(), &mut out, &mut err);
    (status, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn canonicalize_lines() {
    let (s, out, _) = call(&["canonicalize"], "OCC\nC(C)O\nC1CC\n");
    assert_eq!(s, ExitStatus::Success);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], lines[1]);
    assert!(lines[2].starts_with("INVALID "));

    let (s, _, _) = call(&["canonicalize"], "C1CC\n[Xx]\n");
    assert_eq!(s, ExitStatus::Data);
}

#[test]
fn similarity_and_fingerprint() {
    let (s, out, _) = call(&["similarity", "CCO", "OCC"], "");
    assert_eq!(s, ExitStatus::Success);
    assert_eq!(out.trim(), "1.000000");

    let (s, out, _) = call(&["fingerprint", "--scheme", "keys"], "C\n");
    assert_eq!(s, ExitStatus::Success);
    assert_eq!(out.trim(), "keys 166 159");

    let (s, _, err) = call(&["similarity", "CCO", "C1CC"], "");
    assert_eq!(s, ExitStatus::Data);
    assert!(err.contains("C1CC"));
}

#[test]
fn usage_errors() {
    assert_eq!(call(&[], "").0, ExitStatus::Usage);
    assert_eq!(call(&["frobnicate"], "").0, ExitStatus::Usage);
    assert_eq!(call(&["evaluate", "--task", "retro", "--predictions", "p.jsonl"], "").0, ExitStatus::Usage);
    assert_eq!(call(&["fingerprint", "--scheme", "ecfp"], "").0, ExitStatus::Usage);
    assert_eq!(call(&["--help"], "").0, ExitStatus::Success);
}

#[test]
fn build_dataset_mixes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let fwd = write(
        dir.path(),
        "fwd.jsonl",
        "{\"task\":\"forward\",\"source\":\"CC.O\",\"target\":\"CCO\"}\n{\"task\":\"forward\",\"source\":\"C.N\",\"target\":\"CN\"}\n",
    );
    let m2t = write(
        dir.path(),
        "m2t.jsonl",
        &(0..5)
            .map(|i| format!("{{\"task\":\"mol2text\",\"source\":\"C{i}\",\"target\":\"caption {i}\"}}\n"))
            .collect::<String>(),
    );
    let out1 = dir.path().join("a.jsonl");
    let out2 = dir.path().join("b.jsonl");
    for out in [&out1, &out2] {
        let (s, stdout, err) = call(
            &[
                "build-dataset",
                "--task-file",
                &format!("forward={fwd}"),
                "--task-file",
                &format!("mol2text={m2t}"),
                "--per-task",
                "3",
                "--seed",
                "7",
                "--out",
                out.to_str().unwrap(),
            ],
            "",
        );
        assert_eq!(s, ExitStatus::Success, "{err}");
        assert_eq!(stdout, "forward\t3\nmol2text\t3\n");
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
    assert_eq!(fs::read_to_string(&out1).unwrap().lines().count(), 6);

    let bad = write(dir.path(), "bad.jsonl", "{\"task\":\"forward\",\"source\":\"C\",\"target\":\"C\"}\nnot json\n");
    let (s, _, err) = call(
        &["build-dataset", "--task-file", &format!("forward={bad}"), "--per-task", "1", "--out", out1.to_str().unwrap()],
        "",
    );
    assert_eq!(s, ExitStatus::Data);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn evaluate_text2mol_and_retro() {
    let dir = tempfile::tempdir().unwrap();
    let preds = write(
        dir.path(),
        "t2m.jsonl",
        "{\"id\":1,\"task\":\"text2mol\",\"prediction\":\"OCC\",\"reference\":\"CCO\"}\n\
         {\"id\":2,\"task\":\"text2mol\",\"prediction\":\"C1CC\",\"reference\":\"CCN\"}\n",
    );
    let (s, out, err) = call(&["evaluate", "--task", "text2mol", "--predictions", &preds], "");
    assert_eq!(s, ExitStatus::Success, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["metrics"]["accuracy"]["value"].as_f64().unwrap(), 0.5);
    assert_eq!(v["metrics"]["validity"]["value"].as_f64().unwrap(), 0.5);
    assert_eq!(v["n_total"], 2);

    let table = write(dir.path(), "oracle.tsv", "CC.O\tCCO\nC.N\tCN\n");
    let retro = write(
        dir.path(),
        "retro.jsonl",
        "{\"id\":\"a\",\"task\":\"retro\",\"prediction\":\"O.CC\",\"reference\":\"CCO\"}\n\
         {\"id\":\"b\",\"task\":\"retro\",\"prediction\":\"C.N\",\"reference\":\"CCN\"}\n",
    );
    let oracle = format!("lookup:{table}");
    let (s, out, err) = call(&["evaluate", "--task", "retro", "--predictions", &retro, "--oracle", &oracle], "");
    assert_eq!(s, ExitStatus::Success, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["metrics"]["roundtrip_accuracy"]["value"].as_f64().unwrap(), 0.5);

    let (s, _, _) = call(&["evaluate", "--task", "retro", "--predictions", &retro, "--oracle", "rdkit"], "");
    assert_eq!(s, ExitStatus::Usage);
    let (s, _, _) = call(&["evaluate", "--task", "forward", "--predictions", "/nonexistent/p.jsonl"], "");
    assert_eq!(s, ExitStatus::Data);
}

#[test]
fn merge_demo_on_shipped_files() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/merge_demo/");
    let (s, out, err) = call(
        &["merge-demo", &format!("{data}h_t.txt"), &format!("{data}h_m.txt"), &format!("{data}params.txt")],
        "",
    );
    assert_eq!(s, ExitStatus::Success, "{err}");
    let body: String = out.lines().skip(1).take(4).map(|l| format!("{l}\n")).collect();
    let m = chemtext::merge::Matrix::parse(&body).unwrap();
    assert_eq!(m.shape(), (3, 3));
    let gc = out.lines().last().unwrap();
    let err: f64 = gc.split_whitespace().nth(1).unwrap().trim_start_matches("max_rel_error=").parse().unwrap();
    assert!(err < 1e-4, "{gc}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_chemtext");
    let out = Command::new(bin).args(["similarity", "c1ccccc1", "c1ccc(cc1)"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1.000000");
    let out = Command::new(bin).arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn evaluate_data_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let preds = write(
        dir.path(),
        "p.jsonl",
        "{\"id\":1,\"task\":\"forward\",\"prediction\":\"CCO\",\"reference\":\"OCC\"}\n{\"id\":2,\"task\":\n",
    );
    let (s, _, err) = call(&["evaluate", "--task", "forward", "--predictions", &preds], "");
    assert_eq!(s, ExitStatus::Data);
    assert!(err.contains("line 2"), "{err}");

    let mixed = write(
        dir.path(),
        "m.jsonl",
        "{\"id\":1,\"task\":\"forward\",\"prediction\":\"CCO\",\"reference\":\"OCC\"}\n\
         {\"id\":2,\"task\":\"retro\",\"prediction\":\"CCO\",\"reference\":\"OCC\"}\n",
    );
    assert_eq!(call(&["evaluate", "--task", "forward", "--predictions", &mixed], "").0, ExitStatus::Data);

    let all_right = write(
        dir.path(),
        "ok.jsonl",
        "{\"id\":1,\"task\":\"text2mol\",\"prediction\":\"CCO\",\"reference\":\"OCC\"}\n",
    );
    let (s, out, _) = call(&["evaluate", "--task", "text2mol", "--predictions", &all_right], "");
    assert_eq!(s, ExitStatus::Success);
    assert!(out.contains("\"accuracy\":{\"support\":1,\"value\":1.000000}"), "{out}");
}

#[test]
fn build_dataset_per_task_ten() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.jsonl", "{\"task\":\"retro\",\"source\":\"CCO\",\"target\":\"CC.O\"}\n");
    let b = write(dir.path(), "b.jsonl", "{\"task\":\"text2mol\",\"source\":\"ethanol\",\"target\":\"CCO\"}\n");
    let out = dir.path().join("out.jsonl");
    let base = ["build-dataset", "--task-file", &format!("retro={a}"), "--task-file", &format!("text2mol={b}"), "--per-task", "10"];
    let mut with_out = base.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    assert_eq!(call(&with_out, "").0, ExitStatus::Success);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 20);
    assert_eq!(call(&base, "").0, ExitStatus::Usage);
}

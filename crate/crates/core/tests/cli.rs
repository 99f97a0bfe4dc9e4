use std::path::Path;
use std::process::{Command, Output};

fn rpsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpsynth"))
        .args(args)
        .env_remove("RPSYNTH_SOLVER")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const COPY: &str = "inputs: in; outputs: out; spec: G(in <-> out);";

#[test]
fn synth_prints_verified_program() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "copy.ltl", COPY);
    let out = rpsynth(&["synth", "--spec", &spec, "--vars", "2", "--max-nodes", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("# 6 nodes"), "{stdout}");
    assert!(stdout.contains("out = in"), "{stdout}");

    let program = write(
        dir.path(),
        "copy.prog",
        stdout.lines().skip(1).collect::<Vec<_>>().join("\n").as_str(),
    );
    let out = rpsynth(&["verify", "--program", &program, "--spec", &spec]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));
}

#[test]
fn synth_reports_unrealizable_with_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "ahead.ltl",
        "inputs: in; outputs: out; spec: G(out <-> X in);",
    );
    let out = rpsynth(&[
        "synth",
        "--spec",
        &spec,
        "--vars",
        "2",
        "--max-nodes",
        "5",
        "--solver",
        "internal",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("UNREALIZABLE"));
}

#[test]
fn verify_prints_counterexample_lasso() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "copy.ltl", COPY);
    let program = write(dir.path(), "neg.prog", "while (tt) { out = !in; InOut }");
    let out = rpsynth(&["verify", "--program", &program, "--spec", &spec]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("FAIL"), "{stdout}");
    assert!(stdout.contains("cycle:"), "{stdout}");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.ltl", "inputs: in; spec: G(;");
    let out = rpsynth(&["synth", "--spec", &spec, "--vars", "2", "--max-nodes", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = rpsynth(&["synth", "--spec", "/nonexistent.ltl", "--vars", "2", "--max-nodes", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let spec = write(dir.path(), "copy.ltl", COPY);
    let out = rpsynth(&[
        "synth",
        "--spec",
        &spec,
        "--vars",
        "2",
        "--max-nodes",
        "3",
        "--solver",
        "bogus",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = rpsynth(&[
        "synth",
        "--spec",
        &spec,
        "--vars",
        "2",
        "--max-nodes",
        "3",
        "--encoding",
        "nope",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dump_dir_receives_dimacs_that_solves_identically() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "copy.ltl", COPY);
    let dump = dir.path().join("dump");
    let out = rpsynth(&[
        "synth",
        "--spec",
        &spec,
        "--vars",
        "2",
        "--max-nodes",
        "6",
        "--dump-dir",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for (n, expected) in [(5, 1), (6, 0)] {
        let cnf = dump.join(format!("direct-{n}.cnf"));
        assert!(dump.join(format!("direct-{n}.map")).exists());
        let out = rpsynth(&["solve-dimacs", cnf.to_str().unwrap(), "--solver", "internal"]);
        assert_eq!(out.status.code(), Some(expected), "{n} nodes");
    }
    assert!(dump.join("direct-6.structure").exists());
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "copy.ltl", COPY);
    let suite = write(
        dir.path(),
        "suite.toml",
        r#"
[[bench]]
name = "copy"
spec = "copy.ltl"
vars = 2
max_nodes = 8
encodings = ["direct"]
expected_nodes = 6
expected_additional = 0

[[bench]]
name = "missing"
spec = "missing.ltl"
vars = 2
max_nodes = 3
encodings = ["direct"]
"#,
    );
    let csv = dir.path().join("out.csv");
    let out = rpsynth(&["bench", "--suite", &suite, "--out", csv.to_str().unwrap()]);
    // The missing specification is reported but does not stop the suite.
    assert_eq!(out.status.code(), Some(3));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    let get = |row: &csv::StringRecord, col: &str| row[headers.iter().position(|h| h == col).unwrap()].to_string();
    assert_eq!(get(&rows[0], "status"), "realized");
    assert_eq!(get(&rows[0], "nodes"), "6");
    assert_eq!(get(&rows[0], "matches_expected"), "true");
    assert!(get(&rows[1], "status").starts_with("error"));
}

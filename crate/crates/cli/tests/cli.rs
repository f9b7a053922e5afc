use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn exfl(args: &[&str]) -> Output {
    exfl_env(args, &[])
}

fn exfl_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_exfl"));
    cmd.args(args).current_dir(fixtures()).env_remove("EXFL_FILTER_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn exfl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const MATH98: [&str; 7] = [
    "localize",
    "--trace",
    "math98/trace.txt",
    "--source-root",
    "math98/src",
    "--sbfl",
    "math98/sbfl.json",
];

#[test]
fn missing_trace_is_a_usage_error() {
    let o = exfl(&["localize", "--source-root", "math98/src"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--trace"));
    assert_eq!(exfl(&[]).status.code(), Some(1));
    assert_eq!(exfl(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    let o = exfl(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["localize", "sbfl", "rerank-ssfix", "evaluate", "dump-ast"] {
        assert!(stdout(&o).contains(sub), "{sub} missing from help");
    }
    assert_eq!(exfl(&["--version"]).status.code(), Some(0));
}

#[test]
fn malformed_inputs_exit_two_naming_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "no frames here\n").unwrap();
    let o = exfl(&["localize", "--trace", bad.to_str().unwrap(), "--source-root", "math98/src"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error: trace:"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let o = exfl(&["sbfl", "--spectrum", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: spectrum:"));

    let o = exfl(&["localize", "--trace", "math98/trace.txt", "--source-root", "math98/src", "--sbfl", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: sbfl:"));

    let o = exfl(&["localize", "--trace", "nowhere.txt", "--source-root", "math98/src"]);
    assert_eq!(o.status.code(), Some(2));

    let o = exfl(&["evaluate", "--rankings", "nameless", "--truth", "math98/truth.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_analyzer_is_an_input_error() {
    let mut args = MATH98.to_vec();
    args.extend(["--enable-analyzers", "aioobe,cce"]);
    let o = exfl(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: config:"));
}

#[test]
fn localize_is_deterministic() {
    let a = exfl(&MATH98);
    let b = exfl(&MATH98);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let entries = v.as_array().unwrap();
    let except = entries.iter().filter(|e| e["origin"] == "EXCEPT").count();
    assert_eq!(except, 6);
    assert_eq!(entries[0]["suspiciousness"], serde_json::json!(2.0));
    assert_eq!(entries[0]["guessed_faults"], serde_json::json!(["ARRAY_VARIABLE_WRONG"]));
    // SBFL entries at lines holding EXCEPT targets are collapsed
    let sbfl_lines: Vec<u64> = entries
        .iter()
        .filter(|e| e["origin"] == "SBFL")
        .map(|e| e["line"].as_u64().unwrap())
        .collect();
    assert!(!sbfl_lines.iter().any(|l| [32, 33, 38].contains(l)));
    assert_eq!(sbfl_lines.len(), 10);
}

#[test]
fn disabling_the_analyzer_falls_back() {
    let mut args = MATH98.to_vec();
    args.extend(["--enable-analyzers", "npe,iae"]);
    let o = exfl(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(o.stdout, std::fs::read(fixtures().join("math98/sbfl.json")).unwrap());
    assert!(stderr(&o).contains("WARN localize:"));
}

#[test]
fn fallback_without_sbfl_emits_an_empty_ranking() {
    let o = exfl(&["localize", "--trace", "math98/trace.txt", "--source-root", "math98/src", "--enable-analyzers", "npe"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[]\n");
}

#[test]
fn table_format() {
    let mut args = MATH98.to_vec();
    args.extend(["--format", "table"]);
    let o = exfl(&args);
    let out = stdout(&o);
    assert!(out.starts_with("RANK"));
    assert!(out.contains("WRONG_ARRAY_INITIALIZATION"));
}

#[test]
fn quiet_suppresses_warnings() {
    let mut args = MATH98.to_vec();
    args.extend(["--enable-analyzers", "npe", "-q"]);
    let o = exfl(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).is_empty());
}

#[test]
fn filter_config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("filter.toml");
    // treating the package as a library leaves no application frame
    std::fs::write(&cfg, "excluded_packages = [\"org.apache.commons.math\"]\n").unwrap();
    let o = exfl_env(&MATH98, &[("EXFL_FILTER_CONFIG", cfg.to_str().unwrap())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(o.stdout, std::fs::read(fixtures().join("math98/sbfl.json")).unwrap());

    std::fs::write(&cfg, "excluded_packages = [").unwrap();
    let o = exfl_env(&MATH98, &[("EXFL_FILTER_CONFIG", cfg.to_str().unwrap())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: config:"));
}

#[test]
fn sbfl_subcommand_reproduces_the_fixture_ranking() {
    let o = exfl(&["sbfl", "--spectrum", "math98/spectrum.txt"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(o.stdout, std::fs::read(fixtures().join("math98/sbfl.json")).unwrap());
}

#[test]
fn rerank_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let ssfix = dir.path().join("ssfix.json");
    let except = dir.path().join("except.json");
    let report = dir.path().join("report.csv");
    let o = exfl(&[
        "rerank-ssfix",
        "--ranking",
        "chart4/sbfl.json",
        "--trace",
        "chart4/trace.txt",
        "--source-root",
        "chart4/src",
        "--out",
        ssfix.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = exfl(&[
        "localize",
        "--trace",
        "chart4/trace.txt",
        "--source-root",
        "chart4/src",
        "--sbfl",
        "chart4/sbfl.json",
        "--out",
        except.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rankings = format!("ochiai=chart4/sbfl.json,ssfix={},except={}", ssfix.display(), except.display());
    let o = exfl(&["evaluate", "--rankings", &rankings, "--truth", "chart4/truth.json", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "fault_id,file,line,position_ochiai,position_ssfix,position_except,probability_ochiai,probability_ssfix,probability_except"
    );
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&cells[..3], ["Chart-4", "org/jfree/chart/plot/XYPlot.java", "58"]);
    assert_eq!(cells[4], "1.00");
    assert_eq!(cells[5], "1.00");
    assert_eq!(cells[7], "n/a");
}

#[test]
fn dump_ast_matches_golden() {
    let file = "math98/src/org/apache/commons/math/linear/BigMatrixImpl.java";
    let golden = std::fs::read_to_string(fixtures().join("math98/ast.golden")).unwrap();
    let o = exfl(&["dump-ast", file]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden);
    assert_eq!(stdout(&exfl(&["--dump-ast", file])), golden);
    let plain = stdout(&exfl(&["dump-ast", "--no-lines", file]));
    assert!(!plain.contains(" @"));
    assert!(plain.contains("(method BigDecimal[] operate"));
}

#[test]
fn library_entry_point() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = exfl_cli::run_with(["exfl", "--version"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().starts_with("exfl "));
}

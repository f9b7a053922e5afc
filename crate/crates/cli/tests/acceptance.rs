//! Acceptance criteria 1-10. Runs without the libtest harness and prints one
//! `criterion N: PASS|FAIL` line per criterion; exits non-zero if any fails.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use exfl_core::eval::{position, probability, EvalError, FaultLocation, Position};
use exfl_core::ranking::{assign_suspiciousness, merge, ranking_from_json, MAX_EXCEPT_TARGETS};
use exfl_core::sbfl::{ochiai, ssfix_rerank, CoverageSpectrum, Outcome, TestRun};
use exfl_core::source_model::parse_expression;
use exfl_core::{GuessedFault, Origin, Ranking, RelevantStatement, RepairTarget, Score, StatementId, SuspiciousLocation};

type Check = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn exfl(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_exfl"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("EXFL_FILTER_CONFIG")
        .output()
        .expect("spawn exfl");
    (out, start.elapsed())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Runs `localize` on a fixture with its SBFL ranking and returns the parsed
/// output ranking plus the wall time.
fn localize_fixture(name: &str) -> Result<(Ranking, Duration), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("rank.json");
    let (o, t) = exfl(&[
        "localize",
        "--trace",
        &format!("{name}/trace.txt"),
        "--source-root",
        &format!("{name}/src"),
        "--sbfl",
        &format!("{name}/sbfl.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    ensure(
        o.status.code() == Some(0),
        format!("exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)),
    )?;
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    Ok((ranking_from_json(&text).map_err(|e| e.to_string())?, t))
}

fn except_summary(r: &Ranking) -> Vec<(u32, String, Vec<GuessedFault>)> {
    r.entries
        .iter()
        .filter(|e| e.origin == Origin::Except)
        .map(|e| {
            (
                e.location.line,
                e.expression.as_ref().map(|x| x.render()).unwrap_or_default(),
                e.guessed_faults.clone(),
            )
        })
        .collect()
}

fn expect_targets(r: &Ranking, expected: &[(u32, &str, &[GuessedFault])]) -> Result<(), String> {
    let got = except_summary(r);
    let want: Vec<(u32, String, Vec<GuessedFault>)> = expected
        .iter()
        .map(|(l, x, g)| (*l, x.to_string(), g.to_vec()))
        .collect();
    ensure(got == want, format!("EXCEPT targets differ: got {got:?}"))
}

fn expect_position(r: &Ranking, file: &str, line: u32, want: f64) -> Result<(), String> {
    let p = position(r, &FaultLocation { file: file.into(), line });
    ensure(p == Position::At(want), format!("line {line} at position {p}, expected {want:.2}"))
}

fn fast(t: Duration) -> Result<(), String> {
    ensure(t < Duration::from_secs(1), format!("took {t:?}"))
}

use GuessedFault::*;

fn criterion_1() -> Check {
    let (r, t) = localize_fixture("math98")?;
    expect_targets(
        &r,
        &[
            (38, "out", &[ArrayVariableWrong]),
            (38, "out[row] = sum", &[MissingConditional]),
            (32, "new BigDecimal[v.length]", &[WrongArrayInitialization]),
            (32, "v.length", &[WrongVariableValue]),
            (38, "row", &[IndexExpressionWrong]),
            (33, "0", &[WrongVariableValue]),
        ],
    )?;
    expect_position(&r, "org/apache/commons/math/linear/BigMatrixImpl.java", 32, 2.0)?;
    fast(t)?;
    Ok(format!("6 EXCEPT targets, allocation at 2.00, {t:?}"))
}

fn criterion_2() -> Check {
    let (r, t) = localize_fixture("lang45")?;
    let targets = except_summary(&r);
    ensure(targets.len() == 8, format!("{} EXCEPT targets, expected 8", targets.len()))?;
    let mc = targets.iter().filter(|(_, _, g)| g.contains(&MissingConditional)).count();
    ensure(mc >= 1, "no MISSING_CONDITIONAL target")?;
    fast(t)?;
    Ok(format!("8 EXCEPT targets, {mc} with MISSING_CONDITIONAL, {t:?}"))
}

fn criterion_3() -> Check {
    let (r, t) = localize_fixture("chart4")?;
    expect_targets(
        &r,
        &[
            (58, "r", &[ObjectVariableWrong]),
            (58, "c = r.getAnnotations()", &[MissingConditional]),
            (50, "getRendererForDataset(d)", &[WrongValue, MissingConditional]),
        ],
    )?;
    expect_position(&r, "org/jfree/chart/plot/XYPlot.java", 58, 1.0)?;
    fast(t)?;
    Ok(format!("3 EXCEPT targets, dereference at 1.00, {t:?}"))
}

fn criterion_4() -> Check {
    let (r, t) = localize_fixture("chart17")?;
    expect_targets(
        &r,
        &[
            (23, "createCopy(0, getItemCount() - 1)", &[WrongMethodInvoked]),
            (23, "0", &[WrongParameter]),
            (23, "getItemCount() - 1", &[WrongParameter]),
            (23, "getItemCount()", &[WrongParameter]),
        ],
    )?;
    expect_position(&r, "org/jfree/data/time/TimeSeries.java", 23, 1.0)?;
    fast(t)?;
    Ok(format!("4 EXCEPT targets, call site at 1.00, {t:?}"))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn location(k: usize) -> SuspiciousLocation {
    SuspiciousLocation {
        statement: StatementId::new("A.java", k as u32 + 1, 0),
        expression: parse_expression("A.java", &format!("v{k}")).unwrap(),
        guessed_faults: vec![WrongVariableValue],
        source_relevant_statement_depth: 0,
    }
}

fn criterion_5() -> Check {
    // the oracle writes the schedule as decimal text: 2.00, 1.95, ...
    let oracle = |k: usize| -> f64 {
        let hundredths = 200 - 5 * k;
        format!("{}.{:02}", hundredths / 100, hundredths % 100).parse().unwrap()
    };
    runner(256)
        .run(&(0usize..=40), |n| {
            let locs: Vec<SuspiciousLocation> = (0..n).map(location).collect();
            let targets = assign_suspiciousness(&locs);
            if targets.len() != n.min(MAX_EXCEPT_TARGETS) {
                return Err(fail(format!("{n} locations gave {} targets", targets.len())));
            }
            for (k, t) in targets.iter().enumerate() {
                if t.suspiciousness != Score::Value(oracle(k)) || t.origin != Origin::Except {
                    return Err(fail(format!("target {k} has {}", t.suspiciousness)));
                }
            }
            if n >= MAX_EXCEPT_TARGETS && targets[19].suspiciousness != Score::Value(1.05) {
                return Err(fail("20th target is not 1.05".into()));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("256 random lists of 0-40 locations match the schedule".into())
}

#[derive(Debug, Clone)]
struct MergeCase {
    except: Vec<(u32, u8, Vec<GuessedFault>)>,
    sbfl: Vec<(u32, f64)>,
}

fn merge_case() -> impl Strategy<Value = MergeCase> {
    let fault = prop::sample::select(GuessedFault::ALL.to_vec());
    (
        prop::collection::vec((1u32..30, 0u8..3, prop::collection::vec(fault, 1..3)), 0..25),
        prop::collection::vec((1u32..40, 0.0f64..=1.0), 0..40),
    )
        .prop_map(|(except, sbfl)| MergeCase { except, sbfl })
}

fn criterion_6() -> Check {
    runner(200)
        .run(&merge_case(), |c| {
            let locs: Vec<SuspiciousLocation> = c
                .except
                .iter()
                .map(|(line, x, g)| SuspiciousLocation {
                    statement: StatementId::new("A.java", *line, 0),
                    expression: parse_expression("A.java", &format!("e{x}")).unwrap(),
                    guessed_faults: g.clone(),
                    source_relevant_statement_depth: 0,
                })
                .collect();
            let except = assign_suspiciousness(&locs);
            let sbfl: Vec<RepairTarget> = c
                .sbfl
                .iter()
                .map(|(l, s)| RepairTarget::sbfl(StatementId::new("A.java", *l, 0), *s))
                .collect();
            let merged = merge(&except, &sbfl).map_err(|e| fail(e.to_string()))?;

            let first_sbfl = merged.entries.iter().position(|e| e.origin == Origin::Sbfl);
            let last_except = merged.entries.iter().rposition(|e| e.origin == Origin::Except);
            if let (Some(f), Some(l)) = (first_sbfl, last_except) {
                if l > f {
                    return Err(fail(format!("EXCEPT entry at {l} after SBFL entry at {f}")));
                }
            }
            let mut keys = HashSet::new();
            for e in &merged.entries {
                let key = (e.location.clone(), e.expression.as_ref().map(|x| x.render()));
                if !keys.insert(key) {
                    return Err(fail(format!("duplicate entry {}", e.location)));
                }
            }
            let except_lines: HashSet<u32> = except.iter().map(|e| e.location.line).collect();
            for e in merged.entries.iter().filter(|e| e.origin == Origin::Sbfl) {
                if except_lines.contains(&e.location.line) {
                    return Err(fail(format!("SBFL entry {} kept next to an EXCEPT target", e.location)));
                }
            }
            // every fault guessed for a (statement, expression) survives the collapse
            for t in &except {
                let kept = merged
                    .entries
                    .iter()
                    .find(|e| e.origin == Origin::Except && e.location == t.location && e.expression == t.expression)
                    .ok_or_else(|| fail(format!("EXCEPT target {} lost", t.location)))?;
                if !t.guessed_faults.iter().all(|g| kept.guessed_faults.contains(g)) {
                    return Err(fail(format!("faults of {} lost in the collapse", t.location)));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("200 random merges, zero violations".into())
}

fn spectrum_case() -> impl Strategy<Value = CoverageSpectrum> {
    (1usize..=15, 1usize..=10).prop_flat_map(|(m, n)| {
        prop::collection::vec((any::<bool>(), prop::collection::vec(any::<bool>(), m)), n).prop_map(move |tests| {
            let statements = (0..m).map(|i| StatementId::new("S.java", i as u32 + 1, 0)).collect();
            let tests = tests
                .into_iter()
                .enumerate()
                .map(|(k, (failed, cov))| TestRun {
                    id: format!("t{k}"),
                    outcome: if failed { Outcome::Fail } else { Outcome::Pass },
                    covered: cov.iter().enumerate().filter(|(_, c)| **c).map(|(i, _)| i).collect(),
                })
                .collect();
            CoverageSpectrum::new(statements, tests).unwrap()
        })
    })
}

fn criterion_7() -> Check {
    runner(500)
        .run(&spectrum_case(), |s| {
            let r = ochiai(&s).map_err(|e| fail(e.to_string()))?;
            if r.len() != s.statements.len() {
                return Err(fail("ranking does not cover every statement".into()));
            }
            for (i, id) in s.statements.iter().enumerate() {
                let (mut ef, mut ep, mut nf) = (0.0f64, 0.0f64, 0.0f64);
                for t in &s.tests {
                    let covers = t.covered.contains(&i);
                    match (t.outcome, covers) {
                        (Outcome::Fail, true) => ef += 1.0,
                        (Outcome::Fail, false) => nf += 1.0,
                        (Outcome::Pass, true) => ep += 1.0,
                        (Outcome::Pass, false) => {}
                    }
                }
                let want = if ef == 0.0 { 0.0 } else { ef / ((ef + nf) * (ef + ep)).sqrt() };
                let got = r
                    .entries
                    .iter()
                    .find(|e| &e.location == id)
                    .and_then(|e| e.suspiciousness.value())
                    .ok_or_else(|| fail(format!("{id} missing")))?;
                if (got - want).abs() > 1e-12 {
                    return Err(fail(format!("{id}: {got} vs oracle {want}")));
                }
                if ef == 0.0 && got != 0.0 {
                    return Err(fail(format!("{id} never covered by a failing test but scores {got}")));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("500 random spectra agree with the brute-force oracle".into())
}

fn criterion_8() -> Check {
    let case = prop::collection::vec((1u32..20, 0.0f64..=2.0), 1..30);
    runner(200)
        .run(&case, |entries| {
            let ranking = Ranking::sorted(
                entries
                    .iter()
                    .enumerate()
                    .map(|(k, (line, s))| RepairTarget::sbfl(StatementId::new("P.java", *line, k as u32), *s))
                    .collect(),
            );
            let total: f64 = entries.iter().map(|(_, s)| s).sum();
            let lines: HashSet<u32> = entries.iter().map(|(l, _)| *l).collect();
            let mut sum = 0.0;
            for &line in &lines {
                let here: f64 = entries.iter().filter(|(l, _)| *l == line).map(|(_, s)| s).sum();
                let want = if total > 0.0 { here / total } else { 0.0 };
                let got = probability(&ranking, &FaultLocation { file: "P.java".into(), line })
                    .map_err(|e| fail(e.to_string()))?;
                if (got - want).abs() > 1e-12 {
                    return Err(fail(format!("line {line}: {got} vs oracle {want}")));
                }
                sum += got;
            }
            if total > 0.0 && (sum - 1.0).abs() > 1e-9 {
                return Err(fail(format!("probabilities sum to {sum}")));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let sbfl = vec![
        RepairTarget::sbfl(StatementId::new("app/A.java", 1, 0), 0.9),
        RepairTarget::sbfl(StatementId::new("app/A.java", 2, 0), 0.4),
    ];
    let frame = RelevantStatement {
        line: 2,
        class_name: "app.A".into(),
        method_name: "m".into(),
        file_name: "A.java".into(),
        stack_depth: 0,
    };
    let ssfix = ssfix_rerank(&sbfl, &[frame]);
    let got = probability(&ssfix, &FaultLocation { file: "app/A.java".into(), line: 2 });
    ensure(
        got == Err(EvalError::IncomparableSuspiciousness),
        format!("ssFix ranking gave {got:?}"),
    )?;
    Ok("200 random rankings match the oracle and sum to 1; ssFix rejected".into())
}

fn criterion_9() -> Check {
    let ranking = |scores: &[f64]| {
        Ranking::new(
            scores
                .iter()
                .enumerate()
                .map(|(i, s)| RepairTarget::sbfl(StatementId::new("T.java", i as u32 + 1, 0), *s))
                .collect(),
        )
    };
    let at = |line| FaultLocation { file: "T.java".into(), line };
    let two = ranking(&[0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.4, 0.1]);
    let three = ranking(&[0.9, 0.5, 0.5, 0.5, 0.2]);
    let p2 = position(&two, &at(7));
    let p3 = position(&three, &at(2));
    ensure(p2.to_string() == "6.50", format!("2-way tie gave {p2}"))?;
    ensure(p3.to_string() == "3.00", format!("3-way tie gave {p3}"))?;
    ensure(position(&two, &at(6)) == p2, "tied lines differ")?;
    Ok(format!("2-way tie {p2}, 3-way tie {p3}"))
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let traces = [
        (
            "unsupported",
            "java.lang.ClassCastException: java.lang.String\n\tat org.apache.commons.math.linear.BigMatrixImpl.operate(BigMatrixImpl.java:38)\n",
        ),
        (
            "filtered",
            "java.lang.ArrayIndexOutOfBoundsException: 2\n\tat java.util.ArrayList.get(ArrayList.java:411)\n\tat sun.reflect.NativeMethodAccessorImpl.invoke0(Native Method)\n\tat junit.framework.TestCase.runTest(TestCase.java:154)\n",
        ),
    ];
    let sbfl = fixtures().join("math98/sbfl.json");
    let input = std::fs::read(&sbfl).map_err(|e| e.to_string())?;
    for (name, trace) in traces {
        let tp = dir.path().join(format!("{name}.txt"));
        let out = dir.path().join(format!("{name}.json"));
        std::fs::write(&tp, trace).map_err(|e| e.to_string())?;
        let (o, _) = exfl(&[
            "localize",
            "--trace",
            tp.to_str().unwrap(),
            "--source-root",
            "math98/src",
            "--sbfl",
            sbfl.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        ensure(o.status.code() == Some(0), format!("{name}: exit {:?}", o.status.code()))?;
        let stderr = String::from_utf8_lossy(&o.stderr);
        ensure(stderr.contains("WARN localize:"), format!("{name}: no fallback warning in {stderr:?}"))?;
        let written = std::fs::read(&out).map_err(|e| e.to_string())?;
        ensure(written == input, format!("{name}: output differs from the input SBFL ranking"))?;
    }
    Ok("unsupported and fully filtered traces pass the SBFL ranking through byte for byte".into())
}

fn main() {
    // `cargo test -- <filter>` style arguments are accepted and ignored
    let criteria: [fn() -> Check; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        match c() {
            Ok(detail) => println!("criterion {}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

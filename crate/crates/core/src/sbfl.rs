//! Coverage spectra, the Ochiai ranking, and stack-trace promotion in the
//! style of ssFix.

use std::collections::HashSet;
use std::fmt;

use crate::ranking::{Ranking, RepairTarget, Score};
use crate::source_model::StatementId;
use crate::stacktrace::RelevantStatement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestRun {
    pub id: String,
    pub outcome: Outcome,
    /// Indices into [`CoverageSpectrum::statements`], sorted and distinct.
    pub covered: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageSpectrum {
    pub statements: Vec<StatementId>,
    pub tests: Vec<TestRun>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpectrumCounts {
    pub ef: u32,
    pub ep: u32,
    pub nf: u32,
    pub np: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectrumError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("the spectrum contains no tests")]
    EmptySpectrum,
}

impl CoverageSpectrum {
    /// Builds a spectrum, checking coverage indices and normalising them.
    pub fn new(statements: Vec<StatementId>, tests: Vec<TestRun>) -> Result<Self, SpectrumError> {
        let mut tests = tests;
        for (k, t) in tests.iter_mut().enumerate() {
            t.covered.sort_unstable();
            t.covered.dedup();
            if let Some(&bad) = t.covered.iter().find(|&&i| i >= statements.len()) {
                return Err(SpectrumError::Syntax {
                    line: k + 2,
                    message: format!("test `{}` covers unknown statement index {bad}", t.id),
                });
            }
        }
        Ok(Self { statements, tests })
    }

    /// Parses the text format: line 1 lists statement ids `file:line[:ordinal]`;
    /// each further line is `<test-id> <PASS|FAIL> <idx,idx,...>` with 0-based
    /// indices into line 1. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, SpectrumError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let Some((hdr_no, header)) = lines.next() else {
            return Err(SpectrumError::EmptySpectrum);
        };
        let statements = header
            .split_whitespace()
            .map(|s| {
                s.parse::<StatementId>().map_err(|e| SpectrumError::Syntax {
                    line: hdr_no,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut tests = Vec::new();
        for (no, l) in lines {
            let syntax = |message: String| SpectrumError::Syntax { line: no, message };
            let mut parts = l.split_whitespace();
            let id = parts.next().expect("non-empty line").to_string();
            let outcome = match parts.next() {
                Some("PASS") => Outcome::Pass,
                Some("FAIL") => Outcome::Fail,
                Some(o) => return Err(syntax(format!("outcome `{o}` is neither PASS nor FAIL"))),
                None => return Err(syntax(format!("test `{id}` has no outcome"))),
            };
            let covered = match parts.next() {
                None | Some("-") => Vec::new(),
                Some(list) => list
                    .split(',')
                    .filter(|x| !x.is_empty())
                    .map(|x| {
                        x.parse::<usize>()
                            .map_err(|_| syntax(format!("bad statement index `{x}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            if let Some(extra) = parts.next() {
                return Err(syntax(format!("unexpected `{extra}`")));
            }
            let covered_ok = covered.iter().all(|&i| i < statements.len());
            if !covered_ok {
                return Err(syntax(format!("test `{id}` covers an index beyond {}", statements.len())));
            }
            tests.push(TestRun { id, outcome, covered });
        }
        Self::new(statements, tests)
    }

    pub fn to_text(&self) -> String {
        let mut out = self
            .statements
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        out.push('\n');
        for t in &self.tests {
            let idx = t.covered.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
            let outcome = match t.outcome {
                Outcome::Pass => "PASS",
                Outcome::Fail => "FAIL",
            };
            out.push_str(&format!("{} {} {}\n", t.id, outcome, if idx.is_empty() { "-" } else { &idx }));
        }
        out
    }

    /// Per-statement execution counts.
    pub fn counts(&self) -> Vec<SpectrumCounts> {
        let failing = self.tests.iter().filter(|t| t.outcome == Outcome::Fail).count() as u32;
        let passing = self.tests.len() as u32 - failing;
        let mut out = vec![SpectrumCounts::default(); self.statements.len()];
        for t in &self.tests {
            for &i in &t.covered {
                match t.outcome {
                    Outcome::Fail => out[i].ef += 1,
                    Outcome::Pass => out[i].ep += 1,
                }
            }
        }
        for c in &mut out {
            c.nf = failing - c.ef;
            c.np = passing - c.ep;
        }
        out
    }
}

impl fmt::Display for SpectrumCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ef={} ep={} nf={} np={}", self.ef, self.ep, self.nf, self.np)
    }
}

/// `ef / sqrt((ef + nf) * (ef + ep))`, or 0 when `ef` or the denominator is 0.
pub fn ochiai_score(c: SpectrumCounts) -> f64 {
    if c.ef == 0 {
        return 0.0;
    }
    let denom = (f64::from(c.ef + c.nf) * f64::from(c.ef + c.ep)).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        f64::from(c.ef) / denom
    }
}

/// SBFL ranking of every statement in the spectrum.
pub fn ochiai(spectrum: &CoverageSpectrum) -> Result<Ranking, SpectrumError> {
    if spectrum.tests.is_empty() {
        return Err(SpectrumError::EmptySpectrum);
    }
    let entries = spectrum
        .statements
        .iter()
        .zip(spectrum.counts())
        .map(|(s, c)| RepairTarget::sbfl(s.clone(), ochiai_score(c)))
        .collect();
    Ok(Ranking::sorted(entries))
}

/// Package-qualified source path of a frame, e.g. `org/a/B.java`.
fn frame_path(rs: &RelevantStatement) -> String {
    match rs.class_name.rsplit_once('.') {
        Some((pkg, _)) => format!("{}/{}", pkg.replace('.', "/"), rs.file_name),
        None => rs.file_name.clone(),
    }
}

fn path_matches(file: &str, frame: &str) -> bool {
    file == frame || file.ends_with(&format!("/{frame}"))
}

/// Moves SBFL entries on the lines of the trace statements to the top, in
/// stack-depth order, inserting lines the ranking lacks. Promoted entries
/// keep their position only; the rest keep their order and scores.
pub fn ssfix_rerank(sbfl: &[RepairTarget], trace_statements: &[RelevantStatement]) -> Ranking {
    let mut order: Vec<&RelevantStatement> = trace_statements.iter().collect();
    order.sort_by_key(|r| r.stack_depth);
    let mut taken: HashSet<usize> = HashSet::new();
    let mut top = Vec::new();
    let mut seen_lines: HashSet<(String, u32)> = HashSet::new();
    for rs in order {
        let frame = frame_path(rs);
        if !seen_lines.insert((frame.clone(), rs.line)) {
            continue;
        }
        let hits: Vec<usize> = sbfl
            .iter()
            .enumerate()
            .filter(|(i, e)| !taken.contains(i) && e.location.line == rs.line && path_matches(&e.location.file, &frame))
            .map(|(i, _)| i)
            .collect();
        if hits.is_empty() {
            let mut t = RepairTarget::sbfl(StatementId::new(frame, rs.line, 0), 0.0);
            t.suspiciousness = Score::Promoted;
            top.push(t);
        }
        for i in hits {
            taken.insert(i);
            let mut t = sbfl[i].clone();
            t.suspiciousness = Score::Promoted;
            top.push(t);
        }
    }
    top.extend(
        sbfl.iter()
            .enumerate()
            .filter(|(i, _)| !taken.contains(i))
            .map(|(_, e)| e.clone()),
    );
    Ranking::new(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(text: &str) -> CoverageSpectrum {
        CoverageSpectrum::parse(text).unwrap()
    }

    #[test]
    fn ochiai_examples() {
        let s = spectrum("A.java:1 A.java:2 A.java:3\nt1 FAIL 0,1\nt2 PASS 1,2\n");
        let r = ochiai(&s).unwrap();
        let score = |line| {
            r.entries
                .iter()
                .find(|e| e.location.line == line)
                .unwrap()
                .suspiciousness
                .value()
                .unwrap()
        };
        assert_eq!(score(1), 1.0);
        assert!((score(2) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(score(3), 0.0);
        assert_eq!(r.entries[0].location.line, 1);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(CoverageSpectrum::parse(""), Err(SpectrumError::EmptySpectrum));
        assert!(ochiai(&spectrum("A.java:1\n")).is_err());
        assert!(CoverageSpectrum::parse("A.java:1\nt MAYBE 0\n").is_err());
        assert!(CoverageSpectrum::parse("A.java:1\nt FAIL 3\n").is_err());
        assert!(CoverageSpectrum::parse("A.java\nt FAIL 0\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let s = spectrum("A.java:1 B.java:2:1\n# comment\nt1 FAIL 1,0\nt2 PASS -\n");
        assert_eq!(s.tests[0].covered, [0, 1]);
        assert_eq!(spectrum(&s.to_text()), s);
    }

    fn rs(file: &str, line: u32, depth: usize) -> RelevantStatement {
        RelevantStatement {
            line,
            class_name: format!("app.{}", file.trim_end_matches(".java")),
            method_name: "m".into(),
            file_name: file.into(),
            stack_depth: depth,
        }
    }

    fn ids(r: &Ranking) -> Vec<(String, u32)> {
        r.entries.iter().map(|e| (e.location.file.clone(), e.location.line)).collect()
    }

    #[test]
    fn promotion() {
        let sbfl: Vec<RepairTarget> = [("A", 1, 0.9), ("B", 2, 0.8), ("C", 3, 0.7)]
            .into_iter()
            .map(|(f, l, s)| RepairTarget::sbfl(StatementId::new(format!("app/{f}.java"), l, 0), s))
            .collect();
        let r = ssfix_rerank(&sbfl, &[rs("C.java", 3, 0)]);
        assert_eq!(ids(&r)[0], ("app/C.java".to_string(), 3));
        assert_eq!(r.entries[0].suspiciousness, Score::Promoted);
        assert_eq!(r.entries[1].suspiciousness, Score::Value(0.9));
        assert_eq!(ssfix_rerank(&sbfl, &[rs("D.java", 3, 0)]).entries[0].location.file, "app/D.java");
        assert_eq!(ssfix_rerank(&sbfl, &[]).entries, sbfl);
        let r = ssfix_rerank(&sbfl, &[rs("A.java", 1, 1), rs("C.java", 3, 0)]);
        assert_eq!(
            ids(&r),
            [("app/C.java".into(), 3), ("app/A.java".into(), 1), ("app/B.java".into(), 2)]
        );
    }
}

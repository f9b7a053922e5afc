//! Position and selection probability of faulty statements, and reports
//! comparing several rankings.

use std::fmt;

use serde::Deserialize;

use crate::ranking::{Ranking, Score};

/// A faulty line. Rankings are compared at line granularity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Deserialize)]
pub struct FaultLocation {
    pub file: String,
    pub line: u32,
}

impl fmt::Display for FaultLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    pub fault_id: String,
    #[serde(default)]
    pub exception: Option<String>,
    pub locations: Vec<FaultLocation>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("ranking contains promoted entries without comparable suspiciousness")]
    IncomparableSuspiciousness,
    #[error("invalid ground truth: {0}")]
    InvalidGroundTruth(String),
}

impl GroundTruth {
    /// Parses one ground-truth object or an array of them.
    pub fn parse_all(text: &str) -> Result<Vec<GroundTruth>, EvalError> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum OneOrMany {
            One(GroundTruth),
            Many(Vec<GroundTruth>),
        }
        let v = match serde_json::from_str::<OneOrMany>(text) {
            Ok(OneOrMany::One(g)) => vec![g],
            Ok(OneOrMany::Many(v)) => v,
            Err(e) => return Err(EvalError::InvalidGroundTruth(e.to_string())),
        };
        for g in &v {
            if g.locations.is_empty() {
                return Err(EvalError::InvalidGroundTruth(format!(
                    "fault `{}` lists no location",
                    g.fault_id
                )));
            }
            if g.locations.iter().any(|l| l.line == 0) {
                return Err(EvalError::InvalidGroundTruth(format!(
                    "fault `{}` has a location with line 0",
                    g.fault_id
                )));
            }
        }
        Ok(v)
    }
}

/// Position of a faulty statement; `NotInRanking` prints as `-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Position {
    At(f64),
    NotInRanking,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::At(p) => write!(f, "{p:.2}"),
            Position::NotInRanking => f.write_str("-"),
        }
    }
}

/// Same file, allowing one path to be a `/`-suffix of the other.
pub fn same_file(a: &str, b: &str) -> bool {
    a == b || a.ends_with(&format!("/{b}")) || b.ends_with(&format!("/{a}"))
}

/// Distinct lines in ranking order, each with its first entry's score.
fn line_representatives(ranking: &Ranking) -> Vec<(&str, u32, Score)> {
    let mut out: Vec<(&str, u32, Score)> = Vec::new();
    for e in &ranking.entries {
        let (f, l) = (e.location.file.as_str(), e.location.line);
        if !out.iter().any(|(of, ol, _)| *of == f && *ol == l) {
            out.push((f, l, e.suspiciousness));
        }
    }
    out
}

/// 1-based position of the faulty line among the distinct lines of the
/// ranking. Lines tied on suspiciousness occupying positions i..j all get
/// (i + j) / 2; promoted lines keep their own position.
pub fn position(ranking: &Ranking, faulty: &FaultLocation) -> Position {
    let reps = line_representatives(ranking);
    let Some(k) = reps
        .iter()
        .position(|(f, l, _)| *l == faulty.line && same_file(f, &faulty.file))
    else {
        return Position::NotInRanking;
    };
    let v = match reps[k].2 {
        Score::Promoted => return Position::At((k + 1) as f64),
        Score::Value(v) => v,
    };
    let better = reps
        .iter()
        .filter(|(_, _, s)| match s {
            Score::Promoted => true,
            Score::Value(o) => *o > v,
        })
        .count();
    let equal = reps
        .iter()
        .filter(|(_, _, s)| *s == Score::Value(v))
        .count();
    let first = better + 1;
    let last = better + equal;
    Position::At((first + last) as f64 / 2.0)
}

/// Suspiciousness of the faulty line over the total suspiciousness of the
/// ranking: `susp(s) / sum_i susp(s_i)`. Entries sharing the line add up.
pub fn probability(ranking: &Ranking, faulty: &FaultLocation) -> Result<f64, EvalError> {
    if ranking.has_promoted() {
        return Err(EvalError::IncomparableSuspiciousness);
    }
    let mut total = 0.0;
    let mut here = 0.0;
    for e in &ranking.entries {
        let v = e.suspiciousness.value().unwrap_or(0.0);
        total += v;
        if e.location.line == faulty.line && same_file(&e.location.file, &faulty.file) {
            here += v;
        }
    }
    Ok(if total > 0.0 { here / total } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalCell {
    pub technique: String,
    pub position: Position,
    /// `None` where the ranking has no comparable suspiciousness.
    pub probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub fault_id: String,
    pub location: FaultLocation,
    pub cells: Vec<EvalCell>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub techniques: Vec<String>,
    pub rows: Vec<EvalRow>,
}

/// One row per faulty location, one cell per technique (in the given order).
pub fn compare(rankings: &[(String, Ranking)], truth: &GroundTruth) -> EvalReport {
    let rows = truth
        .locations
        .iter()
        .map(|loc| EvalRow {
            fault_id: truth.fault_id.clone(),
            location: loc.clone(),
            cells: rankings
                .iter()
                .map(|(t, r)| EvalCell {
                    technique: t.clone(),
                    position: position(r, loc),
                    probability: probability(r, loc).ok(),
                })
                .collect(),
        })
        .collect();
    EvalReport {
        techniques: rankings.iter().map(|(t, _)| t.clone()).collect(),
        rows,
    }
}

impl EvalReport {
    pub fn extend(&mut self, other: EvalReport) {
        if self.techniques.is_empty() {
            self.techniques = other.techniques;
        }
        self.rows.extend(other.rows);
    }

    /// CSV: `fault_id,file,line`, then a position column and a probability
    /// column per technique. Missing positions print `-`, probabilities that
    /// do not apply print `n/a`.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["fault_id".to_string(), "file".into(), "line".into()];
        header.extend(self.techniques.iter().map(|t| format!("position_{t}")));
        header.extend(self.techniques.iter().map(|t| format!("probability_{t}")));
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![csv_field(&r.fault_id), csv_field(&r.location.file), r.location.line.to_string()];
            cells.extend(r.cells.iter().map(|c| c.position.to_string()));
            cells.extend(r.cells.iter().map(|c| match c.probability {
                Some(p) => format!("{p:.2}"),
                None => "n/a".into(),
            }));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::RepairTarget;
    use crate::source_model::StatementId;

    fn ranking(scores: &[f64]) -> Ranking {
        Ranking::new(
            scores
                .iter()
                .enumerate()
                .map(|(i, &s)| RepairTarget::sbfl(StatementId::new("F.java", i as u32 + 1, 0), s))
                .collect(),
        )
    }

    fn at(line: u32) -> FaultLocation {
        FaultLocation {
            file: "F.java".into(),
            line,
        }
    }

    #[test]
    fn positions() {
        let r = ranking(&[0.9, 0.5, 0.5, 0.5, 0.1]);
        assert_eq!(position(&r, &at(1)), Position::At(1.0));
        assert_eq!(position(&r, &at(3)), Position::At(3.0));
        assert_eq!(position(&r, &at(9)), Position::NotInRanking);
        assert_eq!(Position::NotInRanking.to_string(), "-");
    }

    #[test]
    fn probabilities() {
        let r = ranking(&[2.0, 1.95, 0.05]);
        assert_eq!(probability(&r, &at(1)).unwrap(), 0.5);
        assert_eq!(probability(&r, &at(7)).unwrap(), 0.0);
        assert_eq!(probability(&ranking(&[0.3]), &at(1)).unwrap(), 1.0);
        assert_eq!(probability(&ranking(&[0.0, 0.0]), &at(1)).unwrap(), 0.0);
    }

    #[test]
    fn ground_truth_forms() {
        let one = r#"{"fault_id": "Math-98", "exception": "java.lang.ArrayIndexOutOfBoundsException", "locations": [{"file": "A.java", "line": 3}]}"#;
        assert_eq!(GroundTruth::parse_all(one).unwrap().len(), 1);
        assert_eq!(GroundTruth::parse_all(&format!("[{one},{one}]")).unwrap().len(), 2);
        assert!(GroundTruth::parse_all(r#"{"fault_id": "x", "locations": []}"#).is_err());
    }

    #[test]
    fn csv_layout() {
        let truth = GroundTruth {
            fault_id: "X-1".into(),
            exception: None,
            locations: vec![at(2), at(8)],
        };
        let r = ranking(&[0.9, 0.5]);
        let rep = compare(&[("ochiai".into(), r.clone()), ("other".into(), r)], &truth);
        assert_eq!(rep.rows.len(), 2);
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "fault_id,file,line,position_ochiai,position_other,probability_ochiai,probability_other");
        assert_eq!(lines[1], "X-1,F.java,2,2.00,2.00,0.36,0.36");
        assert_eq!(lines[2], "X-1,F.java,8,-,-,0.00,0.00");
    }
}

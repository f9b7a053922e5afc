//! Repair targets, the suspiciousness schedule, merging with an SBFL
//! ranking, and end-to-end localization.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::analyzers::{
    select_suspicious_locations, AnalysisError, AnalyzerConfig, AnalyzerRegistry, GuessedFault,
    SuspiciousLocation,
};
use crate::diag::Diagnostic;
use crate::source_model::{parse_expression, Expr, SourceModel, StatementId};
use crate::stacktrace::{get_relevant_statements_in, FrameFilterConfig, ParsedStackTrace};

/// Maximum number of high-priority targets; the 20th gets 1.05.
pub const MAX_EXCEPT_TARGETS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    #[serde(rename = "EXCEPT")]
    Except,
    #[serde(rename = "SBFL")]
    Sbfl,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Except => "EXCEPT",
            Origin::Sbfl => "SBFL",
        })
    }
}

/// Suspiciousness of a ranking entry. `Promoted` marks entries moved to
/// the top by position only, which carry no comparable value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    Value(f64),
    Promoted,
}

impl Score {
    pub fn value(self) -> Option<f64> {
        match self {
            Score::Value(v) => Some(v),
            Score::Promoted => None,
        }
    }

    /// Descending order with promoted entries first.
    fn cmp_desc(self, other: Score) -> Ordering {
        match (self, other) {
            (Score::Promoted, Score::Promoted) => Ordering::Equal,
            (Score::Promoted, _) => Ordering::Less,
            (_, Score::Promoted) => Ordering::Greater,
            (Score::Value(a), Score::Value(b)) => b.total_cmp(&a),
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Value(v) => write!(f, "{v:.2}"),
            Score::Promoted => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairTarget {
    pub location: StatementId,
    pub expression: Option<Expr>,
    pub guessed_faults: Vec<GuessedFault>,
    pub suspiciousness: Score,
    pub origin: Origin,
}

impl RepairTarget {
    pub fn sbfl(location: StatementId, suspiciousness: f64) -> Self {
        Self {
            location,
            expression: None,
            guessed_faults: Vec::new(),
            suspiciousness: Score::Value(suspiciousness),
            origin: Origin::Sbfl,
        }
    }

    fn key(&self) -> (StatementId, Option<String>) {
        (self.location.clone(), self.expression.as_ref().map(Expr::render))
    }
}

/// Total order of ranking entries.
pub fn ranking_order(a: &RepairTarget, b: &RepairTarget) -> Ordering {
    a.suspiciousness
        .cmp_desc(b.suspiciousness)
        .then(a.origin.cmp(&b.origin))
        .then_with(|| a.location.cmp(&b.location))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ranking {
    pub entries: Vec<RepairTarget>,
}

impl Ranking {
    pub fn new(entries: Vec<RepairTarget>) -> Self {
        Self { entries }
    }

    /// Entries re-sorted by [`ranking_order`] (stable).
    pub fn sorted(mut entries: Vec<RepairTarget>) -> Self {
        entries.sort_by(ranking_order);
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_promoted(&self) -> bool {
        self.entries.iter().any(|e| e.suspiciousness == Score::Promoted)
    }

    /// Splits into EXCEPT and SBFL entries, each in ranking order.
    pub fn split(&self) -> (Vec<RepairTarget>, Vec<RepairTarget>) {
        self.entries
            .iter()
            .cloned()
            .partition(|e| e.origin == Origin::Except)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RankingError {
    #[error("SBFL entry {location} has suspiciousness {score}; expected a value in [0, 1]")]
    InvalidSbflScore { location: StatementId, score: f64 },
    #[error("invalid ranking file: {0}")]
    InvalidRanking(String),
}

/// Suspiciousness of the k-th (0-based) generated target, in exact hundredths.
pub fn suspiciousness_at(k: usize) -> Option<f64> {
    (k < MAX_EXCEPT_TARGETS).then(|| (200 - 5 * k as i64) as f64 / 100.0)
}

/// Turns locations into EXCEPT targets with 2.00, 1.95, ... keeping at most
/// [`MAX_EXCEPT_TARGETS`].
pub fn assign_suspiciousness(locations: &[SuspiciousLocation]) -> Vec<RepairTarget> {
    assign_suspiciousness_with(locations).0
}

/// As [`assign_suspiciousness`], reporting dropped locations.
pub fn assign_suspiciousness_with(
    locations: &[SuspiciousLocation],
) -> (Vec<RepairTarget>, Option<Diagnostic>) {
    let targets = locations
        .iter()
        .zip(0..MAX_EXCEPT_TARGETS)
        .map(|(l, k)| RepairTarget {
            location: l.statement.clone(),
            expression: Some(l.expression.clone()),
            guessed_faults: l.guessed_faults.clone(),
            suspiciousness: Score::Value(suspiciousness_at(k).expect("k below cap")),
            origin: Origin::Except,
        })
        .collect();
    let diag = (locations.len() > MAX_EXCEPT_TARGETS).then(|| {
        Diagnostic::new(
            "ranking",
            format!(
                "dropped {} suspicious locations beyond the first {MAX_EXCEPT_TARGETS}",
                locations.len() - MAX_EXCEPT_TARGETS
            ),
        )
    });
    (targets, diag)
}

/// Merges EXCEPT targets above an SBFL ranking. SBFL entries at a statement
/// that also has an EXCEPT target are dropped; duplicate EXCEPT targets
/// (same statement and expression) keep the first slot and gain the later
/// entry's faults.
pub fn merge(except: &[RepairTarget], sbfl: &[RepairTarget]) -> Result<Ranking, RankingError> {
    for s in sbfl {
        match s.suspiciousness {
            Score::Value(v) if (0.0..=1.0).contains(&v) => {}
            Score::Value(v) => {
                return Err(RankingError::InvalidSbflScore {
                    location: s.location.clone(),
                    score: v,
                })
            }
            Score::Promoted => {
                return Err(RankingError::InvalidRanking(format!(
                    "SBFL entry {} carries no suspiciousness",
                    s.location
                )))
            }
        }
    }

    let mut out: Vec<RepairTarget> = Vec::new();
    let mut index: HashMap<(StatementId, Option<String>), usize> = HashMap::new();
    for e in except {
        let key = e.key();
        match index.get(&key) {
            Some(&i) => {
                let kept = &mut out[i];
                for g in &e.guessed_faults {
                    if !kept.guessed_faults.contains(g) {
                        kept.guessed_faults.push(*g);
                    }
                }
            }
            None => {
                index.insert(key, out.len());
                let mut e = e.clone();
                e.origin = Origin::Except;
                out.push(e);
            }
        }
    }

    let covered: std::collections::HashSet<&StatementId> = except.iter().map(|e| &e.location).collect();
    let mut best: HashMap<StatementId, usize> = HashMap::new();
    for s in sbfl.iter().filter(|s| !covered.contains(&s.location)) {
        let mut s = s.clone();
        s.origin = Origin::Sbfl;
        s.expression = None;
        s.guessed_faults.clear();
        match best.get(&s.location) {
            Some(&i) => {
                if ranking_order(&s, &out[i]) == Ordering::Less {
                    out[i] = s;
                }
            }
            None => {
                best.insert(s.location.clone(), out.len());
                out.push(s);
            }
        }
    }
    Ok(Ranking::sorted(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackReason {
    UnsupportedException,
    NoRelevantStatements,
    NoPatternFound,
    NoLocations,
}

impl fmt::Display for FallbackReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FallbackReason::UnsupportedException => "no analyzer for the exception type",
            FallbackReason::NoRelevantStatements => "no application frame in the trace",
            FallbackReason::NoPatternFound => "no relevant expression in the relevant statements",
            FallbackReason::NoLocations => "no suspicious location found",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Localization {
    pub ranking: Ranking,
    /// Set when the SBFL ranking was returned unchanged.
    pub fallback: Option<FallbackReason>,
    pub except_targets: usize,
    pub diagnostics: Vec<Diagnostic>,
}

/// Full pipeline on a parsed trace. Whenever the exception analysis yields
/// nothing, the SBFL ranking is returned as given.
pub fn localize(
    model: &SourceModel,
    trace: &ParsedStackTrace,
    filter: &FrameFilterConfig,
    sbfl: &[RepairTarget],
    registry: &AnalyzerRegistry,
    cfg: &AnalyzerConfig,
) -> Result<Localization, RankingError> {
    let mut diagnostics: Vec<Diagnostic> = model
        .diagnostics()
        .iter()
        .map(|d| Diagnostic::new("source", d.to_string()))
        .collect();
    let fallback = |reason: FallbackReason, mut diagnostics: Vec<Diagnostic>| {
        diagnostics.push(Diagnostic::new(
            "localize",
            format!("{reason}; returning the SBFL ranking unchanged"),
        ));
        Localization {
            ranking: Ranking::new(sbfl.to_vec()),
            fallback: Some(reason),
            except_targets: 0,
            diagnostics,
        }
    };

    let trace = trace.root_cause();
    let relevant = get_relevant_statements_in(trace, filter, Some(model));
    if relevant.is_empty() {
        return Ok(fallback(FallbackReason::NoRelevantStatements, diagnostics));
    }
    let analysis = match select_suspicious_locations(model, &relevant, &trace.exception_type, registry, cfg) {
        Ok(a) => a,
        Err(e) => {
            let reason = match e {
                AnalysisError::UnsupportedException(_) => FallbackReason::UnsupportedException,
                _ => FallbackReason::NoPatternFound,
            };
            diagnostics.push(Diagnostic::new("analysis", e.to_string()));
            return Ok(fallback(reason, diagnostics));
        }
    };
    diagnostics.extend(analysis.diagnostics);
    if analysis.locations.is_empty() {
        return Ok(fallback(FallbackReason::NoLocations, diagnostics));
    }
    let (targets, dropped) = assign_suspiciousness_with(&analysis.locations);
    diagnostics.extend(dropped);
    let ranking = merge(&targets, sbfl)?;
    Ok(Localization {
        ranking,
        fallback: None,
        except_targets: targets.len(),
        diagnostics,
    })
}

// Serialization -------------------------------------------------------------

#[derive(Serialize)]
struct EntryOut<'a> {
    rank: usize,
    suspiciousness: Box<RawValue>,
    score: Option<f64>,
    file: &'a str,
    line: u32,
    ordinal: u32,
    origin: Origin,
    #[serde(skip_serializing_if = "Option::is_none")]
    expression: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    guessed_faults: Option<&'a [GuessedFault]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryIn {
    #[serde(default)]
    #[allow(dead_code)]
    rank: Option<usize>,
    suspiciousness: Option<f64>,
    #[serde(default)]
    score: Option<f64>,
    file: String,
    line: u32,
    #[serde(default)]
    ordinal: Option<u32>,
    #[serde(default)]
    origin: Option<Origin>,
    #[serde(default)]
    expression: Option<String>,
    #[serde(default)]
    guessed_faults: Option<Vec<GuessedFault>>,
}

/// JSON array of entries with 2-decimal fixed-point suspiciousness, plus the
/// full-precision `score` (null for promoted entries).
pub fn ranking_to_json(ranking: &Ranking) -> String {
    let entries: Vec<EntryOut<'_>> = ranking
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| EntryOut {
            rank: i + 1,
            suspiciousness: RawValue::from_string(match e.suspiciousness {
                Score::Value(v) => format!("{v:.2}"),
                Score::Promoted => "null".into(),
            })
            .expect("fixed-point number is valid JSON"),
            score: e.suspiciousness.value(),
            file: &e.location.file,
            line: e.location.line,
            ordinal: e.location.ordinal,
            origin: e.origin,
            expression: e.expression.as_ref().map(Expr::render),
            guessed_faults: (e.origin == Origin::Except).then_some(&e.guessed_faults[..]),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&entries).expect("ranking serializes");
    s.push('\n');
    s
}

/// Reads a ranking or SBFL file, keeping entry order. Entries without
/// `origin` are SBFL entries; `score` takes precedence over the rounded
/// `suspiciousness` when both are present.
pub fn ranking_from_json(text: &str) -> Result<Ranking, RankingError> {
    let raw: Vec<EntryIn> =
        serde_json::from_str(text).map_err(|e| RankingError::InvalidRanking(e.to_string()))?;
    let mut entries = Vec::with_capacity(raw.len());
    for (i, e) in raw.into_iter().enumerate() {
        if e.line == 0 {
            return Err(RankingError::InvalidRanking(format!("entry {}: line must be >= 1", i + 1)));
        }
        let suspiciousness = match e.score.or(e.suspiciousness) {
            Some(v) if v.is_finite() => Score::Value(v),
            Some(v) => {
                return Err(RankingError::InvalidRanking(format!(
                    "entry {}: suspiciousness {v} is not finite",
                    i + 1
                )))
            }
            None => Score::Promoted,
        };
        let expression = match e.expression {
            Some(src) => Some(parse_expression(&e.file, &src).map_err(|m| {
                RankingError::InvalidRanking(format!("entry {}: expression `{src}`: {m}", i + 1))
            })?),
            None => None,
        };
        entries.push(RepairTarget {
            location: StatementId::new(e.file, e.line, e.ordinal.unwrap_or(0)),
            expression,
            guessed_faults: e.guessed_faults.unwrap_or_default(),
            suspiciousness,
            origin: e.origin.unwrap_or(Origin::Sbfl),
        });
    }
    Ok(Ranking { entries })
}

/// Human-readable table.
pub fn ranking_to_table(ranking: &Ranking) -> String {
    let rows: Vec<[String; 6]> = ranking
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            [
                (i + 1).to_string(),
                e.suspiciousness.to_string(),
                e.origin.to_string(),
                e.location.to_string(),
                e.expression.as_ref().map(Expr::render).unwrap_or_default(),
                e.guessed_faults
                    .iter()
                    .map(|g| g.label())
                    .collect::<Vec<_>>()
                    .join(","),
            ]
        })
        .collect();
    let header = ["RANK", "SUSP", "ORIGIN", "LOCATION", "EXPRESSION", "GUESSED FAULTS"];
    let mut widths = header.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (k, c) in cells.iter().enumerate() {
            if k + 1 == cells.len() {
                l.push_str(c);
            } else {
                l.push_str(&format!("{c:<w$}  ", w = widths[k]));
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for r in &rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_endpoints() {
        assert_eq!(suspiciousness_at(0), Some(2.0));
        assert_eq!(suspiciousness_at(1), Some(1.95));
        assert_eq!(suspiciousness_at(19), Some(1.05));
        assert_eq!(suspiciousness_at(20), None);
    }

    #[test]
    fn json_round_trip() {
        let e = parse_expression("F.java", "a[i + 1]").unwrap();
        let r = Ranking::new(vec![
            RepairTarget {
                location: StatementId::new("F.java", 3, 0),
                expression: Some(e),
                guessed_faults: vec![GuessedFault::IndexExpressionWrong],
                suspiciousness: Score::Value(2.0),
                origin: Origin::Except,
            },
            RepairTarget::sbfl(StatementId::new("F.java", 9, 1), 0.712345),
        ]);
        let json = ranking_to_json(&r);
        assert!(json.contains("\"suspiciousness\": 2.00"), "{json}");
        assert!(json.contains("\"suspiciousness\": 0.71"), "{json}");
        assert_eq!(ranking_from_json(&json).unwrap(), r);
    }

    #[test]
    fn sbfl_input_without_ordinal() {
        let r = ranking_from_json(r#"[{"file": "A.java", "line": 4, "suspiciousness": 0.5}]"#).unwrap();
        assert_eq!(r.entries[0], RepairTarget::sbfl(StatementId::new("A.java", 4, 0), 0.5));
        assert!(ranking_from_json(r#"[{"file": "A.java", "line": 0, "suspiciousness": 0.5}]"#).is_err());
        assert!(ranking_from_json(r#"{"file": "A.java"}"#).is_err());
    }

    #[test]
    fn table_has_header_and_rows() {
        let r = Ranking::new(vec![RepairTarget::sbfl(StatementId::new("A.java", 4, 0), 0.5)]);
        let t = ranking_to_table(&r);
        assert!(t.starts_with("RANK"));
        assert!(t.lines().nth(1).unwrap().contains("A.java:4:0"));
    }
}

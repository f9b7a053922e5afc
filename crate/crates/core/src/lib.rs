//! Exception-driven fault localization for Java programs.
//!
//! A stack trace is parsed and filtered to application frames, the
//! implicated statements are resolved in a simplified AST, an analysis
//! specific to the exception type selects suspicious locations through a
//! bounded backward data-flow, and the resulting repair targets are merged
//! above an SBFL (Ochiai) ranking.

pub mod analyzers;
pub mod dataflow;
pub mod diag;
pub mod eval;
pub mod ranking;
pub mod sbfl;
pub mod source_model;
pub mod stacktrace;

pub use analyzers::{AnalyzerConfig, AnalyzerRegistry, GuessedFault, SuspiciousLocation};
pub use diag::Diagnostic;
pub use ranking::{localize, merge, Localization, Origin, Ranking, RepairTarget, Score};
pub use source_model::{SourceModel, StatementId};
pub use stacktrace::{parse_stack_trace, FrameFilterConfig, ParsedStackTrace, RelevantStatement};

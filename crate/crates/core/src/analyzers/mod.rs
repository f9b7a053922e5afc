//! Per-exception analyses: relevant-expression selection and suspicious
//! location discovery for the four supported exception types.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataflow::{backward_defs, DefinitionKind, DefinitionSite};
use crate::diag::Diagnostic;
use crate::source_model::{
    resolve_statement, Expr, ExprKind, ForInit, MethodContext, SourceModel, Span, StatementId,
    Stmt, StmtContext, StmtKind, TypeRef,
};
use crate::stacktrace::RelevantStatement;

pub mod aioobe;
pub mod iae;
pub mod npe;
pub mod sioobe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GuessedFault {
    ArrayVariableWrong,
    MissingConditional,
    WrongArrayInitialization,
    WrongVariableValue,
    IndexExpressionWrong,
    StringVariableWrong,
    WrongValue,
    ObjectVariableWrong,
    WrongVariablesAtCall,
    WrongParameter,
    WrongMethodInvoked,
}

impl GuessedFault {
    pub const ALL: [GuessedFault; 11] = [
        GuessedFault::ArrayVariableWrong,
        GuessedFault::MissingConditional,
        GuessedFault::WrongArrayInitialization,
        GuessedFault::WrongVariableValue,
        GuessedFault::IndexExpressionWrong,
        GuessedFault::StringVariableWrong,
        GuessedFault::WrongValue,
        GuessedFault::ObjectVariableWrong,
        GuessedFault::WrongVariablesAtCall,
        GuessedFault::WrongParameter,
        GuessedFault::WrongMethodInvoked,
    ];

    pub fn label(self) -> &'static str {
        use GuessedFault::*;
        match self {
            ArrayVariableWrong => "ARRAY_VARIABLE_WRONG",
            MissingConditional => "MISSING_CONDITIONAL",
            WrongArrayInitialization => "WRONG_ARRAY_INITIALIZATION",
            WrongVariableValue => "WRONG_VARIABLE_VALUE",
            IndexExpressionWrong => "INDEX_EXPRESSION_WRONG",
            StringVariableWrong => "STRING_VARIABLE_WRONG",
            WrongValue => "WRONG_VALUE",
            ObjectVariableWrong => "OBJECT_VARIABLE_WRONG",
            WrongVariablesAtCall => "WRONG_VARIABLES_AT_CALL",
            WrongParameter => "WRONG_PARAMETER",
            WrongMethodInvoked => "WRONG_METHOD_INVOKED",
        }
    }
}

impl fmt::Display for GuessedFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown guessed fault `{0}`")]
pub struct UnknownFault(pub String);

impl FromStr for GuessedFault {
    type Err = UnknownFault;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GuessedFault::ALL
            .into_iter()
            .find(|g| g.label() == s)
            .ok_or_else(|| UnknownFault(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    ArrayRef,
    IndexExpr,
    StringRef,
    ObjRef,
    CallParam,
    CallSite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelevantExpression {
    pub expr: Expr,
    pub role: Role,
    pub origin_statement: StatementId,
    /// Stack depth of the relevant statement the expression comes from.
    pub stack_depth: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuspiciousLocation {
    pub statement: StatementId,
    pub expression: Expr,
    pub guessed_faults: Vec<GuessedFault>,
    pub source_relevant_statement_depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("no analyzer handles exception type `{0}`")]
    UnsupportedException(String),
    #[error("no relevant expression found in {0}")]
    NoPatternFound(String),
    #[error("unknown analyzer `{0}` (expected aioobe, sioobe, npe or iae)")]
    UnknownAnalyzer(String),
}

pub const DEFAULT_STRING_INDEX_METHODS: &[&str] = &[
    "charAt",
    "substring",
    "subSequence",
    "indexOf",
    "codePointAt",
    "deleteCharAt",
    "setCharAt",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzerConfig {
    pub depth_limit: u32,
    /// Index-taking string methods recognised by the string-index analysis.
    pub string_index_methods: Vec<String>,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self {
            depth_limit: crate::dataflow::DEFAULT_DEPTH_LIMIT,
            string_index_methods: DEFAULT_STRING_INDEX_METHODS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

/// A relevant statement resolved to its AST node.
#[derive(Debug, Clone)]
pub struct Resolved<'m> {
    pub ctx: StmtContext<'m>,
    pub rs: RelevantStatement,
    /// Method of the frame above this one; the callee for caller statements.
    pub callee: Option<String>,
}

impl Resolved<'_> {
    pub fn id(&self) -> &StatementId {
        &self.ctx.stmt.id
    }

    pub fn depth(&self) -> u32 {
        self.rs.stack_depth as u32
    }

    /// Declared type of `var` as seen from the method of this statement.
    pub fn declared_type(&self, var: &str) -> Option<TypeRef> {
        declared_type(&self.ctx.method, var)
    }
}

pub trait ExceptionAnalyzer: Send + Sync {
    /// Short name used by `--enable-analyzers`.
    fn name(&self) -> &'static str;
    fn exception_type_names(&self) -> &'static [&'static str];
    fn max_relevant_statements(&self) -> usize;
    /// Fault labels the analysis may attach.
    fn licensed_faults(&self) -> &'static [GuessedFault];
    /// Preference among statements sharing the reported line. `callee` is
    /// set for caller statements.
    fn prefers(&self, stmt: &Stmt, callee: Option<&str>, cfg: &AnalyzerConfig) -> bool;
    /// One slot per considered relevant statement, `None` where resolution failed.
    fn select(
        &self,
        statements: &[Option<Resolved<'_>>],
        cfg: &AnalyzerConfig,
    ) -> Result<Vec<RelevantExpression>, AnalysisError>;
    fn find(
        &self,
        model: &SourceModel,
        rel: &[RelevantExpression],
        cfg: &AnalyzerConfig,
    ) -> Vec<SuspiciousLocation>;

    fn handles(&self, exception_type: &str) -> bool {
        let simple = exception_type.rsplit('.').next().unwrap_or(exception_type);
        self.exception_type_names()
            .iter()
            .any(|n| *n == exception_type || n.rsplit('.').next() == Some(simple))
    }
}

pub struct AnalyzerRegistry {
    analyzers: Vec<Box<dyn ExceptionAnalyzer>>,
}

impl fmt::Debug for AnalyzerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl Default for AnalyzerRegistry {
    fn default() -> Self {
        Self {
            analyzers: vec![
                Box::new(aioobe::ArrayIndexAnalyzer),
                Box::new(sioobe::StringIndexAnalyzer),
                Box::new(npe::NullPointerAnalyzer),
                Box::new(iae::IllegalArgumentAnalyzer),
            ],
        }
    }
}

impl AnalyzerRegistry {
    pub fn empty() -> Self {
        Self { analyzers: Vec::new() }
    }

    /// Registry restricted to the named analyzers.
    pub fn with_enabled<S: AsRef<str>>(names: &[S]) -> Result<Self, AnalysisError> {
        let all = Self::default().analyzers;
        for n in names {
            let n = n.as_ref().trim();
            if !all.iter().any(|a| a.name() == n) {
                return Err(AnalysisError::UnknownAnalyzer(n.to_string()));
            }
        }
        let analyzers = all
            .into_iter()
            .filter(|a| names.iter().any(|n| n.as_ref().trim() == a.name()))
            .collect();
        Ok(Self { analyzers })
    }

    pub fn register(&mut self, analyzer: Box<dyn ExceptionAnalyzer>) {
        self.analyzers.push(analyzer);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.analyzers.iter().map(|a| a.name()).collect()
    }

    pub fn find(&self, exception_type: &str) -> Option<&dyn ExceptionAnalyzer> {
        self.analyzers
            .iter()
            .find(|a| a.handles(exception_type))
            .map(|a| a.as_ref())
    }
}

/// Outcome of analysing one trace.
#[derive(Debug, Clone, Default)]
pub struct Analysis {
    pub analyzer: &'static str,
    pub statements: Vec<StatementId>,
    pub relevant_expressions: Vec<RelevantExpression>,
    pub locations: Vec<SuspiciousLocation>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Runs the analyzer registered for `exception_type` on the leading
/// relevant statements. Repeated frames of the same line and method (recursion)
/// are skipped when picking the caller.
pub fn select_suspicious_locations(
    model: &SourceModel,
    relevant: &[RelevantStatement],
    exception_type: &str,
    registry: &AnalyzerRegistry,
    cfg: &AnalyzerConfig,
) -> Result<Analysis, AnalysisError> {
    let analyzer = registry
        .find(exception_type)
        .ok_or_else(|| AnalysisError::UnsupportedException(exception_type.to_string()))?;
    let mut analysis = Analysis {
        analyzer: analyzer.name(),
        ..Default::default()
    };

    let mut picked: Vec<&RelevantStatement> = Vec::new();
    for rs in relevant {
        if picked.len() >= analyzer.max_relevant_statements() {
            break;
        }
        let repeat = picked.iter().any(|p| {
            p.file_name == rs.file_name && p.line == rs.line && p.method_name == rs.method_name
        });
        if !repeat {
            picked.push(rs);
        }
    }

    let mut slots = Vec::new();
    for (k, rs) in picked.iter().enumerate() {
        let callee = (k > 0).then(|| picked[k - 1].method_name.clone());
        let prefer = |s: &Stmt| analyzer.prefers(s, callee.as_deref(), cfg);
        match resolve_statement(model, rs, &prefer) {
            Ok(ctx) => {
                if ctx.ambiguous {
                    analysis.diagnostics.push(Diagnostic::new(
                        "resolve",
                        format!(
                            "{}.{} at line {} matches several methods; using the innermost",
                            rs.class_name, rs.method_name, rs.line
                        ),
                    ));
                }
                analysis.statements.push(ctx.stmt.id.clone());
                slots.push(Some(Resolved {
                    ctx,
                    rs: (*rs).clone(),
                    callee,
                }));
            }
            Err(e) => {
                analysis.diagnostics.push(Diagnostic::new(
                    "resolve",
                    format!("skipping frame {}.{}: {e}", rs.class_name, rs.method_name),
                ));
                slots.push(None);
            }
        }
    }
    if slots.iter().all(Option::is_none) {
        return Err(AnalysisError::NoPatternFound(
            "the trace (no relevant statement could be resolved)".into(),
        ));
    }

    analysis.relevant_expressions = analyzer.select(&slots, cfg)?;
    analysis.locations = analyzer.find(model, &analysis.relevant_expressions, cfg);
    Ok(analysis)
}

/// Variable named by `e`: a plain name or `this.name`.
pub fn var_name(e: &Expr) -> Option<&str> {
    match &e.kind {
        ExprKind::VarRef(n) => Some(n),
        ExprKind::FieldAccess { target, name } if matches!(target.kind, ExprKind::This) => {
            Some(name)
        }
        _ => None,
    }
}

/// Declared type of a local, parameter or visible field named `var`.
pub fn declared_type(ctx: &MethodContext<'_>, var: &str) -> Option<TypeRef> {
    let mut found = None;
    ctx.method.walk(&mut |s| {
        if found.is_some() {
            return;
        }
        match &s.kind {
            StmtKind::LocalVarDecl { name, ty, .. } if name == var => found = Some(ty.clone()),
            StmtKind::ForEach { var: v, ty, .. } if v == var => found = Some(ty.clone()),
            StmtKind::For {
                init: ForInit::Decl { ty, vars },
                ..
            } if vars.iter().any(|(n, _)| n == var) => found = Some(ty.clone()),
            StmtKind::Try { catches, .. } => {
                if let Some(c) = catches.iter().find(|c| c.param == var) {
                    found = Some(c.ty.clone());
                }
            }
            _ => {}
        }
    });
    found
        .or_else(|| ctx.method.param(var).map(|p| p.ty.clone()))
        .or_else(|| ctx.field(var).map(|f| f.ty.clone()))
}

/// Ordered suspicious locations with duplicate (statement, expression)
/// pairs collapsed; later duplicates only add faults.
#[derive(Debug, Default)]
pub(crate) struct LocationSet {
    out: Vec<SuspiciousLocation>,
    index: HashMap<(StatementId, String), usize>,
}

impl LocationSet {
    pub(crate) fn push(&mut self, statement: &StatementId, expr: &Expr, faults: &[GuessedFault], depth: u32) {
        let key = (statement.clone(), expr.render());
        match self.index.get(&key) {
            Some(&i) => {
                for f in faults {
                    if !self.out[i].guessed_faults.contains(f) {
                        self.out[i].guessed_faults.push(*f);
                    }
                }
            }
            None => {
                self.index.insert(key, self.out.len());
                self.out.push(SuspiciousLocation {
                    statement: statement.clone(),
                    expression: expr.clone(),
                    guessed_faults: faults.to_vec(),
                    source_relevant_statement_depth: depth,
                });
            }
        }
    }

    /// Separate statement-level location for a missing-conditional guess.
    pub(crate) fn push_missing_conditional(&mut self, model: &SourceModel, r: &RelevantExpression) {
        let expr = model
            .locate(&r.origin_statement)
            .and_then(|c| c.stmt.as_expression())
            .unwrap_or_else(|| r.expr.clone());
        self.push(&r.origin_statement, &expr, &[GuessedFault::MissingConditional], r.stack_depth);
    }

    pub(crate) fn push_defs(&mut self, defs: &[DefinitionSite], faults: &[GuessedFault], depth: u32) {
        for d in defs {
            self.push(&d.statement, &site_expr(d), faults, depth);
        }
    }

    pub(crate) fn into_vec(self) -> Vec<SuspiciousLocation> {
        self.out
    }
}

/// Expression reported for a definition site.
pub(crate) fn site_expr(site: &DefinitionSite) -> Expr {
    site.defining_expr.clone().unwrap_or_else(|| {
        Expr::new(
            ExprKind::VarRef(site.defined_var.clone()),
            Span::line(site.statement.line),
        )
    })
}

/// Direct definitions of every variable in `e`, variable by variable.
pub(crate) fn defs_of_vars(
    model: &SourceModel,
    at: &StatementId,
    e: &Expr,
    cfg: &AnalyzerConfig,
) -> Vec<DefinitionSite> {
    let mut out = Vec::new();
    for v in crate::dataflow::vars_of(e) {
        out.extend(backward_defs(model, at, &v, false, cfg.depth_limit));
    }
    out
}

pub(crate) fn is_param_site(d: &DefinitionSite) -> bool {
    d.kind == DefinitionKind::Parameter
}

/// Own expressions of a statement, walked in pre-order.
pub(crate) fn walk_own<'a>(stmt: &'a Stmt, f: &mut dyn FnMut(&'a Expr)) {
    for e in stmt.own_exprs() {
        e.walk(f);
    }
}

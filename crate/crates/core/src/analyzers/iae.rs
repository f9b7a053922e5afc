//! `IllegalArgumentException`: `op(...exprPar...)` in the raising statement,
//! or else in the caller.

use super::*;
use GuessedFault::*;

pub struct IllegalArgumentAnalyzer;

const LICENSED: &[GuessedFault] = &[WrongParameter, WrongMethodInvoked, WrongValue];

fn call_args(e: &Expr) -> &[Expr] {
    match &e.kind {
        ExprKind::MethodCall { args, .. } | ExprKind::New { args, .. } => args,
        _ => &[],
    }
}

/// Calls (and constructor invocations) with at least one argument. A throw
/// statement contributes nothing: it only raises the exception.
fn qualifying_calls(stmt: &Stmt) -> Vec<&Expr> {
    if matches!(stmt.kind, StmtKind::Throw(_)) {
        return Vec::new();
    }
    let mut out = Vec::new();
    walk_own(stmt, &mut |e| {
        if matches!(e.kind, ExprKind::MethodCall { .. } | ExprKind::New { .. }) && !call_args(e).is_empty() {
            out.push(e);
        }
    });
    out
}

fn calls_named<'a>(calls: &[&'a Expr], callee: &str) -> Vec<&'a Expr> {
    calls
        .iter()
        .copied()
        .filter(|e| match &e.kind {
            ExprKind::MethodCall { name, .. } => name == callee,
            ExprKind::New { .. } => callee == "<init>",
            _ => false,
        })
        .collect()
}

fn emit(r: &Resolved<'_>, calls: &[&Expr], out: &mut Vec<RelevantExpression>) {
    for call in calls {
        let mk = |x: &Expr, role| RelevantExpression {
            expr: x.clone(),
            role,
            origin_statement: r.id().clone(),
            stack_depth: r.depth(),
        };
        out.push(mk(call, Role::CallSite));
        out.extend(call_args(call).iter().map(|a| mk(a, Role::CallParam)));
    }
}

/// Each qualifying call of `stmt0` as `CallSite` followed by its arguments as
/// `CallParam`; the caller is examined only when `stmt0` has none. In the
/// caller, calls of the raising method are preferred.
pub fn select(
    stmt0: Option<&Resolved<'_>>,
    caller: Option<&Resolved<'_>>,
) -> Result<Vec<RelevantExpression>, AnalysisError> {
    let mut out = Vec::new();
    if let Some(r) = stmt0 {
        emit(r, &qualifying_calls(r.ctx.stmt), &mut out);
    }
    if out.is_empty() {
        if let Some(c) = caller {
            let all = qualifying_calls(c.ctx.stmt);
            let named = calls_named(&all, c.callee.as_deref().unwrap_or_default());
            emit(c, if named.is_empty() { &all } else { &named }, &mut out);
        }
    }
    if out.is_empty() {
        let at = stmt0.or(caller).map(|r| r.id().to_string()).unwrap_or_default();
        return Err(AnalysisError::NoPatternFound(at));
    }
    Ok(out)
}

pub fn find(model: &SourceModel, rel: &[RelevantExpression], cfg: &AnalyzerConfig) -> Vec<SuspiciousLocation> {
    let mut set = LocationSet::default();
    let mut start = 0;
    while start < rel.len() {
        let end = rel[start + 1..]
            .iter()
            .position(|r| r.role == Role::CallSite)
            .map_or(rel.len(), |p| start + 1 + p);
        let group = &rel[start..end];
        for r in group {
            let at = &r.origin_statement;
            match r.role {
                Role::CallSite => set.push(at, &r.expr, &[WrongMethodInvoked], r.stack_depth),
                Role::CallParam => {
                    set.push(at, &r.expr, &[WrongParameter], r.stack_depth);
                    let mut nested = Vec::new();
                    for c in r.expr.children() {
                        c.walk(&mut |e| {
                            if matches!(e.kind, ExprKind::MethodCall { .. }) {
                                nested.push(e);
                            }
                        });
                    }
                    for e in nested {
                        set.push(at, e, &[WrongParameter], r.stack_depth);
                    }
                }
                _ => {}
            }
        }
        for r in group.iter().filter(|r| r.role == Role::CallParam) {
            let defs = defs_of_vars(model, &r.origin_statement, &r.expr, cfg);
            set.push_defs(&defs, &[WrongValue], r.stack_depth);
        }
        start = end;
    }
    set.into_vec()
}

impl ExceptionAnalyzer for IllegalArgumentAnalyzer {
    fn name(&self) -> &'static str {
        "iae"
    }

    fn exception_type_names(&self) -> &'static [&'static str] {
        &["java.lang.IllegalArgumentException"]
    }

    fn max_relevant_statements(&self) -> usize {
        2
    }

    fn licensed_faults(&self) -> &'static [GuessedFault] {
        LICENSED
    }

    fn prefers(&self, stmt: &Stmt, callee: Option<&str>, _cfg: &AnalyzerConfig) -> bool {
        match callee {
            Some(c) => !calls_named(&qualifying_calls(stmt), c).is_empty(),
            None => matches!(stmt.kind, StmtKind::Throw(_)) || !qualifying_calls(stmt).is_empty(),
        }
    }

    fn select(&self, statements: &[Option<Resolved<'_>>], _cfg: &AnalyzerConfig) -> Result<Vec<RelevantExpression>, AnalysisError> {
        let stmt0 = statements.first().and_then(Option::as_ref);
        let caller = statements.get(1).and_then(Option::as_ref);
        select(stmt0, caller)
    }

    fn find(&self, model: &SourceModel, rel: &[RelevantExpression], cfg: &AnalyzerConfig) -> Vec<SuspiciousLocation> {
        find(model, rel, cfg)
    }
}

//! `NullPointerException`: `obj.op()` in the raising statement, plus the
//! arguments passed by the caller.

use super::*;
use crate::dataflow::backward_defs;
use crate::source_model::LiteralKind;
use GuessedFault::*;

pub struct NullPointerAnalyzer;

const LICENSED: &[GuessedFault] = &[
    ObjectVariableWrong,
    MissingConditional,
    WrongValue,
    WrongVariablesAtCall,
];

/// Whether `e` may hold a reference. Unknown types count as references;
/// undeclared capitalised names are taken to be class names.
fn may_be_null(e: &Expr, types: &dyn Fn(&str) -> Option<TypeRef>) -> bool {
    match &e.kind {
        ExprKind::This | ExprKind::Super | ExprKind::ClassLiteral(_) | ExprKind::New { .. } => false,
        ExprKind::ArrayCreation { .. } | ExprKind::ArrayInit(_) => false,
        ExprKind::Literal(l) => matches!(l.kind, LiteralKind::Null),
        _ => match var_name(e) {
            Some(v) => match types(v) {
                Some(t) => !t.is_primitive(),
                None => !(v.starts_with(|c: char| c.is_ascii_uppercase()) && e.as_var().is_some()),
            },
            None => true,
        },
    }
}

/// Dereferenced expressions of `e` in evaluation order.
fn derefs<'a>(e: &'a Expr, types: &dyn Fn(&str) -> Option<TypeRef>, out: &mut Vec<&'a Expr>) {
    match &e.kind {
        ExprKind::MethodCall { receiver, args, .. } => {
            if let Some(r) = receiver {
                derefs(r, types, out);
                if may_be_null(r, types) {
                    out.push(r);
                }
            }
            for a in args {
                derefs(a, types, out);
            }
        }
        ExprKind::FieldAccess { target, .. } => {
            derefs(target, types, out);
            if may_be_null(target, types) {
                out.push(target);
            }
        }
        ExprKind::ArrayAccess { array, index } => {
            derefs(array, types, out);
            if may_be_null(array, types) {
                out.push(array);
            }
            derefs(index, types, out);
        }
        _ => {
            for c in e.children() {
                derefs(c, types, out);
            }
        }
    }
}

fn calls_to<'a>(stmt: &'a Stmt, callee: &str) -> Vec<&'a Expr> {
    let mut out = Vec::new();
    walk_own(stmt, &mut |e| match &e.kind {
        ExprKind::MethodCall { name, .. } if name == callee => out.push(e),
        ExprKind::New { .. } if callee == "<init>" => out.push(e),
        _ => {}
    });
    out
}

/// Dereferenced receivers of `stmt0` as `ObjRef`; from the caller, each call
/// of the raising method as `CallSite` followed by its reference arguments
/// as `CallParam`.
pub fn select(
    stmt0: Option<&Resolved<'_>>,
    caller: Option<&Resolved<'_>>,
) -> Result<Vec<RelevantExpression>, AnalysisError> {
    let mut out = Vec::new();
    if let Some(r) = stmt0 {
        let types = |v: &str| r.declared_type(v);
        let mut found = Vec::new();
        for e in r.ctx.stmt.own_exprs() {
            derefs(e, &types, &mut found);
        }
        let mut seen = Vec::new();
        for e in found {
            let key = e.render();
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            out.push(RelevantExpression {
                expr: e.clone(),
                role: Role::ObjRef,
                origin_statement: r.id().clone(),
                stack_depth: r.depth(),
            });
        }
    }
    if let Some(c) = caller {
        let callee = c.callee.as_deref().unwrap_or_default();
        let types = |v: &str| c.declared_type(v);
        for call in calls_to(c.ctx.stmt, callee) {
            let mk = |x: &Expr, role| RelevantExpression {
                expr: x.clone(),
                role,
                origin_statement: c.id().clone(),
                stack_depth: c.depth(),
            };
            out.push(mk(call, Role::CallSite));
            let args = match &call.kind {
                ExprKind::MethodCall { args, .. } | ExprKind::New { args, .. } => &args[..],
                _ => &[],
            };
            for a in args.iter().filter(|a| may_be_null(a, &types)) {
                out.push(mk(a, Role::CallParam));
            }
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
    // positions of parameters that a dereferenced variable comes from
    let mut param_positions: Vec<usize> = Vec::new();
    for r in rel.iter().filter(|r| r.role == Role::ObjRef) {
        let at = &r.origin_statement;
        set.push(at, &r.expr, &[ObjectVariableWrong], r.stack_depth);
        set.push_missing_conditional(model, r);
        let Some(v) = var_name(&r.expr) else { continue };
        let defs = backward_defs(model, at, v, false, cfg.depth_limit);
        set.push_defs(&defs, &[WrongValue, MissingConditional], r.stack_depth);
        for d in defs.iter().filter(|d| is_param_site(d)) {
            if let Some((m, p)) = model.locate_param(&d.statement) {
                if let Some(k) = m.method.params.iter().position(|q| q.id == p.id) {
                    if !param_positions.contains(&k) {
                        param_positions.push(k);
                    }
                }
            }
        }
    }
    if !param_positions.is_empty() {
        for r in rel.iter().filter(|r| r.role == Role::CallSite) {
            set.push(&r.origin_statement, &r.expr, &[WrongVariablesAtCall], r.stack_depth);
            let args = match &r.expr.kind {
                ExprKind::MethodCall { args, .. } | ExprKind::New { args, .. } => &args[..],
                _ => &[],
            };
            for &k in &param_positions {
                if let Some(a) = args.get(k) {
                    let passed = rel.iter().any(|p| {
                        p.role == Role::CallParam && p.origin_statement == r.origin_statement && p.expr == *a
                    });
                    if passed {
                        set.push(&r.origin_statement, a, &[WrongVariablesAtCall], r.stack_depth);
                    }
                }
            }
        }
    }
    set.into_vec()
}

impl ExceptionAnalyzer for NullPointerAnalyzer {
    fn name(&self) -> &'static str {
        "npe"
    }

    fn exception_type_names(&self) -> &'static [&'static str] {
        &["java.lang.NullPointerException"]
    }

    fn max_relevant_statements(&self) -> usize {
        2
    }

    fn licensed_faults(&self) -> &'static [GuessedFault] {
        LICENSED
    }

    fn prefers(&self, stmt: &Stmt, callee: Option<&str>, _cfg: &AnalyzerConfig) -> bool {
        match callee {
            Some(c) => !calls_to(stmt, c).is_empty(),
            None => {
                let mut found = Vec::new();
                for e in stmt.own_exprs() {
                    derefs(e, &|_| None, &mut found);
                }
                !found.is_empty()
            }
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

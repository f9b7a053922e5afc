//! `ArrayIndexOutOfBoundsException`: `refArray[exprIndex]`.

use super::*;
use crate::dataflow::backward_defs;
use GuessedFault::*;

pub struct ArrayIndexAnalyzer;

const LICENSED: &[GuessedFault] = &[
    ArrayVariableWrong,
    MissingConditional,
    WrongArrayInitialization,
    WrongVariableValue,
    IndexExpressionWrong,
];

/// `(array, ArrayRef)` then `(index, IndexExpr)` for every array access, left to right.
pub fn select(stmt: &Stmt, depth: u32) -> Result<Vec<RelevantExpression>, AnalysisError> {
    let mut out = Vec::new();
    walk_own(stmt, &mut |e| {
        if let ExprKind::ArrayAccess { array, index } = &e.kind {
            for (x, role) in [(&**array, Role::ArrayRef), (&**index, Role::IndexExpr)] {
                out.push(RelevantExpression {
                    expr: x.clone(),
                    role,
                    origin_statement: stmt.id.clone(),
                    stack_depth: depth,
                });
            }
        }
    });
    if out.is_empty() {
        return Err(AnalysisError::NoPatternFound(stmt.id.to_string()));
    }
    Ok(out)
}

pub fn find(model: &SourceModel, rel: &[RelevantExpression], cfg: &AnalyzerConfig) -> Vec<SuspiciousLocation> {
    let mut set = LocationSet::default();
    for r in rel {
        let depth = r.stack_depth;
        let at = &r.origin_statement;
        match r.role {
            Role::ArrayRef => {
                set.push(at, &r.expr, &[ArrayVariableWrong], depth);
                set.push_missing_conditional(model, r);
                let Some(var) = var_name(&r.expr) else { continue };
                let allocations: Vec<_> = backward_defs(model, at, var, false, cfg.depth_limit)
                    .into_iter()
                    .filter(|d| d.defining_expr.is_some())
                    .collect();
                set.push_defs(&allocations, &[WrongArrayInitialization], depth);
                for alloc in &allocations {
                    let Some(ExprKind::ArrayCreation { dimensions, .. }) =
                        alloc.defining_expr.as_ref().map(|e| &e.kind)
                    else {
                        continue;
                    };
                    let sized: Vec<&Expr> = dimensions
                        .iter()
                        .filter(|d| !crate::dataflow::vars_of(d).is_empty())
                        .collect();
                    for d in &sized {
                        set.push(&alloc.statement, d, &[WrongVariableValue], depth);
                    }
                    let limit = cfg.depth_limit.saturating_sub(1).max(1);
                    for d in &sized {
                        for v in crate::dataflow::vars_of(d) {
                            let defs: Vec<_> = backward_defs(model, &alloc.statement, &v, true, limit)
                                .into_iter()
                                .filter(|s| !is_param_site(s))
                                .collect();
                            set.push_defs(&defs, &[WrongVariableValue], depth);
                        }
                    }
                }
            }
            Role::IndexExpr => {
                set.push(at, &r.expr, &[IndexExpressionWrong], depth);
                let defs = defs_of_vars(model, at, &r.expr, cfg);
                set.push_defs(&defs, &[WrongVariableValue], depth);
            }
            _ => {}
        }
    }
    set.into_vec()
}

fn has_array_access(stmt: &Stmt) -> bool {
    let mut found = false;
    walk_own(stmt, &mut |e| found |= matches!(e.kind, ExprKind::ArrayAccess { .. }));
    found
}

impl ExceptionAnalyzer for ArrayIndexAnalyzer {
    fn name(&self) -> &'static str {
        "aioobe"
    }

    fn exception_type_names(&self) -> &'static [&'static str] {
        &["java.lang.ArrayIndexOutOfBoundsException"]
    }

    fn max_relevant_statements(&self) -> usize {
        1
    }

    fn licensed_faults(&self) -> &'static [GuessedFault] {
        LICENSED
    }

    fn prefers(&self, stmt: &Stmt, _callee: Option<&str>, _cfg: &AnalyzerConfig) -> bool {
        has_array_access(stmt)
    }

    fn select(&self, statements: &[Option<Resolved<'_>>], _cfg: &AnalyzerConfig) -> Result<Vec<RelevantExpression>, AnalysisError> {
        match statements.first() {
            Some(Some(r)) => select(r.ctx.stmt, r.depth()),
            _ => Err(AnalysisError::NoPatternFound("the raising frame".into())),
        }
    }

    fn find(&self, model: &SourceModel, rel: &[RelevantExpression], cfg: &AnalyzerConfig) -> Vec<SuspiciousLocation> {
        find(model, rel, cfg)
    }
}

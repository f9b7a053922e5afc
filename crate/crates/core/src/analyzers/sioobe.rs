//! `StringIndexOutOfBoundsException`: `stringVar.op(...exprIndex...)`.

use super::*;
use crate::dataflow::backward_defs;
use crate::source_model::LiteralKind;
use GuessedFault::*;

pub struct StringIndexAnalyzer;

const LICENSED: &[GuessedFault] = &[
    StringVariableWrong,
    MissingConditional,
    WrongValue,
    IndexExpressionWrong,
    WrongVariableValue,
];

/// Argument positions that hold an index, when fixed by the method.
fn index_positions(method: &str, argc: usize) -> Option<Vec<usize>> {
    Some(match method {
        "charAt" | "codePointAt" | "deleteCharAt" | "setCharAt" => vec![0],
        "substring" | "subSequence" => (0..argc.min(2)).collect(),
        "indexOf" | "lastIndexOf" if argc == 2 => vec![1],
        "indexOf" | "lastIndexOf" => vec![],
        _ => return None,
    })
}

fn looks_integral(e: &Expr, types: &dyn Fn(&str) -> Option<TypeRef>) -> bool {
    match &e.kind {
        ExprKind::Literal(l) => matches!(l.kind, LiteralKind::Int | LiteralKind::Long),
        ExprKind::VarRef(v) => types(v).is_none_or(|t| t.is_integral()),
        _ => true,
    }
}

/// Receiver typed or named as a string.
fn is_string_receiver(e: &Expr, types: &dyn Fn(&str) -> Option<TypeRef>) -> bool {
    match var_name(e) {
        Some(v) => types(v).is_none_or(|t| t.is_string_like()),
        None => !matches!(e.kind, ExprKind::This | ExprKind::Super),
    }
}

/// `(receiver, StringRef)` then each index argument `(arg, IndexExpr)`
/// for every call of an index-taking string method.
pub fn select(
    stmt: &Stmt,
    types: &dyn Fn(&str) -> Option<TypeRef>,
    methods: &[String],
    depth: u32,
) -> Result<Vec<RelevantExpression>, AnalysisError> {
    let mut out = Vec::new();
    walk_own(stmt, &mut |e| {
        let ExprKind::MethodCall {
            receiver: Some(recv),
            name,
            args,
        } = &e.kind
        else {
            return;
        };
        if !methods.iter().any(|m| m == name) || !is_string_receiver(recv, types) {
            return;
        }
        let idx: Vec<&Expr> = match index_positions(name, args.len()) {
            Some(ps) => ps.into_iter().filter_map(|p| args.get(p)).collect(),
            None => args.iter().filter(|a| looks_integral(a, types)).collect(),
        };
        if idx.is_empty() {
            return;
        }
        let mk = |x: &Expr, role| RelevantExpression {
            expr: x.clone(),
            role,
            origin_statement: stmt.id.clone(),
            stack_depth: depth,
        };
        out.push(mk(recv, Role::StringRef));
        out.extend(idx.into_iter().map(|a| mk(a, Role::IndexExpr)));
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
            Role::StringRef => {
                set.push(at, &r.expr, &[StringVariableWrong], depth);
                set.push_missing_conditional(model, r);
                if let Some(v) = var_name(&r.expr) {
                    let defs = backward_defs(model, at, v, false, cfg.depth_limit);
                    set.push_defs(&defs, &[WrongValue, MissingConditional], depth);
                }
            }
            Role::IndexExpr => {
                set.push(at, &r.expr, &[IndexExpressionWrong], depth);
                let defs = defs_of_vars(model, at, &r.expr, cfg);
                set.push_defs(&defs, &[WrongVariableValue, MissingConditional], depth);
            }
            _ => {}
        }
    }
    set.into_vec()
}

impl ExceptionAnalyzer for StringIndexAnalyzer {
    fn name(&self) -> &'static str {
        "sioobe"
    }

    fn exception_type_names(&self) -> &'static [&'static str] {
        &["java.lang.StringIndexOutOfBoundsException"]
    }

    fn max_relevant_statements(&self) -> usize {
        1
    }

    fn licensed_faults(&self) -> &'static [GuessedFault] {
        LICENSED
    }

    fn prefers(&self, stmt: &Stmt, _callee: Option<&str>, cfg: &AnalyzerConfig) -> bool {
        let mut found = false;
        walk_own(stmt, &mut |e| {
            if let ExprKind::MethodCall {
                receiver: Some(_),
                name,
                ..
            } = &e.kind
            {
                found |= cfg.string_index_methods.iter().any(|m| m == name);
            }
        });
        found
    }

    fn select(&self, statements: &[Option<Resolved<'_>>], cfg: &AnalyzerConfig) -> Result<Vec<RelevantExpression>, AnalysisError> {
        match statements.first() {
            Some(Some(r)) => select(
                r.ctx.stmt,
                &|v| r.declared_type(v),
                &cfg.string_index_methods,
                r.depth(),
            ),
            _ => Err(AnalysisError::NoPatternFound("the raising frame".into())),
        }
    }

    fn find(&self, model: &SourceModel, rel: &[RelevantExpression], cfg: &AnalyzerConfig) -> Vec<SuspiciousLocation> {
        find(model, rel, cfg)
    }
}

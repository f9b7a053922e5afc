//! Bounded backward data-flow over one method plus its parameters and the
//! fields of the enclosing classes.

use std::collections::HashSet;

use serde::Serialize;

use crate::source_model::{
    Expr, ExprKind, ForInit, MethodContext, SourceModel, StatementId, Stmt, StmtKind,
};

pub const DEFAULT_DEPTH_LIMIT: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DefinitionKind {
    LocalDecl,
    Assignment,
    FieldInitializer,
    Parameter,
    LoopHeader,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefinitionSite {
    pub statement: StatementId,
    pub defined_var: String,
    /// Right-hand side or initializer; absent for parameters and
    /// fields declared without initializer.
    pub defining_expr: Option<Expr>,
    pub kind: DefinitionKind,
    /// Recursion depth at which the site was found (0 = direct definition).
    pub depth: u32,
}

/// Result of a traced query.
#[derive(Debug, Clone, Default)]
pub struct DefsTrace {
    pub sites: Vec<DefinitionSite>,
    /// Distinct statements examined, summed over recursion levels.
    pub visits: usize,
    pub diagnostics: Vec<String>,
}

/// Distinct variable names in `e`, left to right, depth first. `this.f`
/// counts as `f`; other field accesses contribute their target's variables.
pub fn vars_of(e: &Expr) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    fn go(e: &Expr, out: &mut Vec<String>) {
        match &e.kind {
            ExprKind::VarRef(n) => {
                if !out.iter().any(|x| x == n) {
                    out.push(n.clone());
                }
            }
            ExprKind::FieldAccess { target, name } if matches!(target.kind, ExprKind::This) => {
                if !out.iter().any(|x| x == name) {
                    out.push(name.clone());
                }
            }
            _ => {
                for c in e.children() {
                    go(c, out);
                }
            }
        }
    }
    go(e, &mut out);
    out
}

fn names_var(e: &Expr, var: &str) -> bool {
    match &e.kind {
        ExprKind::VarRef(n) => n == var,
        ExprKind::FieldAccess { target, name } => matches!(target.kind, ExprKind::This) && name == var,
        _ => false,
    }
}

/// Nested assignment or increment of `var` inside `e`.
fn nested_def<'a>(e: &'a Expr, var: &str) -> Option<&'a Expr> {
    let mut found = None;
    e.walk(&mut |x| {
        if found.is_some() {
            return;
        }
        match &x.kind {
            ExprKind::Assign { target, value, .. } if names_var(target, var) => found = Some(&**value),
            ExprKind::Unary { op, operand } if op.is_increment() && names_var(operand, var) => {
                found = Some(x)
            }
            _ => {}
        }
    });
    found
}

/// How `s` defines `var`, if it does.
fn definition_in(s: &Stmt, var: &str) -> Option<(DefinitionKind, Option<Expr>)> {
    match &s.kind {
        StmtKind::LocalVarDecl { name, init, .. } if name == var => {
            return init.as_ref().map(|e| (DefinitionKind::LocalDecl, Some(e.clone())));
        }
        StmtKind::Assign { lhs, rhs, .. } if names_var(lhs, var) => {
            return Some((DefinitionKind::Assignment, Some(rhs.clone())));
        }
        StmtKind::For { init, update, .. } => {
            let init_expr = match init {
                ForInit::Decl { vars, .. } => vars
                    .iter()
                    .find(|(n, _)| n == var)
                    .map(|(_, e)| e.clone()),
                ForInit::Exprs(es) => es.iter().find_map(|e| nested_def(e, var)).map(|e| Some(e.clone())),
            };
            let update_expr = update.iter().find(|e| nested_def(e, var).is_some());
            return match (init_expr, update_expr) {
                (Some(Some(e)), _) => Some((DefinitionKind::LoopHeader, Some(e))),
                (Some(None), Some(u)) | (None, Some(u)) => {
                    Some((DefinitionKind::LoopHeader, Some(u.clone())))
                }
                (Some(None), None) => Some((DefinitionKind::LoopHeader, None)),
                (None, None) => None,
            };
        }
        StmtKind::ForEach { var: v, iterable, .. } if v == var => {
            return Some((DefinitionKind::LoopHeader, Some(iterable.clone())));
        }
        _ => {}
    }
    s.own_exprs()
        .into_iter()
        .find_map(|e| nested_def(e, var))
        .map(|e| (DefinitionKind::Assignment, Some(e.clone())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Binding {
    Local(StatementId),
    Loop(StatementId),
    Catch(StatementId, usize),
    Param(StatementId),
    Field(StatementId),
    Unknown,
}

struct Node<'m> {
    stmt: &'m Stmt,
    parent: Option<usize>,
}

/// Pre-order statement index of one method.
struct MethodIndex<'m> {
    ctx: MethodContext<'m>,
    nodes: Vec<Node<'m>>,
}

impl<'m> MethodIndex<'m> {
    fn new(ctx: MethodContext<'m>) -> Self {
        fn push<'m>(s: &'m Stmt, parent: Option<usize>, nodes: &mut Vec<Node<'m>>) {
            let idx = nodes.len();
            nodes.push(Node { stmt: s, parent });
            for c in s.children() {
                push(c, Some(idx), nodes);
            }
        }
        let mut nodes = Vec::new();
        for s in ctx.method.statements() {
            push(s, None, &mut nodes);
        }
        Self { ctx, nodes }
    }

    fn position(&self, id: &StatementId) -> Option<usize> {
        self.nodes.iter().position(|n| n.stmt.id == *id)
    }

    fn ancestors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.nodes[idx].parent, move |&p| self.nodes[p].parent)
    }

    fn is_ancestor(&self, anc: usize, idx: usize) -> bool {
        self.ancestors(idx).any(|a| a == anc)
    }

    /// Siblings preceding `idx` in its enclosing statement list.
    fn preceding_siblings(&self, idx: usize) -> Vec<&'m Stmt> {
        let me = self.nodes[idx].stmt;
        let list: Vec<&'m Stmt> = match self.nodes[idx].parent {
            Some(p) => self.nodes[p].stmt.children(),
            None => self.ctx.method.statements().iter().collect(),
        };
        list.into_iter().take_while(|s| !std::ptr::eq(*s, me)).collect()
    }

    /// Declaration that `var` refers to when used in statement `idx`.
    fn binding(&self, idx: usize, var: &str) -> Binding {
        let s = self.nodes[idx].stmt;
        match &s.kind {
            StmtKind::LocalVarDecl { name, .. } if name == var => return Binding::Local(s.id.clone()),
            StmtKind::For {
                init: ForInit::Decl { vars, .. },
                ..
            } if vars.iter().any(|(n, _)| n == var) => return Binding::Loop(s.id.clone()),
            StmtKind::ForEach { var: v, .. } if v == var => return Binding::Loop(s.id.clone()),
            _ => {}
        }
        let mut cur = idx;
        loop {
            for sib in self.preceding_siblings(cur).into_iter().rev() {
                if let StmtKind::LocalVarDecl { name, .. } = &sib.kind {
                    if name == var {
                        return Binding::Local(sib.id.clone());
                    }
                }
            }
            let Some(p) = self.nodes[cur].parent else { break };
            let ps = self.nodes[p].stmt;
            match &ps.kind {
                StmtKind::For {
                    init: ForInit::Decl { vars, .. },
                    ..
                } if vars.iter().any(|(n, _)| n == var) => return Binding::Loop(ps.id.clone()),
                StmtKind::ForEach { var: v, .. } if v == var => return Binding::Loop(ps.id.clone()),
                StmtKind::Try { catches, .. } => {
                    let child = self.nodes[cur].stmt;
                    if let Some(k) = catches
                        .iter()
                        .position(|c| std::ptr::eq(&*c.body, child) && c.param == var)
                    {
                        return Binding::Catch(ps.id.clone(), k);
                    }
                }
                _ => {}
            }
            cur = p;
        }
        if let Some(p) = self.ctx.method.param(var) {
            return Binding::Param(p.id.clone());
        }
        if let Some(f) = self.ctx.field(var) {
            return Binding::Field(f.id.clone());
        }
        Binding::Unknown
    }

    fn enclosing_loops(&self, idx: usize) -> Vec<usize> {
        self.ancestors(idx).filter(|&a| self.nodes[a].stmt.is_loop()).collect()
    }

    /// Direct definitions of `var` reaching statement `use_idx`, nearest first.
    /// Also returns the statements examined.
    fn direct_defs(&self, use_idx: usize, var: &str, examined: &mut HashSet<usize>) -> Result<Vec<(usize, DefinitionKind, Option<Expr>)>, Binding> {
        let binding = self.binding(use_idx, var);
        if binding == Binding::Unknown {
            return Err(binding);
        }
        let mut preceding = Vec::new();
        let mut loop_carried = Vec::new();
        let loops = self.enclosing_loops(use_idx);
        for (i, n) in self.nodes.iter().enumerate() {
            if i == use_idx {
                continue;
            }
            let before = i < use_idx;
            let carried = !before && loops.iter().any(|&l| self.is_ancestor(l, i));
            if !(before || carried) {
                continue;
            }
            examined.insert(i);
            let Some((kind, e)) = definition_in(n.stmt, var) else { continue };
            if self.binding(i, var) != binding {
                continue;
            }
            if before {
                preceding.push((i, kind, e));
            } else {
                loop_carried.push((i, kind, e));
            }
        }
        preceding.reverse();
        preceding.extend(loop_carried);
        Ok(preceding)
    }
}

/// Definitions of `var` reaching `use_site`; see [`backward_defs_traced`].
pub fn backward_defs(
    model: &SourceModel,
    use_site: &StatementId,
    var: &str,
    recursive: bool,
    depth_limit: u32,
) -> Vec<DefinitionSite> {
    backward_defs_traced(model, use_site, var, recursive, depth_limit).sites
}

/// Finds, nearest first, the statements defining `var` before `use_site`
/// (or later inside an enclosing loop), then the parameter or field it
/// refers to. With `recursive`, variables of each defining expression are
/// followed in turn, breadth first, while the depth stays below `depth_limit`.
pub fn backward_defs_traced(
    model: &SourceModel,
    use_site: &StatementId,
    var: &str,
    recursive: bool,
    depth_limit: u32,
) -> DefsTrace {
    let mut trace = DefsTrace::default();
    let Some(ctx) = model.locate(use_site) else {
        trace
            .diagnostics
            .push(format!("use site {use_site} is not a modelled statement"));
        return trace;
    };
    let index = MethodIndex::new(ctx.method.clone());
    let Some(start) = index.position(use_site) else {
        return trace;
    };

    let mut seen: HashSet<(StatementId, String)> = HashSet::new();
    let mut frontier: Vec<(usize, String)> = vec![(start, var.to_string())];
    let mut depth = 0u32;
    while !frontier.is_empty() && depth < depth_limit.max(1) {
        let mut examined = HashSet::new();
        let mut next = Vec::new();
        for (use_idx, v) in frontier {
            let defs = match index.direct_defs(use_idx, &v, &mut examined) {
                Ok(d) => d,
                Err(_) => {
                    trace.diagnostics.push(format!(
                        "unknown variable `{v}` at {}",
                        index.nodes[use_idx].stmt.id
                    ));
                    continue;
                }
            };
            for (i, kind, e) in defs {
                let id = index.nodes[i].stmt.id.clone();
                if !seen.insert((id.clone(), v.clone())) {
                    continue;
                }
                if let Some(e) = &e {
                    if recursive {
                        for w in vars_of(e) {
                            next.push((i, w));
                        }
                    }
                }
                trace.sites.push(DefinitionSite {
                    statement: id,
                    defined_var: v.clone(),
                    defining_expr: e,
                    kind,
                    depth,
                });
            }
            match index.binding(use_idx, &v) {
                Binding::Param(pid) if seen.insert((pid.clone(), v.clone())) => {
                    examined.insert(usize::MAX);
                    trace.sites.push(DefinitionSite {
                        statement: pid,
                        defined_var: v.clone(),
                        defining_expr: None,
                        kind: DefinitionKind::Parameter,
                        depth,
                    });
                }
                Binding::Field(fid) if seen.insert((fid.clone(), v.clone())) => {
                    let init = index.ctx.field(&v).and_then(|f| f.init.clone());
                    trace.sites.push(DefinitionSite {
                        statement: fid,
                        defined_var: v.clone(),
                        defining_expr: init,
                        kind: DefinitionKind::FieldInitializer,
                        depth,
                    });
                }
                _ => {}
            }
        }
        trace.visits += examined.len();
        if !recursive {
            break;
        }
        frontier = next;
        depth += 1;
    }
    trace
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source_model::parse_expression;

    fn vars(src: &str) -> Vec<String> {
        vars_of(&parse_expression("t", src).unwrap())
    }

    #[test]
    fn vars_of_examples() {
        assert_eq!(vars("i + 1"), ["i"]);
        assert_eq!(vars("s.length()"), ["s"]);
        assert_eq!(vars("a[i * j]"), ["a", "i", "j"]);
        assert_eq!(vars("this.f + g(x, x)"), ["f", "x"]);
        assert!(vars("3 + 4").is_empty());
    }

    const SRC: &str = "class C {
    int k = 4;
    int m(int p, int[] a) {
        int x = p + 1;
        int y;
        for (int i = 0; i < a.length; i++) {
            y = a[i];
            x = y * 2;
        }
        if (x > 0) {
            int z = 1;
        }
        int z = x + k;
        return z + x;
    }
}";

    fn sites(line: u32, var: &str, recursive: bool) -> Vec<(u32, DefinitionKind, u32)> {
        let model = SourceModel::from_sources([("C.java", SRC)]);
        backward_defs(&model, &StatementId::new("C.java", line, 0), var, recursive, DEFAULT_DEPTH_LIMIT)
            .into_iter()
            .map(|s| (s.statement.line, s.kind, s.depth))
            .collect()
    }

    #[test]
    fn loop_variable_gives_header() {
        assert_eq!(sites(7, "i", false), [(6, DefinitionKind::LoopHeader, 0)]);
    }

    #[test]
    fn preceding_and_loop_carried_definitions() {
        use DefinitionKind::*;
        // use inside the loop: the assignment later in the loop body reaches via the back edge
        assert_eq!(sites(7, "x", false), [(4, LocalDecl, 0), (8, Assignment, 0)]);
        assert_eq!(sites(13, "x", false), [(8, Assignment, 0), (4, LocalDecl, 0)]);
    }

    #[test]
    fn scoping_ignores_sibling_block_locals() {
        use DefinitionKind::*;
        assert_eq!(sites(14, "z", false), [(13, LocalDecl, 0)]);
    }

    #[test]
    fn recursion_follows_defining_expressions() {
        use DefinitionKind::*;
        assert_eq!(
            sites(14, "z", true),
            [
                (13, LocalDecl, 0),
                (8, Assignment, 1),
                (4, LocalDecl, 1),
                (2, FieldInitializer, 1),
                (7, Assignment, 2),
                (3, Parameter, 2),
            ]
        );
    }

    #[test]
    fn unknown_variable_is_empty_with_diagnostic() {
        let model = SourceModel::from_sources([("C.java", SRC)]);
        let t = backward_defs_traced(&model, &StatementId::new("C.java", 13, 0), "nope", true, 3);
        assert!(t.sites.is_empty());
        assert_eq!(t.diagnostics.len(), 1);
    }
}

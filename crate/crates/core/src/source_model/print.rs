//! Java-like pretty printing and the S-expression AST dump.

use std::fmt::Write as _;

use super::ast::*;

const PREC_ASSIGN: u8 = 1;
const PREC_COND: u8 = 2;
const PREC_INSTANCEOF: u8 = 9;
const PREC_UNARY: u8 = 13;
const PREC_POSTFIX: u8 = 14;
const PREC_PRIMARY: u8 = 15;

fn prec(e: &Expr) -> u8 {
    use ExprKind::*;
    match &e.kind {
        Assign { .. } => PREC_ASSIGN,
        Conditional { .. } => PREC_COND,
        Binary { op, .. } => op.precedence(),
        InstanceOf { .. } => PREC_INSTANCEOF,
        Unary { op, .. } if op.is_postfix() => PREC_POSTFIX,
        Unary { .. } | Cast { .. } => PREC_UNARY,
        // `new int[n]` may not be indexed or dereferenced without parentheses
        ArrayCreation { .. } => PREC_UNARY,
        ArrayInit(_) => PREC_ASSIGN,
        _ => PREC_PRIMARY,
    }
}

/// Renders an expression as Java source, adding only the parentheses its
/// structure requires.
pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, &mut s);
    s
}

fn write_sub(e: &Expr, min: u8, out: &mut String) {
    if prec(e) < min {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}

fn write_list(items: &[Expr], out: &mut String) {
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_sub(a, PREC_ASSIGN + 1, out);
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    use ExprKind::*;
    match &e.kind {
        VarRef(n) => out.push_str(n),
        This => out.push_str("this"),
        Super => out.push_str("super"),
        FieldAccess { target, name } => {
            write_sub(target, PREC_POSTFIX, out);
            out.push('.');
            out.push_str(name);
        }
        ArrayAccess { array, index } => {
            write_sub(array, PREC_POSTFIX, out);
            out.push('[');
            write_expr(index, out);
            out.push(']');
        }
        MethodCall {
            receiver,
            name,
            args,
        } => {
            if let Some(r) = receiver {
                write_sub(r, PREC_POSTFIX, out);
                out.push('.');
            }
            out.push_str(name);
            out.push('(');
            write_list(args, out);
            out.push(')');
        }
        New {
            ty,
            args,
            anonymous_body,
        } => {
            out.push_str("new ");
            out.push_str(ty.as_str());
            out.push('(');
            write_list(args, out);
            out.push(')');
            if *anonymous_body {
                out.push_str(" {}");
            }
        }
        ArrayCreation {
            element_type,
            dimensions,
            extra_dims,
            initializer,
        } => {
            out.push_str("new ");
            out.push_str(element_type.as_str());
            for d in dimensions {
                out.push('[');
                write_expr(d, out);
                out.push(']');
            }
            for _ in 0..*extra_dims {
                out.push_str("[]");
            }
            if let Some(items) = initializer {
                out.push_str(" {");
                write_list(items, out);
                out.push('}');
            }
        }
        ArrayInit(items) => {
            out.push('{');
            write_list(items, out);
            out.push('}');
        }
        Literal(l) => out.push_str(&l.text),
        Binary { op, lhs, rhs } => {
            let p = op.precedence();
            write_sub(lhs, p, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_sub(rhs, p + 1, out);
        }
        Unary { op, operand } => {
            if op.is_postfix() {
                write_sub(operand, PREC_POSTFIX, out);
                out.push_str(op.symbol());
            } else {
                out.push_str(op.symbol());
                let mut inner = String::new();
                write_sub(operand, PREC_UNARY, &mut inner);
                let sym_last = op.symbol().chars().last();
                if matches!(sym_last, Some('+') | Some('-')) && inner.starts_with(['+', '-']) {
                    out.push('(');
                    out.push_str(&inner);
                    out.push(')');
                } else {
                    out.push_str(&inner);
                }
            }
        }
        Cast { ty, expr } => {
            out.push('(');
            out.push_str(ty.as_str());
            out.push_str(") ");
            // a non-primitive cast of `+x`/`-x` would re-read as a binary operation
            let mut inner = String::new();
            write_sub(expr, PREC_UNARY, &mut inner);
            if inner.starts_with(['+', '-']) {
                out.push('(');
                out.push_str(&inner);
                out.push(')');
            } else {
                out.push_str(&inner);
            }
        }
        Assign { target, op, value } => {
            write_sub(target, PREC_POSTFIX, out);
            out.push(' ');
            if let Some(op) = op {
                out.push_str(op.symbol());
            }
            out.push_str("= ");
            write_sub(value, PREC_ASSIGN, out);
        }
        Conditional {
            cond,
            then_expr,
            else_expr,
        } => {
            write_sub(cond, PREC_COND + 1, out);
            out.push_str(" ? ");
            write_sub(then_expr, PREC_COND, out);
            out.push_str(" : ");
            write_sub(else_expr, PREC_COND, out);
        }
        InstanceOf { expr, ty } => {
            write_sub(expr, PREC_INSTANCEOF, out);
            out.push_str(" instanceof ");
            out.push_str(ty.as_str());
        }
        ClassLiteral(ty) => {
            out.push_str(ty.as_str());
            out.push_str(".class");
        }
    }
}

// ---- Java statement printer -------------------------------------------------

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

/// Renders a method declaration as Java source.
pub fn method_to_string(m: &MethodDecl) -> String {
    let mut out = String::new();
    if let Some(rt) = &m.return_type {
        out.push_str(rt.as_str());
        out.push(' ');
    }
    out.push_str(&m.name);
    out.push('(');
    for (i, p) in m.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{} {}", p.ty, p.name);
    }
    out.push(')');
    match &m.body {
        MethodBody::Parsed(stmts) => {
            out.push_str(" {\n");
            for s in stmts {
                write_stmt(s, 1, &mut out);
            }
            out.push_str("}\n");
        }
        MethodBody::Opaque => out.push_str(" {}\n"),
        MethodBody::Absent => out.push_str(";\n"),
    }
    out
}

pub fn stmt_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(s, 0, &mut out);
    out
}

fn write_local(ty: &TypeRef, name: &str, init: &Option<Expr>, out: &mut String) {
    let _ = write!(out, "{ty} {name}");
    if let Some(e) = init {
        out.push_str(" = ");
        write_expr(e, out);
    }
}

/// Writes a nested statement; blocks stay on the header line.
fn write_body(s: &Stmt, depth: usize, out: &mut String) {
    if let StmtKind::Block(stmts) = &s.kind {
        out.push_str(" {\n");
        for c in stmts {
            write_stmt(c, depth + 1, out);
        }
        indent(out, depth);
        out.push('}');
    } else {
        out.push('\n');
        write_stmt(s, depth + 1, out);
        indent(out, depth);
    }
}

fn write_stmt(s: &Stmt, depth: usize, out: &mut String) {
    use StmtKind::*;
    indent(out, depth);
    match &s.kind {
        LocalVarDecl { name, ty, init } => {
            write_local(ty, name, init, out);
            out.push_str(";\n");
        }
        Assign { lhs, op, rhs } => {
            let e = Expr::new(
                ExprKind::Assign {
                    target: Box::new(lhs.clone()),
                    op: *op,
                    value: Box::new(rhs.clone()),
                },
                s.span,
            );
            write_expr(&e, out);
            out.push_str(";\n");
        }
        If {
            cond,
            then_branch,
            else_branch,
        } => {
            out.push_str("if (");
            write_expr(cond, out);
            out.push(')');
            write_body(then_branch, depth, out);
            if let Some(e) = else_branch {
                if !then_branch.is_block() {
                    // unbraced then-branch already ended its line
                } else {
                    out.push(' ');
                }
                out.push_str("else");
                write_body(e, depth, out);
            }
            out.push('\n');
        }
        For {
            init,
            cond,
            update,
            body,
        } => {
            out.push_str("for (");
            match init {
                ForInit::Decl { ty, vars } => {
                    let _ = write!(out, "{ty} ");
                    for (i, (n, e)) in vars.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(n);
                        if let Some(e) = e {
                            out.push_str(" = ");
                            write_expr(e, out);
                        }
                    }
                }
                ForInit::Exprs(es) => write_list(es, out),
            }
            out.push_str("; ");
            if let Some(c) = cond {
                write_expr(c, out);
            }
            out.push_str("; ");
            write_list(update, out);
            out.push(')');
            write_body(body, depth, out);
            out.push('\n');
        }
        ForEach {
            var,
            ty,
            iterable,
            body,
        } => {
            let _ = write!(out, "for ({ty} {var} : ");
            write_expr(iterable, out);
            out.push(')');
            write_body(body, depth, out);
            out.push('\n');
        }
        While { cond, body } => {
            out.push_str("while (");
            write_expr(cond, out);
            out.push(')');
            write_body(body, depth, out);
            out.push('\n');
        }
        DoWhile { body, cond } => {
            out.push_str("do");
            write_body(body, depth, out);
            out.push_str(" while (");
            write_expr(cond, out);
            out.push_str(");\n");
        }
        Return(e) => {
            out.push_str("return");
            if let Some(e) = e {
                out.push(' ');
                write_expr(e, out);
            }
            out.push_str(";\n");
        }
        Throw(e) => {
            out.push_str("throw ");
            write_expr(e, out);
            out.push_str(";\n");
        }
        ExprStmt(e) => {
            write_expr(e, out);
            out.push_str(";\n");
        }
        Block(stmts) => {
            out.push_str("{\n");
            for c in stmts {
                write_stmt(c, depth + 1, out);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
        Try {
            resources,
            body,
            catches,
            finally,
        } => {
            out.push_str("try");
            if !resources.is_empty() {
                out.push_str(" (");
                for (i, r) in resources.iter().enumerate() {
                    if i > 0 {
                        out.push_str("; ");
                    }
                    match &r.kind {
                        LocalVarDecl { name, ty, init } => write_local(ty, name, init, out),
                        ExprStmt(e) => write_expr(e, out),
                        _ => {}
                    }
                }
                out.push(')');
            }
            write_body(body, depth, out);
            for c in catches {
                let _ = write!(out, " catch ({} {})", c.ty, c.param);
                write_body(&c.body, depth, out);
            }
            if let Some(f) = finally {
                out.push_str(" finally");
                write_body(f, depth, out);
            }
            out.push('\n');
        }
        Switch { selector, cases } => {
            out.push_str("switch (");
            write_expr(selector, out);
            out.push_str(") {\n");
            for c in cases {
                indent(out, depth + 1);
                if c.labels.is_empty() {
                    out.push_str("default:\n");
                } else {
                    out.push_str("case ");
                    write_list(&c.labels, out);
                    out.push_str(":\n");
                }
                for st in &c.body {
                    write_stmt(st, depth + 2, out);
                }
            }
            indent(out, depth);
            out.push_str("}\n");
        }
        Sync { lock, body } => {
            out.push_str("synchronized (");
            write_expr(lock, out);
            out.push(')');
            write_body(body, depth, out);
            out.push('\n');
        }
        Labeled { label, body } => {
            let _ = write!(out, "{label}:");
            write_body(body, depth, out);
            out.push('\n');
        }
        Break(l) | Continue(l) => {
            out.push_str(if matches!(s.kind, Break(_)) { "break" } else { "continue" });
            if let Some(l) = l {
                out.push(' ');
                out.push_str(l);
            }
            out.push_str(";\n");
        }
        Assert { cond, message } => {
            out.push_str("assert ");
            write_expr(cond, out);
            if let Some(m) = message {
                out.push_str(" : ");
                write_expr(m, out);
            }
            out.push_str(";\n");
        }
        Empty => out.push_str(";\n"),
        Opaque => out.push_str("/* opaque */;\n"),
    }
}

// ---- S-expression dump ------------------------------------------------------

fn sexpr_expr(e: &Expr, out: &mut String) {
    use ExprKind::*;
    let list = |items: &[Expr], out: &mut String| {
        for a in items {
            out.push(' ');
            sexpr_expr(a, out);
        }
    };
    match &e.kind {
        VarRef(n) => {
            let _ = write!(out, "(var {n})");
        }
        This => out.push_str("(this)"),
        Super => out.push_str("(super)"),
        FieldAccess { target, name } => {
            out.push_str("(field ");
            sexpr_expr(target, out);
            let _ = write!(out, " {name})");
        }
        ArrayAccess { array, index } => {
            out.push_str("(index ");
            sexpr_expr(array, out);
            out.push(' ');
            sexpr_expr(index, out);
            out.push(')');
        }
        MethodCall {
            receiver,
            name,
            args,
        } => {
            let _ = write!(out, "(call {name}");
            match receiver {
                Some(r) => {
                    out.push(' ');
                    sexpr_expr(r, out);
                }
                None => out.push_str(" _"),
            }
            list(args, out);
            out.push(')');
        }
        New {
            ty,
            args,
            anonymous_body,
        } => {
            let _ = write!(out, "(new {ty}");
            list(args, out);
            if *anonymous_body {
                out.push_str(" (anonymous-body)");
            }
            out.push(')');
        }
        ArrayCreation {
            element_type,
            dimensions,
            extra_dims,
            initializer,
        } => {
            let _ = write!(out, "(new-array {element_type} (dims");
            list(dimensions, out);
            let _ = write!(out, ") (extra {extra_dims})");
            if let Some(items) = initializer {
                out.push_str(" (init");
                list(items, out);
                out.push(')');
            }
            out.push(')');
        }
        ArrayInit(items) => {
            out.push_str("(array-init");
            list(items, out);
            out.push(')');
        }
        Literal(l) => {
            let kind = match l.kind {
                LiteralKind::Int => "int",
                LiteralKind::Long => "long",
                LiteralKind::Float => "float",
                LiteralKind::Double => "double",
                LiteralKind::Char => "char",
                LiteralKind::String => "string",
                LiteralKind::Bool => "bool",
                LiteralKind::Null => "null",
            };
            let _ = write!(out, "(lit {kind} {:?})", l.text);
        }
        Binary { op, lhs, rhs } => {
            let _ = write!(out, "(binary {} ", op.symbol());
            sexpr_expr(lhs, out);
            out.push(' ');
            sexpr_expr(rhs, out);
            out.push(')');
        }
        Unary { op, operand } => {
            let tag = if op.is_postfix() { "postfix" } else { "unary" };
            let _ = write!(out, "({tag} {} ", op.symbol());
            sexpr_expr(operand, out);
            out.push(')');
        }
        Cast { ty, expr } => {
            let _ = write!(out, "(cast {ty} ");
            sexpr_expr(expr, out);
            out.push(')');
        }
        Assign { target, op, value } => {
            let sym = op.map(|o| format!("{}=", o.symbol())).unwrap_or_else(|| "=".into());
            let _ = write!(out, "(assign {sym} ");
            sexpr_expr(target, out);
            out.push(' ');
            sexpr_expr(value, out);
            out.push(')');
        }
        Conditional {
            cond,
            then_expr,
            else_expr,
        } => {
            out.push_str("(cond ");
            sexpr_expr(cond, out);
            out.push(' ');
            sexpr_expr(then_expr, out);
            out.push(' ');
            sexpr_expr(else_expr, out);
            out.push(')');
        }
        InstanceOf { expr, ty } => {
            out.push_str("(instanceof ");
            sexpr_expr(expr, out);
            let _ = write!(out, " {ty})");
        }
        ClassLiteral(ty) => {
            let _ = write!(out, "(class-lit {ty})");
        }
    }
}

pub fn expr_to_sexpr(e: &Expr) -> String {
    let mut s = String::new();
    sexpr_expr(e, &mut s);
    s
}

struct Dumper {
    out: String,
    lines: bool,
}

impl Dumper {
    fn open(&mut self, depth: usize, head: &str) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        self.out.push('(');
        self.out.push_str(head);
    }

    fn at_id(&mut self, id: &StatementId) {
        if self.lines {
            let _ = write!(self.out, " @{}:{}", id.line, id.ordinal);
        }
    }

    fn at_span(&mut self, span: &Span) {
        if self.lines {
            let _ = write!(self.out, " @{}-{}", span.start_line, span.end_line);
        }
    }

    fn expr(&mut self, e: &Expr) {
        self.out.push(' ');
        sexpr_expr(e, &mut self.out);
    }

    fn opt_expr(&mut self, e: &Option<Expr>) {
        match e {
            Some(e) => self.expr(e),
            None => self.out.push_str(" _"),
        }
    }

    fn child(&mut self, s: &Stmt, depth: usize) {
        self.out.push('\n');
        self.stmt(s, depth);
    }

    fn stmt(&mut self, s: &Stmt, depth: usize) {
        use StmtKind::*;
        let head = match &s.kind {
            LocalVarDecl { .. } => "local",
            Assign { .. } => "assign",
            If { .. } => "if",
            For { .. } => "for",
            ForEach { .. } => "foreach",
            While { .. } => "while",
            DoWhile { .. } => "do",
            Return(_) => "return",
            Throw(_) => "throw",
            ExprStmt(_) => "expr",
            Block(_) => "block",
            Try { .. } => "try",
            Switch { .. } => "switch",
            Sync { .. } => "sync",
            Labeled { .. } => "labeled",
            Break(_) => "break",
            Continue(_) => "continue",
            Assert { .. } => "assert",
            Empty => "empty",
            Opaque => "opaque",
        };
        self.open(depth, head);
        self.at_id(&s.id);
        if self.lines && s.span.end_line != s.span.start_line {
            let _ = write!(self.out, "-{}", s.span.end_line);
        }
        match &s.kind {
            LocalVarDecl { name, ty, init } => {
                let _ = write!(self.out, " {ty} {name}");
                if let Some(e) = init {
                    self.expr(e);
                }
            }
            Assign { lhs, op, rhs } => {
                let sym = op.map(|o| format!("{}=", o.symbol())).unwrap_or_else(|| "=".into());
                let _ = write!(self.out, " {sym}");
                self.expr(lhs);
                self.expr(rhs);
            }
            If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expr(cond);
                self.child(then_branch, depth + 1);
                if let Some(e) = else_branch {
                    self.child(e, depth + 1);
                }
            }
            For {
                init,
                cond,
                update,
                body,
            } => {
                self.out.push_str(" (init");
                match init {
                    ForInit::Decl { ty, vars } => {
                        let _ = write!(self.out, " {ty}");
                        for (n, e) in vars {
                            let _ = write!(self.out, " ({n}");
                            if let Some(e) = e {
                                self.expr(e);
                            }
                            self.out.push(')');
                        }
                    }
                    ForInit::Exprs(es) => {
                        for e in es {
                            self.expr(e);
                        }
                    }
                }
                self.out.push(')');
                self.opt_expr(cond);
                self.out.push_str(" (update");
                for e in update {
                    self.expr(e);
                }
                self.out.push(')');
                self.child(body, depth + 1);
            }
            ForEach {
                var,
                ty,
                iterable,
                body,
            } => {
                let _ = write!(self.out, " {ty} {var}");
                self.expr(iterable);
                self.child(body, depth + 1);
            }
            While { cond, body } => {
                self.expr(cond);
                self.child(body, depth + 1);
            }
            DoWhile { body, cond } => {
                self.expr(cond);
                self.child(body, depth + 1);
            }
            Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            Throw(e) | ExprStmt(e) => self.expr(e),
            Block(stmts) => {
                for c in stmts {
                    self.child(c, depth + 1);
                }
            }
            Try {
                resources,
                body,
                catches,
                finally,
            } => {
                for r in resources {
                    self.child(r, depth + 1);
                }
                self.child(body, depth + 1);
                for c in catches {
                    self.out.push('\n');
                    self.open(depth + 1, "catch");
                    let _ = write!(self.out, " {} {}", c.ty, c.param);
                    self.child(&c.body, depth + 2);
                    self.out.push(')');
                }
                if let Some(f) = finally {
                    self.out.push('\n');
                    self.open(depth + 1, "finally");
                    self.child(f, depth + 2);
                    self.out.push(')');
                }
            }
            Switch { selector, cases } => {
                self.expr(selector);
                for c in cases {
                    self.out.push('\n');
                    if c.labels.is_empty() {
                        self.open(depth + 1, "default");
                    } else {
                        self.open(depth + 1, "case");
                        for l in &c.labels {
                            self.expr(l);
                        }
                    }
                    for st in &c.body {
                        self.child(st, depth + 2);
                    }
                    self.out.push(')');
                }
            }
            Sync { lock, body } => {
                self.expr(lock);
                self.child(body, depth + 1);
            }
            Labeled { label, body } => {
                let _ = write!(self.out, " {label}");
                self.child(body, depth + 1);
            }
            Break(l) | Continue(l) => {
                if let Some(l) = l {
                    let _ = write!(self.out, " {l}");
                }
            }
            Assert { cond, message } => {
                self.expr(cond);
                if let Some(m) = message {
                    self.expr(m);
                }
            }
            Empty | Opaque => {}
        }
        self.out.push(')');
    }

    fn method(&mut self, m: &MethodDecl, depth: usize) {
        self.open(depth, if m.is_constructor() { "constructor" } else { "method" });
        if let Some(rt) = &m.return_type {
            let _ = write!(self.out, " {rt}");
        }
        let _ = write!(self.out, " {}", m.name);
        self.at_span(&m.span);
        for p in &m.params {
            self.out.push('\n');
            self.open(depth + 1, "param");
            let _ = write!(self.out, " {} {}", p.ty, p.name);
            self.at_id(&p.id);
            self.out.push(')');
        }
        match &m.body {
            MethodBody::Parsed(stmts) => {
                for s in stmts {
                    self.child(s, depth + 1);
                }
            }
            MethodBody::Opaque => self.out.push_str(" (opaque-body)"),
            MethodBody::Absent => self.out.push_str(" (no-body)"),
        }
        self.out.push(')');
    }

    fn class(&mut self, c: &ClassDecl, depth: usize) {
        let kind = match c.kind {
            ClassKind::Class => "class",
            ClassKind::Interface => "interface",
            ClassKind::Enum => "enum",
            ClassKind::Record => "record",
            ClassKind::Annotation => "annotation",
        };
        self.open(depth, kind);
        let _ = write!(self.out, " {}", c.name);
        self.at_span(&c.span);
        enum Member<'a> {
            F(&'a FieldDecl),
            M(&'a MethodDecl),
            C(&'a ClassDecl),
        }
        let mut members: Vec<(u32, Member)> = Vec::new();
        members.extend(c.fields.iter().map(|f| (f.span.start_line, Member::F(f))));
        members.extend(c.methods.iter().map(|m| (m.span.start_line, Member::M(m))));
        members.extend(c.classes.iter().map(|k| (k.span.start_line, Member::C(k))));
        members.sort_by_key(|(l, _)| *l);
        for (_, m) in members {
            self.out.push('\n');
            match m {
                Member::F(f) => {
                    self.open(depth + 1, "field");
                    if f.is_static {
                        self.out.push_str(" static");
                    }
                    let _ = write!(self.out, " {} {}", f.ty, f.name);
                    self.at_id(&f.id);
                    if let Some(e) = &f.init {
                        self.expr(e);
                    }
                    self.out.push(')');
                }
                Member::M(m) => self.method(m, depth + 1),
                Member::C(k) => self.class(k, depth + 1),
            }
        }
        self.out.push(')');
    }
}

/// S-expression dump of a whole unit. With `lines`, statements carry
/// `@line:ordinal` and declarations `@start-end`.
pub fn dump_unit(unit: &CompilationUnit, lines: bool) -> String {
    let mut d = Dumper {
        out: String::new(),
        lines,
    };
    let _ = write!(d.out, "(unit {:?}", unit.path);
    if let Some(p) = &unit.package {
        let _ = write!(d.out, " (package {p})");
    }
    for c in &unit.classes {
        d.out.push('\n');
        d.class(c, 1);
    }
    d.out.push_str(")\n");
    d.out
}

pub fn dump_method(m: &MethodDecl, lines: bool) -> String {
    let mut d = Dumper {
        out: String::new(),
        lines,
    };
    d.method(m, 0);
    d.out
}

pub fn dump_stmt(s: &Stmt, lines: bool) -> String {
    let mut d = Dumper {
        out: String::new(),
        lines,
    };
    d.stmt(s, 0);
    d.out
}

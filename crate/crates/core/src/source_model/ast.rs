//! Simplified, line-faithful AST for the supported Java subset.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Identity of a statement-like node: file path (root-relative, `/`-separated),
/// 1-based line, and position among the nodes that start on that line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StatementId {
    pub file: String,
    pub line: u32,
    pub ordinal: u32,
}

impl StatementId {
    pub fn new(file: impl Into<String>, line: u32, ordinal: u32) -> Self {
        Self {
            file: file.into(),
            line,
            ordinal,
        }
    }

    /// Same file and line, ignoring the on-line ordinal.
    pub fn same_line(&self, other: &StatementId) -> bool {
        self.line == other.line && self.file == other.file
    }
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.ordinal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid statement id `{0}` (expected file:line[:ordinal])")]
pub struct StatementIdParseError(pub String);

impl FromStr for StatementId {
    type Err = StatementIdParseError;

    /// Parses `file:line[:ordinal]`, splitting from the right so that file
    /// names may themselves contain colons.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || StatementIdParseError(s.to_string());
        let mut parts = s.rsplitn(3, ':');
        let last = parts.next().ok_or_else(err)?;
        let middle = parts.next().ok_or_else(err)?;
        match parts.next() {
            Some(file) => {
                // file:line:ordinal, unless "line" isn't numeric (then file has a colon)
                match (middle.parse::<u32>(), last.parse::<u32>()) {
                    (Ok(line), Ok(ordinal)) if !file.is_empty() && line >= 1 => {
                        Ok(StatementId::new(file, line, ordinal))
                    }
                    (Err(_), Ok(line)) if line >= 1 => {
                        Ok(StatementId::new(format!("{file}:{middle}"), line, 0))
                    }
                    _ => Err(err()),
                }
            }
            None => {
                let line: u32 = last.parse().map_err(|_| err())?;
                if middle.is_empty() || line == 0 {
                    return Err(err());
                }
                Ok(StatementId::new(middle, line, 0))
            }
        }
    }
}

/// Inclusive line range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start_line: u32,
    pub end_line: u32,
}

impl Span {
    pub fn new(start_line: u32, end_line: u32) -> Self {
        debug_assert!(start_line <= end_line);
        Self {
            start_line,
            end_line,
        }
    }

    pub fn line(line: u32) -> Self {
        Self::new(line, line)
    }

    pub fn contains_line(&self, line: u32) -> bool {
        self.start_line <= line && line <= self.end_line
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start_line <= other.start_line && other.end_line <= self.end_line
    }

    pub fn cover(&self, other: &Span) -> Span {
        Span::new(
            self.start_line.min(other.start_line),
            self.end_line.max(other.end_line),
        )
    }
}

/// A type as written in source, normalized to compact text (`List<String>`, `int[]`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeRef(pub String);

const PRIMITIVES: [&str; 8] = [
    "boolean", "byte", "short", "char", "int", "long", "float", "double",
];

impl TypeRef {
    pub fn new(text: impl Into<String>) -> Self {
        TypeRef(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Type without generic arguments and without array brackets.
    pub fn base(&self) -> &str {
        let s = self.0.as_str();
        let end = s.find(['<', '[']).unwrap_or(s.len());
        s[..end].trim()
    }

    pub fn is_array(&self) -> bool {
        self.0.ends_with(']') || self.0.ends_with("...")
    }

    pub fn is_primitive(&self) -> bool {
        !self.is_array() && PRIMITIVES.contains(&self.0.as_str())
    }

    pub fn is_integral(&self) -> bool {
        !self.is_array()
            && matches!(
                self.base(),
                "int" | "long" | "short" | "byte" | "char" | "Integer" | "Long" | "Short" | "Byte"
            )
    }

    /// String-like receivers for index-taking methods.
    pub fn is_string_like(&self) -> bool {
        if self.is_array() {
            return false;
        }
        let base = self.base();
        let simple = base.rsplit('.').next().unwrap_or(base);
        matches!(
            simple,
            "String" | "StringBuilder" | "StringBuffer" | "CharSequence"
        )
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiteralKind {
    Int,
    Long,
    Float,
    Double,
    Char,
    String,
    Bool,
    Null,
}

/// Literal with its source spelling preserved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub kind: LiteralKind,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Mul,
    Div,
    Rem,
    Add,
    Sub,
    Shl,
    Shr,
    UShr,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    BitAnd,
    BitXor,
    BitOr,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Mul => "*",
            Div => "/",
            Rem => "%",
            Add => "+",
            Sub => "-",
            Shl => "<<",
            Shr => ">>",
            UShr => ">>>",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            BitAnd => "&",
            BitXor => "^",
            BitOr => "|",
            And => "&&",
            Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        use BinaryOp::*;
        match self {
            Or => 3,
            And => 4,
            BitOr => 5,
            BitXor => 6,
            BitAnd => 7,
            Eq | Ne => 8,
            Lt | Gt | Le | Ge => 9,
            Shl | Shr | UShr => 10,
            Add | Sub => 11,
            Mul | Div | Rem => 12,
        }
    }

    pub fn from_symbol(sym: &str) -> Option<BinaryOp> {
        use BinaryOp::*;
        Some(match sym {
            "*" => Mul,
            "/" => Div,
            "%" => Rem,
            "+" => Add,
            "-" => Sub,
            "<<" => Shl,
            ">>" => Shr,
            ">>>" => UShr,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "==" => Eq,
            "!=" => Ne,
            "&" => BitAnd,
            "^" => BitXor,
            "|" => BitOr,
            "&&" => And,
            "||" => Or,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
    BitNot,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::Not => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::PreInc | UnaryOp::PostInc => "++",
            UnaryOp::PreDec | UnaryOp::PostDec => "--",
        }
    }

    pub fn is_postfix(self) -> bool {
        matches!(self, UnaryOp::PostInc | UnaryOp::PostDec)
    }

    pub fn is_increment(self) -> bool {
        matches!(
            self,
            UnaryOp::PreInc | UnaryOp::PreDec | UnaryOp::PostInc | UnaryOp::PostDec
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    VarRef(String),
    This,
    Super,
    FieldAccess {
        target: Box<Expr>,
        name: String,
    },
    ArrayAccess {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    MethodCall {
        receiver: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    /// Object instantiation; `anonymous_body` marks `new T() { ... }` whose body is not modelled.
    New {
        ty: TypeRef,
        args: Vec<Expr>,
        anonymous_body: bool,
    },
    ArrayCreation {
        element_type: TypeRef,
        dimensions: Vec<Expr>,
        extra_dims: u32,
        initializer: Option<Vec<Expr>>,
    },
    /// Bare `{a, b}` initializer of an array declaration.
    ArrayInit(Vec<Expr>),
    Literal(Literal),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    Assign {
        target: Box<Expr>,
        op: Option<BinaryOp>,
        value: Box<Expr>,
    },
    Conditional {
        cond: Box<Expr>,
        then_expr: Box<Expr>,
        else_expr: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        ty: TypeRef,
    },
    ClassLiteral(TypeRef),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Self { kind, span }
    }

    /// Direct sub-expressions in left-to-right source order.
    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            VarRef(_) | This | Super | Literal(_) | ClassLiteral(_) => vec![],
            FieldAccess { target, .. } => vec![target],
            ArrayAccess { array, index } => vec![array, index],
            MethodCall { receiver, args, .. } => {
                receiver.iter().map(|r| &**r).chain(args.iter()).collect()
            }
            New { args, .. } => args.iter().collect(),
            ArrayCreation {
                dimensions,
                initializer,
                ..
            } => dimensions
                .iter()
                .chain(initializer.iter().flatten())
                .collect(),
            ArrayInit(items) => items.iter().collect(),
            Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Unary { operand, .. } => vec![operand],
            Cast { expr, .. } => vec![expr],
            Assign { target, value, .. } => vec![target, value],
            Conditional {
                cond,
                then_expr,
                else_expr,
            } => vec![cond, then_expr, else_expr],
            InstanceOf { expr, .. } => vec![expr],
        }
    }

    /// Pre-order walk over this expression and all sub-expressions.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self.kind, ExprKind::Literal(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::VarRef(n) => Some(n),
            _ => None,
        }
    }

    /// Source-like rendering (see [`crate::source_model::print`]).
    pub fn render(&self) -> String {
        super::print::expr_to_string(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub id: StatementId,
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForInit {
    Decl {
        ty: TypeRef,
        vars: Vec<(String, Option<Expr>)>,
    },
    Exprs(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchClause {
    pub param: String,
    pub ty: TypeRef,
    pub body: Box<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchCase {
    /// Empty for `default:`.
    pub labels: Vec<Expr>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    LocalVarDecl {
        name: String,
        ty: TypeRef,
        init: Option<Expr>,
    },
    Assign {
        lhs: Expr,
        op: Option<BinaryOp>,
        rhs: Expr,
    },
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    For {
        init: ForInit,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
    },
    ForEach {
        var: String,
        ty: TypeRef,
        iterable: Expr,
        body: Box<Stmt>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        body: Box<Stmt>,
        cond: Expr,
    },
    Return(Option<Expr>),
    Throw(Expr),
    ExprStmt(Expr),
    Block(Vec<Stmt>),
    Try {
        resources: Vec<Stmt>,
        body: Box<Stmt>,
        catches: Vec<CatchClause>,
        finally: Option<Box<Stmt>>,
    },
    Switch {
        selector: Expr,
        cases: Vec<SwitchCase>,
    },
    Sync {
        lock: Expr,
        body: Box<Stmt>,
    },
    Labeled {
        label: String,
        body: Box<Stmt>,
    },
    Break(Option<String>),
    Continue(Option<String>),
    Assert {
        cond: Expr,
        message: Option<Expr>,
    },
    Empty,
    /// A region the parser could not model; only its line span is known.
    Opaque,
}

impl Stmt {
    /// Expressions that belong to this statement itself (headers, not nested statements).
    pub fn own_exprs(&self) -> Vec<&Expr> {
        use StmtKind::*;
        match &self.kind {
            LocalVarDecl { init, .. } => init.iter().collect(),
            Assign { lhs, rhs, .. } => vec![lhs, rhs],
            If { cond, .. } | While { cond, .. } | DoWhile { cond, .. } => vec![cond],
            For {
                init, cond, update, ..
            } => {
                let mut v: Vec<&Expr> = match init {
                    ForInit::Decl { vars, .. } => vars.iter().filter_map(|(_, e)| e.as_ref()).collect(),
                    ForInit::Exprs(es) => es.iter().collect(),
                };
                v.extend(cond.iter());
                v.extend(update.iter());
                v
            }
            ForEach { iterable, .. } => vec![iterable],
            Return(e) => e.iter().collect(),
            Throw(e) | ExprStmt(e) => vec![e],
            Switch { selector, .. } => vec![selector],
            Sync { lock, .. } => vec![lock],
            Assert { cond, message } => std::iter::once(cond).chain(message.iter()).collect(),
            Block(_) | Try { .. } | Labeled { .. } | Break(_) | Continue(_) | Empty | Opaque => {
                vec![]
            }
        }
    }

    /// Directly nested statements in source order.
    pub fn children(&self) -> Vec<&Stmt> {
        use StmtKind::*;
        match &self.kind {
            If {
                then_branch,
                else_branch,
                ..
            } => std::iter::once(&**then_branch)
                .chain(else_branch.iter().map(|b| &**b))
                .collect(),
            For { body, .. }
            | ForEach { body, .. }
            | While { body, .. }
            | DoWhile { body, .. }
            | Sync { body, .. }
            | Labeled { body, .. } => vec![body],
            Block(stmts) => stmts.iter().collect(),
            Try {
                resources,
                body,
                catches,
                finally,
            } => resources
                .iter()
                .chain(std::iter::once(&**body))
                .chain(catches.iter().map(|c| &*c.body))
                .chain(finally.iter().map(|f| &**f))
                .collect(),
            Switch { cases, .. } => cases.iter().flat_map(|c| c.body.iter()).collect(),
            _ => vec![],
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(
            self.kind,
            StmtKind::For { .. }
                | StmtKind::ForEach { .. }
                | StmtKind::While { .. }
                | StmtKind::DoWhile { .. }
        )
    }

    pub fn is_block(&self) -> bool {
        matches!(self.kind, StmtKind::Block(_))
    }

    /// Pre-order walk over this statement and all nested statements.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Pre-order walk over every expression owned by this statement or nested ones.
    pub fn walk_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        self.walk(&mut |s| {
            for e in s.own_exprs() {
                e.walk(f);
            }
        });
    }

    /// A single expression standing for the whole statement, used when a
    /// guess concerns the statement rather than one of its operands.
    pub fn as_expression(&self) -> Option<Expr> {
        use StmtKind::*;
        let span = self.span;
        match &self.kind {
            LocalVarDecl {
                name,
                init: Some(init),
                ..
            } => Some(Expr::new(
                ExprKind::Assign {
                    target: Box::new(Expr::new(ExprKind::VarRef(name.clone()), span)),
                    op: None,
                    value: Box::new(init.clone()),
                },
                span,
            )),
            Assign { lhs, op, rhs } => Some(Expr::new(
                ExprKind::Assign {
                    target: Box::new(lhs.clone()),
                    op: *op,
                    value: Box::new(rhs.clone()),
                },
                span,
            )),
            ExprStmt(e) | Throw(e) | Return(Some(e)) => Some(e.clone()),
            If { cond, .. } | While { cond, .. } | DoWhile { cond, .. } => Some(cond.clone()),
            For { cond: Some(c), .. } => Some(c.clone()),
            ForEach { iterable, .. } => Some(iterable.clone()),
            Switch { selector, .. } => Some(selector.clone()),
            Sync { lock, .. } => Some(lock.clone()),
            Assert { cond, .. } => Some(cond.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub id: StatementId,
    pub name: String,
    pub ty: TypeRef,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodBody {
    Parsed(Vec<Stmt>),
    /// Body present in the file but not representable in the subset.
    Opaque,
    /// Abstract or interface method without a body.
    Absent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub params: Vec<Param>,
    /// `None` for constructors.
    pub return_type: Option<TypeRef>,
    pub body: MethodBody,
    pub span: Span,
}

impl MethodDecl {
    pub fn is_constructor(&self) -> bool {
        self.return_type.is_none()
    }

    pub fn statements(&self) -> &[Stmt] {
        match &self.body {
            MethodBody::Parsed(s) => s,
            _ => &[],
        }
    }

    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        for s in self.statements() {
            s.walk(f);
        }
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub id: StatementId,
    pub name: String,
    pub ty: TypeRef,
    pub init: Option<Expr>,
    pub is_static: bool,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Class,
    Interface,
    Enum,
    Record,
    Annotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDecl {
    pub name: String,
    pub kind: ClassKind,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub classes: Vec<ClassDecl>,
    pub span: Span,
}

impl ClassDecl {
    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompilationUnit {
    /// Root-relative path with `/` separators; the `file` of every id in this unit.
    pub path: String,
    /// Path as found on disk (source root joined with `path`).
    pub source_path: std::path::PathBuf,
    pub package: Option<String>,
    pub classes: Vec<ClassDecl>,
}

impl CompilationUnit {
    pub fn file_name(&self) -> &str {
        self.path.rsplit('/').next().unwrap_or(&self.path)
    }

    /// Depth-first walk over all classes, outermost first, with the chain of enclosing classes.
    pub fn walk_classes<'a>(&'a self, f: &mut dyn FnMut(&[&'a ClassDecl])) {
        fn go<'a>(c: &'a ClassDecl, chain: &mut Vec<&'a ClassDecl>, f: &mut dyn FnMut(&[&'a ClassDecl])) {
            chain.push(c);
            f(chain);
            for inner in &c.classes {
                go(inner, chain, f);
            }
            chain.pop();
        }
        let mut chain = Vec::new();
        for c in &self.classes {
            go(c, &mut chain, f);
        }
    }
}

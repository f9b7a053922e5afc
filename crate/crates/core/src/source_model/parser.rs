//! Recursive-descent parser for the supported Java subset.
//!
//! Unsupported constructs never abort a file: a statement that cannot be
//! modelled becomes [`StmtKind::Opaque`] with its line span, and a member
//! whose header cannot be parsed ends the class with a diagnostic.

use std::collections::HashMap;
use std::path::PathBuf;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SourceDiagnostic;

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
    "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
    "volatile", "while",
];

const PRIMITIVE_KEYWORDS: &[&str] = &[
    "boolean", "byte", "short", "char", "int", "long", "float", "double", "void",
];

const MODIFIERS: &[&str] = &[
    "public", "protected", "private", "static", "final", "abstract", "native", "synchronized",
    "transient", "volatile", "strictfp", "default", "sealed",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Debug)]
struct PErr {
    line: u32,
    msg: String,
}

type PResult<T> = Result<T, PErr>;

pub struct ParseOutput {
    pub unit: CompilationUnit,
    pub diagnostics: Vec<SourceDiagnostic>,
}

/// Parses one Java source file. `path` becomes the `file` of every id.
pub fn parse_compilation_unit(path: &str, source_path: PathBuf, src: &str) -> ParseOutput {
    let mut unit = CompilationUnit {
        path: path.to_string(),
        source_path,
        package: None,
        classes: Vec::new(),
    };
    let toks = match tokenize(src) {
        Ok(t) => t,
        Err(e) => {
            return ParseOutput {
                unit,
                diagnostics: vec![SourceDiagnostic {
                    file: path.to_string(),
                    span: Span::line(e.line),
                    message: format!("lexical error: {}", e.message),
                }],
            }
        }
    };
    let mut p = Parser::new(&toks, path);
    p.parse_unit(&mut unit);
    assign_ordinals(&mut unit);
    ParseOutput {
        unit,
        diagnostics: p.diags,
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    file: &'a str,
    /// Index of the matching closing brace for every `{`.
    brace_match: HashMap<usize, usize>,
    diags: Vec<SourceDiagnostic>,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], file: &'a str) -> Self {
        let mut brace_match = HashMap::new();
        let mut stack = Vec::new();
        for (i, t) in toks.iter().enumerate() {
            match t.tok {
                Tok::Sym("{") => stack.push(i),
                Tok::Sym("}") => {
                    if let Some(open) = stack.pop() {
                        brace_match.insert(open, i);
                    }
                }
                _ => {}
            }
        }
        Self {
            toks,
            pos: 0,
            file,
            brace_match,
            diags: Vec::new(),
        }
    }

    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> &Tok {
        &self.toks[self.pos.min(self.toks.len() - 1)].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn glued_at(&self, n: usize) -> bool {
        self.toks[(self.pos + n).min(self.toks.len() - 1)].glued
    }

    fn line(&self) -> u32 {
        self.toks[self.pos.min(self.toks.len() - 1)].line
    }

    fn prev_line(&self) -> u32 {
        if self.pos == 0 {
            1
        } else {
            self.toks[(self.pos - 1).min(self.toks.len() - 1)].end_line
        }
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_sym_at(&self, n: usize, s: &str) -> bool {
        matches!(self.peek_at(n), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn is_word_at(&self, n: usize, w: &str) -> bool {
        matches!(self.peek_at(n), Tok::Ident(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(PErr {
            line: self.line(),
            msg: msg.into(),
        })
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.err(format!("expected `{w}`, found {}", describe(self.peek())))
        }
    }

    /// A non-keyword identifier.
    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected identifier, found {}", describe(t))),
        }
    }

    fn is_plain_ident(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !is_keyword(s))
    }

    fn is_plain_ident_at(&self, n: usize) -> bool {
        matches!(self.peek_at(n), Tok::Ident(s) if !is_keyword(s))
    }

    fn diag(&mut self, span: Span, message: impl Into<String>) {
        self.diags.push(SourceDiagnostic {
            file: self.file.to_string(),
            span,
            message: message.into(),
        });
    }

    fn placeholder_id(&self, line: u32) -> StatementId {
        StatementId::new(self.file, line, 0)
    }

    /// Skips a balanced `open ... close` group starting at the current token.
    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        if !self.is_sym(open) {
            return self.err(format!("expected `{open}`"));
        }
        if open == "{" {
            if let Some(&end) = self.brace_match.get(&self.pos) {
                self.pos = end + 1;
                return Ok(());
            }
            return self.err("unbalanced braces");
        }
        let mut depth = 0usize;
        loop {
            match self.bump() {
                Tok::Sym(s) if s == open => depth += 1,
                Tok::Sym(s) if s == close => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Tok::Eof => return self.err(format!("unbalanced `{open}`")),
                _ => {}
            }
        }
    }

    fn skip_annotation(&mut self) -> PResult<()> {
        self.expect_sym("@")?;
        self.ident()?;
        while self.is_sym(".") && self.is_plain_ident_at(1) {
            self.bump();
            self.bump();
        }
        if self.is_sym("(") {
            self.skip_balanced("(", ")")?;
        }
        Ok(())
    }

    /// Skips modifiers and annotations; returns whether `static` was seen.
    fn skip_modifiers(&mut self) -> PResult<bool> {
        let mut is_static = false;
        loop {
            if self.is_sym("@") && !self.is_word_at(1, "interface") {
                self.skip_annotation()?;
            } else if let Tok::Ident(w) = self.peek() {
                if MODIFIERS.contains(&w.as_str()) && !(w == "default" && self.is_sym_at(1, ":")) {
                    if w == "static" {
                        is_static = true;
                    }
                    self.bump();
                } else if w == "non" && self.is_sym_at(1, "-") && self.is_word_at(2, "sealed") {
                    self.bump();
                    self.bump();
                    self.bump();
                } else {
                    return Ok(is_static);
                }
            } else {
                return Ok(is_static);
            }
        }
    }

    // ---- compilation unit and declarations ------------------------------

    fn parse_unit(&mut self, unit: &mut CompilationUnit) {
        let result: PResult<()> = (|| {
            while self.is_sym("@") && !self.is_word_at(1, "interface") {
                self.skip_annotation()?;
            }
            if self.eat_word("package") {
                unit.package = Some(self.qualified_name()?);
                self.expect_sym(";")?;
            }
            while self.is_word("import") {
                while !self.is_sym(";") && !self.at_eof() {
                    self.bump();
                }
                self.expect_sym(";")?;
            }
            while !self.at_eof() {
                if self.eat_sym(";") {
                    continue;
                }
                self.skip_modifiers()?;
                let class = self.parse_type_decl()?;
                unit.classes.push(class);
            }
            Ok(())
        })();
        if let Err(e) = result {
            let line = e.line;
            self.diag(
                Span::line(line),
                format!("stopped parsing declarations: {}", e.msg),
            );
        }
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.is_sym(".") && self.is_plain_ident_at(1) {
            self.bump();
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    fn is_type_decl_start(&self) -> bool {
        self.is_word("class")
            || self.is_word("interface")
            || self.is_word("enum")
            || (self.is_sym("@") && self.is_word_at(1, "interface"))
            || (self.is_word("record") && self.is_plain_ident_at(1) && (self.is_sym_at(2, "(") || self.is_sym_at(2, "<")))
    }

    fn parse_type_decl(&mut self) -> PResult<ClassDecl> {
        let start = self.line();
        let kind = if self.eat_word("class") {
            ClassKind::Class
        } else if self.eat_word("interface") {
            ClassKind::Interface
        } else if self.eat_word("enum") {
            ClassKind::Enum
        } else if self.eat_word("record") {
            ClassKind::Record
        } else if self.is_sym("@") {
            self.bump();
            self.expect_word("interface")?;
            ClassKind::Annotation
        } else {
            return self.err(format!(
                "expected type declaration, found {}",
                describe(self.peek())
            ));
        };
        let name = self.ident()?;
        let mut class = ClassDecl {
            name,
            kind,
            fields: Vec::new(),
            methods: Vec::new(),
            classes: Vec::new(),
            span: Span::line(start),
        };
        if self.is_sym("<") {
            self.skip_type_params()?;
        }
        if kind == ClassKind::Record {
            for p in self.parse_params()? {
                class.fields.push(FieldDecl {
                    id: p.id,
                    name: p.name,
                    ty: p.ty,
                    init: None,
                    is_static: false,
                    span: p.span,
                });
            }
        }
        // extends / implements / permits clauses
        while !self.is_sym("{") {
            if self.at_eof() {
                return self.err("missing class body");
            }
            self.bump();
        }
        let open = self.pos;
        let close = *self
            .brace_match
            .get(&open)
            .ok_or_else(|| PErr { line: start, msg: "unbalanced class body".into() })?;
        self.bump();
        if kind == ClassKind::Enum {
            self.skip_enum_constants(close)?;
        }
        if let Err(e) = self.parse_class_body(&mut class, close) {
            self.diag(
                Span::new(e.line.max(start), self.toks[close].line.max(e.line)),
                format!("members of `{}` not modelled: {}", class.name, e.msg),
            );
        }
        self.pos = close + 1;
        class.span = Span::new(start, self.toks[close].line);
        Ok(class)
    }

    fn skip_type_params(&mut self) -> PResult<()> {
        let mut depth = 0i32;
        loop {
            match self.bump() {
                Tok::Sym("<") => depth += 1,
                Tok::Sym(">") => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Tok::Eof => return self.err("unterminated type parameters"),
                _ => {}
            }
        }
    }

    fn skip_enum_constants(&mut self, close: usize) -> PResult<()> {
        loop {
            while self.is_sym("@") {
                self.skip_annotation()?;
            }
            if self.pos >= close {
                return Ok(());
            }
            if self.eat_sym(";") {
                return Ok(());
            }
            if self.is_plain_ident() {
                self.bump();
                if self.is_sym("(") {
                    self.skip_balanced("(", ")")?;
                }
                if self.is_sym("{") {
                    self.skip_balanced("{", "}")?;
                }
                if self.eat_sym(",") {
                    continue;
                }
                if self.eat_sym(";") {
                    return Ok(());
                }
                if self.pos >= close {
                    return Ok(());
                }
                return self.err("malformed enum constant list");
            }
            return self.err("malformed enum constant list");
        }
    }

    fn parse_class_body(&mut self, class: &mut ClassDecl, close: usize) -> PResult<()> {
        while self.pos < close {
            if self.eat_sym(";") {
                continue;
            }
            let member_start = self.line();
            let is_static = self.skip_modifiers()?;
            if self.is_sym("{") {
                // initializer block
                let l = self.line();
                self.skip_balanced("{", "}")?;
                self.diag(Span::new(l, self.prev_line()), "initializer block not modelled");
                continue;
            }
            if self.is_type_decl_start() {
                let inner = self.parse_type_decl()?;
                class.classes.push(inner);
                continue;
            }
            if self.is_sym("<") {
                self.skip_type_params()?;
            }
            if self.is_plain_ident() && self.is_sym_at(1, "(") {
                let name = self.ident()?;
                let m = self.parse_method_rest(name, None, member_start)?;
                class.methods.push(m);
                continue;
            }
            let ty = self.parse_type()?;
            let name_line = self.line();
            let name = self.ident()?;
            if self.is_sym("(") {
                let m = self.parse_method_rest(name, Some(ty), member_start)?;
                class.methods.push(m);
                continue;
            }
            // field declarators
            let mut name = name;
            let mut name_line = name_line;
            loop {
                let mut fty = ty.clone();
                while self.is_sym("[") && self.is_sym_at(1, "]") {
                    self.bump();
                    self.bump();
                    fty = TypeRef::new(format!("{}[]", fty.0));
                }
                let init = if self.eat_sym("=") {
                    let save = self.pos;
                    match self.parse_var_init() {
                        Ok(e) => Some(e),
                        Err(e) => {
                            self.pos = save;
                            self.skip_to_declarator_end(close)?;
                            self.diag(
                                Span::new(name_line, self.prev_line().max(name_line)),
                                format!("initializer of field `{name}` not modelled: {}", e.msg),
                            );
                            None
                        }
                    }
                } else {
                    None
                };
                let end = self.prev_line().max(name_line);
                class.fields.push(FieldDecl {
                    id: self.placeholder_id(name_line),
                    name: name.clone(),
                    ty: fty,
                    init,
                    is_static,
                    span: Span::new(name_line, end),
                });
                if self.eat_sym(",") {
                    name_line = self.line();
                    name = self.ident()?;
                    continue;
                }
                self.expect_sym(";")?;
                break;
            }
        }
        Ok(())
    }

    /// Skips tokens of an unparseable initializer up to (not including) the next
    /// top-level `,` or `;`.
    fn skip_to_declarator_end(&mut self, limit: usize) -> PResult<()> {
        let mut depth = 0i32;
        while self.pos < limit {
            match self.peek() {
                Tok::Sym("(") | Tok::Sym("[") => depth += 1,
                Tok::Sym(")") | Tok::Sym("]") => depth -= 1,
                Tok::Sym("{") => {
                    self.skip_balanced("{", "}")?;
                    continue;
                }
                Tok::Sym(",") | Tok::Sym(";") if depth <= 0 => return Ok(()),
                _ => {}
            }
            self.bump();
        }
        self.err("unterminated declaration")
    }

    fn parse_params(&mut self) -> PResult<Vec<Param>> {
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if self.eat_sym(")") {
            return Ok(params);
        }
        loop {
            self.skip_modifiers()?;
            let mut ty = self.parse_type()?;
            if self.eat_sym("...") {
                ty = TypeRef::new(format!("{}...", ty.0));
            }
            let line = self.line();
            let name = if self.is_word("this") {
                self.bump();
                "this".to_string()
            } else {
                self.ident()?
            };
            while self.is_sym("[") && self.is_sym_at(1, "]") {
                self.bump();
                self.bump();
                ty = TypeRef::new(format!("{}[]", ty.0));
            }
            if name != "this" {
                params.push(Param {
                    id: self.placeholder_id(line),
                    name,
                    ty,
                    span: Span::line(line),
                });
            }
            if self.eat_sym(",") {
                continue;
            }
            self.expect_sym(")")?;
            return Ok(params);
        }
    }

    fn parse_method_rest(
        &mut self,
        name: String,
        return_type: Option<TypeRef>,
        start: u32,
    ) -> PResult<MethodDecl> {
        let params = self.parse_params()?;
        while self.is_sym("[") && self.is_sym_at(1, "]") {
            self.bump();
            self.bump();
        }
        if self.eat_word("throws") {
            self.parse_type()?;
            while self.eat_sym(",") {
                self.parse_type()?;
            }
        }
        let body;
        let end;
        if self.is_word("default") {
            // annotation element default value
            while !self.is_sym(";") && !self.at_eof() {
                self.bump();
            }
            self.expect_sym(";")?;
            body = MethodBody::Absent;
            end = self.prev_line();
        } else if self.eat_sym(";") {
            body = MethodBody::Absent;
            end = self.prev_line();
        } else if self.is_sym("{") {
            let open = self.pos;
            let close = *self
                .brace_match
                .get(&open)
                .ok_or_else(|| PErr { line: self.line(), msg: "unbalanced method body".into() })?;
            self.bump();
            let stmts = self.parse_stmts_until(close);
            self.pos = close + 1;
            end = self.toks[close].line;
            body = MethodBody::Parsed(stmts);
        } else {
            return self.err(format!("expected method body, found {}", describe(self.peek())));
        }
        Ok(MethodDecl {
            name,
            params,
            return_type,
            body,
            span: Span::new(start, end.max(start)),
        })
    }

    // ---- types --------------------------------------------------------------

    fn parse_type(&mut self) -> PResult<TypeRef> {
        while self.is_sym("@") {
            self.skip_annotation()?;
        }
        let mut text = String::new();
        match self.peek() {
            Tok::Ident(w) if PRIMITIVE_KEYWORDS.contains(&w.as_str()) => {
                text.push_str(w);
                self.bump();
            }
            Tok::Ident(w) if !is_keyword(w) => {
                text.push_str(w);
                self.bump();
                if self.is_sym("<") {
                    text.push_str(&self.parse_type_args()?);
                }
                while self.is_sym(".") && self.is_plain_ident_at(1) {
                    self.bump();
                    text.push('.');
                    text.push_str(&self.ident()?);
                    if self.is_sym("<") {
                        text.push_str(&self.parse_type_args()?);
                    }
                }
            }
            t => return self.err(format!("expected type, found {}", describe(t))),
        }
        while self.is_sym("[") && self.is_sym_at(1, "]") {
            self.bump();
            self.bump();
            text.push_str("[]");
        }
        Ok(TypeRef::new(text))
    }

    fn parse_type_args(&mut self) -> PResult<String> {
        self.expect_sym("<")?;
        if self.eat_sym(">") {
            return Ok("<>".to_string());
        }
        let mut parts = Vec::new();
        loop {
            while self.is_sym("@") {
                self.skip_annotation()?;
            }
            if self.eat_sym("?") {
                if self.eat_word("extends") {
                    parts.push(format!("? extends {}", self.parse_type()?));
                } else if self.eat_word("super") {
                    parts.push(format!("? super {}", self.parse_type()?));
                } else {
                    parts.push("?".to_string());
                }
            } else {
                parts.push(self.parse_type()?.0);
            }
            if self.eat_sym(",") {
                continue;
            }
            self.expect_sym(">")?;
            return Ok(format!("<{}>", parts.join(", ")));
        }
    }

    // ---- statements ---------------------------------------------------------

    /// Parses statements up to token index `limit` (exclusive), recovering
    /// from unsupported statements with opaque nodes.
    fn parse_stmts_until(&mut self, limit: usize) -> Vec<Stmt> {
        let mut out = Vec::new();
        while self.pos < limit && !self.at_eof() {
            let start = self.pos;
            let start_line = self.line();
            match self.parse_statement() {
                Ok(mut stmts) if self.pos <= limit => out.append(&mut stmts),
                Ok(_) | Err(_) => {
                    let msg = match self.pos_err_probe(start) {
                        Some(m) => m,
                        None => "statement runs past enclosing block".into(),
                    };
                    self.pos = start;
                    self.recover_statement(limit);
                    let end_line = self.prev_line().max(start_line);
                    let span = Span::new(start_line, end_line);
                    self.diag(span, format!("unsupported statement: {msg}"));
                    out.push(Stmt {
                        id: self.placeholder_id(start_line),
                        span,
                        kind: StmtKind::Opaque,
                    });
                }
            }
        }
        out
    }

    /// Re-runs the failing parse to recover its error message.
    fn pos_err_probe(&mut self, start: usize) -> Option<String> {
        let save = self.pos;
        self.pos = start;
        let saved_diags = self.diags.len();
        let r = self.parse_statement();
        self.diags.truncate(saved_diags);
        self.pos = save;
        r.err().map(|e| e.msg)
    }

    fn recover_statement(&mut self, limit: usize) {
        let mut depth = 0i32;
        while self.pos < limit && !self.at_eof() {
            match self.peek() {
                Tok::Sym("(") | Tok::Sym("[") => depth += 1,
                Tok::Sym(")") | Tok::Sym("]") => depth -= 1,
                Tok::Sym("{") => {
                    let end = self.brace_match.get(&self.pos).copied().unwrap_or(limit);
                    self.pos = (end + 1).min(limit);
                    if depth <= 0
                        && !(self.is_word("else")
                            || self.is_word("catch")
                            || self.is_word("finally")
                            || self.is_word("while")
                            || self.is_sym(")")
                            || self.is_sym(";")
                            || self.is_sym(".")
                            || self.is_sym(","))
                    {
                        return;
                    }
                    continue;
                }
                Tok::Sym(";") if depth <= 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn parse_block(&mut self) -> PResult<Stmt> {
        let start = self.line();
        if !self.is_sym("{") {
            return self.err("expected `{`");
        }
        let open = self.pos;
        let close = *self
            .brace_match
            .get(&open)
            .ok_or_else(|| PErr { line: start, msg: "unbalanced block".into() })?;
        self.bump();
        let stmts = self.parse_stmts_until(close);
        self.pos = close + 1;
        Ok(Stmt {
            id: self.placeholder_id(start),
            span: Span::new(start, self.toks[close].line),
            kind: StmtKind::Block(stmts),
        })
    }

    fn single(&mut self, start: u32, kind: StmtKind) -> Vec<Stmt> {
        vec![Stmt {
            id: self.placeholder_id(start),
            span: Span::new(start, self.prev_line().max(start)),
            kind,
        }]
    }

    fn parse_sub_statement(&mut self) -> PResult<Box<Stmt>> {
        let start = self.line();
        let mut stmts = self.parse_statement()?;
        if stmts.len() == 1 {
            Ok(Box::new(stmts.remove(0)))
        } else {
            let end = stmts.last().map(|s| s.span.end_line).unwrap_or(start);
            Ok(Box::new(Stmt {
                id: self.placeholder_id(start),
                span: Span::new(start, end),
                kind: StmtKind::Block(stmts),
            }))
        }
    }

    fn parse_statement(&mut self) -> PResult<Vec<Stmt>> {
        let start = self.line();
        if self.is_sym("{") {
            return Ok(vec![self.parse_block()?]);
        }
        if self.eat_sym(";") {
            return Ok(self.single(start, StmtKind::Empty));
        }
        if let Tok::Ident(w) = self.peek() {
            match w.as_str() {
                "if" => {
                    self.bump();
                    self.expect_sym("(")?;
                    let cond = self.parse_expr()?;
                    self.expect_sym(")")?;
                    let then_branch = self.parse_sub_statement()?;
                    let else_branch = if self.eat_word("else") {
                        Some(self.parse_sub_statement()?)
                    } else {
                        None
                    };
                    return Ok(self.single(
                        start,
                        StmtKind::If {
                            cond,
                            then_branch,
                            else_branch,
                        },
                    ));
                }
                "for" => return self.parse_for(start),
                "while" => {
                    self.bump();
                    self.expect_sym("(")?;
                    let cond = self.parse_expr()?;
                    self.expect_sym(")")?;
                    let body = self.parse_sub_statement()?;
                    return Ok(self.single(start, StmtKind::While { cond, body }));
                }
                "do" => {
                    self.bump();
                    let body = self.parse_sub_statement()?;
                    self.expect_word("while")?;
                    self.expect_sym("(")?;
                    let cond = self.parse_expr()?;
                    self.expect_sym(")")?;
                    self.expect_sym(";")?;
                    return Ok(self.single(start, StmtKind::DoWhile { body, cond }));
                }
                "return" => {
                    self.bump();
                    let e = if self.is_sym(";") {
                        None
                    } else {
                        Some(self.parse_expr()?)
                    };
                    self.expect_sym(";")?;
                    return Ok(self.single(start, StmtKind::Return(e)));
                }
                "throw" => {
                    self.bump();
                    let e = self.parse_expr()?;
                    self.expect_sym(";")?;
                    return Ok(self.single(start, StmtKind::Throw(e)));
                }
                "break" | "continue" => {
                    let is_break = w == "break";
                    self.bump();
                    let label = if self.is_plain_ident() {
                        Some(self.ident()?)
                    } else {
                        None
                    };
                    self.expect_sym(";")?;
                    let kind = if is_break {
                        StmtKind::Break(label)
                    } else {
                        StmtKind::Continue(label)
                    };
                    return Ok(self.single(start, kind));
                }
                "try" => return self.parse_try(start),
                "switch" => return self.parse_switch(start),
                "synchronized" if self.is_sym_at(1, "(") => {
                    self.bump();
                    self.expect_sym("(")?;
                    let lock = self.parse_expr()?;
                    self.expect_sym(")")?;
                    let body = Box::new(self.parse_block()?);
                    return Ok(self.single(start, StmtKind::Sync { lock, body }));
                }
                "assert" => {
                    self.bump();
                    let cond = self.parse_expr()?;
                    let message = if self.eat_sym(":") {
                        Some(self.parse_expr()?)
                    } else {
                        None
                    };
                    self.expect_sym(";")?;
                    return Ok(self.single(start, StmtKind::Assert { cond, message }));
                }
                "class" | "interface" | "enum" => {
                    return self.err("local type declarations are not supported")
                }
                "yield" if !self.is_sym_at(1, "=") && !self.is_sym_at(1, "(") => {
                    return self.err("switch expressions are not supported")
                }
                _ => {}
            }
            if self.is_plain_ident() && self.is_sym_at(1, ":") && !self.is_sym_at(2, ":") {
                let label = self.ident()?;
                self.bump();
                let body = self.parse_sub_statement()?;
                return Ok(self.single(start, StmtKind::Labeled { label, body }));
            }
        }

        // local variable declaration, possibly with modifiers
        let save = self.pos;
        let had_modifiers = self.is_word("final") || self.is_sym("@");
        self.skip_modifiers()?;
        if self.is_type_decl_start() {
            return self.err("local type declarations are not supported");
        }
        if let Some(decls) = self.try_local_decl(start)? {
            self.expect_sym(";")?;
            return Ok(decls);
        }
        if had_modifiers {
            return self.err("expected local variable declaration");
        }
        self.pos = save;

        let e = self.parse_expr()?;
        self.expect_sym(";")?;
        let kind = match e.kind {
            ExprKind::Assign { target, op, value } => StmtKind::Assign {
                lhs: *target,
                op,
                rhs: *value,
            },
            kind => StmtKind::ExprStmt(Expr { kind, span: e.span }),
        };
        Ok(self.single(start, kind))
    }

    /// Attempts `Type name [= init] {, name [= init]}`; restores position and
    /// returns `None` when the tokens are not a declaration.
    fn try_local_decl(&mut self, start: u32) -> PResult<Option<Vec<Stmt>>> {
        let save = self.pos;
        let ty = match self.parse_type() {
            Ok(t) => t,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        if !(self.is_plain_ident()
            && (self.is_sym_at(1, "=")
                || self.is_sym_at(1, ";")
                || self.is_sym_at(1, ",")
                || self.is_sym_at(1, "[")
                || self.is_sym_at(1, ":")))
        {
            self.pos = save;
            return Ok(None);
        }
        let mut out = Vec::new();
        loop {
            let line = self.line();
            let name = self.ident()?;
            let mut vty = ty.clone();
            while self.is_sym("[") && self.is_sym_at(1, "]") {
                self.bump();
                self.bump();
                vty = TypeRef::new(format!("{}[]", vty.0));
            }
            let init = if self.eat_sym("=") {
                Some(self.parse_var_init()?)
            } else {
                None
            };
            let stmt_start = if out.is_empty() { start } else { line };
            out.push(Stmt {
                id: self.placeholder_id(stmt_start),
                span: Span::new(stmt_start, self.prev_line().max(stmt_start)),
                kind: StmtKind::LocalVarDecl {
                    name,
                    ty: vty,
                    init,
                },
            });
            if !self.eat_sym(",") {
                break;
            }
        }
        Ok(Some(out))
    }

    fn parse_var_init(&mut self) -> PResult<Expr> {
        if self.is_sym("{") {
            self.parse_array_init()
        } else {
            self.parse_expr()
        }
    }

    fn parse_for(&mut self, start: u32) -> PResult<Vec<Stmt>> {
        self.expect_word("for")?;
        self.expect_sym("(")?;
        // enhanced for
        let save = self.pos;
        self.skip_modifiers()?;
        if let Ok(ty) = self.parse_type() {
            if self.is_plain_ident() && self.is_sym_at(1, ":") {
                let var = self.ident()?;
                self.bump();
                let iterable = self.parse_expr()?;
                self.expect_sym(")")?;
                let body = self.parse_sub_statement()?;
                return Ok(self.single(
                    start,
                    StmtKind::ForEach {
                        var,
                        ty,
                        iterable,
                        body,
                    },
                ));
            }
        }
        self.pos = save;
        let init = if self.is_sym(";") {
            ForInit::Exprs(Vec::new())
        } else {
            self.skip_modifiers()?;
            match self.try_local_decl(start)? {
                Some(decls) => {
                    let mut ty = None;
                    let mut vars = Vec::new();
                    for d in decls {
                        if let StmtKind::LocalVarDecl { name, ty: t, init } = d.kind {
                            ty.get_or_insert(t);
                            vars.push((name, init));
                        }
                    }
                    ForInit::Decl {
                        ty: ty.unwrap_or_else(|| TypeRef::new("var")),
                        vars,
                    }
                }
                None => {
                    let mut es = vec![self.parse_expr()?];
                    while self.eat_sym(",") {
                        es.push(self.parse_expr()?);
                    }
                    ForInit::Exprs(es)
                }
            }
        };
        self.expect_sym(";")?;
        let cond = if self.is_sym(";") {
            None
        } else {
            Some(self.parse_expr()?)
        };
        self.expect_sym(";")?;
        let mut update = Vec::new();
        if !self.is_sym(")") {
            update.push(self.parse_expr()?);
            while self.eat_sym(",") {
                update.push(self.parse_expr()?);
            }
        }
        self.expect_sym(")")?;
        let body = self.parse_sub_statement()?;
        Ok(self.single(
            start,
            StmtKind::For {
                init,
                cond,
                update,
                body,
            },
        ))
    }

    fn parse_try(&mut self, start: u32) -> PResult<Vec<Stmt>> {
        self.expect_word("try")?;
        let mut resources = Vec::new();
        if self.eat_sym("(") {
            loop {
                if self.eat_sym(")") {
                    break;
                }
                let rstart = self.line();
                self.skip_modifiers()?;
                match self.try_local_decl(rstart)? {
                    Some(mut d) => resources.append(&mut d),
                    None => {
                        let e = self.parse_expr()?;
                        resources.push(Stmt {
                            id: self.placeholder_id(rstart),
                            span: Span::new(rstart, self.prev_line().max(rstart)),
                            kind: StmtKind::ExprStmt(e),
                        });
                    }
                }
                if !self.eat_sym(";") {
                    self.expect_sym(")")?;
                    break;
                }
            }
        }
        let body = Box::new(self.parse_block()?);
        let mut catches = Vec::new();
        while self.eat_word("catch") {
            self.expect_sym("(")?;
            self.skip_modifiers()?;
            let mut ty = self.parse_type()?.0;
            while self.eat_sym("|") {
                ty.push_str(" | ");
                ty.push_str(&self.parse_type()?.0);
            }
            let param = self.ident()?;
            self.expect_sym(")")?;
            let cbody = Box::new(self.parse_block()?);
            catches.push(CatchClause {
                param,
                ty: TypeRef::new(ty),
                body: cbody,
            });
        }
        let finally = if self.eat_word("finally") {
            Some(Box::new(self.parse_block()?))
        } else {
            None
        };
        if catches.is_empty() && finally.is_none() && resources.is_empty() {
            return self.err("try without catch or finally");
        }
        Ok(self.single(
            start,
            StmtKind::Try {
                resources,
                body,
                catches,
                finally,
            },
        ))
    }

    fn parse_switch(&mut self, start: u32) -> PResult<Vec<Stmt>> {
        self.expect_word("switch")?;
        self.expect_sym("(")?;
        let selector = self.parse_expr()?;
        self.expect_sym(")")?;
        if !self.is_sym("{") {
            return self.err("expected switch body");
        }
        let close = *self
            .brace_match
            .get(&self.pos)
            .ok_or_else(|| PErr { line: start, msg: "unbalanced switch".into() })?;
        self.bump();
        let mut cases: Vec<SwitchCase> = Vec::new();
        while self.pos < close {
            let mut labels = Vec::new();
            if self.eat_word("case") {
                labels.push(self.parse_ternary()?);
                while self.eat_sym(",") {
                    labels.push(self.parse_ternary()?);
                }
            } else if self.eat_word("default") {
            } else {
                return self.err("expected `case` or `default`");
            }
            if self.is_sym("->") {
                return self.err("arrow-form switch is not supported");
            }
            self.expect_sym(":")?;
            // statements until the next label at this level
            let mut body = Vec::new();
            while self.pos < close && !self.is_word("case") && !(self.is_word("default") && self.is_sym_at(1, ":")) {
                let limit = self.next_case_boundary(close);
                body.extend(self.parse_stmts_until(limit));
            }
            cases.push(SwitchCase { labels, body });
        }
        self.pos = close + 1;
        Ok(vec![Stmt {
            id: self.placeholder_id(start),
            span: Span::new(start, self.toks[close].line),
            kind: StmtKind::Switch { selector, cases },
        }])
    }

    /// Token index of the next `case`/`default:` label at the current brace depth.
    fn next_case_boundary(&self, close: usize) -> usize {
        let mut i = self.pos;
        while i < close {
            match &self.toks[i].tok {
                Tok::Sym("{") => {
                    i = self.brace_match.get(&i).copied().unwrap_or(close) + 1;
                    continue;
                }
                Tok::Ident(w) if w == "case" => return i,
                Tok::Ident(w)
                    if w == "default" && matches!(self.toks[i + 1].tok, Tok::Sym(":")) =>
                {
                    return i
                }
                _ => {}
            }
            i += 1;
        }
        close
    }

    // ---- expressions --------------------------------------------------------

    fn span_from(&self, start: u32) -> Span {
        Span::new(start, self.prev_line().max(start))
    }

    pub(super) fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_assignment()
    }

    /// Length (in tokens) of an assignment operator at the cursor, with its op.
    fn peek_assign_op(&self) -> Option<(usize, Option<BinaryOp>)> {
        match self.peek() {
            Tok::Sym("=") => Some((1, None)),
            Tok::Sym(s) if s.len() == 2 && s.ends_with('=') && !matches!(*s, "==" | "!=" | "<=") => {
                BinaryOp::from_symbol(&s[..1]).map(|op| (1, Some(op)))
            }
            Tok::Sym("<<=") => Some((1, Some(BinaryOp::Shl))),
            Tok::Sym(">") => {
                if self.is_sym_at(1, ">") && self.glued_at(1) {
                    if self.is_sym_at(2, ">") && self.glued_at(2) {
                        if self.is_sym_at(3, "=") && self.glued_at(3) {
                            return Some((4, Some(BinaryOp::UShr)));
                        }
                    } else if self.is_sym_at(2, "=") && self.glued_at(2) {
                        return Some((3, Some(BinaryOp::Shr)));
                    }
                }
                None
            }
            _ => None,
        }
    }

    fn check_lambda(&self) -> PResult<()> {
        if self.is_plain_ident() && self.is_sym_at(1, "->") {
            return self.err("lambda expressions are not supported");
        }
        Ok(())
    }

    fn parse_assignment(&mut self) -> PResult<Expr> {
        self.check_lambda()?;
        let start = self.line();
        let lhs = self.parse_ternary()?;
        if let Some((n, op)) = self.peek_assign_op() {
            for _ in 0..n {
                self.bump();
            }
            let value = self.parse_assignment()?;
            return Ok(Expr::new(
                ExprKind::Assign {
                    target: Box::new(lhs),
                    op,
                    value: Box::new(value),
                },
                self.span_from(start),
            ));
        }
        Ok(lhs)
    }

    fn parse_ternary(&mut self) -> PResult<Expr> {
        let start = self.line();
        let cond = self.parse_binary(0)?;
        if self.eat_sym("?") {
            self.check_lambda()?;
            let then_expr = self.parse_ternary_branch()?;
            self.expect_sym(":")?;
            self.check_lambda()?;
            let else_expr = self.parse_ternary_branch()?;
            return Ok(Expr::new(
                ExprKind::Conditional {
                    cond: Box::new(cond),
                    then_expr: Box::new(then_expr),
                    else_expr: Box::new(else_expr),
                },
                self.span_from(start),
            ));
        }
        Ok(cond)
    }

    fn parse_ternary_branch(&mut self) -> PResult<Expr> {
        self.parse_ternary()
    }

    /// Binary operator at the cursor: (op, token count). `instanceof` is handled separately.
    fn peek_binop(&self) -> Option<(BinaryOp, usize)> {
        match self.peek() {
            Tok::Sym(">") => {
                if self.is_sym_at(1, ">") && self.glued_at(1) {
                    if self.is_sym_at(2, ">") && self.glued_at(2) {
                        if self.is_sym_at(3, "=") && self.glued_at(3) {
                            return None;
                        }
                        return Some((BinaryOp::UShr, 3));
                    }
                    if self.is_sym_at(2, "=") && self.glued_at(2) {
                        return None;
                    }
                    return Some((BinaryOp::Shr, 2));
                }
                if self.is_sym_at(1, "=") && self.glued_at(1) {
                    return Some((BinaryOp::Ge, 2));
                }
                Some((BinaryOp::Gt, 1))
            }
            Tok::Sym(s) => BinaryOp::from_symbol(s).map(|op| (op, 1)),
            _ => None,
        }
    }

    fn parse_binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let start = self.line();
        let mut lhs = self.parse_unary()?;
        loop {
            if self.is_word("instanceof") {
                if 9 < min_prec {
                    break;
                }
                self.bump();
                self.eat_word("final");
                let ty = self.parse_type()?;
                if self.is_plain_ident() {
                    return self.err("pattern matching instanceof is not supported");
                }
                lhs = Expr::new(
                    ExprKind::InstanceOf {
                        expr: Box::new(lhs),
                        ty,
                    },
                    self.span_from(start),
                );
                continue;
            }
            let Some((op, n)) = self.peek_binop() else { break };
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            for _ in 0..n {
                self.bump();
            }
            let rhs = self.parse_binary(prec + 1)?;
            lhs = Expr::new(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                self.span_from(start),
            );
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let start = self.line();
        let op = match self.peek() {
            Tok::Sym("+") => Some(UnaryOp::Plus),
            Tok::Sym("-") => Some(UnaryOp::Neg),
            Tok::Sym("!") => Some(UnaryOp::Not),
            Tok::Sym("~") => Some(UnaryOp::BitNot),
            Tok::Sym("++") => Some(UnaryOp::PreInc),
            Tok::Sym("--") => Some(UnaryOp::PreDec),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.parse_unary()?;
            return Ok(Expr::new(
                ExprKind::Unary {
                    op,
                    operand: Box::new(operand),
                },
                self.span_from(start),
            ));
        }
        if self.is_sym("(") {
            if let Some(cast) = self.try_cast(start)? {
                return Ok(cast);
            }
        }
        let primary = self.parse_primary()?;
        self.parse_postfix(primary, start)
    }

    fn try_cast(&mut self, start: u32) -> PResult<Option<Expr>> {
        let save = self.pos;
        self.bump();
        let ty = match self.parse_type() {
            Ok(t) => t,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        // intersection casts
        let mut ty = ty;
        while self.is_sym("&") && !self.is_sym_at(1, "&") {
            let save2 = self.pos;
            self.bump();
            match self.parse_type() {
                Ok(t) => ty = TypeRef::new(format!("{} & {}", ty.0, t.0)),
                Err(_) => {
                    self.pos = save2;
                    break;
                }
            }
        }
        if !self.eat_sym(")") {
            self.pos = save;
            return Ok(None);
        }
        let primitive = PRIMITIVE_KEYWORDS.contains(&ty.base());
        let operand_follows = match self.peek() {
            Tok::Ident(w) => !is_keyword(w) || matches!(w.as_str(), "this" | "super" | "new") || PRIMITIVE_KEYWORDS.contains(&w.as_str()),
            Tok::Lit(..) => true,
            Tok::Sym(s) => matches!(*s, "(" | "!" | "~") || (primitive && matches!(*s, "+" | "-" | "++" | "--")),
            Tok::Eof => false,
        };
        if !operand_follows {
            self.pos = save;
            return Ok(None);
        }
        if self.is_sym("(") {
            // `(Type) (a, b) -> ...`
            if let Some(&end) = self.paren_match(self.pos).as_ref() {
                if matches!(self.toks.get(end + 1).map(|t| &t.tok), Some(Tok::Sym("->"))) {
                    return self.err("lambda expressions are not supported");
                }
            }
        }
        self.check_lambda()?;
        let operand = self.parse_unary()?;
        Ok(Some(Expr::new(
            ExprKind::Cast {
                ty,
                expr: Box::new(operand),
            },
            self.span_from(start),
        )))
    }

    fn paren_match(&self, open: usize) -> Option<usize> {
        let mut depth = 0i32;
        for (i, t) in self.toks.iter().enumerate().skip(open) {
            match t.tok {
                Tok::Sym("(") => depth += 1,
                Tok::Sym(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                Tok::Eof => return None,
                _ => {}
            }
        }
        None
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_sym("(")?;
        let mut args = Vec::new();
        if self.eat_sym(")") {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if self.eat_sym(",") {
                continue;
            }
            self.expect_sym(")")?;
            return Ok(args);
        }
    }

    fn parse_array_init(&mut self) -> PResult<Expr> {
        let start = self.line();
        self.expect_sym("{")?;
        let mut items = Vec::new();
        loop {
            if self.eat_sym("}") {
                break;
            }
            items.push(self.parse_var_init()?);
            if self.eat_sym(",") {
                continue;
            }
            self.expect_sym("}")?;
            break;
        }
        Ok(Expr::new(ExprKind::ArrayInit(items), self.span_from(start)))
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let start = self.line();
        match self.peek().clone() {
            Tok::Lit(kind, text) => {
                self.bump();
                Ok(Expr::new(
                    ExprKind::Literal(Literal { kind, text }),
                    Span::line(start),
                ))
            }
            Tok::Sym("(") => {
                if let Some(end) = self.paren_match(self.pos) {
                    if matches!(self.toks.get(end + 1).map(|t| &t.tok), Some(Tok::Sym("->"))) {
                        return self.err("lambda expressions are not supported");
                    }
                }
                self.bump();
                let e = self.parse_expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("{") => self.parse_array_init(),
            Tok::Ident(w) => match w.as_str() {
                "this" => {
                    self.bump();
                    if self.is_sym("(") {
                        let args = self.parse_args()?;
                        return Ok(Expr::new(
                            ExprKind::MethodCall {
                                receiver: None,
                                name: "this".into(),
                                args,
                            },
                            self.span_from(start),
                        ));
                    }
                    Ok(Expr::new(ExprKind::This, Span::line(start)))
                }
                "super" => {
                    self.bump();
                    if self.is_sym("(") {
                        let args = self.parse_args()?;
                        return Ok(Expr::new(
                            ExprKind::MethodCall {
                                receiver: None,
                                name: "super".into(),
                                args,
                            },
                            self.span_from(start),
                        ));
                    }
                    Ok(Expr::new(ExprKind::Super, Span::line(start)))
                }
                "new" => self.parse_creator(start),
                "switch" => self.err("switch expressions are not supported"),
                w if PRIMITIVE_KEYWORDS.contains(&w) => {
                    let ty = self.parse_type()?;
                    self.expect_sym(".")?;
                    self.expect_word("class")?;
                    Ok(Expr::new(ExprKind::ClassLiteral(ty), self.span_from(start)))
                }
                w if is_keyword(w) => self.err(format!("unexpected keyword `{w}`")),
                _ => {
                    let name = w.clone();
                    self.bump();
                    if self.is_sym("->") {
                        return self.err("lambda expressions are not supported");
                    }
                    if self.is_sym("(") {
                        let args = self.parse_args()?;
                        return Ok(Expr::new(
                            ExprKind::MethodCall {
                                receiver: None,
                                name,
                                args,
                            },
                            self.span_from(start),
                        ));
                    }
                    Ok(Expr::new(ExprKind::VarRef(name), Span::line(start)))
                }
            },
            t => self.err(format!("expected expression, found {}", describe(&t))),
        }
    }

    fn parse_creator(&mut self, start: u32) -> PResult<Expr> {
        self.expect_word("new")?;
        if self.is_sym("<") {
            self.parse_type_args()?;
        }
        // element/class type without array dims
        while self.is_sym("@") {
            self.skip_annotation()?;
        }
        let mut text = String::new();
        match self.peek().clone() {
            Tok::Ident(w) if PRIMITIVE_KEYWORDS.contains(&w.as_str()) => {
                text.push_str(&w);
                self.bump();
            }
            Tok::Ident(w) if !is_keyword(&w) => {
                text.push_str(&w);
                self.bump();
                if self.is_sym("<") {
                    text.push_str(&self.parse_type_args()?);
                }
                while self.is_sym(".") && self.is_plain_ident_at(1) {
                    self.bump();
                    text.push('.');
                    text.push_str(&self.ident()?);
                    if self.is_sym("<") {
                        text.push_str(&self.parse_type_args()?);
                    }
                }
            }
            t => return self.err(format!("expected type after `new`, found {}", describe(&t))),
        }
        let ty = TypeRef::new(text);
        if self.is_sym("[") {
            let mut dimensions = Vec::new();
            let mut extra_dims = 0u32;
            while self.is_sym("[") {
                self.bump();
                if self.eat_sym("]") {
                    extra_dims += 1;
                    continue;
                }
                if extra_dims > 0 {
                    return self.err("array dimension after unsized dimension");
                }
                dimensions.push(self.parse_expr()?);
                self.expect_sym("]")?;
            }
            let initializer = if self.is_sym("{") {
                match self.parse_array_init()?.kind {
                    ExprKind::ArrayInit(items) => Some(items),
                    _ => unreachable!(),
                }
            } else {
                None
            };
            return Ok(Expr::new(
                ExprKind::ArrayCreation {
                    element_type: ty,
                    dimensions,
                    extra_dims,
                    initializer,
                },
                self.span_from(start),
            ));
        }
        let args = self.parse_args()?;
        let anonymous_body = if self.is_sym("{") {
            self.skip_balanced("{", "}")?;
            true
        } else {
            false
        };
        Ok(Expr::new(
            ExprKind::New {
                ty,
                args,
                anonymous_body,
            },
            self.span_from(start),
        ))
    }

    fn parse_postfix(&mut self, mut e: Expr, start: u32) -> PResult<Expr> {
        loop {
            if self.is_sym(".") {
                self.bump();
                if self.is_sym("<") {
                    self.parse_type_args()?;
                }
                if self.eat_word("class") {
                    let ty = TypeRef::new(e.render());
                    e = Expr::new(ExprKind::ClassLiteral(ty), self.span_from(start));
                    continue;
                }
                if self.eat_word("this") {
                    e = Expr::new(ExprKind::This, self.span_from(start));
                    continue;
                }
                if self.is_word("new") {
                    return self.err("qualified instance creation is not supported");
                }
                let name = match self.peek() {
                    Tok::Ident(w) if w == "super" => {
                        self.bump();
                        "super".to_string()
                    }
                    _ => self.ident()?,
                };
                if self.is_sym("(") {
                    let args = self.parse_args()?;
                    e = Expr::new(
                        ExprKind::MethodCall {
                            receiver: Some(Box::new(e)),
                            name,
                            args,
                        },
                        self.span_from(start),
                    );
                } else {
                    e = Expr::new(
                        ExprKind::FieldAccess {
                            target: Box::new(e),
                            name,
                        },
                        self.span_from(start),
                    );
                }
            } else if self.is_sym("[") {
                if self.is_sym_at(1, "]") {
                    // `Type[].class`
                    let mut ty = e.render();
                    while self.is_sym("[") && self.is_sym_at(1, "]") {
                        self.bump();
                        self.bump();
                        ty.push_str("[]");
                    }
                    self.expect_sym(".")?;
                    self.expect_word("class")?;
                    e = Expr::new(ExprKind::ClassLiteral(TypeRef::new(ty)), self.span_from(start));
                    continue;
                }
                self.bump();
                let index = self.parse_expr()?;
                self.expect_sym("]")?;
                e = Expr::new(
                    ExprKind::ArrayAccess {
                        array: Box::new(e),
                        index: Box::new(index),
                    },
                    self.span_from(start),
                );
            } else if self.is_sym("++") || self.is_sym("--") {
                let op = if self.is_sym("++") {
                    UnaryOp::PostInc
                } else {
                    UnaryOp::PostDec
                };
                self.bump();
                e = Expr::new(
                    ExprKind::Unary {
                        op,
                        operand: Box::new(e),
                    },
                    self.span_from(start),
                );
            } else if self.is_sym("::") {
                return self.err("method references are not supported");
            } else {
                return Ok(e);
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Lit(_, s) => format!("literal {s}"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of file".to_string(),
    }
}

/// Parses a standalone expression (used by tests and tooling).
pub fn parse_expression(file: &str, src: &str) -> Result<Expr, String> {
    let toks = tokenize(src).map_err(|e| e.to_string())?;
    let mut p = Parser::new(&toks, file);
    let e = p.parse_expr().map_err(|e| format!("line {}: {}", e.line, e.msg))?;
    if !p.at_eof() {
        return Err(format!("trailing input at {}", describe(p.peek())));
    }
    Ok(e)
}

// ---- ordinal assignment ----------------------------------------------------

struct Ordinals(HashMap<u32, u32>);

impl Ordinals {
    fn next(&mut self, id: &mut StatementId) {
        let n = self.0.entry(id.line).or_insert(0);
        id.ordinal = *n;
        *n += 1;
    }
}

/// Assigns on-line ordinals in source (pre-order) order across the unit.
fn assign_ordinals(unit: &mut CompilationUnit) {
    let mut ord = Ordinals(HashMap::new());
    for c in &mut unit.classes {
        assign_class(c, &mut ord);
    }
}

fn assign_class(c: &mut ClassDecl, ord: &mut Ordinals) {
    enum Member {
        Field(usize),
        Method(usize),
        Class(usize),
    }
    let mut members: Vec<(u32, Member)> = Vec::new();
    members.extend(c.fields.iter().enumerate().map(|(i, f)| (f.span.start_line, Member::Field(i))));
    members.extend(c.methods.iter().enumerate().map(|(i, m)| (m.span.start_line, Member::Method(i))));
    members.extend(c.classes.iter().enumerate().map(|(i, k)| (k.span.start_line, Member::Class(i))));
    members.sort_by_key(|(l, _)| *l);
    for (_, m) in members {
        match m {
            Member::Field(i) => ord.next(&mut c.fields[i].id),
            Member::Method(i) => {
                let m = &mut c.methods[i];
                for p in &mut m.params {
                    ord.next(&mut p.id);
                }
                if let MethodBody::Parsed(stmts) = &mut m.body {
                    for s in stmts {
                        assign_stmt(s, ord);
                    }
                }
            }
            Member::Class(i) => assign_class(&mut c.classes[i], ord),
        }
    }
}

fn assign_stmt(s: &mut Stmt, ord: &mut Ordinals) {
    ord.next(&mut s.id);
    use StmtKind::*;
    match &mut s.kind {
        If {
            then_branch,
            else_branch,
            ..
        } => {
            assign_stmt(then_branch, ord);
            if let Some(e) = else_branch {
                assign_stmt(e, ord);
            }
        }
        For { body, .. }
        | ForEach { body, .. }
        | While { body, .. }
        | DoWhile { body, .. }
        | Sync { body, .. }
        | Labeled { body, .. } => assign_stmt(body, ord),
        Block(stmts) => {
            for s in stmts {
                assign_stmt(s, ord);
            }
        }
        Try {
            resources,
            body,
            catches,
            finally,
        } => {
            for r in resources {
                assign_stmt(r, ord);
            }
            assign_stmt(body, ord);
            for c in catches {
                assign_stmt(&mut c.body, ord);
            }
            if let Some(f) = finally {
                assign_stmt(f, ord);
            }
        }
        Switch { cases, .. } => {
            for c in cases {
                for s in &mut c.body {
                    assign_stmt(s, ord);
                }
            }
        }
        _ => {}
    }
}

//! Line-faithful source model: parsing of Java sources into a simplified AST
//! and resolution of stack-trace statements to AST nodes.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod print;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use ast::*;
pub use parser::{parse_compilation_unit, parse_expression, ParseOutput};

use crate::stacktrace::RelevantStatement;

/// A note about a region of a source file that could not be modelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDiagnostic {
    pub file: String,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for SourceDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.span.start_line == self.span.end_line {
            write!(f, "{}:{}: {}", self.file, self.span.start_line, self.message)
        } else {
            write!(
                f,
                "{}:{}-{}: {}",
                self.file, self.span.start_line, self.span.end_line, self.message
            )
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("cannot read source root {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Why a relevant statement could not be mapped onto the AST.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnresolvedStatement {
    #[error("no parsed unit for {file} (class {class})")]
    NoUnit { class: String, file: String },
    #[error("no method `{method}` covering line {line} in {file}")]
    NoMethod {
        file: String,
        method: String,
        line: u32,
    },
    #[error("no statement at {file}:{line}")]
    NoStatement { file: String, line: u32 },
    #[error("{file}:{line} lies in a region that was not modelled")]
    Opaque { file: String, line: u32 },
}

/// A method together with its unit and its chain of enclosing classes.
#[derive(Debug, Clone)]
pub struct MethodContext<'m> {
    pub unit: &'m CompilationUnit,
    /// Outermost first; the last entry declares `method`.
    pub classes: Vec<&'m ClassDecl>,
    pub method: &'m MethodDecl,
}

impl<'m> MethodContext<'m> {
    pub fn class(&self) -> &'m ClassDecl {
        self.classes.last().expect("method context without class")
    }

    /// Field visible from the method, searching inner classes first.
    pub fn field(&self, name: &str) -> Option<&'m FieldDecl> {
        self.classes.iter().rev().find_map(|c| c.field(name))
    }
}

#[derive(Debug, Clone)]
pub struct StmtContext<'m> {
    pub method: MethodContext<'m>,
    pub stmt: &'m Stmt,
    /// More than one method matched the frame; the innermost was chosen.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SourceModel {
    units: BTreeMap<String, CompilationUnit>,
    diagnostics: Vec<SourceDiagnostic>,
}

fn rel_path(root: &Path, file: &Path) -> String {
    let rel = file.strip_prefix(root).unwrap_or(file);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

/// Parses every `.java` file below the given roots. A relative path seen
/// under an earlier root shadows the same path under later roots.
pub fn parse_sources<P: AsRef<Path>>(roots: &[P]) -> Result<SourceModel, SourceError> {
    let mut files: Vec<(String, PathBuf)> = Vec::new();
    let mut diagnostics = Vec::new();
    for root in roots {
        let root = root.as_ref();
        let meta = std::fs::metadata(root).map_err(|source| SourceError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        if !meta.is_dir() {
            return Err(SourceError::Io {
                path: root.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
            });
        }
        for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
            match entry {
                Ok(e) => {
                    let p = e.path();
                    if e.file_type().is_file() && p.extension().is_some_and(|x| x == "java") {
                        files.push((rel_path(root, p), p.to_path_buf()));
                    }
                }
                Err(err) => diagnostics.push(SourceDiagnostic {
                    file: err
                        .path()
                        .map(|p| p.display().to_string())
                        .unwrap_or_else(|| root.display().to_string()),
                    span: Span::line(1),
                    message: format!("skipped: {err}"),
                }),
            }
        }
    }

    let parsed: Vec<Result<ParseOutput, SourceDiagnostic>> = files
        .par_iter()
        .map(|(rel, abs)| match std::fs::read_to_string(abs) {
            Ok(text) => Ok(parse_compilation_unit(rel, abs.clone(), &text)),
            Err(e) => Err(SourceDiagnostic {
                file: rel.clone(),
                span: Span::line(1),
                message: format!("unreadable file: {e}"),
            }),
        })
        .collect();

    let mut model = SourceModel {
        units: BTreeMap::new(),
        diagnostics,
    };
    for r in parsed {
        match r {
            Ok(out) => model.insert(out),
            Err(d) => model.diagnostics.push(d),
        }
    }
    Ok(model)
}

impl SourceModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a model from in-memory `(relative path, source text)` pairs.
    pub fn from_sources<I, P, S>(sources: I) -> Self
    where
        I: IntoIterator<Item = (P, S)>,
        P: AsRef<str>,
        S: AsRef<str>,
    {
        let mut model = SourceModel::new();
        for (path, text) in sources {
            let path = path.as_ref();
            model.insert(parse_compilation_unit(path, PathBuf::from(path), text.as_ref()));
        }
        model
    }

    fn insert(&mut self, out: ParseOutput) {
        let path = out.unit.path.clone();
        if self.units.contains_key(&path) {
            self.diagnostics.push(SourceDiagnostic {
                file: path,
                span: Span::line(1),
                message: format!(
                    "duplicate of an earlier source root; {} ignored",
                    out.unit.source_path.display()
                ),
            });
            return;
        }
        self.diagnostics.extend(out.diagnostics);
        self.units.insert(path, out.unit);
    }

    pub fn units(&self) -> impl Iterator<Item = &CompilationUnit> {
        self.units.values()
    }

    pub fn unit(&self, path: &str) -> Option<&CompilationUnit> {
        self.units.get(path)
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn diagnostics(&self) -> &[SourceDiagnostic] {
        &self.diagnostics
    }

    /// Unit declaring `class_name` in `file_name`: first by the package path
    /// derived from the class name, then by file name and package, then by a
    /// unique file name.
    pub fn find_unit(&self, class_name: &str, file_name: &str) -> Option<&CompilationUnit> {
        let top = class_name.split('$').next().unwrap_or(class_name);
        let package = top.rsplit_once('.').map(|(p, _)| p);
        let expected = match package {
            Some(p) => format!("{}/{}", p.replace('.', "/"), file_name),
            None => file_name.to_string(),
        };
        if let Some(u) = self
            .units
            .values()
            .find(|u| u.path == expected || u.path.ends_with(&format!("/{expected}")))
        {
            return Some(u);
        }
        let same_name: Vec<&CompilationUnit> =
            self.units.values().filter(|u| u.file_name() == file_name).collect();
        if let Some(u) = same_name
            .iter()
            .find(|u| u.package.as_deref() == package)
        {
            return Some(u);
        }
        if same_name.len() == 1 {
            return Some(same_name[0]);
        }
        None
    }

    /// Locates a statement by id together with its enclosing method.
    pub fn locate(&self, id: &StatementId) -> Option<StmtContext<'_>> {
        let unit = self.units.get(&id.file)?;
        let mut found = None;
        unit.walk_classes(&mut |chain| {
            if found.is_some() {
                return;
            }
            let class = chain[chain.len() - 1];
            for m in &class.methods {
                if !m.span.contains_line(id.line) {
                    continue;
                }
                let mut hit = None;
                m.walk(&mut |s| {
                    if hit.is_none() && s.id == *id {
                        hit = Some(s);
                    }
                });
                if let Some(stmt) = hit {
                    found = Some(StmtContext {
                        method: MethodContext {
                            unit,
                            classes: chain.to_vec(),
                            method: m,
                        },
                        stmt,
                        ambiguous: false,
                    });
                    return;
                }
            }
        });
        found
    }

    /// The method declaring a parameter with this id.
    pub fn locate_param(&self, id: &StatementId) -> Option<(MethodContext<'_>, &Param)> {
        let unit = self.units.get(&id.file)?;
        let mut found = None;
        unit.walk_classes(&mut |chain| {
            let class = chain[chain.len() - 1];
            for m in &class.methods {
                if let Some(p) = m.params.iter().find(|p| p.id == *id) {
                    if found.is_none() {
                        found = Some((
                            MethodContext {
                                unit,
                                classes: chain.to_vec(),
                                method: m,
                            },
                            p,
                        ));
                    }
                }
            }
        });
        found
    }

    /// Methods covering `line` whose name matches the frame's method
    /// (`<init>` selects constructors), innermost first.
    pub fn methods_at<'m>(
        &'m self,
        unit: &'m CompilationUnit,
        class_name: &str,
        method_name: &str,
        line: u32,
    ) -> Vec<MethodContext<'m>> {
        let simple: Vec<&str> = class_name
            .rsplit('.')
            .next()
            .unwrap_or(class_name)
            .split('$')
            .collect();
        let named_class = simple
            .iter()
            .rev()
            .find(|s| !s.chars().all(|c| c.is_ascii_digit()))
            .copied()
            .unwrap_or("");
        let mut out: Vec<(bool, MethodContext<'m>)> = Vec::new();
        unit.walk_classes(&mut |chain| {
            let class = chain[chain.len() - 1];
            for m in &class.methods {
                let name_ok = if method_name == "<init>" {
                    m.is_constructor()
                } else {
                    m.name == method_name
                };
                if name_ok && m.span.contains_line(line) {
                    out.push((
                        class.name == named_class,
                        MethodContext {
                            unit,
                            classes: chain.to_vec(),
                            method: m,
                        },
                    ));
                }
            }
        });
        out.sort_by_key(|(class_match, m)| (!*class_match, m.method.span.end_line - m.method.span.start_line));
        out.into_iter().map(|(_, m)| m).collect()
    }
}

struct Candidate<'m> {
    stmt: &'m Stmt,
    depth: usize,
}

fn covers_on_line(s: &Stmt, line: u32) -> bool {
    if s.is_block() {
        return false;
    }
    if matches!(s.kind, StmtKind::Opaque) || s.span.start_line == line {
        return true;
    }
    s.own_exprs().iter().any(|e| e.span.contains_line(line))
}

fn collect_candidates<'m>(s: &'m Stmt, line: u32, depth: usize, out: &mut Vec<Candidate<'m>>) {
    if !s.span.contains_line(line) {
        return;
    }
    if covers_on_line(s, line) {
        out.push(Candidate { stmt: s, depth });
    }
    for c in s.children() {
        collect_candidates(c, line, depth + 1, out);
    }
}

/// Statements of a method that are candidates for a reported line, in
/// pre-order, together with a choice among them: the innermost (earliest on
/// ties) statement satisfying `prefer`, or the innermost overall.
pub fn statement_at<'m>(
    method: &'m MethodDecl,
    line: u32,
    prefer: &dyn Fn(&Stmt) -> bool,
) -> Option<&'m Stmt> {
    let mut cands = Vec::new();
    for s in method.statements() {
        collect_candidates(s, line, 0, &mut cands);
    }
    if cands.is_empty() {
        return None;
    }
    let preferred: Vec<usize> = (0..cands.len()).filter(|&i| prefer(cands[i].stmt)).collect();
    let pool: Vec<usize> = if preferred.is_empty() {
        (0..cands.len()).collect()
    } else {
        preferred
    };
    // innermost: no other pool member nested below it
    let innermost = pool.iter().copied().find(|&i| {
        let d = cands[i].depth;
        !cands[i + 1..]
            .iter()
            .enumerate()
            .take_while(|(_, c)| c.depth > d)
            .any(|(k, _)| pool.contains(&(i + 1 + k)))
    });
    innermost.or(pool.first().copied()).map(|i| cands[i].stmt)
}

/// Resolves a relevant statement to its AST statement, preferring statements
/// for which `prefer` holds when several share the reported line.
pub fn resolve_statement<'m>(
    model: &'m SourceModel,
    rs: &RelevantStatement,
    prefer: &dyn Fn(&Stmt) -> bool,
) -> Result<StmtContext<'m>, UnresolvedStatement> {
    let unit = model
        .find_unit(&rs.class_name, &rs.file_name)
        .ok_or_else(|| UnresolvedStatement::NoUnit {
            class: rs.class_name.clone(),
            file: rs.file_name.clone(),
        })?;
    let mut methods = model.methods_at(unit, &rs.class_name, &rs.method_name, rs.line);
    if methods.is_empty() {
        return Err(UnresolvedStatement::NoMethod {
            file: unit.path.clone(),
            method: rs.method_name.clone(),
            line: rs.line,
        });
    }
    let ambiguous = methods.len() > 1;
    let method = methods.remove(0);
    if matches!(method.method.body, MethodBody::Opaque) {
        return Err(UnresolvedStatement::Opaque {
            file: unit.path.clone(),
            line: rs.line,
        });
    }
    let stmt = statement_at(method.method, rs.line, prefer).ok_or_else(|| {
        UnresolvedStatement::NoStatement {
            file: unit.path.clone(),
            line: rs.line,
        }
    })?;
    if matches!(stmt.kind, StmtKind::Opaque) {
        return Err(UnresolvedStatement::Opaque {
            file: unit.path.clone(),
            line: rs.line,
        });
    }
    Ok(StmtContext {
        method,
        stmt,
        ambiguous,
    })
}

/// Parses one file's text; convenience for tools that work on a single file.
pub fn parse_source_text(path: &str, text: &str) -> ParseOutput {
    parse_compilation_unit(path, PathBuf::from(path), text)
}

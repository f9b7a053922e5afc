//! JVM stack-trace parsing and selection of application frames.

use std::fmt;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::source_model::SourceModel;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub class_name: String,
    pub method_name: String,
    pub file_name: Option<String>,
    pub line: Option<u32>,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}(", self.class_name, self.method_name)?;
        match (&self.file_name, self.line) {
            (Some(file), Some(line)) => write!(f, "{file}:{line})"),
            (Some(file), None) => write!(f, "{file})"),
            _ => f.write_str("Unknown Source)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedStackTrace {
    pub exception_type: String,
    pub message: Option<String>,
    /// Index 0 is the frame that raised the exception.
    pub frames: Vec<Frame>,
    pub cause: Option<Box<ParsedStackTrace>>,
    /// `at` lines that could not be parsed.
    #[serde(default)]
    pub skipped_frames: usize,
}

impl ParsedStackTrace {
    /// Innermost `Caused by:` section, or `self` without causes.
    pub fn root_cause(&self) -> &ParsedStackTrace {
        let mut t = self;
        while let Some(c) = &t.cause {
            t = c;
        }
        t
    }

    /// Simple name of the exception class (`NullPointerException`).
    pub fn simple_exception_name(&self) -> &str {
        self.exception_type
            .rsplit(['.', '$'])
            .next()
            .unwrap_or(&self.exception_type)
    }

    /// Re-serializes in JVM format, causes included and frames uncompressed.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut t = Some(self);
        let mut first = true;
        while let Some(cur) = t {
            if !first {
                out.push_str("Caused by: ");
            }
            first = false;
            out.push_str(&cur.exception_type);
            if let Some(m) = &cur.message {
                out.push_str(": ");
                out.push_str(m);
            }
            out.push('\n');
            for fr in &cur.frames {
                out.push_str("\tat ");
                out.push_str(&fr.to_string());
                out.push('\n');
            }
            t = cur.cause.as_deref();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

/// An application frame the analysis starts from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelevantStatement {
    pub line: u32,
    pub class_name: String,
    pub method_name: String,
    pub file_name: String,
    pub stack_depth: usize,
}

static FRAME_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*at\s+(?:[^\s(]*/)?([^\s(/]+)\(([^)]*)\)\s*(?:~?\[[^\]]*\])?\s*$").unwrap()
});

static HEADER_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"^\s*(?:Exception in thread "[^"]*"\s+)?(?:Caused by:\s*)?([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)(?::\s?(.*))?$"#,
    )
    .unwrap()
});

static MORE_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*\.\.\.\s*(\d+)\s+more\s*$").unwrap());

fn looks_like_exception(name: &str) -> bool {
    if name.contains('.') {
        return true;
    }
    ["Exception", "Error", "Throwable"]
        .iter()
        .any(|s| name.ends_with(s))
}

fn parse_frame(line: &str) -> Option<Frame> {
    let caps = FRAME_RE.captures(line)?;
    let qual = caps.get(1)?.as_str();
    let (class_name, method_name) = qual.rsplit_once('.')?;
    if class_name.is_empty() || method_name.is_empty() {
        return None;
    }
    let loc = caps.get(2)?.as_str().trim();
    let (file_name, line_no) = if loc == "Native Method" || loc.starts_with("Unknown Source") || loc.is_empty() {
        (None, None)
    } else if let Some((file, l)) = loc.rsplit_once(':') {
        match l.trim().parse::<u32>() {
            Ok(n) if n >= 1 => (Some(file.to_string()), Some(n)),
            _ => return None,
        }
    } else {
        (Some(loc.to_string()), None)
    };
    Some(Frame {
        class_name: class_name.to_string(),
        method_name: method_name.to_string(),
        file_name,
        line: line_no,
    })
}

fn parse_header(line: &str) -> Option<(String, Option<String>)> {
    let caps = HEADER_RE.captures(line)?;
    let ty = caps.get(1)?.as_str();
    if !looks_like_exception(ty) {
        return None;
    }
    let msg = caps.get(2).map(|m| m.as_str().to_string());
    Some((ty.to_string(), msg))
}

fn is_frame_line(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with("at ") || t.starts_with("at\t")
}

struct Section {
    exception_type: String,
    message: Option<String>,
    frames: Vec<Frame>,
    more: usize,
    skipped: usize,
}

/// Parses the whole exception chain; the returned trace is the outermost
/// exception and `cause` links lead to the root cause.
pub fn parse_exception_chain(raw: &str) -> Result<ParsedStackTrace, TraceError> {
    let lines: Vec<&str> = raw.lines().collect();
    let first_frame = lines
        .iter()
        .position(|l| parse_frame(l).is_some())
        .ok_or_else(|| {
            if lines.iter().any(|l| parse_header(l).is_some()) {
                TraceError::MalformedTrace("exception header without any frames".into())
            } else {
                TraceError::MalformedTrace("no exception header found".into())
            }
        })?;
    // header: nearest preceding header-like line; lines in between continue the message
    let header_idx = (0..first_frame)
        .rev()
        .find(|&i| parse_header(lines[i]).is_some())
        .ok_or_else(|| TraceError::MalformedTrace("frames without an exception header".into()))?;
    let (ty, mut msg) = parse_header(lines[header_idx]).unwrap();
    for extra in &lines[header_idx + 1..first_frame] {
        if extra.trim().is_empty() {
            continue;
        }
        let m = msg.get_or_insert_with(String::new);
        if !m.is_empty() {
            m.push('\n');
        }
        m.push_str(extra);
    }

    let mut sections = vec![Section {
        exception_type: ty,
        message: msg,
        frames: Vec::new(),
        more: 0,
        skipped: 0,
    }];
    let mut in_suppressed = false;
    for line in &lines[first_frame..] {
        let trimmed = line.trim_start();
        if trimmed.starts_with("Suppressed:") {
            in_suppressed = true;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("Caused by:") {
            if in_suppressed && line.len() != trimmed.len() {
                // cause of a suppressed exception
                continue;
            }
            in_suppressed = false;
            match parse_header(rest) {
                Some((ty, msg)) => sections.push(Section {
                    exception_type: ty,
                    message: msg,
                    frames: Vec::new(),
                    more: 0,
                    skipped: 0,
                }),
                None => sections.last_mut().unwrap().skipped += 1,
            }
            continue;
        }
        if in_suppressed {
            continue;
        }
        let cur = sections.last_mut().unwrap();
        if let Some(c) = MORE_RE.captures(line) {
            cur.more = c[1].parse().unwrap_or(0);
            continue;
        }
        if is_frame_line(line) {
            match parse_frame(line) {
                Some(f) => cur.frames.push(f),
                None => cur.skipped += 1,
            }
        }
    }

    // `... N more`: the last N frames repeat those of the enclosing trace
    for i in 1..sections.len() {
        let more = sections[i].more;
        if more > 0 {
            let outer = &sections[i - 1].frames;
            let tail: Vec<Frame> = outer[outer.len().saturating_sub(more)..].to_vec();
            sections[i].frames.extend(tail);
        }
    }

    let mut result: Option<ParsedStackTrace> = None;
    for s in sections.into_iter().rev() {
        if s.frames.is_empty() {
            return Err(TraceError::MalformedTrace(format!(
                "section `{}` has no frames",
                s.exception_type
            )));
        }
        result = Some(ParsedStackTrace {
            exception_type: s.exception_type,
            message: s.message,
            frames: s.frames,
            cause: result.map(Box::new),
            skipped_frames: s.skipped,
        });
    }
    Ok(result.expect("at least one section"))
}

/// Parses a trace and returns its root cause: the exception to analyze.
/// `skipped_frames` counts skipped lines over the whole chain.
pub fn parse_stack_trace(raw: &str) -> Result<ParsedStackTrace, TraceError> {
    let chain = parse_exception_chain(raw)?;
    let mut skipped = 0;
    let mut t = Some(&chain);
    while let Some(c) = t {
        skipped += c.skipped_frames;
        t = c.cause.as_deref();
    }
    let root = chain.root_cause();
    Ok(ParsedStackTrace {
        exception_type: root.exception_type.clone(),
        message: root.message.clone(),
        frames: root.frames.clone(),
        cause: None,
        skipped_frames: skipped,
    })
}

// ---- frame filtering ----------------------------------------------------

pub const DEFAULT_EXCLUDED_PACKAGES: &[&str] = &[
    "java",
    "javax",
    "sun",
    "com.sun",
    "jdk",
    "org.junit",
    "junit",
    "org.mockito",
    "org.hamcrest",
    "org.apache.maven.surefire",
    "org.testng",
    "org.gradle",
];

fn default_excluded() -> Vec<String> {
    DEFAULT_EXCLUDED_PACKAGES.iter().map(|s| s.to_string()).collect()
}

fn default_markers() -> Vec<String> {
    vec!["test".to_string()]
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFilterConfig {
    /// Empty means: application code is whatever the source model contains.
    #[serde(default)]
    pub application_packages: Vec<String>,
    #[serde(default = "default_excluded")]
    pub excluded_packages: Vec<String>,
    #[serde(default = "default_markers")]
    pub test_path_markers: Vec<String>,
    /// A class named like a test but found under main sources stays application code.
    #[serde(default = "default_true")]
    pub test_named_main_classes_are_application: bool,
}

impl Default for FrameFilterConfig {
    fn default() -> Self {
        Self {
            application_packages: Vec::new(),
            excluded_packages: default_excluded(),
            test_path_markers: default_markers(),
            test_named_main_classes_are_application: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read filter config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid filter config {path}: {message}")]
    Syntax { path: String, message: String },
    #[error("application package `{app}` is covered by excluded package `{excluded}`")]
    Overlap { app: String, excluded: String },
}

/// `name` lies in package `prefix` (or is that class).
pub fn matches_package(name: &str, prefix: &str) -> bool {
    let prefix = prefix.trim_end_matches('.');
    if prefix.is_empty() {
        return false;
    }
    name == prefix
        || (name.len() > prefix.len()
            && name.starts_with(prefix)
            && matches!(name.as_bytes()[prefix.len()], b'.' | b'$'))
}

impl FrameFilterConfig {
    pub fn with_application_packages<I, S>(packages: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            application_packages: packages.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for app in &self.application_packages {
            for ex in &self.excluded_packages {
                if matches_package(app, ex) {
                    return Err(ConfigError::Overlap {
                        app: app.clone(),
                        excluded: ex.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses TOML or JSON text; `hint` is a file name used to pick the format.
    pub fn parse(text: &str, hint: &str) -> Result<Self, ConfigError> {
        let syntax = |message: String| ConfigError::Syntax {
            path: hint.to_string(),
            message,
        };
        let cfg: FrameFilterConfig = if hint.ends_with(".json") {
            serde_json::from_str(text).map_err(|e| syntax(e.to_string()))?
        } else if hint.ends_with(".toml") {
            toml::from_str(text).map_err(|e| syntax(e.to_string()))?
        } else {
            match toml::from_str(text) {
                Ok(c) => c,
                Err(te) => serde_json::from_str(text)
                    .map_err(|je| syntax(format!("neither TOML ({te}) nor JSON ({je})")))?,
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    fn is_excluded(&self, class: &str) -> bool {
        self.excluded_packages.iter().any(|p| matches_package(class, p))
    }

    fn path_has_marker(&self, path: &str) -> bool {
        let segs: Vec<&str> = path.split('/').collect();
        self.test_path_markers.iter().any(|m| {
            if m.contains('/') {
                format!("/{path}").contains(m.as_str())
            } else {
                segs[..segs.len().saturating_sub(1)].iter().any(|s| s == m)
            }
        })
    }
}

/// Simple class names conventionally used for tests.
pub fn is_test_class_name(class_name: &str) -> bool {
    let simple = class_name.rsplit('.').next().unwrap_or(class_name);
    let simple = simple.split('$').next().unwrap_or(simple);
    if simple.ends_with("Test") || simple.ends_with("Tests") {
        return true;
    }
    simple
        .strip_prefix("Test")
        .and_then(|r| r.chars().next())
        .is_some_and(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Path a class would have when laid out by package.
fn package_path(class_name: &str, file_name: &str) -> String {
    let top = class_name.split('$').next().unwrap_or(class_name);
    match top.rsplit_once('.') {
        Some((pkg, _)) => format!("{}/{}", pkg.replace('.', "/"), file_name),
        None => file_name.to_string(),
    }
}

/// Keeps the application frames of `trace`, closest to the raising frame first.
pub fn get_relevant_statements(
    trace: &ParsedStackTrace,
    filter: &FrameFilterConfig,
) -> Vec<RelevantStatement> {
    get_relevant_statements_in(trace, filter, None)
}

/// As [`get_relevant_statements`], using the source model to locate files
/// (for test-path markers and, without application packages, to decide
/// what counts as application code).
pub fn get_relevant_statements_in(
    trace: &ParsedStackTrace,
    filter: &FrameFilterConfig,
    model: Option<&SourceModel>,
) -> Vec<RelevantStatement> {
    let mut out = Vec::new();
    for (depth, f) in trace.frames.iter().enumerate() {
        let (Some(file), Some(line)) = (&f.file_name, f.line) else {
            continue;
        };
        if filter.is_excluded(&f.class_name) {
            continue;
        }
        let unit = model.and_then(|m| m.find_unit(&f.class_name, file));
        let in_app = if filter.application_packages.is_empty() {
            model.is_none() || unit.is_some()
        } else {
            filter
                .application_packages
                .iter()
                .any(|p| matches_package(&f.class_name, p))
        };
        if !in_app {
            continue;
        }
        let path = unit
            .map(|u| u.path.clone())
            .unwrap_or_else(|| package_path(&f.class_name, file));
        if filter.path_has_marker(&path) {
            continue;
        }
        if is_test_class_name(&f.class_name)
            && !(filter.test_named_main_classes_are_application && unit.is_some())
        {
            continue;
        }
        out.push(RelevantStatement {
            line,
            class_name: f.class_name.clone(),
            method_name: f.method_name.clone(),
            file_name: file.clone(),
            stack_depth: depth,
        });
    }
    out
}

//! Python bindings: `import exfl`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use exfl_core::analyzers::{AnalyzerConfig, AnalyzerRegistry};
use exfl_core::eval::{self, FaultLocation};
use exfl_core::ranking::{self, ranking_from_json, ranking_to_json, ranking_to_table};
use exfl_core::sbfl::{self, CoverageSpectrum};
use exfl_core::source_model::{parse_source_text, parse_sources, print};
use exfl_core::stacktrace::{self, get_relevant_statements_in, FrameFilterConfig};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed exception: the root cause of the trace.
#[pyclass(name = "StackTrace", frozen)]
pub struct StackTrace {
    inner: stacktrace::ParsedStackTrace,
}

#[pymethods]
impl StackTrace {
    #[getter]
    fn exception_type(&self) -> &str {
        &self.inner.exception_type
    }

    #[getter]
    fn message(&self) -> Option<&str> {
        self.inner.message.as_deref()
    }

    /// `(class_name, method_name, file_name, line)` per frame, top first.
    #[getter]
    fn frames(&self) -> Vec<(String, String, Option<String>, Option<u32>)> {
        self.inner
            .frames
            .iter()
            .map(|f| (f.class_name.clone(), f.method_name.clone(), f.file_name.clone(), f.line))
            .collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("StackTrace({}, {} frames)", self.inner.exception_type, self.inner.frames.len())
    }
}

/// Parses a JVM stack trace and returns its root cause.
#[pyfunction]
fn parse_stack_trace(text: &str) -> PyResult<StackTrace> {
    stacktrace::parse_stack_trace(text)
        .map(|inner| StackTrace { inner })
        .map_err(value_error)
}

#[pyclass(name = "SourceModel", frozen)]
pub struct SourceModel {
    inner: exfl_core::SourceModel,
}

#[pymethods]
impl SourceModel {
    /// Parses every `.java` file below the given source roots.
    #[staticmethod]
    fn from_roots(roots: Vec<String>) -> PyResult<Self> {
        parse_sources(&roots).map(|inner| Self { inner }).map_err(value_error)
    }

    /// Builds a model from `{root-relative path: source text}`.
    #[staticmethod]
    fn from_sources(sources: Vec<(String, String)>) -> Self {
        Self {
            inner: exfl_core::SourceModel::from_sources(sources),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn diagnostics(&self) -> Vec<String> {
        self.inner.diagnostics().iter().map(|d| d.to_string()).collect()
    }

    /// AST dump of one unit of the model.
    #[pyo3(signature = (path, lines = true))]
    fn dump_ast(&self, path: &str, lines: bool) -> PyResult<String> {
        let unit = self
            .inner
            .unit(path)
            .ok_or_else(|| value_error(format!("no compilation unit `{path}`")))?;
        Ok(print::dump_unit(unit, lines))
    }
}

/// AST dump of a source text.
#[pyfunction]
#[pyo3(signature = (source, path = "Input.java", lines = true))]
fn dump_ast(source: &str, path: &str, lines: bool) -> String {
    print::dump_unit(&parse_source_text(path, source).unit, lines)
}

#[pyclass(name = "RepairTarget", frozen)]
pub struct RepairTarget {
    inner: exfl_core::RepairTarget,
}

#[pymethods]
impl RepairTarget {
    #[getter]
    fn file(&self) -> &str {
        &self.inner.location.file
    }

    #[getter]
    fn line(&self) -> u32 {
        self.inner.location.line
    }

    #[getter]
    fn ordinal(&self) -> u32 {
        self.inner.location.ordinal
    }

    #[getter]
    fn expression(&self) -> Option<String> {
        self.inner.expression.as_ref().map(|e| e.render())
    }

    #[getter]
    fn guessed_faults(&self) -> Vec<&'static str> {
        self.inner.guessed_faults.iter().map(|g| g.label()).collect()
    }

    /// `None` for entries promoted by position only.
    #[getter]
    fn suspiciousness(&self) -> Option<f64> {
        self.inner.suspiciousness.value()
    }

    #[getter]
    fn origin(&self) -> String {
        self.inner.origin.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "RepairTarget({} {} {}{})",
            self.inner.location,
            self.inner.suspiciousness,
            self.inner.origin,
            self.expression().map(|e| format!(" `{e}`")).unwrap_or_default()
        )
    }
}

#[pyclass(name = "Ranking", frozen)]
pub struct Ranking {
    inner: exfl_core::Ranking,
}

#[pymethods]
impl Ranking {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ranking_from_json(text).map(|inner| Self { inner }).map_err(value_error)
    }

    fn to_json(&self) -> String {
        ranking_to_json(&self.inner)
    }

    fn to_table(&self) -> String {
        ranking_to_table(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn entries(&self) -> Vec<RepairTarget> {
        self.inner
            .entries
            .iter()
            .map(|e| RepairTarget { inner: e.clone() })
            .collect()
    }

    fn position(&self, file: &str, line: u32) -> Option<f64> {
        position_of(&self.inner, file, line)
    }

    fn probability(&self, file: &str, line: u32) -> PyResult<f64> {
        probability_of(&self.inner, file, line)
    }
}

fn position_of(r: &exfl_core::Ranking, file: &str, line: u32) -> Option<f64> {
    match eval::position(r, &FaultLocation { file: file.into(), line }) {
        eval::Position::At(p) => Some(p),
        eval::Position::NotInRanking => None,
    }
}

fn probability_of(r: &exfl_core::Ranking, file: &str, line: u32) -> PyResult<f64> {
    eval::probability(r, &FaultLocation { file: file.into(), line }).map_err(value_error)
}

#[pyclass(name = "Localization", frozen)]
pub struct Localization {
    #[pyo3(get)]
    ranking: Py<Ranking>,
    /// Why the SBFL ranking was returned unchanged, if it was.
    #[pyo3(get)]
    fallback: Option<String>,
    #[pyo3(get)]
    except_targets: usize,
    #[pyo3(get)]
    diagnostics: Vec<String>,
}

fn filter_config(app_packages: Option<Vec<String>>) -> PyResult<FrameFilterConfig> {
    let mut f = FrameFilterConfig::default();
    f.application_packages.extend(app_packages.unwrap_or_default());
    f.validate().map_err(value_error)?;
    Ok(f)
}

/// Exception-driven localization over an optional SBFL ranking.
#[pyfunction]
#[pyo3(signature = (trace, model, sbfl = None, analyzers = None, app_packages = None, depth_limit = 3))]
fn localize(
    py: Python<'_>,
    trace: &str,
    model: &SourceModel,
    sbfl: Option<&Ranking>,
    analyzers: Option<Vec<String>>,
    app_packages: Option<Vec<String>>,
    depth_limit: u32,
) -> PyResult<Localization> {
    let parsed = stacktrace::parse_stack_trace(trace).map_err(value_error)?;
    let registry = match analyzers {
        Some(names) => AnalyzerRegistry::with_enabled(&names).map_err(value_error)?,
        None => AnalyzerRegistry::default(),
    };
    if depth_limit == 0 {
        return Err(value_error("depth_limit must be at least 1"));
    }
    let cfg = AnalyzerConfig {
        depth_limit,
        ..AnalyzerConfig::default()
    };
    let filter = filter_config(app_packages)?;
    let entries = sbfl.map(|r| r.inner.entries.clone()).unwrap_or_default();
    let loc = ranking::localize(&model.inner, &parsed, &filter, &entries, &registry, &cfg).map_err(value_error)?;
    Ok(Localization {
        ranking: Py::new(py, Ranking { inner: loc.ranking })?,
        fallback: loc.fallback.map(|f| f.to_string()),
        except_targets: loc.except_targets,
        diagnostics: loc.diagnostics.iter().map(|d| d.to_string()).collect(),
    })
}

/// Ochiai ranking of a spectrum in the text format.
#[pyfunction]
fn ochiai(spectrum: &str) -> PyResult<Ranking> {
    let s = CoverageSpectrum::parse(spectrum).map_err(value_error)?;
    sbfl::ochiai(&s).map(|inner| Ranking { inner }).map_err(value_error)
}

/// Moves the trace's application statements to the top of `ranking`.
#[pyfunction]
#[pyo3(signature = (ranking, trace, model = None, app_packages = None))]
fn ssfix_rerank(
    ranking: &Ranking,
    trace: &str,
    model: Option<&SourceModel>,
    app_packages: Option<Vec<String>>,
) -> PyResult<Ranking> {
    let parsed = stacktrace::parse_stack_trace(trace).map_err(value_error)?;
    let filter = filter_config(app_packages)?;
    let relevant = get_relevant_statements_in(&parsed, &filter, model.map(|m| &m.inner));
    Ok(Ranking {
        inner: sbfl::ssfix_rerank(&ranking.inner.entries, &relevant),
    })
}

/// Average 1-based position of a faulty line; `None` when absent.
#[pyfunction]
fn position(ranking: &Ranking, file: &str, line: u32) -> Option<f64> {
    position_of(&ranking.inner, file, line)
}

/// Suspiciousness share of a faulty line.
#[pyfunction]
fn probability(ranking: &Ranking, file: &str, line: u32) -> PyResult<f64> {
    probability_of(&ranking.inner, file, line)
}

#[pymodule]
fn exfl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<StackTrace>()?;
    m.add_class::<SourceModel>()?;
    m.add_class::<RepairTarget>()?;
    m.add_class::<Ranking>()?;
    m.add_class::<Localization>()?;
    m.add_function(wrap_pyfunction!(parse_stack_trace, m)?)?;
    m.add_function(wrap_pyfunction!(dump_ast, m)?)?;
    m.add_function(wrap_pyfunction!(localize, m)?)?;
    m.add_function(wrap_pyfunction!(ochiai, m)?)?;
    m.add_function(wrap_pyfunction!(ssfix_rerank, m)?)?;
    m.add_function(wrap_pyfunction!(position, m)?)?;
    m.add_function(wrap_pyfunction!(probability, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

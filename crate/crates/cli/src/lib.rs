//! The `exfl` command line: `localize`, `sbfl`, `rerank-ssfix`, `evaluate`
//! and `dump-ast`.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use exfl_core::analyzers::{AnalyzerConfig, AnalyzerRegistry};
use exfl_core::eval::{compare, EvalReport, GroundTruth};
use exfl_core::ranking::{localize, ranking_from_json, ranking_to_json, ranking_to_table, Ranking};
use exfl_core::sbfl::{ochiai, ssfix_rerank, CoverageSpectrum};
use exfl_core::source_model::print::dump_unit;
use exfl_core::source_model::{parse_source_text, parse_sources, SourceModel};
use exfl_core::stacktrace::{get_relevant_statements_in, parse_stack_trace, FrameFilterConfig};
use exfl_core::Diagnostic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "exfl", version, about = "Exception-driven fault localization", args_conflicts_with_subcommands = true)]
pub struct Cli {
    /// Print the AST of one source file and exit.
    #[arg(long, value_name = "FILE")]
    pub dump_ast: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank repair targets for a failure from its stack trace.
    Localize(LocalizeArgs),
    /// Compute an Ochiai ranking from a coverage spectrum.
    Sbfl(SbflArgs),
    /// Move the statements of a stack trace to the top of a ranking.
    RerankSsfix(RerankArgs),
    /// Report positions and probabilities of faulty statements.
    Evaluate(EvaluateArgs),
    /// Print the S-expression AST of a source file.
    DumpAst(DumpAstArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Fewer messages: suppress warnings.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    /// More messages on the error stream.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Frame filter configuration (TOML or JSON).
    #[arg(long, value_name = "FILE", env = "EXFL_FILTER_CONFIG")]
    pub filter_config: Option<PathBuf>,
    /// Application package prefix; may be repeated.
    #[arg(long = "app-package", value_name = "PREFIX")]
    pub app_packages: Vec<String>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[arg(long, value_name = "FILE")]
    pub trace: PathBuf,
    /// Directory holding application sources; may be repeated.
    #[arg(long = "source-root", value_name = "DIR", required = true)]
    pub source_roots: Vec<PathBuf>,
    /// Input SBFL ranking (JSON).
    #[arg(long, value_name = "FILE")]
    pub sbfl: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Comma-separated analyzers to enable.
    #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "aioobe,sioobe,npe,iae")]
    pub enable_analyzers: Vec<String>,
    #[arg(long, value_name = "N", default_value_t = exfl_core::dataflow::DEFAULT_DEPTH_LIMIT)]
    pub depth_limit: u32,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SbflArgs {
    #[arg(long, value_name = "FILE")]
    pub spectrum: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RerankArgs {
    #[arg(long, value_name = "FILE")]
    pub ranking: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub trace: PathBuf,
    /// Source roots used to recognise application frames.
    #[arg(long = "source-root", value_name = "DIR")]
    pub source_roots: Vec<PathBuf>,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Comma-separated `technique=ranking.json` pairs.
    #[arg(long, value_name = "LIST", value_delimiter = ',', required = true)]
    pub rankings: Vec<String>,
    #[arg(long, value_name = "FILE")]
    pub truth: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DumpAstArgs {
    pub file: PathBuf,
    /// Omit line annotations.
    #[arg(long)]
    pub no_lines: bool,
}

/// A failure mapped to exit code 2, naming the stage.
#[derive(Debug)]
struct Failure {
    stage: &'static str,
    message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.stage, self.message)
    }
}

fn fail(stage: &'static str, e: impl fmt::Display) -> Failure {
    Failure {
        stage,
        message: e.to_string(),
    }
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    quiet: bool,
    verbose: u8,
}

impl Io<'_> {
    fn warn(&mut self, d: &Diagnostic) {
        if !self.quiet {
            let _ = writeln!(self.stderr, "{d}");
        }
    }

    fn info(&mut self, stage: &str, msg: impl fmt::Display) {
        if self.verbose > 0 && !self.quiet {
            let _ = writeln!(self.stderr, "INFO {stage}: {msg}");
        }
    }

    /// Writes `payload` to `out` or, without a path, to stdout.
    fn emit(&mut self, out: Option<&Path>, payload: &[u8]) -> Result<(), Failure> {
        match out {
            Some(p) => std::fs::write(p, payload).map_err(|e| fail("output", format!("{}: {e}", p.display()))),
            None => self.stdout.write_all(payload).map_err(|e| fail("output", e)),
        }
    }

    /// Ranking payload: JSON to the output file; stdout gets the requested
    /// format (table by default when a file was written, JSON otherwise).
    fn emit_ranking(&mut self, out: Option<&Path>, format: Option<Format>, r: &Ranking) -> Result<(), Failure> {
        let json = ranking_to_json(r);
        match out {
            Some(p) => {
                self.emit(Some(p), json.as_bytes())?;
                match format {
                    Some(Format::Json) => self.emit(None, json.as_bytes()),
                    Some(Format::Table) => self.emit(None, ranking_to_table(r).as_bytes()),
                    None => Ok(()),
                }
            }
            None => match format.unwrap_or(Format::Json) {
                Format::Json => self.emit(None, json.as_bytes()),
                Format::Table => self.emit(None, ranking_to_table(r).as_bytes()),
            },
        }
    }
}

fn read(stage: &'static str, p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| fail(stage, format!("{}: {e}", p.display())))
}

fn filter_config(f: &FilterArgs) -> Result<FrameFilterConfig, Failure> {
    let mut cfg = match &f.filter_config {
        Some(p) => FrameFilterConfig::from_path(p).map_err(|e| fail("config", e))?,
        None => FrameFilterConfig::default(),
    };
    cfg.application_packages.extend(f.app_packages.iter().cloned());
    cfg.validate().map_err(|e| fail("config", e))?;
    Ok(cfg)
}

fn load_model(roots: &[PathBuf], io: &mut Io<'_>) -> Result<SourceModel, Failure> {
    let model = parse_sources(roots).map_err(|e| fail("source", e))?;
    io.info("source", format!("{} compilation units", model.len()));
    Ok(model)
}

fn cmd_localize(a: &LocalizeArgs, io: &mut Io<'_>) -> Result<(), Failure> {
    let raw = read("trace", &a.trace)?;
    let trace = parse_stack_trace(&raw).map_err(|e| fail("trace", e))?;
    let filter = filter_config(&a.filter)?;
    let registry = AnalyzerRegistry::with_enabled(&a.enable_analyzers).map_err(|e| fail("config", e))?;
    if a.depth_limit == 0 {
        return Err(fail("config", "--depth-limit must be at least 1"));
    }
    let cfg = AnalyzerConfig {
        depth_limit: a.depth_limit,
        ..AnalyzerConfig::default()
    };
    let model = load_model(&a.source_roots, io)?;
    let (sbfl_bytes, sbfl) = match &a.sbfl {
        Some(p) => {
            let text = read("sbfl", p)?;
            let r = ranking_from_json(&text).map_err(|e| fail("sbfl", e))?;
            (Some(text), r)
        }
        None => (None, Ranking::default()),
    };
    let loc = localize(&model, &trace, &filter, &sbfl.entries, &registry, &cfg).map_err(|e| fail("ranking", e))?;
    for d in &loc.diagnostics {
        io.warn(d);
    }
    if loc.fallback.is_some() {
        // the input ranking is handed back byte for byte
        let bytes = sbfl_bytes.unwrap_or_else(|| "[]\n".to_string());
        io.emit(a.out.as_deref(), bytes.as_bytes())?;
        if a.out.is_some() && a.format == Some(Format::Table) {
            io.emit(None, ranking_to_table(&sbfl).as_bytes())?;
        }
        return Ok(());
    }
    io.info("localize", format!("{} EXCEPT targets, {} entries", loc.except_targets, loc.ranking.len()));
    io.emit_ranking(a.out.as_deref(), a.format, &loc.ranking)
}

fn cmd_sbfl(a: &SbflArgs, io: &mut Io<'_>) -> Result<(), Failure> {
    let text = read("spectrum", &a.spectrum)?;
    let spectrum = CoverageSpectrum::parse(&text).map_err(|e| fail("spectrum", e))?;
    if !spectrum.tests.iter().any(|t| t.outcome == exfl_core::sbfl::Outcome::Fail) {
        io.warn(&Diagnostic::new("spectrum", "no failing test; every score is 0"));
    }
    let r = ochiai(&spectrum).map_err(|e| fail("spectrum", e))?;
    io.emit_ranking(a.out.as_deref(), a.format, &r)
}

fn cmd_rerank(a: &RerankArgs, io: &mut Io<'_>) -> Result<(), Failure> {
    let ranking = ranking_from_json(&read("ranking", &a.ranking)?).map_err(|e| fail("ranking", e))?;
    let trace = parse_stack_trace(&read("trace", &a.trace)?).map_err(|e| fail("trace", e))?;
    let filter = filter_config(&a.filter)?;
    let model = if a.source_roots.is_empty() {
        None
    } else {
        Some(load_model(&a.source_roots, io)?)
    };
    let relevant = get_relevant_statements_in(&trace, &filter, model.as_ref());
    if relevant.is_empty() {
        io.warn(&Diagnostic::new("rerank", "no application frame in the trace; ranking unchanged"));
    }
    let r = ssfix_rerank(&ranking.entries, &relevant);
    io.emit_ranking(a.out.as_deref(), a.format, &r)
}

fn cmd_evaluate(a: &EvaluateArgs, io: &mut Io<'_>) -> Result<(), Failure> {
    let mut rankings = Vec::new();
    for pair in &a.rankings {
        let Some((name, path)) = pair.split_once('=') else {
            return Err(fail("rankings", format!("`{pair}` is not of the form technique=file")));
        };
        let r = ranking_from_json(&read("rankings", Path::new(path))?)
            .map_err(|e| fail("rankings", format!("{path}: {e}")))?;
        rankings.push((name.to_string(), r));
    }
    let truths = GroundTruth::parse_all(&read("truth", &a.truth)?).map_err(|e| fail("truth", e))?;
    let mut report = EvalReport::default();
    for t in &truths {
        report.extend(compare(&rankings, t));
    }
    io.emit(a.out.as_deref(), report.to_csv().as_bytes())
}

fn cmd_dump_ast(file: &Path, lines: bool, io: &mut Io<'_>) -> Result<(), Failure> {
    let text = read("source", file)?;
    let out = parse_source_text(&file.display().to_string(), &text);
    for d in &out.diagnostics {
        io.warn(&Diagnostic::new("source", d.to_string()));
    }
    let mut s = dump_unit(&out.unit, lines);
    if !s.ends_with('\n') {
        s.push('\n');
    }
    io.emit(None, s.as_bytes())
}

/// Runs the command line with explicit output streams; returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    let (quiet, verbose) = match &cli.command {
        Some(Command::Localize(a)) => (a.common.quiet, a.common.verbose),
        Some(Command::Sbfl(a)) => (a.common.quiet, a.common.verbose),
        Some(Command::RerankSsfix(a)) => (a.common.quiet, a.common.verbose),
        Some(Command::Evaluate(a)) => (a.common.quiet, a.common.verbose),
        _ => (false, 0),
    };
    let mut io = Io {
        stdout,
        stderr,
        quiet,
        verbose,
    };
    let result = match (&cli.command, &cli.dump_ast) {
        (Some(Command::Localize(a)), _) => cmd_localize(a, &mut io),
        (Some(Command::Sbfl(a)), _) => cmd_sbfl(a, &mut io),
        (Some(Command::RerankSsfix(a)), _) => cmd_rerank(a, &mut io),
        (Some(Command::Evaluate(a)), _) => cmd_evaluate(a, &mut io),
        (Some(Command::DumpAst(a)), _) => cmd_dump_ast(&a.file, !a.no_lines, &mut io),
        (None, Some(f)) => cmd_dump_ast(f, true, &mut io),
        (None, None) => {
            let _ = writeln!(io.stderr, "error: a subcommand is required (see --help)");
            return EXIT_USAGE;
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(io.stderr, "{f}");
            EXIT_INPUT
        }
    }
}

/// Runs with the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

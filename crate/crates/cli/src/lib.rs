//! The `testscope` command line: extract facts, analyze a corpus into a
//! bundle, render views, report findings, and serve a bundle over HTTP.
//!
//! Exit codes: 0 success, 1 findings at or above `--fail-on`, 2 input or
//! configuration errors (missing root, bad config, schema violation, port
//! in use), 3 unknown view focus.

pub mod serve;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use testscope_core::bundle::{build_bundle, BundleInput, DiagnosticsRecord, LoadedBundle, ViewLookupError};
use testscope_core::config::{RunConfig, CONFIG_ENV};
use testscope_core::extract::{extract_tree, ExtractError, JUnitStyle};
use testscope_core::facts::{export_facts, import_facts};
use testscope_core::indicators::Severity;
use testscope_core::layout::layout_document;
use testscope_core::views::{build_system_wide, export, ExportFormat, ViewKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    UnknownFocus(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::UnknownFocus(_) => 3,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "testscope", version, about = "Static exploration of xUnit test suites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Default)]
pub struct ConfigArgs {
    /// Config file (defaults to $TESTSCOPE_CONFIG when set).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override a setting, e.g. `--set layout.seed=7`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub settings: Vec<String>,
}

#[derive(clap::Args, Debug, Default)]
pub struct SourceArgs {
    /// Source root to scan; repeatable.
    #[arg(long = "root", value_name = "DIR")]
    pub roots: Vec<PathBuf>,
    /// Include glob relative to each root; repeatable.
    #[arg(long = "include", value_name = "GLOB")]
    pub include: Vec<String>,
    /// Exclude glob relative to each root; repeatable.
    #[arg(long = "exclude", value_name = "GLOB")]
    pub exclude: Vec<String>,
    /// Test conventions to recognise: 3, 4 or both.
    #[arg(long, value_name = "STYLE")]
    pub junit: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse sources into a facts file.
    Extract {
        #[command(flatten)]
        sources: SourceArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output facts file; standard output when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline and write an exploration bundle.
    Analyze {
        #[command(flatten)]
        sources: SourceArgs,
        /// Analyze an existing facts file instead of sources.
        #[arg(long, value_name = "FILE", conflicts_with = "roots")]
        facts: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
        /// Override an indicator threshold, e.g. `complexScenarioMinProdMethods=3`.
        #[arg(long = "threshold", value_name = "NAME=VALUE")]
        thresholds: Vec<String>,
        /// Layout seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Corpus name recorded in the bundle.
        #[arg(long)]
        name: Option<String>,
        /// Output bundle file.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Do not print the summary table.
        #[arg(long)]
        quiet: bool,
    },
    /// Render one view of a bundle.
    View {
        #[arg(long, value_name = "FILE")]
        bundle: PathBuf,
        #[arg(long, value_enum)]
        kind: ViewArg,
        /// Qualified name of the unit or test case.
        #[arg(long)]
        focus: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Restrict the system-wide view to these packages (comma separated).
        #[arg(long, value_delimiter = ',')]
        packages: Vec<String>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Print the indicator report of a bundle.
    Report {
        #[arg(long, value_name = "FILE")]
        bundle: PathBuf,
        /// Exit with code 1 when findings of this severity (or worse) exist.
        #[arg(long, value_enum)]
        fail_on: Option<SeverityArg>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Serve a bundle and the viewer over HTTP.
    Serve {
        #[arg(long, value_name = "FILE")]
        bundle: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory with viewer assets served under `/`.
        #[arg(long, value_name = "DIR")]
        assets: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ViewArg {
    SystemWide,
    Unit,
    Testcase,
}

impl From<ViewArg> for ViewKind {
    fn from(v: ViewArg) -> Self {
        match v {
            ViewArg::SystemWide => ViewKind::SystemWide,
            ViewArg::Unit => ViewKind::UnitUnderTest,
            ViewArg::Testcase => ViewKind::TestCase,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Dot,
    Graphml,
    Json,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dot => ExportFormat::Dot,
            FormatArg::Graphml => ExportFormat::GraphMl,
            FormatArg::Json => ExportFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SeverityArg {
    Threat,
    Opportunity,
    Info,
}

impl From<SeverityArg> for Severity {
    fn from(s: SeverityArg) -> Self {
        match s {
            SeverityArg::Threat => Severity::Threat,
            SeverityArg::Opportunity => Severity::Opportunity,
            SeverityArg::Info => Severity::Info,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("testscope: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Extract { sources, config, out } => {
            let cfg = load_config(&config, Some(&sources), &[], None)?;
            let (model, diag) = extract_tree(&cfg.extract).map_err(extract_error)?;
            print_diagnostics(&diag.per_file_errors);
            eprintln!(
                "extracted {} entities from {}/{} files",
                model.len(),
                diag.files_parsed,
                diag.files_scanned
            );
            write_output(out.as_deref(), &export_facts(&model))?;
            Ok(0)
        }
        Command::Analyze {
            sources,
            facts,
            config,
            thresholds,
            seed,
            name,
            out,
            quiet,
        } => {
            let cfg = load_config(&config, Some(&sources), &thresholds, seed)?;
            let (model, diagnostics, timestamp, roots) = match facts {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| input(format!("{}: {e}", path.display())))?;
                    let model = import_facts(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
                    let mtime = fs::metadata(&path).and_then(|m| m.modified()).ok();
                    (model, DiagnosticsRecord::default(), timestamp(mtime), vec![path.display().to_string()])
                }
                None => {
                    let (model, diag) = extract_tree(&cfg.extract).map_err(extract_error)?;
                    print_diagnostics(&diag.per_file_errors);
                    let roots = cfg.extract.roots.iter().map(|r| r.display().to_string()).collect();
                    (model, DiagnosticsRecord::from(&diag), timestamp(diag.latest_modification), roots)
                }
            };
            let name = name.unwrap_or_else(|| corpus_name(&roots));
            let bundle = build_bundle(
                BundleInput {
                    name,
                    roots,
                    timestamp,
                    diagnostics,
                },
                &model,
                &cfg,
            );
            fs::write(&out, bundle.to_json()).map_err(|e| input(format!("{}: {e}", out.display())))?;
            if !quiet {
                print!("{}", bundle.meta.summary.render_text());
            }
            Ok(0)
        }
        Command::View {
            bundle,
            kind,
            focus,
            format,
            packages,
            out,
        } => {
            let loaded = load_bundle(&bundle)?;
            let kind = ViewKind::from(kind);
            let doc = if kind == ViewKind::SystemWide && !packages.is_empty() {
                let mut doc = build_system_wide(&loaded.test_model, Some(&packages))
                    .map_err(|e| CliError::UnknownFocus(e.to_string()))?;
                let layout = &loaded.bundle.settings.layout;
                let params = layout.params_for(doc.nodes.len());
                layout_document(&mut doc, &params, layout.coverage_attraction());
                doc
            } else {
                loaded.view(kind, focus.as_deref()).map_err(|e| match e {
                    ViewLookupError::UnknownFocus(_) => CliError::UnknownFocus(e.to_string()),
                    ViewLookupError::MissingFocus => input("--focus is required for this view"),
                })?
            };
            write_output(out.as_deref(), &export(&doc, format.into()))?;
            Ok(0)
        }
        Command::Report { bundle, fail_on, format } => {
            let loaded = load_bundle(&bundle)?;
            let report = &loaded.bundle.report;
            match format {
                ReportFormat::Text => print!("{}", report.render_text()),
                ReportFormat::Json => println!("{}", serde_json::to_string_pretty(report).expect("reports serialize")),
            }
            let failing = fail_on.is_some_and(|level| {
                let level = Severity::from(level);
                report.findings.iter().any(|f| f.severity <= level)
            });
            Ok(if failing { 1 } else { 0 })
        }
        Command::Serve {
            bundle,
            port,
            host,
            assets,
        } => {
            let loaded = load_bundle(&bundle)?;
            serve::run_blocking(loaded, &host, port, assets).map_err(input)?;
            Ok(0)
        }
    }
}

fn extract_error(e: ExtractError) -> CliError {
    input(e)
}

fn load_config(
    args: &ConfigArgs,
    sources: Option<&SourceArgs>,
    thresholds: &[String],
    seed: Option<u64>,
) -> Result<RunConfig, CliError> {
    let path = args
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => RunConfig::load(&p).map_err(input)?,
        None => RunConfig::default(),
    };
    for s in &args.settings {
        cfg.apply_setting(s).map_err(input)?;
    }
    if let Some(src) = sources {
        if !src.roots.is_empty() {
            cfg.extract.roots = src.roots.clone();
        }
        if !src.include.is_empty() {
            cfg.extract.include_globs = src.include.clone();
        }
        if !src.exclude.is_empty() {
            cfg.extract.exclude_globs = src.exclude.clone();
        }
        if let Some(style) = &src.junit {
            let style = JUnitStyle::parse(style).ok_or_else(|| input(format!("invalid --junit `{style}`: expected 3, 4 or both")))?;
            cfg.extract.junit_style = style;
            cfg.classify.junit_style = style;
        }
    }
    for t in thresholds {
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| input(format!("malformed threshold `{t}`, expected NAME=VALUE")))?;
        cfg.apply("indicators", name.trim(), value).map_err(input)?;
    }
    if let Some(seed) = seed {
        cfg.layout.seed = Some(seed);
    }
    cfg.validate().map_err(input)?;
    Ok(cfg)
}

fn load_bundle(path: &Path) -> Result<LoadedBundle, CliError> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    LoadedBundle::from_json(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_diagnostics(errors: &[(String, String)]) {
    for (file, message) in errors {
        eprintln!("warning: {file}: {message}");
    }
}

/// RFC 3339 source timestamp: `SOURCE_DATE_EPOCH` when set, else the given
/// modification time, else the epoch.
fn timestamp(mtime: Option<SystemTime>) -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .or_else(|| {
            mtime
                .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
                .map(|d| d.as_secs() as i64)
        })
        .unwrap_or(0);
    time::OffsetDateTime::from_unix_timestamp(secs)
        .unwrap_or(time::OffsetDateTime::UNIX_EPOCH)
        .format(&time::format_description::well_known::Rfc3339)
        .expect("timestamps format")
}

fn corpus_name(roots: &[String]) -> String {
    roots
        .first()
        .and_then(|r| {
            Path::new(r)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_else(|| "corpus".into())
}

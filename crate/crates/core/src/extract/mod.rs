//! Heuristic fact extraction from Java source trees following JUnit
//! conventions.

mod lexer;
pub mod parser;
mod resolve;

use std::fs;
use std::path::{Component, Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use regex::Regex;
use thiserror::Error;
use walkdir::WalkDir;

use crate::model::FactModel;

pub use resolve::{resolve_invocations, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JUnitStyle {
    Three,
    Four,
    #[default]
    Both,
}

impl JUnitStyle {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "3" => Some(JUnitStyle::Three),
            "4" => Some(JUnitStyle::Four),
            "both" => Some(JUnitStyle::Both),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            JUnitStyle::Three => "3",
            JUnitStyle::Four => "4",
            JUnitStyle::Both => "both",
        }
    }

    pub fn annotations(self) -> bool {
        self != JUnitStyle::Three
    }

    pub fn conventions(self) -> bool {
        self != JUnitStyle::Four
    }
}

pub const DEFAULT_GENERATOR_HEADERS: &[&str] = &[
    r"@generated",
    r"(?i)generated\s+by",
    r"(?i)auto-?generated",
    r"(?i)do not edit",
];

#[derive(Clone, Debug)]
pub struct ExtractionConfig {
    pub roots: Vec<PathBuf>,
    pub include_globs: Vec<String>,
    pub exclude_globs: Vec<String>,
    pub source_encoding: String,
    pub follow_symlinks: bool,
    pub generator_headers: Vec<String>,
    pub junit_style: JUnitStyle,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            roots: Vec::new(),
            include_globs: vec!["**/*.java".into()],
            exclude_globs: Vec::new(),
            source_encoding: "UTF-8".into(),
            follow_symlinks: false,
            generator_headers: DEFAULT_GENERATOR_HEADERS.iter().map(|s| s.to_string()).collect(),
            junit_style: JUnitStyle::Both,
        }
    }
}

impl ExtractionConfig {
    pub fn with_roots(roots: impl IntoIterator<Item = impl Into<PathBuf>>) -> Self {
        ExtractionConfig {
            roots: roots.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractionDiagnostics {
    pub files_scanned: usize,
    pub files_parsed: usize,
    pub parse_failures: usize,
    pub unresolved_invocation_count: usize,
    pub per_file_errors: Vec<(String, String)>,
    /// Newest modification time among the scanned files.
    pub latest_modification: Option<std::time::SystemTime>,
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("source root not found: {0}")]
    NoRootFound(PathBuf),
    #[error("no source roots configured")]
    NoRoots,
    #[error("invalid glob `{pattern}`: {message}")]
    InvalidGlob { pattern: String, message: String },
    #[error("invalid generator header pattern `{pattern}`: {message}")]
    InvalidPattern { pattern: String, message: String },
    #[error("unsupported source encoding `{0}`")]
    UnsupportedEncoding(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootKind {
    ProductionRoot,
    TestRoot,
    Mixed,
}

fn is_test_segment(segment: &str) -> bool {
    segment.eq_ignore_ascii_case("test") || segment.eq_ignore_ascii_case("tests")
}

/// True when a path contains a `test` or `tests` directory segment.
pub fn path_looks_like_test(path: &str) -> bool {
    let mut segments: Vec<&str> = path.split(['/', '\\']).collect();
    segments.pop(); // file name
    segments.into_iter().any(is_test_segment)
}

fn stem_looks_like_test(stem: &str) -> bool {
    stem.starts_with("Test") || stem.ends_with("Test") || stem.ends_with("Tests") || stem.ends_with("TestCase")
}

/// Labels a source root by path convention. This is a hint; the final
/// test/production split happens during classification.
pub fn classify_source_root(path: &Path, config: &ExtractionConfig) -> RootKind {
    let by_name = path.components().any(|c| match c {
        Component::Normal(s) => s.to_str().is_some_and(is_test_segment),
        _ => false,
    });
    if by_name {
        return RootKind::TestRoot;
    }
    let mut dirs: std::collections::BTreeMap<PathBuf, (bool, bool)> = Default::default();
    for entry in WalkDir::new(path)
        .follow_links(config.follow_symlinks)
        .into_iter()
        .filter_map(Result::ok)
    {
        let p = entry.path();
        if p.extension().and_then(|e| e.to_str()) != Some("java") {
            continue;
        }
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let slot = dirs.entry(p.parent().unwrap_or(path).to_path_buf()).or_default();
        if stem_looks_like_test(stem) {
            slot.0 = true;
        } else {
            slot.1 = true;
        }
    }
    if dirs.values().any(|(t, p)| *t && *p) {
        RootKind::Mixed
    } else {
        RootKind::ProductionRoot
    }
}

fn build_globs(patterns: &[String]) -> Result<GlobSet, ExtractError> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        b.add(Glob::new(p).map_err(|e| ExtractError::InvalidGlob {
            pattern: p.clone(),
            message: e.to_string(),
        })?);
    }
    b.build().map_err(|e| ExtractError::InvalidGlob {
        pattern: patterns.join(","),
        message: e.to_string(),
    })
}

fn decode(bytes: &[u8], encoding: &str) -> Result<String, String> {
    match encoding.to_ascii_lowercase().as_str() {
        "utf-8" | "utf8" => String::from_utf8(bytes.to_vec()).map_err(|e| e.to_string()),
        "iso-8859-1" | "latin1" | "latin-1" => Ok(bytes.iter().map(|&b| b as char).collect()),
        other => Err(format!("unsupported encoding {other}")),
    }
}

pub(crate) fn display_path(root: &Path, rel: &Path) -> String {
    let root = root.to_string_lossy().replace('\\', "/");
    let root = root.trim_start_matches("./").trim_end_matches('/');
    let rel = rel.to_string_lossy().replace('\\', "/");
    if root.is_empty() || root == "." {
        rel
    } else {
        format!("{root}/{rel}")
    }
}

/// Source file discovered under a root, with its display path.
struct SourceFile {
    path: PathBuf,
    display: String,
}

fn collect_files(config: &ExtractionConfig) -> Result<Vec<SourceFile>, ExtractError> {
    let include = build_globs(&config.include_globs)?;
    let exclude = build_globs(&config.exclude_globs)?;
    let mut files = Vec::new();
    for root in &config.roots {
        for entry in WalkDir::new(root)
            .follow_links(config.follow_symlinks)
            .sort_by_file_name()
            .into_iter()
            .filter_map(Result::ok)
        {
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
            if !include.is_match(rel) || exclude.is_match(rel) {
                continue;
            }
            files.push(SourceFile {
                path: entry.path().to_path_buf(),
                display: display_path(root, rel),
            });
        }
    }
    files.sort_by(|a, b| a.display.cmp(&b.display));
    files.dedup_by(|a, b| a.display == b.display);
    Ok(files)
}

/// Parses every matching file under the configured roots and builds a
/// resolved fact model. Per-file problems are reported in the diagnostics.
pub fn extract_tree(
    config: &ExtractionConfig,
) -> Result<(FactModel, ExtractionDiagnostics), ExtractError> {
    if config.roots.is_empty() {
        return Err(ExtractError::NoRoots);
    }
    for root in &config.roots {
        if !root.is_dir() {
            return Err(ExtractError::NoRootFound(root.clone()));
        }
    }
    decode(b"", &config.source_encoding)
        .map_err(|_| ExtractError::UnsupportedEncoding(config.source_encoding.clone()))?;
    let generator_patterns = config
        .generator_headers
        .iter()
        .map(|p| {
            Regex::new(p).map_err(|e| ExtractError::InvalidPattern {
                pattern: p.clone(),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let files = collect_files(config)?;
    let parsed: Vec<Result<parser::CompilationUnit, String>> = files
        .par_iter()
        .map(|f| {
            let bytes = fs::read(&f.path).map_err(|e| e.to_string())?;
            let text = decode(&bytes, &config.source_encoding)?;
            parser::parse(&text).map_err(|e| format!("line {}: {}", e.line, e.message))
        })
        .collect();

    let mut diagnostics = ExtractionDiagnostics {
        files_scanned: files.len(),
        latest_modification: files
            .iter()
            .filter_map(|f| fs::metadata(&f.path).and_then(|m| m.modified()).ok())
            .max(),
        ..Default::default()
    };
    let mut units = Vec::new();
    for (file, result) in files.iter().zip(parsed) {
        match result {
            Ok(unit) => {
                diagnostics.files_parsed += 1;
                let generated = generator_patterns.iter().any(|r| r.is_match(&unit.header));
                units.push(resolve::ParsedFile {
                    path: file.display.clone(),
                    unit,
                    generated,
                });
            }
            Err(message) => {
                diagnostics.parse_failures += 1;
                diagnostics.per_file_errors.push((file.display.clone(), message));
            }
        }
    }
    let (program, model, merge_errors) = Program::merge(units);
    diagnostics.per_file_errors.extend(merge_errors);
    let model = resolve_invocations(model, &program);
    diagnostics.unresolved_invocation_count = model
        .relations_of(crate::model::RelationKind::Invocation)
        .filter(|r| !r.is_resolved())
        .count();
    Ok((model, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_conventions() {
        let cfg = ExtractionConfig::default();
        assert_eq!(classify_source_root(Path::new("src/test/java"), &cfg), RootKind::TestRoot);
        assert_eq!(classify_source_root(Path::new("src/main/java"), &cfg), RootKind::ProductionRoot);
    }

    #[test]
    fn shared_packages_make_a_mixed_root() {
        let dir = tempfile::tempdir().unwrap();
        let pkg = dir.path().join("org/apache/tools/ant");
        fs::create_dir_all(&pkg).unwrap();
        fs::write(pkg.join("Project.java"), "package org.apache.tools.ant; class Project {}").unwrap();
        fs::write(pkg.join("ProjectTest.java"), "package org.apache.tools.ant; class ProjectTest {}").unwrap();
        let cfg = ExtractionConfig::default();
        assert_eq!(classify_source_root(dir.path(), &cfg), RootKind::Mixed);
    }

    #[test]
    fn test_path_hint() {
        assert!(path_looks_like_test("proj/src/test/java/a/FooTest.java"));
        assert!(path_looks_like_test("cpp2famix/node/test/NodeTest.java"));
        assert!(!path_looks_like_test("proj/src/main/java/a/Test.java"));
    }

    #[test]
    fn missing_root_is_fatal() {
        let cfg = ExtractionConfig::with_roots(["/definitely/not/here"]);
        assert!(matches!(extract_tree(&cfg), Err(ExtractError::NoRootFound(_))));
    }

    #[test]
    fn empty_directory_gives_empty_model() {
        let dir = tempfile::tempdir().unwrap();
        let (model, diag) = extract_tree(&ExtractionConfig::with_roots([dir.path()])).unwrap();
        assert!(model.is_empty());
        assert_eq!(diag.files_scanned, 0);
    }

    #[test]
    fn bad_glob_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExtractionConfig::with_roots([dir.path()]);
        cfg.exclude_globs = vec!["a[".into()];
        assert!(matches!(extract_tree(&cfg), Err(ExtractError::InvalidGlob { .. })));
    }

    #[test]
    fn latin1_sources_decode() {
        assert_eq!(decode(&[0x63, 0xe9], "ISO-8859-1").unwrap(), "cé");
        assert!(decode(&[0xff], "UTF-8").is_err());
        assert!(decode(b"", "EBCDIC").is_err());
    }
}

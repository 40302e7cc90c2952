//! `testscope-bundle/1`: one JSON document holding the facts, the test
//! model, laid-out views and the indicator report of a corpus.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{LayoutOverrides, RunConfig};
use crate::extract::{ExtractionDiagnostics, JUnitStyle};
use crate::facts::{canonicalize, export_document, import_document, FactsDocument, FactsError};
use crate::indicators::{report, ReportDocument, Thresholds};
use crate::layout::layout_document;
use crate::model::{EntityKind, FactModel};
use crate::testmodel::{build_test_model, ClassifyConfig, TestModel, TestModelSummary, TestRole};
use crate::views::{build_system_wide, build_test_case_view, build_unit_view, GraphDocument, ViewKind};

pub const BUNDLE_FORMAT: &str = "testscope-bundle/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExplorationBundle {
    pub format_version: String,
    pub meta: CorpusMeta,
    pub settings: Settings,
    pub facts: FactsDocument,
    pub test_model: TestModelSummary,
    pub views: ViewSet,
    pub report: ReportDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusMeta {
    pub name: String,
    pub roots: Vec<String>,
    /// Source timestamp, not the time of analysis, so bundles are
    /// reproducible.
    pub timestamp: String,
    pub tool_version: String,
    pub diagnostics: DiagnosticsRecord,
    pub summary: Summary,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticsRecord {
    pub files_scanned: usize,
    pub files_parsed: usize,
    pub parse_failures: usize,
    pub unresolved_invocations: usize,
    pub per_file_errors: Vec<FileError>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileError {
    pub file: String,
    pub message: String,
}

impl From<&ExtractionDiagnostics> for DiagnosticsRecord {
    fn from(d: &ExtractionDiagnostics) -> Self {
        DiagnosticsRecord {
            files_scanned: d.files_scanned,
            files_parsed: d.files_parsed,
            parse_failures: d.parse_failures,
            unresolved_invocations: d.unresolved_invocation_count,
            per_file_errors: d
                .per_file_errors
                .iter()
                .map(|(file, message)| FileError {
                    file: file.clone(),
                    message: message.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub test_cases: usize,
    pub test_commands: usize,
    pub production_classes: usize,
    pub covered_classes: usize,
    pub uncovered_classes: usize,
    pub findings: BTreeMap<String, usize>,
}

impl Summary {
    pub fn compute(tm: &TestModel, report: &ReportDocument) -> Self {
        let m = tm.base();
        let covered: std::collections::BTreeSet<_> =
            tm.class_coverage().iter().map(|c| c.prod_class).collect();
        let production: Vec<_> = m
            .entities_of(EntityKind::Class)
            .filter(|c| tm.role(c.id) == TestRole::Production)
            .collect();
        let covered_classes = production.iter().filter(|c| covered.contains(&c.id)).count();
        Summary {
            test_cases: tm.test_cases().count(),
            test_commands: m
                .entities()
                .iter()
                .filter(|e| tm.role(e.id) == TestRole::TestCommand)
                .count(),
            production_classes: production.len(),
            covered_classes,
            uncovered_classes: production.len() - covered_classes,
            findings: report.counts.clone(),
        }
    }

    /// Plain-text table for terminals.
    pub fn render_text(&self) -> String {
        let mut rows = vec![
            ("test cases".to_string(), self.test_cases),
            ("test commands".to_string(), self.test_commands),
            ("production classes".to_string(), self.production_classes),
            ("covered classes".to_string(), self.covered_classes),
            ("uncovered classes".to_string(), self.uncovered_classes),
        ];
        for (kind, n) in &self.findings {
            rows.push((format!("findings: {kind}"), *n));
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

/// Classification settings in serializable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassifySettings {
    pub test_class_pattern: String,
    pub test_command_pattern: String,
    pub setup_names: Vec<String>,
    pub teardown_names: Vec<String>,
    pub framework_classes: Vec<String>,
    pub dominance_threshold: f64,
    pub setup_coverage: bool,
    pub constructor_coverage: bool,
    pub junit: String,
}

impl From<&ClassifyConfig> for ClassifySettings {
    fn from(c: &ClassifyConfig) -> Self {
        ClassifySettings {
            test_class_pattern: c.test_class_pattern.as_str().to_string(),
            test_command_pattern: c.test_command_pattern.as_str().to_string(),
            setup_names: c.setup_names.clone(),
            teardown_names: c.teardown_names.clone(),
            framework_classes: c.framework_classes.clone(),
            dominance_threshold: c.dominance_threshold,
            setup_coverage: c.setup_coverage,
            constructor_coverage: c.constructor_coverage,
            junit: c.junit_style.as_str().to_string(),
        }
    }
}

impl ClassifySettings {
    pub fn to_config(&self) -> Result<ClassifyConfig, String> {
        let regex = |p: &str| Regex::new(p).map_err(|e| e.to_string());
        Ok(ClassifyConfig {
            test_class_pattern: regex(&self.test_class_pattern)?,
            test_command_pattern: regex(&self.test_command_pattern)?,
            setup_names: self.setup_names.clone(),
            teardown_names: self.teardown_names.clone(),
            framework_classes: self.framework_classes.clone(),
            dominance_threshold: self.dominance_threshold,
            setup_coverage: self.setup_coverage,
            constructor_coverage: self.constructor_coverage,
            junit_style: JUnitStyle::parse(&self.junit).ok_or_else(|| format!("bad junit style `{}`", self.junit))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Settings {
    pub classify: ClassifySettings,
    pub layout: LayoutOverrides,
    pub thresholds: Thresholds,
}

/// Precomputed views: the system-wide view, unit views of every covered
/// production class and test-case views of every test case, keyed by
/// qualified name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViewSet {
    pub system_wide: GraphDocument,
    pub units: BTreeMap<String, GraphDocument>,
    pub test_cases: BTreeMap<String, GraphDocument>,
}

pub struct BundleInput {
    pub name: String,
    pub roots: Vec<String>,
    pub timestamp: String,
    pub diagnostics: DiagnosticsRecord,
}

fn laid_out(mut doc: GraphDocument, layout: &LayoutOverrides) -> GraphDocument {
    let params = layout.params_for(doc.nodes.len());
    layout_document(&mut doc, &params, layout.coverage_attraction());
    doc
}

/// Runs classification, coverage, indicators, views and layout over a
/// fact model.
pub fn build_bundle(input: BundleInput, model: &FactModel, config: &RunConfig) -> ExplorationBundle {
    let model = Arc::new(canonicalize(model));
    let tm = build_test_model(model.clone(), &config.classify);
    let report_doc = report(&tm, &config.thresholds).to_document(&tm);

    let m = &*model;
    let units: Vec<_> = {
        let covered: std::collections::BTreeSet<_> = tm.class_coverage().iter().map(|c| c.prod_class).collect();
        covered.into_iter().collect()
    };
    let test_cases: Vec<_> = tm.test_cases().collect();
    let system_wide = build_system_wide(&tm, None).expect("unfiltered view builds");

    let system_wide = laid_out(system_wide, &config.layout);
    let units: BTreeMap<String, GraphDocument> = units
        .par_iter()
        .map(|u| {
            let doc = build_unit_view(&tm, *u).expect("covered classes are production classes");
            (m.entity(*u).qualified_name.clone(), laid_out(doc, &config.layout))
        })
        .collect();
    let test_cases: BTreeMap<String, GraphDocument> = test_cases
        .par_iter()
        .map(|t| {
            let doc = build_test_case_view(&tm, *t).expect("test cases build");
            (m.entity(*t).qualified_name.clone(), laid_out(doc, &config.layout))
        })
        .collect();

    let summary = Summary::compute(&tm, &report_doc);
    ExplorationBundle {
        format_version: BUNDLE_FORMAT.to_string(),
        meta: CorpusMeta {
            name: input.name,
            roots: input.roots,
            timestamp: input.timestamp,
            tool_version: TOOL_VERSION.to_string(),
            diagnostics: input.diagnostics,
            summary,
        },
        settings: Settings {
            classify: ClassifySettings::from(&config.classify),
            layout: config.layout.clone(),
            thresholds: config.thresholds.clone(),
        },
        facts: export_document(m),
        test_model: tm.summary(),
        views: ViewSet {
            system_wide,
            units,
            test_cases,
        },
        report: report_doc,
    }
}

impl ExplorationBundle {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundles serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("schema violation at `{path}`: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("unsupported bundle format `{0}`")]
    UnsupportedVersion(String),
    #[error("embedded facts: {0}")]
    Facts(#[from] FactsError),
    #[error("inconsistent bundle: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ViewLookupError {
    #[error("unknown focus `{0}`")]
    UnknownFocus(String),
    #[error("this view needs a focus")]
    MissingFocus,
}

/// A parsed bundle with its test model rebuilt for on-demand views.
pub struct LoadedBundle {
    pub bundle: ExplorationBundle,
    pub test_model: TestModel,
}

impl LoadedBundle {
    pub fn from_json(text: &str) -> Result<Self, BundleError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| BundleError::SchemaViolation {
            path: String::new(),
            message: e.to_string(),
        })?;
        match value.get("formatVersion").and_then(|v| v.as_str()) {
            Some(BUNDLE_FORMAT) => {}
            Some(other) => return Err(BundleError::UnsupportedVersion(other.to_string())),
            None => {
                return Err(BundleError::SchemaViolation {
                    path: "formatVersion".into(),
                    message: "missing".into(),
                })
            }
        }
        let bundle: ExplorationBundle = serde_path_to_error::deserialize(value).map_err(|e| {
            BundleError::SchemaViolation {
                path: e.path().to_string(),
                message: e.into_inner().to_string(),
            }
        })?;
        Self::open(bundle)
    }

    pub fn open(bundle: ExplorationBundle) -> Result<Self, BundleError> {
        for (i, e) in bundle.facts.entities.iter().enumerate() {
            if e.id as usize != i {
                return Err(BundleError::Inconsistent(format!(
                    "facts entity {i} has id {}; bundle facts must be canonical",
                    e.id
                )));
            }
        }
        let model = import_document(&bundle.facts)?;
        let config = bundle.settings.classify.to_config().map_err(BundleError::Inconsistent)?;
        let test_model =
            TestModel::from_parts(Arc::new(model), &bundle.test_model, &config).map_err(BundleError::Inconsistent)?;
        Ok(LoadedBundle { bundle, test_model })
    }

    /// The requested view: precomputed when available, otherwise built and
    /// laid out with the bundle's settings.
    pub fn view(&self, kind: ViewKind, focus: Option<&str>) -> Result<GraphDocument, ViewLookupError> {
        let views = &self.bundle.views;
        match kind {
            ViewKind::SystemWide => Ok(views.system_wide.clone()),
            ViewKind::UnitUnderTest => {
                let focus = focus.ok_or(ViewLookupError::MissingFocus)?;
                if let Some(doc) = views.units.get(focus) {
                    return Ok(doc.clone());
                }
                let unknown = || ViewLookupError::UnknownFocus(focus.to_string());
                let m = self.test_model.base();
                let id = m.resolve_kind(focus, EntityKind::Class).ok_or_else(unknown)?;
                let doc = build_unit_view(&self.test_model, id).map_err(|_| unknown())?;
                Ok(laid_out(doc, &self.bundle.settings.layout))
            }
            ViewKind::TestCase => {
                let focus = focus.ok_or(ViewLookupError::MissingFocus)?;
                views
                    .test_cases
                    .get(focus)
                    .cloned()
                    .ok_or_else(|| ViewLookupError::UnknownFocus(focus.to_string()))
            }
        }
    }

    /// Format version, corpus metadata and settings.
    pub fn meta_json(&self) -> serde_json::Value {
        serde_json::json!({
            "formatVersion": self.bundle.format_version,
            "meta": self.bundle.meta,
            "settings": self.bundle.settings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EntitySpec, Relation, RelationKind, SourceLocation, Target};

    fn model() -> FactModel {
        let mut m = FactModel::new();
        let p = m.add_entity(EntityKind::Package, "p", None, EntitySpec::default()).unwrap();
        let c = m
            .add_entity(EntityKind::Class, "Stack", Some(p), EntitySpec::default().at(SourceLocation::new("p/Stack.java", 1, 9)))
            .unwrap();
        let push = m.add_entity(EntityKind::Method, "push/1", Some(c), EntitySpec::default()).unwrap();
        m.add_entity(EntityKind::Class, "Queue", Some(p), EntitySpec::default()).unwrap();
        let t = m.add_entity(EntityKind::Class, "StackTest", Some(p), EntitySpec::default()).unwrap();
        m.add_relation(Relation {
            kind: RelationKind::Inheritance,
            from: t,
            to: Target::Unresolved("junit.framework.TestCase".into()),
            site: None,
        })
        .unwrap();
        let cmd = m.add_entity(EntityKind::Method, "testPush/0", Some(t), EntitySpec::default()).unwrap();
        m.add_relation(Relation {
            kind: RelationKind::Invocation,
            from: cmd,
            to: Target::Resolved(push),
            site: None,
        })
        .unwrap();
        m
    }

    fn input() -> BundleInput {
        BundleInput {
            name: "stack".into(),
            roots: vec!["src".into()],
            timestamp: "1970-01-01T00:00:00Z".into(),
            diagnostics: DiagnosticsRecord::default(),
        }
    }

    #[test]
    fn bundle_round_trips_and_serves_views() {
        let b = build_bundle(input(), &model(), &RunConfig::default());
        assert_eq!(b.meta.summary.test_cases, 1);
        assert_eq!(b.meta.summary.covered_classes, 1);
        assert_eq!(b.meta.summary.uncovered_classes, 1);
        assert!(b.views.units.contains_key("p.Stack"));
        let text = b.to_json();
        assert_eq!(text, build_bundle(input(), &model(), &RunConfig::default()).to_json());

        let loaded = LoadedBundle::from_json(&text).unwrap();
        assert_eq!(loaded.bundle, b);
        let queue = loaded.view(ViewKind::UnitUnderTest, Some("p.Queue")).unwrap();
        assert_eq!(queue.nodes.len(), 1);
        assert!(queue.nodes[0].position.is_some());
        assert_eq!(
            loaded.view(ViewKind::UnitUnderTest, Some("p.StackTest")),
            Err(ViewLookupError::UnknownFocus("p.StackTest".into()))
        );
        assert_eq!(
            loaded.view(ViewKind::TestCase, Some("p.Missing")),
            Err(ViewLookupError::UnknownFocus("p.Missing".into()))
        );
    }

    #[test]
    fn foreign_versions_are_refused() {
        let text = r#"{"formatVersion": "testscope-bundle/2"}"#;
        assert!(matches!(LoadedBundle::from_json(text), Err(BundleError::UnsupportedVersion(_))));
        assert!(matches!(
            LoadedBundle::from_json(r#"{"formatVersion": "testscope-bundle/1", "meta": 3}"#),
            Err(BundleError::SchemaViolation { .. })
        ));
    }
}

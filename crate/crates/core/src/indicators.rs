//! Executable detectors for the visual indicators of the three views:
//! test location, coverage, and test design.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Direction, EntityId, EntityKind, Flag, RelationKind};
use crate::testmodel::{TestModel, TestRole, UnitStrategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FindingKind {
    TestsInSamePackage,
    TestsInSeparatePackage,
    UntestedComponent,
    HighlyCoveredClass,
    IsolatedUnit,
    IndirectTestPattern,
    TestHelper,
    MultiTestCaseCoverage,
    PartialCoverage,
    WellDesignedTestCase,
    LackOfExplicitFixture,
    LargeFixture,
    ComplexTestScenario,
    IntegrationTestStyle,
}

impl FindingKind {
    pub const ALL: [FindingKind; 14] = [
        FindingKind::TestsInSamePackage,
        FindingKind::TestsInSeparatePackage,
        FindingKind::UntestedComponent,
        FindingKind::HighlyCoveredClass,
        FindingKind::IsolatedUnit,
        FindingKind::IndirectTestPattern,
        FindingKind::TestHelper,
        FindingKind::MultiTestCaseCoverage,
        FindingKind::PartialCoverage,
        FindingKind::WellDesignedTestCase,
        FindingKind::LackOfExplicitFixture,
        FindingKind::LargeFixture,
        FindingKind::ComplexTestScenario,
        FindingKind::IntegrationTestStyle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FindingKind::TestsInSamePackage => "TestsInSamePackage",
            FindingKind::TestsInSeparatePackage => "TestsInSeparatePackage",
            FindingKind::UntestedComponent => "UntestedComponent",
            FindingKind::HighlyCoveredClass => "HighlyCoveredClass",
            FindingKind::IsolatedUnit => "IsolatedUnit",
            FindingKind::IndirectTestPattern => "IndirectTestPattern",
            FindingKind::TestHelper => "TestHelper",
            FindingKind::MultiTestCaseCoverage => "MultiTestCaseCoverage",
            FindingKind::PartialCoverage => "PartialCoverage",
            FindingKind::WellDesignedTestCase => "WellDesignedTestCase",
            FindingKind::LackOfExplicitFixture => "LackOfExplicitFixture",
            FindingKind::LargeFixture => "LargeFixture",
            FindingKind::ComplexTestScenario => "ComplexTestScenario",
            FindingKind::IntegrationTestStyle => "IntegrationTestStyle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Fixed severity; `UntestedComponent` is downgraded for generated code
    /// by the detector.
    pub fn severity(self) -> Severity {
        match self {
            FindingKind::WellDesignedTestCase | FindingKind::IsolatedUnit | FindingKind::TestHelper => {
                Severity::Opportunity
            }
            FindingKind::LackOfExplicitFixture
            | FindingKind::LargeFixture
            | FindingKind::ComplexTestScenario
            | FindingKind::UntestedComponent => Severity::Threat,
            _ => Severity::Info,
        }
    }
}

/// Ordered most severe first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Threat,
    Opportunity,
    Info,
}

impl Severity {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "threat" => Some(Severity::Threat),
            "opportunity" => Some(Severity::Opportunity),
            "info" => Some(Severity::Info),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Finding {
    pub kind: FindingKind,
    pub subjects: Vec<EntityId>,
    pub evidence: BTreeMap<String, f64>,
    pub severity: Severity,
}

impl Finding {
    fn new(kind: FindingKind, subjects: Vec<EntityId>, evidence: &[(&str, f64)]) -> Self {
        debug_assert!(!subjects.is_empty());
        Finding {
            kind,
            subjects,
            evidence: evidence.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            severity: kind.severity(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct Thresholds {
    pub highly_covered_min_test_cases: u32,
    pub helper_min_dependents: u32,
    pub complex_scenario_min_prod_methods: u32,
    pub large_fixture_min_classes: u32,
    pub partial_fixture_use_max: f64,
    pub partial_coverage_max: f64,
    pub dominance_min: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            highly_covered_min_test_cases: 5,
            helper_min_dependents: 3,
            complex_scenario_min_prod_methods: 10,
            large_fixture_min_classes: 4,
            partial_fixture_use_max: 0.5,
            partial_coverage_max: 0.33,
            dominance_min: 0.5,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("unknown threshold `{0}`")]
    Unknown(String),
    #[error("threshold `{name}` has invalid value `{value}`: {reason}")]
    Invalid { name: String, value: String, reason: String },
}

impl Thresholds {
    pub const NAMES: [&'static str; 7] = [
        "highlyCoveredMinTestCases",
        "helperMinDependents",
        "complexScenarioMinProdMethods",
        "largeFixtureMinClasses",
        "partialFixtureUseMax",
        "partialCoverageMax",
        "dominanceMin",
    ];

    /// Sets one threshold by its camelCase name.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), ThresholdError> {
        let invalid = |reason: &str| ThresholdError::Invalid {
            name: name.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        let count = || -> Result<u32, ThresholdError> {
            match value.trim().parse::<u32>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(invalid("expected a positive integer")),
            }
        };
        let ratio = || -> Result<f64, ThresholdError> {
            match value.trim().parse::<f64>() {
                Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
                _ => Err(invalid("expected a ratio in (0, 1]")),
            }
        };
        match name {
            "highlyCoveredMinTestCases" => self.highly_covered_min_test_cases = count()?,
            "helperMinDependents" => self.helper_min_dependents = count()?,
            "complexScenarioMinProdMethods" => self.complex_scenario_min_prod_methods = count()?,
            "largeFixtureMinClasses" => self.large_fixture_min_classes = count()?,
            "partialFixtureUseMax" => self.partial_fixture_use_max = ratio()?,
            "partialCoverageMax" => self.partial_coverage_max = ratio()?,
            "dominanceMin" => self.dominance_min = ratio()?,
            _ => return Err(ThresholdError::Unknown(name.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ThresholdError> {
        let mut probe = Thresholds::default();
        for (name, value) in [
            ("highlyCoveredMinTestCases", self.highly_covered_min_test_cases.to_string()),
            ("helperMinDependents", self.helper_min_dependents.to_string()),
            ("complexScenarioMinProdMethods", self.complex_scenario_min_prod_methods.to_string()),
            ("largeFixtureMinClasses", self.large_fixture_min_classes.to_string()),
            ("partialFixtureUseMax", self.partial_fixture_use_max.to_string()),
            ("partialCoverageMax", self.partial_coverage_max.to_string()),
            ("dominanceMin", self.dominance_min.to_string()),
        ] {
            probe.set(name, &value)?;
        }
        Ok(())
    }
}

/// Where a corpus keeps its tests relative to the code under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionVerdict {
    /// Every package with tests also holds production classes.
    SamePackage,
    /// Every package with tests holds only tests.
    SeparatePackage,
    Mixed,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorReport {
    pub convention: ConventionVerdict,
    pub findings: Vec<Finding>,
}

/// Direct top-level classes of each package, split by side.
struct PackageSides {
    tests: BTreeMap<EntityId, Vec<EntityId>>,
    prods: BTreeMap<EntityId, Vec<EntityId>>,
}

fn package_sides(tm: &TestModel) -> PackageSides {
    let m = tm.base();
    let mut sides = PackageSides {
        tests: BTreeMap::new(),
        prods: BTreeMap::new(),
    };
    for c in m.entities_of(EntityKind::Class) {
        let Some(parent) = c.parent else { continue };
        if m.entity(parent).kind != EntityKind::Package {
            continue;
        }
        let slot = if tm.is_test_side(c.id) {
            &mut sides.tests
        } else {
            &mut sides.prods
        };
        slot.entry(parent).or_default().push(c.id);
    }
    sides
}

fn verdict(sides: &PackageSides) -> ConventionVerdict {
    let mut same = false;
    let mut separate = false;
    for pkg in sides.tests.keys() {
        if sides.prods.contains_key(pkg) {
            same = true;
        } else {
            separate = true;
        }
    }
    match (same, separate) {
        (false, false) => ConventionVerdict::None,
        (true, false) => ConventionVerdict::SamePackage,
        (false, true) => ConventionVerdict::SeparatePackage,
        (true, true) => ConventionVerdict::Mixed,
    }
}

pub fn convention_verdict(tm: &TestModel) -> ConventionVerdict {
    verdict(&package_sides(tm))
}

fn package_of_class(tm: &TestModel, class: EntityId) -> Option<EntityId> {
    tm.base().package_of(class)
}

pub fn detect_location(tm: &TestModel) -> (Vec<Finding>, ConventionVerdict) {
    let sides = package_sides(tm);
    let mut out = Vec::new();
    for (pkg, tests) in &sides.tests {
        if let Some(prods) = sides.prods.get(pkg) {
            out.push(Finding::new(
                FindingKind::TestsInSamePackage,
                vec![*pkg],
                &[("testClasses", tests.len() as f64), ("productionClasses", prods.len() as f64)],
            ));
        }
    }
    // All-test packages and the production packages their tests cover.
    let mut links: BTreeMap<(EntityId, EntityId), u32> = BTreeMap::new();
    for cc in tm.class_coverage() {
        let (Some(tp), Some(pp)) = (
            package_of_class(tm, cc.test_case),
            package_of_class(tm, cc.prod_class),
        ) else {
            continue;
        };
        if tp != pp && sides.tests.contains_key(&tp) && !sides.prods.contains_key(&tp) {
            *links.entry((tp, pp)).or_default() += 1;
        }
    }
    for ((tp, pp), n) in links {
        out.push(Finding::new(
            FindingKind::TestsInSeparatePackage,
            vec![tp, pp],
            &[("coverageEdges", f64::from(n))],
        ));
    }
    (out, verdict(&sides))
}

/// Distinct test cases covering each production class.
fn covering_test_cases(tm: &TestModel) -> BTreeMap<EntityId, BTreeSet<EntityId>> {
    let mut map: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
    for cc in tm.class_coverage() {
        map.entry(cc.prod_class).or_default().insert(cc.test_case);
    }
    map
}

pub fn detect_coverage(tm: &TestModel, th: &Thresholds) -> Vec<Finding> {
    let m = tm.base();
    let sides = package_sides(tm);
    let covering = covering_test_cases(tm);
    let mut out = Vec::new();

    for (pkg, prods) in &sides.prods {
        if sides.tests.contains_key(pkg) {
            continue;
        }
        let covered = m
            .entities_of(EntityKind::Class)
            .filter(|c| m.package_of(c.id) == Some(*pkg))
            .any(|c| covering.contains_key(&c.id));
        if covered {
            continue;
        }
        let generated = prods.iter().filter(|c| m.entity(**c).has(Flag::IsGenerated)).count();
        let all_generated = generated == prods.len();
        let mut f = Finding::new(
            FindingKind::UntestedComponent,
            vec![*pkg],
            &[
                ("classes", prods.len() as f64),
                ("generatedClasses", generated as f64),
                ("generated", if all_generated { 1.0 } else { 0.0 }),
            ],
        );
        if all_generated {
            f.severity = Severity::Info;
        }
        out.push(f);
    }

    for (class, tcs) in &covering {
        let n = tcs.len() as f64;
        if tcs.len() >= th.highly_covered_min_test_cases as usize {
            out.push(Finding::new(FindingKind::HighlyCoveredClass, vec![*class], &[("testCases", n)]));
        }
        if tcs.len() >= 2 {
            out.push(Finding::new(FindingKind::MultiTestCaseCoverage, vec![*class], &[("testCases", n)]));
        }
        let countable: BTreeSet<EntityId> = tm.countable_methods(*class).into_iter().collect();
        if countable.is_empty() {
            continue;
        }
        let covered = tm
            .covered_methods_of_class(*class)
            .intersection(&countable)
            .count();
        let fraction = covered as f64 / countable.len() as f64;
        if fraction <= th.partial_coverage_max {
            out.push(Finding::new(
                FindingKind::PartialCoverage,
                vec![*class],
                &[
                    ("coveredMethods", covered as f64),
                    ("methods", countable.len() as f64),
                    ("fraction", fraction),
                ],
            ));
        }
    }
    out
}

/// Per-command count of distinct production methods invoked.
fn production_out_degree(tm: &TestModel, command: EntityId) -> usize {
    tm.covered_methods_from(command).len()
}

pub fn detect_design(tm: &TestModel, th: &Thresholds, convention: ConventionVerdict) -> Vec<Finding> {
    let m = tm.base();
    let mut out = Vec::new();
    let test_cases: Vec<EntityId> = tm.test_cases().collect();

    // Test helpers: many dependents or many invoking test cases.
    for class in m.entities_of(EntityKind::Class) {
        if !matches!(tm.role(class.id), TestRole::TestCaseClass | TestRole::TestHelperClass) {
            continue;
        }
        let dependents: BTreeSet<EntityId> = tm
            .dependencies()
            .iter()
            .filter(|d| d.to_test == class.id)
            .map(|d| d.from_test)
            .collect();
        let mut invoking_cases = BTreeSet::new();
        let mut command_users = BTreeSet::new();
        for method in m.methods_of(class.id) {
            for r in m.relations_at(method.id, RelationKind::Invocation, Direction::In) {
                let Some(caller_class) = m.class_of(r.from) else { continue };
                if caller_class == class.id {
                    continue;
                }
                if tm.role(caller_class) == TestRole::TestCaseClass {
                    invoking_cases.insert(caller_class);
                }
                if tm.role(r.from) == TestRole::TestCommand {
                    command_users.insert(r.from);
                }
            }
        }
        let min = th.helper_min_dependents as usize;
        if dependents.len() >= min || invoking_cases.len() >= min {
            out.push(Finding::new(
                FindingKind::TestHelper,
                vec![class.id],
                &[
                    ("dependents", dependents.len() as f64),
                    ("invokingTestCases", invoking_cases.len() as f64),
                    ("commandUsers", command_users.len() as f64),
                ],
            ));
        }
    }

    let mut dominant: BTreeMap<EntityId, EntityId> = BTreeMap::new();
    for &tc in &test_cases {
        let ranking = tm
            .unit_under_test_of(tc, UnitStrategy::Commands, th.dominance_min)
            .expect("test cases rank");
        if let Some(d) = ranking.dominant {
            dominant.insert(tc, d);
        }

        let commands = tm.commands_of(tc);
        let fixture_attrs = tm.fixture_attributes_of(tc);
        let fixture_classes = tm.fixture_classes_of(tc);
        let degrees: Vec<usize> = commands.iter().map(|c| production_out_degree(tm, *c)).collect();
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let complex = th.complex_scenario_min_prod_methods as usize;

        for (cmd, &deg) in commands.iter().zip(&degrees) {
            if deg >= complex {
                out.push(Finding::new(
                    FindingKind::ComplexTestScenario,
                    vec![*cmd],
                    &[("productionMethods", deg as f64)],
                ));
            }
        }

        if fixture_attrs.is_empty() {
            let instantiating = commands
                .iter()
                .filter(|c| {
                    tm.covered_methods_from(**c)
                        .iter()
                        .any(|t| m.entity(*t).has(Flag::IsConstructor))
                })
                .count();
            if instantiating >= 2 {
                out.push(Finding::new(
                    FindingKind::LackOfExplicitFixture,
                    vec![tc],
                    &[("commands", commands.len() as f64), ("instantiatingCommands", instantiating as f64)],
                ));
            }
        }

        if fixture_classes.len() >= th.large_fixture_min_classes as usize && !commands.is_empty() {
            let attrs: BTreeSet<EntityId> = fixture_attrs.iter().copied().collect();
            let total: f64 = commands
                .iter()
                .map(|c| {
                    let used: BTreeSet<EntityId> = m
                        .relations_at(*c, RelationKind::AttributeAccess, Direction::Out)
                        .filter_map(|r| r.target())
                        .filter(|a| attrs.contains(a))
                        .collect();
                    used.len() as f64 / attrs.len() as f64
                })
                .sum();
            let mean = total / commands.len() as f64;
            if mean <= th.partial_fixture_use_max {
                out.push(Finding::new(
                    FindingKind::LargeFixture,
                    vec![tc],
                    &[("fixtureClasses", fixture_classes.len() as f64), ("meanFixtureUse", mean)],
                ));
            }
        }

        if !fixture_attrs.is_empty()
            && !commands.is_empty()
            && ranking.dominant.is_some()
            && max_degree < complex
            && fixture_classes.len() < th.large_fixture_min_classes as usize
        {
            out.push(Finding::new(
                FindingKind::WellDesignedTestCase,
                vec![tc],
                &[
                    ("fixtureAttributes", fixture_attrs.len() as f64),
                    ("commands", commands.len() as f64),
                    ("maxProductionMethods", max_degree as f64),
                ],
            ));
        }

        if ranking.ranked.len() >= 3 && ranking.dominant.is_none() {
            let top = ranking.ranked.first().map_or(0.0, |u| ranking.command_share(u));
            out.push(Finding::new(
                FindingKind::IntegrationTestStyle,
                vec![tc],
                &[("classes", ranking.ranked.len() as f64), ("topShare", top)],
            ));
        }
    }

    // Indirect tests: the dominant unit sits outside the package the test
    // location convention predicts, or is an interface or abstract class
    // standing in for its implementations.
    for (&tc, &unit) in &dominant {
        let tp = package_of_class(tm, tc);
        let up = package_of_class(tm, unit);
        let parent_of_tp = tp.and_then(|p| m.entity(p).parent);
        let expected = match convention {
            ConventionVerdict::SamePackage => up == tp,
            ConventionVerdict::SeparatePackage => up == parent_of_tp || up == tp,
            ConventionVerdict::Mixed => up == tp || up == parent_of_tp,
            ConventionVerdict::None => true,
        };
        if !expected {
            out.push(Finding::new(
                FindingKind::IndirectTestPattern,
                vec![tc, unit],
                &[("outsideExpectedPackage", 1.0)],
            ));
        }
    }
    let mut via_abstraction: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
    for (&tc, &unit) in &dominant {
        let e = m.entity(unit);
        if e.has(Flag::IsInterface) || e.has(Flag::IsAbstract) {
            via_abstraction.entry(unit).or_default().insert(tc);
        }
    }
    for (unit, tcs) in via_abstraction {
        let mut subjects = vec![unit];
        subjects.extend(tcs.iter().copied());
        out.push(Finding::new(
            FindingKind::IndirectTestPattern,
            subjects,
            &[("testCases", tcs.len() as f64), ("viaAbstraction", 1.0)],
        ));
    }

    // Isolated components: each production class is the dominant unit of a
    // co-located test case, and those tests stay inside the package.
    let sides = package_sides(tm);
    for (pkg, tests) in &sides.tests {
        let Some(prods) = sides.prods.get(pkg) else { continue };
        let local_cases: Vec<EntityId> = tests
            .iter()
            .copied()
            .filter(|t| tm.role(*t) == TestRole::TestCaseClass)
            .collect();
        if local_cases.is_empty() {
            continue;
        }
        let units: BTreeSet<EntityId> = local_cases.iter().filter_map(|t| dominant.get(t).copied()).collect();
        let concrete: Vec<EntityId> = prods
            .iter()
            .copied()
            .filter(|c| !m.entity(*c).has(Flag::IsInterface))
            .collect();
        let all_dominant = !concrete.is_empty() && concrete.iter().all(|c| units.contains(c));
        let stays_inside = tm
            .class_coverage()
            .iter()
            .filter(|cc| local_cases.contains(&cc.test_case))
            .all(|cc| package_of_class(tm, cc.prod_class) == Some(*pkg));
        if all_dominant && stays_inside {
            out.push(Finding::new(
                FindingKind::IsolatedUnit,
                vec![*pkg],
                &[("classes", concrete.len() as f64), ("testCases", local_cases.len() as f64)],
            ));
        }
    }
    out
}

pub fn report(tm: &TestModel, th: &Thresholds) -> IndicatorReport {
    let (mut findings, convention) = detect_location(tm);
    findings.extend(detect_coverage(tm, th));
    findings.extend(detect_design(tm, th, convention));
    let m = tm.base();
    let names = |f: &Finding| -> Vec<String> {
        f.subjects.iter().map(|s| m.entity(*s).qualified_name.clone()).collect()
    };
    findings.sort_by_cached_key(|f| (f.severity, f.kind, names(f)));
    IndicatorReport { convention, findings }
}

/// Serializable view of a report with subjects resolved to names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportDocument {
    pub convention: ConventionVerdict,
    pub findings: Vec<FindingRecord>,
    pub counts: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FindingRecord {
    pub kind: FindingKind,
    pub severity: Severity,
    pub subjects: Vec<EntityId>,
    pub subject_names: Vec<String>,
    pub evidence: BTreeMap<String, f64>,
}

impl IndicatorReport {
    pub fn to_document(&self, tm: &TestModel) -> ReportDocument {
        let m = tm.base();
        let mut counts = BTreeMap::new();
        for f in &self.findings {
            *counts.entry(f.kind.name().to_string()).or_insert(0) += 1;
        }
        ReportDocument {
            convention: self.convention,
            counts,
            findings: self
                .findings
                .iter()
                .map(|f| FindingRecord {
                    kind: f.kind,
                    severity: f.severity,
                    subjects: f.subjects.clone(),
                    subject_names: f.subjects.iter().map(|s| m.entity(*s).qualified_name.clone()).collect(),
                    evidence: f.evidence.clone(),
                })
                .collect(),
        }
    }
}

impl ReportDocument {
    pub fn has_severity(&self, severity: Severity) -> bool {
        self.findings.iter().any(|f| f.severity == severity)
    }

    /// Human-readable report grouped by severity, then by kind.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let verdict = match self.convention {
            ConventionVerdict::SamePackage => "tests live beside production code",
            ConventionVerdict::SeparatePackage => "tests live in separate packages",
            ConventionVerdict::Mixed => "mixed test locations",
            ConventionVerdict::None => "no tests found",
        };
        let _ = writeln!(out, "Test location: {verdict}");
        let _ = writeln!(out, "Findings: {}", self.findings.len());
        for severity in [Severity::Threat, Severity::Opportunity, Severity::Info] {
            let group: Vec<&FindingRecord> = self.findings.iter().filter(|f| f.severity == severity).collect();
            if group.is_empty() {
                continue;
            }
            let _ = writeln!(out, "\n== {severity:?} ({}) ==", group.len());
            let mut current = None;
            for f in group {
                if current != Some(f.kind) {
                    let _ = writeln!(out, "-- {}", f.kind.name());
                    current = Some(f.kind);
                }
                let evidence: Vec<String> = f
                    .evidence
                    .iter()
                    .map(|(k, v)| {
                        if v.fract() == 0.0 {
                            format!("{k}={v}")
                        } else {
                            format!("{k}={v:.2}")
                        }
                    })
                    .collect();
                let _ = writeln!(out, "   {}  [{}]", f.subject_names.join(", "), evidence.join(" "));
            }
        }
        out
    }
}

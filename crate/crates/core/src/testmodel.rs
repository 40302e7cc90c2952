//! Refines a fact model into a test model: test/production split, xUnit
//! roles, static coverage and test dependencies.
//!
//! Coverage is the coarse static notion: a class is covered by a test case
//! when at least one of its methods is invoked from one of the test case's
//! commands (or its setup, when setup coverage is enabled).

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{path_looks_like_test, JUnitStyle};
use crate::model::{Direction, EntityId, EntityKind, FactModel, Flag, RelationKind, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestRole {
    TestCaseClass,
    TestCommand,
    TestSetup,
    TestTearDown,
    FixtureAttribute,
    TestHelperClass,
    TestUtilityMethod,
    Production,
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    /// Simple class names that signal test code.
    pub test_class_pattern: Regex,
    /// Method names that denote test commands (JUnit 3 convention).
    pub test_command_pattern: Regex,
    pub setup_names: Vec<String>,
    pub teardown_names: Vec<String>,
    pub framework_classes: Vec<String>,
    pub dominance_threshold: f64,
    pub setup_coverage: bool,
    pub constructor_coverage: bool,
    pub junit_style: JUnitStyle,
}

pub const DEFAULT_TEST_CLASS_PATTERN: &str = r"^Test|Tests?$|TestCase$";
pub const DEFAULT_TEST_COMMAND_PATTERN: &str = r"^test";
pub const DEFAULT_FRAMEWORK_CLASSES: &[&str] = &["junit.framework.TestCase"];

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            test_class_pattern: Regex::new(DEFAULT_TEST_CLASS_PATTERN).expect("valid"),
            test_command_pattern: Regex::new(DEFAULT_TEST_COMMAND_PATTERN).expect("valid"),
            setup_names: vec!["setUp".into()],
            teardown_names: vec!["tearDown".into()],
            framework_classes: DEFAULT_FRAMEWORK_CLASSES.iter().map(|s| s.to_string()).collect(),
            dominance_threshold: 0.5,
            setup_coverage: true,
            constructor_coverage: true,
            junit_style: JUnitStyle::Both,
        }
    }
}

const SETUP_ANNOTATIONS: &[&str] = &["Before", "BeforeEach", "BeforeClass", "BeforeAll"];
const TEARDOWN_ANNOTATIONS: &[&str] = &["After", "AfterEach", "AfterClass", "AfterAll"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CoverageOrigin {
    Command,
    Setup,
}

/// Method-level coverage: a test command or setup invoking a production
/// method, with the number of call sites.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageEdge {
    pub from_test: EntityId,
    pub to_prod: EntityId,
    pub via_invocations: u32,
    pub origin: CoverageOrigin,
}

/// Class-level aggregate of method-level edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassCoverage {
    pub test_case: EntityId,
    pub prod_class: EntityId,
    /// Distinct commands of the test case covering the class.
    pub commands: u32,
    /// Distinct production methods of the class reached.
    pub methods: u32,
    pub via_invocations: u32,
    pub from_setup: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DependencyKind {
    Inheritance,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DependencyEdge {
    pub from_test: EntityId,
    pub to_test: EntityId,
    pub kind: DependencyKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TestModelError {
    #[error("`{0}` is not a test case")]
    NotATestCase(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitStrategy {
    /// Rank by test commands only.
    Commands,
    /// Also count setup invocations toward the invocation total.
    CommandsAndSetup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedUnit {
    pub class: EntityId,
    pub commands: u32,
    pub via_invocations: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitRanking {
    pub ranked: Vec<RankedUnit>,
    pub total_commands: u32,
    /// Top-ranked class when its command share reaches the threshold.
    pub dominant: Option<EntityId>,
}

impl UnitRanking {
    pub fn command_share(&self, unit: &RankedUnit) -> f64 {
        if self.total_commands == 0 {
            0.0
        } else {
            f64::from(unit.commands) / f64::from(self.total_commands)
        }
    }
}

#[derive(Clone, Debug)]
pub struct TestModel {
    base: Arc<FactModel>,
    roles: Vec<TestRole>,
    coverage: Vec<CoverageEdge>,
    class_coverage: Vec<ClassCoverage>,
    test_deps: Vec<DependencyEdge>,
    framework_classes: BTreeSet<String>,
    config: ClassifyConfig,
}

fn simple_of(qn: &str) -> &str {
    qn.rsplit('.').next().unwrap_or(qn)
}

/// Classification, coverage and dependencies in one step.
pub fn build_test_model(model: Arc<FactModel>, config: &ClassifyConfig) -> TestModel {
    let tm = classify(model, config);
    let tm = compute_coverage(tm);
    compute_test_dependencies(tm)
}

pub fn classify(model: Arc<FactModel>, config: &ClassifyConfig) -> TestModel {
    let framework: BTreeSet<String> = config.framework_classes.iter().cloned().collect();
    let is_framework_name = |name: &str| {
        framework
            .iter()
            .any(|fw| fw == name || (!name.contains('.') && simple_of(fw) == name))
    };
    let m = &*model;
    let mut roles = vec![TestRole::Production; m.len()];

    let framework_ids: HashSet<EntityId> = m
        .entities_of(EntityKind::Class)
        .filter(|c| framework.contains(&c.qualified_name))
        .map(|c| c.id)
        .collect();

    let inherits_framework = |class: EntityId| -> bool {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([class]);
        while let Some(c) = queue.pop_front() {
            if !seen.insert(c) {
                continue;
            }
            for r in m.relations_of(RelationKind::Inheritance).filter(|r| r.from == c) {
                match &r.to {
                    Target::Unresolved(name) if is_framework_name(name) => return true,
                    Target::Unresolved(_) => {}
                    Target::Resolved(sup) if framework_ids.contains(sup) => return true,
                    Target::Resolved(sup) => queue.push_back(*sup),
                }
            }
        }
        false
    };

    let style = config.junit_style;
    let is_command = |e: &crate::model::Entity| {
        if e.has(Flag::IsConstructor) || e.has(Flag::IsStatic) {
            return false;
        }
        (style.conventions() && config.test_command_pattern.is_match(e.base_name()))
            || (style.annotations() && e.has_annotation("Test"))
    };

    let mut test_cases = HashSet::new();
    for c in m.entities_of(EntityKind::Class) {
        if c.has(Flag::IsInterface) || c.has(Flag::IsGenerated) || framework_ids.contains(&c.id) {
            continue;
        }
        let annotated = style.annotations()
            && m.methods_of(c.id).any(|meth| meth.has_annotation("Test"));
        if annotated || inherits_framework(c.id) {
            test_cases.insert(c.id);
        }
    }

    // Non-test-case classes carrying a test signal.
    let mut candidates = HashSet::new();
    for c in m.entities_of(EntityKind::Class) {
        if test_cases.contains(&c.id) || c.has(Flag::IsGenerated) || framework_ids.contains(&c.id) {
            continue;
        }
        let by_path = c
            .location
            .as_ref()
            .is_some_and(|l| path_looks_like_test(&l.file));
        let by_name = config.test_class_pattern.is_match(&c.simple_name);
        if by_path || by_name {
            candidates.insert(c.id);
        }
    }

    // Helpers: classes enclosed by test-side classes, or test-signalled
    // classes referenced from test-side code. Iterate to a fixpoint.
    let mut test_side: HashSet<EntityId> = test_cases.clone();
    let mut helpers = HashSet::new();
    loop {
        let mut changed = false;
        for c in m.entities_of(EntityKind::Class) {
            if test_side.contains(&c.id) || c.has(Flag::IsGenerated) || framework_ids.contains(&c.id) {
                continue;
            }
            let enclosed = m
                .ancestors(c.id)
                .any(|a| a.kind == EntityKind::Class && test_side.contains(&a.id));
            let referenced = candidates.contains(&c.id) && is_referenced_by(m, c.id, &test_side);
            if enclosed || referenced {
                helpers.insert(c.id);
                test_side.insert(c.id);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    for c in m.entities_of(EntityKind::Class) {
        if test_cases.contains(&c.id) {
            roles[c.id.index()] = TestRole::TestCaseClass;
            for member in m.children(c.id) {
                let role = match member.kind {
                    EntityKind::Attribute => TestRole::FixtureAttribute,
                    EntityKind::Method if is_command(member) => TestRole::TestCommand,
                    EntityKind::Method if is_setup(member, config) => TestRole::TestSetup,
                    EntityKind::Method if is_teardown(member, config) => TestRole::TestTearDown,
                    EntityKind::Method => TestRole::TestUtilityMethod,
                    _ => continue,
                };
                roles[member.id.index()] = role;
            }
        } else if helpers.contains(&c.id) {
            roles[c.id.index()] = TestRole::TestHelperClass;
            for member in m.children(c.id) {
                match member.kind {
                    EntityKind::Attribute => roles[member.id.index()] = TestRole::FixtureAttribute,
                    EntityKind::Method => roles[member.id.index()] = TestRole::TestUtilityMethod,
                    _ => {}
                }
            }
        }
    }

    TestModel {
        base: model.clone(),
        roles,
        coverage: Vec::new(),
        class_coverage: Vec::new(),
        test_deps: Vec::new(),
        framework_classes: framework,
        config: config.clone(),
    }
}

fn is_setup(e: &crate::model::Entity, config: &ClassifyConfig) -> bool {
    let style = config.junit_style;
    (style.conventions() && config.setup_names.iter().any(|n| n == e.base_name()))
        || (style.annotations() && SETUP_ANNOTATIONS.iter().any(|a| e.has_annotation(a)))
}

fn is_teardown(e: &crate::model::Entity, config: &ClassifyConfig) -> bool {
    let style = config.junit_style;
    (style.conventions() && config.teardown_names.iter().any(|n| n == e.base_name()))
        || (style.annotations() && TEARDOWN_ANNOTATIONS.iter().any(|a| e.has_annotation(a)))
}

/// Whether any class in `from` invokes, accesses or inherits from `class`.
fn is_referenced_by(m: &FactModel, class: EntityId, from: &HashSet<EntityId>) -> bool {
    let in_from = |id: EntityId| m.class_of(id).is_some_and(|c| from.contains(&c));
    if m
        .relations_at(class, RelationKind::Inheritance, Direction::In)
        .any(|r| from.contains(&r.from))
    {
        return true;
    }
    m.children(class).any(|member| {
        [RelationKind::Invocation, RelationKind::AttributeAccess]
            .iter()
            .any(|&k| m.relations_at(member.id, k, Direction::In).any(|r| in_from(r.from)))
    })
}

pub fn compute_coverage(mut tm: TestModel) -> TestModel {
    let m = &*tm.base;
    let mut counts: BTreeMap<(EntityId, EntityId), u32> = BTreeMap::new();
    for r in m.relations_of(RelationKind::Invocation) {
        let Some(to) = r.target() else { continue };
        if !matches!(tm.roles[r.from.index()], TestRole::TestCommand | TestRole::TestSetup) {
            continue;
        }
        if tm.roles[to.index()] != TestRole::Production {
            continue;
        }
        if !tm.config.constructor_coverage && m.entity(to).has(Flag::IsConstructor) {
            continue;
        }
        *counts.entry((r.from, to)).or_default() += 1;
    }
    tm.coverage = counts
        .into_iter()
        .map(|((from, to), n)| CoverageEdge {
            from_test: from,
            to_prod: to,
            via_invocations: n,
            origin: if tm.roles[from.index()] == TestRole::TestSetup {
                CoverageOrigin::Setup
            } else {
                CoverageOrigin::Command
            },
        })
        .collect();

    struct Agg {
        commands: BTreeSet<EntityId>,
        methods: BTreeSet<EntityId>,
        via: u32,
        setup: bool,
    }
    let mut per_class: BTreeMap<(EntityId, EntityId), Agg> = BTreeMap::new();
    for e in &tm.coverage {
        if e.origin == CoverageOrigin::Setup && !tm.config.setup_coverage {
            continue;
        }
        let tc = m.class_of(e.from_test).expect("methods live in classes");
        let pc = m.class_of(e.to_prod).expect("methods live in classes");
        let agg = per_class.entry((tc, pc)).or_insert_with(|| Agg {
            commands: BTreeSet::new(),
            methods: BTreeSet::new(),
            via: 0,
            setup: false,
        });
        match e.origin {
            CoverageOrigin::Command => {
                agg.commands.insert(e.from_test);
            }
            CoverageOrigin::Setup => agg.setup = true,
        }
        agg.methods.insert(e.to_prod);
        agg.via += e.via_invocations;
    }
    tm.class_coverage = per_class
        .into_iter()
        .map(|((tc, pc), a)| ClassCoverage {
            test_case: tc,
            prod_class: pc,
            commands: a.commands.len() as u32,
            methods: a.methods.len() as u32,
            via_invocations: a.via,
            from_setup: a.setup,
        })
        .collect();
    tm
}

pub fn compute_test_dependencies(mut tm: TestModel) -> TestModel {
    let m = &*tm.base;
    let mut deps = BTreeSet::new();
    for r in m.relations_of(RelationKind::Inheritance) {
        let Some(to) = r.target() else { continue };
        if tm.is_test_side(r.from)
            && tm.is_test_side(to)
            && !tm.framework_classes.contains(&m.entity(to).qualified_name)
        {
            deps.insert(DependencyEdge {
                from_test: r.from,
                to_test: to,
                kind: DependencyKind::Inheritance,
            });
        }
    }
    tm.test_deps = deps.into_iter().collect();
    tm
}

/// Serializable form of everything a test model adds to its fact model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestModelSummary {
    pub roles: Vec<RoleRecord>,
    pub coverage: Vec<CoverageEdge>,
    pub class_coverage: Vec<ClassCoverage>,
    pub dependencies: Vec<DependencyEdge>,
    pub framework_classes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleRecord {
    pub entity: EntityId,
    pub role: TestRole,
}

impl TestModel {
    pub fn summary(&self) -> TestModelSummary {
        TestModelSummary {
            roles: self
                .roles
                .iter()
                .enumerate()
                .map(|(i, r)| RoleRecord {
                    entity: EntityId(i as u32),
                    role: *r,
                })
                .collect(),
            coverage: self.coverage.clone(),
            class_coverage: self.class_coverage.clone(),
            dependencies: self.test_deps.clone(),
            framework_classes: self.framework_classes.iter().cloned().collect(),
        }
    }

    /// Reassembles a test model from a stored summary.
    pub fn from_parts(
        base: Arc<FactModel>,
        summary: &TestModelSummary,
        config: &ClassifyConfig,
    ) -> Result<TestModel, String> {
        if summary.roles.len() != base.len() {
            return Err(format!(
                "{} roles for {} entities",
                summary.roles.len(),
                base.len()
            ));
        }
        let mut roles = vec![TestRole::Production; base.len()];
        for r in &summary.roles {
            let slot = roles
                .get_mut(r.entity.index())
                .ok_or_else(|| format!("role for unknown entity {}", r.entity))?;
            *slot = r.role;
        }
        let known = |id: EntityId| -> Result<(), String> {
            base.get(id).map(|_| ()).ok_or_else(|| format!("unknown entity {id}"))
        };
        for e in &summary.coverage {
            known(e.from_test)?;
            known(e.to_prod)?;
        }
        for c in &summary.class_coverage {
            known(c.test_case)?;
            known(c.prod_class)?;
        }
        for d in &summary.dependencies {
            known(d.from_test)?;
            known(d.to_test)?;
        }
        Ok(TestModel {
            base,
            roles,
            coverage: summary.coverage.clone(),
            class_coverage: summary.class_coverage.clone(),
            test_deps: summary.dependencies.clone(),
            framework_classes: summary.framework_classes.iter().cloned().collect(),
            config: config.clone(),
        })
    }

    pub fn base(&self) -> &FactModel {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<FactModel> {
        self.base.clone()
    }

    pub fn config(&self) -> &ClassifyConfig {
        &self.config
    }

    pub fn role(&self, id: EntityId) -> TestRole {
        self.roles[id.index()]
    }

    pub fn is_test_side(&self, id: EntityId) -> bool {
        self.roles[id.index()] != TestRole::Production
    }

    pub fn coverage(&self) -> &[CoverageEdge] {
        &self.coverage
    }

    pub fn class_coverage(&self) -> &[ClassCoverage] {
        &self.class_coverage
    }

    pub fn dependencies(&self) -> &[DependencyEdge] {
        &self.test_deps
    }

    pub fn framework_classes(&self) -> &BTreeSet<String> {
        &self.framework_classes
    }

    pub fn test_cases(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.base
            .entities_of(EntityKind::Class)
            .filter(|c| self.role(c.id) == TestRole::TestCaseClass)
            .map(|c| c.id)
    }

    pub fn members_with_role(&self, class: EntityId, role: TestRole) -> Vec<EntityId> {
        self.base
            .children(class)
            .filter(|c| self.role(c.id) == role)
            .map(|c| c.id)
            .collect()
    }

    pub fn commands_of(&self, test_case: EntityId) -> Vec<EntityId> {
        self.members_with_role(test_case, TestRole::TestCommand)
    }

    /// Commands declared by test-case superclasses, nearest first.
    pub fn inherited_commands_of(&self, test_case: EntityId) -> Vec<EntityId> {
        let own: HashSet<String> = self
            .commands_of(test_case)
            .into_iter()
            .map(|c| self.base.entity(c).simple_name.clone())
            .collect();
        let mut seen_names = own;
        let mut out = Vec::new();
        let mut visited = HashSet::from([test_case]);
        let mut queue: VecDeque<EntityId> = self.superclass_test_cases(test_case).into();
        while let Some(sup) = queue.pop_front() {
            if !visited.insert(sup) {
                continue;
            }
            for cmd in self.commands_of(sup) {
                if seen_names.insert(self.base.entity(cmd).simple_name.clone()) {
                    out.push(cmd);
                }
            }
            queue.extend(self.superclass_test_cases(sup));
        }
        out
    }

    fn superclass_test_cases(&self, class: EntityId) -> Vec<EntityId> {
        self.test_deps
            .iter()
            .filter(|d| d.from_test == class && self.role(d.to_test) == TestRole::TestCaseClass)
            .map(|d| d.to_test)
            .collect()
    }

    pub fn fixture_attributes_of(&self, test_case: EntityId) -> Vec<EntityId> {
        self.members_with_role(test_case, TestRole::FixtureAttribute)
    }

    /// In-model classes declared as types of the test case's fixture
    /// attributes, in qualified-name order.
    pub fn fixture_classes_of(&self, test_case: EntityId) -> Vec<EntityId> {
        let set: BTreeSet<(String, EntityId)> = self
            .fixture_attributes_of(test_case)
            .into_iter()
            .filter_map(|a| self.base.entity(a).declared_type.as_deref())
            .filter_map(|t| self.base.resolve_kind(t, EntityKind::Class))
            .map(|c| (self.base.entity(c).qualified_name.clone(), c))
            .collect();
        set.into_iter().map(|(_, c)| c).collect()
    }

    /// Methods that count toward a class's size: everything except the
    /// implicit default constructor.
    pub fn countable_methods(&self, class: EntityId) -> Vec<EntityId> {
        self.base
            .methods_of(class)
            .filter(|m| !(m.has(Flag::IsConstructor) && m.has(Flag::IsGenerated)))
            .map(|m| m.id)
            .collect()
    }

    /// Distinct production methods reached from `from_test`.
    pub fn covered_methods_from(&self, from_test: EntityId) -> BTreeSet<EntityId> {
        self.coverage
            .iter()
            .filter(|e| e.from_test == from_test)
            .map(|e| e.to_prod)
            .collect()
    }

    /// Test cases covering `class` at class level.
    pub fn covering_test_cases(&self, class: EntityId) -> Vec<EntityId> {
        self.class_coverage
            .iter()
            .filter(|c| c.prod_class == class)
            .map(|c| c.test_case)
            .collect()
    }

    /// Methods of `class` reached by any class-level coverage.
    pub fn covered_methods_of_class(&self, class: EntityId) -> BTreeSet<EntityId> {
        self.coverage
            .iter()
            .filter(|e| e.origin == CoverageOrigin::Command || self.config.setup_coverage)
            .filter(|e| self.base.class_of(e.to_prod) == Some(class))
            .map(|e| e.to_prod)
            .collect()
    }

    pub fn unit_under_test_of(
        &self,
        test_case: EntityId,
        strategy: UnitStrategy,
        threshold: f64,
    ) -> Result<UnitRanking, TestModelError> {
        if self.base.get(test_case).is_none() || self.role(test_case) != TestRole::TestCaseClass {
            let name = self
                .base
                .get(test_case)
                .map_or_else(|| test_case.to_string(), |e| e.qualified_name.clone());
            return Err(TestModelError::NotATestCase(name));
        }
        let commands: BTreeSet<EntityId> = self.commands_of(test_case).into_iter().collect();
        let setups: BTreeSet<EntityId> = self
            .members_with_role(test_case, TestRole::TestSetup)
            .into_iter()
            .collect();
        let mut per_class: BTreeMap<EntityId, (BTreeSet<EntityId>, u32)> = BTreeMap::new();
        for e in &self.coverage {
            let counts = if commands.contains(&e.from_test) {
                true
            } else if setups.contains(&e.from_test) {
                strategy == UnitStrategy::CommandsAndSetup
            } else {
                false
            };
            if !counts {
                continue;
            }
            let class = self.base.class_of(e.to_prod).expect("methods live in classes");
            let slot = per_class.entry(class).or_default();
            if commands.contains(&e.from_test) {
                slot.0.insert(e.from_test);
            }
            slot.1 += e.via_invocations;
        }
        let mut ranked: Vec<RankedUnit> = per_class
            .into_iter()
            .map(|(class, (cmds, via))| RankedUnit {
                class,
                commands: cmds.len() as u32,
                via_invocations: via,
            })
            .collect();
        ranked.sort_by(|a, b| {
            b.commands
                .cmp(&a.commands)
                .then(b.via_invocations.cmp(&a.via_invocations))
                .then_with(|| {
                    self.base
                        .entity(a.class)
                        .qualified_name
                        .cmp(&self.base.entity(b.class).qualified_name)
                })
        });
        let total_commands = commands.len() as u32;
        let mut ranking = UnitRanking {
            ranked,
            total_commands,
            dominant: None,
        };
        if let Some(top) = ranking.ranked.first() {
            if total_commands > 0 && ranking.command_share(top) >= threshold {
                ranking.dominant = Some(top.class);
            }
        }
        Ok(ranking)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EntitySpec, Relation, SourceLocation};

    struct Builder {
        m: FactModel,
    }

    impl Builder {
        fn new() -> Self {
            Builder { m: FactModel::new() }
        }
        fn pkg(&mut self, name: &str) -> EntityId {
            self.m
                .add_entity(EntityKind::Package, name, None, EntitySpec::default())
                .unwrap()
        }
        fn class(&mut self, pkg: EntityId, name: &str, file: &str) -> EntityId {
            self.m
                .add_entity(
                    EntityKind::Class,
                    name,
                    Some(pkg),
                    EntitySpec::default().at(SourceLocation::new(file, 1, 1)),
                )
                .unwrap()
        }
        fn method(&mut self, class: EntityId, sig: &str) -> EntityId {
            self.m
                .add_entity(EntityKind::Method, sig, Some(class), EntitySpec::default())
                .unwrap()
        }
        fn extends_external(&mut self, class: EntityId, name: &str) {
            self.m
                .add_relation(Relation {
                    kind: RelationKind::Inheritance,
                    from: class,
                    to: Target::Unresolved(name.into()),
                    site: None,
                })
                .unwrap();
        }
        fn extends(&mut self, class: EntityId, sup: EntityId) {
            self.m
                .add_relation(Relation {
                    kind: RelationKind::Inheritance,
                    from: class,
                    to: Target::Resolved(sup),
                    site: None,
                })
                .unwrap();
        }
        fn call(&mut self, from: EntityId, to: EntityId) {
            self.m
                .add_relation(Relation {
                    kind: RelationKind::Invocation,
                    from,
                    to: Target::Resolved(to),
                    site: None,
                })
                .unwrap();
        }
        fn build(self) -> TestModel {
            build_test_model(Arc::new(self.m), &ClassifyConfig::default())
        }
    }

    #[test]
    fn untar_test_is_a_test_case() {
        let mut b = Builder::new();
        let p = b.pkg("ant");
        let t = b.class(p, "UntarTest", "src/UntarTest.java");
        b.extends_external(t, "junit.framework.TestCase");
        let cmd = b.method(t, "testRealTest/0");
        let prod = b.class(p, "Untar", "src/Untar.java");
        let tm = b.build();
        assert_eq!(tm.role(t), TestRole::TestCaseClass);
        assert_eq!(tm.role(cmd), TestRole::TestCommand);
        assert_eq!(tm.role(prod), TestRole::Production);
        assert_eq!(tm.role(p), TestRole::Production);
    }

    #[test]
    fn abstract_base_and_dependencies() {
        let mut b = Builder::new();
        let p = b.pkg("t");
        let base = b.class(p, "BuildFileTest", "t/BuildFileTest.java");
        b.extends_external(base, "TestCase");
        let subs: Vec<_> = (0..3)
            .map(|i| {
                let c = b.class(p, &format!("S{i}Test"), "t/S.java");
                b.extends(c, base);
                c
            })
            .collect();
        let tm = b.build();
        assert_eq!(tm.role(base), TestRole::TestCaseClass);
        assert_eq!(tm.dependencies().len(), 3);
        for (d, s) in tm.dependencies().iter().zip(&subs) {
            assert_eq!((d.from_test, d.to_test), (*s, base));
        }
    }

    #[test]
    fn framework_base_is_not_a_dependency() {
        let mut b = Builder::new();
        let p = b.pkg("junit");
        let fw = b.class(p, "TestCase", "junit/TestCase.java");
        let q = b.pkg("t");
        let t = b.class(q, "ATest", "t/ATest.java");
        let fw_qn = "junit.TestCase";
        b.extends(t, fw);
        let cfg = ClassifyConfig {
            framework_classes: vec![fw_qn.into()],
            ..ClassifyConfig::default()
        };
        let tm = build_test_model(Arc::new(b.m), &cfg);
        assert_eq!(tm.role(t), TestRole::TestCaseClass);
        assert_eq!(tm.role(fw), TestRole::Production);
        assert!(tm.dependencies().is_empty());
    }

    #[test]
    fn coverage_counts_call_sites() {
        let mut b = Builder::new();
        let p = b.pkg("ant");
        let scanner = b.class(p, "DirectoryScanner", "ant/DirectoryScanner.java");
        let scan = b.method(scanner, "scan/0");
        let other = b.method(scanner, "other/0");
        let t = b.class(p, "DirectoryScannerTest", "ant/DirectoryScannerTest.java");
        b.extends_external(t, "TestCase");
        let cmd = b.method(t, "testScan/0");
        b.call(cmd, scan);
        b.call(cmd, scan);
        b.call(other, scan);
        let tm = b.build();
        assert_eq!(
            tm.coverage(),
            [CoverageEdge {
                from_test: cmd,
                to_prod: scan,
                via_invocations: 2,
                origin: CoverageOrigin::Command
            }]
        );
        assert_eq!(tm.class_coverage().len(), 1);
        assert_eq!(tm.class_coverage()[0].test_case, t);
        assert_eq!(tm.class_coverage()[0].prod_class, scanner);
    }

    #[test]
    fn eight_of_twenty_two_methods() {
        let mut b = Builder::new();
        let p = b.pkg("ant");
        let scanner = b.class(p, "DirectoryScanner", "ant/DirectoryScanner.java");
        let methods: Vec<_> = (0..22).map(|i| b.method(scanner, &format!("m{i}/0"))).collect();
        let t = b.class(p, "DirectoryScannerTest", "ant/DirectoryScannerTest.java");
        b.extends_external(t, "TestCase");
        for (i, m) in methods.iter().take(8).enumerate() {
            let cmd = b.method(t, &format!("test{i}/0"));
            b.call(cmd, *m);
        }
        let tm = b.build();
        let covered = tm.covered_methods_of_class(scanner).len();
        let total = tm.countable_methods(scanner).len();
        assert_eq!((covered, total), (8, 22));
        assert_eq!(tm.class_coverage()[0].methods, 8);
    }

    #[test]
    fn dominant_unit_ranking() {
        let mut b = Builder::new();
        let p = b.pkg("p");
        let c = b.class(p, "C", "p/C.java");
        let cm = b.method(c, "run/0");
        let helper_p = b.class(p, "P", "p/P.java");
        let pm = b.method(helper_p, "get/0");
        let helper_f = b.class(p, "F", "p/F.java");
        let fm = b.method(helper_f, "get/0");
        let t = b.class(p, "CTest", "p/CTest.java");
        b.extends_external(t, "TestCase");
        for i in 0..9 {
            let cmd = b.method(t, &format!("test{i}/0"));
            b.call(cmd, cm);
            if i < 2 {
                b.call(cmd, pm);
                b.call(cmd, fm);
            }
        }
        let tm = b.build();
        let r = tm.unit_under_test_of(t, UnitStrategy::Commands, 0.5).unwrap();
        assert_eq!(r.ranked[0].class, c);
        assert_eq!(r.ranked[0].commands, 9);
        assert_eq!(r.dominant, Some(c));
        // ties broken by qualified name: F before P
        assert_eq!(r.ranked[1].class, helper_f);
        assert!(matches!(
            tm.unit_under_test_of(c, UnitStrategy::Commands, 0.5),
            Err(TestModelError::NotATestCase(_))
        ));
    }

    #[test]
    fn integration_style_has_no_dominant_unit() {
        let mut b = Builder::new();
        let p = b.pkg("p");
        let classes: Vec<_> = ["Parser", "Filter", "TreeBuilder"]
            .iter()
            .map(|n| {
                let c = b.class(p, n, "p/X.java");
                let m = b.method(c, "go/0");
                (c, m)
            })
            .collect();
        let t = b.class(p, "GccTest", "p/GccTest.java");
        b.extends_external(t, "TestCase");
        for (i, (_, m)) in classes.iter().enumerate() {
            let cmd = b.method(t, &format!("test{i}/0"));
            b.call(cmd, *m);
        }
        let tm = b.build();
        let r = tm.unit_under_test_of(t, UnitStrategy::Commands, 0.5).unwrap();
        assert_eq!(r.ranked.len(), 3);
        assert_eq!(r.dominant, None);
    }

    #[test]
    fn helpers_need_a_reference_from_tests() {
        let mut b = Builder::new();
        let p = b.pkg("p");
        let t = b.class(p, "ATest", "p/ATest.java");
        b.extends_external(t, "TestCase");
        let cmd = b.method(t, "testA/0");
        let used = b.class(p, "TestData", "p/TestData.java");
        let load = b.method(used, "load/0");
        let unused = b.class(p, "TestOrphan", "p/TestOrphan.java");
        b.call(cmd, load);
        let in_test_dir = b.class(p, "Loader", "proj/test/p/Loader.java");
        let read = b.method(in_test_dir, "read/0");
        b.call(load, read);
        let tm = b.build();
        assert_eq!(tm.role(used), TestRole::TestHelperClass);
        assert_eq!(tm.role(load), TestRole::TestUtilityMethod);
        assert_eq!(tm.role(in_test_dir), TestRole::TestHelperClass);
        assert_eq!(tm.role(unused), TestRole::Production);
        assert!(tm.coverage().is_empty());
    }

    #[test]
    fn setup_and_teardown_roles() {
        let mut b = Builder::new();
        let p = b.pkg("p");
        let t = b.class(p, "ATest", "p/ATest.java");
        b.extends_external(t, "TestCase");
        let su = b.method(t, "setUp/0");
        let td = b.method(t, "tearDown/0");
        let util = b.method(t, "makeFixture/0");
        let prod = b.class(p, "A", "p/A.java");
        let ctor = b.method(prod, "<init>/0");
        b.call(su, ctor);
        let tm = b.build();
        assert_eq!(tm.role(su), TestRole::TestSetup);
        assert_eq!(tm.role(td), TestRole::TestTearDown);
        assert_eq!(tm.role(util), TestRole::TestUtilityMethod);
        assert_eq!(tm.coverage()[0].origin, CoverageOrigin::Setup);
        assert!(tm.class_coverage()[0].from_setup);
        assert_eq!(tm.class_coverage()[0].commands, 0);
    }

    #[test]
    fn junit4_annotations() {
        let mut b = Builder::new();
        let p = b.pkg("p");
        let t = b.class(p, "Checks", "p/Checks.java");
        let m = b
            .m
            .add_entity(EntityKind::Method, "verifies/0", Some(t), EntitySpec::default().annotated("Test"))
            .unwrap();
        let before = b
            .m
            .add_entity(EntityKind::Method, "init/0", Some(t), EntitySpec::default().annotated("Before"))
            .unwrap();
        let model = Arc::new(b.m);
        let tm = build_test_model(model.clone(), &ClassifyConfig::default());
        assert_eq!(tm.role(t), TestRole::TestCaseClass);
        assert_eq!(tm.role(m), TestRole::TestCommand);
        assert_eq!(tm.role(before), TestRole::TestSetup);
        let cfg = ClassifyConfig {
            junit_style: JUnitStyle::Three,
            ..Default::default()
        };
        let tm3 = build_test_model(model, &cfg);
        assert_eq!(tm3.role(t), TestRole::Production);
    }
}

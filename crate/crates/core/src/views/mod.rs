//! The three test-suite views as renderable graph documents: system-wide,
//! unit under test, and test case.

mod export;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityId, EntityKind, Flag, RelationKind};
use crate::testmodel::{CoverageOrigin, TestModel, TestRole};

pub use export::{export, to_dot, to_graphml, to_json, ExportFormat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViewKind {
    SystemWide,
    UnitUnderTest,
    TestCase,
}

impl ViewKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViewKind::SystemWide => "system-wide",
            ViewKind::UnitUnderTest => "unit-under-test",
            ViewKind::TestCase => "test-case",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Square,
    Circle,
    MetaBox,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fill {
    ProductionWhite,
    TestBlack,
    MetaNeutral,
}

/// Extra styling hint on nodes and edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Marker {
    /// Setup method or an edge originating in setup.
    Setup,
    /// Test command declared by a superclass test case.
    Inherited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Containment,
    Coverage,
    Dependency,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViewNode {
    pub id: String,
    pub label: String,
    pub shape: Shape,
    pub fill: Fill,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity: Option<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
    /// Id of the node this one is drawn inside of (cluster rendering).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<Marker>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViewEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
    pub weight: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<Marker>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphDocument {
    pub view_kind: ViewKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus: Option<EntityId>,
    pub nodes: Vec<ViewNode>,
    pub edges: Vec<ViewEdge>,
    pub meta: BTreeMap<String, String>,
}

impl GraphDocument {
    pub fn node(&self, id: &str) -> Option<&ViewNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edges_of(&self, kind: EdgeKind) -> impl Iterator<Item = &ViewEdge> + '_ {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    /// Checks that node ids are unique and edges reference existing nodes.
    pub fn check(&self) -> Result<(), String> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(format!("duplicate node id `{}`", n.id));
            }
        }
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if !ids.contains(end.as_str()) {
                    return Err(format!("edge endpoint `{end}` is not a node"));
                }
            }
            if e.weight == 0 {
                return Err(format!("edge {} -> {} has zero weight", e.from, e.to));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ViewError {
    #[error("unknown package `{0}`")]
    UnknownPackage(String),
    #[error("`{0}` is not a production class")]
    NotAProductionClass(String),
    #[error("`{0}` is not a test case")]
    NotATestCase(String),
}

pub const FIXTURE_BOX: &str = "meta:fixture";
pub const COMMANDS_BOX: &str = "meta:test-commands";

/// Accumulates nodes and bundled edges in insertion order.
struct DocBuilder<'a> {
    tm: &'a TestModel,
    nodes: Vec<ViewNode>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(String, String, EdgeKind, Option<Marker>), u32>,
    edge_order: Vec<(String, String, EdgeKind, Option<Marker>)>,
}

impl<'a> DocBuilder<'a> {
    fn new(tm: &'a TestModel) -> Self {
        DocBuilder {
            tm,
            nodes: Vec::new(),
            index: HashMap::new(),
            edges: BTreeMap::new(),
            edge_order: Vec::new(),
        }
    }

    fn id_of(&self, id: EntityId) -> String {
        let m = self.tm.base();
        let e = m.entity(id);
        // Packages and classes share a namespace only in pathological
        // inputs; keep ids unique regardless.
        if e.kind == EntityKind::Package
            && m.resolve_kind(&e.qualified_name, EntityKind::Class).is_some()
        {
            format!("{}#package", e.qualified_name)
        } else {
            e.qualified_name.clone()
        }
    }

    fn has(&self, id: EntityId) -> bool {
        self.index.contains_key(&self.id_of(id))
    }

    /// Adds an entity node (idempotent) and returns its id.
    fn entity(&mut self, id: EntityId, shape: Shape) -> String {
        let key = self.id_of(id);
        if !self.index.contains_key(&key) {
            let e = self.tm.base().entity(id);
            let label = e.simple_name.clone();
            let fill = if self.tm.is_test_side(id) {
                Fill::TestBlack
            } else {
                Fill::ProductionWhite
            };
            self.push(ViewNode {
                id: key.clone(),
                label,
                shape,
                fill,
                entity: Some(id),
                position: None,
                group: None,
                marker: None,
            });
        }
        key
    }

    fn meta_box(&mut self, id: &str, label: &str) {
        if !self.index.contains_key(id) {
            self.push(ViewNode {
                id: id.to_string(),
                label: label.to_string(),
                shape: Shape::MetaBox,
                fill: Fill::MetaNeutral,
                entity: None,
                position: None,
                group: None,
                marker: None,
            });
        }
    }

    fn push(&mut self, node: ViewNode) {
        self.index.insert(node.id.clone(), self.nodes.len());
        self.nodes.push(node);
    }

    fn node_mut(&mut self, id: &str) -> &mut ViewNode {
        let i = self.index[id];
        &mut self.nodes[i]
    }

    fn set_group(&mut self, id: &str, group: &str) {
        let node = self.node_mut(id);
        if node.group.is_none() {
            node.group = Some(group.to_string());
        }
    }

    fn edge(&mut self, from: &str, to: &str, kind: EdgeKind, weight: u32, marker: Option<Marker>) {
        let key = (from.to_string(), to.to_string(), kind, marker);
        match self.edges.get_mut(&key) {
            Some(w) => *w += weight,
            None => {
                self.edges.insert(key.clone(), weight);
                self.edge_order.push(key);
            }
        }
    }

    fn finish(self, view_kind: ViewKind, focus: Option<EntityId>, meta: BTreeMap<String, String>) -> GraphDocument {
        let edges = self
            .edge_order
            .into_iter()
            .map(|key| {
                let weight = self.edges[&key];
                let (from, to, kind, marker) = key;
                ViewEdge {
                    from,
                    to,
                    kind,
                    weight,
                    marker,
                }
            })
            .collect();
        GraphDocument {
            view_kind,
            focus,
            nodes: self.nodes,
            edges,
            meta,
        }
    }
}

fn sorted_by_name(tm: &TestModel, ids: impl IntoIterator<Item = EntityId>) -> Vec<EntityId> {
    let mut v: Vec<EntityId> = ids.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    v.sort_by(|a, b| {
        let (ea, eb) = (tm.base().entity(*a), tm.base().entity(*b));
        ea.qualified_name.cmp(&eb.qualified_name).then(ea.kind.cmp(&eb.kind))
    });
    v
}

/// Packages and classes with containment, class-level coverage and test
/// dependencies. Nothing below the class level is shown.
pub fn build_system_wide(
    tm: &TestModel,
    package_filter: Option<&[String]>,
) -> Result<GraphDocument, ViewError> {
    let m = tm.base();
    let mut meta = BTreeMap::new();

    let all_packages: Vec<EntityId> = m.entities_of(EntityKind::Package).map(|p| p.id).collect();
    let all_classes: Vec<EntityId> = m.entities_of(EntityKind::Class).map(|c| c.id).collect();

    let (packages, classes): (BTreeSet<EntityId>, BTreeSet<EntityId>) = match package_filter {
        None => (all_packages.into_iter().collect(), all_classes.into_iter().collect()),
        Some(filter) => {
            let mut packages = BTreeSet::new();
            for name in filter {
                let p = m
                    .resolve_kind(name, EntityKind::Package)
                    .ok_or_else(|| ViewError::UnknownPackage(name.clone()))?;
                packages.insert(p);
            }
            let core: BTreeSet<EntityId> = all_classes
                .iter()
                .copied()
                .filter(|c| m.package_of(*c).is_some_and(|p| packages.contains(&p)))
                .collect();
            let mut classes = core.clone();
            for cc in tm.class_coverage() {
                if core.contains(&cc.test_case) || core.contains(&cc.prod_class) {
                    classes.insert(cc.test_case);
                    classes.insert(cc.prod_class);
                }
            }
            for d in tm.dependencies() {
                if core.contains(&d.from_test) || core.contains(&d.to_test) {
                    classes.insert(d.from_test);
                    classes.insert(d.to_test);
                }
            }
            let mut names: Vec<&str> = filter.iter().map(String::as_str).collect();
            names.sort_unstable();
            meta.insert("filter".into(), format!("packages: {}", names.join(", ")));
            (packages, classes)
        }
    };

    let mut b = DocBuilder::new(tm);
    for p in sorted_by_name(tm, packages.iter().copied()) {
        b.entity(p, Shape::Square);
    }
    for c in sorted_by_name(tm, classes.iter().copied()) {
        b.entity(c, Shape::Square);
    }
    for id in sorted_by_name(tm, packages.iter().chain(classes.iter()).copied()) {
        let Some(parent) = m.entity(id).parent else { continue };
        if b.has(parent) {
            let (from, to) = (b.id_of(parent), b.id_of(id));
            b.edge(&from, &to, EdgeKind::Containment, 1, None);
        }
    }
    for cc in tm.class_coverage() {
        if b.has(cc.test_case) && b.has(cc.prod_class) && cc.via_invocations > 0 {
            let (from, to) = (b.id_of(cc.test_case), b.id_of(cc.prod_class));
            b.edge(&from, &to, EdgeKind::Coverage, cc.via_invocations, None);
        }
    }
    for d in tm.dependencies() {
        if b.has(d.from_test) && b.has(d.to_test) {
            let (from, to) = (b.id_of(d.from_test), b.id_of(d.to_test));
            b.edge(&from, &to, EdgeKind::Dependency, 1, None);
        }
    }
    Ok(b.finish(ViewKind::SystemWide, None, meta))
}

/// A production class with its accessible methods and every test command
/// or setup reaching them, grouped by test case.
pub fn build_unit_view(tm: &TestModel, unit: EntityId) -> Result<GraphDocument, ViewError> {
    let m = tm.base();
    let Some(e) = m.get(unit) else {
        return Err(ViewError::NotAProductionClass(unit.to_string()));
    };
    if e.kind != EntityKind::Class || tm.role(unit) != TestRole::Production {
        return Err(ViewError::NotAProductionClass(e.qualified_name.clone()));
    }
    let edges: Vec<_> = tm
        .coverage()
        .iter()
        .filter(|c| m.class_of(c.to_prod) == Some(unit))
        .collect();
    let covered: BTreeSet<EntityId> = edges.iter().map(|c| c.to_prod).collect();

    let mut b = DocBuilder::new(tm);
    let unit_id = b.entity(unit, Shape::Square);
    for method in m.methods_of(unit) {
        let implicit = method.has(Flag::IsConstructor) && method.has(Flag::IsGenerated);
        let hidden = method.has(Flag::IsPrivate) || implicit;
        if hidden && !covered.contains(&method.id) {
            continue;
        }
        let id = b.entity(method.id, Shape::Circle);
        b.set_group(&id, &unit_id);
        b.edge(&unit_id, &id, EdgeKind::Containment, 1, None);
    }

    let test_cases = sorted_by_name(tm, edges.iter().filter_map(|c| m.class_of(c.from_test)));
    for tc in test_cases {
        let tc_id = b.entity(tc, Shape::Square);
        let mut members: Vec<_> = edges
            .iter()
            .filter(|c| m.class_of(c.from_test) == Some(tc))
            .collect();
        members.sort_by(|a, c| {
            (&m.entity(a.from_test).qualified_name, &m.entity(a.to_prod).qualified_name)
                .cmp(&(&m.entity(c.from_test).qualified_name, &m.entity(c.to_prod).qualified_name))
        });
        for c in members {
            let setup = c.origin == CoverageOrigin::Setup;
            let from = b.entity(c.from_test, Shape::Circle);
            b.set_group(&from, &tc_id);
            if setup {
                b.node_mut(&from).marker = Some(Marker::Setup);
            }
            b.edge(&tc_id, &from, EdgeKind::Containment, 1, None);
            let to = b.id_of(c.to_prod);
            b.edge(
                &from,
                &to,
                EdgeKind::Coverage,
                c.via_invocations,
                setup.then_some(Marker::Setup),
            );
        }
    }
    let mut meta = BTreeMap::new();
    meta.insert("focus".into(), e.qualified_name.clone());
    Ok(b.finish(ViewKind::UnitUnderTest, Some(unit), meta))
}

/// A test case in terms of its fixture, its commands and the production
/// code they exercise.
pub fn build_test_case_view(tm: &TestModel, test_case: EntityId) -> Result<GraphDocument, ViewError> {
    let m = tm.base();
    let Some(e) = m.get(test_case) else {
        return Err(ViewError::NotATestCase(test_case.to_string()));
    };
    if tm.role(test_case) != TestRole::TestCaseClass {
        return Err(ViewError::NotATestCase(e.qualified_name.clone()));
    }
    let mut b = DocBuilder::new(tm);
    let tc_id = b.entity(test_case, Shape::Square);
    b.meta_box(FIXTURE_BOX, "Fixture");
    b.meta_box(COMMANDS_BOX, "Test Commands");
    b.edge(&tc_id, FIXTURE_BOX, EdgeKind::Containment, 1, None);
    b.edge(&tc_id, COMMANDS_BOX, EdgeKind::Containment, 1, None);

    let fixture: BTreeSet<EntityId> = tm.fixture_classes_of(test_case).into_iter().collect();
    for c in tm.fixture_classes_of(test_case) {
        let id = b.entity(c, Shape::Square);
        b.set_group(&id, FIXTURE_BOX);
        b.edge(FIXTURE_BOX, &id, EdgeKind::Containment, 1, None);
    }

    let commands = tm.commands_of(test_case);
    for cmd in sorted_by_name(tm, commands.iter().copied()) {
        let id = b.entity(cmd, Shape::Circle);
        b.set_group(&id, COMMANDS_BOX);
        b.edge(COMMANDS_BOX, &id, EdgeKind::Containment, 1, None);
    }
    let setups = tm.members_with_role(test_case, TestRole::TestSetup);
    for s in sorted_by_name(tm, setups.iter().copied()) {
        let id = b.entity(s, Shape::Circle);
        b.set_group(&id, FIXTURE_BOX);
        b.node_mut(&id).marker = Some(Marker::Setup);
        b.edge(FIXTURE_BOX, &id, EdgeKind::Containment, 1, None);
    }

    let own: BTreeSet<EntityId> = commands.iter().chain(setups.iter()).copied().collect();
    let mut exercised: Vec<_> = tm
        .coverage()
        .iter()
        .filter(|c| own.contains(&c.from_test))
        .collect();
    exercised.sort_by(|a, c| {
        (&m.entity(a.from_test).qualified_name, &m.entity(a.to_prod).qualified_name)
            .cmp(&(&m.entity(c.from_test).qualified_name, &m.entity(c.to_prod).qualified_name))
    });
    for c in exercised {
        let class = m.class_of(c.to_prod).expect("methods live in classes");
        let from = b.id_of(c.from_test);
        if c.origin == CoverageOrigin::Setup && fixture.contains(&class) {
            let to = b.id_of(class);
            b.edge(&from, &to, EdgeKind::Coverage, c.via_invocations, Some(Marker::Setup));
            continue;
        }
        let class_id = b.entity(class, Shape::Square);
        let method_id = b.entity(c.to_prod, Shape::Circle);
        b.set_group(&method_id, &class_id);
        b.edge(&class_id, &method_id, EdgeKind::Containment, 1, None);
        let marker = (c.origin == CoverageOrigin::Setup).then_some(Marker::Setup);
        b.edge(&from, &method_id, EdgeKind::Coverage, c.via_invocations, marker);
    }

    // Commands inherited from a direct superclass test case sit in the
    // commands box, dashed, with edges only to production methods already
    // in view. Deeper ancestors are one drill-down away via the dependency
    // edge.
    let direct: BTreeSet<EntityId> = tm
        .dependencies()
        .iter()
        .filter(|d| d.from_test == test_case)
        .map(|d| d.to_test)
        .collect();
    for cmd in tm
        .inherited_commands_of(test_case)
        .into_iter()
        .filter(|c| m.entity(*c).parent.is_some_and(|p| direct.contains(&p)))
    {
        let id = b.entity(cmd, Shape::Circle);
        b.set_group(&id, COMMANDS_BOX);
        b.node_mut(&id).marker = Some(Marker::Inherited);
        b.edge(COMMANDS_BOX, &id, EdgeKind::Containment, 1, Some(Marker::Inherited));
        for c in tm.coverage().iter().filter(|c| c.from_test == cmd) {
            if b.has(c.to_prod) {
                let to = b.id_of(c.to_prod);
                b.edge(&id, &to, EdgeKind::Coverage, c.via_invocations, Some(Marker::Inherited));
            }
        }
    }

    for d in tm.dependencies().iter().filter(|d| d.from_test == test_case) {
        let to = b.entity(d.to_test, Shape::Square);
        b.edge(&tc_id, &to, EdgeKind::Dependency, 1, None);
    }

    let mut meta = BTreeMap::new();
    meta.insert("focus".into(), e.qualified_name.clone());
    Ok(b.finish(ViewKind::TestCase, Some(test_case), meta))
}

/// Entity-level relations used to check that detail views stay close to
/// their focus: model relations, attribute typing, and the test model's
/// coverage and dependency edges, all taken as undirected.
pub fn focus_neighbourhood(tm: &TestModel, focus: EntityId, hops: usize) -> BTreeSet<EntityId> {
    let m = tm.base();
    let mut adj: HashMap<EntityId, Vec<EntityId>> = HashMap::new();
    let mut link = |a: EntityId, b: EntityId| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for kind in RelationKind::ALL {
        for r in m.relations_of(kind) {
            if let Some(t) = r.target() {
                link(r.from, t);
            }
        }
    }
    for a in m.entities_of(EntityKind::Attribute) {
        if let Some(t) = a.declared_type.as_deref().and_then(|t| m.resolve_kind(t, EntityKind::Class)) {
            link(a.id, t);
        }
    }
    for c in tm.coverage() {
        link(c.from_test, c.to_prod);
    }
    for c in tm.class_coverage() {
        link(c.test_case, c.prod_class);
    }
    for d in tm.dependencies() {
        link(d.from_test, d.to_test);
    }
    let mut seen = BTreeSet::from([focus]);
    let mut frontier = vec![focus];
    for _ in 0..hops {
        let mut next = Vec::new();
        for n in frontier {
            for &x in adj.get(&n).map(Vec::as_slice).unwrap_or_default() {
                if seen.insert(x) {
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    seen
}

//! Seeded generators and brute-force oracles shared by the test suites.
//!
//! Everything here is deliberately naive: the oracles restate the coverage
//! definition as nested loops over entities and relations, without the
//! indices the production code relies on.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use testscope_core::layout::WeightedEdge;
use testscope_core::model::{
    EntityId, EntityKind, EntitySpec, FactModel, Flag, Relation, RelationKind, SourceLocation, Target,
};
use testscope_core::testmodel::{TestModel, TestRole};

const FACTS_SCHEMA_ID: &str = "https://testscope.dev/schemas/facts.schema.json";
const BUNDLE_SCHEMA_ID: &str = "https://testscope.dev/schemas/bundle.schema.json";

/// Workspace root, for locating fixtures from any crate's tests.
pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("testkit lives two levels below the workspace root")
        .to_path_buf()
}

pub fn fixture(rel: &str) -> PathBuf {
    workspace_root().join("fixtures").join(rel)
}

/// A random but well-formed fact model with at most `max_entities`
/// entities. Roughly half the classes look like JUnit 3 test cases so that
/// classification and coverage have something to chew on.
pub fn random_model(seed: u64, max_entities: usize) -> FactModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = FactModel::new();
    let budget = max_entities.max(4);
    let target = rng.gen_range(4..=budget);

    let mut packages = Vec::new();
    let root = m.add_entity(EntityKind::Package, "org", None, EntitySpec::default()).unwrap();
    packages.push(root);
    for i in 0..rng.gen_range(0..3) {
        let parent = *packages.choose(&mut rng).unwrap();
        packages.push(m.add_entity(EntityKind::Package, &format!("p{i}"), Some(parent), EntitySpec::default()).unwrap());
    }

    let mut classes: Vec<EntityId> = Vec::new();
    let mut methods: Vec<EntityId> = Vec::new();
    let mut attributes: Vec<EntityId> = Vec::new();
    let mut serial = 0u32;
    while m.len() < target {
        serial += 1;
        let roll: f64 = rng.gen();
        if classes.is_empty() || roll < 0.2 {
            let testy = rng.gen_bool(0.5);
            let name = if testy { format!("C{serial}Test") } else { format!("C{serial}") };
            let parent = if !classes.is_empty() && rng.gen_bool(0.1) {
                *classes.choose(&mut rng).unwrap()
            } else {
                *packages.choose(&mut rng).unwrap()
            };
            let mut flags = BTreeSet::new();
            if rng.gen_bool(0.08) {
                flags.insert(Flag::IsInterface);
            } else if rng.gen_bool(0.1) {
                flags.insert(Flag::IsAbstract);
            }
            if rng.gen_bool(0.05) {
                flags.insert(Flag::IsGenerated);
            }
            let spec = EntitySpec {
                flags,
                location: Some(SourceLocation::new(format!("src/{name}.java"), 1, rng.gen_range(1..200))),
                ..Default::default()
            };
            let id = m.add_entity(EntityKind::Class, &name, Some(parent), spec).unwrap();
            if testy && rng.gen_bool(0.7) {
                let base = ["junit.framework.TestCase", "TestCase"].choose(&mut rng).unwrap();
                m.add_relation(rel(RelationKind::Inheritance, id, Target::Unresolved(base.to_string())))
                    .unwrap();
            } else if !classes.is_empty() && rng.gen_bool(0.3) {
                let sup = *classes.choose(&mut rng).unwrap();
                m.add_relation(rel(RelationKind::Inheritance, id, Target::Resolved(sup))).unwrap();
            }
            classes.push(id);
        } else if roll < 0.75 {
            let owner = *classes.choose(&mut rng).unwrap();
            let arity = rng.gen_range(0..3);
            let (name, mut flags, annotations) = match rng.gen_range(0..10) {
                0..=3 => (format!("test{serial}"), BTreeSet::new(), Vec::new()),
                4 => ("setUp".to_string(), BTreeSet::new(), Vec::new()),
                5 => ("tearDown".to_string(), BTreeSet::new(), Vec::new()),
                6 => ("<init>".to_string(), BTreeSet::from([Flag::IsConstructor]), Vec::new()),
                7 => (format!("check{serial}"), BTreeSet::new(), vec!["Test".to_string()]),
                _ => (format!("m{serial}"), BTreeSet::new(), Vec::new()),
            };
            if rng.gen_bool(0.1) {
                flags.insert(Flag::IsStatic);
            }
            if rng.gen_bool(0.15) {
                flags.insert(Flag::IsPrivate);
            }
            let simple = format!("{name}/{arity}");
            let spec = EntitySpec {
                flags,
                annotations,
                ..Default::default()
            };
            if let Ok(id) = m.add_entity(EntityKind::Method, &simple, Some(owner), spec) {
                methods.push(id);
            }
        } else {
            let owner = *classes.choose(&mut rng).unwrap();
            let typed = *classes.choose(&mut rng).unwrap();
            let spec = EntitySpec::default().typed(m.entity(typed).qualified_name.clone());
            let id = m.add_entity(EntityKind::Attribute, &format!("f{serial}"), Some(owner), spec).unwrap();
            attributes.push(id);
        }
    }

    if !methods.is_empty() {
        let calls = rng.gen_range(0..=methods.len() * 3);
        for _ in 0..calls {
            let from = *methods.choose(&mut rng).unwrap();
            let to = if rng.gen_bool(0.1) {
                Target::Unresolved(format!("unknown{}/0", rng.gen_range(0..5)))
            } else {
                Target::Resolved(*methods.choose(&mut rng).unwrap())
            };
            let mut r = rel(RelationKind::Invocation, from, to);
            if rng.gen_bool(0.5) {
                r.site = Some(SourceLocation::new("src/x.java", rng.gen_range(1..50), rng.gen_range(50..99)));
            }
            m.add_relation(r).unwrap();
        }
        if !attributes.is_empty() {
            for _ in 0..rng.gen_range(0..=attributes.len() * 2) {
                let from = *methods.choose(&mut rng).unwrap();
                let to = *attributes.choose(&mut rng).unwrap();
                m.add_relation(rel(RelationKind::AttributeAccess, from, Target::Resolved(to))).unwrap();
            }
        }
    }
    m
}

fn rel(kind: RelationKind, from: EntityId, to: Target) -> Relation {
    Relation {
        kind,
        from,
        to,
        site: None,
    }
}

/// A random weighted graph with `1..=max_nodes` nodes.
pub fn random_graph(seed: u64, max_nodes: usize) -> (usize, Vec<WeightedEdge>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_nodes.max(1));
    let mut edges = Vec::new();
    if n > 1 {
        let m = rng.gen_range(0..=n * 2);
        for _ in 0..m {
            let from = rng.gen_range(0..n);
            let mut to = rng.gen_range(0..n);
            if to == from {
                to = (to + 1) % n;
            }
            edges.push(WeightedEdge {
                from,
                to,
                weight: f64::from(rng.gen_range(1..4u8)),
            });
        }
    }
    (n, edges)
}

/// Method-level coverage restated from its definition: every invocation
/// from a test command or setup to a production method, counted per call
/// site.
pub fn oracle_method_coverage(tm: &TestModel) -> BTreeMap<(EntityId, EntityId), u32> {
    let m = tm.base();
    let constructors = tm.config().constructor_coverage;
    let mut out = BTreeMap::new();
    for source in m.entities() {
        if source.kind != EntityKind::Method {
            continue;
        }
        if !matches!(tm.role(source.id), TestRole::TestCommand | TestRole::TestSetup) {
            continue;
        }
        for r in m.relations() {
            if r.kind != RelationKind::Invocation || r.from != source.id {
                continue;
            }
            let Target::Resolved(to) = r.to else { continue };
            let target = m.entity(to);
            if target.kind != EntityKind::Method || tm.role(to) != TestRole::Production {
                continue;
            }
            if !constructors && target.has(Flag::IsConstructor) {
                continue;
            }
            *out.entry((source.id, to)).or_insert(0) += 1;
        }
    }
    out
}

/// Class-level coverage: (test case, production class) pairs where some
/// method of the test case covers some method of the class.
pub fn oracle_class_coverage(tm: &TestModel) -> BTreeSet<(EntityId, EntityId)> {
    let m = tm.base();
    let with_setup = tm.config().setup_coverage;
    let mut out = BTreeSet::new();
    for &(from, to) in oracle_method_coverage(tm).keys() {
        if tm.role(from) == TestRole::TestSetup && !with_setup {
            continue;
        }
        let (Some(tc), Some(pc)) = (m.entity(from).parent, m.entity(to).parent) else {
            continue;
        };
        out.insert((tc, pc));
    }
    out
}

fn schema(name: &str) -> serde_json::Value {
    let path = workspace_root().join("schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(&path).expect("schema file")).expect("schema is JSON")
}

fn validator_for(root: serde_json::Value) -> jsonschema::Validator {
    let registry = jsonschema::Registry::new()
        .add(FACTS_SCHEMA_ID, schema("facts.schema.json"))
        .and_then(|b| b.add(BUNDLE_SCHEMA_ID, schema("bundle.schema.json")))
        .and_then(|b| b.prepare())
        .expect("schemas register");
    jsonschema::options()
        .with_registry(&registry)
        .build(&root)
        .expect("schema compiles")
}

/// Validator for whole facts files.
pub fn facts_validator() -> jsonschema::Validator {
    validator_for(schema("facts.schema.json"))
}

/// Validator for whole exploration bundles.
pub fn bundle_validator() -> jsonschema::Validator {
    validator_for(schema("bundle.schema.json"))
}

/// Validator for a single view document, as emitted by `view --format json`.
pub fn graph_document_validator() -> jsonschema::Validator {
    validator_for(serde_json::json!({ "$ref": format!("{BUNDLE_SCHEMA_ID}#/$defs/graphDocument") }))
}

/// All schema errors of `instance`, rendered with their locations.
pub fn schema_errors(validator: &jsonschema::Validator, instance: &serde_json::Value) -> Vec<String> {
    validator
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect()
}

//! `testscope-facts` version 1: the JSON interchange document for a
//! [`FactModel`].
//!
//! Ids inside a document are local ordinals. Export assigns them in
//! qualified-name order; import remaps them to fresh model ids, keeping the
//! document order whenever parents precede their children.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    EntityId, EntityKind, EntitySpec, FactModel, Flags, ModelError, Relation, RelationKind,
    SourceLocation, Target,
};

pub const FACTS_FORMAT: &str = "testscope-facts";
pub const FACTS_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactsDocument {
    pub format: String,
    pub version: u32,
    pub entities: Vec<EntityRecord>,
    pub relations: Vec<RelationRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EntityRecord {
    pub id: u32,
    pub kind: EntityKind,
    pub simple_name: String,
    pub qualified_name: String,
    #[serde(default)]
    pub parent: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_location: Option<SourceLocation>,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_type: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
}

/// Relation target: an entity ordinal when resolved, the unresolved name
/// otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetRecord {
    Id(u32),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationRecord {
    pub kind: RelationKind,
    pub from: u32,
    pub to: TargetRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<SourceLocation>,
    pub resolved: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FactsError {
    #[error("schema violation at `{path}`: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("entity `{entity}` has a missing or cyclic parent")]
    DanglingContainment { entity: String },
}

fn violation(path: impl Into<String>, message: impl Into<String>) -> FactsError {
    FactsError::SchemaViolation {
        path: path.into(),
        message: message.into(),
    }
}

pub fn export_document(model: &FactModel) -> FactsDocument {
    let mut order: Vec<&crate::model::Entity> = model.entities().iter().collect();
    order.sort_by(|a, b| {
        a.qualified_name
            .cmp(&b.qualified_name)
            .then(a.kind.cmp(&b.kind))
    });
    let ordinal: HashMap<EntityId, u32> = order
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id, i as u32))
        .collect();
    let entities = order
        .iter()
        .map(|e| EntityRecord {
            id: ordinal[&e.id],
            kind: e.kind,
            simple_name: e.simple_name.clone(),
            qualified_name: e.qualified_name.clone(),
            parent: e.parent.map(|p| ordinal[&p]),
            source_location: e.location.clone(),
            flags: e.flags.clone(),
            declared_type: e.declared_type.clone(),
            annotations: e.annotations.clone(),
        })
        .collect();
    let mut relations: Vec<RelationRecord> = model
        .relations()
        .iter()
        .map(|r| RelationRecord {
            kind: r.kind,
            from: ordinal[&r.from],
            to: match &r.to {
                Target::Resolved(id) => TargetRecord::Id(ordinal[id]),
                Target::Unresolved(name) => TargetRecord::Name(name.clone()),
            },
            site: r.site.clone(),
            resolved: r.is_resolved(),
        })
        .collect();
    relations.sort_by(|a, b| {
        (a.kind, a.from, &a.to, &a.site).cmp(&(b.kind, b.from, &b.to, &b.site))
    });
    FactsDocument {
        format: FACTS_FORMAT.to_string(),
        version: FACTS_VERSION,
        entities,
        relations,
    }
}

/// Serializes the model; output is deterministic for a given model.
pub fn export_facts(model: &FactModel) -> String {
    let mut text = serde_json::to_string_pretty(&export_document(model))
        .expect("facts document serializes");
    text.push('\n');
    text
}

/// Rebuilds `model` so that entity ids equal the ordinals of its export.
pub fn canonicalize(model: &FactModel) -> FactModel {
    let canonical = import_document(&export_document(model)).expect("exported documents import");
    debug_assert!(canonical
        .entities()
        .iter()
        .zip(&export_document(&canonical).entities)
        .all(|(e, r)| e.id.0 == r.id));
    canonical
}

pub fn import_facts(text: &str) -> Result<FactModel, FactsError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: FactsDocument = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        violation(path, e.into_inner().to_string())
    })?;
    import_document(&doc)
}

pub fn import_document(doc: &FactsDocument) -> Result<FactModel, FactsError> {
    if doc.format != FACTS_FORMAT {
        return Err(violation("format", format!("expected `{FACTS_FORMAT}`")));
    }
    if doc.version != FACTS_VERSION {
        return Err(violation("version", format!("unsupported version {}", doc.version)));
    }
    let mut by_ordinal: HashMap<u32, usize> = HashMap::new();
    for (i, e) in doc.entities.iter().enumerate() {
        if by_ordinal.insert(e.id, i).is_some() {
            return Err(violation(format!("entities[{i}].id"), "duplicate id"));
        }
    }

    // Parents must be inserted before children; order by containment depth.
    let mut depth: Vec<Option<usize>> = vec![None; doc.entities.len()];
    for start in 0..doc.entities.len() {
        let mut chain = Vec::new();
        let mut cur = start;
        let base = loop {
            if let Some(d) = depth[cur] {
                break d + 1;
            }
            if chain.contains(&cur) || chain.len() > doc.entities.len() {
                return Err(FactsError::DanglingContainment {
                    entity: doc.entities[start].qualified_name.clone(),
                });
            }
            chain.push(cur);
            match doc.entities[cur].parent {
                None => break 0,
                Some(p) => {
                    cur = *by_ordinal.get(&p).ok_or_else(|| FactsError::DanglingContainment {
                        entity: doc.entities[cur].qualified_name.clone(),
                    })?;
                }
            }
        };
        for (k, idx) in chain.iter().rev().enumerate() {
            depth[*idx] = Some(base + k);
        }
    }
    let mut order: Vec<usize> = (0..doc.entities.len()).collect();
    let parents_first = doc
        .entities
        .iter()
        .enumerate()
        .all(|(i, e)| e.parent.is_none_or(|p| by_ordinal[&p] < i));
    if !parents_first {
        order.sort_by_key(|&i| (depth[i], i));
    }

    let mut model = FactModel::new();
    let mut ids: HashMap<u32, EntityId> = HashMap::new();
    for i in order {
        let rec = &doc.entities[i];
        let parent = rec.parent.map(|p| ids[&p]);
        let spec = EntitySpec {
            location: rec.source_location.clone(),
            flags: rec.flags.clone(),
            declared_type: rec.declared_type.clone(),
            annotations: rec.annotations.clone(),
        };
        let id = model
            .add_entity(rec.kind, &rec.simple_name, parent, spec)
            .map_err(|e| violation(format!("entities[{i}]"), e.to_string()))?;
        if model.entity(id).qualified_name != rec.qualified_name {
            return Err(violation(
                format!("entities[{i}].qualifiedName"),
                format!(
                    "expected `{}` from the parent chain",
                    model.entity(id).qualified_name
                ),
            ));
        }
        ids.insert(rec.id, id);
    }

    for (i, rec) in doc.relations.iter().enumerate() {
        let from = *ids
            .get(&rec.from)
            .ok_or_else(|| violation(format!("relations[{i}].from"), "unknown entity id"))?;
        let to = match (&rec.to, rec.resolved) {
            (TargetRecord::Id(t), _) => match ids.get(t) {
                Some(id) => Target::Resolved(*id),
                None => Target::Unresolved(format!("#{t}")),
            },
            (TargetRecord::Name(name), false) => Target::Unresolved(name.clone()),
            (TargetRecord::Name(_), true) => {
                return Err(violation(
                    format!("relations[{i}].to"),
                    "resolved relations must reference an entity id",
                ))
            }
        };
        if rec.kind == RelationKind::Containment {
            let consistent = matches!(to, Target::Resolved(child) if model.entity(child).parent == Some(from));
            if !consistent {
                return Err(FactsError::DanglingContainment {
                    entity: match &rec.to {
                        TargetRecord::Id(t) => format!("#{t}"),
                        TargetRecord::Name(n) => n.clone(),
                    },
                });
            }
            continue;
        }
        model
            .add_relation(Relation {
                kind: rec.kind,
                from,
                to,
                site: rec.site.clone(),
            })
            .map_err(|e: ModelError| violation(format!("relations[{i}]"), e.to_string()))?;
    }
    Ok(model)
}

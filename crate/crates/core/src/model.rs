//! Language-independent object-oriented fact model.
//!
//! Entities (packages, classes, methods, attributes) form a containment
//! forest; invocations, attribute accesses and inheritance are stored as
//! relations with per-kind adjacency indices. Relations whose target could
//! not be resolved keep the target's name and are ignored by every query
//! that walks resolved edges.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense identifier assigned at insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Package,
    Class,
    Method,
    Attribute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Flag {
    IsInterface,
    IsAbstract,
    IsStatic,
    IsConstructor,
    IsGenerated,
    IsPrivate,
}

pub type Flags = BTreeSet<Flag>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceLocation {
    pub file: String,
    pub start_line: u32,
    pub end_line: u32,
}

impl SourceLocation {
    pub fn new(file: impl Into<String>, start_line: u32, end_line: u32) -> Self {
        SourceLocation {
            file: file.into(),
            start_line,
            end_line,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    pub simple_name: String,
    pub qualified_name: String,
    pub parent: Option<EntityId>,
    pub location: Option<SourceLocation>,
    pub flags: Flags,
    /// Field type for attributes, return type for methods. Fully qualified
    /// when the extractor could resolve it.
    pub declared_type: Option<String>,
    /// Simple names of annotations on the declaration.
    pub annotations: Vec<String>,
}

impl Entity {
    pub fn has(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    /// Method name without the `/arity` suffix.
    pub fn base_name(&self) -> &str {
        match self.simple_name.rsplit_once('/') {
            Some((name, _)) if self.kind == EntityKind::Method => name,
            _ => &self.simple_name,
        }
    }

    pub fn has_annotation(&self, name: &str) -> bool {
        self.annotations.iter().any(|a| a == name)
    }
}

/// Optional attributes for [`FactModel::add_entity`].
#[derive(Clone, Debug, Default)]
pub struct EntitySpec {
    pub location: Option<SourceLocation>,
    pub flags: Flags,
    pub declared_type: Option<String>,
    pub annotations: Vec<String>,
}

impl EntitySpec {
    pub fn flags(flags: impl IntoIterator<Item = Flag>) -> Self {
        EntitySpec {
            flags: flags.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn at(mut self, location: SourceLocation) -> Self {
        self.location = Some(location);
        self
    }

    pub fn typed(mut self, declared_type: impl Into<String>) -> Self {
        self.declared_type = Some(declared_type.into());
        self
    }

    pub fn annotated(mut self, annotation: impl Into<String>) -> Self {
        self.annotations.push(annotation.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    Containment,
    Inheritance,
    Invocation,
    AttributeAccess,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [
        RelationKind::Containment,
        RelationKind::Inheritance,
        RelationKind::Invocation,
        RelationKind::AttributeAccess,
    ];

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Resolved(EntityId),
    Unresolved(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub kind: RelationKind,
    pub from: EntityId,
    pub to: Target,
    pub site: Option<SourceLocation>,
}

impl Relation {
    pub fn is_resolved(&self) -> bool {
        matches!(self.to, Target::Resolved(_))
    }

    pub fn target(&self) -> Option<EntityId> {
        match self.to {
            Target::Resolved(id) => Some(id),
            Target::Unresolved(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate qualified name `{name}` for {kind:?}")]
    DuplicateQualifiedName { name: String, kind: EntityKind },
    #[error("a {child:?} cannot be contained in a {parent:?}")]
    InvalidParentKind {
        child: EntityKind,
        parent: Option<EntityKind>,
    },
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("{kind:?} relation cannot run from a {from:?} to a {to:?}")]
    InvalidRelationEndpoints {
        kind: RelationKind,
        from: EntityKind,
        to: Option<EntityKind>,
    },
    #[error("containment relations are recorded through entity parents")]
    ExplicitContainment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuditError {
    DanglingRelation(usize),
    BadParent(EntityId),
    ContainmentCycle(EntityId),
    NameIndexMismatch(String),
    QualifiedNameMismatch(EntityId),
    AdjacencyMismatch(RelationKind),
}

#[derive(Clone, Debug, Default)]
struct Adjacency {
    out: HashMap<EntityId, Vec<usize>>,
    inc: HashMap<EntityId, Vec<usize>>,
}

/// The fact store. Construction is single-writer; share a finished model
/// behind an `Arc` for concurrent readers.
#[derive(Clone, Debug, Default)]
pub struct FactModel {
    entities: Vec<Entity>,
    relations: Vec<Relation>,
    by_kind: [Vec<usize>; 4],
    names: HashMap<String, Vec<EntityId>>,
    adjacency: [Adjacency; 4],
}

fn parent_allowed(child: EntityKind, parent: Option<EntityKind>) -> bool {
    use EntityKind::*;
    match (child, parent) {
        (Package, None | Some(Package)) => true,
        (Class, None | Some(Package) | Some(Class)) => true,
        (Method | Attribute, Some(Class)) => true,
        _ => false,
    }
}

impl FactModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_entity(
        &mut self,
        kind: EntityKind,
        simple_name: &str,
        parent: Option<EntityId>,
        spec: EntitySpec,
    ) -> Result<EntityId, ModelError> {
        let parent_entity = match parent {
            Some(p) => Some(self.get(p).ok_or(ModelError::UnknownEntity(p))?),
            None => None,
        };
        if !parent_allowed(kind, parent_entity.map(|p| p.kind)) {
            return Err(ModelError::InvalidParentKind {
                child: kind,
                parent: parent_entity.map(|p| p.kind),
            });
        }
        let qualified_name = match parent_entity {
            Some(p) => format!("{}.{}", p.qualified_name, simple_name),
            None => simple_name.to_string(),
        };
        if self
            .names
            .get(&qualified_name)
            .is_some_and(|ids| ids.iter().any(|id| self.entities[id.index()].kind == kind))
        {
            return Err(ModelError::DuplicateQualifiedName {
                name: qualified_name,
                kind,
            });
        }
        let id = EntityId(self.entities.len() as u32);
        self.names.entry(qualified_name.clone()).or_default().push(id);
        self.entities.push(Entity {
            id,
            kind,
            simple_name: simple_name.to_string(),
            qualified_name,
            parent,
            location: spec.location,
            flags: spec.flags,
            declared_type: spec.declared_type,
            annotations: spec.annotations,
        });
        if let Some(p) = parent {
            self.push_relation(Relation {
                kind: RelationKind::Containment,
                from: p,
                to: Target::Resolved(id),
                site: None,
            });
        }
        Ok(id)
    }

    /// Adds an inheritance, invocation or attribute-access relation.
    /// Unresolved targets are accepted as-is.
    pub fn add_relation(&mut self, relation: Relation) -> Result<(), ModelError> {
        use EntityKind::*;
        if relation.kind == RelationKind::Containment {
            return Err(ModelError::ExplicitContainment);
        }
        let from = self
            .get(relation.from)
            .ok_or(ModelError::UnknownEntity(relation.from))?
            .kind;
        let to = match relation.to {
            Target::Resolved(id) => Some(self.get(id).ok_or(ModelError::UnknownEntity(id))?.kind),
            Target::Unresolved(_) => None,
        };
        let ok = match relation.kind {
            RelationKind::Inheritance => from == Class && matches!(to, None | Some(Class)),
            RelationKind::Invocation => from == Method && matches!(to, None | Some(Method)),
            RelationKind::AttributeAccess => from == Method && matches!(to, None | Some(Attribute)),
            RelationKind::Containment => unreachable!(),
        };
        if !ok {
            return Err(ModelError::InvalidRelationEndpoints {
                kind: relation.kind,
                from,
                to,
            });
        }
        self.push_relation(relation);
        Ok(())
    }

    fn push_relation(&mut self, relation: Relation) {
        let idx = self.relations.len();
        let slot = relation.kind.slot();
        self.by_kind[slot].push(idx);
        if let Target::Resolved(to) = relation.to {
            let adj = &mut self.adjacency[slot];
            adj.out.entry(relation.from).or_default().push(idx);
            adj.inc.entry(to).or_default().push(idx);
        }
        self.relations.push(relation);
    }

    pub fn set_declared_type(&mut self, id: EntityId, declared_type: Option<String>) {
        self.entities[id.index()].declared_type = declared_type;
    }

    /// Drops every relation of the given kinds and rebuilds the indices.
    pub fn clear_relations(&mut self, kinds: &[RelationKind]) {
        assert!(!kinds.contains(&RelationKind::Containment));
        let old = std::mem::take(&mut self.relations);
        self.by_kind = Default::default();
        self.adjacency = Default::default();
        for relation in old {
            if !kinds.contains(&relation.kind) {
                self.push_relation(relation);
            }
        }
    }

    pub fn get(&self, id: EntityId) -> Option<&Entity> {
        self.entities.get(id.index())
    }

    /// Panicking accessor for ids known to come from this model.
    pub fn entity(&self, id: EntityId) -> &Entity {
        &self.entities[id.index()]
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entities_of(&self, kind: EntityKind) -> impl Iterator<Item = &Entity> + '_ {
        self.entities.iter().filter(move |e| e.kind == kind)
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relations_of(&self, kind: RelationKind) -> impl Iterator<Item = &Relation> + '_ {
        self.by_kind[kind.slot()].iter().map(|&i| &self.relations[i])
    }

    pub fn relation_count(&self, kind: RelationKind) -> usize {
        self.by_kind[kind.slot()].len()
    }

    /// Looks up a qualified name. When several kinds share the name, the
    /// earliest inserted entity wins.
    pub fn resolve(&self, qualified_name: &str) -> Option<EntityId> {
        self.names.get(qualified_name).and_then(|ids| ids.first().copied())
    }

    pub fn resolve_kind(&self, qualified_name: &str, kind: EntityKind) -> Option<EntityId> {
        self.names
            .get(qualified_name)?
            .iter()
            .copied()
            .find(|id| self.entities[id.index()].kind == kind)
    }

    /// Resolved relations of `kind` touching `id`, one per stored relation,
    /// in insertion order.
    pub fn relations_at(
        &self,
        id: EntityId,
        kind: RelationKind,
        direction: Direction,
    ) -> impl Iterator<Item = &Relation> + '_ {
        let adj = &self.adjacency[kind.slot()];
        let list = match direction {
            Direction::Out => adj.out.get(&id),
            Direction::In => adj.inc.get(&id),
        };
        list.into_iter().flatten().map(|&i| &self.relations[i])
    }

    /// Distinct resolved neighbours in first-seen order. Call sites are
    /// stored individually; this query collapses them.
    pub fn neighbors(
        &self,
        id: EntityId,
        kind: RelationKind,
        direction: Direction,
    ) -> Result<Vec<EntityId>, ModelError> {
        if self.get(id).is_none() {
            return Err(ModelError::UnknownEntity(id));
        }
        let mut seen = BTreeSet::new();
        Ok(self
            .relations_at(id, kind, direction)
            .filter_map(|r| match direction {
                Direction::Out => r.target(),
                Direction::In => Some(r.from),
            })
            .filter(|n| seen.insert(*n))
            .collect())
    }

    pub fn children(&self, id: EntityId) -> impl Iterator<Item = &Entity> + '_ {
        self.relations_at(id, RelationKind::Containment, Direction::Out)
            .filter_map(|r| r.target())
            .map(|c| self.entity(c))
    }

    pub fn ancestors(&self, id: EntityId) -> impl Iterator<Item = &Entity> + '_ {
        std::iter::successors(self.entity(id).parent.map(|p| self.entity(p)), |e| {
            e.parent.map(|p| self.entity(p))
        })
    }

    /// Nearest enclosing package, if any.
    pub fn package_of(&self, id: EntityId) -> Option<EntityId> {
        let e = self.entity(id);
        if e.kind == EntityKind::Package {
            return Some(id);
        }
        self.ancestors(id)
            .find(|a| a.kind == EntityKind::Package)
            .map(|a| a.id)
    }

    /// Nearest enclosing class (the entity itself for classes).
    pub fn class_of(&self, id: EntityId) -> Option<EntityId> {
        let e = self.entity(id);
        if e.kind == EntityKind::Class {
            return Some(id);
        }
        self.ancestors(id)
            .find(|a| a.kind == EntityKind::Class)
            .map(|a| a.id)
    }

    /// Outermost class enclosing `id`.
    pub fn top_level_class(&self, id: EntityId) -> Option<EntityId> {
        let mut current = self.class_of(id)?;
        while let Some(p) = self.entity(current).parent {
            if self.entity(p).kind != EntityKind::Class {
                break;
            }
            current = p;
        }
        Some(current)
    }

    pub fn methods_of(&self, class: EntityId) -> impl Iterator<Item = &Entity> + '_ {
        self.children(class).filter(|c| c.kind == EntityKind::Method)
    }

    pub fn attributes_of(&self, class: EntityId) -> impl Iterator<Item = &Entity> + '_ {
        self.children(class).filter(|c| c.kind == EntityKind::Attribute)
    }

    /// Direct superclasses and interfaces that resolved to in-model classes.
    pub fn supertypes(&self, class: EntityId) -> Vec<EntityId> {
        self.relations_at(class, RelationKind::Inheritance, Direction::Out)
            .filter_map(|r| r.target())
            .collect()
    }

    /// Full-model consistency check used by tests and after import.
    pub fn audit(&self) -> Result<(), AuditError> {
        for (i, r) in self.relations.iter().enumerate() {
            if self.get(r.from).is_none() {
                return Err(AuditError::DanglingRelation(i));
            }
            if let Target::Resolved(to) = r.to {
                if self.get(to).is_none() {
                    return Err(AuditError::DanglingRelation(i));
                }
            }
        }
        let depth_bound = self.entities.len();
        for e in &self.entities {
            let parent_kind = match e.parent {
                Some(p) => match self.get(p) {
                    Some(pe) => Some(pe.kind),
                    None => return Err(AuditError::BadParent(e.id)),
                },
                None => None,
            };
            if !parent_allowed(e.kind, parent_kind) {
                return Err(AuditError::BadParent(e.id));
            }
            let expected = match e.parent {
                Some(p) => format!("{}.{}", self.entity(p).qualified_name, e.simple_name),
                None => e.simple_name.clone(),
            };
            if expected != e.qualified_name {
                return Err(AuditError::QualifiedNameMismatch(e.id));
            }
            let mut steps = 0;
            let mut cur = e.parent;
            while let Some(p) = cur {
                steps += 1;
                if steps > depth_bound {
                    return Err(AuditError::ContainmentCycle(e.id));
                }
                cur = self.entity(p).parent;
            }
            if !self
                .names
                .get(&e.qualified_name)
                .is_some_and(|ids| ids.contains(&e.id))
            {
                return Err(AuditError::NameIndexMismatch(e.qualified_name.clone()));
            }
        }
        let indexed: usize = self.names.values().map(Vec::len).sum();
        if indexed != self.entities.len() {
            return Err(AuditError::NameIndexMismatch(String::new()));
        }
        for kind in RelationKind::ALL {
            let adj = &self.adjacency[kind.slot()];
            let mut outs: Vec<usize> = adj.out.values().flatten().copied().collect();
            let mut ins: Vec<usize> = adj.inc.values().flatten().copied().collect();
            outs.sort_unstable();
            ins.sort_unstable();
            let mut resolved: Vec<usize> = self.by_kind[kind.slot()]
                .iter()
                .copied()
                .filter(|&i| self.relations[i].is_resolved() && self.relations[i].kind == kind)
                .collect();
            resolved.sort_unstable();
            if outs != ins || outs != resolved {
                return Err(AuditError::AdjacencyMismatch(kind));
            }
        }
        Ok(())
    }
}

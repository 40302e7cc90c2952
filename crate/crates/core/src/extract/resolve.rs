//! Turns parsed compilation units into a fact model and resolves call
//! expressions against it.
//!
//! Resolution order for a call, highest confidence first:
//! 1. methods of the enclosing class hierarchy (`foo()`, `this.foo()`),
//! 2. methods of the declared type of a field, parameter or local,
//! 3. static calls through an explicit class name,
//! 4. a unique `name/arity` match anywhere in the model.
//!
//! Step 4 only applies when the receiver's type is unknown. A receiver
//! whose type is known but lies outside the model stays unresolved.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::model::{
    EntityId, EntityKind, EntitySpec, FactModel, Flag, ModelError, Relation, RelationKind,
    SourceLocation, Target,
};

use super::parser::{CallKind, CompilationUnit, MethodDecl, Param, Receiver, TypeDecl, TypeKind};

pub struct ParsedFile {
    pub path: String,
    pub unit: CompilationUnit,
    pub generated: bool,
}

struct ClassInfo {
    id: EntityId,
    file: usize,
    outer: Option<usize>,
    superclass: Option<String>,
    interfaces: Vec<String>,
    methods: Vec<(EntityId, MethodDecl)>,
}

/// Parsed sources plus the mapping from declarations to model entities.
/// Needed to (re-)run invocation resolution.
pub struct Program {
    files: Vec<ParsedFile>,
    classes: Vec<ClassInfo>,
}

const PRIMITIVE_TYPES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum TypeRes {
    Class(EntityId),
    External(String),
    Unknown,
}

struct Merger {
    model: FactModel,
    classes: Vec<ClassInfo>,
    errors: Vec<(String, String)>,
    anon_counters: HashMap<(EntityId, String), usize>,
}

impl Program {
    /// Builds entities and inheritance relations for every parsed file.
    /// Returns per-file problems (duplicate type names) alongside.
    pub fn merge(mut files: Vec<ParsedFile>) -> (Program, FactModel, Vec<(String, String)>) {
        let mut m = Merger {
            model: FactModel::new(),
            classes: Vec::new(),
            errors: Vec::new(),
            anon_counters: HashMap::new(),
        };
        for (fi, file) in files.iter_mut().enumerate() {
            let package = m.package_chain(file.unit.package.as_deref());
            let types = std::mem::take(&mut file.unit.types);
            for t in types {
                let name = t.name.clone();
                m.add_type(t, name, package, None, fi, &file.path, file.generated);
            }
        }
        let mut program = Program {
            files,
            classes: m.classes,
        };
        let mut model = m.model;
        program.link_types(&mut model);
        (program, model, m.errors)
    }

    fn link_types(&mut self, model: &mut FactModel) {
        for ci in 0..self.classes.len() {
            let info = &self.classes[ci];
            let supers: Vec<String> = info
                .superclass
                .iter()
                .chain(info.interfaces.iter())
                .cloned()
                .collect();
            let from = info.id;
            for s in supers {
                let to = match self.resolve_type(model, &s, ci) {
                    TypeRes::Class(id) if id != from => Target::Resolved(id),
                    TypeRes::Class(_) => continue,
                    TypeRes::External(name) => Target::Unresolved(name),
                    TypeRes::Unknown => Target::Unresolved(s),
                };
                model
                    .add_relation(Relation {
                        kind: RelationKind::Inheritance,
                        from,
                        to,
                        site: None,
                    })
                    .expect("class to class inheritance");
            }
            // qualify declared types of members
            let members: Vec<(EntityId, String)> = model
                .children(from)
                .filter(|c| matches!(c.kind, EntityKind::Method | EntityKind::Attribute))
                .filter_map(|c| c.declared_type.clone().map(|t| (c.id, t)))
                .collect();
            for (id, raw) in members {
                let qualified = match self.resolve_type(model, &raw, ci) {
                    TypeRes::Class(c) => model.entity(c).qualified_name.clone(),
                    TypeRes::External(name) => name,
                    TypeRes::Unknown => raw,
                };
                model.set_declared_type(id, Some(qualified));
            }
        }
    }

    fn unit(&self, ci: usize) -> &ParsedFile {
        &self.files[self.classes[ci].file]
    }

    fn resolve_type(&self, model: &FactModel, name: &str, ci: usize) -> TypeRes {
        if name.is_empty() || name == "var" {
            return TypeRes::Unknown;
        }
        if name.ends_with("[]") || PRIMITIVE_TYPES.contains(&name) {
            return TypeRes::External(name.to_string());
        }
        if let Some((first, rest)) = name.split_once('.') {
            if let Some(id) = model.resolve_kind(name, EntityKind::Class) {
                return TypeRes::Class(id);
            }
            if let TypeRes::Class(outer) = self.resolve_simple(model, first, ci) {
                let qn = format!("{}.{}", model.entity(outer).qualified_name, rest);
                if let Some(id) = model.resolve_kind(&qn, EntityKind::Class) {
                    return TypeRes::Class(id);
                }
            }
            return TypeRes::External(name.to_string());
        }
        self.resolve_simple(model, name, ci)
    }

    fn resolve_simple(&self, model: &FactModel, name: &str, ci: usize) -> TypeRes {
        let mut cur = Some(ci);
        while let Some(k) = cur {
            let class = model.entity(self.classes[k].id);
            if class.simple_name == name {
                return TypeRes::Class(class.id);
            }
            let nested = format!("{}.{}", class.qualified_name, name);
            if let Some(id) = model.resolve_kind(&nested, EntityKind::Class) {
                return TypeRes::Class(id);
            }
            cur = self.classes[k].outer;
        }
        let unit = &self.unit(ci).unit;
        let suffix = format!(".{name}");
        for imp in unit.imports.iter().filter(|i| !i.is_static && !i.wildcard) {
            if imp.path.ends_with(&suffix) {
                return match model.resolve_kind(&imp.path, EntityKind::Class) {
                    Some(id) => TypeRes::Class(id),
                    None => TypeRes::External(imp.path.clone()),
                };
            }
        }
        let same_package = match &unit.package {
            Some(p) => format!("{p}.{name}"),
            None => name.to_string(),
        };
        if let Some(id) = model.resolve_kind(&same_package, EntityKind::Class) {
            return TypeRes::Class(id);
        }
        for imp in unit.imports.iter().filter(|i| !i.is_static && i.wildcard) {
            if let Some(id) = model.resolve_kind(&format!("{}.{}", imp.path, name), EntityKind::Class) {
                return TypeRes::Class(id);
            }
        }
        TypeRes::External(name.to_string())
    }
}

impl Merger {
    fn package_chain(&mut self, package: Option<&str>) -> Option<EntityId> {
        let package = package?;
        let mut parent = None;
        let mut qn = String::new();
        for seg in package.split('.') {
            if !qn.is_empty() {
                qn.push('.');
            }
            qn.push_str(seg);
            parent = Some(match self.model.resolve_kind(&qn, EntityKind::Package) {
                Some(id) => id,
                None => self
                    .model
                    .add_entity(EntityKind::Package, seg, parent, EntitySpec::default())
                    .expect("package parents are packages"),
            });
        }
        parent
    }

    #[allow(clippy::too_many_arguments)]
    fn add_type(
        &mut self,
        mut t: TypeDecl,
        simple_name: String,
        parent: Option<EntityId>,
        outer: Option<usize>,
        fi: usize,
        path: &str,
        generated: bool,
    ) {
        let mut flags = Vec::new();
        if matches!(t.kind, TypeKind::Interface | TypeKind::Annotation) {
            flags.extend([Flag::IsInterface, Flag::IsAbstract]);
        } else if t.modifiers.is_abstract {
            flags.push(Flag::IsAbstract);
        }
        if t.modifiers.is_static {
            flags.push(Flag::IsStatic);
        }
        if t.modifiers.is_private {
            flags.push(Flag::IsPrivate);
        }
        if generated {
            flags.push(Flag::IsGenerated);
        }
        let mut spec = EntitySpec::flags(flags).at(SourceLocation::new(path, t.start_line, t.end_line));
        spec.annotations = std::mem::take(&mut t.annotations);
        let id = match self.model.add_entity(EntityKind::Class, &simple_name, parent, spec) {
            Ok(id) => id,
            Err(ModelError::DuplicateQualifiedName { name, .. }) => {
                self.errors
                    .push((path.to_string(), format!("duplicate type `{name}` ignored")));
                return;
            }
            Err(e) => panic!("class containment: {e}"),
        };
        let (superclass, interfaces) = match t.kind {
            TypeKind::Interface | TypeKind::Annotation => (None, std::mem::take(&mut t.implements)),
            _ => {
                let mut ext = std::mem::take(&mut t.extends).into_iter();
                (ext.next(), std::mem::take(&mut t.implements))
            }
        };
        let ci = self.classes.len();
        self.classes.push(ClassInfo {
            id,
            file: fi,
            outer,
            superclass,
            interfaces,
            methods: Vec::new(),
        });

        for f in &t.fields {
            let mut flags = Vec::new();
            if f.modifiers.is_static {
                flags.push(Flag::IsStatic);
            }
            if f.modifiers.is_private {
                flags.push(Flag::IsPrivate);
            }
            let spec = EntitySpec::flags(flags)
                .at(SourceLocation::new(path, f.line, f.line))
                .typed(f.ty.clone());
            if let Err(e) = self.model.add_entity(EntityKind::Attribute, &f.name, Some(id), spec) {
                self.errors.push((path.to_string(), e.to_string()));
            }
        }

        let is_interface = matches!(t.kind, TypeKind::Interface | TypeKind::Annotation);
        let mut has_ctor = false;
        let mut locals = Vec::new();
        for mut m in std::mem::take(&mut t.methods) {
            let base = if m.is_constructor { "<init>" } else { m.name.as_str() };
            let simple = format!("{}/{}", base, m.params.len());
            let mut flags = Vec::new();
            if m.is_constructor {
                has_ctor = true;
                flags.push(Flag::IsConstructor);
            }
            if m.modifiers.is_static {
                flags.push(Flag::IsStatic);
            }
            if m.modifiers.is_abstract || (is_interface && !m.has_body) {
                flags.push(Flag::IsAbstract);
            }
            if m.modifiers.is_private {
                flags.push(Flag::IsPrivate);
            }
            let mut spec = EntitySpec::flags(flags).at(SourceLocation::new(path, m.start_line, m.end_line));
            spec.declared_type = m.return_type.clone();
            spec.annotations = m.annotations.clone();
            let mid = match self.model.add_entity(EntityKind::Method, &simple, Some(id), spec) {
                Ok(mid) => mid,
                // same name and arity: calls of both bodies go to the first
                Err(ModelError::DuplicateQualifiedName { name, .. }) => self
                    .model
                    .resolve_kind(&name, EntityKind::Method)
                    .expect("duplicate implies present"),
                Err(e) => panic!("method containment: {e}"),
            };
            for lt in std::mem::take(&mut m.body.local_types) {
                locals.push((m.name.clone(), lt));
            }
            self.classes[ci].methods.push((mid, m));
        }
        if t.kind == TypeKind::Class && !t.local && !has_ctor {
            let spec = EntitySpec::flags([Flag::IsConstructor, Flag::IsGenerated])
                .at(SourceLocation::new(path, t.start_line, t.start_line));
            self.model
                .add_entity(EntityKind::Method, "<init>/0", Some(id), spec)
                .expect("fresh class has no constructor");
        }
        for nested in std::mem::take(&mut t.nested) {
            let name = nested.name.clone();
            self.add_type(nested, name, Some(id), Some(ci), fi, path, generated);
        }
        for (method, lt) in locals {
            let name = if lt.name.is_empty() {
                let counter = self.anon_counters.entry((id, method.clone())).or_insert(0);
                *counter += 1;
                format!("{method}$anon{counter}")
            } else {
                format!("{method}${}", lt.name)
            };
            self.add_type(lt, name, Some(id), Some(ci), fi, path, generated);
        }
    }
}

struct MethodScope<'a> {
    ci: usize,
    params: &'a [Param],
    locals: &'a [Param],
}

impl MethodScope<'_> {
    fn local_type(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .chain(self.locals.iter())
            .find(|p| p.name == name)
            .map(|p| p.ty.as_str())
    }
}

/// Clears and recomputes every invocation and attribute-access relation.
/// Running it twice yields the same model.
pub fn resolve_invocations(mut model: FactModel, program: &Program) -> FactModel {
    model.clear_relations(&[RelationKind::Invocation, RelationKind::AttributeAccess]);
    let mut by_signature: HashMap<String, Vec<EntityId>> = HashMap::new();
    for m in model.entities_of(EntityKind::Method) {
        if !m.has(Flag::IsConstructor) {
            by_signature.entry(m.simple_name.clone()).or_default().push(m.id);
        }
    }
    let external_supers: HashSet<EntityId> = model
        .relations_of(RelationKind::Inheritance)
        .filter(|r| !r.is_resolved())
        .map(|r| r.from)
        .collect();
    let mut pending = Vec::new();
    for ci in 0..program.classes.len() {
        for (mid, decl) in &program.classes[ci].methods {
            let scope = MethodScope {
                ci,
                params: &decl.params,
                locals: &decl.body.locals,
            };
            let r = Resolver {
                model: &model,
                program,
                by_signature: &by_signature,
                external_supers: &external_supers,
            };
            r.method(*mid, decl, &scope, &mut pending);
        }
    }
    for rel in pending {
        model.add_relation(rel).expect("resolver emits well-kinded relations");
    }
    model
}

struct Resolver<'a> {
    model: &'a FactModel,
    program: &'a Program,
    by_signature: &'a HashMap<String, Vec<EntityId>>,
    /// Classes with at least one supertype outside the model.
    external_supers: &'a HashSet<EntityId>,
}

impl Resolver<'_> {
    fn method(&self, mid: EntityId, decl: &MethodDecl, scope: &MethodScope<'_>, out: &mut Vec<Relation>) {
        let path = &self.program.unit(scope.ci).path;
        let class_id = self.program.classes[scope.ci].id;
        // result type of each call, for chained receivers
        let mut results: Vec<TypeRes> = Vec::with_capacity(decl.body.calls.len());
        for call in &decl.body.calls {
            let site = Some(SourceLocation::new(path.as_str(), call.line, call.line));
            let (target, result) = match call.kind {
                CallKind::New => {
                    let ty = self.program.resolve_type(self.model, &call.name, scope.ci);
                    let target = match &ty {
                        TypeRes::Class(c) if self.model.entity(*c).has(Flag::IsInterface) => None,
                        TypeRes::Class(c) => Some(self.constructor(*c, call.arity)),
                        TypeRes::External(name) => {
                            Some(Target::Unresolved(format!("{name}.<init>/{}", call.arity)))
                        }
                        TypeRes::Unknown => Some(Target::Unresolved(format!("{}.<init>/{}", call.name, call.arity))),
                    };
                    (target, ty)
                }
                CallKind::ThisCtor => (Some(self.constructor(class_id, call.arity)), TypeRes::Unknown),
                CallKind::SuperCtor => {
                    let sup = self.program.classes[scope.ci]
                        .superclass
                        .as_deref()
                        .map(|s| self.program.resolve_type(self.model, s, scope.ci));
                    let target = match sup {
                        Some(TypeRes::Class(c)) => self.constructor(c, call.arity),
                        Some(TypeRes::External(name)) => {
                            Target::Unresolved(format!("{name}.<init>/{}", call.arity))
                        }
                        _ => Target::Unresolved(format!("java.lang.Object.<init>/{}", call.arity)),
                    };
                    (Some(target), TypeRes::Unknown)
                }
                CallKind::Method => {
                    let sig = format!("{}/{}", call.name, call.arity);
                    let target = match &call.receiver {
                        Receiver::Implicit => self.implicit_call(scope, &call.name, &sig),
                        other => {
                            let ty = self.receiver_type(other, scope, &results);
                            self.call_on(&ty, &sig)
                        }
                    };
                    let result = match &target {
                        Target::Resolved(m) => self.declared_type_of(*m),
                        Target::Unresolved(_) => TypeRes::Unknown,
                    };
                    (Some(target), result)
                }
            };
            results.push(result);
            if let Some(to) = target {
                out.push(Relation {
                    kind: RelationKind::Invocation,
                    from: mid,
                    to,
                    site,
                });
            }
        }

        for name_use in &decl.body.name_uses {
            if !name_use.explicit_this && scope.local_type(&name_use.name).is_some() {
                continue;
            }
            let found = if name_use.explicit_this {
                self.field_in_hierarchy(class_id, &name_use.name)
            } else {
                self.field_in_scope(scope.ci, &name_use.name)
            };
            if let Some(attr) = found {
                out.push(Relation {
                    kind: RelationKind::AttributeAccess,
                    from: mid,
                    to: Target::Resolved(attr),
                    site: Some(SourceLocation::new(path.as_str(), name_use.line, name_use.line)),
                });
            }
        }
    }

    fn constructor(&self, class: EntityId, arity: usize) -> Target {
        let qn = format!("{}.<init>/{}", self.model.entity(class).qualified_name, arity);
        match self.model.resolve_kind(&qn, EntityKind::Method) {
            Some(m) => Target::Resolved(m),
            None => Target::Unresolved(qn),
        }
    }

    fn declared_type_of(&self, method: EntityId) -> TypeRes {
        match &self.model.entity(method).declared_type {
            Some(t) => match self.model.resolve_kind(t, EntityKind::Class) {
                Some(c) => TypeRes::Class(c),
                None => TypeRes::External(t.clone()),
            },
            None => TypeRes::Unknown,
        }
    }

    /// Breadth-first walk over a class and its in-model supertypes.
    fn hierarchy(&self, class: EntityId) -> (Vec<EntityId>, bool) {
        let mut seen = HashSet::new();
        let mut order = Vec::new();
        let mut external = false;
        let mut queue = VecDeque::from([class]);
        while let Some(c) = queue.pop_front() {
            if !seen.insert(c) {
                continue;
            }
            order.push(c);
            for r in self
                .model
                .relations_at(c, RelationKind::Inheritance, crate::model::Direction::Out)
            {
                queue.push_back(r.target().expect("adjacency holds resolved relations"));
            }
            external |= self.external_supers.contains(&c);
        }
        (order, external)
    }

    fn find_method(&self, class: EntityId, sig: &str) -> (Option<EntityId>, bool) {
        let (order, external) = self.hierarchy(class);
        let found = order.into_iter().find_map(|c| {
            self.model
                .methods_of(c)
                .find(|m| m.simple_name == sig)
                .map(|m| m.id)
        });
        (found, external)
    }

    fn field_in_hierarchy(&self, class: EntityId, name: &str) -> Option<EntityId> {
        self.hierarchy(class).0.into_iter().find_map(|c| {
            self.model
                .attributes_of(c)
                .find(|a| a.simple_name == name)
                .map(|a| a.id)
        })
    }

    fn field_in_scope(&self, ci: usize, name: &str) -> Option<EntityId> {
        let mut cur = Some(ci);
        while let Some(k) = cur {
            if let Some(f) = self.field_in_hierarchy(self.program.classes[k].id, name) {
                return Some(f);
            }
            cur = self.program.classes[k].outer;
        }
        None
    }

    fn unique(&self, sig: &str) -> Target {
        match self.by_signature.get(sig).map(Vec::as_slice) {
            Some([only]) => Target::Resolved(*only),
            _ => Target::Unresolved(sig.to_string()),
        }
    }

    fn implicit_call(&self, scope: &MethodScope<'_>, name: &str, sig: &str) -> Target {
        let mut any_external = false;
        let mut cur = Some(scope.ci);
        while let Some(k) = cur {
            let (found, external) = self.find_method(self.program.classes[k].id, sig);
            if let Some(m) = found {
                return Target::Resolved(m);
            }
            any_external |= external;
            cur = self.program.classes[k].outer;
        }
        let unit = &self.program.unit(scope.ci).unit;
        for imp in unit.imports.iter().filter(|i| i.is_static) {
            let owner = if imp.wildcard {
                imp.path.as_str()
            } else if let Some(owner) = imp.path.strip_suffix(&format!(".{name}")) {
                owner
            } else {
                continue;
            };
            match self.model.resolve_kind(owner, EntityKind::Class) {
                Some(c) => {
                    if let (Some(m), _) = self.find_method(c, sig) {
                        return Target::Resolved(m);
                    }
                }
                None if !imp.wildcard => return Target::Unresolved(format!("{owner}.{sig}")),
                None => {}
            }
        }
        if any_external {
            Target::Unresolved(sig.to_string())
        } else {
            self.unique(sig)
        }
    }

    fn field_type(&self, attr: EntityId) -> TypeRes {
        match &self.model.entity(attr).declared_type {
            Some(t) => match self.model.resolve_kind(t, EntityKind::Class) {
                Some(c) => TypeRes::Class(c),
                None => TypeRes::External(t.clone()),
            },
            None => TypeRes::Unknown,
        }
    }

    fn receiver_type(&self, receiver: &Receiver, scope: &MethodScope<'_>, results: &[TypeRes]) -> TypeRes {
        let class_id = self.program.classes[scope.ci].id;
        match receiver {
            Receiver::Implicit | Receiver::This => TypeRes::Class(class_id),
            Receiver::Super => match self.program.classes[scope.ci].superclass.as_deref() {
                Some(s) => self.program.resolve_type(self.model, s, scope.ci),
                None => TypeRes::External("java.lang.Object".into()),
            },
            Receiver::Call(idx) => results.get(*idx).cloned().unwrap_or(TypeRes::Unknown),
            Receiver::Typed(t) => self.program.resolve_type(self.model, t, scope.ci),
            Receiver::Unknown => TypeRes::Unknown,
            Receiver::Path(segs) => {
                let (mut ty, consumed) = if segs[0] == "this" {
                    (TypeRes::Class(class_id), 1)
                } else if let Some(t) = scope.local_type(&segs[0]) {
                    (self.program.resolve_type(self.model, t, scope.ci), 1)
                } else if let Some(f) = self.field_in_scope(scope.ci, &segs[0]) {
                    (self.field_type(f), 1)
                } else {
                    // longest prefix naming an in-model type
                    let prefix = (1..=segs.len()).rev().find_map(|len| {
                        match self.program.resolve_type(self.model, &segs[..len].join("."), scope.ci) {
                            TypeRes::Class(c) => Some((TypeRes::Class(c), len)),
                            _ => None,
                        }
                    });
                    match prefix {
                        Some(p) => p,
                        None if segs[0].starts_with(|c: char| c.is_ascii_uppercase()) => {
                            let ty = self.program.resolve_type(self.model, &segs[0], scope.ci);
                            let name = match ty {
                                TypeRes::External(n) => n,
                                _ => segs[0].clone(),
                            };
                            let mut full = vec![name];
                            full.extend(segs[1..].iter().cloned());
                            (TypeRes::External(full.join(".")), segs.len())
                        }
                        None => (TypeRes::Unknown, segs.len()),
                    }
                };
                for seg in &segs[consumed..] {
                    ty = match ty {
                        TypeRes::Class(c) => match self.field_in_hierarchy(c, seg) {
                            Some(f) => self.field_type(f),
                            None => TypeRes::Unknown,
                        },
                        TypeRes::External(name) => TypeRes::External(format!("{name}.{seg}")),
                        TypeRes::Unknown => TypeRes::Unknown,
                    };
                }
                ty
            }
        }
    }

    fn call_on(&self, ty: &TypeRes, sig: &str) -> Target {
        match ty {
            TypeRes::Class(c) => match self.find_method(*c, sig) {
                (Some(m), _) => Target::Resolved(m),
                (None, _) => Target::Unresolved(format!("{}.{}", self.model.entity(*c).qualified_name, sig)),
            },
            TypeRes::External(name) => Target::Unresolved(format!("{name}.{sig}")),
            TypeRes::Unknown => self.unique(sig),
        }
    }
}

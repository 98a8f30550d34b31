//! Schemas: entities, foreign keys, attributes and constraints over the fixed
//! typeside, plus the well-formedness check every other module relies on.

use std::collections::BTreeSet;
use std::fmt;

use crate::constraint::Constraint;
use crate::typeside::BaseType;

/// A foreign key `name : source -> target` between entities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForeignKey {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// An attribute `name : source -> ty` from an entity into a base type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub source: String,
    pub ty: BaseType,
}

/// The sort of a term: an entity or a base type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Entity(String),
    Base(BaseType),
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Entity(e) => f.write_str(e),
            Sort::Base(t) => write!(f, "{t}"),
        }
    }
}

/// A member of an entity's namespace.
#[derive(Clone, Copy, Debug)]
pub enum Member<'a> {
    ForeignKey(&'a ForeignKey),
    Attribute(&'a Attribute),
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Schema {
    pub name: String,
    pub entities: Vec<String>,
    pub foreign_keys: Vec<ForeignKey>,
    pub attributes: Vec<Attribute>,
    pub constraints: Vec<Constraint>,
}

impl Schema {
    pub fn new(name: impl Into<String>) -> Self {
        Schema {
            name: name.into(),
            ..Schema::default()
        }
    }

    pub fn has_entity(&self, entity: &str) -> bool {
        self.entities.iter().any(|e| e == entity)
    }

    pub fn entity_index(&self, entity: &str) -> Option<usize> {
        self.entities.iter().position(|e| e == entity)
    }

    pub fn fk_index(&self, entity: &str, name: &str) -> Option<usize> {
        self.foreign_keys
            .iter()
            .position(|f| f.source == entity && f.name == name)
    }

    pub fn attr_index(&self, entity: &str, name: &str) -> Option<usize> {
        self.attributes
            .iter()
            .position(|a| a.source == entity && a.name == name)
    }

    pub fn foreign_key(&self, entity: &str, name: &str) -> Option<&ForeignKey> {
        self.fk_index(entity, name).map(|i| &self.foreign_keys[i])
    }

    pub fn attribute(&self, entity: &str, name: &str) -> Option<&Attribute> {
        self.attr_index(entity, name).map(|i| &self.attributes[i])
    }

    /// Looks a name up in the entity's shared foreign-key/attribute namespace.
    pub fn member(&self, entity: &str, name: &str) -> Option<Member<'_>> {
        if let Some(fk) = self.foreign_key(entity, name) {
            return Some(Member::ForeignKey(fk));
        }
        self.attribute(entity, name).map(Member::Attribute)
    }

    pub fn fks_of<'a>(&'a self, entity: &'a str) -> impl Iterator<Item = (usize, &'a ForeignKey)> {
        self.foreign_keys
            .iter()
            .enumerate()
            .filter(move |(_, f)| f.source == entity)
    }

    pub fn attrs_of<'a>(&'a self, entity: &'a str) -> impl Iterator<Item = (usize, &'a Attribute)> {
        self.attributes
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.source == entity)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    DuplicateEntity,
    DuplicateMember,
    UnknownSource,
    UnknownTarget,
    IllTypedConstraint,
}

/// One broken schema invariant, naming the offending declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub name: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, name: &str, message: String) {
        self.violations.push(Violation {
            kind,
            name: name.to_string(),
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{}", v.message)?;
        }
        Ok(())
    }
}

/// Checks every schema invariant; an empty report means the schema is valid.
pub fn validate_schema(s: &Schema) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen = BTreeSet::new();
    for e in &s.entities {
        if !seen.insert(e.as_str()) {
            report.push(
                ViolationKind::DuplicateEntity,
                e,
                format!("entity `{e}` is declared more than once"),
            );
        }
    }

    let mut members = BTreeSet::new();
    let fk_names = s.foreign_keys.iter().map(|f| (&f.source, &f.name));
    let attr_names = s.attributes.iter().map(|a| (&a.source, &a.name));
    for (source, name) in fk_names.chain(attr_names) {
        if !members.insert((source.as_str(), name.as_str())) {
            report.push(
                ViolationKind::DuplicateMember,
                name,
                format!("`{name}` is declared more than once on entity `{source}`"),
            );
        }
    }

    for fk in &s.foreign_keys {
        if !s.has_entity(&fk.source) {
            report.push(
                ViolationKind::UnknownSource,
                &fk.source,
                format!("foreign key `{}` starts at undeclared entity `{}`", fk.name, fk.source),
            );
        }
        if !s.has_entity(&fk.target) {
            report.push(
                ViolationKind::UnknownTarget,
                &fk.target,
                format!("foreign key `{}` targets undeclared entity `{}`", fk.name, fk.target),
            );
        }
    }
    for attr in &s.attributes {
        if !s.has_entity(&attr.source) {
            report.push(
                ViolationKind::UnknownSource,
                &attr.source,
                format!(
                    "attribute `{}` starts at undeclared entity `{}`",
                    attr.name, attr.source
                ),
            );
        }
    }

    // Constraints are only meaningful once the signature itself is sound.
    if report.is_empty() {
        for c in &s.constraints {
            for problem in c.check(s) {
                report.push(
                    ViolationKind::IllTypedConstraint,
                    &c.label,
                    format!("constraint `{}`: {problem}", c.label),
                );
            }
        }
    }
    report
}

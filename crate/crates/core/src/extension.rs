//! Theory extensions: included schemas glued along entity identifications,
//! plus bridging constraints over the combined signature.

use std::fmt;

use crate::constraint::Constraint;
use crate::schema::Schema;

/// `schema.entity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QualifiedEntity {
    pub schema: String,
    pub entity: String,
}

impl QualifiedEntity {
    pub fn new(schema: impl Into<String>, entity: impl Into<String>) -> QualifiedEntity {
        QualifiedEntity {
            schema: schema.into(),
            entity: entity.into(),
        }
    }
}

impl fmt::Display for QualifiedEntity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.schema, self.entity)
    }
}

/// `left ≅ right`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Identification {
    pub left: QualifiedEntity,
    pub right: QualifiedEntity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionSpec {
    pub name: String,
    pub includes: Vec<Schema>,
    pub identifications: Vec<Identification>,
    /// Bridging constraints, stated over the combined schema's names.
    pub constraints: Vec<Constraint>,
}

impl ExtensionSpec {
    pub fn new(name: impl Into<String>, includes: Vec<Schema>) -> ExtensionSpec {
        ExtensionSpec {
            name: name.into(),
            includes,
            identifications: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn identify(mut self, left: (&str, &str), right: (&str, &str)) -> ExtensionSpec {
        self.identifications.push(Identification {
            left: QualifiedEntity::new(left.0, left.1),
            right: QualifiedEntity::new(right.0, right.1),
        });
        self
    }

    pub fn include(&self, schema: &str) -> Option<&Schema> {
        self.includes.iter().find(|s| s.name == schema)
    }

    /// Identifications mentioning both schemas, in either direction.
    pub fn identifications_between(&self, a: &str, b: &str) -> Vec<&Identification> {
        self.identifications
            .iter()
            .filter(|i| {
                (i.left.schema == a && i.right.schema == b) || (i.left.schema == b && i.right.schema == a)
            })
            .collect()
    }
}

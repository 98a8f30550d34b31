//! Paths of unary functions: a chain of foreign keys optionally ending in an
//! attribute, written `x.f.g.attr` in the DSL.

use std::fmt;

use thiserror::Error;

use crate::schema::{Member, Schema, Sort};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub root: String,
    pub fks: Vec<String>,
    pub attr: Option<String>,
    /// Codomain, fixed when the path is resolved against a schema.
    pub target: Sort,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("entity `{entity}` has no foreign key or attribute `{name}`")]
    UnknownMember { entity: String, name: String },
    #[error("`{name}` follows attribute `{attr}`, which has a base-type value")]
    StepAfterAttribute { attr: String, name: String },
    #[error("cannot compose: left path ends at `{left}` but right path starts at `{right}`")]
    TypeMismatch { left: String, right: String },
}

impl Path {
    pub fn identity(entity: impl Into<String>) -> Path {
        let root = entity.into();
        Path {
            target: Sort::Entity(root.clone()),
            root,
            fks: Vec::new(),
            attr: None,
        }
    }

    /// Resolves a sequence of member names starting at `root`.
    pub fn resolve<S: AsRef<str>>(schema: &Schema, root: &str, names: &[S]) -> Result<Path, PathError> {
        if !schema.has_entity(root) {
            return Err(PathError::UnknownEntity(root.to_string()));
        }
        let mut path = Path::identity(root);
        for name in names {
            path = path.step(schema, name.as_ref())?;
        }
        Ok(path)
    }

    /// Extends the path by one member name.
    pub fn step(mut self, schema: &Schema, name: &str) -> Result<Path, PathError> {
        let entity = match (&self.target, &self.attr) {
            (Sort::Entity(e), None) => e.clone(),
            (_, attr) => {
                return Err(PathError::StepAfterAttribute {
                    attr: attr.clone().unwrap_or_default(),
                    name: name.to_string(),
                })
            }
        };
        match schema.member(&entity, name) {
            Some(Member::ForeignKey(fk)) => {
                self.fks.push(fk.name.clone());
                self.target = Sort::Entity(fk.target.clone());
            }
            Some(Member::Attribute(a)) => {
                self.attr = Some(a.name.clone());
                self.target = Sort::Base(a.ty);
            }
            None => {
                return Err(PathError::UnknownMember {
                    entity,
                    name: name.to_string(),
                })
            }
        }
        Ok(self)
    }

    pub fn is_identity(&self) -> bool {
        self.fks.is_empty() && self.attr.is_none()
    }

    /// Member names in order, attribute last.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.fks.iter().map(String::as_str).chain(self.attr.as_deref())
    }

    pub fn len(&self) -> usize {
        self.fks.len() + usize::from(self.attr.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The path without its final step; `None` for an identity path.
    pub fn parent(&self, schema: &Schema) -> Option<Path> {
        let names: Vec<&str> = self.names().collect();
        let (_, init) = names.split_last()?;
        Path::resolve(schema, &self.root, init).ok()
    }
}

/// Concatenates `p` then `q`. `p` must end at the entity where `q` starts.
pub fn compose_paths(p: &Path, q: &Path) -> Result<Path, PathError> {
    match (&p.target, &p.attr) {
        (Sort::Entity(e), None) if *e == q.root => Ok(Path {
            root: p.root.clone(),
            fks: p.fks.iter().chain(&q.fks).cloned().collect(),
            attr: q.attr.clone(),
            target: q.target.clone(),
        }),
        (target, _) => Err(PathError::TypeMismatch {
            left: target.to_string(),
            right: q.root.clone(),
        }),
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root)?;
        for n in self.names() {
            write!(f, ".{n}")?;
        }
        Ok(())
    }
}

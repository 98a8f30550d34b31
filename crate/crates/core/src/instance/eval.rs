use crate::constraint::Term;
use crate::path::Path;
use crate::schema::Schema;
use crate::typeside::{Function, Value};

use super::{AttrValue, Elem, Instance, InstanceError};

/// A path with names resolved to schema indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledPath {
    pub root: usize,
    pub fks: Vec<usize>,
    pub attr: Option<usize>,
}

impl CompiledPath {
    pub fn compile(schema: &Schema, p: &Path) -> Result<CompiledPath, InstanceError> {
        let root = schema
            .entity_index(&p.root)
            .ok_or_else(|| InstanceError::UnknownEntity(p.root.clone()))?;
        let mut entity = p.root.as_str();
        let mut fks = Vec::with_capacity(p.fks.len());
        for name in &p.fks {
            let i = schema
                .fk_index(entity, name)
                .ok_or_else(|| InstanceError::UnknownMember {
                    entity: entity.to_string(),
                    name: name.clone(),
                })?;
            fks.push(i);
            entity = &schema.foreign_keys[i].target;
        }
        let attr = match &p.attr {
            Some(name) => Some(schema.attr_index(entity, name).ok_or_else(|| {
                InstanceError::UnknownMember {
                    entity: entity.to_string(),
                    name: name.clone(),
                }
            })?),
            None => None,
        };
        Ok(CompiledPath { root, fks, attr })
    }
}

/// Result of following a path from an element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PathValue {
    Element(Elem),
    Value(AttrValue),
    /// Some foreign key along the way has no value yet.
    Undefined,
}

/// Follows `p` from `e` through canonical representatives.
pub fn eval_path(i: &Instance, e: Elem, p: &Path) -> Result<PathValue, InstanceError> {
    let compiled = CompiledPath::compile(i.schema(), p)?;
    if i.entity_index_of(e) != compiled.root {
        return Err(InstanceError::TypeMismatch {
            member: p.to_string(),
            expected: p.root.clone(),
            found: i.entity_of(e).to_string(),
        });
    }
    Ok(i.follow(e, &compiled))
}

/// Where following a path stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Walk {
    Done(PathValue),
    /// `fks[step]` is unset on `at`.
    Stuck { at: Elem, step: usize },
}

impl Instance {
    pub(crate) fn follow(&self, e: Elem, p: &CompiledPath) -> PathValue {
        match self.walk(e, p) {
            Walk::Done(v) => v,
            Walk::Stuck { .. } => PathValue::Undefined,
        }
    }

    pub(crate) fn walk(&self, e: Elem, p: &CompiledPath) -> Walk {
        let mut cur = self.find(e);
        for (step, &fk) in p.fks.iter().enumerate() {
            match self.fk_value(cur, fk) {
                Some(next) => cur = next,
                None => return Walk::Stuck { at: cur, step },
            }
        }
        Walk::Done(match p.attr {
            Some(a) => PathValue::Value(self.attr_value(cur, a)),
            None => PathValue::Element(cur),
        })
    }
}

/// A term with variables resolved to environment slots.
#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Path { slot: usize, path: CompiledPath },
    Lit(Value),
    App { func: Function, args: Vec<CTerm> },
}

impl CTerm {
    pub(crate) fn compile(
        schema: &Schema,
        slots: &dyn Fn(&str) -> Option<usize>,
        t: &Term,
    ) -> Result<CTerm, InstanceError> {
        Ok(match t {
            Term::Path { var, path } => CTerm::Path {
                slot: slots(var).ok_or_else(|| InstanceError::UnknownElement(var.clone()))?,
                path: CompiledPath::compile(schema, path)?,
            },
            Term::Lit(v) => CTerm::Lit(v.clone()),
            Term::App { func, args } => CTerm::App {
                func: *func,
                args: args
                    .iter()
                    .map(|a| CTerm::compile(schema, slots, a))
                    .collect::<Result<_, _>>()?,
            },
        })
    }

    pub(crate) fn max_slot(&self) -> Option<usize> {
        match self {
            CTerm::Path { slot, .. } => Some(*slot),
            CTerm::Lit(_) => None,
            CTerm::App { args, .. } => args.iter().filter_map(CTerm::max_slot).max(),
        }
    }

    pub(crate) fn uses_slot(&self, s: usize) -> bool {
        match self {
            CTerm::Path { slot, .. } => *slot == s,
            CTerm::Lit(_) => false,
            CTerm::App { args, .. } => args.iter().any(|a| a.uses_slot(s)),
        }
    }

    /// The slot when the term is a bare variable.
    pub(crate) fn bare_slot(&self) -> Option<usize> {
        match self {
            CTerm::Path { slot, path } if path.fks.is_empty() && path.attr.is_none() => Some(*slot),
            _ => None,
        }
    }
}

/// Value of a term under an environment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermValue {
    Elem(Elem),
    Val(AttrValue),
    Undefined,
}

impl TermValue {
    pub fn constant(&self) -> Option<&Value> {
        match self {
            TermValue::Val(AttrValue::Const(c)) => Some(c),
            _ => None,
        }
    }
}

impl Instance {
    pub(crate) fn eval_term(&self, env: &[Option<Elem>], t: &CTerm) -> TermValue {
        match t {
            CTerm::Path { slot, path } => match env.get(*slot).copied().flatten() {
                Some(e) => match self.follow(e, path) {
                    PathValue::Element(x) => TermValue::Elem(x),
                    PathValue::Value(v) => TermValue::Val(v),
                    PathValue::Undefined => TermValue::Undefined,
                },
                None => TermValue::Undefined,
            },
            CTerm::Lit(v) => TermValue::Val(AttrValue::Const(v.clone())),
            CTerm::App { func, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match self.eval_term(env, a) {
                        TermValue::Val(AttrValue::Const(c)) => vals.push(c),
                        _ => return TermValue::Undefined,
                    }
                }
                match func.apply(&vals) {
                    Some(v) => TermValue::Val(AttrValue::Const(v)),
                    None => TermValue::Undefined,
                }
            }
        }
    }
}

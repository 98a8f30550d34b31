use std::fmt;

use thiserror::Error;

use crate::instance::{parse_fresh_label, Instance, InstanceError};
use crate::typeside::Value;

/// An attribute cell `element.attr` of some entity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub entity: String,
    pub element: String,
    pub attr: String,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.element, self.attr)
    }
}

/// One change made by the chase. Elements are named by their display name
/// at the time of the change.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Merged {
        entity: String,
        left: String,
        right: String,
    },
    Created {
        entity: String,
        label: String,
    },
    SetFk {
        entity: String,
        element: String,
        fk: String,
        target: String,
    },
    Assigned {
        cell: Cell,
        value: Value,
    },
    Unified {
        left: Cell,
        right: Cell,
    },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Merged { entity, left, right } => write!(f, "merged {entity} {left} = {right}"),
            Action::Created { entity, label } => write!(f, "created {entity} {label}"),
            Action::SetFk {
                element, fk, target, ..
            } => write!(f, "set {element}.{fk} = {target}"),
            Action::Assigned { cell, value } => write!(f, "assigned {cell} = {value}"),
            Action::Unified { left, right } => write!(f, "unified {left} = {right}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: u32,
    pub constraint: String,
    /// Universal variables and the elements they were bound to.
    pub assignment: Vec<(String, String)>,
    pub action: Action,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "round {}: {} @ ", self.round, self.constraint)?;
        let parts: Vec<String> = self.assignment.iter().map(|(v, e)| format!("{v}={e}")).collect();
        write!(f, "{} -> {}", parts.join(", "), self.action)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChaseTrace {
    pub entries: Vec<TraceEntry>,
    /// Rounds run, including the final quiet one.
    pub rounds: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("trace entry {index} names unknown element `{name}` of `{entity}`")]
    UnknownElement {
        index: usize,
        entity: String,
        name: String,
    },
    #[error("trace entry {index}: {source}")]
    Instance {
        index: usize,
        #[source]
        source: InstanceError,
    },
}

impl ChaseTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One line per entry.
    pub fn to_log(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    /// Elements created by the chase, as `(entity, label)`.
    pub fn created(&self) -> Vec<(&str, &str)> {
        self.entries
            .iter()
            .filter_map(|e| match &e.action {
                Action::Created { entity, label } => Some((entity.as_str(), label.as_str())),
                _ => None,
            })
            .collect()
    }

    /// Re-applies every action to a copy of `pre`.
    pub fn replay(&self, pre: &Instance) -> Result<Instance, ReplayError> {
        let mut inst = pre.clone();
        for (index, entry) in self.entries.iter().enumerate() {
            let find = |inst: &Instance, entity: &str, name: &str| {
                inst.lookup(entity, name)
                    .ok_or_else(|| ReplayError::UnknownElement {
                        index,
                        entity: entity.to_string(),
                        name: name.to_string(),
                    })
            };
            let wrap = |source| ReplayError::Instance { index, source };
            match &entry.action {
                Action::Merged { entity, left, right } => {
                    let (a, b) = (find(&inst, entity, left)?, find(&inst, entity, right)?);
                    inst.merge(a, b).map_err(wrap)?;
                }
                Action::Created { entity, label } => {
                    let (_, round, counter) = parse_fresh_label(label).ok_or_else(|| ReplayError::UnknownElement {
                        index,
                        entity: entity.clone(),
                        name: label.clone(),
                    })?;
                    inst.add_fresh(entity, round, counter).map_err(wrap)?;
                }
                Action::SetFk {
                    entity,
                    element,
                    fk,
                    target,
                } => {
                    let e = find(&inst, entity, element)?;
                    let t_entity = inst
                        .schema()
                        .foreign_key(entity, fk)
                        .map(|f| f.target.clone())
                        .unwrap_or_default();
                    let t = find(&inst, &t_entity, target)?;
                    inst.set_fk(e, fk, t).map_err(wrap)?;
                }
                Action::Assigned { cell, value } => {
                    let e = find(&inst, &cell.entity, &cell.element)?;
                    inst.set_attr(e, &cell.attr, Some(value.clone())).map_err(wrap)?;
                }
                Action::Unified { left, right } => {
                    let a = find(&inst, &left.entity, &left.element)?;
                    let b = find(&inst, &right.entity, &right.element)?;
                    let va = inst.attr(a, &left.attr).map_err(wrap)?;
                    let vb = inst.attr(b, &right.attr).map_err(wrap)?;
                    inst.unify(&va, &vb, &left.attr)
                        .map_err(|c| wrap(InstanceError::Clash(c)))?;
                }
            }
        }
        Ok(inst)
    }
}

impl fmt::Display for ChaseTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_log())
    }
}

//! Instances: elements per entity with foreign-key and attribute valuations
//! over constants and labelled nulls, kept modulo a congruence.
//!
//! Elements live in a union-find. Foreign-key and attribute valuations are
//! stored on class representatives and merged eagerly, so a merge of `a` and
//! `b` also merges `f(a)` and `f(b)` for every foreign key `f` valued on both.
//! Attribute cells hold labelled nulls; a second union-find over null labels
//! records which nulls are equal and which constant, if any, anchors a class.

mod check;
pub(crate) mod eval;
pub mod export;
pub mod matching;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::schema::Schema;
use crate::typeside::{BaseType, Value};

pub use check::{check_model, SatisfactionReport, Violated};
pub use eval::{eval_path, CompiledPath, PathValue, TermValue};

/// Handle of an element inside one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub(crate) u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Label of an attribute-level labelled null.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NullId(pub(crate) u32);

impl NullId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NullId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?n{}", self.0)
    }
}

/// Where a row of a combined instance came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Source {
    pub schema: String,
    pub id: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    /// A row declared in data, possibly inherited from a source instance.
    User { id: String, source: Option<Source> },
    /// An element invented by the chase.
    Fresh {
        entity: String,
        round: u32,
        counter: u32,
    },
}

/// Ordering key of an element class: user ids first, then fresh labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElemKey {
    User(String),
    Fresh {
        round: u32,
        counter: u32,
        entity: String,
    },
}

impl fmt::Display for ElemKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElemKey::User(id) => f.write_str(id),
            ElemKey::Fresh {
                round,
                counter,
                entity,
            } => write!(f, "{entity}!{round}.{counter}"),
        }
    }
}

impl Origin {
    pub fn key(&self) -> ElemKey {
        match self {
            Origin::User { id, .. } => ElemKey::User(id.clone()),
            Origin::Fresh {
                entity,
                round,
                counter,
            } => ElemKey::Fresh {
                round: *round,
                counter: *counter,
                entity: entity.clone(),
            },
        }
    }
}

/// An attribute value: a constant or a labelled null.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrValue {
    Const(Value),
    Null(NullId),
}

impl AttrValue {
    pub fn as_const(&self) -> Option<&Value> {
        match self {
            AttrValue::Const(v) => Some(v),
            AttrValue::Null(_) => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, AttrValue::Null(_))
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Const(v) => write!(f, "{v}"),
            AttrValue::Null(n) => write!(f, "{n}"),
        }
    }
}

/// Two distinct constants were forced equal.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("constant clash on `{attribute}`: {left} <> {right}")]
pub struct ConstantClash {
    pub attribute: String,
    pub left: Value,
    pub right: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("entity `{entity}` has no member `{name}`")]
    UnknownMember { entity: String, name: String },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("row `{id}` is declared twice in `{entity}`")]
    DuplicateElement { entity: String, id: String },
    #[error("`{member}` expects {expected} but got {found}")]
    TypeMismatch {
        member: String,
        expected: String,
        found: String,
    },
    #[error("`{member}` of `{element}` is already set to {existing}")]
    ConflictingAssignment {
        element: String,
        member: String,
        existing: String,
    },
    #[error("cannot merge `{left}` ({left_entity}) with `{right}` ({right_entity})")]
    EntityMismatch {
        left: String,
        left_entity: String,
        right: String,
        right_entity: String,
    },
    #[error(transparent)]
    Clash(#[from] ConstantClash),
}

/// Per-schema index tables.
#[derive(Debug)]
pub(crate) struct Layout {
    pub(crate) entity_fks: Vec<Vec<usize>>,
    pub(crate) entity_attrs: Vec<Vec<usize>>,
    pub(crate) fk_slot: Vec<usize>,
    pub(crate) attr_slot: Vec<usize>,
    pub(crate) fk_target: Vec<usize>,
}

impl Layout {
    fn new(s: &Schema) -> Layout {
        let n = s.entities.len();
        let idx = |e: &str| s.entity_index(e).unwrap_or(0);
        let mut entity_fks = vec![Vec::new(); n];
        let mut entity_attrs = vec![Vec::new(); n];
        let mut fk_slot = Vec::new();
        let mut attr_slot = Vec::new();
        for (i, fk) in s.foreign_keys.iter().enumerate() {
            let e = idx(&fk.source);
            fk_slot.push(entity_fks[e].len());
            entity_fks[e].push(i);
        }
        for (i, a) in s.attributes.iter().enumerate() {
            let e = idx(&a.source);
            attr_slot.push(entity_attrs[e].len());
            entity_attrs[e].push(i);
        }
        Layout {
            entity_fks,
            entity_attrs,
            fk_slot,
            attr_slot,
            fk_target: s.foreign_keys.iter().map(|f| idx(&f.target)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
struct ElementData {
    entity: usize,
    origin: Origin,
    fks: Vec<Option<Elem>>,
    attrs: Vec<AttrValue>,
}

#[derive(Clone, Debug, Default)]
struct NullStore {
    parent: Vec<u32>,
    anchor: Vec<Option<Value>>,
}

impl NullStore {
    fn fresh(&mut self) -> NullId {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.anchor.push(None);
        NullId(id)
    }

    fn find(&self, mut n: NullId) -> NullId {
        while self.parent[n.index()] != n.0 {
            n = NullId(self.parent[n.index()]);
        }
        n
    }
}

/// What a merge did.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeReport {
    /// Pairs of previously distinct classes that were unified, in order.
    pub merged: Vec<(Elem, Elem)>,
    /// Null classes unified with another null class or anchored to a constant.
    pub nulls_resolved: usize,
}

impl MergeReport {
    pub fn is_noop(&self) -> bool {
        self.merged.is_empty() && self.nulls_resolved == 0
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    name: String,
    schema: Arc<Schema>,
    layout: Arc<Layout>,
    elements: Vec<ElementData>,
    parent: Vec<u32>,
    size: Vec<u32>,
    class_key: Vec<ElemKey>,
    class_members: Vec<Vec<Elem>>,
    by_entity: Vec<Vec<Elem>>,
    user_ids: BTreeMap<(usize, String), Elem>,
    fresh_ids: BTreeMap<(usize, u32, u32), Elem>,
    nulls: NullStore,
}

/// Splits a fresh label `Entity!round.counter`.
pub fn parse_fresh_label(label: &str) -> Option<(&str, u32, u32)> {
    let (entity, rest) = label.rsplit_once('!')?;
    let (round, counter) = rest.split_once('.')?;
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if entity.is_empty() || !digits(round) || !digits(counter) {
        return None;
    }
    Some((entity, round.parse().ok()?, counter.parse().ok()?))
}

/// An empty instance over `s`.
pub fn new_instance(s: &Schema) -> Instance {
    Instance::new(Arc::new(s.clone()))
}

impl Instance {
    pub fn new(schema: Arc<Schema>) -> Instance {
        let layout = Arc::new(Layout::new(&schema));
        Instance {
            name: String::new(),
            by_entity: vec![Vec::new(); schema.entities.len()],
            schema,
            layout,
            elements: Vec::new(),
            parent: Vec::new(),
            size: Vec::new(),
            class_key: Vec::new(),
            class_members: Vec::new(),
            user_ids: BTreeMap::new(),
            fresh_ids: BTreeMap::new(),
            nulls: NullStore::default(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Instance {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    fn entity_idx(&self, entity: &str) -> Result<usize, InstanceError> {
        self.schema
            .entity_index(entity)
            .ok_or_else(|| InstanceError::UnknownEntity(entity.to_string()))
    }

    fn push_element(&mut self, entity: usize, origin: Origin) -> Elem {
        let e = Elem(self.elements.len() as u32);
        let attrs = (0..self.layout.entity_attrs[entity].len())
            .map(|_| AttrValue::Null(self.nulls.fresh()))
            .collect();
        self.class_key.push(origin.key());
        self.elements.push(ElementData {
            entity,
            origin,
            fks: vec![None; self.layout.entity_fks[entity].len()],
            attrs,
        });
        self.parent.push(e.0);
        self.size.push(1);
        self.class_members.push(vec![e]);
        self.by_entity[entity].push(e);
        e
    }

    /// Adds a user-declared row. Every attribute starts as a fresh null.
    pub fn add_element(&mut self, entity: &str, id: &str) -> Result<Elem, InstanceError> {
        self.add_element_from(entity, id, None)
    }

    pub fn add_element_from(
        &mut self,
        entity: &str,
        id: &str,
        source: Option<Source>,
    ) -> Result<Elem, InstanceError> {
        let ei = self.entity_idx(entity)?;
        if self.user_ids.contains_key(&(ei, id.to_string())) {
            return Err(InstanceError::DuplicateElement {
                entity: entity.to_string(),
                id: id.to_string(),
            });
        }
        let e = self.push_element(
            ei,
            Origin::User {
                id: id.to_string(),
                source,
            },
        );
        self.user_ids.insert((ei, id.to_string()), e);
        Ok(e)
    }

    /// Adds an element invented by the chase.
    pub fn add_fresh(&mut self, entity: &str, round: u32, counter: u32) -> Result<Elem, InstanceError> {
        let ei = self.entity_idx(entity)?;
        if self.fresh_ids.contains_key(&(ei, round, counter)) {
            return Err(InstanceError::DuplicateElement {
                entity: entity.to_string(),
                id: format!("{entity}!{round}.{counter}"),
            });
        }
        let e = self.push_element(
            ei,
            Origin::Fresh {
                entity: entity.to_string(),
                round,
                counter,
            },
        );
        self.fresh_ids.insert((ei, round, counter), e);
        Ok(e)
    }

    pub fn new_null(&mut self) -> NullId {
        self.nulls.fresh()
    }

    pub fn null_count(&self) -> usize {
        self.nulls.parent.len()
    }

    /// The element declared as `id`, or created with the fresh label `id`.
    pub fn lookup(&self, entity: &str, id: &str) -> Option<Elem> {
        let ei = self.schema.entity_index(entity)?;
        if let Some(e) = self.user_ids.get(&(ei, id.to_string())) {
            return Some(*e);
        }
        match parse_fresh_label(id) {
            Some((label_entity, round, counter)) if label_entity == entity => {
                self.fresh_ids.get(&(ei, round, counter)).copied()
            }
            _ => None,
        }
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn origin(&self, e: Elem) -> &Origin {
        &self.elements[e.index()].origin
    }

    pub fn entity_of(&self, e: Elem) -> &str {
        &self.schema.entities[self.elements[e.index()].entity]
    }

    pub(crate) fn entity_index_of(&self, e: Elem) -> usize {
        self.elements[e.index()].entity
    }

    /// The canonical representative of `e`'s class.
    pub fn find(&self, mut e: Elem) -> Elem {
        while self.parent[e.index()] != e.0 {
            e = Elem(self.parent[e.index()]);
        }
        e
    }

    pub fn same_class(&self, a: Elem, b: Elem) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn key(&self, e: Elem) -> &ElemKey {
        &self.class_key[self.find(e).index()]
    }

    /// Display name of the class: its least user id, else its least fresh label.
    pub fn display(&self, e: Elem) -> String {
        self.key(e).to_string()
    }

    /// Every element in `e`'s class.
    pub fn class_of(&self, e: Elem) -> &[Elem] {
        &self.class_members[self.find(e).index()]
    }

    /// User ids of every member of `e`'s class, sorted.
    pub fn user_ids_of(&self, e: Elem) -> Vec<&str> {
        let mut ids: Vec<&str> = self
            .class_of(e)
            .iter()
            .filter_map(|m| match &self.elements[m.index()].origin {
                Origin::User { id, .. } => Some(id.as_str()),
                Origin::Fresh { .. } => None,
            })
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Canonical elements of an entity, ordered by class key.
    pub fn members(&self, entity: &str) -> Vec<Elem> {
        match self.schema.entity_index(entity) {
            Some(ei) => self.members_idx(ei),
            None => Vec::new(),
        }
    }

    pub(crate) fn members_idx(&self, ei: usize) -> Vec<Elem> {
        let mut out: Vec<Elem> = self.by_entity[ei]
            .iter()
            .copied()
            .filter(|e| self.find(*e) == *e)
            .collect();
        out.sort_by(|a, b| self.class_key[a.index()].cmp(&self.class_key[b.index()]).then(a.cmp(b)));
        out
    }

    /// Number of element classes in an entity.
    pub fn count(&self, entity: &str) -> usize {
        self.members(entity).len()
    }

    pub fn total_count(&self) -> usize {
        (0..self.schema.entities.len()).map(|i| self.members_idx(i).len()).sum()
    }

    // ---- valuations -------------------------------------------------------

    fn fk_global(&self, e: Elem, name: &str) -> Result<usize, InstanceError> {
        let entity = self.entity_of(e);
        self.schema
            .fk_index(entity, name)
            .ok_or_else(|| InstanceError::UnknownMember {
                entity: entity.to_string(),
                name: name.to_string(),
            })
    }

    fn attr_global(&self, e: Elem, name: &str) -> Result<usize, InstanceError> {
        let entity = self.entity_of(e);
        self.schema
            .attr_index(entity, name)
            .ok_or_else(|| InstanceError::UnknownMember {
                entity: entity.to_string(),
                name: name.to_string(),
            })
    }

    /// Canonical value of foreign key `fk` (global index) on `e`.
    pub(crate) fn fk_value(&self, e: Elem, fk: usize) -> Option<Elem> {
        let r = self.find(e);
        let slot = self.layout.fk_slot[fk];
        self.elements[r.index()].fks[slot].map(|t| self.find(t))
    }

    /// Resolved value of attribute `attr` (global index) on `e`.
    pub(crate) fn attr_value(&self, e: Elem, attr: usize) -> AttrValue {
        let r = self.find(e);
        let slot = self.layout.attr_slot[attr];
        self.resolve(&self.elements[r.index()].attrs[slot])
    }

    pub fn resolve(&self, v: &AttrValue) -> AttrValue {
        match v {
            AttrValue::Const(c) => AttrValue::Const(c.clone()),
            AttrValue::Null(n) => {
                let root = self.nulls.find(*n);
                match &self.nulls.anchor[root.index()] {
                    Some(c) => AttrValue::Const(c.clone()),
                    None => AttrValue::Null(root),
                }
            }
        }
    }

    pub fn fk(&self, e: Elem, name: &str) -> Result<Option<Elem>, InstanceError> {
        let fk = self.fk_global(e, name)?;
        Ok(self.fk_value(e, fk))
    }

    pub fn attr(&self, e: Elem, name: &str) -> Result<AttrValue, InstanceError> {
        let a = self.attr_global(e, name)?;
        Ok(self.attr_value(e, a))
    }

    /// Builder: sets a foreign key. Re-setting it to another class is an error.
    pub fn set_fk(&mut self, e: Elem, name: &str, target: Elem) -> Result<(), InstanceError> {
        let fk = self.fk_global(e, name)?;
        let want = self.layout.fk_target[fk];
        if self.elements[target.index()].entity != want {
            return Err(InstanceError::TypeMismatch {
                member: name.to_string(),
                expected: self.schema.entities[want].clone(),
                found: self.entity_of(target).to_string(),
            });
        }
        match self.fk_value(e, fk) {
            Some(t) if t == self.find(target) => Ok(()),
            Some(t) => Err(InstanceError::ConflictingAssignment {
                element: self.display(e),
                member: name.to_string(),
                existing: self.display(t),
            }),
            None => {
                self.assign_fk(e, fk, target);
                Ok(())
            }
        }
    }

    pub(crate) fn assign_fk(&mut self, e: Elem, fk: usize, target: Elem) {
        let r = self.find(e);
        let slot = self.layout.fk_slot[fk];
        self.elements[r.index()].fks[slot] = Some(self.find(target));
    }

    /// Builder: sets an attribute to a constant, or to a fresh null for `None`.
    /// Overwriting one constant with a different one is an error.
    pub fn set_attr(&mut self, e: Elem, name: &str, value: Option<Value>) -> Result<(), InstanceError> {
        let a = self.attr_global(e, name)?;
        match value {
            None => {
                if let AttrValue::Const(c) = self.attr_value(e, a) {
                    return Err(InstanceError::ConflictingAssignment {
                        element: self.display(e),
                        member: name.to_string(),
                        existing: c.to_literal(),
                    });
                }
                Ok(())
            }
            Some(v) => {
                let ty = self.schema.attributes[a].ty;
                let v = coerce(v, ty).map_err(|found| InstanceError::TypeMismatch {
                    member: name.to_string(),
                    expected: ty.to_string(),
                    found,
                })?;
                match self.attr_value(e, a) {
                    AttrValue::Const(c) if c == v => Ok(()),
                    AttrValue::Const(c) => Err(InstanceError::ConflictingAssignment {
                        element: self.display(e),
                        member: name.to_string(),
                        existing: c.to_literal(),
                    }),
                    AttrValue::Null(n) => {
                        self.unify_null_const(n, v, name).map_err(InstanceError::from)?;
                        Ok(())
                    }
                }
            }
        }
    }

    /// Builder: makes an attribute cell share a (possibly shared) null label.
    pub fn set_attr_null(&mut self, e: Elem, name: &str, null: NullId) -> Result<(), InstanceError> {
        let a = self.attr_global(e, name)?;
        let cell = self.attr_value(e, a);
        self.unify(&cell, &AttrValue::Null(null), name)?;
        Ok(())
    }

    fn unify_null_const(&mut self, n: NullId, c: Value, attribute: &str) -> Result<bool, ConstantClash> {
        let root = self.nulls.find(n);
        match &self.nulls.anchor[root.index()] {
            Some(existing) if *existing == c => Ok(false),
            Some(existing) => Err(ConstantClash {
                attribute: attribute.to_string(),
                left: existing.clone(),
                right: c,
            }),
            None => {
                self.nulls.anchor[root.index()] = Some(c);
                Ok(true)
            }
        }
    }

    /// Makes two attribute values equal. Returns whether anything changed.
    pub(crate) fn unify(&mut self, a: &AttrValue, b: &AttrValue, attribute: &str) -> Result<bool, ConstantClash> {
        match (self.resolve(a), self.resolve(b)) {
            (AttrValue::Const(x), AttrValue::Const(y)) => {
                if x == y {
                    Ok(false)
                } else {
                    Err(ConstantClash {
                        attribute: attribute.to_string(),
                        left: x,
                        right: y,
                    })
                }
            }
            (AttrValue::Null(n), AttrValue::Const(c)) | (AttrValue::Const(c), AttrValue::Null(n)) => {
                self.unify_null_const(n, c, attribute)
            }
            (AttrValue::Null(x), AttrValue::Null(y)) => {
                if x == y {
                    return Ok(false);
                }
                let (keep, drop) = if x < y { (x, y) } else { (y, x) };
                self.nulls.parent[drop.index()] = keep.0;
                Ok(true)
            }
        }
    }

    // ---- merging ----------------------------------------------------------

    /// Merges two elements and propagates congruence. On a clash the
    /// instance is left untouched.
    pub fn merge_elements(&mut self, a: Elem, b: Elem) -> Result<MergeReport, InstanceError> {
        let mut scratch = self.clone();
        let report = scratch.merge(a, b)?;
        *self = scratch;
        Ok(report)
    }

    /// Merge without rollback; on error the instance must be discarded.
    pub(crate) fn merge(&mut self, a: Elem, b: Elem) -> Result<MergeReport, InstanceError> {
        let mut report = MergeReport::default();
        let mut pending = vec![(a, b)];
        while let Some((x, y)) = pending.pop() {
            let (rx, ry) = (self.find(x), self.find(y));
            if rx == ry {
                continue;
            }
            let (ex, ey) = (self.elements[rx.index()].entity, self.elements[ry.index()].entity);
            if ex != ey {
                return Err(InstanceError::EntityMismatch {
                    left: self.display(rx),
                    left_entity: self.schema.entities[ex].clone(),
                    right: self.display(ry),
                    right_entity: self.schema.entities[ey].clone(),
                });
            }
            report.merged.push((rx, ry));
            // union by size, ties to the older element
            let (root, child) = match self.size[rx.index()].cmp(&self.size[ry.index()]) {
                std::cmp::Ordering::Greater => (rx, ry),
                std::cmp::Ordering::Less => (ry, rx),
                std::cmp::Ordering::Equal => (rx.min(ry), rx.max(ry)),
            };
            self.parent[child.index()] = root.0;
            self.size[root.index()] += self.size[child.index()];
            let members = std::mem::take(&mut self.class_members[child.index()]);
            self.class_members[root.index()].extend(members);
            if self.class_key[child.index()] < self.class_key[root.index()] {
                self.class_key[root.index()] = self.class_key[child.index()].clone();
            }

            let child_fks = std::mem::take(&mut self.elements[child.index()].fks);
            for (slot, value) in child_fks.into_iter().enumerate() {
                let Some(value) = value else { continue };
                match self.elements[root.index()].fks[slot] {
                    Some(existing) => pending.push((existing, value)),
                    None => self.elements[root.index()].fks[slot] = Some(value),
                }
            }
            let child_attrs = std::mem::take(&mut self.elements[child.index()].attrs);
            let attr_ids = self.layout.entity_attrs[ex].clone();
            for (slot, value) in child_attrs.into_iter().enumerate() {
                let existing = self.elements[root.index()].attrs[slot].clone();
                let name = self.schema.attributes[attr_ids[slot]].name.clone();
                if self.unify(&existing, &value, &name)? {
                    report.nulls_resolved += 1;
                }
            }
        }
        Ok(report)
    }

    /// Elements (canonical) missing a value for some foreign key.
    pub fn missing_fks(&self) -> Vec<(Elem, usize)> {
        let mut out = Vec::new();
        for ei in 0..self.schema.entities.len() {
            for e in self.members_idx(ei) {
                for &fk in &self.layout.entity_fks[ei] {
                    if self.fk_value(e, fk).is_none() {
                        out.push((e, fk));
                    }
                }
            }
        }
        out
    }

    pub fn is_total(&self) -> bool {
        self.missing_fks().is_empty()
    }

    /// Whether any null class carries two distinct constants. The API never
    /// lets this happen; tests use it as a check.
    pub fn has_conflicting_anchor(&self) -> bool {
        // Anchors live only on roots, and unify rejects conflicts before
        // writing, so a conflict would show up as an anchor on a non-root.
        (0..self.nulls.parent.len()).any(|i| {
            let root = self.nulls.find(NullId(i as u32));
            root.index() != i && self.nulls.anchor[i].is_some() && {
                self.nulls.anchor[i] != self.nulls.anchor[root.index()]
            }
        })
    }
}

/// Checks a constant against a base type, widening Int literals to Double.
pub fn coerce(v: Value, ty: BaseType) -> Result<Value, String> {
    match (v, ty) {
        (Value::Int(i), BaseType::Double) => Ok(Value::double(i as f64)),
        (v, ty) if v.base_type() == ty => Ok(v),
        (v, _) => Err(format!("{} {}", v.base_type(), v.to_literal())),
    }
}

#[cfg(test)]
mod tests;

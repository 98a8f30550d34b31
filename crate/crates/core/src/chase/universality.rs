//! Isomorphism check between two chase results of the same pre-instance.
//!
//! Classes carrying user ids must correspond exactly; the bijection is then
//! extended along foreign keys, and whatever remains unmapped is searched by
//! backtracking. Meant for desk-scale instances.

use std::collections::BTreeMap;

use crate::instance::{AttrValue, Elem, Instance, NullId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Universality {
    Isomorphic,
    CounterExample(String),
}

impl Universality {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Universality::Isomorphic)
    }
}

#[derive(Clone, Default)]
struct Bijection {
    fwd: BTreeMap<Elem, Elem>,
    back: BTreeMap<Elem, Elem>,
}

impl Bijection {
    fn add(&mut self, a: Elem, b: Elem) -> Result<bool, String> {
        match (self.fwd.get(&a), self.back.get(&b)) {
            (Some(x), _) if *x == b => Ok(false),
            (None, None) => {
                self.fwd.insert(a, b);
                self.back.insert(b, a);
                Ok(true)
            }
            _ => Err("elements would be identified inconsistently".to_string()),
        }
    }
}

fn propagate(sat: &Instance, alt: &Instance, map: &mut Bijection, mut queue: Vec<(Elem, Elem)>) -> Result<(), String> {
    while let Some((a, b)) = queue.pop() {
        let ei = sat.entity_index_of(a);
        for &fk in &sat.layout().entity_fks[ei] {
            match (sat.fk_value(a, fk), alt.fk_value(b, fk)) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    if map.add(x, y)? {
                        queue.push((x, y));
                    }
                }
                _ => {
                    return Err(format!(
                        "`{}` of {} is set on only one side",
                        sat.schema().foreign_keys[fk].name,
                        sat.display(a)
                    ))
                }
            }
        }
    }
    Ok(())
}

fn attributes_agree(sat: &Instance, alt: &Instance, map: &Bijection) -> Result<(), String> {
    let mut nulls: BTreeMap<NullId, NullId> = BTreeMap::new();
    let mut nulls_back: BTreeMap<NullId, NullId> = BTreeMap::new();
    for (&a, &b) in &map.fwd {
        let ei = sat.entity_index_of(a);
        for &attr in &sat.layout().entity_attrs[ei] {
            let name = &sat.schema().attributes[attr].name;
            match (sat.attr_value(a, attr), alt.attr_value(b, attr)) {
                (AttrValue::Const(x), AttrValue::Const(y)) if x == y => {}
                (AttrValue::Null(x), AttrValue::Null(y)) => {
                    let fwd_ok = *nulls.entry(x).or_insert(y) == y;
                    let back_ok = *nulls_back.entry(y).or_insert(x) == x;
                    if !(fwd_ok && back_ok) {
                        return Err(format!("{}.{name} shares nulls differently", sat.display(a)));
                    }
                }
                (x, y) => return Err(format!("{}.{name} is {x} on one side and {y} on the other", sat.display(a))),
            }
        }
    }
    Ok(())
}

fn search(sat: &Instance, alt: &Instance, map: Bijection, open: &[Elem]) -> Result<(), String> {
    let Some(pos) = open.iter().position(|a| !map.fwd.contains_key(a)) else {
        return attributes_agree(sat, alt, &map);
    };
    let a = open[pos];
    let entity = sat.entity_of(a);
    let mut last = format!("no counterpart for {}", sat.display(a));
    for b in alt.members(entity) {
        if map.back.contains_key(&b) || !alt.user_ids_of(b).is_empty() {
            continue;
        }
        let mut next = map.clone();
        let attempt = next
            .add(a, b)
            .and_then(|_| propagate(sat, alt, &mut next, vec![(a, b)]))
            .and_then(|_| search(sat, alt, next, &open[pos + 1..]));
        match attempt {
            Ok(()) => return Ok(()),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Whether `sat` and `alt` are isomorphic by a map that fixes user ids.
pub fn verify_universality(sat: &Instance, alt: &Instance) -> Universality {
    match check(sat, alt) {
        Ok(()) => Universality::Isomorphic,
        Err(e) => Universality::CounterExample(e),
    }
}

fn check(sat: &Instance, alt: &Instance) -> Result<(), String> {
    if sat.schema() != alt.schema() {
        return Err("instances are over different schemas".to_string());
    }
    let mut map = Bijection::default();
    let mut seeds = Vec::new();
    let mut open = Vec::new();
    for entity in &sat.schema().entities {
        let (left, right) = (sat.members(entity), alt.members(entity));
        if left.len() != right.len() {
            return Err(format!("{entity} has {} elements on one side and {} on the other", left.len(), right.len()));
        }
        for a in left {
            let ids = sat.user_ids_of(a);
            let Some(first) = ids.first() else {
                open.push(a);
                continue;
            };
            let b = alt
                .lookup(entity, first)
                .map(|b| alt.find(b))
                .ok_or_else(|| format!("{entity} {first} is missing"))?;
            if alt.user_ids_of(b) != ids {
                return Err(format!("{entity} {first} is merged with different rows"));
            }
            map.add(a, b)?;
            seeds.push((a, b));
        }
        for b in right {
            if let Some(first) = alt.user_ids_of(b).first() {
                if sat.lookup(entity, first).is_none() {
                    return Err(format!("{entity} {first} is missing"));
                }
            }
        }
    }
    propagate(sat, alt, &mut map, seeds)?;
    search(sat, alt, map, &open)
}

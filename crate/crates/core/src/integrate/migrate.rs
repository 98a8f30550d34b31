use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::instance::{AttrValue, Elem, Instance, NullId, Origin, Source};
use crate::schema::Schema;

use super::{CombinedSchema, IntegrateError};

/// Copies every source row into the combined schema. Rows keep their ids
/// unless two sources use the same id for one combined entity, in which case
/// the later one is prefixed with its schema name. No constraint is enforced.
pub fn sigma_insert(c: &CombinedSchema, sources: &[&Instance]) -> Result<Instance, IntegrateError> {
    let mut out = Instance::new(Arc::new(c.schema.clone())).with_name(c.name());
    let mut seen = BTreeSet::new();
    for src in sources {
        let sname = &src.schema().name;
        if !c.sources.contains(sname) {
            return Err(IntegrateError::UnknownSchema(sname.clone()));
        }
        if !seen.insert(sname.clone()) {
            return Err(IntegrateError::DuplicateInclude(sname.clone()));
        }
    }

    for src in sources {
        let s = src.schema();
        let mut image: BTreeMap<Elem, Elem> = BTreeMap::new();
        let mut nulls: BTreeMap<NullId, NullId> = BTreeMap::new();
        for entity in &s.entities {
            let ce = c.combined_entity(&s.name, entity).expect("entity of an included schema");
            for e in src.members(entity) {
                let id = src.display(e);
                let mut new_id = id.clone();
                if out.lookup(ce, &new_id).is_some() {
                    new_id = format!("{}_{id}", s.name);
                    let mut k = 2;
                    while out.lookup(ce, &new_id).is_some() {
                        new_id = format!("{}_{id}_{k}", s.name);
                        k += 1;
                    }
                }
                let source = Source {
                    schema: s.name.clone(),
                    id,
                };
                let ne = out.add_element_from(ce, &new_id, Some(source))?;
                image.insert(e, ne);
            }
        }
        for entity in &s.entities {
            for e in src.members(entity) {
                let ne = image[&e];
                for (_, fk) in s.fks_of(entity) {
                    let name = c.combined_member(&s.name, entity, &fk.name).expect("member of an included schema");
                    if let Some(t) = src.fk(e, &fk.name)? {
                        out.set_fk(ne, name, image[&src.find(t)])?;
                    }
                }
                for (_, a) in s.attrs_of(entity) {
                    let name = c.combined_member(&s.name, entity, &a.name).expect("member of an included schema");
                    match src.attr(e, &a.name)? {
                        AttrValue::Const(v) => out.set_attr(ne, name, Some(v))?,
                        AttrValue::Null(n) => {
                            let m = *nulls.entry(n).or_insert_with(|| out.new_null());
                            out.set_attr_null(ne, name, m)?;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Restricts a combined instance to one source schema. Each element class
/// of a combined entity becomes a row, named by its least id from `target`,
/// else its least id overall, else its chase label.
pub fn delta_project(c: &CombinedSchema, sat: &Instance, target: &Schema) -> Result<Instance, IntegrateError> {
    if !c.sources.contains(&target.name) {
        return Err(IntegrateError::UnknownSchema(target.name.clone()));
    }
    let mut out = Instance::new(Arc::new(target.clone())).with_name(sat.name());
    let mut image: BTreeMap<Elem, Elem> = BTreeMap::new();
    let mut nulls: BTreeMap<NullId, NullId> = BTreeMap::new();
    for entity in &target.entities {
        let ce = c.combined_entity(&target.name, entity).expect("checked above");
        for e in sat.members(ce) {
            let own = sat
                .class_of(e)
                .iter()
                .filter_map(|m| match sat.origin(*m) {
                    Origin::User {
                        source: Some(src), ..
                    } if src.schema == target.name => Some(src.id.clone()),
                    _ => None,
                })
                .min();
            let mut id = own.unwrap_or_else(|| sat.display(e));
            if out.lookup(entity, &id).is_some() {
                id = sat.display(e);
                let base = id.clone();
                let mut k = 2;
                while out.lookup(entity, &id).is_some() {
                    id = format!("{base}_{k}");
                    k += 1;
                }
            }
            image.insert(e, out.add_element(entity, &id)?);
        }
    }
    for entity in &target.entities {
        let ce = c.combined_entity(&target.name, entity).expect("checked above");
        for e in sat.members(ce) {
            let ne = image[&e];
            for (_, fk) in target.fks_of(entity) {
                let name = c.combined_member(&target.name, entity, &fk.name).expect("member of target");
                if let Some(t) = sat.fk(e, name)? {
                    out.set_fk(ne, &fk.name, image[&t])?;
                }
            }
            for (_, a) in target.attrs_of(entity) {
                let name = c.combined_member(&target.name, entity, &a.name).expect("member of target");
                match sat.attr(e, name)? {
                    AttrValue::Const(v) => out.set_attr(ne, &a.name, Some(v))?,
                    AttrValue::Null(n) => {
                        let m = *nulls.entry(n).or_insert_with(|| out.new_null());
                        out.set_attr_null(ne, &a.name, m)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

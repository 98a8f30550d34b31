//! Per-entity CSV rendering: one file per entity with columns
//! `id, <foreign keys>, <attributes>`; nulls are empty cells.

use super::{AttrValue, Instance};

pub fn entity_csv(inst: &Instance, entity: &str) -> String {
    let schema = inst.schema();
    let fks: Vec<usize> = schema.fks_of(entity).map(|(i, _)| i).collect();
    let attrs: Vec<usize> = schema.attrs_of(entity).map(|(i, _)| i).collect();

    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend(fks.iter().map(|&i| schema.foreign_keys[i].name.clone()));
    header.extend(attrs.iter().map(|&i| schema.attributes[i].name.clone()));
    w.write_record(&header).expect("in-memory write");

    for e in inst.members(entity) {
        let mut row = vec![inst.display(e)];
        for &fk in &fks {
            row.push(inst.fk_value(e, fk).map(|t| inst.display(t)).unwrap_or_default());
        }
        for &a in &attrs {
            row.push(match inst.attr_value(e, a) {
                AttrValue::Const(v) => v.render(),
                AttrValue::Null(_) => String::new(),
            });
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// `(file name, contents)` for every entity, in schema order.
pub fn instance_csvs(inst: &Instance) -> Vec<(String, String)> {
    inst.schema()
        .entities
        .iter()
        .map(|e| (format!("{e}.csv"), entity_csv(inst, e)))
        .collect()
}

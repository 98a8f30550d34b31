use std::collections::BTreeMap;
use std::fmt;

use crate::instance::{AttrValue, Instance, Origin};

/// Cell-wise comparison of one table before and after a round trip.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableDelta {
    pub entity: String,
    pub rows_in: usize,
    pub rows_recovered: usize,
    /// Cells null in the original and constant after the round trip.
    pub attributes_gained: usize,
    /// Constant cells of the original with no equal counterpart.
    pub attributes_lost: usize,
    /// Recovered rows whose id the original does not have.
    pub new_rows: usize,
    pub gained_by_attribute: BTreeMap<String, usize>,
    pub lost_by_attribute: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundTripReport {
    pub schema: String,
    pub tables: Vec<TableDelta>,
}

impl RoundTripReport {
    pub fn table(&self, entity: &str) -> Option<&TableDelta> {
        self.tables.iter().find(|t| t.entity == entity)
    }

    pub fn total_lost(&self) -> usize {
        self.tables.iter().map(|t| t.attributes_lost).sum()
    }
}

fn user_id(i: &Instance, e: crate::instance::Elem) -> Option<String> {
    i.class_of(e)
        .iter()
        .filter_map(|m| match i.origin(*m) {
            Origin::User { id, .. } => Some(id.clone()),
            Origin::Fresh { .. } => None,
        })
        .min()
}

/// Matches rows by user-declared id and counts gained and lost cells.
/// Both instances must be over the same schema.
pub fn roundtrip_report(original: &Instance, recovered: &Instance) -> RoundTripReport {
    let s = original.schema();
    let mut tables = Vec::new();
    for entity in &s.entities {
        let mut t = TableDelta {
            entity: entity.clone(),
            rows_in: original.count(entity),
            rows_recovered: recovered.count(entity),
            ..TableDelta::default()
        };
        let attrs: Vec<&str> = s.attrs_of(entity).map(|(_, a)| a.name.as_str()).collect();
        for a in &attrs {
            t.gained_by_attribute.insert(a.to_string(), 0);
            t.lost_by_attribute.insert(a.to_string(), 0);
        }
        for e in original.members(entity) {
            let twin = user_id(original, e).and_then(|id| recovered.lookup(entity, &id));
            for a in &attrs {
                let before = original.attr(e, a).expect("attribute of the schema");
                let after = twin.map(|r| recovered.attr(r, a).expect("same schema"));
                match (&before, &after) {
                    (AttrValue::Null(_), Some(AttrValue::Const(_))) => {
                        t.attributes_gained += 1;
                        *t.gained_by_attribute.get_mut(*a).unwrap() += 1;
                    }
                    (AttrValue::Const(c), other) if other.as_ref().and_then(AttrValue::as_const) != Some(c) => {
                        t.attributes_lost += 1;
                        *t.lost_by_attribute.get_mut(*a).unwrap() += 1;
                    }
                    _ => {}
                }
            }
        }
        t.new_rows = recovered
            .members(entity)
            .into_iter()
            .filter(|&r| {
                recovered
                    .user_ids_of(r)
                    .iter()
                    .all(|id| original.lookup(entity, id).is_none())
            })
            .count();
        tables.push(t);
    }
    RoundTripReport {
        schema: s.name.clone(),
        tables,
    }
}

impl fmt::Display for RoundTripReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = ["table", "rows_in", "rows_recovered", "gained", "lost", "new_rows"];
        let mut rows: Vec<[String; 6]> = vec![header.map(String::from)];
        for t in &self.tables {
            rows.push([
                t.entity.clone(),
                t.rows_in.to_string(),
                t.rows_recovered.to_string(),
                t.attributes_gained.to_string(),
                t.attributes_lost.to_string(),
                t.new_rows.to_string(),
            ]);
        }
        let widths: Vec<usize> = (0..6).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
        writeln!(f, "round trip of {}", self.schema)?;
        for r in &rows {
            let line: Vec<String> = r.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
            writeln!(f, "{}", line.join("  ").trim_end())?;
        }
        for t in &self.tables {
            for (a, n) in &t.gained_by_attribute {
                if *n > 0 {
                    writeln!(f, "{}.{a}: gained {n}", t.entity)?;
                }
            }
            for (a, n) in &t.lost_by_attribute {
                if *n > 0 {
                    writeln!(f, "{}.{a}: lost {n}", t.entity)?;
                }
            }
        }
        Ok(())
    }
}

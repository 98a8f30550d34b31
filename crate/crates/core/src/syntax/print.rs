//! Deterministic DSL rendering. Parsing the output yields an equal value,
//! up to element and null identities.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::extension::ExtensionSpec;
use crate::instance::{AttrValue, Instance, NullId};
use crate::integrate::CombinedSchema;
use crate::query::QuerySpec;
use crate::schema::Schema;
use crate::typeside::quote_string;

use super::lexer::{is_ident_char, is_ident_start};

pub trait Canonical {
    fn canonical(&self) -> String;
}

pub fn print_canonical<T: Canonical + ?Sized>(x: &T) -> String {
    x.canonical()
}

const KEYWORDS: [&str; 7] = ["null", "true", "false", "forall", "exists", "where", "and"];

/// A row id as a bare identifier when the lexer would read it back as one.
pub(crate) fn row_id(id: &str) -> String {
    let mut chars = id.chars();
    let plain = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char) && !KEYWORDS.contains(&id);
    if plain {
        id.to_string()
    } else {
        quote_string(id)
    }
}

impl Canonical for Schema {
    fn canonical(&self) -> String {
        let mut out = format!("schema {} {{\n", self.name);
        if !self.entities.is_empty() {
            let _ = writeln!(out, "  entities\n    {}", self.entities.join(" "));
        }
        if !self.foreign_keys.is_empty() {
            out.push_str("  foreign_keys\n");
            for f in &self.foreign_keys {
                let _ = writeln!(out, "    {} : {} -> {}", f.name, f.source, f.target);
            }
        }
        if !self.attributes.is_empty() {
            out.push_str("  attributes\n");
            for a in &self.attributes {
                let _ = writeln!(out, "    {} : {} -> {}", a.name, a.source, a.ty);
            }
        }
        if !self.constraints.is_empty() {
            out.push_str("  constraints\n");
            for c in &self.constraints {
                let _ = writeln!(out, "    {c}");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Canonical for CombinedSchema {
    fn canonical(&self) -> String {
        self.schema.canonical()
    }
}

impl Canonical for Instance {
    fn canonical(&self) -> String {
        let s = self.schema();
        let name = if self.name().is_empty() { "unnamed" } else { self.name() };
        let mut out = format!("instance {name} : {} {{\n", s.name);

        let mut uses: BTreeMap<NullId, usize> = BTreeMap::new();
        for entity in &s.entities {
            for e in self.members(entity) {
                for (_, a) in s.attrs_of(entity) {
                    if let Ok(AttrValue::Null(n)) = self.attr(e, &a.name) {
                        *uses.entry(n).or_default() += 1;
                    }
                }
            }
        }

        for entity in &s.entities {
            let rows = self.members(entity);
            if rows.is_empty() {
                continue;
            }
            let _ = writeln!(out, "  entity {entity} {{");
            for e in rows {
                let mut cells = Vec::new();
                for (_, fk) in s.fks_of(entity) {
                    if let Ok(Some(t)) = self.fk(e, &fk.name) {
                        cells.push(format!("{} = {}", fk.name, row_id(&self.display(t))));
                    }
                }
                for (_, a) in s.attrs_of(entity) {
                    match self.attr(e, &a.name) {
                        Ok(AttrValue::Const(v)) => cells.push(format!("{} = {}", a.name, v.to_literal())),
                        Ok(AttrValue::Null(n)) if uses[&n] > 1 => cells.push(format!("{} = ?n{}", a.name, n.index())),
                        _ => {}
                    }
                }
                let body = if cells.is_empty() {
                    " ".to_string()
                } else {
                    format!(" {} ", cells.join("  "))
                };
                let _ = writeln!(out, "    row {} {{{body}}}", row_id(&self.display(e)));
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }
}

impl Canonical for ExtensionSpec {
    fn canonical(&self) -> String {
        let mut out = format!("extension {} {{\n", self.name);
        let names: Vec<&str> = self.includes.iter().map(|s| s.name.as_str()).collect();
        let _ = writeln!(out, "  include {}", names.join(" "));
        if !self.identifications.is_empty() {
            out.push_str("  identify\n");
            for i in &self.identifications {
                let _ = writeln!(out, "    {} = {}", i.left, i.right);
            }
        }
        if !self.constraints.is_empty() {
            out.push_str("  constraints\n");
            for c in &self.constraints {
                let _ = writeln!(out, "    {c}");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Canonical for QuerySpec {
    fn canonical(&self) -> String {
        let mut out = format!("query {} = simple : {} {{\n", self.name, self.target);
        let from: Vec<String> = self.from.iter().map(|b| format!("{}:{}", b.name, b.entity)).collect();
        let _ = writeln!(out, "  from {}", from.join(" "));
        if !self.atoms.is_empty() {
            let atoms: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "  where {}", atoms.join(" and "));
        }
        if !self.attributes.is_empty() {
            out.push_str("  attributes\n");
            for (c, t) in &self.attributes {
                let _ = writeln!(out, "    {c} -> {t}");
            }
        }
        out.push_str("}\n");
        out
    }
}

use std::collections::{BTreeMap, BTreeSet};

use crate::constraint::{Constraint, Term};
use crate::extension::{ExtensionSpec, QualifiedEntity};
use crate::schema::{validate_schema, Attribute, ForeignKey, Schema, Sort};

use super::IntegrateError;

/// Where a combined foreign key or attribute came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemberOrigin {
    pub schema: String,
    pub entity: String,
    pub name: String,
}

/// The colimit of an extension's schemas, with provenance for every symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinedSchema {
    pub schema: Schema,
    /// Names of the included schemas, in include order.
    pub sources: Vec<String>,
    /// Combined entity name to the source entities it glues together.
    pub entity_origins: BTreeMap<String, Vec<QualifiedEntity>>,
    /// `(combined entity, combined member)` to its source member.
    pub member_origins: BTreeMap<(String, String), MemberOrigin>,
    /// Identification classes with at least two members, in naming order.
    pub classes: Vec<Vec<QualifiedEntity>>,
    entity_map: BTreeMap<QualifiedEntity, String>,
    member_map: BTreeMap<MemberOrigin, String>,
}

impl CombinedSchema {
    pub fn name(&self) -> &str {
        &self.schema.name
    }

    pub fn combined_entity(&self, schema: &str, entity: &str) -> Option<&str> {
        self.entity_map
            .get(&QualifiedEntity::new(schema, entity))
            .map(String::as_str)
    }

    pub fn combined_member(&self, schema: &str, entity: &str, member: &str) -> Option<&str> {
        self.member_map
            .get(&MemberOrigin {
                schema: schema.into(),
                entity: entity.into(),
                name: member.into(),
            })
            .map(String::as_str)
    }

    /// A combined entity name, or an original entity name that maps to
    /// exactly one combined entity (`IfcSensor` for `IFC_IfcSensor`).
    pub fn resolve_entity(&self, name: &str) -> Option<String> {
        if self.schema.has_entity(name) {
            return Some(name.to_string());
        }
        let images: BTreeSet<&String> = self
            .entity_map
            .iter()
            .filter(|(q, _)| q.entity == name)
            .map(|(_, c)| c)
            .collect();
        match images.len() {
            1 => images.into_iter().next().cloned(),
            _ => None,
        }
    }

    /// Schemas contributing to a combined entity.
    pub fn entity_schemas(&self, entity: &str) -> BTreeSet<&str> {
        self.entity_origins
            .get(entity)
            .into_iter()
            .flatten()
            .map(|q| q.schema.as_str())
            .collect()
    }

    /// Schemas contributing the symbol a term ends in, the last member of a
    /// path. Literals and bare variables contribute none: equating two
    /// elements of one entity relates no schemas beyond its identifications.
    pub fn term_schemas(&self, t: &Term) -> BTreeSet<&str> {
        match t {
            Term::Path { path, .. } => {
                if path.is_identity() {
                    return BTreeSet::new();
                }
                let Some(parent) = path.parent(&self.schema) else {
                    return BTreeSet::new();
                };
                let (Sort::Entity(owner), Some(last)) = (&parent.target, path.names().last()) else {
                    return BTreeSet::new();
                };
                self.member_origins
                    .get(&(owner.clone(), last.to_string()))
                    .map(|o| BTreeSet::from([o.schema.as_str()]))
                    .unwrap_or_default()
            }
            Term::Lit(_) => BTreeSet::new(),
            Term::App { args, .. } => args.iter().flat_map(|a| self.term_schemas(a)).collect(),
        }
    }

    /// Unordered schema pairs that some atom or equation of `cs` relates
    /// directly, one side ending in a symbol of each.
    pub fn direct_bridges(&self, cs: &[Constraint]) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for c in cs {
            let sides = c
                .premise
                .iter()
                .map(|a| (&a.lhs, &a.rhs))
                .chain(c.conclusion.iter().map(|e| (&e.lhs, &e.rhs)));
            for (l, r) in sides {
                for a in self.term_schemas(l) {
                    for b in self.term_schemas(r) {
                        if a != b {
                            let pair = if a < b { (a, b) } else { (b, a) };
                            out.insert((pair.0.to_string(), pair.1.to_string()));
                        }
                    }
                }
            }
        }
        out
    }
}

struct Classes {
    parent: Vec<usize>,
}

impl Classes {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Glues the included schemas along the identifications.
///
/// Identified classes are named after the left side of the first
/// identification that mentions them; other entities become
/// `<Schema>_<Entity>`. Member names are kept unless two origins in one class
/// share a name, in which case both get a `<Schema>_` prefix.
pub fn combine_schemas(x: &ExtensionSpec) -> Result<CombinedSchema, IntegrateError> {
    let mut seen = BTreeSet::new();
    for s in &x.includes {
        if !seen.insert(s.name.as_str()) {
            return Err(IntegrateError::DuplicateInclude(s.name.clone()));
        }
    }

    // Nodes are (schema, entity) pairs in declaration order.
    let nodes: Vec<QualifiedEntity> = x
        .includes
        .iter()
        .flat_map(|s| s.entities.iter().map(|e| QualifiedEntity::new(s.name.clone(), e.clone())))
        .collect();
    let index: BTreeMap<&QualifiedEntity, usize> = nodes.iter().enumerate().map(|(i, q)| (q, i)).collect();
    let mut classes = Classes {
        parent: (0..nodes.len()).collect(),
    };
    // root -> (index of the first identification naming the class, name)
    let mut class_name: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    for (k, id) in x.identifications.iter().enumerate() {
        for q in [&id.left, &id.right] {
            if x.include(&q.schema).is_none() {
                return Err(IntegrateError::UnknownSchema(q.schema.clone()));
            }
            if !index.contains_key(q) {
                return Err(IntegrateError::UnknownEntity(q.clone()));
            }
        }
        if id.left.schema == id.right.schema {
            return Err(IntegrateError::SameSchemaIdentification {
                left: id.left.clone(),
                right: id.right.clone(),
            });
        }
        let (l, r) = (classes.find(index[&id.left]), classes.find(index[&id.right]));
        if l == r {
            continue;
        }
        let name = [class_name.remove(&l), class_name.remove(&r)]
            .into_iter()
            .flatten()
            .min()
            .unwrap_or_else(|| (k, id.left.entity.clone()));
        classes.parent[r] = l;
        class_name.insert(l, name);
    }

    // Members of each class, checking that no schema appears twice.
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..nodes.len() {
        members.entry(classes.find(i)).or_default().push(i);
    }
    for ms in members.values() {
        for (a, &i) in ms.iter().enumerate() {
            for &j in &ms[a + 1..] {
                if nodes[i].schema == nodes[j].schema {
                    return Err(IntegrateError::SameSchemaIdentification {
                        left: nodes[i].clone(),
                        right: nodes[j].clone(),
                    });
                }
            }
        }
    }

    let mut schema = Schema::new(x.name.clone());
    let mut entity_map = BTreeMap::new();
    let mut entity_origins: BTreeMap<String, Vec<QualifiedEntity>> = BTreeMap::new();
    let mut root_name: BTreeMap<usize, String> = BTreeMap::new();
    for (i, q) in nodes.iter().enumerate() {
        let root = classes.find(i);
        let name = match root_name.get(&root) {
            Some(n) => n.clone(),
            None => {
                let n = match class_name.get(&root) {
                    Some((_, n)) => n.clone(),
                    None => format!("{}_{}", q.schema, q.entity),
                };
                if schema.has_entity(&n) {
                    return Err(IntegrateError::IdentificationCollision(format!(
                        "entity name `{n}` is produced twice"
                    )));
                }
                schema.entities.push(n.clone());
                root_name.insert(root, n.clone());
                n
            }
        };
        entity_map.insert(q.clone(), name.clone());
        entity_origins.entry(name).or_default().push(q.clone());
    }
    let mut named: Vec<(usize, usize)> = class_name.iter().map(|(&root, (k, _))| (*k, root)).collect();
    named.sort_unstable();
    let classes_out: Vec<Vec<QualifiedEntity>> = named
        .iter()
        .map(|(_, r)| members[r].iter().map(|&i| nodes[i].clone()).collect())
        .collect();

    // Member names: count plain-name uses per combined entity.
    let mut uses: BTreeMap<(String, String), usize> = BTreeMap::new();
    for s in &x.includes {
        let owners = s
            .foreign_keys
            .iter()
            .map(|f| (&f.source, &f.name))
            .chain(s.attributes.iter().map(|a| (&a.source, &a.name)));
        for (src, name) in owners {
            let ce = entity_map[&QualifiedEntity::new(s.name.clone(), src.clone())].clone();
            *uses.entry((ce, name.clone())).or_default() += 1;
        }
    }
    let mut member_map = BTreeMap::new();
    let mut member_origins = BTreeMap::new();
    let mut taken: BTreeSet<(String, String)> = BTreeSet::new();
    let mut place = |s: &Schema, src: &str, name: &str| -> Result<(String, String), IntegrateError> {
        let ce = entity_map[&QualifiedEntity::new(s.name.clone(), src)].clone();
        let combined = if uses[&(ce.clone(), name.to_string())] > 1 {
            format!("{}_{}", s.name, name)
        } else {
            name.to_string()
        };
        if !taken.insert((ce.clone(), combined.clone())) {
            return Err(IntegrateError::IdentificationCollision(format!(
                "member `{combined}` of `{ce}` is ambiguous"
            )));
        }
        let origin = MemberOrigin {
            schema: s.name.clone(),
            entity: src.to_string(),
            name: name.to_string(),
        };
        member_map.insert(origin.clone(), combined.clone());
        member_origins.insert((ce.clone(), combined.clone()), origin);
        Ok((ce, combined))
    };
    for s in &x.includes {
        for f in &s.foreign_keys {
            let (source, name) = place(s, &f.source, &f.name)?;
            let target = entity_map[&QualifiedEntity::new(s.name.clone(), f.target.clone())].clone();
            schema.foreign_keys.push(ForeignKey { name, source, target });
        }
        for a in &s.attributes {
            let (source, name) = place(s, &a.source, &a.name)?;
            schema.attributes.push(Attribute { name, source, ty: a.ty });
        }
    }

    // Source constraints, re-expressed over the combined names.
    for s in &x.includes {
        let entity = |e: &str| entity_map.get(&QualifiedEntity::new(s.name.clone(), e)).cloned();
        let member = |e: &str, m: &str| {
            member_map
                .get(&MemberOrigin {
                    schema: s.name.clone(),
                    entity: e.to_string(),
                    name: m.to_string(),
                })
                .cloned()
        };
        for c in &s.constraints {
            let mut t = c
                .translate(s, &schema, &entity, &member)
                .map_err(|message| IntegrateError::ConstraintTranslation {
                    schema: s.name.clone(),
                    label: c.label.clone(),
                    message,
                })?;
            t.label = format!("{}_{}", s.name, c.label);
            schema.constraints.push(t);
        }
    }
    schema.constraints.extend(x.constraints.iter().cloned());

    let report = validate_schema(&schema);
    if !report.is_empty() {
        return Err(IntegrateError::InvalidCombined(report.to_string()));
    }
    Ok(CombinedSchema {
        schema,
        sources: x.includes.iter().map(|s| s.name.clone()).collect(),
        entity_origins,
        member_origins,
        classes: classes_out,
        entity_map,
        member_map,
    })
}

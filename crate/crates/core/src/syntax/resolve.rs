//! Name resolution and type checking of parsed blocks.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::constraint::{Atom, Binder, Constraint, Equation, Term};
use crate::extension::{ExtensionSpec, Identification, QualifiedEntity};
use crate::instance::{parse_fresh_label, Instance, NullId};
use crate::integrate::{combine_schemas, CombinedSchema};
use crate::path::Path;
use crate::query::QuerySpec;
use crate::schema::{validate_schema, Attribute, ForeignKey, Member, Schema, Sort};
use crate::typeside::{BaseType, Function, Predicate, Value};

use super::ast::*;
use super::source::{Diagnostic, SourceDocument, Span};

type Resolved<T> = Result<T, Vec<Diagnostic>>;

struct Ctx<'a> {
    doc: &'a SourceDocument,
    diags: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn error(&mut self, span: Span, message: impl Into<String>) {
        let d = self.doc.error(span, message);
        self.diags.push(d);
    }

    fn finish<T>(self, value: T) -> Resolved<T> {
        if self.diags.is_empty() {
            Ok(value)
        } else {
            Err(self.diags)
        }
    }
}

/// Widens an Int literal facing a Double-sorted term.
fn widen(t: Term, other: &Sort) -> Term {
    match (t, other) {
        (Term::Lit(Value::Int(i)), Sort::Base(BaseType::Double)) => Term::Lit(Value::double(i as f64)),
        (t, _) => t,
    }
}

fn widen_pair(l: Term, r: Term) -> (Term, Term) {
    let (ls, rs) = (l.sort(), r.sort());
    (widen(l, &rs), widen(r, &ls))
}

struct Scope {
    vars: BTreeMap<String, (String, bool)>,
}

impl Ctx<'_> {
    fn binders(
        &mut self,
        raw: &[RawBinder],
        entity: &dyn Fn(&str) -> Option<String>,
        existential: bool,
        scope: &mut Scope,
    ) -> Vec<Binder> {
        let mut out = Vec::new();
        for b in raw {
            let Some(e) = entity(&b.entity.text) else {
                self.error(b.entity.span, format!("unknown entity `{}`", b.entity.text));
                continue;
            };
            if scope.vars.insert(b.var.text.clone(), (e.clone(), existential)).is_some() {
                self.error(b.var.span, format!("variable `{}` is declared twice", b.var.text));
                continue;
            }
            out.push(Binder::new(b.var.text.clone(), e));
        }
        out
    }

    fn term(&mut self, raw: &RawTerm, schema: &Schema, scope: &Scope, universal_only: bool, conclusion: bool) -> Option<Term> {
        match raw {
            RawTerm::Lit { value, .. } => Some(Term::Lit(value.clone())),
            RawTerm::Path { var, steps } => {
                let Some((entity, existential)) = scope.vars.get(&var.text) else {
                    self.error(var.span, format!("unbound variable `{}`", var.text));
                    return None;
                };
                if universal_only && *existential {
                    self.error(var.span, format!("existential variable `{}` used in the premise", var.text));
                    return None;
                }
                let mut path = Path::identity(entity.clone());
                for step in steps {
                    path = match path.step(schema, &step.text) {
                        Ok(p) => p,
                        Err(e) => {
                            self.error(step.span, e.to_string());
                            return None;
                        }
                    };
                }
                Some(Term::Path {
                    var: var.text.clone(),
                    path,
                })
            }
            RawTerm::App { func, args, span } => {
                if conclusion {
                    self.error(*span, format!("function application `{}` in a conclusion", func.text));
                    return None;
                }
                let Some(f) = Function::lookup(&func.text) else {
                    self.error(func.span, format!("unknown function `{}`", func.text));
                    return None;
                };
                if args.len() != 2 {
                    self.error(*span, format!("`{}` takes 2 arguments, got {}", f.name(), args.len()));
                    return None;
                }
                let mut out = Vec::new();
                for (a, ty) in args.iter().zip(f.arguments()) {
                    let t = widen(self.term(a, schema, scope, universal_only, conclusion)?, &Sort::Base(ty));
                    if t.sort() != Sort::Base(ty) {
                        self.error(a.span(), format!("argument of `{}` must be {ty}, found {}", f.name(), t.sort()));
                        return None;
                    }
                    out.push(t);
                }
                Some(Term::App { func: f, args: out })
            }
        }
    }

    fn atom(&mut self, raw: &RawAtom, schema: &Schema, scope: &Scope, premise: bool) -> Option<(Predicate, Term, Term)> {
        let l = self.term(&raw.lhs, schema, scope, premise, !premise);
        let r = self.term(&raw.rhs, schema, scope, premise, !premise);
        let (l, r) = widen_pair(l?, r?);
        let (ls, rs) = (l.sort(), r.sort());
        let span = raw.lhs.span().to(raw.rhs.span());
        if ls != rs {
            self.error(span, format!("`{l} {} {r}` compares {ls} with {rs}", raw.pred.symbol()));
            return None;
        }
        let ok = match &ls {
            Sort::Base(ty) => raw.pred.accepts(*ty),
            Sort::Entity(_) => raw.pred == Predicate::Eq,
        };
        if !ok {
            self.error(raw.pred_span, format!("`{}` is not defined on {ls}", raw.pred.symbol()));
            return None;
        }
        Some((raw.pred, l, r))
    }

    fn constraint(
        &mut self,
        raw: &RawConstraint,
        schema: &Schema,
        entity: &dyn Fn(&str) -> Option<String>,
        default_label: String,
    ) -> Option<Constraint> {
        let before = self.diags.len();
        let mut scope = Scope { vars: BTreeMap::new() };
        let universals = self.binders(&raw.universals, entity, false, &mut scope);
        let existentials = self.binders(&raw.existentials, entity, true, &mut scope);
        let premise: Vec<Atom> = raw
            .premise
            .iter()
            .filter_map(|a| self.atom(a, schema, &scope, true))
            .map(|(pred, lhs, rhs)| Atom { pred, lhs, rhs })
            .collect();
        let conclusion: Vec<Equation> = raw
            .conclusion
            .iter()
            .filter_map(|a| self.atom(a, schema, &scope, false))
            .map(|(_, lhs, rhs)| Equation { lhs, rhs })
            .collect();
        if self.diags.len() > before {
            return None;
        }
        let c = Constraint {
            label: raw.label.as_ref().map_or(default_label, |l| l.text.clone()),
            universals,
            premise,
            existentials,
            conclusion,
        };
        let problems = c.check(schema);
        if !problems.is_empty() {
            for p in problems {
                self.error(raw.span, p);
            }
            return None;
        }
        Some(c)
    }

    fn constraints(
        &mut self,
        raw: &[RawConstraint],
        schema: &Schema,
        entity: &dyn Fn(&str) -> Option<String>,
        taken: &mut BTreeSet<String>,
    ) -> Vec<Constraint> {
        let mut out = Vec::new();
        for (k, rc) in raw.iter().enumerate() {
            if let Some(c) = self.constraint(rc, schema, entity, format!("c{}", k + 1)) {
                if !taken.insert(c.label.clone()) {
                    let span = rc.label.as_ref().map_or(rc.span, |l| l.span);
                    self.error(span, format!("constraint label `{}` is used twice", c.label));
                    continue;
                }
                out.push(c);
            }
        }
        out
    }
}

pub fn resolve_schema(doc: &SourceDocument, raw: &RawSchema) -> Resolved<Schema> {
    let mut cx = Ctx { doc, diags: Vec::new() };
    let mut s = Schema::new(raw.name.text.clone());
    for e in &raw.entities {
        if s.has_entity(&e.text) {
            cx.error(e.span, format!("entity `{}` is declared twice", e.text));
        } else {
            s.entities.push(e.text.clone());
        }
    }
    let mut members: BTreeSet<(String, String)> = BTreeSet::new();
    let mut member = |cx: &mut Ctx, m: &RawMember, s: &Schema| -> bool {
        if !s.has_entity(&m.source.text) {
            cx.error(m.source.span, format!("unknown entity `{}`", m.source.text));
            return false;
        }
        if !members.insert((m.source.text.clone(), m.name.text.clone())) {
            cx.error(m.name.span, format!("`{}` is declared twice on `{}`", m.name.text, m.source.text));
            return false;
        }
        true
    };
    for m in &raw.foreign_keys {
        if !member(&mut cx, m, &s) {
            continue;
        }
        if !s.has_entity(&m.target.text) {
            cx.error(m.target.span, format!("unknown entity `{}`", m.target.text));
            continue;
        }
        s.foreign_keys.push(ForeignKey {
            name: m.name.text.clone(),
            source: m.source.text.clone(),
            target: m.target.text.clone(),
        });
    }
    for m in &raw.attributes {
        if !member(&mut cx, m, &s) {
            continue;
        }
        let Ok(ty) = m.target.text.parse::<BaseType>() else {
            cx.error(m.target.span, format!("unknown base type `{}`", m.target.text));
            continue;
        };
        s.attributes.push(Attribute {
            name: m.name.text.clone(),
            source: m.source.text.clone(),
            ty,
        });
    }
    if cx.diags.is_empty() {
        let entity = |e: &str| s.has_entity(e).then(|| e.to_string());
        let cs = cx.constraints(&raw.constraints, &s, &entity, &mut BTreeSet::new());
        s.constraints = cs;
        let report = validate_schema(&s);
        if !report.is_empty() {
            cx.error(raw.name.span, report.to_string().trim_end().to_string());
        }
    }
    cx.finish(s)
}

/// Resolves one constraint; entity names must be declared in `schema`.
pub fn resolve_constraint(doc: &SourceDocument, raw: &RawConstraint, schema: &Schema) -> Resolved<Constraint> {
    let mut cx = Ctx { doc, diags: Vec::new() };
    let entity = |e: &str| schema.has_entity(e).then(|| e.to_string());
    let c = cx.constraint(raw, schema, &entity, "c1".to_string());
    match c {
        Some(c) => cx.finish(c),
        None => Err(cx.diags),
    }
}

pub fn resolve_instance(doc: &SourceDocument, raw: &RawInstance, schema: &Arc<Schema>) -> Resolved<Instance> {
    let mut cx = Ctx { doc, diags: Vec::new() };
    if raw.schema.text != schema.name {
        cx.error(
            raw.schema.span,
            format!("instance `{}` is over `{}`, not `{}`", raw.name.text, raw.schema.text, schema.name),
        );
        return Err(cx.diags);
    }
    let mut inst = Instance::new(schema.clone()).with_name(raw.name.text.clone());
    let mut rows = Vec::new();
    for row in &raw.rows {
        if !schema.has_entity(&row.entity.text) {
            cx.error(row.entity.span, format!("unknown entity `{}`", row.entity.text));
            continue;
        }
        let added = match parse_fresh_label(&row.id.text) {
            Some((entity, round, counter)) if entity == row.entity.text => inst.add_fresh(entity, round, counter),
            _ => inst.add_element(&row.entity.text, &row.id.text),
        };
        match added {
            Ok(e) => rows.push((e, row)),
            Err(err) => cx.error(row.id.span, err.to_string()),
        }
    }
    let mut labels: BTreeMap<String, NullId> = BTreeMap::new();
    for (e, row) in rows {
        let entity = row.entity.text.as_str();
        let mut seen = BTreeSet::new();
        for (name, value) in &row.cells {
            if !seen.insert(name.text.as_str()) {
                cx.error(name.span, format!("`{}` is set twice on row `{}`", name.text, row.id.text));
                continue;
            }
            let result = match (schema.member(entity, &name.text), value) {
                (None, _) => {
                    cx.error(name.span, format!("entity `{entity}` has no member `{}`", name.text));
                    continue;
                }
                (Some(_), RawValue::Null(_)) => Ok(()),
                (Some(Member::ForeignKey(fk)), RawValue::Ident(id) | RawValue::Str(id)) => {
                    match inst.lookup(&fk.target, &id.text) {
                        Some(t) => inst.set_fk(e, &fk.name, t),
                        None => {
                            cx.error(id.span, format!("no row `{}` in `{}`", id.text, fk.target));
                            continue;
                        }
                    }
                }
                (Some(Member::ForeignKey(fk)), v) => {
                    cx.error(v.span(), format!("`{}` expects a row id of `{}`", fk.name, fk.target));
                    continue;
                }
                (Some(Member::Attribute(a)), RawValue::Label(l)) => {
                    let n = *labels.entry(l.text.clone()).or_insert_with(|| inst.new_null());
                    inst.set_attr_null(e, &a.name, n)
                }
                (Some(Member::Attribute(a)), v) => {
                    let literal = match v {
                        RawValue::Str(s) => Value::Str(s.text.clone()),
                        RawValue::Number(n, _) => n.clone(),
                        RawValue::Ident(t) if t.text == "true" || t.text == "false" => Value::Bool(t.text == "true"),
                        RawValue::Ident(t) => {
                            let d = doc
                                .error(t.span, format!("`{}` is not a value of `{}`", t.text, a.name))
                                .with_hint("string literals are double-quoted");
                            cx.diags.push(d);
                            continue;
                        }
                        RawValue::Null(_) | RawValue::Label(_) => unreachable!("handled above"),
                    };
                    inst.set_attr(e, &a.name, Some(literal))
                }
            };
            if let Err(err) = result {
                cx.error(value.span(), err.to_string());
            }
        }
    }
    cx.finish(inst)
}

/// Resolves an extension against already-resolved schemas. Returns the spec
/// together with its combined schema.
pub fn resolve_extension(
    doc: &SourceDocument,
    raw: &RawExtension,
    schemas: &[Schema],
) -> Resolved<(ExtensionSpec, CombinedSchema)> {
    let mut cx = Ctx { doc, diags: Vec::new() };
    let mut includes: Vec<Schema> = Vec::new();
    for name in &raw.includes {
        match schemas.iter().find(|s| s.name == name.text) {
            None => cx.error(name.span, format!("unknown schema `{}`", name.text)),
            Some(_) if includes.iter().any(|s| s.name == name.text) => {
                cx.error(name.span, format!("schema `{}` is included twice", name.text))
            }
            Some(s) => includes.push(s.clone()),
        }
    }
    if includes.is_empty() && cx.diags.is_empty() {
        cx.error(raw.name.span, format!("extension `{}` includes no schema", raw.name.text));
    }
    let mut identifications = Vec::new();
    for (l, r) in &raw.identifications {
        let mut ok = true;
        for q in [l, r] {
            match includes.iter().find(|s| s.name == q.schema.text) {
                None => {
                    cx.error(q.schema.span, format!("schema `{}` is not included", q.schema.text));
                    ok = false;
                }
                Some(s) if !s.has_entity(&q.entity.text) => {
                    cx.error(q.entity.span, format!("schema `{}` has no entity `{}`", q.schema.text, q.entity.text));
                    ok = false;
                }
                Some(_) => {}
            }
        }
        if ok && l.schema.text == r.schema.text {
            cx.error(
                l.schema.span.to(r.entity.span),
                format!(
                    "`{}.{}` and `{}.{}` belong to the same schema and cannot be identified",
                    l.schema.text, l.entity.text, r.schema.text, r.entity.text
                ),
            );
            ok = false;
        }
        if ok {
            identifications.push(Identification {
                left: QualifiedEntity::new(l.schema.text.clone(), l.entity.text.clone()),
                right: QualifiedEntity::new(r.schema.text.clone(), r.entity.text.clone()),
            });
        }
    }
    if !cx.diags.is_empty() {
        return Err(cx.diags);
    }
    let mut spec = ExtensionSpec {
        name: raw.name.text.clone(),
        includes,
        identifications,
        constraints: Vec::new(),
    };
    let bare = match combine_schemas(&spec) {
        Ok(c) => c,
        Err(e) => {
            cx.error(raw.name.span, e.to_string());
            return Err(cx.diags);
        }
    };
    let entity = |e: &str| bare.resolve_entity(e);
    let mut taken: BTreeSet<String> = bare.schema.constraints.iter().map(|c| c.label.clone()).collect();
    spec.constraints = cx.constraints(&raw.constraints, &bare.schema, &entity, &mut taken);
    if !cx.diags.is_empty() {
        return Err(cx.diags);
    }
    match combine_schemas(&spec) {
        Ok(c) => cx.finish((spec, c)),
        Err(e) => {
            cx.error(raw.name.span, e.to_string());
            Err(cx.diags)
        }
    }
}

pub fn resolve_query(doc: &SourceDocument, raw: &RawQuery, combined: &CombinedSchema) -> Resolved<QuerySpec> {
    let mut cx = Ctx { doc, diags: Vec::new() };
    if raw.target.text != combined.name() {
        cx.error(
            raw.target.span,
            format!("query targets `{}` but the extension is `{}`", raw.target.text, combined.name()),
        );
        return Err(cx.diags);
    }
    let schema = &combined.schema;
    let mut scope = Scope { vars: BTreeMap::new() };
    let entity = |e: &str| combined.resolve_entity(e);
    let from = cx.binders(&raw.from, &entity, false, &mut scope);
    let atoms: Vec<Atom> = raw
        .atoms
        .iter()
        .filter_map(|a| cx.atom(a, schema, &scope, true))
        .map(|(pred, lhs, rhs)| Atom { pred, lhs, rhs })
        .collect();
    let mut columns = BTreeSet::new();
    let mut attributes = Vec::new();
    for (column, t) in &raw.attributes {
        if !columns.insert(column.text.as_str()) {
            cx.error(column.span, format!("column `{}` is declared twice", column.text));
            continue;
        }
        if let Some(term) = cx.term(t, schema, &scope, true, false) {
            attributes.push((column.text.clone(), term));
        }
    }
    let q = QuerySpec {
        name: raw.name.text.clone(),
        target: raw.target.text.clone(),
        from,
        atoms,
        attributes,
    };
    if cx.diags.is_empty() {
        for p in q.check(schema) {
            cx.error(raw.name.span, p);
        }
    }
    cx.finish(q)
}

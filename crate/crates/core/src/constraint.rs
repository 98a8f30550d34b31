//! Terms, atoms and existential Horn clauses
//! `forall x.. where premise -> exists u.. where conclusion`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::path::Path;
use crate::schema::{Schema, Sort};
use crate::typeside::{Function, Predicate, Value};

/// A variable declaration `name : Entity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: String,
    pub entity: String,
}

impl Binder {
    pub fn new(name: impl Into<String>, entity: impl Into<String>) -> Self {
        Binder {
            name: name.into(),
            entity: entity.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// A path applied to a bound variable; the identity path is the variable.
    Path { var: String, path: Path },
    Lit(Value),
    App { func: Function, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>, entity: impl Into<String>) -> Term {
        Term::Path {
            var: name.into(),
            path: Path::identity(entity),
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Path { path, .. } => path.target.clone(),
            Term::Lit(v) => Sort::Base(v.base_type()),
            Term::App { func, .. } => Sort::Base(func.result()),
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Path { var, .. } => {
                out.insert(var);
            }
            Term::Lit(_) => {}
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// The bare variable, if the term is one.
    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Path { var, path } if path.is_identity() => Some(var),
            _ => None,
        }
    }

    fn contains_app(&self) -> bool {
        matches!(self, Term::App { .. })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Path { var, path } => {
                f.write_str(var)?;
                for n in path.names() {
                    write!(f, ".{n}")?;
                }
                Ok(())
            }
            Term::Lit(v) => write!(f, "{v}"),
            Term::App { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A premise atom `lhs <pred> rhs`. Entity-sorted atoms only use `=`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: Predicate,
    pub lhs: Term,
    pub rhs: Term,
}

impl Atom {
    pub fn eq(lhs: Term, rhs: Term) -> Atom {
        Atom {
            pred: Predicate::Eq,
            lhs,
            rhs,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.pred.symbol(), self.rhs)
    }
}

/// A conclusion equation `lhs = rhs` between paths or literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    /// Equality-generating: no existential variables.
    Egd,
    /// Tuple-generating: at least one existential variable.
    Tgd,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::Egd => "EGD",
            ConstraintKind::Tgd => "TGD",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub label: String,
    pub universals: Vec<Binder>,
    pub premise: Vec<Atom>,
    pub existentials: Vec<Binder>,
    pub conclusion: Vec<Equation>,
}

pub fn classify_constraint(c: &Constraint) -> ConstraintKind {
    if c.existentials.is_empty() {
        ConstraintKind::Egd
    } else {
        ConstraintKind::Tgd
    }
}

impl Constraint {
    pub fn kind(&self) -> ConstraintKind {
        classify_constraint(self)
    }

    pub fn binder(&self, var: &str) -> Option<&Binder> {
        self.universals
            .iter()
            .chain(&self.existentials)
            .find(|b| b.name == var)
    }

    /// Type-checks the constraint against `schema`, returning every problem.
    pub fn check(&self, schema: &Schema) -> Vec<String> {
        let mut problems = Vec::new();
        let mut scope: BTreeMap<&str, &str> = BTreeMap::new();
        for b in self.universals.iter().chain(&self.existentials) {
            if !schema.has_entity(&b.entity) {
                problems.push(format!("variable `{}` has unknown entity `{}`", b.name, b.entity));
            }
            if scope.insert(&b.name, &b.entity).is_some() {
                problems.push(format!("variable `{}` is declared twice", b.name));
            }
        }
        let universal: BTreeSet<&str> = self.universals.iter().map(|b| b.name.as_str()).collect();

        for atom in &self.premise {
            for t in [&atom.lhs, &atom.rhs] {
                check_term(t, schema, &scope, Some(&universal), &mut problems);
            }
            let (l, r) = (atom.lhs.sort(), atom.rhs.sort());
            if l != r {
                problems.push(format!("`{atom}` compares {l} with {r}"));
            } else if let Sort::Base(ty) = l {
                if !atom.pred.accepts(ty) {
                    problems.push(format!("`{}` is not defined on {ty}", atom.pred.symbol()));
                }
            } else if atom.pred != Predicate::Eq {
                problems.push(format!("`{atom}` orders entity-sorted terms"));
            }
        }
        for eq in &self.conclusion {
            for t in [&eq.lhs, &eq.rhs] {
                if t.contains_app() {
                    problems.push(format!("function application `{t}` in a conclusion"));
                }
                check_term(t, schema, &scope, None, &mut problems);
            }
            let (l, r) = (eq.lhs.sort(), eq.rhs.sort());
            if l != r {
                problems.push(format!("`{eq}` equates {l} with {r}"));
            }
        }
        problems
    }

    /// Re-expresses the constraint over another schema by renaming entities
    /// and members; paths are re-resolved against `to`.
    pub fn translate(
        &self,
        from: &Schema,
        to: &Schema,
        entity: &dyn Fn(&str) -> Option<String>,
        member: &dyn Fn(&str, &str) -> Option<String>,
    ) -> Result<Constraint, String> {
        let binders = |bs: &[Binder]| -> Result<Vec<Binder>, String> {
            bs.iter()
                .map(|b| {
                    entity(&b.entity)
                        .map(|e| Binder::new(b.name.clone(), e))
                        .ok_or_else(|| format!("no image for entity `{}`", b.entity))
                })
                .collect()
        };
        let term = |t: &Term| translate_term(t, from, to, entity, member);
        Ok(Constraint {
            label: self.label.clone(),
            universals: binders(&self.universals)?,
            existentials: binders(&self.existentials)?,
            premise: self
                .premise
                .iter()
                .map(|a| {
                    Ok(Atom {
                        pred: a.pred,
                        lhs: term(&a.lhs)?,
                        rhs: term(&a.rhs)?,
                    })
                })
                .collect::<Result<_, String>>()?,
            conclusion: self
                .conclusion
                .iter()
                .map(|e| {
                    Ok(Equation {
                        lhs: term(&e.lhs)?,
                        rhs: term(&e.rhs)?,
                    })
                })
                .collect::<Result<_, String>>()?,
        })
    }
}

fn check_term(
    t: &Term,
    schema: &Schema,
    scope: &BTreeMap<&str, &str>,
    allowed: Option<&BTreeSet<&str>>,
    problems: &mut Vec<String>,
) {
    match t {
        Term::Path { var, path } => {
            let Some(entity) = scope.get(var.as_str()) else {
                problems.push(format!("unbound variable `{var}`"));
                return;
            };
            if let Some(allowed) = allowed {
                if !allowed.contains(var.as_str()) {
                    problems.push(format!("existential variable `{var}` used in the premise"));
                }
            }
            if path.root != *entity {
                problems.push(format!("path `{t}` starts at `{}`, not `{entity}`", path.root));
                return;
            }
            let names: Vec<&str> = path.names().collect();
            match Path::resolve(schema, entity, &names) {
                Ok(p) if p == *path => {}
                Ok(_) => problems.push(format!("path `{t}` does not match the schema")),
                Err(e) => problems.push(format!("path `{t}`: {e}")),
            }
        }
        Term::Lit(_) => {}
        Term::App { func, args } => {
            if args.len() != 2 {
                problems.push(format!("`{}` takes 2 arguments", func.name()));
            }
            for (arg, ty) in args.iter().zip(func.arguments()) {
                check_term(arg, schema, scope, allowed, problems);
                if arg.sort() != Sort::Base(ty) {
                    problems.push(format!("argument `{arg}` of `{}` must be {ty}", func.name()));
                }
            }
        }
    }
}

fn translate_term(
    t: &Term,
    from: &Schema,
    to: &Schema,
    entity: &dyn Fn(&str) -> Option<String>,
    member: &dyn Fn(&str, &str) -> Option<String>,
) -> Result<Term, String> {
    match t {
        Term::Path { var, path } => {
            let root = entity(&path.root).ok_or_else(|| format!("no image for `{}`", path.root))?;
            let mut old = Path::identity(path.root.clone());
            let mut new = Path::identity(root);
            for name in path.names() {
                let Sort::Entity(src) = old.target.clone() else {
                    return Err(format!("malformed path `{t}`"));
                };
                let renamed =
                    member(&src, name).ok_or_else(|| format!("no image for `{src}.{name}`"))?;
                old = old.step(from, name).map_err(|e| e.to_string())?;
                new = new.step(to, &renamed).map_err(|e| e.to_string())?;
            }
            Ok(Term::Path {
                var: var.clone(),
                path: new,
            })
        }
        Term::Lit(v) => Ok(Term::Lit(v.clone())),
        Term::App { func, args } => Ok(Term::App {
            func: *func,
            args: args
                .iter()
                .map(|a| translate_term(a, from, to, entity, member))
                .collect::<Result<_, _>>()?,
        }),
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: forall", self.label)?;
        for b in &self.universals {
            write!(f, " {}:{}", b.name, b.entity)?;
        }
        for (i, a) in self.premise.iter().enumerate() {
            f.write_str(if i == 0 { " where " } else { " and " })?;
            write!(f, "{a}")?;
        }
        f.write_str(" ->")?;
        if !self.existentials.is_empty() {
            f.write_str(" exists")?;
            for b in &self.existentials {
                write!(f, " {}:{}", b.name, b.entity)?;
            }
            f.write_str(" where")?;
        }
        for (i, e) in self.conclusion.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { " and " })?;
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

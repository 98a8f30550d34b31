//! `simple` conjunctive queries: a filtered cross product of from-bindings
//! with one projected column per output attribute.

mod plan;
mod table;

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::constraint::{Atom, Binder, Constraint, Term};
use crate::instance::eval::CTerm;
use crate::instance::matching::{Members, Mode, Pattern};
use crate::instance::{AttrValue, Instance, InstanceError, TermValue};
use crate::schema::Schema;

pub use plan::{explain, JoinPlan, PlanStep};
pub use table::ResultTable;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuerySpec {
    pub name: String,
    /// Name of the extension whose combined schema the query reads.
    pub target: String,
    pub from: Vec<Binder>,
    /// Equalities only.
    pub atoms: Vec<Atom>,
    pub attributes: Vec<(String, Term)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query `{query}` is ill-typed: {}", problems.join("; "))]
    IllTyped { query: String, problems: Vec<String> },
    #[error("column `{column}` is undefined on row {row}")]
    Undefined { column: String, row: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

impl QuerySpec {
    /// Type-checks against `schema`, listing every problem.
    pub fn check(&self, schema: &Schema) -> Vec<String> {
        let mut problems = Vec::new();
        if self.from.is_empty() {
            problems.push("no `from` bindings".to_string());
        }
        for a in &self.atoms {
            if a.pred != crate::typeside::Predicate::Eq {
                problems.push(format!("`{a}` is not an equality"));
            }
        }
        // Reuse constraint checking: the query body is a premise.
        let body = Constraint {
            label: self.name.clone(),
            universals: self.from.clone(),
            premise: self.atoms.clone(),
            existentials: Vec::new(),
            conclusion: Vec::new(),
        };
        problems.extend(body.check(schema));
        let mut columns = BTreeSet::new();
        for (column, term) in &self.attributes {
            if !columns.insert(column.as_str()) {
                problems.push(format!("column `{column}` is declared twice"));
            }
            let probe = Constraint {
                premise: vec![Atom::eq(term.clone(), term.clone())],
                ..body.clone()
            };
            problems.extend(probe.check(schema).into_iter().map(|p| format!("column `{column}`: {p}")));
        }
        problems
    }

    fn pattern(&self, schema: &Schema) -> Result<Pattern, InstanceError> {
        Pattern::new(
            schema,
            &self.from,
            0,
            self.atoms.iter().map(|a| (a.pred, &a.lhs, &a.rhs)),
            Mode::Premise,
        )
    }

    fn columns(&self, schema: &Schema) -> Result<Vec<CTerm>, InstanceError> {
        let slot = |name: &str| self.from.iter().position(|b| b.name == name);
        self.attributes
            .iter()
            .map(|(_, t)| CTerm::compile(schema, &slot, t))
            .collect()
    }
}

/// Renders one projected value; labelled nulls show as `-`.
fn render(inst: &Instance, v: &TermValue) -> Option<String> {
    match v {
        TermValue::Elem(e) => Some(inst.display(*e)),
        TermValue::Val(AttrValue::Const(c)) => Some(c.render()),
        TermValue::Val(AttrValue::Null(_)) => Some("-".to_string()),
        TermValue::Undefined => None,
    }
}

/// Evaluates `q` over `sat`. Rows come out in lexicographic order of the
/// from-bindings' canonical ids.
pub fn evaluate(q: &QuerySpec, sat: &Instance) -> Result<ResultTable, QueryError> {
    let problems = q.check(sat.schema());
    if !problems.is_empty() {
        return Err(QueryError::IllTyped {
            query: q.name.clone(),
            problems,
        });
    }
    let pattern = q.pattern(sat.schema())?;
    let columns = q.columns(sat.schema())?;
    let members = Members::of(sat);
    let mut table = ResultTable::new(q.attributes.iter().map(|(c, _)| c.clone()).collect());
    let mut failure = None;
    let mut env = Vec::new();
    let _ = pattern.for_each(sat, &members, &mut env, &mut |m| {
        let mut row = Vec::with_capacity(columns.len());
        for (i, c) in columns.iter().enumerate() {
            match render(sat, &sat.eval_term(m, c)) {
                Some(v) => row.push(v),
                None => {
                    failure = Some(QueryError::Undefined {
                        column: q.attributes[i].0.clone(),
                        row: table.rows.len() + 1,
                    });
                    return ControlFlow::Break(());
                }
            }
        }
        table.rows.push(row);
        ControlFlow::Continue(())
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(table),
    }
}

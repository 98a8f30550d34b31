use std::collections::BTreeMap;
use std::fmt;

use crate::constraint::Term;
use crate::instance::Instance;
use crate::typeside::Value;

use super::{evaluate, QueryError, QuerySpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStep {
    pub var: String,
    pub entity: String,
    /// `scan`, `functional` or `index`.
    pub access: &'static str,
    pub entity_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinPlan {
    pub query: String,
    pub steps: Vec<PlanStep>,
    pub filters: Vec<String>,
    /// Size of the unfiltered cross product.
    pub cross_product: usize,
    pub result_rows: usize,
    /// Set when the where clause equates two distinct literals.
    pub contradiction: Option<String>,
}

impl JoinPlan {
    pub fn is_join(&self) -> bool {
        self.steps.len() > 1
    }
}

/// Looks for a chain of where-equalities forcing two different literals equal.
fn contradiction(q: &QuerySpec) -> Option<String> {
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut parent: Vec<usize> = Vec::new();
    let mut lit: Vec<Option<Value>> = Vec::new();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut node = |t: &Term, parent: &mut Vec<usize>, lit: &mut Vec<Option<Value>>| {
        *ids.entry(t.to_string()).or_insert_with(|| {
            parent.push(parent.len());
            lit.push(match t {
                Term::Lit(v) => Some(v.clone()),
                _ => None,
            });
            parent.len() - 1
        })
    };
    for a in &q.atoms {
        let l = node(&a.lhs, &mut parent, &mut lit);
        let r = node(&a.rhs, &mut parent, &mut lit);
        let (rl, rr) = (find(&mut parent, l), find(&mut parent, r));
        if rl == rr {
            continue;
        }
        match (lit[rl].clone(), lit[rr].clone()) {
            (Some(x), Some(y)) if x != y => return Some(format!("{x} = {y}")),
            (x, y) => {
                parent[rr] = rl;
                lit[rl] = x.or(y);
            }
        }
    }
    None
}

/// Describes how `evaluate` runs `q` on `sat`, with the actual row count.
pub fn explain(q: &QuerySpec, sat: &Instance) -> Result<JoinPlan, QueryError> {
    let rows = evaluate(q, sat)?;
    let pattern = q.pattern(sat.schema())?;
    let steps: Vec<PlanStep> = q
        .from
        .iter()
        .zip(pattern.access_kinds())
        .map(|(b, access)| PlanStep {
            var: b.name.clone(),
            entity: b.entity.clone(),
            access,
            entity_size: sat.count(&b.entity),
        })
        .collect();
    Ok(JoinPlan {
        query: q.name.clone(),
        cross_product: steps.iter().map(|s| s.entity_size).product(),
        steps,
        filters: q.atoms.iter().map(|a| a.to_string()).collect(),
        result_rows: rows.len(),
        contradiction: contradiction(q),
    })
}

impl fmt::Display for JoinPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "plan for {}", self.query)?;
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "  {}. {}:{} {} ({} rows)", i + 1, s.var, s.entity, s.access, s.entity_size)?;
        }
        if !self.is_join() {
            writeln!(f, "no join")?;
        }
        for flt in &self.filters {
            writeln!(f, "filter {flt}")?;
        }
        writeln!(f, "cross product {}", self.cross_product)?;
        writeln!(f, "result {}", self.result_rows)?;
        if let Some(c) = &self.contradiction {
            writeln!(f, "empty result: where clause forces {c}")?;
        }
        Ok(())
    }
}

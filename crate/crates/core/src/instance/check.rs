use std::fmt;
use std::ops::ControlFlow;

use crate::constraint::{Binder, Constraint};
use crate::typeside::Predicate;

use super::matching::{Members, Mode, Pattern};
use super::{Elem, Instance, InstanceError};

/// A constraint together with one premise match that has no witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violated {
    pub constraint: String,
    pub assignment: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub violations: Vec<Violated>,
}

impl SatisfactionReport {
    pub fn is_satisfied(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, label: &str) -> bool {
        self.violations.iter().any(|v| v.constraint == label)
    }
}

impl fmt::Display for SatisfactionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            write!(f, "violated {}:", v.constraint)?;
            for (var, e) in &v.assignment {
                write!(f, " {var}={e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Compiled premise and conclusion of one constraint.
pub(crate) struct CompiledConstraint {
    pub(crate) premise: Pattern,
    pub(crate) witness: Pattern,
}

impl CompiledConstraint {
    pub(crate) fn new(inst: &Instance, c: &Constraint) -> Result<CompiledConstraint, InstanceError> {
        let schema = inst.schema();
        let binders: Vec<Binder> = c.universals.iter().chain(&c.existentials).cloned().collect();
        let universals = c.universals.len();
        let premise = Pattern::new(
            schema,
            &c.universals,
            0,
            c.premise.iter().map(|a| (a.pred, &a.lhs, &a.rhs)),
            Mode::Premise,
        )?;
        let witness = Pattern::new(
            schema,
            &binders,
            universals,
            c.conclusion.iter().map(|e| (Predicate::Eq, &e.lhs, &e.rhs)),
            Mode::Witness,
        )?;
        Ok(CompiledConstraint { premise, witness })
    }

    /// Premise matches lacking a witness, in enumeration order.
    pub(crate) fn unwitnessed(&self, inst: &Instance, members: &Members) -> Vec<Vec<Elem>> {
        let mut out = Vec::new();
        let mut env = Vec::new();
        let _ = self.premise.for_each(inst, members, &mut env, &mut |m| {
            let mut w: Vec<Option<Elem>> = m.to_vec();
            if !self.witness.exists(inst, members, &mut w) {
                out.push(m.iter().map(|e| e.expect("bound")).collect());
            }
            ControlFlow::Continue(())
        });
        out
    }
}

/// Checks every constraint against `i`, listing each violated constraint with
/// its first unwitnessed premise match.
pub fn check_model(i: &Instance, cs: &[Constraint]) -> Result<SatisfactionReport, InstanceError> {
    let members = Members::of(i);
    let mut report = SatisfactionReport::default();
    for c in cs {
        let compiled = CompiledConstraint::new(i, c)?;
        if let Some(first) = compiled.unwitnessed(i, &members).into_iter().next() {
            report.violations.push(Violated {
                constraint: c.label.clone(),
                assignment: c
                    .universals
                    .iter()
                    .zip(first)
                    .map(|(b, e)| (b.name.clone(), i.display(e)))
                    .collect(),
            });
        }
    }
    Ok(report)
}

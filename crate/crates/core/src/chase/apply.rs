//! Firing one constraint on one assignment.

use std::ops::ControlFlow;

use crate::constraint::Constraint;
use crate::instance::eval::{CTerm, CompiledPath};
use crate::instance::matching::{Members, Mode, Pattern};
use crate::instance::{AttrValue, Elem, Instance, InstanceError};
use crate::typeside::Predicate;

use super::trace::{Action, Cell};

pub(crate) struct Compiled {
    pub(crate) label: String,
    pub(crate) is_tgd: bool,
    pub(crate) universals: Vec<(String, String)>,
    existentials: Vec<String>,
    pub(crate) premise: Pattern,
    witness: Pattern,
    equations: Vec<(CTerm, CTerm)>,
}

impl Compiled {
    pub(crate) fn new(inst: &Instance, c: &Constraint) -> Result<Compiled, InstanceError> {
        let schema = inst.schema();
        let binders: Vec<_> = c.universals.iter().chain(&c.existentials).cloned().collect();
        let slot = |name: &str| binders.iter().position(|b| b.name == name);
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
            c.universals.len(),
            c.conclusion.iter().map(|e| (Predicate::Eq, &e.lhs, &e.rhs)),
            Mode::Witness,
        )?;
        let equations = c
            .conclusion
            .iter()
            .map(|e| Ok((CTerm::compile(schema, &slot, &e.lhs)?, CTerm::compile(schema, &slot, &e.rhs)?)))
            .collect::<Result<_, InstanceError>>()?;
        Ok(Compiled {
            label: c.label.clone(),
            is_tgd: !c.existentials.is_empty(),
            universals: c.universals.iter().map(|b| (b.name.clone(), b.entity.clone())).collect(),
            existentials: c.existentials.iter().map(|b| b.entity.clone()).collect(),
            premise,
            witness,
            equations,
        })
    }

    pub(crate) fn witness_needs_members(&self) -> bool {
        self.witness.needs_members()
    }

    pub(crate) fn is_witnessed(&self, inst: &Instance, members: &Members, assignment: &[Elem]) -> bool {
        let mut env: Vec<Option<Elem>> = assignment.iter().map(|e| Some(inst.find(*e))).collect();
        self.witness.exists(inst, members, &mut env)
    }

    /// Premise matches without a witness, in enumeration order.
    pub(crate) fn unwitnessed(&self, inst: &Instance, members: &Members) -> Vec<Vec<Elem>> {
        let mut out = Vec::new();
        let mut env = Vec::new();
        let _ = self.premise.for_each(inst, members, &mut env, &mut |m| {
            let m: Vec<Elem> = m.iter().map(|e| e.expect("bound")).collect();
            if !self.is_witnessed(inst, members, &m) {
                out.push(m);
            }
            ControlFlow::Continue(())
        });
        out
    }

    pub(crate) fn premise_holds(&self, inst: &Instance, assignment: &[Elem]) -> bool {
        let env: Vec<Option<Elem>> = assignment.iter().map(|e| Some(inst.find(*e))).collect();
        self.premise.holds_for(inst, &env)
    }
}

/// Outcome of firing on one assignment.
#[derive(Debug)]
pub(crate) enum Fired {
    Witnessed,
    /// Some equation cannot be acted on without inventing elements.
    Pending,
    Applied(Vec<Action>),
}

/// Source of fresh element labels within a round.
pub(crate) struct Fresh {
    pub(crate) round: u32,
    pub(crate) counter: u32,
}

impl Fresh {
    fn create(&mut self, inst: &mut Instance, entity: usize, out: &mut Vec<Action>) -> Result<Elem, InstanceError> {
        self.counter += 1;
        let name = inst.schema().entities[entity].clone();
        let e = inst.add_fresh(&name, self.round, self.counter)?;
        out.push(Action::Created {
            entity: name,
            label: inst.display(e),
        });
        Ok(e)
    }
}

enum Side {
    Elem(Elem),
    Val(AttrValue, Option<(Elem, usize)>),
    /// `fks[step]` is unset on `at`.
    Stuck { at: Elem, fk: usize, last: bool },
}

fn side(inst: &Instance, env: &[Elem], t: &CTerm) -> Side {
    match t {
        CTerm::Lit(v) => Side::Val(AttrValue::Const(v.clone()), None),
        CTerm::Path { slot, path } => walk(inst, env[*slot], path),
        CTerm::App { .. } => unreachable!("function applications are rejected in conclusions"),
    }
}

fn walk(inst: &Instance, e: Elem, p: &CompiledPath) -> Side {
    let mut cur = inst.find(e);
    for (step, &fk) in p.fks.iter().enumerate() {
        match inst.fk_value(cur, fk) {
            Some(next) => cur = next,
            None => {
                return Side::Stuck {
                    at: cur,
                    fk,
                    last: step + 1 == p.fks.len() && p.attr.is_none(),
                }
            }
        }
    }
    match p.attr {
        Some(a) => Side::Val(inst.attr_value(cur, a), Some((cur, a))),
        None => Side::Elem(cur),
    }
}

fn cell(inst: &Instance, (e, a): (Elem, usize)) -> Cell {
    Cell {
        entity: inst.entity_of(e).to_string(),
        element: inst.display(e),
        attr: inst.schema().attributes[a].name.clone(),
    }
}

/// Makes `l = r` hold. With `complete`, unset foreign keys along either path
/// are filled with fresh elements; otherwise such equations are `Pending`.
fn equate(
    inst: &mut Instance,
    env: &[Elem],
    l: &CTerm,
    r: &CTerm,
    complete: bool,
    fresh: &mut Fresh,
    out: &mut Vec<Action>,
) -> Result<bool, InstanceError> {
    loop {
        let (a, b) = (side(inst, env, l), side(inst, env, r));
        match (a, b) {
            (Side::Elem(x), Side::Elem(y)) => {
                if x != y {
                    let action = Action::Merged {
                        entity: inst.entity_of(x).to_string(),
                        left: inst.display(x),
                        right: inst.display(y),
                    };
                    inst.merge(x, y)?;
                    out.push(action);
                }
                return Ok(true);
            }
            (Side::Val(x, cx), Side::Val(y, cy)) => {
                let attr = cx.or(cy).map(|(_, a)| inst.schema().attributes[a].name.clone()).unwrap_or_default();
                let action = match (&x, &y, cx, cy) {
                    (AttrValue::Null(_), AttrValue::Const(v), Some(c), _)
                    | (AttrValue::Const(v), AttrValue::Null(_), _, Some(c)) => Some(Action::Assigned {
                        cell: cell(inst, c),
                        value: v.clone(),
                    }),
                    (AttrValue::Null(_), AttrValue::Null(_), Some(c), Some(d)) => Some(Action::Unified {
                        left: cell(inst, c),
                        right: cell(inst, d),
                    }),
                    _ => None,
                };
                if inst.unify(&x, &y, &attr)? {
                    out.extend(action);
                }
                return Ok(true);
            }
            (Side::Stuck { at, fk, last: true }, Side::Elem(t)) | (Side::Elem(t), Side::Stuck { at, fk, last: true }) => {
                out.push(Action::SetFk {
                    entity: inst.entity_of(at).to_string(),
                    element: inst.display(at),
                    fk: inst.schema().foreign_keys[fk].name.clone(),
                    target: inst.display(t),
                });
                inst.assign_fk(at, fk, t);
                return Ok(true);
            }
            (Side::Stuck { at, fk, .. }, _) | (_, Side::Stuck { at, fk, .. }) => {
                if !complete {
                    return Ok(false);
                }
                let target = inst.layout().fk_target[fk];
                let t = fresh.create(inst, target, out)?;
                out.push(Action::SetFk {
                    entity: inst.entity_of(at).to_string(),
                    element: inst.display(at),
                    fk: inst.schema().foreign_keys[fk].name.clone(),
                    target: inst.display(t),
                });
                inst.assign_fk(at, fk, t);
            }
            (Side::Elem(_), Side::Val(..)) | (Side::Val(..), Side::Elem(_)) => {
                unreachable!("conclusions are type-checked")
            }
        }
    }
}

/// Fires `c` on `assignment` (universals only). TGDs create their
/// existential elements first and always complete; EGDs complete only when
/// asked to.
pub(crate) fn fire(
    inst: &mut Instance,
    c: &Compiled,
    members: &Members,
    assignment: &[Elem],
    complete: bool,
    fresh: &mut Fresh,
) -> Result<Fired, InstanceError> {
    if c.is_witnessed(inst, members, assignment) {
        return Ok(Fired::Witnessed);
    }
    let mut out = Vec::new();
    let mut env: Vec<Elem> = assignment.iter().map(|e| inst.find(*e)).collect();
    for entity in &c.existentials {
        let ei = inst.schema().entity_index(entity).expect("checked binder");
        env.push(fresh.create(inst, ei, &mut out)?);
    }
    let complete = complete || c.is_tgd;
    let mut pending = false;
    for (l, r) in &c.equations {
        let env_now: Vec<Elem> = env.iter().map(|e| inst.find(*e)).collect();
        if !equate(inst, &env_now, l, r, complete, fresh, &mut out)? {
            pending = true;
        }
    }
    if out.is_empty() {
        Ok(if pending { Fired::Pending } else { Fired::Witnessed })
    } else {
        Ok(Fired::Applied(out))
    }
}

//! Round-based parallel chase.
//!
//! Each round matches every constraint against the instance as it stood at
//! the start of the round, in declaration order, and collects the premise
//! matches lacking a witness. EGD matches are applied first, retrying those
//! that wait on a foreign key another EGD sets in the same round; TGD matches
//! follow. Every match is re-checked just before it fires, so a match made
//! redundant earlier in the round does nothing. A round that changes nothing
//! ends the chase.

mod apply;
mod trace;
mod universality;

use thiserror::Error;

use crate::acyclicity::{check_weak_acyclicity, WeakAcyclicity};
use crate::constraint::{Binder, Constraint, Equation, Term};
use crate::instance::matching::Members;
use crate::instance::{ConstantClash, Elem, Instance, InstanceError, Origin};
use crate::path::Path;
use crate::schema::Schema;

use apply::{fire, Compiled, Fired, Fresh};

pub use trace::{Action, Cell, ChaseTrace, ReplayError, TraceEntry};
pub use universality::{verify_universality, Universality};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaseConfig {
    pub max_rounds: u32,
    pub require_weak_acyclicity: bool,
    /// Add one TGD per foreign key making it total.
    pub totality: bool,
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig {
            max_rounds: 10_000,
            require_weak_acyclicity: true,
            totality: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ChaseError {
    #[error("max_rounds must be at least 1")]
    NoRounds,
    #[error("constraint `{label}` is ill-typed: {}", problems.join("; "))]
    IllTyped { label: String, problems: Vec<String> },
    #[error("constraints are not weakly acyclic: {0}")]
    NotWeaklyAcyclic(String),
    #[error("the premise of `{0}` does not hold for this assignment")]
    PremiseFails(String),
    #[error("`{label}` expects {expected} universal variables, got {found}")]
    Arity {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Clone, Debug)]
pub enum ChaseOutcome {
    Saturated {
        instance: Instance,
        trace: ChaseTrace,
    },
    /// Two distinct constants were forced equal. The trace holds every
    /// action applied before the clash.
    Failed {
        clash: ConstantClash,
        constraint: String,
        round: u32,
        trace: ChaseTrace,
    },
    Exhausted {
        rounds: u32,
        instance: Instance,
        trace: ChaseTrace,
    },
}

impl ChaseOutcome {
    pub fn trace(&self) -> &ChaseTrace {
        match self {
            ChaseOutcome::Saturated { trace, .. }
            | ChaseOutcome::Failed { trace, .. }
            | ChaseOutcome::Exhausted { trace, .. } => trace,
        }
    }

    pub fn saturated(self) -> Option<(Instance, ChaseTrace)> {
        match self {
            ChaseOutcome::Saturated { instance, trace } => Some((instance, trace)),
            _ => None,
        }
    }
}

/// `total_<Entity>_<fk>: forall x:Entity -> exists y:Target where x.fk = y`
/// for every foreign key, in schema order.
pub fn totality_constraints(s: &Schema) -> Vec<Constraint> {
    s.foreign_keys
        .iter()
        .map(|fk| Constraint {
            label: format!("total_{}_{}", fk.source, fk.name),
            universals: vec![Binder::new("x", fk.source.clone())],
            premise: Vec::new(),
            existentials: vec![Binder::new("y", fk.target.clone())],
            conclusion: vec![Equation {
                lhs: Term::Path {
                    var: "x".into(),
                    path: Path::resolve(s, &fk.source, &[fk.name.as_str()]).expect("declared foreign key"),
                },
                rhs: Term::var("y", fk.target.clone()),
            }],
        })
        .collect()
}

/// The constraints the chase enforces: `cs`, then totality if configured.
pub fn effective_constraints(s: &Schema, cs: &[Constraint], cfg: &ChaseConfig) -> Vec<Constraint> {
    let mut all = cs.to_vec();
    if cfg.totality {
        all.extend(totality_constraints(s));
    }
    all
}

fn type_check(s: &Schema, cs: &[Constraint]) -> Result<(), ChaseError> {
    for c in cs {
        let problems = c.check(s);
        if !problems.is_empty() {
            return Err(ChaseError::IllTyped {
                label: c.label.clone(),
                problems,
            });
        }
    }
    Ok(())
}

/// Names the assignment as it reads before the constraint fires.
fn named(inst: &Instance, c: &Compiled, assignment: &[Elem]) -> Vec<(String, String)> {
    c.universals
        .iter()
        .zip(assignment)
        .map(|((v, _), e)| (v.clone(), inst.display(*e)))
        .collect()
}

/// Saturates `pre` under `cs`.
pub fn chase(pre: &Instance, cs: &[Constraint], cfg: &ChaseConfig) -> Result<ChaseOutcome, ChaseError> {
    if cfg.max_rounds == 0 {
        return Err(ChaseError::NoRounds);
    }
    let schema = pre.schema();
    type_check(schema, cs)?;
    if cfg.require_weak_acyclicity {
        if let w @ WeakAcyclicity::CyclicWithWitness(_) = check_weak_acyclicity(cs, schema) {
            return Err(ChaseError::NotWeaklyAcyclic(w.to_string()));
        }
    }
    let all = effective_constraints(schema, cs, cfg);
    let mut inst = pre.clone();
    let compiled: Vec<Compiled> = all
        .iter()
        .map(|c| Compiled::new(&inst, c))
        .collect::<Result<_, _>>()?;
    let mut trace = ChaseTrace::default();

    for round in 1..=cfg.max_rounds {
        trace.rounds = round;
        let mut members = Members::of(&inst);
        let mut egds: Vec<(usize, Vec<Elem>)> = Vec::new();
        let mut tgds: Vec<(usize, Vec<Elem>)> = Vec::new();
        for (ci, c) in compiled.iter().enumerate() {
            let matches = c.unwitnessed(&inst, &members);
            let bucket = if c.is_tgd { &mut tgds } else { &mut egds };
            bucket.extend(matches.into_iter().map(|m| (ci, m)));
        }
        if egds.is_empty() && tgds.is_empty() {
            return Ok(ChaseOutcome::Saturated { instance: inst, trace });
        }

        let mut fresh = Fresh { round, counter: 0 };
        let mut applied = 0usize;
        let mut stale = false;
        let run = |inst: &mut Instance,
                       members: &mut Members,
                       stale: &mut bool,
                       ci: usize,
                       m: &[Elem],
                       complete: bool,
                       fresh: &mut Fresh,
                       trace: &mut ChaseTrace|
         -> Result<Step, ChaseError> {
            let c = &compiled[ci];
            if *stale && c.witness_needs_members() {
                *members = Members::of(inst);
                *stale = false;
            }
            let before = inst.element_count();
            let assignment = named(inst, c, m);
            match fire(inst, c, members, m, complete, fresh) {
                Ok(Fired::Applied(actions)) => {
                    for action in actions {
                        trace.entries.push(TraceEntry {
                            round,
                            constraint: c.label.clone(),
                            assignment: assignment.clone(),
                            action,
                        });
                    }
                    if inst.element_count() != before {
                        *stale = true;
                    }
                    Ok(Step::Applied)
                }
                Ok(Fired::Pending) => Ok(Step::Pending),
                Ok(Fired::Witnessed) => Ok(Step::Witnessed),
                Err(InstanceError::Clash(clash)) => Ok(Step::Clash(clash)),
                Err(e) => Err(e.into()),
            }
        };

        // EGDs, retrying matches that wait on a foreign key.
        let mut queue = egds;
        loop {
            let mut progress = false;
            let mut waiting = Vec::new();
            for (ci, m) in queue {
                match run(&mut inst, &mut members, &mut stale, ci, &m, false, &mut fresh, &mut trace)? {
                    Step::Applied => {
                        applied += 1;
                        progress = true;
                    }
                    Step::Pending => waiting.push((ci, m)),
                    Step::Witnessed => {}
                    Step::Clash(clash) => return Ok(failed(clash, &compiled[ci], round, trace)),
                }
            }
            queue = waiting;
            if !progress || queue.is_empty() {
                break;
            }
        }
        for (ci, m) in tgds {
            match run(&mut inst, &mut members, &mut stale, ci, &m, true, &mut fresh, &mut trace)? {
                Step::Applied => applied += 1,
                Step::Pending | Step::Witnessed => {}
                Step::Clash(clash) => return Ok(failed(clash, &compiled[ci], round, trace)),
            }
        }
        // Matches still waiting with nothing else to do invent the missing
        // foreign-key values themselves.
        if applied == 0 {
            for (ci, m) in queue {
                match run(&mut inst, &mut members, &mut stale, ci, &m, true, &mut fresh, &mut trace)? {
                    Step::Applied => applied += 1,
                    Step::Pending | Step::Witnessed => {}
                    Step::Clash(clash) => return Ok(failed(clash, &compiled[ci], round, trace)),
                }
            }
        }
        if applied == 0 {
            return Ok(ChaseOutcome::Saturated { instance: inst, trace });
        }
    }
    Ok(ChaseOutcome::Exhausted {
        rounds: cfg.max_rounds,
        instance: inst,
        trace,
    })
}

enum Step {
    Applied,
    Pending,
    Witnessed,
    Clash(ConstantClash),
}

fn failed(clash: ConstantClash, c: &Compiled, round: u32, trace: ChaseTrace) -> ChaseOutcome {
    ChaseOutcome::Failed {
        clash,
        constraint: c.label.clone(),
        round,
        trace,
    }
}

/// What firing a single constraint did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FireOutcome {
    NoOp,
    /// An EGD whose conclusion runs through unset foreign keys.
    Blocked,
    Actions(Vec<Action>),
}

/// Fires `c` once on `assignment` (one element per universal variable).
/// Fresh elements are labelled with round 0.
pub fn fire_once(i: &mut Instance, c: &Constraint, assignment: &[Elem]) -> Result<FireOutcome, ChaseError> {
    type_check(i.schema(), std::slice::from_ref(c))?;
    if assignment.len() != c.universals.len() {
        return Err(ChaseError::Arity {
            label: c.label.clone(),
            expected: c.universals.len(),
            found: assignment.len(),
        });
    }
    let compiled = Compiled::new(i, c)?;
    let members = Members::of(i);
    if !compiled.premise_holds(i, assignment) {
        return Err(ChaseError::PremiseFails(c.label.clone()));
    }
    let used = (0..i.element_count())
        .filter(|&k| matches!(i.origin(Elem(k as u32)), Origin::Fresh { round: 0, .. }))
        .count() as u32;
    let mut fresh = Fresh { round: 0, counter: used };
    // Work on a copy so a clash leaves `i` untouched.
    let mut scratch = i.clone();
    match fire(&mut scratch, &compiled, &members, assignment, false, &mut fresh)? {
        Fired::Witnessed => Ok(FireOutcome::NoOp),
        Fired::Pending => Ok(FireOutcome::Blocked),
        Fired::Applied(actions) => {
            *i = scratch;
            Ok(FireOutcome::Actions(actions))
        }
    }
}

//! Enumeration of variable assignments satisfying a conjunction of atoms.
//!
//! Variables are bound in declaration order and candidates are visited in
//! class-key order, so matches come out lexicographically ordered. Two
//! shortcuts keep this from being a plain cross product: a variable pinned by
//! an atom `x = t` (with `t` over earlier variables) is bound directly, and a
//! variable joined to earlier ones by an equality is looked up in a hash index
//! built once per enumeration.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::constraint::{Binder, Term};
use crate::schema::Schema;
use crate::typeside::Predicate;

use super::eval::CTerm;
use super::{AttrValue, Elem, Instance, InstanceError, TermValue};

/// How equality treats labelled nulls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Premise matching: atoms over labelled nulls never hold.
    Premise,
    /// Conclusion witnessing: a null equals itself (and its class).
    Witness,
}

#[derive(Clone, Debug)]
pub(crate) struct CAtom {
    pub(crate) pred: Predicate,
    pub(crate) lhs: CTerm,
    pub(crate) rhs: CTerm,
}

impl CAtom {
    fn max_slot(&self) -> Option<usize> {
        self.lhs.max_slot().max(self.rhs.max_slot())
    }
}

/// Canonical members of every entity, sorted by class key.
pub struct Members(Vec<Vec<Elem>>);

impl Members {
    pub fn of(inst: &Instance) -> Members {
        Members(
            (0..inst.schema().entities.len())
                .map(|i| inst.members_idx(i))
                .collect(),
        )
    }

    pub(crate) fn get(&self, entity: usize) -> &[Elem] {
        &self.0[entity]
    }
}

#[derive(Clone, Copy, Debug)]
enum Lookup {
    Scan,
    /// Bind from the other side of this equality atom.
    Functional { atom: usize, bare_is_lhs: bool },
    /// Probe a hash index on this equality atom.
    Index { atom: usize, own_is_lhs: bool },
}

#[derive(Clone, Debug)]
pub struct Pattern {
    entities: Vec<usize>,
    fixed: usize,
    atoms: Vec<CAtom>,
    /// Atoms to test once slot k is bound; `ready[fixed]`-less atoms go to `initial`.
    ready: Vec<Vec<usize>>,
    initial: Vec<usize>,
    lookup: Vec<Lookup>,
    mode: Mode,
}

pub(crate) fn holds(inst: &Instance, env: &[Option<Elem>], atom: &CAtom, mode: Mode) -> bool {
    let l = inst.eval_term(env, &atom.lhs);
    let r = inst.eval_term(env, &atom.rhs);
    values_satisfy(&l, &r, atom.pred, mode)
}

pub(crate) fn values_satisfy(l: &TermValue, r: &TermValue, pred: Predicate, mode: Mode) -> bool {
    match (l, r) {
        (TermValue::Elem(a), TermValue::Elem(b)) => pred == Predicate::Eq && a == b,
        (TermValue::Val(AttrValue::Const(a)), TermValue::Val(AttrValue::Const(b))) => pred.holds(a, b),
        (TermValue::Val(a @ AttrValue::Null(_)), TermValue::Val(b)) | (TermValue::Val(b), TermValue::Val(a @ AttrValue::Null(_))) => {
            mode == Mode::Witness && pred == Predicate::Eq && a == b
        }
        _ => false,
    }
}

fn indexable(v: &TermValue, mode: Mode) -> bool {
    match v {
        TermValue::Elem(_) => true,
        TermValue::Val(AttrValue::Const(_)) => true,
        TermValue::Val(AttrValue::Null(_)) => mode == Mode::Witness,
        TermValue::Undefined => false,
    }
}

impl Pattern {
    /// `binders[..fixed]` are supplied by the caller; the rest are enumerated.
    pub fn new<'a>(
        schema: &Schema,
        binders: &[Binder],
        fixed: usize,
        atoms: impl IntoIterator<Item = (Predicate, &'a Term, &'a Term)>,
        mode: Mode,
    ) -> Result<Pattern, InstanceError> {
        let slot_of = |name: &str| binders.iter().position(|b| b.name == name);
        let entities = binders
            .iter()
            .map(|b| {
                schema
                    .entity_index(&b.entity)
                    .ok_or_else(|| InstanceError::UnknownEntity(b.entity.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let atoms = atoms
            .into_iter()
            .map(|(pred, l, r)| {
                Ok(CAtom {
                    pred,
                    lhs: CTerm::compile(schema, &slot_of, l)?,
                    rhs: CTerm::compile(schema, &slot_of, r)?,
                })
            })
            .collect::<Result<Vec<_>, InstanceError>>()?;

        let n = binders.len();
        let mut ready = vec![Vec::new(); n];
        let mut initial = Vec::new();
        for (i, a) in atoms.iter().enumerate() {
            match a.max_slot() {
                Some(k) if k >= fixed => ready[k].push(i),
                _ => initial.push(i),
            }
        }

        let mut lookup = vec![Lookup::Scan; n];
        for k in fixed..n {
            for &i in &ready[k] {
                let a = &atoms[i];
                if a.pred != Predicate::Eq {
                    continue;
                }
                let earlier = |t: &CTerm| t.max_slot().is_none_or(|m| m < k);
                if a.lhs.bare_slot() == Some(k) && earlier(&a.rhs) {
                    lookup[k] = Lookup::Functional { atom: i, bare_is_lhs: true };
                    break;
                }
                if a.rhs.bare_slot() == Some(k) && earlier(&a.lhs) {
                    lookup[k] = Lookup::Functional { atom: i, bare_is_lhs: false };
                    break;
                }
            }
            if matches!(lookup[k], Lookup::Scan) {
                for &i in &ready[k] {
                    let a = &atoms[i];
                    if a.pred != Predicate::Eq {
                        continue;
                    }
                    let only_k = |t: &CTerm| t.max_slot() == Some(k) && (0..k).all(|s| !t.uses_slot(s));
                    let earlier = |t: &CTerm| t.max_slot().is_none_or(|m| m < k);
                    if only_k(&a.lhs) && earlier(&a.rhs) {
                        lookup[k] = Lookup::Index { atom: i, own_is_lhs: true };
                        break;
                    }
                    if only_k(&a.rhs) && earlier(&a.lhs) {
                        lookup[k] = Lookup::Index { atom: i, own_is_lhs: false };
                        break;
                    }
                }
            }
        }

        Ok(Pattern {
            entities,
            fixed,
            atoms,
            ready,
            initial,
            lookup,
            mode,
        })
    }

    pub fn var_count(&self) -> usize {
        self.entities.len()
    }

    /// How each enumerated variable is bound: `scan`, `functional` or `index`.
    pub fn access_kinds(&self) -> Vec<&'static str> {
        self.lookup[self.fixed..]
            .iter()
            .map(|l| match l {
                Lookup::Scan => "scan",
                Lookup::Functional { .. } => "functional",
                Lookup::Index { .. } => "index",
            })
            .collect()
    }

    /// Whether enumeration reads entity member lists at all.
    pub(crate) fn needs_members(&self) -> bool {
        self.lookup[self.fixed..]
            .iter()
            .any(|l| !matches!(l, Lookup::Functional { .. }))
    }

    /// Calls `f` for every satisfying extension of `env[..fixed]`, in order.
    pub fn for_each(
        &self,
        inst: &Instance,
        members: &Members,
        env: &mut Vec<Option<Elem>>,
        f: &mut dyn FnMut(&[Option<Elem>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        env.resize(self.entities.len(), None);
        env[self.fixed..].fill(None);
        if !self.initial.iter().all(|&i| holds(inst, env, &self.atoms[i], self.mode)) {
            return ControlFlow::Continue(());
        }
        let mut indexes: Vec<Option<HashMap<TermValue, Vec<Elem>>>> = vec![None; self.entities.len()];
        self.bind(inst, members, env, self.fixed, &mut indexes, f)
    }

    /// Whether a complete assignment satisfies every atom.
    pub(crate) fn holds_for(&self, inst: &Instance, env: &[Option<Elem>]) -> bool {
        env.len() == self.entities.len()
            && env
                .iter()
                .zip(&self.entities)
                .all(|(e, &ei)| e.is_some_and(|e| inst.entity_index_of(e) == ei))
            && self.atoms.iter().all(|a| holds(inst, env, a, self.mode))
    }

    /// Whether at least one extension exists.
    pub fn exists(&self, inst: &Instance, members: &Members, env: &mut Vec<Option<Elem>>) -> bool {
        self.for_each(inst, members, env, &mut |_| ControlFlow::Break(()))
            .is_break()
    }

    fn bind(
        &self,
        inst: &Instance,
        members: &Members,
        env: &mut Vec<Option<Elem>>,
        k: usize,
        indexes: &mut Vec<Option<HashMap<TermValue, Vec<Elem>>>>,
        f: &mut dyn FnMut(&[Option<Elem>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if k == self.entities.len() {
            return f(env);
        }
        let candidates: Vec<Elem> = match self.lookup[k] {
            Lookup::Scan => members.get(self.entities[k]).to_vec(),
            Lookup::Functional { atom, bare_is_lhs } => {
                let a = &self.atoms[atom];
                let other = if bare_is_lhs { &a.rhs } else { &a.lhs };
                match inst.eval_term(env, other) {
                    TermValue::Elem(x) if inst.entity_index_of(x) == self.entities[k] => vec![x],
                    _ => Vec::new(),
                }
            }
            Lookup::Index { atom, own_is_lhs } => {
                let a = &self.atoms[atom];
                let (own, other) = if own_is_lhs { (&a.lhs, &a.rhs) } else { (&a.rhs, &a.lhs) };
                if indexes[k].is_none() {
                    let mut map: HashMap<TermValue, Vec<Elem>> = HashMap::new();
                    let mut scratch = env.clone();
                    for &c in members.get(self.entities[k]) {
                        scratch[k] = Some(c);
                        let v = inst.eval_term(&scratch, own);
                        if indexable(&v, self.mode) {
                            map.entry(v).or_default().push(c);
                        }
                    }
                    indexes[k] = Some(map);
                }
                let probe = inst.eval_term(env, other);
                if !indexable(&probe, self.mode) {
                    Vec::new()
                } else {
                    indexes[k]
                        .as_ref()
                        .and_then(|m| m.get(&probe))
                        .cloned()
                        .unwrap_or_default()
                }
            }
        };
        for c in candidates {
            env[k] = Some(c);
            if self.ready[k].iter().all(|&i| holds(inst, env, &self.atoms[i], self.mode)) {
                self.bind(inst, members, env, k + 1, indexes, f)?;
            }
        }
        env[k] = None;
        ControlFlow::Continue(())
    }
}

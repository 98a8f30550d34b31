//! Weak acyclicity of a constraint set, the standard sufficient condition for
//! chase termination.
//!
//! Constraints are read relationally: an entity `E` is a unary relation with
//! position `E`, and a foreign key or attribute `m` on `E` is a binary relation
//! with positions `E.m[0]` (the element) and `E.m[1]` (the value). A path term
//! introduces one intermediate node per step. The set is weakly acyclic iff no
//! cycle of the position graph runs through an existential edge.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::constraint::{Constraint, Term};
use crate::schema::Schema;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Entity(String),
    Member { entity: String, name: String, slot: u8 },
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Entity(e) => f.write_str(e),
            Position::Member { entity, name, slot } => write!(f, "{entity}.{name}[{slot}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Regular,
    Existential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: Position,
    pub to: Position,
    pub kind: EdgeKind,
    pub constraint: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakAcyclicity {
    Acyclic,
    /// A cycle whose first edge is existential.
    CyclicWithWitness(Vec<Edge>),
}

impl WeakAcyclicity {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, WeakAcyclicity::Acyclic)
    }
}

impl fmt::Display for WeakAcyclicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeakAcyclicity::Acyclic => f.write_str("weakly acyclic"),
            WeakAcyclicity::CyclicWithWitness(edges) => {
                f.write_str("cycle through an existential edge:")?;
                for e in edges {
                    let arrow = match e.kind {
                        EdgeKind::Regular => "->",
                        EdgeKind::Existential => "=>",
                    };
                    write!(f, " {} {arrow} {} ({});", e.from, e.to, e.constraint)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Default)]
struct Nodes {
    parent: Vec<usize>,
    premise: Vec<BTreeSet<Position>>,
    conclusion: Vec<BTreeSet<Position>>,
    existential: Vec<bool>,
    universal: Vec<bool>,
    /// The node a path step left from.
    step_of: Vec<Option<usize>>,
    vars: BTreeMap<String, usize>,
}

impl Nodes {
    fn fresh(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.premise.push(BTreeSet::new());
        self.conclusion.push(BTreeSet::new());
        self.existential.push(false);
        self.universal.push(false);
        self.step_of.push(None);
        id
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[b] = a;
        }
    }

    fn record(&mut self, node: usize, pos: Position, in_premise: bool) {
        if in_premise {
            self.premise[node].insert(pos);
        } else {
            self.conclusion[node].insert(pos);
        }
    }

    /// Walks a term, recording positions; returns the node holding its value.
    fn term(&mut self, t: &Term, schema: &Schema, in_premise: bool) -> Option<usize> {
        match t {
            Term::Path { var, path } => {
                let mut node = *self.vars.get(var)?;
                self.record(node, Position::Entity(path.root.clone()), in_premise);
                let mut entity = path.root.clone();
                for name in path.names() {
                    let next = self.fresh();
                    self.step_of[next] = Some(node);
                    let member = |slot| Position::Member {
                        entity: entity.clone(),
                        name: name.to_string(),
                        slot,
                    };
                    self.record(node, member(0), in_premise);
                    self.record(next, member(1), in_premise);
                    match schema.member(&entity, name) {
                        Some(crate::schema::Member::ForeignKey(fk)) => {
                            entity = fk.target.clone();
                            self.record(next, Position::Entity(entity.clone()), in_premise);
                        }
                        _ => entity.clear(),
                    }
                    node = next;
                }
                Some(node)
            }
            Term::Lit(_) => None,
            Term::App { args, .. } => {
                for a in args {
                    self.term(a, schema, in_premise);
                }
                None
            }
        }
    }
}

fn constraint_edges(c: &Constraint, schema: &Schema, out: &mut Vec<Edge>) {
    let mut nodes = Nodes::default();
    for b in &c.universals {
        let id = nodes.fresh();
        nodes.record(id, Position::Entity(b.entity.clone()), true);
        nodes.universal[id] = true;
        nodes.vars.insert(b.name.clone(), id);
    }
    for b in &c.existentials {
        let id = nodes.fresh();
        nodes.existential[id] = true;
        nodes.vars.insert(b.name.clone(), id);
    }
    for atom in &c.premise {
        let l = nodes.term(&atom.lhs, schema, true);
        let r = nodes.term(&atom.rhs, schema, true);
        if let (Some(l), Some(r), crate::typeside::Predicate::Eq) = (l, r, atom.pred) {
            nodes.union(l, r);
        }
    }
    for eq in &c.conclusion {
        let l = nodes.term(&eq.lhs, schema, false);
        let r = nodes.term(&eq.rhs, schema, false);
        if let (Some(l), Some(r)) = (l, r) {
            nodes.union(l, r);
        }
    }

    // Gather per class.
    let n = nodes.parent.len();
    let mut premise: BTreeMap<usize, BTreeSet<Position>> = BTreeMap::new();
    let mut conclusion: BTreeMap<usize, BTreeSet<Position>> = BTreeMap::new();
    let mut fresh: BTreeSet<usize> = BTreeSet::new();
    let mut anchored: BTreeSet<usize> = BTreeSet::new();
    for id in 0..n {
        let root = nodes.find(id);
        premise.entry(root).or_default().extend(nodes.premise[id].iter().cloned());
        conclusion.entry(root).or_default().extend(nodes.conclusion[id].iter().cloned());
        if nodes.existential[id] {
            fresh.insert(root);
        }
        if nodes.universal[id] || !nodes.premise[id].is_empty() {
            anchored.insert(root);
        }
    }
    // A step out of a fresh element that nothing else pins down is fresh too.
    loop {
        let before = fresh.len();
        for id in 0..n {
            let Some(from) = nodes.step_of[id] else { continue };
            let (from, root) = (nodes.find(from), nodes.find(id));
            if fresh.contains(&from) && !anchored.contains(&root) {
                fresh.insert(root);
            }
        }
        if fresh.len() == before {
            break;
        }
    }

    let mut frontier: BTreeSet<Position> = BTreeSet::new();
    for (root, concl) in &conclusion {
        if fresh.contains(root) || concl.is_empty() {
            continue;
        }
        let prem = &premise[root];
        frontier.extend(prem.iter().cloned());
        for from in prem {
            for to in concl {
                out.push(Edge {
                    from: from.clone(),
                    to: to.clone(),
                    kind: EdgeKind::Regular,
                    constraint: c.label.clone(),
                });
            }
        }
    }
    for root in &fresh {
        for to in &conclusion[root] {
            for from in &frontier {
                out.push(Edge {
                    from: from.clone(),
                    to: to.clone(),
                    kind: EdgeKind::Existential,
                    constraint: c.label.clone(),
                });
            }
        }
    }
}

/// Builds the position graph of `cs` over `s`.
pub fn dependency_graph(cs: &[Constraint], s: &Schema) -> Vec<Edge> {
    let mut edges = Vec::new();
    for c in cs {
        constraint_edges(c, s, &mut edges);
    }
    edges.sort_by(|a, b| (&a.from, &a.to, a.kind).cmp(&(&b.from, &b.to, b.kind)));
    edges.dedup_by(|a, b| a.from == b.from && a.to == b.to && a.kind == b.kind);
    edges
}

pub fn check_weak_acyclicity(cs: &[Constraint], s: &Schema) -> WeakAcyclicity {
    let edges = dependency_graph(cs, s);
    let mut adjacency: BTreeMap<&Position, Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        adjacency.entry(&e.from).or_default().push(i);
    }
    for special in edges.iter().filter(|e| e.kind == EdgeKind::Existential) {
        // Breadth-first search back from the edge's head to its tail.
        let mut via: BTreeMap<&Position, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([&special.to]);
        let mut seen = BTreeSet::from([&special.to]);
        while let Some(p) = queue.pop_front() {
            if p == &special.from {
                let mut cycle = Vec::new();
                let mut cur = p;
                while cur != &special.to {
                    let e = &edges[via[cur]];
                    cycle.push(e.clone());
                    cur = &e.from;
                }
                cycle.push(special.clone());
                cycle.reverse();
                return WeakAcyclicity::CyclicWithWitness(cycle);
            }
            for &i in adjacency.get(p).map(Vec::as_slice).unwrap_or(&[]) {
                let next = &edges[i].to;
                if seen.insert(next) {
                    via.insert(next, i);
                    queue.push_back(next);
                }
            }
        }
    }
    WeakAcyclicity::Acyclic
}

//! Random small schemas, instances and constraint sets, as DSL text.
//!
//! Foreign keys only point from lower- to higher-numbered entities and every
//! attribute is a String drawn from a single constant, so no generated
//! constraint can force two distinct constants together.
#![allow(dead_code)]

use std::fmt::Write;

use catamerge_core::acyclicity::check_weak_acyclicity;
use catamerge_core::chase::{chase, effective_constraints, ChaseConfig, ChaseOutcome};
use catamerge_core::constraint::Constraint;
use catamerge_core::instance::check_model;
use catamerge_core::syntax::{parse_constraint, parse_instance, parse_schema, SourceDocument};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Debug)]
pub struct Case {
    pub seed: u64,
    pub schema: String,
    pub instance: String,
    pub constraints: Vec<String>,
}

struct Shape {
    /// Attribute names per entity.
    attrs: Vec<Vec<String>>,
    /// `(name, source, target)`.
    fks: Vec<(String, usize, usize)>,
}

impl Shape {
    fn fks_from(&self, e: usize) -> Vec<&(String, usize, usize)> {
        self.fks.iter().filter(|f| f.1 == e).collect()
    }
}

pub fn case(seed: u64) -> Case {
    let mut rng = StdRng::seed_from_u64(seed);
    let k = rng.random_range(1..=4);
    let attrs: Vec<Vec<String>> = (0..k)
        .map(|e| (0..rng.random_range(1..=2)).map(|a| format!("a{e}{a}")).collect())
        .collect();
    let mut fks = Vec::new();
    for s in 0..k {
        for t in s + 1..k {
            if rng.random_bool(0.6) {
                fks.push((format!("f{s}{t}"), s, t));
            }
        }
    }
    let shape = Shape { attrs, fks };

    let mut schema = String::from("schema R {\n  entities\n   ");
    for e in 0..k {
        write!(schema, " E{e}").unwrap();
    }
    if !shape.fks.is_empty() {
        schema.push_str("\n  foreign_keys\n");
        for (name, s, t) in &shape.fks {
            writeln!(schema, "    {name} : E{s} -> E{t}").unwrap();
        }
    } else {
        schema.push('\n');
    }
    schema.push_str("  attributes\n");
    for (e, names) in shape.attrs.iter().enumerate() {
        for a in names {
            writeln!(schema, "    {a} : E{e} -> String").unwrap();
        }
    }
    schema.push_str("}\n");

    let mut budget: usize = 30;
    let sizes: Vec<usize> = (0..k)
        .map(|_| {
            let n = rng.random_range(0..=8).min(budget);
            budget -= n;
            n
        })
        .collect();
    let mut instance = String::from("instance D : R {\n");
    for e in 0..k {
        if sizes[e] == 0 {
            continue;
        }
        writeln!(instance, "  entity E{e} {{").unwrap();
        for n in 0..sizes[e] {
            write!(instance, "    row e{e}_{n} {{").unwrap();
            for a in &shape.attrs[e] {
                if rng.random_bool(0.6) {
                    write!(instance, " {a} = \"v\"").unwrap();
                }
            }
            for (name, _, t) in shape.fks_from(e) {
                if sizes[*t] > 0 && rng.random_bool(0.6) {
                    write!(instance, " {name} = e{t}_{}", rng.random_range(0..sizes[*t])).unwrap();
                }
            }
            instance.push_str(" }\n");
        }
        instance.push_str("  }\n");
    }
    instance.push_str("}\n");

    let constraints = (0..rng.random_range(1..=5))
        .filter_map(|i| constraint(&mut rng, &shape, k).map(|c| format!("c{i}: {c}")))
        .collect();
    Case {
        seed,
        schema,
        instance,
        constraints,
    }
}

fn pick<'a, T>(rng: &mut StdRng, xs: &'a [T]) -> Option<&'a T> {
    if xs.is_empty() {
        None
    } else {
        Some(&xs[rng.random_range(0..xs.len())])
    }
}

fn constraint(rng: &mut StdRng, shape: &Shape, k: usize) -> Option<String> {
    let e = rng.random_range(0..k);
    let a = pick(rng, &shape.attrs[e])?.clone();
    let out = shape.fks_from(e);
    match rng.random_range(0..6) {
        0 => Some(format!("forall x y:E{e} where x.{a} = y.{a} -> x = y")),
        1 => {
            let (f, _, t) = *pick(rng, &out)?;
            let b = pick(rng, &shape.attrs[*t])?;
            Some(format!("forall x:E{e} -> x.{a} = x.{f}.{b}"))
        }
        2 => {
            let (f, _, t) = *pick(rng, &out)?;
            let (g, _, _) = *pick(rng, &shape.fks.iter().filter(|x| x.2 == *t).collect::<Vec<_>>())?;
            // `g` may start elsewhere; relate through a second variable then.
            if shape.fks.iter().any(|x| &x.0 == g && x.1 == e) {
                Some(format!("forall x:E{e} -> x.{f} = x.{g}"))
            } else {
                let s = shape.fks.iter().find(|x| &x.0 == g).unwrap().1;
                Some(format!("forall x:E{e} y:E{s} where x.{f} = y.{g} -> x.{a} = y.{}", shape.attrs[s][0]))
            }
        }
        3 => {
            let (f, _, t) = *pick(rng, &out)?;
            let b = pick(rng, &shape.attrs[*t])?;
            Some(format!("forall x:E{e} -> exists y:E{t} where x.{f} = y and y.{b} = x.{a}"))
        }
        4 => {
            let (f, _, t) = *pick(rng, &out)?;
            Some(format!("forall x:E{e} where x.{a} = \"v\" -> exists y:E{t} where x.{f} = y"))
        }
        _ => {
            let into: Vec<_> = shape.fks.iter().filter(|x| x.2 == e).collect();
            let (f, s, _) = *pick(rng, &into)?;
            Some(format!("forall y:E{e} -> exists x:E{s} where x.{f} = y"))
        }
    }
}

/// Chases one random case. `None` when its constraints are not weakly
/// acyclic once totality is added.
pub fn chase_soundly(seed: u64) -> Option<Result<(), String>> {
    let case = case(seed);
    let schema = parse_schema(&SourceDocument::new("r.cmg", &case.schema)).unwrap_or_else(|d| panic!("{}\n{d:?}", case.schema));
    let inst = parse_instance(&SourceDocument::new("d.cmg", &case.instance), &schema).unwrap_or_else(|d| panic!("{}\n{d:?}", case.instance));
    let cs: Vec<Constraint> = case
        .constraints
        .iter()
        .map(|c| parse_constraint(&SourceDocument::new("c.cmg", c), &schema).unwrap_or_else(|d| panic!("{c}\n{d:?}")))
        .collect();
    let cfg = ChaseConfig::default();
    let all = effective_constraints(&schema, &cs, &cfg);
    if !check_weak_acyclicity(&all, &schema).is_acyclic() {
        return None;
    }
    let outcome = chase(&inst, &cs, &cfg).map_err(|e| format!("seed {seed}: {e}"));
    Some(outcome.and_then(|o| match o {
        ChaseOutcome::Saturated { instance, .. } => {
            let report = check_model(&instance, &all).map_err(|e| e.to_string())?;
            if report.is_satisfied() {
                Ok(())
            } else {
                Err(format!("seed {seed}: {report:?}\n{case:#?}"))
            }
        }
        other => Err(format!("seed {seed}: not saturated: {:?}", other.trace().to_log())),
    }))
}

mod support;

use catamerge_core::chase::{chase, ChaseConfig};
use catamerge_core::constraint::{Atom, Binder, Term};
use catamerge_core::instance::Instance;
use catamerge_core::path::Path;
use catamerge_core::program::Program;
use catamerge_core::query::{evaluate, QuerySpec};
use catamerge_core::schema::{Schema, Sort};
use catamerge_core::syntax::{parse_instance, parse_query, parse_schema, SourceDocument};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use support::{fixtures, oracle, random};

fn agree(q: &QuerySpec, inst: &Instance) -> Result<(), String> {
    let fast = evaluate(q, inst).ok().map(|t| {
        let mut rows = t.rows;
        rows.sort();
        rows
    });
    let slow = oracle::naive(q, inst).map(|mut rows| {
        rows.sort();
        rows
    });
    if fast == slow {
        Ok(())
    } else {
        Err(format!("{}: evaluate {fast:?} but oracle {slow:?}", q.name))
    }
}

const EXTRA_1: &[&str] = &[
    "query a : Combined { from e:Equipment where e = e attributes n -> e.elementName }",
    "query b : Combined { from s:IfcSensor p:BRICK_Point where p = s.sensorAttachedTo.hasPoint
       attributes id -> p.timeseriesId dev -> s.hasPropertySet.deviceId }",
    "query c : Combined { from a:Location b:Location where a.spaceArea = b.spaceArea
       attributes x -> a.spaceName y -> b.spaceName }",
    "query d : Combined { from e:Equipment l:Location attributes x -> e.elementName y -> l }",
];

const EXTRA_2: &[&str] = &[
    "query a : CombinedThreeWay { from l:REC_Lease where l.leasee.personName = \"Vacant\"
       attributes who -> concat(l.leasee.personName, \"!\") d -> levenshtein(l.leasee.personName, \"Person B\") }",
    "query b : CombinedThreeWay { from a:Location b:Location where a = b attributes x -> a.roomName y -> b.spaceName }",
    "query c : CombinedThreeWay { from m:BRICK_Meter e:Equipment where m.hasLocation = e.hasLocation
       attributes x -> m.energyConsumption y -> e.equipmentIdentifier z -> e.hasLocation.isPartOf.hasPoint.setPointValue }",
    "query d : CombinedThreeWay { from l:REC_Lease p:REC_Person attributes x -> l.monthlyRent y -> p.personName }",
];

fn check_fixture(p: &Program, extra: &[&str]) {
    let sat = fixtures::saturated(p);
    let combined = &p.pick_extension(None).unwrap().combined;
    for q in &p.queries {
        agree(q, &sat).unwrap();
    }
    for text in extra {
        let q = parse_query(&SourceDocument::new("q.cmg", *text), combined).unwrap_or_else(|d| panic!("{d:?}"));
        agree(&q, &sat).unwrap();
    }
    // Before the chase some paths are undefined; both must notice.
    let pre = fixtures::integrate(p).pre;
    for q in &p.queries {
        agree(q, &pre).unwrap();
    }
}

#[test]
fn example_1_queries_match_the_oracle() {
    check_fixture(&fixtures::program(fixtures::EXAMPLE1), EXTRA_1);
}

#[test]
fn example_2_queries_match_the_oracle() {
    check_fixture(&fixtures::program(fixtures::EXAMPLE2), EXTRA_2);
}

/// A random path from `entity`, at most `depth` steps.
fn random_path(rng: &mut StdRng, s: &Schema, entity: &str, depth: usize) -> Path {
    let mut p = Path::identity(entity);
    for _ in 0..depth {
        let Sort::Entity(at) = p.target.clone() else { break };
        let mut names: Vec<String> = s.fks_of(&at).map(|(_, f)| f.name.clone()).collect();
        names.extend(s.attrs_of(&at).map(|(_, a)| a.name.clone()));
        if names.is_empty() || rng.random_bool(0.3) {
            break;
        }
        let n = &names[rng.random_range(0..names.len())];
        p = p.step(s, n).unwrap();
    }
    p
}

fn random_query(rng: &mut StdRng, s: &Schema) -> QuerySpec {
    let from: Vec<Binder> = (0..rng.random_range(1..=3))
        .map(|i| Binder::new(format!("v{i}"), s.entities[rng.random_range(0..s.entities.len())].clone()))
        .collect();
    let term = |rng: &mut StdRng| {
        let b = &from[rng.random_range(0..from.len())];
        Term::Path {
            var: b.name.clone(),
            path: random_path(rng, s, &b.entity, 3),
        }
    };
    let mut atoms = Vec::new();
    for _ in 0..rng.random_range(0..=2) {
        let l = term(rng);
        // retry a few times for a right-hand side of the same sort
        for _ in 0..8 {
            let r = term(rng);
            if r.sort() == l.sort() {
                atoms.push(Atom::eq(l, r));
                break;
            }
        }
    }
    let attributes = (0..rng.random_range(1..=3)).map(|i| (format!("c{i}"), term(rng))).collect();
    QuerySpec {
        name: "random".into(),
        target: "R".into(),
        from,
        atoms,
        attributes,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn random_queries_match_the_oracle(seed in any::<u64>()) {
        let case = random::case(seed % 1000);
        let schema = parse_schema(&SourceDocument::new("r", &case.schema)).unwrap();
        let inst = parse_instance(&SourceDocument::new("d", &case.instance), &schema).unwrap();
        let cfg = ChaseConfig { require_weak_acyclicity: false, max_rounds: 3, ..ChaseConfig::default() };
        let chased = chase(&inst, &[], &cfg).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        for target in [&inst, chased.trace().replay(&inst).as_ref().unwrap()] {
            for _ in 0..4 {
                let q = random_query(&mut rng, &schema);
                prop_assert!(agree(&q, target).is_ok(), "{}", agree(&q, target).unwrap_err());
            }
        }
    }
}

use proptest::prelude::*;

use super::*;
use crate::constraint::{Binder, Constraint, Equation, Term};
use crate::path::{compose_paths, Path};
use crate::schema::{Attribute, ForeignKey, Sort};

fn ifc() -> Schema {
    let mut s = Schema::new("IFC");
    s.entities = ["IfcSpace", "IfcDistributionElement", "IfcSensor", "PropertySet"]
        .map(String::from)
        .to_vec();
    for (n, a, b) in [
        ("elementInSpace", "IfcDistributionElement", "IfcSpace"),
        ("sensorAttachedTo", "IfcSensor", "IfcDistributionElement"),
        ("hasPropertySet", "IfcSensor", "PropertySet"),
    ] {
        s.foreign_keys.push(ForeignKey {
            name: n.into(),
            source: a.into(),
            target: b.into(),
        });
    }
    for (n, e, ty) in [
        ("spaceName", "IfcSpace", BaseType::String),
        ("spaceArea", "IfcSpace", BaseType::Double),
        ("elementName", "IfcDistributionElement", BaseType::String),
        ("sensorName", "IfcSensor", BaseType::String),
        ("deviceId", "PropertySet", BaseType::String),
    ] {
        s.attributes.push(Attribute {
            name: n.into(),
            source: e.into(),
            ty,
        });
    }
    s
}

const ROOMS: [(&str, f64); 5] = [
    ("240", 18.68),
    ("260", 17.12),
    ("200", 18.32),
    ("440", 18.68),
    ("460", 17.12),
];

fn ifc_instance() -> Instance {
    let mut i = new_instance(&ifc());
    for (k, (room, area)) in ROOMS.iter().enumerate() {
        let n = k + 1;
        let sp = i.add_element("IfcSpace", &format!("S{n}")).unwrap();
        i.set_attr(sp, "spaceName", Some(Value::Str(format!("Room {room}")))).unwrap();
        i.set_attr(sp, "spaceArea", Some(Value::double(*area))).unwrap();
        let de = i.add_element("IfcDistributionElement", &format!("DE{n}")).unwrap();
        i.set_fk(de, "elementInSpace", sp).unwrap();
        let ps = i.add_element("PropertySet", &format!("PS{n}")).unwrap();
        i.set_attr(ps, "deviceId", Some(Value::Str(format!("TUC.245.77.R{room}")))).unwrap();
        let se = i.add_element("IfcSensor", &format!("SE{n}")).unwrap();
        i.set_fk(se, "sensorAttachedTo", de).unwrap();
        i.set_fk(se, "hasPropertySet", ps).unwrap();
    }
    i
}

#[test]
fn fresh_instances_are_empty_and_independent() {
    let s = ifc();
    let mut a = new_instance(&s);
    let b = new_instance(&s);
    assert!(s.entities.iter().all(|e| a.count(e) == 0));
    a.add_element("IfcSpace", "S1").unwrap();
    assert_eq!(a.count("IfcSpace"), 1);
    assert_eq!(b.count("IfcSpace"), 0);
    assert_eq!(new_instance(&Schema::new("Empty")).total_count(), 0);
}

#[test]
fn ifc_figure_has_twenty_elements() {
    let i = ifc_instance();
    assert_eq!(i.total_count(), 20);
    assert_eq!(i.count("IfcSpace"), 5);
    let ps = i.lookup("PropertySet", "PS1").unwrap();
    assert_eq!(
        i.attr(ps, "deviceId").unwrap(),
        AttrValue::Const(Value::Str("TUC.245.77.R240".into()))
    );
}

#[test]
fn builder_errors() {
    let mut i = ifc_instance();
    let se = i.lookup("IfcSensor", "SE1").unwrap();
    let sp = i.lookup("IfcSpace", "S1").unwrap();
    assert!(matches!(
        i.set_fk(se, "sensorAttachedTo", sp),
        Err(InstanceError::TypeMismatch { .. })
    ));
    assert!(matches!(
        i.set_attr(sp, "spaceArea", Some(Value::double(1.0))),
        Err(InstanceError::ConflictingAssignment { .. })
    ));
    assert!(matches!(
        i.set_attr(sp, "spaceArea", Some(Value::Str("big".into()))),
        Err(InstanceError::TypeMismatch { .. })
    ));
    assert!(matches!(
        i.add_element("IfcSpace", "S1"),
        Err(InstanceError::DuplicateElement { .. })
    ));
    assert!(i.set_attr(sp, "bogus", None).is_err());
}

#[test]
fn unset_attribute_is_a_labelled_null() {
    let mut i = ifc_instance();
    let de = i.lookup("IfcDistributionElement", "DE1").unwrap();
    i.set_attr(de, "elementName", None).unwrap();
    assert!(i.attr(de, "elementName").unwrap().is_null());
}

#[test]
fn path_evaluation() {
    let i = ifc_instance();
    let s = i.schema().clone();
    let se = i.lookup("IfcSensor", "SE1").unwrap();
    let id = Path::identity("IfcSensor");
    assert_eq!(eval_path(&i, se, &id).unwrap(), PathValue::Element(se));
    let p = Path::resolve(&s, "IfcSensor", &["sensorAttachedTo", "elementInSpace", "spaceName"]).unwrap();
    assert_eq!(
        eval_path(&i, se, &p).unwrap(),
        PathValue::Value(AttrValue::Const(Value::Str("Room 240".into())))
    );
    let sp = i.lookup("IfcSpace", "S1").unwrap();
    assert!(eval_path(&i, sp, &p).is_err());

    let mut j = i.clone();
    let lone = j.add_element("IfcSensor", "SE9").unwrap();
    assert_eq!(eval_path(&j, lone, &p).unwrap(), PathValue::Undefined);
}

#[test]
fn merging_is_congruent_and_idempotent() {
    let mut i = ifc_instance();
    let s1 = i.lookup("IfcSpace", "S1").unwrap();
    assert!(i.merge_elements(s1, s1).unwrap().is_noop());

    // two elements in the same room, merged: their spaces must merge too
    let de1 = i.lookup("IfcDistributionElement", "DE1").unwrap();
    let s4 = i.lookup("IfcSpace", "S4").unwrap();
    let extra_space = i.add_element("IfcSpace", "S9").unwrap();
    let extra = i.add_element("IfcDistributionElement", "DE9").unwrap();
    i.set_fk(extra, "elementInSpace", extra_space).unwrap();
    let report = i.merge_elements(de1, extra).unwrap();
    assert_eq!(report.merged.len(), 2);
    assert!(i.same_class(s1, extra_space));
    assert!(!i.same_class(s1, s4));
    assert_eq!(i.display(extra_space), "S1");
    assert_eq!(
        i.attr(extra_space, "spaceName").unwrap(),
        AttrValue::Const(Value::Str("Room 240".into()))
    );
}

#[test]
fn clash_leaves_instance_untouched() {
    let mut i = ifc_instance();
    let s1 = i.lookup("IfcSpace", "S1").unwrap();
    let s2 = i.lookup("IfcSpace", "S2").unwrap();
    match i.merge_elements(s1, s2) {
        Err(InstanceError::Clash(c)) => assert_eq!(c.attribute, "spaceName"),
        other => panic!("expected a clash, got {other:?}"),
    }
    assert!(!i.same_class(s1, s2));
    assert!(!i.has_conflicting_anchor());

    // same name, different area
    let mut j = ifc_instance();
    let s1 = j.lookup("IfcSpace", "S1").unwrap();
    let twin = j.add_element("IfcSpace", "S1b").unwrap();
    j.set_attr(twin, "spaceName", Some(Value::Str("Room 240".into()))).unwrap();
    j.set_attr(twin, "spaceArea", Some(Value::double(17.12))).unwrap();
    match j.merge_elements(s1, twin) {
        Err(InstanceError::Clash(c)) => {
            assert_eq!(c.attribute, "spaceArea");
            assert_eq!(c.left, Value::double(18.68));
            assert_eq!(c.right, Value::double(17.12));
        }
        other => panic!("expected a clash, got {other:?}"),
    }
}

#[test]
fn null_meets_constant_on_merge() {
    let mut i = ifc_instance();
    let s1 = i.lookup("IfcSpace", "S1").unwrap();
    let blank = i.add_element("IfcSpace", "S0").unwrap();
    assert!(i.attr(blank, "spaceArea").unwrap().is_null());
    let r = i.merge_elements(blank, s1).unwrap();
    assert_eq!(r.nulls_resolved, 2);
    assert_eq!(i.attr(blank, "spaceArea").unwrap(), AttrValue::Const(Value::double(18.68)));
    assert_eq!(i.display(blank), "S0");
}

#[test]
fn check_model_on_empty_instance_is_vacuous() {
    let s = ifc();
    let i = new_instance(&s);
    let c = Constraint {
        label: "all_placed".into(),
        universals: vec![Binder::new("d", "IfcDistributionElement")],
        premise: vec![],
        existentials: vec![Binder::new("x", "IfcSpace")],
        conclusion: vec![Equation {
            lhs: Term::Path {
                var: "d".into(),
                path: Path::resolve(&s, "IfcDistributionElement", &["elementInSpace"]).unwrap(),
            },
            rhs: Term::var("x", "IfcSpace"),
        }],
    };
    assert!(check_model(&i, std::slice::from_ref(&c)).unwrap().is_satisfied());
    assert!(check_model(&ifc_instance(), &[c]).unwrap().is_satisfied());
}

#[test]
fn csv_export_renders_nulls_as_empty_cells() {
    let mut i = ifc_instance();
    i.add_element("IfcSpace", "S6").unwrap();
    let csv = export::entity_csv(&i, "IfcSpace");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "id,spaceName,spaceArea");
    assert_eq!(lines[1], "S1,Room 240,18.68");
    assert_eq!(lines[6], "S6,,");
}

// A chain A -> B -> C with random data and random merge sequences.
fn chain_schema() -> Schema {
    let mut s = Schema::new("Chain");
    s.entities = vec!["A".into(), "B".into(), "C".into()];
    s.foreign_keys.push(ForeignKey {
        name: "f".into(),
        source: "A".into(),
        target: "B".into(),
    });
    s.foreign_keys.push(ForeignKey {
        name: "g".into(),
        source: "B".into(),
        target: "C".into(),
    });
    s.attributes.push(Attribute {
        name: "tag".into(),
        source: "C".into(),
        ty: BaseType::Int,
    });
    s
}

fn chain_instance(fa: &[usize], gb: &[usize]) -> Instance {
    let mut i = new_instance(&chain_schema());
    let cs: Vec<Elem> = (0..3).map(|k| i.add_element("C", &format!("c{k}")).unwrap()).collect();
    let bs: Vec<Elem> = gb
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let b = i.add_element("B", &format!("b{k}")).unwrap();
            i.set_fk(b, "g", cs[t % cs.len()]).unwrap();
            b
        })
        .collect();
    for (k, t) in fa.iter().enumerate() {
        let a = i.add_element("A", &format!("a{k}")).unwrap();
        i.set_fk(a, "f", bs[t % bs.len()]).unwrap();
    }
    i
}

proptest! {
    #[test]
    fn merges_form_a_congruence(fa in prop::collection::vec(0usize..4, 1..8),
                                gb in prop::collection::vec(0usize..3, 1..5),
                                merges in prop::collection::vec((0usize..8, 0usize..8), 0..10)) {
        let mut i = chain_instance(&fa, &gb);
        let a_elems = i.members("A");
        let mut history = Vec::new();
        for (x, y) in merges {
            let (x, y) = (a_elems[x % a_elems.len()], a_elems[y % a_elems.len()]);
            i.merge_elements(x, y).unwrap();
            history.push((x, y));
            // every earlier merge is still in force
            for (p, q) in &history {
                prop_assert!(i.same_class(*p, *q));
                prop_assert!(i.same_class(*q, *p));
            }
        }
        let fk = i.schema().fk_index("A", "f").unwrap();
        for &x in &a_elems {
            prop_assert!(i.same_class(x, x));
            for &y in &a_elems {
                if i.same_class(x, y) {
                    prop_assert_eq!(i.fk_value(x, fk), i.fk_value(y, fk));
                    for &z in &a_elems {
                        if i.same_class(y, z) {
                            prop_assert!(i.same_class(x, z));
                        }
                    }
                }
            }
        }
        prop_assert!(!i.has_conflicting_anchor());
    }

    #[test]
    fn path_evaluation_composes(fa in prop::collection::vec(0usize..4, 1..6),
                                gb in prop::collection::vec(0usize..3, 1..4),
                                split in 0usize..3) {
        let i = chain_instance(&fa, &gb);
        let s = i.schema().clone();
        let full = ["f", "g", "tag"];
        let p = Path::resolve(&s, "A", &full[..split]).unwrap();
        let Sort::Entity(mid) = p.target.clone() else { unreachable!() };
        let q = Path::resolve(&s, &mid, &full[split..]).unwrap();
        let pq = compose_paths(&p, &q).unwrap();
        for a in i.members("A") {
            let direct = eval_path(&i, a, &pq).unwrap();
            let PathValue::Element(m) = eval_path(&i, a, &p).unwrap() else { panic!() };
            prop_assert_eq!(direct, eval_path(&i, m, &q).unwrap());
        }
    }
}


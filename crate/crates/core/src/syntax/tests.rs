use proptest::prelude::*;

use super::*;
use crate::constraint::ConstraintKind;
use crate::fixtures;
use crate::instance::AttrValue;
use crate::typeside::Value;

fn doc(text: &str) -> SourceDocument {
    SourceDocument::new("t.cmg", text)
}

fn schemas() -> Vec<Schema> {
    let p = fixtures::example2();
    ["IFC", "BRICK", "REC"].map(|n| p.schema(n).unwrap().clone()).to_vec()
}

fn combined(p: &crate::program::Program) -> &CombinedSchema {
    &p.pick_extension(None).unwrap().combined
}

/// Text of the token a diagnostic points at.
fn pointed_at<'a>(text: &'a str, d: &Diagnostic) -> &'a str {
    &text[d.span.start..d.span.end]
}

#[test]
fn ifc_schema_parses() {
    let s = parse_schema(&doc(fixtures::IFC[0].1)).unwrap();
    assert_eq!(s.entities.len(), 4);
    assert_eq!(s.foreign_keys.len(), 3);
    assert!(s.foreign_key("IfcSensor", "sensorAttachedTo").is_some());
    assert!(s.foreign_key("IfcDistributionElement", "elementInSpace").is_some());
}

#[test]
fn empty_schema_parses_and_prints() {
    let s = parse_schema(&doc("schema Empty { }")).unwrap();
    assert!(s.entities.is_empty());
    assert_eq!(print_canonical(&s), "schema Empty {\n}\n");
}

#[test]
fn dangling_target_is_located() {
    let text = "schema S {\n  entities A\n  foreign_keys\n    f : A -> Ghost\n}";
    let d = parse_schema(&doc(text)).unwrap_err();
    assert_eq!(d.len(), 1);
    assert_eq!(pointed_at(text, &d[0]), "Ghost");
    assert_eq!((d[0].line, d[0].column), (4, 14));
    assert!(d[0].message.contains("Ghost"));
}

#[test]
fn schema_errors() {
    for (text, token) in [
        ("schema S { entities A attributes a : A -> Text }", "Text"),
        ("schema S { entities A attributes a : A -> Int  a : A -> String }", "a"),
        ("schema S { entities A A }", "A"),
    ] {
        let d = parse_schema(&doc(text)).unwrap_err();
        assert!(!d.is_empty(), "{text}");
        assert!(d.iter().all(Diagnostic::is_error));
        assert_eq!(pointed_at(text, &d[0]), token, "{text}");
    }
}

#[test]
fn paper_constraints_parse() {
    let p = fixtures::example2();
    let c = &combined(&p).schema;
    let f2 = parse_constraint(
        &doc("forall s:IFC_IfcSensor p:BRICK_Point where p = s.sensorAttachedTo.hasPoint -> p.timeseriesId = s.hasPropertySet.deviceId"),
        c,
    )
    .unwrap();
    assert_eq!(f2.kind(), ConstraintKind::Egd);
    assert_eq!(f2.universals[0].entity, "IFC_IfcSensor");

    let f4 = parse_constraint(
        &doc("forall l:REC_Lease where levenshtein(l.leasee.personName, \"Vacant\") > 0 -> l.leaseOf.isPartOf.hasPoint.setPointValue = 22"),
        c,
    )
    .unwrap();
    assert_eq!(f4.premise.len(), 1);
    assert_eq!(f4.premise[0].pred, crate::typeside::Predicate::Gt);
    // 22 faces a Double-valued path, so it is read as 22.0
    assert_eq!(f4.conclusion[0].rhs, crate::constraint::Term::Lit(Value::double(22.0)));

    let trivial = parse_constraint(&doc("forall x:Location -> x = x"), c).unwrap();
    assert_eq!(trivial.kind(), ConstraintKind::Egd);

    let f1 = parse_constraint(&doc("forall l1 l2 : Location where l1.spaceName = l2.roomName -> l1 = l2"), c).unwrap();
    assert_eq!(f1.universals.len(), 2);
}

#[test]
fn constraint_errors() {
    let p = fixtures::example1();
    let c = &combined(&p).schema;
    for (text, token) in [
        ("forall x:Equipment -> y.hasLocation = x.elementInSpace", "y"),
        ("forall x:Equipment -> x.hasLocation = x.elementName", "x.hasLocation"),
        ("forall x:Equipment -> x.elementName < \"b\"", "<"),
        ("forall x:Equipment -> x.nowhere = x", "nowhere"),
    ] {
        let d = parse_constraint(&doc(text), c).unwrap_err();
        assert!(!d.is_empty(), "{text}");
        assert!(text[d[0].span.start..].starts_with(token), "{text}: {:?}", d[0]);
    }
}

#[test]
fn instances_parse() {
    let s = schemas();
    let ifc = parse_instance(&doc(fixtures::IFC[1].1), &s[0]).unwrap();
    assert_eq!(ifc.count("IfcSpace"), 5);
    assert_eq!(ifc.total_count(), 20);

    let empty = parse_instance(&doc(fixtures::EX1[0].1), &s[1]).unwrap();
    assert_eq!(empty.total_count(), 0);

    let brick = parse_instance(&doc(fixtures::EX2[0].1), &s[1]).unwrap();
    let sp = brick.lookup("SetPoint", "SP240").unwrap();
    assert!(brick.attr(sp, "setPointValue").unwrap().is_null());
}

#[test]
fn instance_errors() {
    let s = schemas();
    let text = "instance I : IFC { entity IfcSpace { row R1 { spaceArea = \"big\" } } }";
    let d = parse_instance(&doc(text), &s[0]).unwrap_err();
    assert_eq!(pointed_at(text, &d[0]), "\"big\"");

    let text = "instance I : IFC { entity IfcDistributionElement { row D1 { elementInSpace = Nowhere } } }";
    let d = parse_instance(&doc(text), &s[0]).unwrap_err();
    assert_eq!(pointed_at(text, &d[0]), "Nowhere");
}

#[test]
fn shared_nulls_and_quoted_ids() {
    let s = schemas();
    let text = "instance I : REC {
      entity Room {
        row \"room one\" { roomName = ?n roomArea = null }
        row r2 { roomName = ?n }
      }
      entity Lease { row l1 { leaseOf = \"room one\" } }
    }";
    let i = parse_instance(&doc(text), &s[2]).unwrap();
    let (a, b) = (i.lookup("Room", "room one").unwrap(), i.lookup("Room", "r2").unwrap());
    let (na, nb) = (i.attr(a, "roomName").unwrap(), i.attr(b, "roomName").unwrap());
    assert!(matches!(na, AttrValue::Null(_)));
    assert_eq!(na, nb);
    assert_ne!(i.attr(a, "roomArea").unwrap(), na);
    let printed = print_canonical(&i);
    assert!(printed.contains("row \"room one\""), "{printed}");
    let again = parse_instance(&doc(&printed), &s[2]).unwrap();
    assert_eq!(print_canonical(&again), printed);
}

#[test]
fn extensions_parse() {
    let s = schemas();
    let ex1 = fixtures::EX1[1].1.split("query").next().unwrap();
    let x = parse_extension(&doc(ex1), &s).unwrap();
    assert_eq!(x.identifications.len(), 2);
    assert_eq!(x.constraints.len(), 2);

    let ex2 = fixtures::EX2[2].1.split("# Final Query").next().unwrap();
    let x = parse_extension(&doc(ex2), &s).unwrap();
    assert_eq!(x.includes.len(), 3);
    assert_eq!(x.identifications.len(), 3);
    assert_eq!(x.constraints.len(), 6);

    let solo = parse_extension(&doc("extension Solo { include REC }"), &s).unwrap();
    assert!(solo.identifications.is_empty());
}

#[test]
fn extension_errors() {
    let s = schemas();
    let text = "extension X { include IFC BRICK identify BRICK.Ghost = IFC.IfcSpace }";
    let d = parse_extension(&doc(text), &s).unwrap_err();
    assert_eq!(pointed_at(text, &d[0]), "Ghost");

    let text = "extension X { include IFC BRICK identify BRICK.Location = IFC.IfcSpace constraints forall l:Location -> l.spaceName = l.nope }";
    let d = parse_extension(&doc(text), &s).unwrap_err();
    assert_eq!(pointed_at(text, &d[0]), "nope");

    let text = "extension X { include IFC Nowhere }";
    let d = parse_extension(&doc(text), &s).unwrap_err();
    assert_eq!(pointed_at(text, &d[0]), "Nowhere");
}

#[test]
fn listings_parse() {
    let p = fixtures::example2();
    let q = p.query("TenantBilling").unwrap();
    assert_eq!(q.from.len(), 2);
    assert_eq!(q.atoms.len(), 1);
    assert_eq!(q.attributes.len(), 7);
    let p1 = fixtures::example1();
    let q = p1.query("q").unwrap();
    assert_eq!(q.from.len(), 1);
    assert_eq!(q.attributes[1].0, "IFC_spaceArea");
}

#[test]
fn query_errors() {
    let p = fixtures::example1();
    let c = combined(&p);
    let text = "query Q : Combined { from attributes a -> e.elementName }";
    let d = parse_query(&doc(text), c).unwrap_err();
    assert_eq!(pointed_at(text, &d[0]), "from");

    let text = "query Q : Combined { from e:Equipment attributes a -> x.elementName }";
    let d = parse_query(&doc(text), c).unwrap_err();
    assert_eq!(pointed_at(text, &d[0]), "x");
}

#[test]
fn canonical_round_trips() {
    let s = schemas();
    for schema in &s {
        let text = print_canonical(schema);
        assert_eq!(&parse_schema(&doc(&text)).unwrap(), schema, "{text}");
    }

    let p = fixtures::example2();
    let x = &p.pick_extension(None).unwrap().spec;
    let text = print_canonical(x);
    assert_eq!(&parse_extension(&doc(&text), &s).unwrap(), x, "{text}");

    let c = combined(&p);
    let q = p.query("TenantBilling").unwrap();
    let text = print_canonical(q);
    assert_eq!(&parse_query(&doc(&text), c).unwrap(), q, "{text}");

    let combined_text = print_canonical(c);
    assert_eq!(&parse_schema(&doc(&combined_text)).unwrap(), &c.schema);

    // saturated instances carry fresh elements and shared nulls
    let sat = fixtures::saturated(&fixtures::example1());
    let text = print_canonical(&sat);
    let c1 = fixtures::example1();
    let again = parse_instance(&doc(&text), &combined(&c1).schema).unwrap();
    assert_eq!(print_canonical(&again), text);
    assert_eq!(again.total_count(), sat.total_count());
}

#[test]
fn parsing_is_deterministic() {
    let text = fixtures::EX2[2].1;
    assert_eq!(parse_blocks(&doc(text)), parse_blocks(&doc(text)));
}

proptest! {
    #[test]
    fn diagnostics_point_inside_the_text(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let d = SourceDocument::from_bytes("fuzz.cmg", &bytes);
        let (_, diags) = parse_blocks(&d);
        let lines = d.text().lines().count().max(1);
        for x in diags {
            prop_assert!(x.span.start <= x.span.end && x.span.end <= d.text().len());
            prop_assert!(x.line >= 1 && x.line <= lines + 1);
            prop_assert!(x.column >= 1);
        }
    }

    #[test]
    fn mutated_fixtures_never_panic(cut in 0usize..2000, insert in "[{}():=\\-> a-z\"#.?0-9]{0,6}") {
        let text = fixtures::EX2[2].1;
        let at = text.char_indices().map(|(i, _)| i).nth(cut % text.len()).unwrap_or(0);
        let mutated = format!("{}{}{}", &text[..at], insert, &text[at..]);
        let p = fixtures::example2();
        let s: Vec<Schema> = p.schemas.clone();
        let _ = parse_extension(&doc(&mutated), &s);
        let (_, diags) = parse_blocks(&doc(&mutated));
        for x in diags {
            prop_assert!(x.span.end <= mutated.len());
        }
    }
}

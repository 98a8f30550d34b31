//! Example 1 data scaled to any number of rooms.
#![allow(dead_code)]

use std::fmt::Write;

/// An IFC instance with `n` rooms, each holding one AC unit with one
/// temperature sensor and its property set. Ids are zero-padded so they sort
/// numerically.
pub fn ifc_instance(n: usize) -> String {
    let w = n.to_string().len().max(3);
    let mut s = String::from("instance IFCData : IFC {\n  entity IfcSpace {\n");
    for i in 1..=n {
        let area = 15.0 + (i % 40) as f64 * 0.25;
        writeln!(s, "    row R{i:0w$} {{ spaceName = \"Room {i:0w$}\"  spaceArea = {area:.2} }}").unwrap();
    }
    s.push_str("  }\n  entity IfcDistributionElement {\n");
    for i in 1..=n {
        writeln!(
            s,
            "    row DE{i:0w$} {{ elementName = \"Split AC Room {i:0w$}\"  elementType = \"SplitAirConditioner\"  elementInSpace = R{i:0w$} }}"
        )
        .unwrap();
    }
    s.push_str("  }\n  entity IfcSensor {\n");
    for i in 1..=n {
        writeln!(
            s,
            "    row TS{i:0w$} {{ sensorName = \"Temperature Sensor Room {i:0w$}\"  sensorType = \"TemperatureSensor\"  sensorAttachedTo = DE{i:0w$}  hasPropertySet = PS{i:0w$} }}"
        )
        .unwrap();
    }
    s.push_str("  }\n  entity PropertySet {\n");
    for i in 1..=n {
        writeln!(s, "    row PS{i:0w$} {{ deviceId = \"{}\"  psetName = \"Pset_BMS\" }}", device_id(n, i)).unwrap();
    }
    s.push_str("  }\n}\n");
    s
}

pub fn device_id(n: usize, i: usize) -> String {
    let w = n.to_string().len().max(3);
    format!("TUC.245.77.R{i:0w$}")
}

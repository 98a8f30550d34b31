//! Loading the example fixtures from the workspace `fixtures/` directory.
#![allow(dead_code)]

use std::path::PathBuf;

use catamerge_core::chase::ChaseConfig;
use catamerge_core::instance::Instance;
use catamerge_core::program::{load, Integration, Program};
use catamerge_core::syntax::SourceDocument;

pub const EXAMPLE1: &[&str] = &["ifc.cmg", "ifc_instance.cmg", "brick.cmg", "example1/brick_instance.cmg", "example1/combined.cmg"];
pub const EXAMPLE2: &[&str] = &[
    "ifc.cmg",
    "ifc_instance.cmg",
    "brick.cmg",
    "rec.cmg",
    "example2/brick_instance.cmg",
    "example2/rec_instance.cmg",
    "example2/combined.cmg",
];
pub const CLASH: &[&str] = &[
    "ifc.cmg",
    "ifc_instance.cmg",
    "brick.cmg",
    "rec.cmg",
    "example2/brick_instance.cmg",
    "clash/rec_instance.cmg",
    "example2/combined.cmg",
];

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn path(name: &str) -> PathBuf {
    dir().join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn documents(names: &[&str]) -> Vec<SourceDocument> {
    names.iter().map(|n| SourceDocument::new(*n, read(n))).collect()
}

pub fn program(names: &[&str]) -> Program {
    load(&documents(names)).unwrap_or_else(|d| panic!("fixtures do not load: {d:?}"))
}

pub fn integrate_with(p: &Program, cfg: &ChaseConfig) -> Integration {
    p.integrate(p.pick_extension(None).unwrap(), cfg).unwrap()
}

pub fn integrate(p: &Program) -> Integration {
    integrate_with(p, &ChaseConfig::default())
}

pub fn saturated(p: &Program) -> Instance {
    integrate(p).saturated().expect("fixture saturates").clone()
}

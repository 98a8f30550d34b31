//! The paper's example fixtures, loaded for unit tests.

use crate::chase::ChaseConfig;
use crate::instance::Instance;
use crate::program::{load, Integration, Program};
use crate::syntax::SourceDocument;

macro_rules! fixture {
    ($path:literal) => {
        ($path, include_str!(concat!("../../../fixtures/", $path)))
    };
}

pub const IFC: [(&str, &str); 2] = [fixture!("ifc.cmg"), fixture!("ifc_instance.cmg")];
pub const BRICK: (&str, &str) = fixture!("brick.cmg");
pub const REC: (&str, &str) = fixture!("rec.cmg");
pub const EX1: [(&str, &str); 2] = [fixture!("example1/brick_instance.cmg"), fixture!("example1/combined.cmg")];
pub const EX2: [(&str, &str); 3] = [
    fixture!("example2/brick_instance.cmg"),
    fixture!("example2/rec_instance.cmg"),
    fixture!("example2/combined.cmg"),
];
pub const CLASH_REC: (&str, &str) = fixture!("clash/rec_instance.cmg");

pub fn program(files: &[(&str, &str)]) -> Program {
    let docs: Vec<SourceDocument> = files.iter().map(|(n, t)| SourceDocument::new(*n, *t)).collect();
    load(&docs).unwrap_or_else(|d| panic!("fixtures do not load: {d:?}"))
}

pub fn example1() -> Program {
    program(&[IFC[0], IFC[1], BRICK, EX1[0], EX1[1]])
}

pub fn example2() -> Program {
    program(&[IFC[0], IFC[1], BRICK, REC, EX2[0], EX2[1], EX2[2]])
}

pub fn clash() -> Program {
    program(&[IFC[0], IFC[1], BRICK, REC, EX2[0], CLASH_REC, EX2[2]])
}

pub fn integrate(p: &Program) -> Integration {
    p.integrate(p.pick_extension(None).unwrap(), &ChaseConfig::default()).unwrap()
}

pub fn saturated(p: &Program) -> Instance {
    integrate(p).saturated().expect("fixture saturates").clone()
}

//! Schema integration through theory extensions.
//!
//! Schemas are presentations of multi-sorted first-order theories: entities,
//! foreign keys, attributes over a fixed typeside, and existential Horn
//! clauses. An extension glues several schemas along entity identifications
//! and adds bridging constraints; the chase then saturates the combined data
//! into a universal solution that can be queried or projected back.

pub mod acyclicity;
pub mod chase;
pub mod constraint;
pub mod extension;
pub mod instance;
pub mod integrate;
pub mod path;
pub mod program;
pub mod query;
pub mod schema;
pub mod syntax;
pub mod typeside;

#[cfg(test)]
mod fixtures;

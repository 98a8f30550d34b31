//! The `.cmg` language: lexing, parsing, name resolution and printing.

pub mod ast;
pub mod lexer;
pub mod parser;
mod print;
mod resolve;
pub mod source;

use std::sync::Arc;

use crate::constraint::Constraint;
use crate::extension::ExtensionSpec;
use crate::instance::Instance;
use crate::integrate::CombinedSchema;
use crate::query::QuerySpec;
use crate::schema::Schema;

use ast::RawBlock;

pub use parser::{parse_blocks, parse_constraint_block};
pub use print::{print_canonical, Canonical};
pub use resolve::{resolve_constraint, resolve_extension, resolve_instance, resolve_query, resolve_schema};
pub use source::{Diagnostic, Severity, SourceDocument, Span};

/// The document's only block, or diagnostics.
fn single_block(doc: &SourceDocument, kind: &str) -> Result<RawBlock, Vec<Diagnostic>> {
    let (mut blocks, diags) = parse_blocks(doc);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    if blocks.len() != 1 {
        return Err(vec![Diagnostic::general(
            doc.name(),
            format!("expected exactly one {kind} block, found {} blocks", blocks.len()),
        )]);
    }
    Ok(blocks.remove(0))
}

fn wrong_kind<T>(doc: &SourceDocument, kind: &str) -> Result<T, Vec<Diagnostic>> {
    Err(vec![Diagnostic::general(doc.name(), format!("expected a {kind} block"))])
}

pub fn parse_schema(doc: &SourceDocument) -> Result<Schema, Vec<Diagnostic>> {
    match single_block(doc, "schema")? {
        RawBlock::Schema(raw) => resolve_schema(doc, &raw),
        _ => wrong_kind(doc, "schema"),
    }
}

/// Parses a single constraint such as
/// `forall l1 l2:Location where l1.spaceName = l2.roomName -> l1 = l2`.
pub fn parse_constraint(doc: &SourceDocument, schema: &Schema) -> Result<Constraint, Vec<Diagnostic>> {
    let (raw, diags) = parse_constraint_block(doc);
    match raw {
        Some(raw) if diags.is_empty() => resolve_constraint(doc, &raw, schema),
        _ => Err(diags),
    }
}

pub fn parse_instance(doc: &SourceDocument, schema: &Schema) -> Result<Instance, Vec<Diagnostic>> {
    match single_block(doc, "instance")? {
        RawBlock::Instance(raw) => resolve_instance(doc, &raw, &Arc::new(schema.clone())),
        _ => wrong_kind(doc, "instance"),
    }
}

pub fn parse_extension(doc: &SourceDocument, schemas: &[Schema]) -> Result<ExtensionSpec, Vec<Diagnostic>> {
    match single_block(doc, "extension")? {
        RawBlock::Extension(raw) => resolve_extension(doc, &raw, schemas).map(|(x, _)| x),
        _ => wrong_kind(doc, "extension"),
    }
}

pub fn parse_query(doc: &SourceDocument, combined: &CombinedSchema) -> Result<QuerySpec, Vec<Diagnostic>> {
    match single_block(doc, "query")? {
        RawBlock::Query(raw) => resolve_query(doc, &raw, combined),
        _ => wrong_kind(doc, "query"),
    }
}

#[cfg(test)]
mod tests;

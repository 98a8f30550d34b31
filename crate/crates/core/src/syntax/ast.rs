//! Unresolved syntax trees, straight from the parser. Names keep their spans
//! so that resolution errors point at the offending token.

use crate::typeside::{Predicate, Value};

use super::source::Span;

#[derive(Clone, Debug, PartialEq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawTerm {
    Path { var: Name, steps: Vec<Name> },
    Lit { value: Value, span: Span },
    App { func: Name, args: Vec<RawTerm>, span: Span },
}

impl RawTerm {
    pub fn span(&self) -> Span {
        match self {
            RawTerm::Path { var, steps } => steps.last().map_or(var.span, |s| var.span.to(s.span)),
            RawTerm::Lit { span, .. } | RawTerm::App { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawAtom {
    pub pred: Predicate,
    pub pred_span: Span,
    pub lhs: RawTerm,
    pub rhs: RawTerm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawBinder {
    pub var: Name,
    pub entity: Name,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawConstraint {
    pub label: Option<Name>,
    pub universals: Vec<RawBinder>,
    pub premise: Vec<RawAtom>,
    pub existentials: Vec<RawBinder>,
    pub conclusion: Vec<RawAtom>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawMember {
    pub name: Name,
    pub source: Name,
    pub target: Name,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawSchema {
    pub name: Name,
    pub entities: Vec<Name>,
    pub foreign_keys: Vec<RawMember>,
    pub attributes: Vec<RawMember>,
    pub constraints: Vec<RawConstraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawValue {
    Ident(Name),
    Str(Name),
    Number(Value, Span),
    Null(Span),
    Label(Name),
}

impl RawValue {
    pub fn span(&self) -> Span {
        match self {
            RawValue::Ident(n) | RawValue::Str(n) | RawValue::Label(n) => n.span,
            RawValue::Number(_, s) | RawValue::Null(s) => *s,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawRow {
    pub entity: Name,
    pub id: Name,
    pub cells: Vec<(Name, RawValue)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawInstance {
    pub name: Name,
    pub schema: Name,
    pub rows: Vec<RawRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawQualified {
    pub schema: Name,
    pub entity: Name,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawExtension {
    pub name: Name,
    pub includes: Vec<Name>,
    pub identifications: Vec<(RawQualified, RawQualified)>,
    pub constraints: Vec<RawConstraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawQuery {
    pub name: Name,
    pub target: Name,
    pub from: Vec<RawBinder>,
    pub atoms: Vec<RawAtom>,
    pub attributes: Vec<(Name, RawTerm)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawBlock {
    Schema(RawSchema),
    Instance(RawInstance),
    Extension(RawExtension),
    Query(RawQuery),
}

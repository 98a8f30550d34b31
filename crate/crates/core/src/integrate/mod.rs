//! Combined schemas and data migration between sources and the combination.

mod combine;
mod migrate;
mod roundtrip;

use thiserror::Error;

use crate::extension::QualifiedEntity;
use crate::instance::InstanceError;

pub use combine::{combine_schemas, CombinedSchema, MemberOrigin};
pub use migrate::{delta_project, sigma_insert};
pub use roundtrip::{roundtrip_report, RoundTripReport, TableDelta};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IntegrateError {
    #[error("schema `{0}` is not part of the extension")]
    UnknownSchema(String),
    #[error("schema `{0}` is included twice")]
    DuplicateInclude(String),
    #[error("`{0}` is not a declared entity")]
    UnknownEntity(QualifiedEntity),
    #[error("`{left}` and `{right}` belong to the same schema and cannot be identified")]
    SameSchemaIdentification {
        left: QualifiedEntity,
        right: QualifiedEntity,
    },
    #[error("identification collision: {0}")]
    IdentificationCollision(String),
    #[error("constraint `{label}` of `{schema}` cannot be carried over: {message}")]
    ConstraintTranslation {
        schema: String,
        label: String,
        message: String,
    },
    #[error("combined schema is invalid: {0}")]
    InvalidCombined(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

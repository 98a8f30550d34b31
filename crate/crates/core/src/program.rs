//! Loading a set of `.cmg` documents and running the integration pipeline.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::chase::{chase, ChaseConfig, ChaseError, ChaseOutcome};
use crate::extension::ExtensionSpec;
use crate::instance::Instance;
use crate::integrate::{delta_project, roundtrip_report, sigma_insert, CombinedSchema, IntegrateError, RoundTripReport};
use crate::query::{evaluate, QueryError, QuerySpec, ResultTable};
use crate::schema::Schema;
use crate::syntax::ast::RawBlock;
use crate::syntax::{
    parse_blocks, resolve_extension, resolve_instance, resolve_query, resolve_schema, Diagnostic, SourceDocument,
};

#[derive(Clone, Debug)]
pub struct LoadedExtension {
    pub spec: ExtensionSpec,
    pub combined: CombinedSchema,
}

/// Every block of a document set, resolved.
#[derive(Clone, Debug, Default)]
pub struct Program {
    pub schemas: Vec<Schema>,
    pub instances: Vec<Instance>,
    pub extensions: Vec<LoadedExtension>,
    pub queries: Vec<QuerySpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("unknown extension `{0}`")]
    UnknownExtension(String),
    #[error("unknown query `{0}`")]
    UnknownQuery(String),
    #[error("schema `{0}` is not part of the extension")]
    UnknownSchema(String),
    #[error("the input declares no extension")]
    NoExtension,
    #[error("several extensions are declared ({0}); choose one")]
    AmbiguousExtension(String),
    #[error("schema `{0}` has more than one instance")]
    AmbiguousInstance(String),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Chase(#[from] ChaseError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

fn located(doc: &SourceDocument, span: crate::syntax::Span, message: String) -> Diagnostic {
    let (line, column) = doc.location(span.start);
    Diagnostic {
        line,
        column,
        span,
        ..Diagnostic::general(doc.name(), message)
    }
}

/// Parses and resolves all documents. Schemas are resolved first, then
/// instances and extensions, then queries, so block order across files does
/// not matter.
pub fn load(docs: &[SourceDocument]) -> Result<Program, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut blocks: Vec<(usize, RawBlock)> = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        let (bs, ds) = parse_blocks(doc);
        diags.extend(ds);
        blocks.extend(bs.into_iter().map(|b| (i, b)));
    }

    let mut p = Program::default();
    for (i, b) in &blocks {
        if let RawBlock::Schema(raw) = b {
            if p.schemas.iter().any(|s| s.name == raw.name.text) {
                diags.push(located(&docs[*i], raw.name.span, format!("schema `{}` is declared twice", raw.name.text)));
                continue;
            }
            match resolve_schema(&docs[*i], raw) {
                Ok(s) => p.schemas.push(s),
                Err(ds) => diags.extend(ds),
            }
        }
    }
    let arcs: Vec<Arc<Schema>> = p.schemas.iter().cloned().map(Arc::new).collect();
    let mut names = BTreeSet::new();
    for (i, b) in &blocks {
        match b {
            RawBlock::Instance(raw) => {
                if !names.insert(raw.name.text.clone()) {
                    diags.push(located(&docs[*i], raw.name.span, format!("`{}` is declared twice", raw.name.text)));
                    continue;
                }
                let Some(s) = arcs.iter().find(|s| s.name == raw.schema.text) else {
                    diags.push(located(&docs[*i], raw.schema.span, format!("unknown schema `{}`", raw.schema.text)));
                    continue;
                };
                match resolve_instance(&docs[*i], raw, s) {
                    Ok(inst) => p.instances.push(inst),
                    Err(ds) => diags.extend(ds),
                }
            }
            RawBlock::Extension(raw) => {
                if !names.insert(raw.name.text.clone()) || p.schemas.iter().any(|s| s.name == raw.name.text) {
                    diags.push(located(&docs[*i], raw.name.span, format!("`{}` is declared twice", raw.name.text)));
                    continue;
                }
                match resolve_extension(&docs[*i], raw, &p.schemas) {
                    Ok((spec, combined)) => p.extensions.push(LoadedExtension { spec, combined }),
                    Err(ds) => diags.extend(ds),
                }
            }
            _ => {}
        }
    }
    let mut query_names = BTreeSet::new();
    for (i, b) in &blocks {
        if let RawBlock::Query(raw) = b {
            if !query_names.insert(raw.name.text.clone()) {
                diags.push(located(&docs[*i], raw.name.span, format!("query `{}` is declared twice", raw.name.text)));
                continue;
            }
            let Some(x) = p.extensions.iter().find(|x| x.spec.name == raw.target.text) else {
                diags.push(located(&docs[*i], raw.target.span, format!("unknown extension `{}`", raw.target.text)));
                continue;
            };
            match resolve_query(&docs[*i], raw, &x.combined) {
                Ok(q) => p.queries.push(q),
                Err(ds) => diags.extend(ds),
            }
        }
    }
    if diags.iter().any(Diagnostic::is_error) {
        Err(diags)
    } else {
        Ok(p)
    }
}

/// Result of integrating one extension.
#[derive(Clone, Debug)]
pub struct Integration {
    pub combined: CombinedSchema,
    /// The combined instance before the chase.
    pub pre: Instance,
    pub outcome: ChaseOutcome,
}

impl Integration {
    pub fn saturated(&self) -> Option<&Instance> {
        match &self.outcome {
            ChaseOutcome::Saturated { instance, .. } => Some(instance),
            _ => None,
        }
    }
}

impl Program {
    pub fn schema(&self, name: &str) -> Option<&Schema> {
        self.schemas.iter().find(|s| s.name == name)
    }

    pub fn extension(&self, name: &str) -> Option<&LoadedExtension> {
        self.extensions.iter().find(|x| x.spec.name == name)
    }

    pub fn query(&self, name: &str) -> Option<&QuerySpec> {
        self.queries.iter().find(|q| q.name == name)
    }

    /// The named extension, or the only one when `name` is `None`.
    pub fn pick_extension(&self, name: Option<&str>) -> Result<&LoadedExtension, PipelineError> {
        match name {
            Some(n) => self.extension(n).ok_or_else(|| PipelineError::UnknownExtension(n.to_string())),
            None => match self.extensions.as_slice() {
                [] => Err(PipelineError::NoExtension),
                [only] => Ok(only),
                many => Err(PipelineError::AmbiguousExtension(
                    many.iter().map(|x| x.spec.name.as_str()).collect::<Vec<_>>().join(", "),
                )),
            },
        }
    }

    /// The instance declared over `schema`, if any.
    pub fn instance_for(&self, schema: &str) -> Result<Option<&Instance>, PipelineError> {
        let mut found = self.instances.iter().filter(|i| i.schema().name == schema);
        let first = found.next();
        if found.next().is_some() {
            return Err(PipelineError::AmbiguousInstance(schema.to_string()));
        }
        Ok(first)
    }

    /// Source instances of an extension; schemas without one contribute an
    /// empty instance.
    pub fn sources(&self, x: &LoadedExtension) -> Result<Vec<Instance>, PipelineError> {
        x.spec
            .includes
            .iter()
            .map(|s| {
                Ok(match self.instance_for(&s.name)? {
                    Some(i) => i.clone(),
                    None => Instance::new(Arc::new(s.clone())).with_name(format!("{}_empty", s.name)),
                })
            })
            .collect()
    }

    pub fn integrate(&self, x: &LoadedExtension, cfg: &ChaseConfig) -> Result<Integration, PipelineError> {
        let sources = self.sources(x)?;
        let refs: Vec<&Instance> = sources.iter().collect();
        let pre = sigma_insert(&x.combined, &refs)?;
        let outcome = chase(&pre, &x.combined.schema.constraints, cfg)?;
        Ok(Integration {
            combined: x.combined.clone(),
            pre,
            outcome,
        })
    }

    pub fn run_query(&self, name: &str, sat: &Instance) -> Result<ResultTable, PipelineError> {
        let q = self.query(name).ok_or_else(|| PipelineError::UnknownQuery(name.to_string()))?;
        Ok(evaluate(q, sat)?)
    }

    /// Projects `sat` back to `schema` and compares with that schema's source.
    pub fn roundtrip(
        &self,
        x: &LoadedExtension,
        sat: &Instance,
        schema: &str,
    ) -> Result<(Instance, RoundTripReport), PipelineError> {
        let target = x
            .spec
            .include(schema)
            .ok_or_else(|| PipelineError::UnknownSchema(schema.to_string()))?;
        let recovered = delta_project(&x.combined, sat, target)?;
        let original = match self.instance_for(schema)? {
            Some(i) => i.clone(),
            None => Instance::new(Arc::new(target.clone())),
        };
        let report = roundtrip_report(&original, &recovered);
        Ok((recovered, report))
    }
}

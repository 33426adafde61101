use entangle_core::{AnalyzeError, CompileError, DocumentError, EditError, ObserveError, ResetError};
use serde_json::{json, Value};
use thiserror::Error;

use crate::wire::ErrorBody;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ServiceError {
    #[error("session {0:?} not found")]
    SessionNotFound(String),
    #[error("expected last seq {expected} but the session is at {actual}")]
    StalePreconditionSequence { expected: u64, actual: u64 },
    #[error("malformed command: {0}")]
    MalformedCommand(String),
    #[error("scene is not compiled")]
    NotCompiled,
    #[error("no object matches {0}")]
    UnknownTarget(String),
    #[error("edit {index} rejected: {error}")]
    Edit { index: usize, error: EditError },
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Observe(#[from] ObserveError),
    #[error(transparent)]
    Reset(#[from] ResetError),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::SessionNotFound(_) => "SessionNotFound",
            ServiceError::StalePreconditionSequence { .. } => "StalePreconditionSequence",
            ServiceError::MalformedCommand(_) => "MalformedCommand",
            ServiceError::NotCompiled => "NotCompiled",
            ServiceError::UnknownTarget(_) => "UnknownTarget",
            ServiceError::Edit { error, .. } => error.code(),
            ServiceError::Document(e) => e.code(),
            ServiceError::Compile(e) => e.code(),
            ServiceError::Observe(e) => e.code(),
            ServiceError::Reset(e) => e.code(),
            ServiceError::Analyze(e) => e.code(),
        }
    }

    /// HTTP status used by the transport.
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::SessionNotFound(_) => 404,
            ServiceError::StalePreconditionSequence { .. } | ServiceError::NotCompiled => 409,
            ServiceError::MalformedCommand(_) | ServiceError::Document(_) => 400,
            _ => 422,
        }
    }

    fn details(&self) -> Value {
        match self {
            ServiceError::StalePreconditionSequence { expected, actual } => {
                json!({ "expected": expected, "actual": actual })
            }
            ServiceError::Edit { index, error } => json!({ "index": index, "nodes": error.nodes() }),
            ServiceError::Compile(CompileError::CompileOnInvalidGraph(report)) => json!({ "report": report }),
            _ => Value::Null,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            code: self.code(),
            message: self.to_string(),
            details: self.details(),
        }
    }
}

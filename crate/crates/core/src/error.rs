use thiserror::Error;

use crate::scene::{NodeId, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("amplitudes are not normalized (|a0|²+|a1|² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("amplitudes must be finite")]
    NonFinite,
    #[error("bloch coordinates out of range (theta={theta}, phi={phi})")]
    BlochOutOfRange { theta: f64, phi: f64 },
}

/// Rejected graph edit. The graph is left untouched.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("cannot connect {from} ({from_kind}) to {to} ({to_kind})")]
    TypeMismatch {
        from: NodeId,
        from_kind: &'static str,
        to: NodeId,
        to_kind: &'static str,
    },
    #[error("field `{field}` does not apply to node {id} ({kind})")]
    FieldMismatch {
        id: NodeId,
        field: &'static str,
        kind: &'static str,
    },
    #[error("connecting {from} to {to} would create a cycle")]
    WouldCreateCycle { from: NodeId, to: NodeId },
    #[error("node {member} is already a member of {owner}")]
    DuplicateMember { owner: NodeId, member: NodeId },
    #[error("input of node {0} is already connected")]
    InputOccupied(NodeId),
    #[error("no connection from {from} to {to}")]
    NotConnected { from: NodeId, to: NodeId },
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

impl EditError {
    pub fn code(&self) -> &'static str {
        match self {
            EditError::UnknownNode(_) => "UnknownNode",
            EditError::TypeMismatch { .. } | EditError::FieldMismatch { .. } => "TypeMismatch",
            EditError::WouldCreateCycle { .. } => "WouldCreateCycle",
            EditError::DuplicateMember { .. } => "DuplicateMember",
            EditError::InputOccupied(_) => "InputOccupied",
            EditError::NotConnected { .. } => "NotConnected",
            EditError::InvalidValue(_) => "InvalidValue",
        }
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        match *self {
            EditError::UnknownNode(id) | EditError::InputOccupied(id) => vec![id],
            EditError::FieldMismatch { id, .. } => vec![id],
            EditError::TypeMismatch { from, to, .. }
            | EditError::WouldCreateCycle { from, to }
            | EditError::NotConnected { from, to } => vec![from, to],
            EditError::DuplicateMember { owner, member } => vec![owner, member],
            EditError::InvalidValue(_) => vec![],
        }
    }
}

impl From<QuantumError> for EditError {
    fn from(e: QuantumError) -> Self {
        EditError::InvalidValue(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("malformed scene document: {0}")]
    MalformedDocument(String),
    #[error("unsupported scene version {0:?}")]
    UnsupportedVersion(String),
}

impl DocumentError {
    pub fn code(&self) -> &'static str {
        match self {
            DocumentError::MalformedDocument(_) => "MalformedDocument",
            DocumentError::UnsupportedVersion(_) => "UnsupportedVersion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("scene has {} validation error(s)", .0.errors.len())]
    CompileOnInvalidGraph(ValidationReport),
}

impl CompileError {
    pub fn code(&self) -> &'static str {
        "CompileOnInvalidGraph"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObserveError {
    #[error("unknown observation target {0}")]
    UnknownTarget(NodeId),
    #[error("object {0} is not interactable")]
    NotInteractable(NodeId),
}

impl ObserveError {
    pub fn code(&self) -> &'static str {
        match self {
            ObserveError::UnknownTarget(_) => "UnknownTarget",
            ObserveError::NotInteractable(_) => "NotInteractable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResetError {
    #[error("override references unknown object {0}")]
    UnknownObject(NodeId),
}

impl ResetError {
    pub fn code(&self) -> &'static str {
        "UnknownObject"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("{count} interactable objects exceed the enumeration limit of {max}")]
    TooManyObjects { count: usize, max: usize },
    #[error(transparent)]
    Observe(#[from] ObserveError),
}

impl AnalyzeError {
    pub fn code(&self) -> &'static str {
        match self {
            AnalyzeError::TooManyObjects { .. } => "TooManyObjects",
            AnalyzeError::Observe(e) => e.code(),
        }
    }
}

//! JSON shapes exchanged with clients.
//!
//! Commands go in as `{"type": ..., "expect_seq"?: n, ...fields}`, responses
//! come back as `{ok, seq, result | error}` and events are `{seq, kind,
//! payload}`. `seq` counts events per session, starting at 1.

use entangle_core::analyzer::{FrustrationReport, ObserverSummary, OutcomeDistribution};
use entangle_core::collapse::{CollapseTrace, RuntimeView};
use entangle_core::scene::{Edit, ValidationReport};
use entangle_core::{NodeId, Outcome, SceneGraph};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Object named by id or by (case-insensitive) label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectRef {
    Id(NodeId),
    Label(String),
}

impl ObjectRef {
    pub fn resolve(&self, graph: &SceneGraph) -> Option<NodeId> {
        match self {
            ObjectRef::Id(id) => Some(*id),
            ObjectRef::Label(name) => graph.resolve_object(name),
        }
    }
}

impl std::fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectRef::Id(id) => write!(f, "{id}"),
            ObjectRef::Label(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverrideRef {
    pub object: ObjectRef,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Command {
    LoadScene {
        document: Value,
    },
    GetScene,
    SaveScene,
    Edit {
        edits: Vec<Edit>,
    },
    Compile,
    Observe {
        target: ObjectRef,
    },
    Reset {
        #[serde(default)]
        overrides: Vec<OverrideRef>,
    },
    Enumerate {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_objects: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        include_prefixes: Option<bool>,
    },
    SetSeed {
        seed: u64,
    },
    ObserverSummary {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<ObjectRef>,
    },
    /// Dry run on a copy of the compiled scene; the session is untouched.
    Simulate {
        targets: Vec<ObjectRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LoadScene { .. } => "load_scene",
            Command::GetScene => "get_scene",
            Command::SaveScene => "save_scene",
            Command::Edit { .. } => "edit",
            Command::Compile => "compile",
            Command::Observe { .. } => "observe",
            Command::Reset { .. } => "reset",
            Command::Enumerate { .. } => "enumerate",
            Command::SetSeed { .. } => "set_seed",
            Command::ObserverSummary { .. } => "observer_summary",
            Command::Simulate { .. } => "simulate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandEnvelope {
    /// Rejects the command unless the session's last event has this seq.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_seq: Option<u64>,
    #[serde(flatten)]
    pub command: Command,
}

impl From<Command> for CommandEnvelope {
    fn from(command: Command) -> Self {
        CommandEnvelope {
            expect_seq: None,
            command,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Response {
    pub ok: bool,
    pub seq: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
    #[serde(skip)]
    pub status: u16,
}

/// Full session state, as carried by `snapshot` and `get_scene`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneState {
    pub scene: Value,
    pub validation: ValidationReport,
    pub runtime: Option<RuntimeView>,
    pub observers: Vec<ObserverSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedEdit {
    pub index: usize,
    pub code: &'static str,
    pub message: String,
    pub nodes: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Event {
    Snapshot {
        last_seq: u64,
        #[serde(flatten)]
        state: SceneState,
    },
    SceneChanged {
        scene: Value,
        created: Vec<NodeId>,
        runtime_invalidated: bool,
    },
    Validation {
        report: ValidationReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        rejected: Option<RejectedEdit>,
    },
    Collapsed {
        trace: CollapseTrace,
        runtime: RuntimeView,
        observers: Vec<ObserverSummary>,
    },
    ResetDone {
        runtime: RuntimeView,
        observers: Vec<ObserverSummary>,
    },
    /// This subscriber fell behind and `missed` events were dropped.
    Gap {
        missed: u64,
    },
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::Snapshot { .. } => "snapshot",
            Event::SceneChanged { .. } => "scene_changed",
            Event::Validation { .. } => "validation",
            Event::Collapsed { .. } => "collapsed",
            Event::ResetDone { .. } => "reset_done",
            Event::Gap { .. } => "gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventEnvelope {
    pub seq: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerateResult {
    pub distributions: Vec<OutcomeDistribution>,
    pub frustration: FrustrationReport,
}

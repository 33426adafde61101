//! Scene model, collapse runtime and outcome analysis for entangled
//! super-object scenes.
//!
//! A scene is a graph of qubit sources, gates, super objects and their
//! properties, entanglers and observers. [`scene::compile`] turns a valid
//! graph into a [`collapse::RuntimeScene`], which collapses objects on
//! observation and propagates outcomes along entanglement links.

pub mod analyzer;
pub mod collapse;
pub mod error;
pub mod fixtures;
pub mod quantum;
pub mod scene;
pub mod signed;

pub use collapse::{simulate_sequence, CollapseTrace, Override, RuntimeScene, Status};
pub use error::{AnalyzeError, CompileError, DocumentError, EditError, ObserveError, QuantumError, ResetError};
pub use quantum::{Gate, Outcome, QubitState, Rng};
pub use scene::{compile, load, save, NodeId, SceneGraph};

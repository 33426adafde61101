//! One authoring/play session. Commands run strictly one at a time; each
//! produces a response and zero or more sequenced events.

use std::collections::BTreeMap;

use entangle_core::analyzer::{
    detect_frustration, enumerate_outcomes, observer_summaries, observer_summary, EnumerateOptions,
};
use entangle_core::collapse::Override;
use entangle_core::scene::{self, validate, AssetMeta};
use entangle_core::{compile, simulate_sequence, NodeId, RuntimeScene, SceneGraph};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::ServiceError;
use crate::wire::{
    Command, CommandEnvelope, EnumerateResult, Event, EventEnvelope, ObjectRef, RejectedEdit, Response,
    SceneState,
};

#[derive(Debug, Clone)]
pub struct Session {
    graph: SceneGraph,
    /// Present only while it matches the latest successfully compiled graph.
    runtime: Option<RuntimeScene>,
    seq: u64,
}

pub struct Outcome {
    pub response: Response,
    pub events: Vec<EventEnvelope>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("wire types serialize")
}

impl Session {
    pub fn new(seed: u64, assets: &BTreeMap<String, AssetMeta>) -> Self {
        let mut graph = SceneGraph::new(seed);
        for (name, meta) in assets {
            graph.add_asset(name.clone(), meta.clone());
        }
        Session::with_graph(graph)
    }

    pub fn with_graph(graph: SceneGraph) -> Self {
        Session {
            graph,
            runtime: None,
            seq: 0,
        }
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn graph(&self) -> &SceneGraph {
        &self.graph
    }

    pub fn runtime(&self) -> Option<&RuntimeScene> {
        self.runtime.as_ref()
    }

    pub fn state(&self) -> SceneState {
        SceneState {
            scene: scene::to_value(&self.graph),
            validation: validate(&self.graph),
            runtime: self.runtime.as_ref().map(RuntimeScene::view),
            observers: self.observers(),
        }
    }

    pub fn snapshot(&self) -> EventEnvelope {
        EventEnvelope {
            seq: self.seq,
            event: Event::Snapshot {
                last_seq: self.seq,
                state: self.state(),
            },
        }
    }

    fn observers(&self) -> Vec<entangle_core::analyzer::ObserverSummary> {
        self.runtime
            .as_ref()
            .map(|rt| observer_summaries(&self.graph, rt))
            .unwrap_or_default()
    }

    fn emit(&mut self, events: &mut Vec<EventEnvelope>, event: Event) {
        self.seq += 1;
        events.push(EventEnvelope { seq: self.seq, event });
    }

    fn runtime_mut(&mut self) -> Result<&mut RuntimeScene, ServiceError> {
        self.runtime.as_mut().ok_or(ServiceError::NotCompiled)
    }

    fn resolve(&self, r: &ObjectRef) -> Result<NodeId, ServiceError> {
        r.resolve(&self.graph)
            .ok_or_else(|| ServiceError::UnknownTarget(r.to_string()))
    }

    pub fn execute(&mut self, envelope: CommandEnvelope) -> Outcome {
        let mut events = Vec::new();
        let result = match envelope.expect_seq {
            Some(expected) if expected != self.seq => Err(ServiceError::StalePreconditionSequence {
                expected,
                actual: self.seq,
            }),
            _ => self.run(envelope.command, &mut events),
        };
        let response = match result {
            Ok(value) => Response {
                ok: true,
                seq: self.seq,
                result: Some(value),
                error: None,
                status: 200,
            },
            Err(e) => Response {
                ok: false,
                seq: self.seq,
                result: None,
                error: Some(e.body()),
                status: e.status(),
            },
        };
        Outcome { response, events }
    }

    fn run(&mut self, command: Command, events: &mut Vec<EventEnvelope>) -> Result<Value, ServiceError> {
        match command {
            Command::LoadScene { document } => {
                let graph = scene::from_value(document)?;
                self.graph = graph;
                let invalidated = self.runtime.take().is_some();
                let report = validate(&self.graph);
                self.emit(
                    events,
                    Event::SceneChanged {
                        scene: scene::to_value(&self.graph),
                        created: Vec::new(),
                        runtime_invalidated: invalidated,
                    },
                );
                self.emit(
                    events,
                    Event::Validation {
                        report: report.clone(),
                        rejected: None,
                    },
                );
                Ok(json!({ "validation": report }))
            }
            Command::GetScene => Ok(to_value(&self.state())),
            Command::SaveScene => {
                let text = String::from_utf8(scene::save(&self.graph)).expect("documents are UTF-8");
                Ok(json!({ "document": text }))
            }
            Command::Edit { edits } => match self.graph.with_edits(&edits) {
                Ok((graph, created)) => {
                    self.graph = graph;
                    let invalidated = self.runtime.take().is_some();
                    let report = validate(&self.graph);
                    self.emit(
                        events,
                        Event::SceneChanged {
                            scene: scene::to_value(&self.graph),
                            created: created.clone(),
                            runtime_invalidated: invalidated,
                        },
                    );
                    self.emit(
                        events,
                        Event::Validation {
                            report: report.clone(),
                            rejected: None,
                        },
                    );
                    Ok(json!({ "created": created, "validation": report }))
                }
                Err((index, error)) => {
                    self.emit(
                        events,
                        Event::Validation {
                            report: validate(&self.graph),
                            rejected: Some(RejectedEdit {
                                index,
                                code: error.code(),
                                message: error.to_string(),
                                nodes: error.nodes(),
                            }),
                        },
                    );
                    Err(ServiceError::Edit { index, error })
                }
            },
            Command::Compile => {
                let report = validate(&self.graph);
                self.emit(
                    events,
                    Event::Validation {
                        report: report.clone(),
                        rejected: None,
                    },
                );
                let runtime = compile(&self.graph)?;
                let view = runtime.view();
                self.runtime = Some(runtime);
                let observers = self.observers();
                self.emit(
                    events,
                    Event::ResetDone {
                        runtime: view.clone(),
                        observers,
                    },
                );
                Ok(json!({ "runtime": view, "validation": report }))
            }
            Command::Observe { target } => {
                let target = self.resolve(&target)?;
                let trace = self.runtime_mut()?.observe(target)?;
                let runtime = self.runtime.as_ref().expect("checked above").view();
                let observers = self.observers();
                self.emit(
                    events,
                    Event::Collapsed {
                        trace: trace.clone(),
                        runtime,
                        observers,
                    },
                );
                Ok(json!({ "trace": trace }))
            }
            Command::Reset { overrides } => {
                let overrides = overrides
                    .iter()
                    .map(|o| {
                        Ok(Override {
                            object: self.resolve(&o.object)?,
                            outcome: o.outcome,
                        })
                    })
                    .collect::<Result<Vec<_>, ServiceError>>()?;
                self.runtime_mut()?.reset(&overrides)?;
                self.emit_reset(events);
                Ok(json!({ "runtime": self.runtime.as_ref().expect("reset succeeded").view() }))
            }
            Command::Enumerate {
                max_objects,
                include_prefixes,
            } => {
                let rt = self.runtime.as_ref().ok_or(ServiceError::NotCompiled)?;
                let defaults = EnumerateOptions::default();
                let options = EnumerateOptions {
                    max_objects: max_objects.unwrap_or(defaults.max_objects),
                    include_prefixes: include_prefixes.unwrap_or(defaults.include_prefixes),
                };
                Ok(to_value(&EnumerateResult {
                    distributions: enumerate_outcomes(rt, options)?,
                    frustration: detect_frustration(rt),
                }))
            }
            Command::SetSeed { seed } => {
                self.graph.set_seed(seed);
                self.emit(
                    events,
                    Event::SceneChanged {
                        scene: scene::to_value(&self.graph),
                        created: Vec::new(),
                        runtime_invalidated: false,
                    },
                );
                if let Some(rt) = self.runtime.as_mut() {
                    rt.reseed(seed, &[]).expect("no overrides to reject");
                    self.emit_reset(events);
                }
                Ok(json!({ "seed": seed }))
            }
            Command::ObserverSummary { target } => {
                let rt = self.runtime.as_ref().ok_or(ServiceError::NotCompiled)?;
                let observers = match target {
                    None => observer_summaries(&self.graph, rt),
                    Some(t) => vec![observer_summary(rt, self.resolve(&t)?)?],
                };
                Ok(json!({ "observers": observers }))
            }
            Command::Simulate { targets, seed } => {
                let rt = self.runtime.as_ref().ok_or(ServiceError::NotCompiled)?;
                let targets = targets
                    .iter()
                    .map(|t| self.resolve(t))
                    .collect::<Result<Vec<_>, _>>()?;
                let seed = seed.unwrap_or(self.graph.seed());
                let (_, traces) = simulate_sequence(rt, &targets, seed)?;
                Ok(json!({ "seed": seed, "traces": traces }))
            }
        }
    }

    fn emit_reset(&mut self, events: &mut Vec<EventEnvelope>) {
        let runtime = self.runtime.as_ref().expect("compiled").view();
        let observers = self.observers();
        self.emit(events, Event::ResetDone { runtime, observers });
    }
}

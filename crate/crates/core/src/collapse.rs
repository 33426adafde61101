//! Runtime scene and the observation procedure.
//!
//! Observing a superposed object samples its qubit once, then resolves the
//! rest of its entanglement component breadth-first: neighbors are visited in
//! ascending id order and each newly reached superposed object takes the
//! outcome its relation dictates from the object that reached it. Objects
//! that are already classical never change; they still pass their outcome on
//! to their own neighbors. When two paths disagree (only possible on a
//! frustrated cycle or after a forced starting state), the first arrival
//! stands and the disagreement is recorded as a conflict.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{ObserveError, ResetError};
use crate::quantum::{Outcome, QubitState, Rng, Sampler};
use crate::scene::{NodeId, PropertyValues, Relation, StateDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "outcome", rename_all = "snake_case")]
pub enum Status {
    Superposed,
    Classical(Outcome),
}

impl Status {
    pub fn outcome(self) -> Option<Outcome> {
        match self {
            Status::Superposed => None,
            Status::Classical(o) => Some(o),
        }
    }

    pub fn is_classical(self) -> bool {
        matches!(self, Status::Classical(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyRuntime {
    pub id: NodeId,
    pub values: PropertyValues,
    pub effective: QubitState,
    /// `Classical(k)` selects `value{k}`.
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRuntime {
    pub label: String,
    pub states: [StateDef; 2],
    pub interactable: bool,
    pub position: Option<[f64; 2]>,
    pub effective: QubitState,
    pub status: Status,
    /// Sorted by property id.
    pub properties: Vec<PropertyRuntime>,
}

impl ObjectRuntime {
    pub fn state_name(&self, outcome: Outcome) -> &str {
        &self.states[outcome.index()].name
    }

    /// Location after collapse, falling back to the authored base position.
    pub fn current_position(&self) -> Option<[f64; 2]> {
        for p in &self.properties {
            if let (PropertyValues::Location { value0, value1 }, Status::Classical(k)) =
                (&p.values, p.status)
            {
                return Some(if k == Outcome::Zero { *value0 } else { *value1 });
            }
        }
        self.position
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub neighbor: NodeId,
    pub relation: Relation,
    pub via: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "cause", rename_all = "snake_case")]
pub enum Cause {
    Sampled,
    Propagated {
        source: NodeId,
        relation: Relation,
    },
    AlreadyClassical {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<NodeId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        relation: Option<Relation>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub object: NodeId,
    pub outcome: Outcome,
    #[serde(flatten)]
    pub cause: Cause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyEvent {
    pub object: NodeId,
    pub property: NodeId,
    pub value: Outcome,
}

/// An edge whose relation could not be honored because its far end was
/// already resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictSuppressed {
    pub from: NodeId,
    pub to: NodeId,
    pub relation: Relation,
    pub via: NodeId,
    pub expected: Outcome,
    pub actual: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseTrace {
    pub trigger: NodeId,
    pub events: Vec<TraceEvent>,
    pub properties: Vec<PropertyEvent>,
    pub conflicts: Vec<ConflictSuppressed>,
}

impl CollapseTrace {
    pub fn outcome_of(&self, object: NodeId) -> Option<Outcome> {
        self.events.iter().find(|e| e.object == object).map(|e| e.outcome)
    }
}

/// Forced starting state for a walk-through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Override {
    pub object: NodeId,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeScene {
    objects: BTreeMap<NodeId, ObjectRuntime>,
    adjacency: BTreeMap<NodeId, Vec<Link>>,
    seed: u64,
    rng: Rng,
    history: Vec<CollapseTrace>,
}

impl RuntimeScene {
    pub(crate) fn new(
        objects: BTreeMap<NodeId, ObjectRuntime>,
        mut adjacency: BTreeMap<NodeId, Vec<Link>>,
        seed: u64,
    ) -> Self {
        for id in objects.keys() {
            adjacency.entry(*id).or_default();
        }
        for links in adjacency.values_mut() {
            links.sort();
        }
        RuntimeScene {
            objects,
            adjacency,
            seed,
            rng: Rng::new(seed),
            history: Vec::new(),
        }
    }

    pub fn objects(&self) -> &BTreeMap<NodeId, ObjectRuntime> {
        &self.objects
    }

    pub fn object(&self, id: NodeId) -> Option<&ObjectRuntime> {
        self.objects.get(&id)
    }

    pub fn status(&self, id: NodeId) -> Option<Status> {
        self.objects.get(&id).map(|o| o.status)
    }

    pub fn adjacency(&self) -> &BTreeMap<NodeId, Vec<Link>> {
        &self.adjacency
    }

    pub fn neighbors(&self, id: NodeId) -> &[Link] {
        self.adjacency.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self) -> &Rng {
        &self.rng
    }

    pub fn history(&self) -> &[CollapseTrace] {
        &self.history
    }

    pub fn interactable(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.objects
            .iter()
            .filter(|(_, o)| o.interactable)
            .map(|(id, _)| *id)
    }

    /// Undirected edges, each reported once with `a <= b`.
    pub fn edges(&self) -> Vec<crate::scene::EntanglementEdge> {
        let mut out = Vec::new();
        for (&a, links) in &self.adjacency {
            for l in links {
                if a <= l.neighbor {
                    out.push(crate::scene::EntanglementEdge {
                        a,
                        b: l.neighbor,
                        relation: l.relation,
                        via: l.via,
                    });
                }
            }
        }
        out
    }

    /// Observes `target` using the scene's own seeded stream.
    pub fn observe(&mut self, target: NodeId) -> Result<CollapseTrace, ObserveError> {
        let mut rng = self.rng.clone();
        let result = self.observe_with(target, &mut rng);
        self.rng = rng;
        result
    }

    /// Observes `target`, taking every random decision from `sampler`.
    pub fn observe_with(
        &mut self,
        target: NodeId,
        sampler: &mut dyn Sampler,
    ) -> Result<CollapseTrace, ObserveError> {
        let obj = self
            .objects
            .get(&target)
            .ok_or(ObserveError::UnknownTarget(target))?;
        if !obj.interactable {
            return Err(ObserveError::NotInteractable(target));
        }
        let trace = match obj.status {
            Status::Classical(outcome) => CollapseTrace {
                trigger: target,
                events: vec![TraceEvent {
                    object: target,
                    outcome,
                    cause: Cause::AlreadyClassical {
                        source: None,
                        relation: None,
                    },
                }],
                properties: Vec::new(),
                conflicts: Vec::new(),
            },
            Status::Superposed => {
                let outcome = sampler.sample(&obj.effective);
                let (events, conflicts) = self.propagate(target, outcome);
                let properties = self.collapse_properties(&events, sampler);
                CollapseTrace {
                    trigger: target,
                    events,
                    properties,
                    conflicts,
                }
            }
        };
        self.history.push(trace.clone());
        Ok(trace)
    }

    /// Sets `start` to `outcome` and resolves its component breadth-first.
    /// Draws nothing.
    pub(crate) fn propagate(&mut self, start: NodeId, outcome: Outcome) -> (Vec<TraceEvent>, Vec<ConflictSuppressed>) {
        let mut events = vec![TraceEvent {
            object: start,
            outcome,
            cause: Cause::Sampled,
        }];
        let mut conflicts = Vec::new();
        let mut conflict_keys = BTreeSet::new();
        self.set_status(start, Status::Classical(outcome));

        let mut visited = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let from_outcome = self.objects[&u].status.outcome().expect("visited nodes are resolved");
            for link in self.adjacency[&u].clone() {
                let v = link.neighbor;
                let expected = link.relation.apply(from_outcome);
                if visited.insert(v) {
                    match self.objects[&v].status {
                        Status::Superposed => {
                            self.set_status(v, Status::Classical(expected));
                            events.push(TraceEvent {
                                object: v,
                                outcome: expected,
                                cause: Cause::Propagated {
                                    source: u,
                                    relation: link.relation,
                                },
                            });
                        }
                        Status::Classical(actual) => {
                            events.push(TraceEvent {
                                object: v,
                                outcome: actual,
                                cause: Cause::AlreadyClassical {
                                    source: Some(u),
                                    relation: Some(link.relation),
                                },
                            });
                            if actual != expected {
                                conflict_keys.insert((u.min(v), u.max(v), link.via));
                                conflicts.push(ConflictSuppressed {
                                    from: u,
                                    to: v,
                                    relation: link.relation,
                                    via: link.via,
                                    expected,
                                    actual,
                                });
                            }
                        }
                    }
                    queue.push_back(v);
                } else {
                    let actual = self.objects[&v].status.outcome().expect("visited nodes are resolved");
                    if actual != expected && conflict_keys.insert((u.min(v), u.max(v), link.via)) {
                        conflicts.push(ConflictSuppressed {
                            from: u,
                            to: v,
                            relation: link.relation,
                            via: link.via,
                            expected,
                            actual,
                        });
                    }
                }
            }
        }
        (events, conflicts)
    }

    fn set_status(&mut self, id: NodeId, status: Status) {
        if let Some(o) = self.objects.get_mut(&id) {
            o.status = status;
        }
    }

    /// One draw per superposed property of every object that just became
    /// classical, in event order then property-id order.
    fn collapse_properties(&mut self, events: &[TraceEvent], sampler: &mut dyn Sampler) -> Vec<PropertyEvent> {
        let mut out = Vec::new();
        for e in events {
            if matches!(e.cause, Cause::AlreadyClassical { .. }) {
                continue;
            }
            out.extend(self.collapse_object_properties(e.object, sampler));
        }
        out
    }

    fn collapse_object_properties(&mut self, object: NodeId, sampler: &mut dyn Sampler) -> Vec<PropertyEvent> {
        let mut out = Vec::new();
        if let Some(obj) = self.objects.get_mut(&object) {
            for p in obj.properties.iter_mut() {
                if p.status == Status::Superposed {
                    let value = sampler.sample(&p.effective);
                    p.status = Status::Classical(value);
                    out.push(PropertyEvent {
                        object,
                        property: p.id,
                        value,
                    });
                }
            }
        }
        out
    }

    /// Returns every object and property to superposition, re-seeds the
    /// stream from the scene seed and clears the history. Overridden objects
    /// then start classical; their properties are collapsed immediately,
    /// drawing from the fresh stream in object-id order.
    pub fn reset(&mut self, overrides: &[Override]) -> Result<(), ResetError> {
        if let Some(bad) = overrides.iter().find(|o| !self.objects.contains_key(&o.object)) {
            return Err(ResetError::UnknownObject(bad.object));
        }
        for obj in self.objects.values_mut() {
            obj.status = Status::Superposed;
            for p in obj.properties.iter_mut() {
                p.status = Status::Superposed;
            }
        }
        self.rng = Rng::new(self.seed);
        self.history.clear();
        let mut forced: BTreeMap<NodeId, Outcome> = BTreeMap::new();
        for o in overrides {
            forced.insert(o.object, o.outcome);
        }
        let mut rng = self.rng.clone();
        for (&id, &outcome) in &forced {
            self.set_status(id, Status::Classical(outcome));
            self.collapse_object_properties(id, &mut rng);
        }
        self.rng = rng;
        Ok(())
    }

    /// Changes the scene seed and resets.
    pub fn reseed(&mut self, seed: u64, overrides: &[Override]) -> Result<(), ResetError> {
        let previous = self.seed;
        self.seed = seed;
        self.reset(overrides).inspect_err(|_| self.seed = previous)
    }

    /// Folds `observe` over `targets`. On error the scene is left unchanged.
    pub fn simulate(&mut self, targets: &[NodeId]) -> Result<Vec<CollapseTrace>, ObserveError> {
        let mut work = self.clone();
        let traces = targets
            .iter()
            .map(|&t| work.observe(t))
            .collect::<Result<Vec<_>, _>>()?;
        *self = work;
        Ok(traces)
    }

    pub fn view(&self) -> RuntimeView {
        RuntimeView {
            seed: self.seed,
            draws: self.rng.draws(),
            observations: self.history.len(),
            objects: self
                .objects
                .iter()
                .map(|(&id, o)| {
                    let (p0, p1) = o.effective.probabilities();
                    ObjectView {
                        id,
                        label: o.label.clone(),
                        interactable: o.interactable,
                        status: o.status,
                        state: o.status.outcome().map(|k| o.state_name(k).to_string()),
                        p0,
                        p1,
                        position: o.current_position(),
                        properties: o
                            .properties
                            .iter()
                            .map(|p| {
                                let (p0, p1) = p.effective.probabilities();
                                PropertyView {
                                    id: p.id,
                                    kind: p.values.kind_name(),
                                    status: p.status,
                                    value: p.status.outcome().map(|k| p.values.describe(k.index())),
                                    p0,
                                    p1,
                                }
                            })
                            .collect(),
                    }
                })
                .collect(),
        }
    }
}

/// Starts from a fresh copy of `scene` seeded with `seed` and observes
/// `targets` in order.
pub fn simulate_sequence(
    scene: &RuntimeScene,
    targets: &[NodeId],
    seed: u64,
) -> Result<(RuntimeScene, Vec<CollapseTrace>), ObserveError> {
    let mut fresh = scene.clone();
    fresh
        .reseed(seed, &[])
        .expect("no overrides to reject");
    let traces = fresh.simulate(targets)?;
    Ok((fresh, traces))
}

/// Serializable snapshot of a runtime scene.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeView {
    pub seed: u64,
    pub draws: u64,
    pub observations: usize,
    pub objects: Vec<ObjectView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectView {
    pub id: NodeId,
    pub label: String,
    pub interactable: bool,
    #[serde(flatten)]
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    pub p0: f64,
    pub p1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 2]>,
    pub properties: Vec<PropertyView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyView {
    pub id: NodeId,
    pub kind: &'static str,
    #[serde(flatten)]
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub p0: f64,
    pub p1: f64,
}

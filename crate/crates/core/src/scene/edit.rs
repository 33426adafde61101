//! Editing surface. Every operation checks its preconditions before touching
//! the graph, so a rejected edit leaves the graph exactly as it was.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    CharacterMode, Node, NodeId, NodeKind, PropertyValues, Relation, SceneGraph, StateDef, Wire,
};
use crate::error::{EditError, QuantumError};
use crate::quantum::{BlochCoordinates, Gate, QubitState};

/// The three ways an author can specify a qubit state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateInput {
    Probability(ProbabilityInput),
    Bloch(BlochInput),
    Amplitudes(AmplitudeInput),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilityInput {
    pub p0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochInput {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeInput {
    pub a0: Complex64,
    pub a1: Complex64,
}

impl StateInput {
    pub fn to_state(&self) -> Result<QubitState, QuantumError> {
        match *self {
            StateInput::Probability(ProbabilityInput { p0 }) => QubitState::from_p0(p0),
            StateInput::Bloch(BlochInput { theta, phi }) => {
                Ok(QubitState::from_bloch(BlochCoordinates::new(theta, phi)?))
            }
            StateInput::Amplitudes(AmplitudeInput { a0, a1 }) => QubitState::new(a0, a1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "field", content = "value", rename_all = "snake_case")]
pub enum FieldUpdate {
    Label(String),
    State0(StateDef),
    State1(StateDef),
    Initial(StateInput),
    Gate(Gate),
    Relation(Relation),
    Members(Vec<NodeId>),
    Interactable(bool),
    Position(Option<[f64; 2]>),
    Values(PropertyValues),
    Target(Option<NodeId>),
    Mode(CharacterMode),
    Spawn([f64; 2]),
}

impl FieldUpdate {
    fn name(&self) -> &'static str {
        match self {
            FieldUpdate::Label(_) => "label",
            FieldUpdate::State0(_) => "state0",
            FieldUpdate::State1(_) => "state1",
            FieldUpdate::Initial(_) => "initial",
            FieldUpdate::Gate(_) => "gate",
            FieldUpdate::Relation(_) => "relation",
            FieldUpdate::Members(_) => "members",
            FieldUpdate::Interactable(_) => "interactable",
            FieldUpdate::Position(_) => "position",
            FieldUpdate::Values(_) => "values",
            FieldUpdate::Target(_) => "target",
            FieldUpdate::Mode(_) => "mode",
            FieldUpdate::Spawn(_) => "spawn",
        }
    }
}

/// A single mutation, as carried by the service's `edit` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Edit {
    AddNode { node: NodeKind },
    RemoveNode { id: NodeId },
    Connect { from: NodeId, to: NodeId },
    Disconnect { from: NodeId, to: NodeId },
    SetField { id: NodeId, update: FieldUpdate },
}

impl SceneGraph {
    fn kind_of(&self, id: NodeId) -> Result<&NodeKind, EditError> {
        self.nodes
            .get(&id)
            .map(|n| &n.kind)
            .ok_or(EditError::UnknownNode(id))
    }

    fn expect_super_object(&self, owner: NodeId, id: NodeId) -> Result<(), EditError> {
        match self.kind_of(id)? {
            NodeKind::SuperObject(_) => Ok(()),
            other => Err(EditError::TypeMismatch {
                from: id,
                from_kind: other.name(),
                to: owner,
                to_kind: "super_object reference",
            }),
        }
    }

    fn property_owner(&self, prop: NodeId) -> Option<NodeId> {
        self.super_objects()
            .find(|(_, o)| o.properties.contains(&prop))
            .map(|(id, _)| id)
    }

    fn check_members(&self, owner: NodeId, members: &[NodeId]) -> Result<(), EditError> {
        let mut seen = BTreeSet::new();
        for &m in members {
            self.expect_super_object(owner, m)?;
            if !seen.insert(m) {
                return Err(EditError::DuplicateMember { owner, member: m });
            }
        }
        Ok(())
    }

    fn check_properties(&self, owner: NodeId, props: &[NodeId]) -> Result<(), EditError> {
        let mut seen = BTreeSet::new();
        for &p in props {
            match self.kind_of(p)? {
                NodeKind::SuperProperty(_) => {}
                other => {
                    return Err(EditError::TypeMismatch {
                        from: p,
                        from_kind: other.name(),
                        to: owner,
                        to_kind: "super_object",
                    })
                }
            }
            if !seen.insert(p) {
                return Err(EditError::DuplicateMember { owner, member: p });
            }
            if let Some(existing) = self.property_owner(p).filter(|&o| o != owner) {
                return Err(EditError::DuplicateMember {
                    owner: existing,
                    member: p,
                });
            }
        }
        Ok(())
    }

    fn check_references(&self, id: NodeId, kind: &NodeKind) -> Result<(), EditError> {
        match kind {
            NodeKind::SuperObject(o) => self.check_properties(id, &o.properties),
            NodeKind::Entangler(e) => self.check_members(id, &e.members),
            NodeKind::Observer(o) => match o.target {
                Some(t) => self.expect_super_object(id, t),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn add_node(&mut self, kind: NodeKind) -> Result<NodeId, EditError> {
        let id = self.next_id();
        self.check_references(id, &kind)?;
        self.nodes.insert(
            id,
            Node {
                id,
                kind,
                extra: Default::default(),
            },
        );
        Ok(id)
    }

    /// Removes a node together with every wire and reference that points at it.
    pub fn remove_node(&mut self, id: NodeId) -> Result<(), EditError> {
        self.kind_of(id)?;
        self.nodes.remove(&id);
        self.wires.retain(|w| w.from != id && w.to != id);
        for node in self.nodes.values_mut() {
            match &mut node.kind {
                NodeKind::SuperObject(o) => o.properties.retain(|&p| p != id),
                NodeKind::Entangler(e) => e.members.retain(|&m| m != id),
                NodeKind::Observer(o) if o.target == Some(id) => o.target = None,
                _ => {}
            }
        }
        Ok(())
    }

    /// True when `target` is reachable walking upstream from `start`.
    fn upstream_reaches(&self, start: NodeId, target: NodeId) -> bool {
        let mut stack = vec![start];
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if n == target {
                return true;
            }
            if seen.insert(n) {
                stack.extend(self.inputs_of(n));
            }
        }
        false
    }

    /// Connects `from` (upstream) to `to`.
    ///
    /// Accepted pairs: qubit/gate into a gate, super object or super
    /// property; super object into an entangler (appends a member); super
    /// property into a super object (attaches it); super object into an
    /// observer (sets the target).
    pub fn connect(&mut self, from: NodeId, to: NodeId) -> Result<(), EditError> {
        let from_kind = self.kind_of(from)?;
        let to_kind = self.kind_of(to)?;
        let mismatch = EditError::TypeMismatch {
            from,
            from_kind: from_kind.name(),
            to,
            to_kind: to_kind.name(),
        };
        match (from_kind, to_kind) {
            (f, t) if f.is_source() && t.takes_input() => {
                if self.input_of(to).is_some() {
                    return Err(EditError::InputOccupied(to));
                }
                if self.upstream_reaches(from, to) {
                    return Err(EditError::WouldCreateCycle { from, to });
                }
                self.wires.insert(Wire { from, to });
            }
            (NodeKind::SuperObject(_), NodeKind::Entangler(e)) => {
                if e.members.contains(&from) {
                    return Err(EditError::DuplicateMember {
                        owner: to,
                        member: from,
                    });
                }
                if let Some(NodeKind::Entangler(e)) = self.nodes.get_mut(&to).map(|n| &mut n.kind) {
                    e.members.push(from);
                }
            }
            (NodeKind::SuperProperty(_), NodeKind::SuperObject(_)) => {
                if let Some(owner) = self.property_owner(from) {
                    return Err(EditError::DuplicateMember {
                        owner,
                        member: from,
                    });
                }
                if let Some(NodeKind::SuperObject(o)) = self.nodes.get_mut(&to).map(|n| &mut n.kind) {
                    o.properties.push(from);
                }
            }
            (NodeKind::SuperObject(_), NodeKind::Observer(o)) => {
                if o.target.is_some() {
                    return Err(EditError::InputOccupied(to));
                }
                if let Some(NodeKind::Observer(o)) = self.nodes.get_mut(&to).map(|n| &mut n.kind) {
                    o.target = Some(from);
                }
            }
            _ => return Err(mismatch),
        }
        Ok(())
    }

    pub fn disconnect(&mut self, from: NodeId, to: NodeId) -> Result<(), EditError> {
        self.kind_of(from)?;
        self.kind_of(to)?;
        if self.wires.remove(&Wire { from, to }) {
            return Ok(());
        }
        let removed = match self.nodes.get_mut(&to).map(|n| &mut n.kind) {
            Some(NodeKind::Entangler(e)) => {
                let before = e.members.len();
                e.members.retain(|&m| m != from);
                e.members.len() != before
            }
            Some(NodeKind::SuperObject(o)) => {
                let before = o.properties.len();
                o.properties.retain(|&p| p != from);
                o.properties.len() != before
            }
            Some(NodeKind::Observer(o)) if o.target == Some(from) => {
                o.target = None;
                true
            }
            _ => false,
        };
        if removed {
            Ok(())
        } else {
            Err(EditError::NotConnected { from, to })
        }
    }

    pub fn set_field(&mut self, id: NodeId, update: FieldUpdate) -> Result<(), EditError> {
        let kind = self.kind_of(id)?;
        let field = update.name();
        let mismatch = EditError::FieldMismatch {
            id,
            field,
            kind: kind.name(),
        };
        match (&update, kind) {
            (FieldUpdate::Members(m), NodeKind::Entangler(_)) => self.check_members(id, m)?,
            (FieldUpdate::Target(Some(t)), NodeKind::Observer(_)) => {
                self.expect_super_object(id, *t)?
            }
            _ => {}
        }
        let initial = match &update {
            FieldUpdate::Initial(input) => Some(input.to_state()?),
            _ => None,
        };
        if let FieldUpdate::Position(Some(p)) | FieldUpdate::Spawn(p) = &update {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(EditError::InvalidValue(format!("non-finite coordinate in {field}")));
            }
        }
        let node = self.nodes.get_mut(&id).expect("checked above");
        match (update, &mut node.kind) {
            (FieldUpdate::Label(v), NodeKind::SuperObject(o)) => o.label = v,
            (FieldUpdate::State0(v), NodeKind::SuperObject(o)) => o.state0 = v,
            (FieldUpdate::State1(v), NodeKind::SuperObject(o)) => o.state1 = v,
            (FieldUpdate::Interactable(v), NodeKind::SuperObject(o)) => o.interactable = v,
            (FieldUpdate::Position(v), NodeKind::SuperObject(o)) => o.position = v,
            (FieldUpdate::Initial(_), NodeKind::Qubit(q)) => {
                q.initial = initial.expect("parsed above")
            }
            (FieldUpdate::Gate(v), NodeKind::Gate(g)) => g.gate = v,
            (FieldUpdate::Relation(v), NodeKind::Entangler(e)) => e.relation = v,
            (FieldUpdate::Members(v), NodeKind::Entangler(e)) => e.members = v,
            (FieldUpdate::Values(v), NodeKind::SuperProperty(p)) => p.values = v,
            (FieldUpdate::Target(v), NodeKind::Observer(o)) => o.target = v,
            (FieldUpdate::Mode(v), NodeKind::Character(c)) => c.mode = v,
            (FieldUpdate::Spawn(v), NodeKind::Character(c)) => c.spawn = v,
            _ => return Err(mismatch),
        }
        Ok(())
    }

    pub fn apply_edit(&mut self, edit: &Edit) -> Result<Option<NodeId>, EditError> {
        match edit {
            Edit::AddNode { node } => self.add_node(node.clone()).map(Some),
            Edit::RemoveNode { id } => self.remove_node(*id).map(|_| None),
            Edit::Connect { from, to } => self.connect(*from, *to).map(|_| None),
            Edit::Disconnect { from, to } => self.disconnect(*from, *to).map(|_| None),
            Edit::SetField { id, update } => self.set_field(*id, update.clone()).map(|_| None),
        }
    }

    /// Applies a batch all-or-nothing. Returns the new graph and the ids of
    /// nodes added by the batch, or the index of the first failing edit.
    pub fn with_edits(&self, edits: &[Edit]) -> Result<(SceneGraph, Vec<NodeId>), (usize, EditError)> {
        let mut next = self.clone();
        let mut added = Vec::new();
        for (i, e) in edits.iter().enumerate() {
            if let Some(id) = next.apply_edit(e).map_err(|err| (i, err))? {
                added.push(id);
            }
        }
        Ok((next, added))
    }
}

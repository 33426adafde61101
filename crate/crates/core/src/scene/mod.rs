//! The authored scene document: typed nodes, qubit/gate wires, the asset
//! catalog and the default seed.
//!
//! Qubit and gate chains are expressed as wires (`from` upstream, `to`
//! downstream). Ownership links that carry no signal, such as entangler
//! membership, the property list of a super object and an observer's
//! target, are plain node fields.

mod compile;
mod document;
mod edit;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::quantum::{Gate, Outcome, QubitState};

pub use compile::compile;
pub use document::{from_value, load, save, to_value, SCENE_VERSION};
pub use edit::{AmplitudeInput, BlochInput, Edit, FieldUpdate, ProbabilityInput, StateInput};
pub use validate::{validate, Issue, IssueCode, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One of the two authored states of a super object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDef {
    pub asset: String,
    pub name: String,
}

impl StateDef {
    pub fn new(asset: impl Into<String>, name: impl Into<String>) -> Self {
        StateDef {
            asset: asset.into(),
            name: name.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetMeta {
    pub display_name: String,
    pub shape: String,
    pub footprint: [f64; 2],
}

impl AssetMeta {
    pub fn new(display_name: impl Into<String>, shape: impl Into<String>, footprint: [f64; 2]) -> Self {
        AssetMeta {
            display_name: display_name.into(),
            shape: shape.into(),
            footprint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Same,
    Opposite,
}

impl Relation {
    /// Outcome forced on a neighbor whose partner resolved to `outcome`.
    pub fn apply(self, outcome: Outcome) -> Outcome {
        match self {
            Relation::Same => outcome,
            Relation::Opposite => outcome.flipped(),
        }
    }

    pub fn is_opposite(self) -> bool {
        self == Relation::Opposite
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Same => "same",
            Relation::Opposite => "opposite",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PropertyValues {
    Location { value0: [f64; 2], value1: [f64; 2] },
    Color { value0: [u8; 3], value1: [u8; 3] },
}

impl PropertyValues {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PropertyValues::Location { .. } => "location",
            PropertyValues::Color { .. } => "color",
        }
    }

    pub fn values_differ(&self) -> bool {
        match self {
            PropertyValues::Location { value0, value1 } => value0 != value1,
            PropertyValues::Color { value0, value1 } => value0 != value1,
        }
    }

    /// Human-readable rendering of the value at `index` (0 or 1).
    pub fn describe(&self, index: usize) -> String {
        match self {
            PropertyValues::Location { value0, value1 } => {
                let v = if index == 0 { value0 } else { value1 };
                format!("({}, {})", v[0], v[1])
            }
            PropertyValues::Color { value0, value1 } => {
                let v = if index == 0 { value0 } else { value1 };
                format!("#{:02x}{:02x}{:02x}", v[0], v[1], v[2])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterMode {
    OnScreen,
    FirstPerson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitNode {
    pub initial: QubitState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateNode {
    pub gate: Gate,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperObjectNode {
    pub label: String,
    pub state0: StateDef,
    pub state1: StateDef,
    #[serde(default)]
    pub properties: Vec<NodeId>,
    #[serde(default = "default_true")]
    pub interactable: bool,
    /// Base placement in scene units; a collapsed location property overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 2]>,
}

impl SuperObjectNode {
    pub fn new(label: impl Into<String>, state0: StateDef, state1: StateDef) -> Self {
        SuperObjectNode {
            label: label.into(),
            state0,
            state1,
            properties: Vec::new(),
            interactable: true,
            position: None,
        }
    }

    pub fn state(&self, outcome: Outcome) -> &StateDef {
        match outcome {
            Outcome::Zero => &self.state0,
            Outcome::One => &self.state1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglerNode {
    pub members: Vec<NodeId>,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperPropertyNode {
    #[serde(flatten)]
    pub values: PropertyValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObserverNode {
    pub target: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterNode {
    pub mode: CharacterMode,
    pub spawn: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NodeKind {
    Qubit(QubitNode),
    Gate(GateNode),
    SuperObject(SuperObjectNode),
    Entangler(EntanglerNode),
    SuperProperty(SuperPropertyNode),
    Observer(ObserverNode),
    Character(CharacterNode),
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Qubit(_) => "qubit",
            NodeKind::Gate(_) => "gate",
            NodeKind::SuperObject(_) => "super_object",
            NodeKind::Entangler(_) => "entangler",
            NodeKind::SuperProperty(_) => "super_property",
            NodeKind::Observer(_) => "observer",
            NodeKind::Character(_) => "character",
        }
    }

    /// Nodes that emit a qubit signal on their output port.
    pub fn is_source(&self) -> bool {
        matches!(self, NodeKind::Qubit(_) | NodeKind::Gate(_))
    }

    /// Nodes with a qubit input port.
    pub fn takes_input(&self) -> bool {
        matches!(
            self,
            NodeKind::Gate(_) | NodeKind::SuperObject(_) | NodeKind::SuperProperty(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Fields written by newer tools, kept verbatim across load/save.
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(NodeId, NodeId)", into = "(NodeId, NodeId)")]
pub struct Wire {
    pub from: NodeId,
    pub to: NodeId,
}

impl From<(NodeId, NodeId)> for Wire {
    fn from((from, to): (NodeId, NodeId)) -> Self {
        Wire { from, to }
    }
}

impl From<Wire> for (NodeId, NodeId) {
    fn from(w: Wire) -> Self {
        (w.from, w.to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    pub(crate) version: String,
    pub(crate) seed: u64,
    pub(crate) assets: BTreeMap<String, AssetMeta>,
    pub(crate) nodes: BTreeMap<NodeId, Node>,
    pub(crate) wires: BTreeSet<Wire>,
    pub(crate) extra: BTreeMap<String, Value>,
}

impl Default for SceneGraph {
    fn default() -> Self {
        SceneGraph::new(0)
    }
}

impl SceneGraph {
    pub fn new(seed: u64) -> Self {
        SceneGraph {
            version: SCENE_VERSION.to_string(),
            seed,
            assets: BTreeMap::new(),
            nodes: BTreeMap::new(),
            wires: BTreeSet::new(),
            extra: BTreeMap::new(),
        }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    pub fn assets(&self) -> &BTreeMap<String, AssetMeta> {
        &self.assets
    }

    pub fn add_asset(&mut self, name: impl Into<String>, meta: AssetMeta) {
        self.assets.insert(name.into(), meta);
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn wires(&self) -> impl Iterator<Item = &Wire> {
        self.wires.iter()
    }

    /// Next identifier handed out by `add_node`.
    pub fn next_id(&self) -> NodeId {
        NodeId(self.nodes.keys().next_back().map_or(1, |id| id.0 + 1))
    }

    pub fn super_object(&self, id: NodeId) -> Option<&SuperObjectNode> {
        match self.nodes.get(&id).map(|n| &n.kind) {
            Some(NodeKind::SuperObject(o)) => Some(o),
            _ => None,
        }
    }

    pub fn super_objects(&self) -> impl Iterator<Item = (NodeId, &SuperObjectNode)> {
        self.nodes.values().filter_map(|n| match &n.kind {
            NodeKind::SuperObject(o) => Some((n.id, o)),
            _ => None,
        })
    }

    pub fn entanglers(&self) -> impl Iterator<Item = (NodeId, &EntanglerNode)> {
        self.nodes.values().filter_map(|n| match &n.kind {
            NodeKind::Entangler(e) => Some((n.id, e)),
            _ => None,
        })
    }

    /// Upstream nodes wired into `id`'s qubit input.
    pub fn inputs_of(&self, id: NodeId) -> Vec<NodeId> {
        self.wires
            .iter()
            .filter(|w| w.to == id)
            .map(|w| w.from)
            .collect()
    }

    pub fn input_of(&self, id: NodeId) -> Option<NodeId> {
        self.wires.iter().find(|w| w.to == id).map(|w| w.from)
    }

    /// Finds a super object by label (case-insensitive) or by numeric id.
    pub fn resolve_object(&self, name: &str) -> Option<NodeId> {
        let trimmed = name.trim();
        let by_label = self
            .super_objects()
            .find(|(_, o)| o.label.eq_ignore_ascii_case(trimmed))
            .map(|(id, _)| id);
        by_label.or_else(|| {
            let raw = trimmed.strip_prefix('#').unwrap_or(trimmed);
            raw.parse::<u64>()
                .ok()
                .map(NodeId)
                .filter(|id| self.super_object(*id).is_some())
        })
    }

    /// Pairwise entanglement edges: every entangler contributes an edge
    /// between each pair of consecutive members.
    pub fn entanglement_edges(&self) -> Vec<EntanglementEdge> {
        let mut edges = Vec::new();
        for (via, ent) in self.entanglers() {
            for pair in ent.members.windows(2) {
                edges.push(EntanglementEdge {
                    a: pair[0],
                    b: pair[1],
                    relation: ent.relation,
                    via,
                });
            }
        }
        edges
    }
}

/// One undirected signed edge produced by expanding an entangler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntanglementEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub relation: Relation,
    pub via: NodeId,
}

#![allow(dead_code)]

use entangle_core::quantum::QubitState;
use entangle_core::scene::{
    EntanglerNode, NodeKind, PropertyValues, QubitNode, Relation, StateDef, SuperObjectNode,
    SuperPropertyNode,
};
use entangle_core::{NodeId, SceneGraph};
use proptest::prelude::*;

/// Compact description of a random scene. Objects get ids in index order.
#[derive(Debug, Clone)]
pub struct SceneSpec {
    pub p0: Vec<f64>,
    pub interactable: Vec<bool>,
    /// Location property driven by a qubit with this p0.
    pub property: Vec<Option<f64>>,
    pub edges: Vec<(usize, usize, Relation)>,
    pub seed: u64,
}

pub struct Built {
    pub graph: SceneGraph,
    pub objects: Vec<NodeId>,
}

pub fn build(spec: &SceneSpec) -> Built {
    let mut g = SceneGraph::new(spec.seed);
    let mut objects = Vec::new();
    for (i, &p0) in spec.p0.iter().enumerate() {
        let q = g
            .add_node(NodeKind::Qubit(QubitNode {
                initial: QubitState::from_p0(p0).unwrap(),
            }))
            .unwrap();
        let mut obj = SuperObjectNode::new(
            format!("O{i}"),
            StateDef::new("a", format!("O{i}:0")),
            StateDef::new("b", format!("O{i}:1")),
        );
        obj.interactable = spec.interactable[i];
        let o = g.add_node(NodeKind::SuperObject(obj)).unwrap();
        g.connect(q, o).unwrap();
        if let Some(pp) = spec.property[i] {
            let pq = g
                .add_node(NodeKind::Qubit(QubitNode {
                    initial: QubitState::from_p0(pp).unwrap(),
                }))
                .unwrap();
            let prop = g
                .add_node(NodeKind::SuperProperty(SuperPropertyNode {
                    values: PropertyValues::Location {
                        value0: [i as f64, 0.0],
                        value1: [i as f64, 1.0],
                    },
                }))
                .unwrap();
            g.connect(pq, prop).unwrap();
            g.connect(prop, o).unwrap();
        }
        objects.push(o);
    }
    for &(a, b, relation) in &spec.edges {
        g.add_node(NodeKind::Entangler(EntanglerNode {
            members: vec![objects[a], objects[b]],
            relation,
        }))
        .unwrap();
    }
    Built { graph: g, objects }
}

pub fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Same), Just(Relation::Opposite)]
}

/// Probabilities with the deterministic ends over-represented.
pub fn probability() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), Just(0.5), 0.0..=1.0f64]
}

fn node_fields(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<bool>, Vec<Option<f64>>, u64)> {
    (
        prop::collection::vec(probability(), n),
        prop::collection::vec(prop::bool::weighted(0.8), n),
        prop::collection::vec(prop::option::weighted(0.3, probability()), n),
        any::<u64>(),
    )
}

/// Random forest: each object after the first attaches to an earlier one
/// or starts a new component.
pub fn balanced_tree(max_objects: usize) -> impl Strategy<Value = SceneSpec> {
    (1..=max_objects).prop_flat_map(|n| {
        let parents = (1..n)
            .map(|i| prop::option::weighted(0.85, (0..i, relation())))
            .collect::<Vec<_>>();
        (node_fields(n), parents).prop_map(move |((p0, interactable, property, seed), parents)| {
            let edges = parents
                .into_iter()
                .enumerate()
                .filter_map(|(i, p)| p.map(|(parent, r)| (parent, i + 1, r)))
                .collect();
            SceneSpec {
                p0,
                interactable,
                property,
                edges,
                seed,
            }
        })
    })
}

/// Arbitrary signed multigraph, frustrated cycles allowed.
pub fn signed_graph(max_objects: usize, max_edges: usize) -> impl Strategy<Value = SceneSpec> {
    (2..=max_objects).prop_flat_map(move |n| {
        let edge = (0..n, 0..n, relation()).prop_filter("no self loops", |(a, b, _)| a != b);
        (node_fields(n), prop::collection::vec(edge, 0..=max_edges)).prop_map(
            |((p0, interactable, property, seed), edges)| SceneSpec {
                p0,
                interactable,
                property,
                edges,
                seed,
            },
        )
    })
}

/// Interaction sequence as indices into the object list; may repeat.
pub fn sequence(len: usize) -> impl Strategy<Value = Vec<prop::sample::Index>> {
    prop::collection::vec(any::<prop::sample::Index>(), 0..=len)
}

use std::collections::BTreeMap;

use super::{validate, NodeId, NodeKind, SceneGraph};
use crate::collapse::{Link, ObjectRuntime, PropertyRuntime, RuntimeScene, Status};
use crate::error::CompileError;
use crate::quantum::QubitState;

/// Compiles a valid scene into its runtime form: effective qubit states for
/// every object and property, plus the symmetric entanglement adjacency.
pub fn compile(graph: &SceneGraph) -> Result<RuntimeScene, CompileError> {
    let report = validate(graph);
    if !report.is_ok() {
        return Err(CompileError::CompileOnInvalidGraph(report));
    }

    let mut objects = BTreeMap::new();
    for (id, obj) in graph.super_objects() {
        let mut prop_ids = obj.properties.clone();
        prop_ids.sort();
        let properties = prop_ids
            .into_iter()
            .map(|pid| {
                let NodeKind::SuperProperty(p) = &graph.nodes[&pid].kind else {
                    unreachable!("validated property reference");
                };
                let effective = if graph.input_of(pid).is_some() {
                    chain_state(graph, pid)
                } else {
                    QubitState::from_p0(0.5).expect("0.5 is a probability")
                };
                PropertyRuntime {
                    id: pid,
                    values: p.values.clone(),
                    effective,
                    status: Status::Superposed,
                }
            })
            .collect();
        objects.insert(
            id,
            ObjectRuntime {
                label: obj.label.clone(),
                states: [obj.state0.clone(), obj.state1.clone()],
                interactable: obj.interactable,
                position: obj.position,
                effective: chain_state(graph, id),
                status: Status::Superposed,
                properties,
            },
        );
    }

    let mut adjacency: BTreeMap<NodeId, Vec<Link>> = BTreeMap::new();
    for e in graph.entanglement_edges() {
        adjacency.entry(e.a).or_default().push(Link {
            neighbor: e.b,
            relation: e.relation,
            via: e.via,
        });
        adjacency.entry(e.b).or_default().push(Link {
            neighbor: e.a,
            relation: e.relation,
            via: e.via,
        });
    }

    Ok(RuntimeScene::new(objects, adjacency, graph.seed))
}

/// Walks upstream to the qubit and applies the gates on the way back down.
fn chain_state(graph: &SceneGraph, consumer: NodeId) -> QubitState {
    let mut gates = Vec::new();
    let mut at = graph.input_of(consumer).expect("validated input");
    loop {
        match &graph.nodes[&at].kind {
            NodeKind::Qubit(q) => {
                let state = gates.iter().rev().fold(q.initial, |s: QubitState, g| s.apply(*g));
                return state.canonical();
            }
            NodeKind::Gate(g) => {
                gates.push(g.gate);
                at = graph.input_of(at).expect("validated gate input");
            }
            _ => unreachable!("validated chain"),
        }
    }
}

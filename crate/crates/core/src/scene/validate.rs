use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{NodeId, NodeKind, SceneGraph};
use crate::signed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IssueCode {
    // errors
    MissingInput,
    MultipleInputs,
    TypeMismatch,
    Cycle,
    UnknownReference,
    TooFewMembers,
    DuplicateMember,
    IdenticalStates,
    IdenticalValues,
    SharedProperty,
    MissingTarget,
    // warnings
    FrustratedCycle,
    UnknownAsset,
    UnattachedProperty,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    pub nodes: Vec<NodeId>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.errors.iter().chain(&self.warnings).any(|i| i.code == code)
    }

    fn error(&mut self, code: IssueCode, nodes: Vec<NodeId>, message: impl Into<String>) {
        self.errors.push(Issue {
            code,
            nodes,
            message: message.into(),
        });
    }

    fn warn(&mut self, code: IssueCode, nodes: Vec<NodeId>, message: impl Into<String>) {
        self.warnings.push(Issue {
            code,
            nodes,
            message: message.into(),
        });
    }
}

/// Checks every structural and semantic rule of a scene. The report is empty
/// of errors exactly when [`super::compile`] succeeds.
pub fn validate(graph: &SceneGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    let kind = |id: NodeId| graph.nodes.get(&id).map(|n| &n.kind);

    for w in &graph.wires {
        match (kind(w.from), kind(w.to)) {
            (Some(f), Some(t)) => {
                if !f.is_source() || !t.takes_input() {
                    report.error(
                        IssueCode::TypeMismatch,
                        vec![w.from, w.to],
                        format!("wire {} -> {} joins {} to {}", w.from, w.to, f.name(), t.name()),
                    );
                }
            }
            _ => report.error(
                IssueCode::UnknownReference,
                vec![w.from, w.to],
                format!("wire {} -> {} references a missing node", w.from, w.to),
            ),
        }
    }

    let mut owners: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for node in graph.nodes.values() {
        let id = node.id;
        let inputs = graph.inputs_of(id);
        if node.kind.takes_input() && inputs.len() > 1 {
            report.error(
                IssueCode::MultipleInputs,
                std::iter::once(id).chain(inputs.iter().copied()).collect(),
                format!("{} has {} inputs", id, inputs.len()),
            );
        }
        match &node.kind {
            NodeKind::Gate(_) if inputs.is_empty() => {
                report.error(IssueCode::MissingInput, vec![id], format!("gate {id} has no input"))
            }
            NodeKind::SuperObject(o) => {
                if inputs.is_empty() {
                    report.error(
                        IssueCode::MissingInput,
                        vec![id],
                        format!("super object {id} ({}) has no input qubit", o.label),
                    );
                }
                if o.state0.name == o.state1.name {
                    report.error(
                        IssueCode::IdenticalStates,
                        vec![id],
                        format!("super object {id} has two states named {:?}", o.state0.name),
                    );
                }
                for p in &o.properties {
                    match kind(*p) {
                        Some(NodeKind::SuperProperty(_)) => owners.entry(*p).or_default().push(id),
                        Some(other) => report.error(
                            IssueCode::TypeMismatch,
                            vec![id, *p],
                            format!("{p} listed as a property of {id} is a {}", other.name()),
                        ),
                        None => report.error(
                            IssueCode::UnknownReference,
                            vec![id, *p],
                            format!("{id} lists missing property {p}"),
                        ),
                    }
                }
                if !graph.assets.is_empty() {
                    for s in [&o.state0, &o.state1] {
                        if !graph.assets.contains_key(&s.asset) {
                            report.warn(
                                IssueCode::UnknownAsset,
                                vec![id],
                                format!("asset {:?} is not in the catalog", s.asset),
                            );
                        }
                    }
                }
            }
            NodeKind::Entangler(e) => {
                if e.members.len() < 2 {
                    report.error(
                        IssueCode::TooFewMembers,
                        vec![id],
                        format!("entangler {id} has {} member(s)", e.members.len()),
                    );
                }
                let mut seen = BTreeSet::new();
                for m in &e.members {
                    if !seen.insert(*m) {
                        report.error(
                            IssueCode::DuplicateMember,
                            vec![id, *m],
                            format!("{m} appears twice in entangler {id}"),
                        );
                    }
                    match kind(*m) {
                        Some(NodeKind::SuperObject(_)) => {}
                        Some(other) => report.error(
                            IssueCode::TypeMismatch,
                            vec![id, *m],
                            format!("entangler member {m} is a {}", other.name()),
                        ),
                        None => report.error(
                            IssueCode::UnknownReference,
                            vec![id, *m],
                            format!("entangler {id} references missing {m}"),
                        ),
                    }
                }
            }
            NodeKind::SuperProperty(p) => {
                if !p.values.values_differ() {
                    report.error(
                        IssueCode::IdenticalValues,
                        vec![id],
                        format!("super property {id} has identical values"),
                    );
                }
            }
            NodeKind::Observer(o) => match o.target.map(|t| (t, kind(t))) {
                Some((_, Some(NodeKind::SuperObject(_)))) => {}
                Some((t, _)) => report.error(
                    IssueCode::MissingTarget,
                    vec![id, t],
                    format!("observer {id} targets {t}, which is not a super object"),
                ),
                None => report.error(
                    IssueCode::MissingTarget,
                    vec![id],
                    format!("observer {id} has no target"),
                ),
            },
            _ => {}
        }
    }

    for node in graph.nodes.values() {
        if let NodeKind::SuperProperty(_) = node.kind {
            match owners.get(&node.id).map(Vec::len).unwrap_or(0) {
                0 => report.warn(
                    IssueCode::UnattachedProperty,
                    vec![node.id],
                    format!("super property {} is not attached to any object", node.id),
                ),
                1 => {}
                _ => {
                    let mut ids = vec![node.id];
                    ids.extend(&owners[&node.id]);
                    report.error(
                        IssueCode::SharedProperty,
                        ids,
                        format!("super property {} has several owners", node.id),
                    );
                }
            }
        }
    }

    check_chains(graph, &mut report);

    if report.errors.iter().all(|i| i.code != IssueCode::TypeMismatch && i.code != IssueCode::UnknownReference) {
        for cycle in signed::frustrated_cycles(&graph.entanglement_edges()) {
            let mut nodes = cycle.nodes.clone();
            nodes.extend(cycle.edges.iter().map(|e| e.via));
            let names: Vec<String> = cycle.nodes.iter().map(|n| n.to_string()).collect();
            report.warn(
                IssueCode::FrustratedCycle,
                nodes,
                format!(
                    "cycle {} has {} opposite relation(s); no assignment satisfies all of them",
                    names.join(" - "),
                    cycle.opposite_count()
                ),
            );
        }
    }

    report.errors.sort();
    report.errors.dedup();
    report.warnings.sort();
    report.warnings.dedup();
    report
}

/// Every consumer's upstream walk must end at a qubit without revisiting a node.
fn check_chains(graph: &SceneGraph, report: &mut ValidationReport) {
    let mut cyclic = BTreeSet::new();
    for node in graph.nodes.values() {
        if !node.kind.takes_input() {
            continue;
        }
        let mut seen = vec![node.id];
        let mut at = node.id;
        while let Some(up) = graph.input_of(at) {
            if seen.contains(&up) {
                let start = seen.iter().position(|&n| n == up).unwrap_or(0);
                let mut members: Vec<NodeId> = seen[start..].to_vec();
                members.sort();
                cyclic.insert(members);
                break;
            }
            seen.push(up);
            at = up;
        }
    }
    for members in cyclic {
        let msg = format!("qubit chain through {} loops back on itself", members[0]);
        report.error(IssueCode::Cycle, members, msg);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::QubitState;
    use crate::scene::{EntanglerNode, QubitNode, Relation, StateDef, SuperObjectNode, Wire};

    fn object(g: &mut SceneGraph, label: &str) -> NodeId {
        g.add_node(NodeKind::SuperObject(SuperObjectNode::new(
            label,
            StateDef::new("a", "zero"),
            StateDef::new("b", "one"),
        )))
        .unwrap()
    }

    fn wired_object(g: &mut SceneGraph, label: &str) -> NodeId {
        let q = g
            .add_node(NodeKind::Qubit(QubitNode {
                initial: QubitState::ZERO,
            }))
            .unwrap();
        let o = object(g, label);
        g.connect(q, o).unwrap();
        o
    }

    #[test]
    fn missing_input() {
        let mut g = SceneGraph::new(0);
        let o = object(&mut g, "lonely");
        let r = validate(&g);
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].code, IssueCode::MissingInput);
        assert_eq!(r.errors[0].nodes, vec![o]);
    }

    #[test]
    fn frustrated_triangle_warns() {
        let mut g = SceneGraph::new(0);
        let x = wired_object(&mut g, "x");
        let y = wired_object(&mut g, "y");
        let z = wired_object(&mut g, "z");
        for (m, r) in [
            (vec![x, y], Relation::Same),
            (vec![y, z], Relation::Same),
            (vec![x, z], Relation::Opposite),
        ] {
            g.add_node(NodeKind::Entangler(EntanglerNode { members: m, relation: r }))
                .unwrap();
        }
        let r = validate(&g);
        assert!(r.is_ok());
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.warnings[0].code, IssueCode::FrustratedCycle);
    }

    #[test]
    fn report_is_stable() {
        let mut g = SceneGraph::new(0);
        object(&mut g, "a");
        object(&mut g, "b");
        g.add_node(NodeKind::Entangler(EntanglerNode {
            members: vec![],
            relation: Relation::Same,
        }))
        .unwrap();
        assert_eq!(validate(&g), validate(&g.clone()));
        assert!(validate(&g).has(IssueCode::TooFewMembers));
    }

    #[test]
    fn cycle_from_loaded_wires() {
        let mut g = SceneGraph::new(0);
        let a = g
            .add_node(NodeKind::Gate(crate::scene::GateNode {
                gate: crate::quantum::Gate::PauliX,
            }))
            .unwrap();
        let b = g
            .add_node(NodeKind::Gate(crate::scene::GateNode {
                gate: crate::quantum::Gate::PauliX,
            }))
            .unwrap();
        g.wires.insert(Wire { from: a, to: b });
        g.wires.insert(Wire { from: b, to: a });
        let r = validate(&g);
        assert!(r.has(IssueCode::Cycle));
    }

    #[test]
    fn identical_state_names() {
        let mut g = SceneGraph::new(0);
        let q = g
            .add_node(NodeKind::Qubit(QubitNode {
                initial: QubitState::ZERO,
            }))
            .unwrap();
        let o = g
            .add_node(NodeKind::SuperObject(SuperObjectNode::new(
                "twin",
                StateDef::new("a", "same"),
                StateDef::new("b", "same"),
            )))
            .unwrap();
        g.connect(q, o).unwrap();
        assert!(validate(&g).has(IssueCode::IdenticalStates));
    }
}

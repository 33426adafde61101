//! Balance checking for the signed entanglement graph.
//!
//! `Same` edges carry parity 0 and `Opposite` edges parity 1. A component is
//! balanced iff it admits a two-coloring where every edge's endpoints differ
//! exactly by the edge parity. BFS assigns colors; a non-tree edge that
//! contradicts them closes an odd cycle with the tree paths to the lowest
//! common ancestor.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::scene::{EntanglementEdge, NodeId};

/// A cycle whose Opposite-edge count is odd.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrustratedCycle {
    /// Vertices in traversal order; the last one links back to the first.
    pub nodes: Vec<NodeId>,
    /// `edges[i]` joins `nodes[i]` and `nodes[(i + 1) % len]`.
    pub edges: Vec<EntanglementEdge>,
}

impl FrustratedCycle {
    pub fn opposite_count(&self) -> usize {
        self.edges.iter().filter(|e| e.relation.is_opposite()).count()
    }
}

/// Returns one fundamental odd cycle per contradicting non-tree edge. Empty
/// iff every component is balanced.
pub fn frustrated_cycles(edges: &[EntanglementEdge]) -> Vec<FrustratedCycle> {
    let mut adj: BTreeMap<NodeId, Vec<(NodeId, usize)>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        adj.entry(e.a).or_default().push((e.b, i));
        adj.entry(e.b).or_default().push((e.a, i));
    }
    for list in adj.values_mut() {
        list.sort();
    }

    let mut color: BTreeMap<NodeId, u8> = BTreeMap::new();
    // node -> (parent, edge index, depth)
    let mut parent: BTreeMap<NodeId, (Option<(NodeId, usize)>, usize)> = BTreeMap::new();
    let mut seen_edges = BTreeSet::new();
    let mut cycles = Vec::new();

    for &root in adj.keys() {
        if color.contains_key(&root) {
            continue;
        }
        color.insert(root, 0);
        parent.insert(root, (None, 0));
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, ei) in &adj[&u] {
                if !seen_edges.insert(ei) {
                    continue;
                }
                let parity = edges[ei].relation.is_opposite() as u8;
                match color.get(&v) {
                    None => {
                        color.insert(v, color[&u] ^ parity);
                        let depth = parent[&u].1 + 1;
                        parent.insert(v, (Some((u, ei)), depth));
                        queue.push_back(v);
                    }
                    Some(&cv) if cv != color[&u] ^ parity => {
                        cycles.push(close_cycle(edges, &parent, u, v, ei));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    cycles
}

fn close_cycle(
    edges: &[EntanglementEdge],
    parent: &BTreeMap<NodeId, (Option<(NodeId, usize)>, usize)>,
    u: NodeId,
    v: NodeId,
    closing: usize,
) -> FrustratedCycle {
    // climb both endpoints to their lowest common ancestor
    let mut left = vec![u];
    let mut left_edges = Vec::new();
    let mut right = vec![v];
    let mut right_edges = Vec::new();
    let (mut a, mut b) = (u, v);
    while a != b {
        let (da, db) = (parent[&a].1, parent[&b].1);
        if da >= db {
            let (p, ei) = parent[&a].0.expect("non-root has a parent");
            left_edges.push(ei);
            a = p;
            left.push(a);
        } else {
            let (p, ei) = parent[&b].0.expect("non-root has a parent");
            right_edges.push(ei);
            b = p;
            right.push(b);
        }
    }
    // left: u .. lca, right: v .. lca
    right.pop();
    let mut nodes = left;
    nodes.extend(right.into_iter().rev());
    let mut edge_ids = left_edges;
    edge_ids.extend(right_edges.into_iter().rev());
    edge_ids.push(closing);
    FrustratedCycle {
        nodes,
        edges: edge_ids.into_iter().map(|i| edges[i]).collect(),
    }
}

pub fn is_balanced(edges: &[EntanglementEdge]) -> bool {
    frustrated_cycles(edges).is_empty()
}

/// Checks that `cycle` is a simple closed walk with consistent edge endpoints.
pub fn is_genuine_cycle(cycle: &FrustratedCycle) -> bool {
    let n = cycle.nodes.len();
    if n < 2 || cycle.edges.len() != n {
        return false;
    }
    let distinct: BTreeSet<_> = cycle.nodes.iter().collect();
    if distinct.len() != n {
        return false;
    }
    cycle.edges.iter().enumerate().all(|(i, e)| {
        let (x, y) = (cycle.nodes[i], cycle.nodes[(i + 1) % n]);
        (e.a == x && e.b == y) || (e.a == y && e.b == x)
    }) && {
        // a 2-cycle needs two distinct parallel edges
        n > 2 || cycle.edges[0] != cycle.edges[1]
    }
}

//! Scene document persistence.
//!
//! UTF-8 JSON, two-space indented, keys in lexicographic order at every
//! level, floats in shortest round-trip form. Nodes are written in id order
//! and wires in `(from, to)` order. Unrecognized keys, at the top level or
//! on a node, are carried through load/save untouched.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{Map, Value};

use super::{AssetMeta, Node, NodeId, NodeKind, SceneGraph, Wire};
use crate::error::DocumentError;

pub const SCENE_VERSION: &str = "entangle/1";

const TOP_LEVEL_KEYS: [&str; 5] = ["assets", "nodes", "seed", "version", "wires"];

/// Serializes `graph` to its canonical document bytes.
pub fn save(graph: &SceneGraph) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(&to_value(graph)).expect("scene values serialize");
    text.push('\n');
    text.into_bytes()
}

pub fn to_value(graph: &SceneGraph) -> Value {
    let mut top: BTreeMap<String, Value> = graph.extra.clone();
    top.insert("version".into(), Value::from(graph.version.clone()));
    top.insert("seed".into(), Value::from(graph.seed));
    top.insert(
        "assets".into(),
        serde_json::to_value(&graph.assets).expect("asset catalog serializes"),
    );
    top.insert(
        "nodes".into(),
        Value::Array(graph.nodes.values().map(node_to_value).collect()),
    );
    top.insert(
        "wires".into(),
        serde_json::to_value(&graph.wires).expect("wires serialize"),
    );
    sorted(Value::Object(top.into_iter().collect()))
}

fn node_to_value(node: &Node) -> Value {
    let mut map: BTreeMap<String, Value> = node.extra.clone();
    if let Value::Object(body) = serde_json::to_value(&node.kind).expect("node kinds serialize") {
        map.extend(body);
    }
    map.insert("id".into(), Value::from(node.id.0));
    Value::Object(map.into_iter().collect())
}

/// Rebuilds every object with keys in lexicographic order, independent of
/// how `serde_json::Map` orders its entries.
fn sorted(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let entries: BTreeMap<String, Value> =
                map.into_iter().map(|(k, v)| (k, sorted(v))).collect();
            Value::Object(entries.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        other => other,
    }
}

fn malformed(msg: impl Into<String>) -> DocumentError {
    DocumentError::MalformedDocument(msg.into())
}

pub fn load(bytes: &[u8]) -> Result<SceneGraph, DocumentError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| malformed(e.to_string()))?;
    from_value(value)
}

pub fn from_value(value: Value) -> Result<SceneGraph, DocumentError> {
    let Value::Object(mut top) = value else {
        return Err(malformed("top level is not an object"));
    };
    let version = match top.remove("version") {
        Some(Value::String(s)) => s,
        Some(other) => return Err(malformed(format!("version must be a string, got {other}"))),
        None => return Err(malformed("missing field `version`")),
    };
    if version != SCENE_VERSION {
        return Err(DocumentError::UnsupportedVersion(version));
    }
    let seed = top
        .remove("seed")
        .ok_or_else(|| malformed("missing field `seed`"))?
        .as_u64()
        .ok_or_else(|| malformed("seed must be an unsigned integer"))?;
    let assets: BTreeMap<String, AssetMeta> = match top.remove("assets") {
        Some(v) => serde_json::from_value(v).map_err(|e| malformed(format!("assets: {e}")))?,
        None => BTreeMap::new(),
    };
    let raw_nodes = match top.remove("nodes") {
        Some(Value::Array(items)) => items,
        Some(_) => return Err(malformed("nodes must be an array")),
        None => Vec::new(),
    };
    let wires: BTreeSet<Wire> = match top.remove("wires") {
        Some(v) => serde_json::from_value(v).map_err(|e| malformed(format!("wires: {e}")))?,
        None => BTreeSet::new(),
    };

    let mut nodes = BTreeMap::new();
    for raw in raw_nodes {
        let node = node_from_value(raw)?;
        if nodes.insert(node.id, node).is_some() {
            return Err(malformed("duplicate node id"));
        }
    }

    debug_assert!(TOP_LEVEL_KEYS.iter().all(|k| !top.contains_key(*k)));
    Ok(SceneGraph {
        version,
        seed,
        assets,
        nodes,
        wires,
        extra: top.into_iter().collect(),
    })
}

fn node_from_value(raw: Value) -> Result<Node, DocumentError> {
    let Value::Object(mut map) = raw else {
        return Err(malformed("node is not an object"));
    };
    let id = map
        .remove("id")
        .and_then(|v| v.as_u64())
        .map(NodeId)
        .ok_or_else(|| malformed("node without an integer `id`"))?;
    let kind: NodeKind = serde_json::from_value(Value::Object(map.clone()))
        .map_err(|e| malformed(format!("node {id}: {e}")))?;
    let known = match serde_json::to_value(&kind).expect("node kinds serialize") {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    let extra = map
        .into_iter()
        .filter(|(k, _)| !known.contains_key(k))
        .collect();
    Ok(Node { id, kind, extra })
}

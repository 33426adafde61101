#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use entangle_core::{fixtures, scene};
use entangle_service::session::Session;
use entangle_service::wire::{CommandEnvelope, EventEnvelope};
use entangle_service::{Hub, ServiceConfig};
use futures::StreamExt;
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::mpsc;

/// Also used by the acceptance crate, hence the detour through `..`.
pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../service/tests/golden")
        .join(name)
}

/// Compares against a checked-in file. `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(name: &str, actual: &str) {
    if let Err(msg) = compare_golden(name, actual) {
        panic!("{msg}");
    }
}

pub fn compare_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != actual {
        let line = expected
            .lines()
            .zip(actual.lines())
            .position(|(a, b)| a != b)
            .unwrap_or(expected.lines().count().min(actual.lines().count()));
        return Err(format!("{name} differs from golden at line {}", line + 1));
    }
    Ok(())
}

/// Task-2 play-through with a few rejected commands mixed in. Object ids
/// come from the fixture: Apple 3, Flower 6, Deer 8, Zombie 9.
pub fn script() -> Vec<Value> {
    let doc = scene::to_value(&fixtures::task2());
    vec![
        json!({"type": "observe", "target": "Apple"}),
        json!({"type": "load_scene", "document": doc}),
        json!({"type": "compile"}),
        json!({"type": "enumerate", "include_prefixes": false}),
        json!({"type": "observer_summary", "target": "flower"}),
        json!({"type": "observe", "target": "Apple", "expect_seq": 99}),
        json!({"type": "observe", "target": "Apple", "expect_seq": 4}),
        json!({"type": "observe", "target": 6}),
        json!({"type": "observe", "target": "Deer"}),
        json!({"type": "reset", "overrides": [{"object": "Flower", "outcome": 1}]}),
        json!({"type": "simulate", "targets": ["Apple", "Flower"], "seed": 5}),
        json!({"type": "set_seed", "seed": 77}),
        json!({"type": "edit", "edits": [
            {"op": "set_field", "id": 3, "update": {"field": "label", "value": "Red apple"}},
            {"op": "connect", "from": 1, "to": 2}
        ]}),
        json!({"type": "edit", "edits": [
            {"op": "add_node", "node": {"type": "qubit", "initial": {"a0": [1.0, 0.0], "a1": [0.0, 0.0]}}},
            {"op": "set_field", "id": 3, "update": {"field": "label", "value": "Red apple"}}
        ]}),
        json!({"type": "observe", "target": "Red apple"}),
        json!({"type": "compile"}),
        json!({"type": "save_scene"}),
        json!({"type": "get_scene"}),
        json!({"type": "teleport"}),
    ]
}

fn line(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).unwrap()
}

/// Runs the script against `session`, returning the transcript and events.
pub fn run_script(session: &mut Session) -> (String, Vec<EventEnvelope>) {
    let mut out = String::new();
    let mut all = Vec::new();
    for cmd in script() {
        out.push_str(&format!(">>> {}\n", line(&cmd)));
        match serde_json::from_value::<CommandEnvelope>(cmd) {
            Err(_) => out.push_str("<<< malformed\n"),
            Ok(env) => {
                let o = session.execute(env);
                out.push_str(&format!("<<< {} {}\n", o.response.status, line(&o.response)));
                for e in &o.events {
                    out.push_str(&format!("--- {}\n", line(e)));
                }
                all.extend(o.events);
            }
        }
    }
    (out, all)
}

pub fn session_transcript() -> String {
    run_script(&mut Session::new(0, &BTreeMap::new())).0
}

pub async fn start(config: ServiceConfig) -> (String, Arc<Hub>) {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let hub = Arc::new(Hub::new(config));
    tokio::spawn(entangle_service::serve(listener, hub.clone()));
    (base, hub)
}

/// Reads `data:` payloads off an SSE response into a channel.
pub fn pump(resp: reqwest::Response) -> mpsc::UnboundedReceiver<Value> {
    let (tx, rx) = mpsc::unbounded_channel();
    tokio::spawn(async move {
        let mut body = resp.bytes_stream();
        let mut buf = String::new();
        while let Some(Ok(chunk)) = body.next().await {
            buf.push_str(&String::from_utf8_lossy(&chunk));
            while let Some(end) = buf.find("\n\n") {
                let block: String = buf.drain(..end + 2).collect();
                for line in block.lines() {
                    if let Some(data) = line.strip_prefix("data: ") {
                        if tx.send(serde_json::from_str(data).unwrap()).is_err() {
                            return;
                        }
                    }
                }
            }
        }
    });
    rx
}

pub async fn collect_until(rx: &mut mpsc::UnboundedReceiver<Value>, seq: u64) -> Vec<Value> {
    let mut out = Vec::new();
    while out.last().map_or(true, |e: &Value| e["seq"].as_u64().unwrap() < seq) {
        let next = tokio::time::timeout(std::time::Duration::from_secs(10), rx.recv())
            .await
            .expect("event within 10 s")
            .expect("stream open");
        out.push(next);
    }
    out
}

/// The script over HTTP on a fresh server, with two SSE subscribers. Both
/// subscribers must see the same events; the transcript holds one copy.
pub async fn http_transcript() -> String {
    let (base, _hub) = start(ServiceConfig::default()).await;
    let client = reqwest::Client::new();
    let mut text = String::new();

    let created = client.post(format!("{base}/session")).send().await.unwrap();
    text.push_str(&format!("POST /session {}\n  {}\n", created.status().as_u16(), created.text().await.unwrap()));

    let mut subs = Vec::new();
    for _ in 0..2 {
        let resp = client.get(format!("{base}/session/1/events")).send().await.unwrap();
        assert_eq!(resp.status(), 200);
        assert_eq!(resp.headers()["content-type"], "text/event-stream");
        let mut rx = pump(resp);
        let snap = collect_until(&mut rx, 0).await;
        assert_eq!(snap[0]["kind"], "snapshot");
        subs.push(rx);
    }

    let mut last_seq = 0;
    for cmd in script() {
        let resp = client
            .post(format!("{base}/session/1/command"))
            .body(serde_json::to_string(&cmd).unwrap())
            .send()
            .await
            .unwrap();
        let status = resp.status().as_u16();
        let body = resp.text().await.unwrap();
        if let Some(seq) = serde_json::from_str::<Value>(&body).unwrap()["seq"].as_u64() {
            last_seq = seq;
        }
        text.push_str(&format!("POST /session/1/command {status}\n  {body}\n"));
    }

    let scene = client.get(format!("{base}/session/1/scene")).send().await.unwrap();
    text.push_str(&format!("GET /session/1/scene {}\n  {}\n", scene.status().as_u16(), scene.text().await.unwrap()));
    for (method, path) in [("GET", "scene"), ("POST", "command"), ("GET", "events")] {
        let url = format!("{base}/session/404/{path}");
        let req = if method == "GET" { client.get(url) } else { client.post(url).body("{\"type\":\"compile\"}") };
        let resp = req.send().await.unwrap();
        text.push_str(&format!("{method} /session/404/{path} {}\n  {}\n", resp.status().as_u16(), resp.text().await.unwrap()));
    }

    let first = collect_until(&mut subs[0], last_seq).await;
    let second = collect_until(&mut subs[1], last_seq).await;
    assert_eq!(first, second);
    for e in &first {
        text.push_str(&format!("event {}\n", serde_json::to_string(e).unwrap()));
    }
    text
}

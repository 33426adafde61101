mod common;

use common::{check_golden, collect_until, http_transcript, pump, start};
use entangle_service::http::event_stream;
use entangle_service::wire::{Command, Event};
use entangle_service::{Hub, ServiceConfig};
use futures::StreamExt;
use serde_json::Value;

#[tokio::test]
async fn scripted_http_session_matches_golden() {
    check_golden("http.transcript", &http_transcript().await);
}

#[tokio::test]
async fn late_subscriber_sees_classical_objects() {
    let (base, _hub) = start(ServiceConfig::default()).await;
    let client = reqwest::Client::new();
    let doc = entangle_core::scene::to_value(&entangle_core::fixtures::task2());
    let created: Value = client
        .post(format!("{base}/session"))
        .json(&serde_json::json!({ "document": doc }))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    let id = created["session"].as_str().unwrap().to_string();
    for cmd in [r#"{"type":"compile"}"#, r#"{"type":"observe","target":"Flower"}"#] {
        client.post(format!("{base}/session/{id}/command")).body(cmd).send().await.unwrap();
    }
    let resp = client.get(format!("{base}/session/{id}/events")).send().await.unwrap();
    let mut rx = pump(resp);
    let snap = collect_until(&mut rx, 0).await.remove(0);
    assert_eq!(snap["kind"], "snapshot");
    assert_eq!(snap["payload"]["last_seq"], 3);
    let objects = snap["payload"]["runtime"]["objects"].as_array().unwrap();
    assert!(objects.iter().all(|o| o["status"] == "classical"));
}

#[tokio::test]
async fn slow_subscriber_gets_gap() {
    let hub = Hub::new(ServiceConfig {
        event_buffer: 2,
        ..ServiceConfig::default()
    });
    let (id, handle) = hub.create(None, Some(entangle_core::fixtures::banana()));
    let mut stream = Box::pin(event_stream(&hub, &id).unwrap());
    handle.execute(Command::Compile.into());
    for seed in 0..3 {
        handle.execute(Command::SetSeed { seed }.into());
    }
    let snap = stream.next().await.unwrap();
    assert!(matches!(snap.event, Event::Snapshot { .. }));
    let gap = stream.next().await.unwrap();
    assert!(matches!(gap.event, Event::Gap { missed: 6 }), "{gap:?}");
    assert_eq!(gap.seq, 6);
    let next = stream.next().await.unwrap();
    assert_eq!(next.seq, 7);
}

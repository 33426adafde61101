mod common;

use std::collections::BTreeMap;

use common::{check_golden, run_script, script};
use entangle_core::{fixtures, scene};
use entangle_service::session::Session;
use entangle_service::wire::{Command, CommandEnvelope, EventEnvelope, ObjectRef};
use serde_json::{json, Value};

fn envelope(v: &Value) -> Option<CommandEnvelope> {
    serde_json::from_value(v.clone()).ok()
}

fn line(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).unwrap()
}

#[test]
fn scripted_session_matches_golden() {
    let mut session = Session::new(0, &BTreeMap::new());
    let (text, events) = run_script(&mut session);
    check_golden("session.transcript", &text);
    let seqs: Vec<u64> = events.iter().map(|e| e.seq).collect();
    assert_eq!(seqs, (1..=events.len() as u64).collect::<Vec<_>>());
}

#[test]
fn replay_reproduces_state_and_events() {
    let mut a = Session::new(0, &BTreeMap::new());
    let mut b = Session::new(0, &BTreeMap::new());
    let (ta, ea) = run_script(&mut a);
    let (tb, eb) = run_script(&mut b);
    assert_eq!(ta, tb);
    assert_eq!(line(&ea), line(&eb));
    assert_eq!(line(&a.state()), line(&b.state()));
}

/// Folds events into the state a client would hold.
fn apply(model: &mut Value, e: &EventEnvelope) {
    let v = serde_json::to_value(e).unwrap();
    let p = &v["payload"];
    match v["kind"].as_str().unwrap() {
        "snapshot" => {
            *model = p.clone();
            model.as_object_mut().unwrap().remove("last_seq");
        }
        "scene_changed" => {
            model["scene"] = p["scene"].clone();
            if p["runtime_invalidated"] == true {
                model["runtime"] = Value::Null;
                model["observers"] = json!([]);
            }
        }
        "validation" => model["validation"] = p["report"].clone(),
        "collapsed" | "reset_done" => {
            model["runtime"] = p["runtime"].clone();
            model["observers"] = p["observers"].clone();
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn snapshot_plus_events_equals_state() {
    let mut session = Session::new(0, &BTreeMap::new());
    let cmds = script();
    // subscribe mid-way: after compile and one observation
    for c in &cmds[..8] {
        if let Some(env) = envelope(c) {
            session.execute(env);
        }
    }
    let snap = session.snapshot();
    let Value::Object(s) = serde_json::to_value(&snap).unwrap()["payload"].clone() else { panic!() };
    assert!(s["runtime"]["objects"].as_array().unwrap().iter().any(|o| o["status"] == "classical"));

    let mut model = Value::Null;
    apply(&mut model, &snap);
    for c in &cmds[8..] {
        if let Some(env) = envelope(c) {
            for e in session.execute(env).events {
                assert!(e.seq > snap.seq);
                apply(&mut model, &e);
            }
        }
    }
    assert_eq!(model, serde_json::to_value(session.state()).unwrap());
}

#[test]
fn observing_apple_propagates_to_everything() {
    let mut session = Session::with_graph(fixtures::task2());
    session.execute(Command::Compile.into());
    let o = session.execute(
        Command::Observe {
            target: ObjectRef::Label("apple".into()),
        }
        .into(),
    );
    assert!(o.response.ok);
    let collapsed = serde_json::to_value(&o.events[0]).unwrap();
    assert_eq!(collapsed["kind"], "collapsed");
    let causes: Vec<&str> = collapsed["payload"]["trace"]["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["cause"].as_str().unwrap())
        .collect();
    assert_eq!(causes, ["sampled", "propagated", "propagated", "propagated"]);
}

#[test]
fn rejected_edit_batch_is_atomic() {
    let mut session = Session::with_graph(fixtures::task2());
    let before = scene::save(session.graph());
    let env: CommandEnvelope = serde_json::from_value(json!({"type": "edit", "edits": [
        {"op": "remove_node", "id": 9},
        {"op": "connect", "from": 3, "to": 6}
    ]}))
    .unwrap();
    let o = session.execute(env);
    assert!(!o.response.ok);
    assert_eq!(o.response.error.as_ref().unwrap().code, "TypeMismatch");
    assert_eq!(scene::save(session.graph()), before);
    let v = serde_json::to_value(&o.events).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["kind"], "validation");
    assert_eq!(v[0]["payload"]["rejected"]["index"], 1);
}

#[test]
fn enumerate_banana() {
    let mut session = Session::with_graph(fixtures::banana());
    session.execute(Command::Compile.into());
    let o = session.execute(
        Command::Enumerate {
            max_objects: None,
            include_prefixes: None,
        }
        .into(),
    );
    let r = o.response.result.unwrap();
    let entries = r["distributions"][0]["entries"].as_array().unwrap();
    let probs: Vec<f64> = entries.iter().map(|e| e["probability"].as_f64().unwrap()).collect();
    assert_eq!(probs.len(), 2);
    assert!((probs[0] - 0.7).abs() < 1e-12 && (probs[1] - 0.3).abs() < 1e-12);
}

#[test]
fn too_many_objects_maps_to_its_code() {
    let mut session = Session::with_graph(fixtures::teaser());
    session.execute(Command::Compile.into());
    let o = session.execute(
        Command::Enumerate {
            max_objects: Some(1),
            include_prefixes: None,
        }
        .into(),
    );
    assert_eq!(o.response.status, 422);
    assert_eq!(o.response.error.unwrap().code, "TooManyObjects");
}

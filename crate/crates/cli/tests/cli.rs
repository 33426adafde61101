use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use entangle_core::scene::{
    save, EntanglerNode, NodeKind, QubitNode, Relation, StateDef, SuperObjectNode,
};
use entangle_core::{fixtures, QubitState, SceneGraph};
use serde_json::Value;

fn entangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, g: &SceneGraph) -> String {
    let p = dir.join(name);
    std::fs::write(&p, save(g)).unwrap();
    p.to_str().unwrap().to_string()
}

fn fixture_dir() -> (tempfile::TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let o = entangle(&["fixtures", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let p = tmp.path().to_path_buf();
    (tmp, p)
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn triangle(opposite_edges: usize) -> SceneGraph {
    let mut g = SceneGraph::new(1);
    let mut ids = Vec::new();
    for label in ["A", "B", "C"] {
        let q = g
            .add_node(NodeKind::Qubit(QubitNode {
                initial: QubitState::from_p0(0.5).unwrap(),
            }))
            .unwrap();
        let o = g
            .add_node(NodeKind::SuperObject(SuperObjectNode::new(
                label,
                StateDef::new("x", "x"),
                StateDef::new("y", "y"),
            )))
            .unwrap();
        g.connect(q, o).unwrap();
        ids.push(o);
    }
    for i in 0..3 {
        let relation = if i < opposite_edges { Relation::Opposite } else { Relation::Same };
        g.add_node(NodeKind::Entangler(EntanglerNode {
            members: vec![ids[i], ids[(i + 1) % 3]],
            relation,
        }))
        .unwrap();
    }
    g
}

#[test]
fn fixtures_are_written_canonically() {
    let (_tmp, dir) = fixture_dir();
    for (name, graph) in fixtures::bundled() {
        assert_eq!(std::fs::read(dir.join(name)).unwrap(), save(&graph), "{name}");
    }
}

#[test]
fn validate_exit_codes() {
    let (_tmp, dir) = fixture_dir();
    assert_eq!(entangle(&["validate", &path(&dir, "task1.scene.json")]).status.code(), Some(0));
    assert_eq!(entangle(&["validate", &path(&dir, "teaser.scene.json")]).status.code(), Some(0));
    assert_eq!(
        entangle(&["validate", "--strict", &path(&dir, "teaser.scene.json")]).status.code(),
        Some(1)
    );

    let mut orphan = SceneGraph::new(0);
    orphan
        .add_node(NodeKind::SuperObject(SuperObjectNode::new(
            "orphan",
            StateDef::new("a", "a"),
            StateDef::new("b", "b"),
        )))
        .unwrap();
    let p = write(&dir, "orphan.scene.json", &orphan);
    let o = entangle(&["validate", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MissingInput"));
    let o = entangle(&["validate", "--json", &p]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["errors"][0]["code"], "MissingInput");

    let frustrated = write(&dir, "frustrated.scene.json", &triangle(1));
    assert_eq!(entangle(&["validate", &frustrated]).status.code(), Some(0));
    assert_eq!(entangle(&["validate", "--strict", &frustrated]).status.code(), Some(1));
    let balanced = write(&dir, "balanced.scene.json", &triangle(2));
    assert_eq!(entangle(&["validate", "--strict", &balanced]).status.code(), Some(0));

    assert_eq!(entangle(&["validate", &path(&dir, "missing.json")]).status.code(), Some(2));
    std::fs::write(dir.join("junk.json"), "{\"version\": 3").unwrap();
    assert_eq!(entangle(&["validate", &path(&dir, "junk.json")]).status.code(), Some(2));
}

#[test]
fn simulate_teaser_paths() {
    let (_tmp, dir) = fixture_dir();
    let teaser = path(&dir, "teaser.scene.json");
    let flower = entangle(&["simulate", &teaser, "--interact", "flower"]);
    assert_eq!(flower.status.code(), Some(0));
    let text = stdout(&flower);
    let fin = &text[text.find("final").unwrap()..];
    assert!(fin.contains("Flower     Virus"), "{text}");
    assert!(fin.contains("Man        Zombie"), "{text}");
    assert!(fin.contains("Zombie wolves"), "{text}");

    let again = entangle(&["simulate", &teaser, "--interact", "flower"]);
    assert_eq!(again.stdout, flower.stdout);

    let saved = stdout(&entangle(&["simulate", &teaser, "--interact", "man,flower"]));
    let fin = &saved[saved.find("final").unwrap()..];
    assert!(fin.contains("Man in black"), "{saved}");
    assert!(fin.contains("Zombie wolves"), "{saved}");

    let forced = stdout(&entangle(&["simulate", &teaser, "--start", "man=0", "--interact", "flower"]));
    assert!(forced[forced.find("final").unwrap()..].contains("Man in black"));
}

#[test]
fn simulate_json_is_deterministic() {
    let (_tmp, dir) = fixture_dir();
    let task1 = path(&dir, "task1.scene.json");
    let args = ["simulate", &task1, "--interact", "visitor,creature", "--seed", "12", "--json"];
    let a = entangle(&args);
    let b = entangle(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 12);
    assert_eq!(v["traces"].as_array().unwrap().len(), 2);
    assert_eq!(v["traces"][0]["events"][0]["cause"], "sampled");
    // visitor has a location property, collapsed with it
    assert_eq!(v["traces"][0]["properties"].as_array().unwrap().len(), 1);
}

#[test]
fn simulate_errors() {
    let (_tmp, dir) = fixture_dir();
    let task2 = path(&dir, "task2.scene.json");
    assert_eq!(entangle(&["simulate", &task2, "--interact", "unicorn"]).status.code(), Some(2));
    assert_eq!(entangle(&["simulate", &task2, "--interact", "deer"]).status.code(), Some(2));
    assert_eq!(entangle(&["simulate", &task2, "--start", "apple=2"]).status.code(), Some(2));
    assert_eq!(entangle(&["simulate", &task2, "--json", "--text"]).status.code(), Some(2));
}

#[test]
fn enumerate_tables_and_json() {
    let (_tmp, dir) = fixture_dir();
    let task2 = path(&dir, "task2.scene.json");
    let o = entangle(&["enumerate", &task2, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let dists = v["distributions"].as_array().unwrap();
    assert_eq!(dists.len(), 4);
    assert!(dists.iter().all(|d| d["entries"].as_array().unwrap().len() == 1));
    assert!(v["frustration"]["cycles"].as_array().unwrap().is_empty());

    let banana = write(&dir, "banana.scene.json", &fixtures::banana());
    let text = stdout(&entangle(&["enumerate", &banana]));
    assert!(text.contains("0.700000     Banana"), "{text}");
    assert!(text.contains("0.300000     Apple"), "{text}");

    let task1 = path(&dir, "task1.scene.json");
    let v: Value = serde_json::from_slice(&entangle(&["enumerate", &task1, "--json"]).stdout).unwrap();
    let visitor_only = v["distributions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|d| d["ordering"] == serde_json::json!([5]))
        .expect("visitor ordering");
    let entries = visitor_only["entries"].as_array().unwrap();
    let p_zombie: f64 = entries
        .iter()
        .filter(|e| e["configuration"]["objects"]["5"] == 0)
        .map(|e| e["probability"].as_f64().unwrap())
        .sum();
    let p_near: f64 = entries
        .iter()
        .filter(|e| e["configuration"]["properties"]["7"] == 0)
        .map(|e| e["probability"].as_f64().unwrap())
        .sum();
    assert!((p_zombie - 0.25).abs() < 1e-12);
    assert!((p_near - 0.86).abs() < 1e-12);

    let teaser = path(&dir, "teaser.scene.json");
    let text = stdout(&entangle(&["enumerate", &teaser, "--no-prefixes"]));
    assert!(text.contains("warning: frustrated cycle"));
    assert_eq!(entangle(&["enumerate", &teaser, "--max-objects", "2"]).status.code(), Some(2));
}

#[test]
fn serve_answers_http() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_entangle"))
        .args(["serve", "--addr", "127.0.0.1:0", "--seed", "9"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().rsplit("http://").next().unwrap().to_string();

    let mut stream = std::net::TcpStream::connect(&addr).unwrap();
    write!(
        stream,
        "POST /session HTTP/1.1\r\nHost: {addr}\r\nContent-Length: 0\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(resp.starts_with("HTTP/1.1 201"), "{resp}");
    assert!(resp.contains("\"session\":\"1\""), "{resp}");
}

//! Plain-text renderings.

use std::fmt::Write as _;

use entangle_core::analyzer::render_distributions;
use entangle_core::collapse::{Cause, CollapseTrace};
use entangle_core::scene::ValidationReport;
use entangle_core::{NodeId, RuntimeScene, Status};
use entangle_service::wire::EnumerateResult;

pub fn report(r: &ValidationReport) -> String {
    let mut out = String::new();
    for (tag, issues) in [("error", &r.errors), ("warning", &r.warnings)] {
        for i in issues {
            let _ = writeln!(out, "{tag}: {:?}: {}", i.code, i.message);
        }
    }
    let _ = writeln!(out, "{} error(s), {} warning(s)", r.errors.len(), r.warnings.len());
    out
}

fn label(scene: &RuntimeScene, id: NodeId) -> &str {
    scene.object(id).map_or("?", |o| o.label.as_str())
}

fn state(scene: &RuntimeScene, id: NodeId, outcome: entangle_core::Outcome) -> &str {
    scene.object(id).map_or("?", |o| o.state_name(outcome))
}

/// Left-aligns the columns of `rows`, two spaces apart, indented by two.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        let _ = writeln!(out, "  {}", cells.join("  ").trim_end());
    }
    out
}

pub fn simulation(scene: &RuntimeScene, seed: u64, traces: &[CollapseTrace]) -> String {
    let mut out = format!("seed {seed}\n");
    for (i, t) in traces.iter().enumerate() {
        let _ = writeln!(out, "step {}: touch {}", i + 1, label(scene, t.trigger));
        let rows: Vec<Vec<String>> = t
            .events
            .iter()
            .map(|e| {
                let why = match e.cause {
                    Cause::Sampled => "sampled".to_string(),
                    Cause::Propagated { source, relation } => {
                        format!("from {} ({})", label(scene, source), relation_name(relation))
                    }
                    Cause::AlreadyClassical { .. } => "already classical".to_string(),
                };
                vec![label(scene, e.object).to_string(), state(scene, e.object, e.outcome).to_string(), why]
            })
            .collect();
        out.push_str(&table(&rows));
        for p in &t.properties {
            let o = scene.object(p.object).expect("traced object");
            let prop = o.properties.iter().find(|q| q.id == p.property).expect("traced property");
            let _ = writeln!(
                out,
                "  {}.{} = {}",
                o.label,
                prop.values.kind_name(),
                prop.values.describe(p.value.index())
            );
        }
        for c in &t.conflicts {
            let _ = writeln!(
                out,
                "  ! {} -> {} ({}) wanted {}, kept {}",
                label(scene, c.from),
                label(scene, c.to),
                relation_name(c.relation),
                state(scene, c.to, c.expected),
                state(scene, c.to, c.actual)
            );
        }
    }
    out.push_str("final\n");
    let rows: Vec<Vec<String>> = scene
        .objects()
        .values()
        .map(|o| {
            let s = match o.status {
                Status::Classical(k) => o.state_name(k).to_string(),
                Status::Superposed => {
                    let (p0, _) = o.effective.probabilities();
                    format!("superposed (p0={p0:.2})")
                }
            };
            let mut row = vec![o.label.clone(), s];
            if let Some([x, y]) = o.current_position() {
                row.push(format!("at ({x}, {y})"));
            }
            row
        })
        .collect();
    out.push_str(&table(&rows));
    out
}

fn relation_name(r: entangle_core::scene::Relation) -> &'static str {
    if r.is_opposite() {
        "opposite"
    } else {
        "same"
    }
}

pub fn enumeration(scene: &RuntimeScene, result: &EnumerateResult) -> String {
    let mut out = render_distributions(scene, &result.distributions);
    if result.distributions.is_empty() {
        out.push_str("no interactable object is still superposed\n");
    }
    for c in &result.frustration.cycles {
        let names: Vec<&str> = c.nodes.iter().map(|&id| label(scene, id)).collect();
        let _ = writeln!(
            out,
            "warning: frustrated cycle {} ({} opposite)",
            names.join(" - "),
            c.opposite_count()
        );
    }
    out
}

//! Exact outcome analysis.
//!
//! Instead of sampling, the enumerator branches on every draw an observation
//! would make (the trigger's qubit and each collapsing property), weighting
//! each branch by its Born probability. Branches are explored depth-first by
//! replaying a prefix of forced choices through the ordinary observation
//! code, so the enumerated and simulated semantics cannot drift apart.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::collapse::RuntimeScene;
use crate::error::{AnalyzeError, ObserveError};
use crate::quantum::{Outcome, QubitState, Rng, Sampler};
use crate::scene::{NodeId, NodeKind, SceneGraph};
use crate::signed::{self, FrustratedCycle};

pub const DEFAULT_MAX_OBJECTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateOptions {
    pub max_objects: usize,
    /// Also analyze every proper prefix of each permutation.
    pub include_prefixes: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            max_objects: DEFAULT_MAX_OBJECTS,
            include_prefixes: true,
        }
    }
}

/// Final classical configuration: `None` marks something still superposed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub objects: BTreeMap<NodeId, Option<Outcome>>,
    pub properties: BTreeMap<NodeId, Option<Outcome>>,
}

impl Configuration {
    pub fn of(scene: &RuntimeScene) -> Configuration {
        let mut objects = BTreeMap::new();
        let mut properties = BTreeMap::new();
        for (&id, o) in scene.objects() {
            objects.insert(id, o.status.outcome());
            for p in &o.properties {
                properties.insert(p.id, p.status.outcome());
            }
        }
        Configuration { objects, properties }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeEntry {
    pub configuration: Configuration,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub ordering: Vec<NodeId>,
    /// Sorted by configuration; zero-probability branches are omitted.
    pub entries: Vec<OutcomeEntry>,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    pub fn probability_of(&self, config: &Configuration) -> f64 {
        self.entries
            .iter()
            .find(|e| &e.configuration == config)
            .map_or(0.0, |e| e.probability)
    }
}

/// Replays forced choices, then defaults to the first possible outcome and
/// remembers where the other one was still open.
struct Replay<'a> {
    script: &'a [Outcome],
    made: Vec<Outcome>,
    weight: f64,
    open: Vec<usize>,
}

impl Sampler for Replay<'_> {
    fn sample(&mut self, state: &QubitState) -> Outcome {
        let (p0, p1) = state.probabilities();
        let pos = self.made.len();
        let choice = match self.script.get(pos) {
            Some(&c) => c,
            None => {
                if p0 > 0.0 && p1 > 0.0 {
                    self.open.push(pos);
                }
                if p0 > 0.0 {
                    Outcome::Zero
                } else {
                    Outcome::One
                }
            }
        };
        self.weight *= if choice == Outcome::Zero { p0 } else { p1 };
        self.made.push(choice);
        choice
    }
}

/// Exact distribution over final configurations for one interaction ordering.
pub fn distribution_for(scene: &RuntimeScene, ordering: &[NodeId]) -> Result<OutcomeDistribution, ObserveError> {
    let mut acc: BTreeMap<Configuration, f64> = BTreeMap::new();
    let mut stack: Vec<Vec<Outcome>> = vec![Vec::new()];
    while let Some(script) = stack.pop() {
        let mut sampler = Replay {
            script: &script,
            made: Vec::new(),
            weight: 1.0,
            open: Vec::new(),
        };
        let mut branch = scene.clone();
        for &target in ordering {
            branch.observe_with(target, &mut sampler)?;
        }
        if sampler.weight > 0.0 {
            *acc.entry(Configuration::of(&branch)).or_insert(0.0) += sampler.weight;
        }
        for &pos in sampler.open.iter().rev() {
            let mut alt = sampler.made[..pos].to_vec();
            alt.push(Outcome::One);
            stack.push(alt);
        }
    }
    Ok(OutcomeDistribution {
        ordering: ordering.to_vec(),
        entries: acc
            .into_iter()
            .map(|(configuration, probability)| OutcomeEntry {
                configuration,
                probability,
            })
            .collect(),
    })
}

/// Interactable objects that are still superposed, in id order.
pub fn candidate_objects(scene: &RuntimeScene) -> Vec<NodeId> {
    scene
        .interactable()
        .filter(|id| !scene.objects()[id].status.is_classical())
        .collect()
}

fn k_permutations(items: &[NodeId], k: usize, prefix: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for &it in items {
        if !prefix.contains(&it) {
            prefix.push(it);
            k_permutations(items, k, prefix, out);
            prefix.pop();
        }
    }
}

/// Orderings analyzed by [`enumerate_outcomes`], sorted lexicographically.
pub fn orderings(candidates: &[NodeId], include_prefixes: bool) -> Vec<Vec<NodeId>> {
    let n = candidates.len();
    let lengths = if include_prefixes { 1..=n } else { n..=n };
    let mut out = Vec::new();
    for k in lengths {
        if k == 0 {
            continue;
        }
        k_permutations(candidates, k, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

pub fn enumerate_outcomes(
    scene: &RuntimeScene,
    options: EnumerateOptions,
) -> Result<Vec<OutcomeDistribution>, AnalyzeError> {
    let candidates = candidate_objects(scene);
    if candidates.len() > options.max_objects {
        return Err(AnalyzeError::TooManyObjects {
            count: candidates.len(),
            max: options.max_objects,
        });
    }
    orderings(&candidates, options.include_prefixes)
        .iter()
        .map(|o| distribution_for(scene, o).map_err(AnalyzeError::from))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrustrationReport {
    pub cycles: Vec<FrustratedCycle>,
}

impl FrustrationReport {
    pub fn is_balanced(&self) -> bool {
        self.cycles.is_empty()
    }
}

pub fn detect_frustration(scene: &RuntimeScene) -> FrustrationReport {
    FrustrationReport {
        cycles: signed::frustrated_cycles(&scene.edges()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloComparison {
    pub ordering: Vec<NodeId>,
    pub trials: u64,
    pub seed: u64,
    /// Support size of the exact distribution.
    pub outcomes: usize,
    pub tv_distance: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Total-variation distance between the exact distribution and the
/// empirical frequencies of `trials` seeded runs of `ordering`.
pub fn verify_against_monte_carlo(
    scene: &RuntimeScene,
    ordering: &[NodeId],
    trials: u64,
    seed: u64,
) -> Result<MonteCarloComparison, ObserveError> {
    let exact = distribution_for(scene, ordering)?;
    let mut rng = Rng::new(seed);
    let mut counts: BTreeMap<Configuration, u64> = BTreeMap::new();
    for _ in 0..trials {
        let mut run = scene.clone();
        for &t in ordering {
            run.observe_with(t, &mut rng)?;
        }
        *counts.entry(Configuration::of(&run)).or_insert(0) += 1;
    }
    let mut tv = 0.0;
    for e in &exact.entries {
        let freq = counts.get(&e.configuration).copied().unwrap_or(0) as f64 / trials as f64;
        tv += (e.probability - freq).abs();
    }
    for (config, &n) in &counts {
        if exact.probability_of(config) == 0.0 {
            tv += n as f64 / trials as f64;
        }
    }
    tv *= 0.5;
    let k = exact.entries.len();
    let bound = 3.0 * (k as f64 / trials as f64).sqrt();
    Ok(MonteCarloComparison {
        ordering: ordering.to_vec(),
        trials,
        seed,
        outcomes: k,
        tv_distance: tv,
        bound,
        passed: tv <= bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consequence {
    pub object: NodeId,
    pub label: String,
    pub outcome: Outcome,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObserverBranch {
    pub outcome: Outcome,
    pub probability: f64,
    pub state: String,
    /// Other objects resolved by the same observation, in propagation order.
    pub consequences: Vec<Consequence>,
    pub conflicts: usize,
}

/// What an observer node displays: the target's odds and, for each outcome,
/// what the rest of its entanglement component would become.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObserverSummary {
    pub observer: Option<NodeId>,
    pub target: NodeId,
    pub label: String,
    pub p0: f64,
    pub p1: f64,
    pub classical: bool,
    pub branches: Vec<ObserverBranch>,
}

pub fn observer_summary(scene: &RuntimeScene, target: NodeId) -> Result<ObserverSummary, ObserveError> {
    let obj = scene.object(target).ok_or(ObserveError::UnknownTarget(target))?;
    let (p0, p1) = obj.effective.probabilities();
    let possible: Vec<(Outcome, f64)> = match obj.status.outcome() {
        Some(k) => vec![(k, 1.0)],
        None => [(Outcome::Zero, p0), (Outcome::One, p1)]
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .collect(),
    };
    let branches = possible
        .into_iter()
        .map(|(outcome, probability)| {
            let mut probe = scene.clone();
            let (events, conflicts) = probe.propagate(target, outcome);
            ObserverBranch {
                outcome,
                probability,
                state: obj.state_name(outcome).to_string(),
                consequences: events
                    .iter()
                    .skip(1)
                    .map(|e| {
                        let o = &scene.objects()[&e.object];
                        Consequence {
                            object: e.object,
                            label: o.label.clone(),
                            outcome: e.outcome,
                            state: o.state_name(e.outcome).to_string(),
                        }
                    })
                    .collect(),
                conflicts: conflicts.len(),
            }
        })
        .collect();
    Ok(ObserverSummary {
        observer: None,
        target,
        label: obj.label.clone(),
        p0,
        p1,
        classical: obj.status.is_classical(),
        branches,
    })
}

/// Summaries for every observer node in `graph` that has a target.
pub fn observer_summaries(graph: &SceneGraph, scene: &RuntimeScene) -> Vec<ObserverSummary> {
    graph
        .nodes()
        .filter_map(|n| match &n.kind {
            NodeKind::Observer(o) => o.target.map(|t| (n.id, t)),
            _ => None,
        })
        .filter_map(|(id, target)| {
            observer_summary(scene, target).ok().map(|mut s| {
                s.observer = Some(id);
                s
            })
        })
        .collect()
}

fn label_of(scene: &RuntimeScene, id: NodeId) -> String {
    scene
        .object(id)
        .map(|o| o.label.clone())
        .unwrap_or_else(|| id.to_string())
}

/// Aligned plain-text tables, one per ordering.
pub fn render_distributions(scene: &RuntimeScene, dists: &[OutcomeDistribution]) -> String {
    let mut out = String::new();
    for (i, d) in dists.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let order: Vec<String> = d.ordering.iter().map(|&id| label_of(scene, id)).collect();
        let _ = writeln!(out, "ordering: {}", order.join(" -> "));

        let mut header = vec!["probability".to_string()];
        let mut columns: Vec<(NodeId, Option<NodeId>)> = Vec::new();
        for (&id, o) in scene.objects() {
            header.push(o.label.clone());
            columns.push((id, None));
            for p in &o.properties {
                header.push(format!("{}.{}", o.label, p.values.kind_name()));
                columns.push((id, Some(p.id)));
            }
        }
        let mut rows = vec![header];
        for e in &d.entries {
            let mut row = vec![format!("{:.6}", e.probability)];
            for &(obj, prop) in &columns {
                let o = &scene.objects()[&obj];
                let cell = match prop {
                    None => e.configuration.objects[&obj]
                        .map(|k| o.state_name(k).to_string())
                        .unwrap_or_else(|| "?".into()),
                    Some(pid) => {
                        let values = &o.properties.iter().find(|p| p.id == pid).expect("column").values;
                        e.configuration.properties[&pid]
                            .map(|k| values.describe(k.index()))
                            .unwrap_or_else(|| "?".into())
                    }
                };
                row.push(cell);
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        for row in rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}", w = *w))
                .collect();
            let _ = writeln!(out, "  {}", line.join("  ").trim_end());
        }
    }
    out
}

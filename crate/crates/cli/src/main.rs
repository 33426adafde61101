//! `entangle`: validate, simulate and enumerate scene documents, write the
//! bundled example scenes, or run the session service.
//!
//! Exit status: 0 success, 1 validation errors, 2 usage, I/O or runtime errors.

mod text;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use entangle_core::analyzer::{detect_frustration, enumerate_outcomes, EnumerateOptions, DEFAULT_MAX_OBJECTS};
use entangle_core::collapse::Override;
use entangle_core::scene::{compile, load, save, validate, ValidationReport};
use entangle_core::{fixtures, NodeId, Outcome, SceneGraph};
use entangle_service::wire::EnumerateResult;
use entangle_service::{load_asset_catalog, Hub, ServiceConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "entangle", version, about = "Entangled super-object scenes from the command line")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a scene document and report errors and warnings.
    Validate {
        scene: PathBuf,
        /// Treat warnings (such as frustrated cycles) as failures.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        json: bool,
    },
    /// Play an interaction sequence and print the collapse traces.
    Simulate {
        scene: PathBuf,
        /// Defaults to the seed stored in the document.
        #[arg(long)]
        seed: Option<u64>,
        /// Objects to touch, by label or id, in order.
        #[arg(long, value_delimiter = ',')]
        interact: Vec<String>,
        /// Forced starting states, e.g. `man=0,flower=1`.
        #[arg(long, value_delimiter = ',')]
        start: Vec<String>,
        #[command(flatten)]
        format: Format,
    },
    /// Exact outcome distributions for every interaction ordering.
    Enumerate {
        scene: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_OBJECTS)]
        max_objects: usize,
        /// Only full orderings, not the prefixes where a player stops early.
        #[arg(long)]
        no_prefixes: bool,
        #[arg(long)]
        json: bool,
    },
    /// Write the bundled example scenes into a directory.
    Fixtures { dir: PathBuf },
    /// Run the session service.
    Serve {
        #[arg(long, env = "ENTANGLE_ADDR", default_value = entangle_service::config::DEFAULT_ADDR)]
        addr: SocketAddr,
        /// Seed for new empty sessions.
        #[arg(long, env = "ENTANGLE_SEED", default_value_t = 0)]
        seed: u64,
        /// JSON asset catalog given to new empty sessions.
        #[arg(long, env = "ENTANGLE_ASSETS")]
        assets: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct Format {
    #[arg(long)]
    json: bool,
    /// Human-readable output (the default).
    #[arg(long)]
    text: bool,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Validate { scene, strict, json } => cmd_validate(&scene, strict, json),
        Cmd::Simulate {
            scene,
            seed,
            interact,
            start,
            format,
        } => cmd_simulate(&scene, seed, &interact, &start, format.json),
        Cmd::Enumerate {
            scene,
            max_objects,
            no_prefixes,
            json,
        } => cmd_enumerate(&scene, max_objects, !no_prefixes, json),
        Cmd::Fixtures { dir } => cmd_fixtures(&dir),
        Cmd::Serve { addr, seed, assets } => cmd_serve(addr, seed, assets.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("entangle: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn read_scene(path: &Path) -> Result<SceneGraph, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    load(&bytes).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("output serializes"));
}

/// Compiles or reports why not (exit 1).
fn compile_or_report(graph: &SceneGraph) -> Result<entangle_core::RuntimeScene, Failure> {
    compile(graph).map_err(|e| {
        let entangle_core::CompileError::CompileOnInvalidGraph(report) = &e;
        eprint!("{}", text::report(report));
        Failure {
            code: 1,
            message: e.to_string(),
        }
    })
}

fn cmd_validate(path: &Path, strict: bool, json: bool) -> CmdResult {
    let graph = read_scene(path)?;
    let report: ValidationReport = validate(&graph);
    if json {
        print_json(&report);
    } else {
        print!("{}", text::report(&report));
    }
    if !report.errors.is_empty() || (strict && !report.warnings.is_empty()) {
        return Err(Failure {
            code: 1,
            message: String::new(),
        });
    }
    Ok(())
}

fn resolve(graph: &SceneGraph, name: &str) -> Result<NodeId, Failure> {
    graph
        .resolve_object(name.trim())
        .ok_or_else(|| Failure::runtime(format!("no super object named {name:?}")))
}

fn parse_override(graph: &SceneGraph, s: &str) -> Result<Override, Failure> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Failure::runtime(format!("start state {s:?} is not of the form object=0|1")))?;
    let outcome = match value.trim() {
        "0" => Outcome::Zero,
        "1" => Outcome::One,
        other => return Err(Failure::runtime(format!("outcome must be 0 or 1, got {other:?}"))),
    };
    Ok(Override {
        object: resolve(graph, name)?,
        outcome,
    })
}

fn cmd_simulate(path: &Path, seed: Option<u64>, interact: &[String], start: &[String], json: bool) -> CmdResult {
    let graph = read_scene(path)?;
    let mut scene = compile_or_report(&graph)?;
    let targets = interact
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| resolve(&graph, s))
        .collect::<Result<Vec<_>, _>>()?;
    let overrides = start
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_override(&graph, s))
        .collect::<Result<Vec<_>, _>>()?;
    let seed = seed.unwrap_or(graph.seed());
    scene
        .reseed(seed, &overrides)
        .map_err(|e| Failure::runtime(e.to_string()))?;
    let traces = scene
        .simulate(&targets)
        .map_err(|e| Failure::runtime(e.to_string()))?;
    if json {
        print_json(&json!({ "seed": seed, "traces": traces }));
    } else {
        print!("{}", text::simulation(&scene, seed, &traces));
    }
    Ok(())
}

fn cmd_enumerate(path: &Path, max_objects: usize, include_prefixes: bool, json: bool) -> CmdResult {
    let graph = read_scene(path)?;
    let scene = compile_or_report(&graph)?;
    let options = EnumerateOptions {
        max_objects,
        include_prefixes,
    };
    let result = EnumerateResult {
        distributions: enumerate_outcomes(&scene, options).map_err(|e| Failure::runtime(e.to_string()))?,
        frustration: detect_frustration(&scene),
    };
    if json {
        print_json(&result);
    } else {
        print!("{}", text::enumeration(&scene, &result));
    }
    Ok(())
}

fn cmd_fixtures(dir: &Path) -> CmdResult {
    std::fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))?;
    for (name, graph) in fixtures::bundled() {
        let path = dir.join(name);
        std::fs::write(&path, save(&graph)).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_serve(addr: SocketAddr, seed: u64, assets: Option<&Path>) -> CmdResult {
    let assets = match assets {
        Some(p) => load_asset_catalog(p).map_err(|e| Failure::runtime(e.to_string()))?,
        None => Default::default(),
    };
    let config = ServiceConfig {
        addr,
        seed,
        assets,
        ..ServiceConfig::default()
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::runtime(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(config.addr)
            .await
            .map_err(|e| Failure::runtime(format!("bind {}: {e}", config.addr)))?;
        eprintln!("entangle: listening on http://{}", listener.local_addr().map_err(|e| Failure::runtime(e.to_string()))?);
        entangle_service::serve(listener, Arc::new(Hub::new(config)))
            .await
            .map_err(|e| Failure::runtime(e.to_string()))
    })
}

//! The `gretract` command line: reads a JSON input, runs one operation and
//! renders the result as text or JSON (keys sorted, ids in canonical order).
//!
//! Exit status: 0 on success, 1 on IO, parse or usage errors, 2 on domain
//! errors (the error code goes to stderr).

use std::collections::BTreeSet;
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dot;
use crate::free_groupoid::{loop_coordinates, WordError};
use crate::graph::{
    components, euler_ranks, spanning_forest, DirectedGraph, GraphError, GraphSpec, TieBreak, VertexId,
};
use crate::pushout::{GWordSpec, InstanceSpec, PushoutInstance, RetractError};
use crate::van_kampen::{
    certify_points, decomposition_to_instance, detect_z_retract, pbp_check, Decomposition, DecompositionSpec,
    PbpScenario, ScenarioSpec, SpaceError, ZRetractCertificate,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Weak components of a graph.
    Components,
    /// Spanning forest and cycle ranks of a graph.
    Forest,
    /// Component counts and rank of a pushout instance.
    PushoutRank,
    /// Forests X, Y and the retract graph W of a pushout instance.
    Retract,
    /// Image of a pushout word (`--word`) under the retraction.
    Rho,
    /// Witness loop between objects `--a` and `--b`.
    Witness,
    /// Pushout instance of a two-piece decomposition of a space.
    VkInstance,
    /// Infinite cyclic retract certificate for a decomposition.
    Certify,
    /// Separation check and certificate for a D/E/a/b scenario.
    PbpCheck,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Parser, Debug, Clone)]
#[command(name = "gretract", version, about = "Free-groupoid retracts of groupoid pushouts")]
pub struct CommandConfig {
    #[arg(value_enum)]
    pub command: Command,
    pub input_path: PathBuf,
    /// `lex`, or a comma-separated edge-id list tried first
    #[arg(long, default_value = "lex")]
    pub tie_break: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    #[arg(long)]
    pub emit_dot: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// GWord JSON file for `rho`
    #[arg(long)]
    pub word: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse `{path}`: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            _ => 1,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "Io",
            CliError::Parse { .. } => "Parse",
            CliError::Usage(_) => "Usage",
            CliError::Domain(e) => e.code(),
        }
    }
}

#[derive(Debug, Error)]
pub enum DomainError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Retract(#[from] RetractError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

impl DomainError {
    pub fn code(&self) -> &'static str {
        match self {
            DomainError::Graph(e) => e.code(),
            DomainError::Word(e) => e.code(),
            DomainError::Retract(e) => e.code(),
            DomainError::Space(e) => e.code(),
        }
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.into())
            }
        }
    )*};
}
domain_from!(GraphError, WordError, RetractError, SpaceError);

/// Result of one invocation in both renderings.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub text: String,
    pub dot: Option<String>,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.text.clone(),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let raw = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&raw).map_err(|source| CliError::Parse { path: path.to_owned(), source })
}

fn parse_tie_break(s: &str) -> TieBreak {
    if s == "lex" {
        TieBreak::Lexicographic
    } else {
        TieBreak::Explicit(s.split(',').map(str::trim).filter(|e| !e.is_empty()).map(Into::into).collect())
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("wire types serialize")
}

fn required_flag(v: &Option<String>, flag: &str) -> Result<VertexId, CliError> {
    v.as_deref().map(VertexId::from).ok_or_else(|| CliError::Usage(format!("`--{flag}` is required")))
}

fn load_instance(path: &Path) -> Result<Arc<PushoutInstance>, CliError> {
    let spec: InstanceSpec = read_json(path)?;
    Ok(Arc::new(PushoutInstance::from_spec(spec)?))
}

fn load_graph(path: &Path) -> Result<Arc<DirectedGraph>, CliError> {
    let spec: GraphSpec = read_json(path)?;
    Ok(Arc::new(DirectedGraph::try_from(spec)?))
}

fn certificate_json(cert: &ZRetractCertificate) -> Result<Value, CliError> {
    let space_forest = spanning_forest(cert.loop_in_space.host(), &TieBreak::Lexicographic);
    let space_coords = loop_coordinates(&space_forest, cert.loop_in_space.source(), &cert.loop_in_space)?;
    let retract_coords = loop_coordinates(cert.report.forest_w(), &cert.pair.0, &cert.retract_image)?;
    let mut v = to_value(&cert.to_spec());
    v["space_coordinates"] = to_value(&space_coords);
    v["retract_coordinates"] = to_value(&retract_coords);
    Ok(v)
}

fn certificate_text(cert: &ZRetractCertificate) -> String {
    format!(
        "basepoints {} -> {}\nloop in space (length {}): {}\nretract image (length {}): {}\n",
        cert.pair.0,
        cert.pair.1,
        cert.loop_in_space.len(),
        cert.loop_in_space,
        cert.retract_image.len(),
        cert.retract_image,
    )
}

/// Runs one command. Writing the DOT file is left to the caller.
pub fn run(config: &CommandConfig) -> Result<Report, CliError> {
    let tie = parse_tie_break(&config.tie_break);
    let input = config.input_path.as_path();
    match config.command {
        Command::Components => {
            let g = load_graph(input)?;
            let parts = components(&g);
            let mut text = format!("{} components\n", parts.block_count());
            for (i, b) in parts.blocks().iter().enumerate() {
                let names: Vec<&str> = b.iter().map(VertexId::as_str).collect();
                let _ = writeln!(text, "  {i}: {}", names.join(" "));
            }
            Ok(Report {
                json: json!({ "count": parts.block_count(), "blocks": to_value(&parts.blocks()) }),
                text,
                dot: Some(dot::graph_dot("components", &g, None, None)),
            })
        }
        Command::Forest => {
            let g = load_graph(input)?;
            let f = spanning_forest(&g, &tie);
            let ranks = euler_ranks(&g);
            let non_tree: Vec<_> = f.non_tree_edges().collect();
            let mut text = format!("tree edges: {}\n", join(f.tree_edges().iter()));
            let _ = writeln!(text, "non-tree edges: {}", join(non_tree.iter()));
            for (b, r) in &ranks {
                let _ = writeln!(text, "component {b}: rank {r}");
            }
            Ok(Report {
                json: json!({
                    "tree_edges": to_value(f.tree_edges()),
                    "non_tree_edges": to_value(&non_tree),
                    "euler_ranks": ranks_json(&ranks),
                }),
                text,
                dot: Some(dot::graph_dot("forest", &g, Some(&f), None)),
            })
        }
        Command::PushoutRank => {
            let inst = load_instance(input)?;
            let k = inst.theorem_rank()?;
            let c = inst.component_counts();
            Ok(Report {
                json: json!({ "k": k, "n_a": c.n_a, "n_b": c.n_b, "n_c": c.n_c }),
                text: format!("k = {k}\n"),
                dot: Some(dot::graph_dot("instance", &inst.union_graph().graph, None, None)),
            })
        }
        Command::Retract => {
            let inst = load_instance(input)?;
            let r = inst.build_retract(&tie, &BTreeSet::new(), &BTreeSet::new())?;
            let c = r.counts();
            let mut text = format!("n_a = {}, n_b = {}, n_c = {}\n", c.n_a, c.n_b, c.n_c);
            match r.k() {
                Some(k) => {
                    let _ = writeln!(text, "k = {k}");
                }
                None => text.push_str("k not applicable (pushout disconnected)\n"),
            }
            let _ = writeln!(text, "X = {{{}}}", join(r.forest_x().tree_edges().iter()));
            let _ = writeln!(text, "Y = {{{}}}", join(r.forest_y().tree_edges().iter()));
            let _ = writeln!(text, "W: {} vertices, {} edges", r.w().vertex_count(), r.w().edge_count());
            Ok(Report {
                json: json!({
                    "n_a": c.n_a, "n_b": c.n_b, "n_c": c.n_c,
                    "k": r.k(),
                    "forest_x": to_value(r.forest_x().tree_edges()),
                    "forest_y": to_value(r.forest_y().tree_edges()),
                    "w": to_value(&**r.w()),
                    "per_component_ranks": ranks_json(r.per_component_ranks()),
                }),
                text,
                dot: Some(dot::retract_dot(&r, None)),
            })
        }
        Command::Rho => {
            let inst = load_instance(input)?;
            let path = config.word.as_deref().ok_or_else(|| CliError::Usage("`--word` is required".into()))?;
            let spec: GWordSpec = read_json(path)?;
            let g = inst.gword_from_spec(&spec)?;
            let r = inst.build_retract(&tie, &BTreeSet::new(), &BTreeSet::new())?;
            let image = r.rho(&g)?;
            Ok(Report {
                json: json!({ "image": to_value(&image.to_spec()), "length": image.len() }),
                text: format!("rho = {image}\n"),
                dot: Some(dot::retract_dot(&r, Some(&image))),
            })
        }
        Command::Witness => {
            let a = required_flag(&config.a, "a")?;
            let b = required_flag(&config.b, "b")?;
            let inst = load_instance(input)?;
            let r = inst.build_retract(&tie, &BTreeSet::new(), &BTreeSet::new())?;
            let w = r.witness(&a, &b)?;
            let coords = r.certify_rank_at_least_one(&a, &b)?;
            Ok(Report {
                json: json!({
                    "loop": to_value(&w.to_spec()),
                    "length": w.len(),
                    "coordinates": to_value(&coords),
                }),
                text: format!("witness loop of length {}: {w}\ncoordinates: {coords}\n", w.len()),
                dot: Some(dot::retract_dot(&r, Some(&w))),
            })
        }
        Command::VkInstance => {
            let dec = Decomposition::from_spec(read_json::<DecompositionSpec>(input)?)?;
            let vk = decomposition_to_instance(&dec, &tie)?;
            let k = vk.instance.theorem_rank().ok();
            let mut text = format!("basepoints: {}\n", join(vk.basepoints.iter()));
            let c = vk.instance.component_counts();
            let _ = writeln!(text, "n_a = {}, n_b = {}, n_c = {}", c.n_a, c.n_b, c.n_c);
            match k {
                Some(k) => {
                    let _ = writeln!(text, "k = {k}");
                }
                None => text.push_str("k not applicable (pushout disconnected)\n"),
            }
            Ok(Report {
                json: json!({
                    "instance": to_value(&vk.instance.to_spec()),
                    "basepoints": to_value(&vk.basepoints),
                    "k": k,
                }),
                text,
                dot: Some(dot::graph_dot("instance", &vk.instance.union_graph().graph, None, None)),
            })
        }
        Command::Certify => {
            let dec = Decomposition::from_spec(read_json::<DecompositionSpec>(input)?)?;
            // --a/--b name two points of the intersection; otherwise search for a pair
            let cert = match (&config.a, &config.b) {
                (None, None) => detect_z_retract(&dec)?,
                _ => {
                    let (a, b) = (required_flag(&config.a, "a")?, required_flag(&config.b, "b")?);
                    Some(certify_points(&dec, &a, &b)?)
                }
            };
            match cert {
                Some(cert) => Ok(Report {
                    json: json!({ "certificate": certificate_json(&cert)? }),
                    text: format!("Z-retract certificate emitted\n{}", certificate_text(&cert)),
                    dot: Some(dot::graph_dot("certificate", dec.space(), None, Some(&cert.loop_in_space))),
                }),
                None => Ok(Report {
                    json: json!({ "certificate": null }),
                    text: "no witness pair; no certificate\n".into(),
                    dot: Some(dot::graph_dot("certificate", dec.space(), None, None)),
                }),
            }
        }
        Command::PbpCheck => {
            let sc = PbpScenario::from_spec(read_json::<ScenarioSpec>(input)?)?;
            let out = pbp_check(&sc)?;
            let (text, cert, dot) = match &out.certificate {
                Some(cert) => (
                    format!("PBI fails; Z-retract certificate emitted\n{}", certificate_text(cert)),
                    certificate_json(cert)?,
                    dot::graph_dot("pbp", sc.space(), None, Some(&cert.loop_in_space)),
                ),
                None => (
                    "PBI holds for this scenario; no certificate\n".to_owned(),
                    Value::Null,
                    dot::graph_dot("pbp", sc.space(), None, None),
                ),
            };
            Ok(Report { json: json!({ "pbi_fails": out.pbi_fails, "certificate": cert }), text, dot: Some(dot) })
        }
    }
}

fn join<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn ranks_json(ranks: &[(usize, usize)]) -> Value {
    Value::Array(ranks.iter().map(|(b, r)| json!({ "block": b, "rank": r })).collect())
}

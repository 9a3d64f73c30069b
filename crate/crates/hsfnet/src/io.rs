//! Edge-list, DOT and JSON instance files.

use std::io::{BufRead, Write};

use hsfnet_core::graph::Graph;
use hsfnet_core::model::Variant;
use hsfnet_core::{GraphInstance, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// `u v` per line, `u < v`, ascending.
    #[value(name = "edgelist")]
    EdgeList,
    Dot,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::EdgeList => "txt",
            Format::Dot => "dot",
            Format::Json => "json",
        }
    }

    /// Guesses from a file extension; anything unknown is an edge list.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("dot" | "gv") => Format::Dot,
            Some("json") => Format::Json,
            _ => Format::EdgeList,
        }
    }
}

/// On-disk JSON layout of an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub variant: String,
    pub m: u32,
    pub t: u32,
    pub p: Option<f64>,
    pub seed: Option<u64>,
    pub n: usize,
    pub levels: Vec<u32>,
    pub edges: Vec<[u32; 2]>,
    /// Set when the two-vertex rim of `m = 2` is a single edge.
    #[serde(default)]
    pub degenerate_rim: bool,
}

impl InstanceFile {
    pub fn from_instance(g: &GraphInstance) -> Self {
        let p = g.params();
        InstanceFile {
            variant: p.variant.name().to_string(),
            m: p.m,
            t: p.t,
            p: p.variant.deletion_probability(),
            seed: p.variant.seed(),
            n: g.vertex_count(),
            levels: g.levels().to_vec(),
            edges: g.graph().edges().map(|(u, v)| [u, v]).collect(),
            degenerate_rim: p.rim_is_single_edge(),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        params_from_parts(&self.variant, self.m, self.t, self.p, self.seed)
    }

    pub fn into_instance(self) -> Result<GraphInstance> {
        let params = self.params()?;
        let edges: Vec<(u32, u32)> = self.edges.iter().map(|&[u, v]| (u, v)).collect();
        let graph = Graph::from_edges(self.n, &edges)?;
        Ok(GraphInstance::from_parts(graph, self.levels, params)?)
    }
}

pub fn params_from_parts(variant: &str, m: u32, t: u32, p: Option<f64>, seed: Option<u64>) -> Result<ModelParams> {
    let params = match (variant, p, seed) {
        ("base", None, None) => ModelParams::base(m, t),
        ("wheel", None, None) => ModelParams::wheel(m, t),
        ("deleted", Some(p), Some(seed)) => ModelParams::deleted(m, t, p, seed),
        ("base" | "wheel", _, _) => return Err(Error::Usage(format!("{variant} takes no p or seed"))),
        ("deleted", _, _) => return Err(Error::Usage("deleted needs both p and seed".into())),
        _ => return Err(Error::Usage(format!("unknown variant {variant:?}"))),
    };
    params.validate()?;
    Ok(params)
}

pub fn export(g: &GraphInstance, format: Format, out: &mut impl Write) -> Result<()> {
    match format {
        Format::EdgeList => {
            for (u, v) in g.graph().edges() {
                writeln!(out, "{u} {v}")?;
            }
        }
        Format::Dot => write_dot(g, out)?,
        Format::Json => {
            serde_json::to_writer(&mut *out, &InstanceFile::from_instance(g))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn export_to_string(g: &GraphInstance, format: Format) -> String {
    let mut buf = Vec::new();
    export(g, format, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn write_dot(g: &GraphInstance, out: &mut impl Write) -> std::io::Result<()> {
    let p = g.params();
    writeln!(out, "graph hsfnet {{")?;
    write!(out, "  graph [variant=\"{}\", m={}, t={}", p.variant.name(), p.m, p.t)?;
    if let Variant::WheelDeleted { p, seed } = p.variant {
        write!(out, ", p={p}, seed={seed}")?;
    }
    writeln!(out, "];")?;
    for (v, l) in g.levels().iter().enumerate() {
        writeln!(out, "  {v} [level={l}];")?;
    }
    for (u, v) in g.graph().edges() {
        writeln!(out, "  {u} -- {v};")?;
    }
    writeln!(out, "}}")
}

/// An imported instance plus any non-fatal findings.
#[derive(Debug)]
pub struct Imported {
    pub instance: GraphInstance,
    pub warnings: Vec<String>,
}

/// Reads an instance. Levels come from the file when it carries them
/// (JSON, DOT) and are otherwise inferred from the degree structure;
/// `params` overrides whatever the file says.
pub fn import(input: impl BufRead, format: Format, params: Option<ModelParams>) -> Result<Imported> {
    let (graph, levels, file_params) = match format {
        Format::EdgeList => {
            let (n, edges) = read_edge_list(input)?;
            (Graph::from_edges(n, &edges)?, None, None)
        }
        Format::Dot => read_dot(input)?,
        Format::Json => {
            let file: InstanceFile = serde_json::from_reader(input)?;
            if file.edges.is_empty() {
                return Err(Error::Empty);
            }
            let params = file.params()?;
            let edges: Vec<(u32, u32)> = file.edges.iter().map(|&[u, v]| (u, v)).collect();
            (Graph::from_edges(file.n, &edges)?, Some(file.levels), Some(params))
        }
    };
    let mut warnings = Vec::new();
    if !graph.is_connected() {
        warnings.push("graph is disconnected".to_string());
    }
    let params = params.or(file_params);
    let instance = match (levels, params) {
        (Some(levels), Some(params)) => GraphInstance::from_parts(graph, levels, params)?,
        (_, params) => {
            let (levels, inferred) = infer_levels(&graph, params.as_ref(), &mut warnings)?;
            GraphInstance::from_parts(graph, levels, params.unwrap_or(inferred))?
        }
    };
    Ok(Imported { instance, warnings })
}

fn read_edge_list(input: impl BufRead) -> Result<(usize, Vec<(u32, u32)>)> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(i + 1, "expected two vertex ids"));
        };
        let u: u32 = a.parse().map_err(|_| Error::parse(i + 1, format!("bad vertex id {a:?}")))?;
        let v: u32 = b.parse().map_err(|_| Error::parse(i + 1, format!("bad vertex id {b:?}")))?;
        n = n.max(u.max(v) as usize + 1);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::Empty);
    }
    Ok((n, edges))
}

type DotParts = (Graph, Option<Vec<u32>>, Option<ModelParams>);

fn read_dot(input: impl BufRead) -> Result<DotParts> {
    let mut edges = Vec::new();
    let mut levels: Vec<Option<u32>> = Vec::new();
    let mut attrs: Vec<(String, String)> = Vec::new();
    let mut n = 0usize;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim().trim_end_matches(';').trim();
        let lineno = i + 1;
        if line.is_empty() || line == "}" || line.starts_with("//") || line.ends_with('{') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("graph [") {
            attrs = parse_attrs(rest.trim_end_matches(']'));
        } else if let Some((a, b)) = line.split_once("--") {
            let u = parse_id(a, lineno)?;
            let v = parse_id(b, lineno)?;
            n = n.max(u.max(v) as usize + 1);
            edges.push((u, v));
        } else if let Some((id, rest)) = line.split_once('[') {
            let v = parse_id(id, lineno)? as usize;
            n = n.max(v + 1);
            let level = parse_attrs(rest.trim_end_matches(']'))
                .into_iter()
                .find(|(k, _)| k == "level")
                .map(|(_, l)| l.parse::<u32>().map_err(|_| Error::parse(lineno, "bad level")))
                .transpose()?;
            if levels.len() <= v {
                levels.resize(v + 1, None);
            }
            levels[v] = level;
        } else {
            return Err(Error::parse(lineno, format!("unrecognized DOT statement {line:?}")));
        }
    }
    if edges.is_empty() {
        return Err(Error::Empty);
    }
    let graph = Graph::from_edges(n, &edges)?;
    levels.resize(n, None);
    let levels: Option<Vec<u32>> = levels.into_iter().collect();
    let params = if attrs.is_empty() { None } else { Some(params_from_attrs(&attrs)?) };
    Ok((graph, levels, params))
}

fn parse_id(s: &str, line: usize) -> Result<u32> {
    let s = s.trim().trim_matches('"');
    s.parse().map_err(|_| Error::parse(line, format!("bad vertex id {s:?}")))
}

fn parse_attrs(s: &str) -> Vec<(String, String)> {
    s.split(',')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().trim_matches('"').to_string()))
        .collect()
}

fn params_from_attrs(attrs: &[(String, String)]) -> Result<ModelParams> {
    let get = |k: &str| attrs.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
    let num = |k: &str| -> Result<Option<u64>> {
        get(k).map(|v| v.parse().map_err(|_| Error::parse(0, format!("bad graph attribute {k}")))).transpose()
    };
    let variant = get("variant").ok_or_else(|| Error::parse(0, "graph attributes lack a variant"))?;
    let m = num("m")?.ok_or_else(|| Error::parse(0, "graph attributes lack m"))? as u32;
    let t = num("t")?.ok_or_else(|| Error::parse(0, "graph attributes lack t"))? as u32;
    let p = get("p").map(|v| v.parse::<f64>().map_err(|_| Error::parse(0, "bad p"))).transpose()?;
    params_from_parts(variant, m, t, p, num("seed")?)
}

/// Recovers levels from degrees: the hub has the largest degree (lowest id
/// on ties), the bottom level is its neighborhood, and a vertex of degree
/// `m^(t+1-L)` elsewhere sits on level `L`. Without `params`, `m` and `t`
/// are read off the degrees and the variant off the rim edges.
pub fn infer_levels(
    g: &Graph,
    params: Option<&ModelParams>,
    warnings: &mut Vec<String>,
) -> Result<(Vec<u32>, ModelParams)> {
    let n = g.vertex_count();
    let hub = (0..n).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).ok_or(Error::Empty)?;
    let mut is_bottom = vec![false; n];
    for &u in g.neighbors(hub) {
        is_bottom[u as usize] = true;
    }
    let inner: Vec<usize> = (0..n).filter(|&v| v != hub && !is_bottom[v]).collect();
    let (m, t) = match params {
        Some(p) => (p.m, p.t),
        None if inner.is_empty() => (g.degree(hub) as u32, 0),
        None => {
            let mut degrees: Vec<usize> = inner.iter().map(|&v| g.degree(v)).collect();
            degrees.sort_unstable();
            degrees.dedup();
            (degrees[0] as u32, degrees.len() as u32)
        }
    };
    if m < 2 {
        return Err(Error::Levels(format!("branching {m} below 2")));
    }
    let power = |e: u32| (m as u128).checked_pow(e);
    if power(t + 1) != Some(g.degree(hub) as u128) {
        return Err(Error::Levels(format!("hub degree {} is not {m}^{}", g.degree(hub), t + 1)));
    }
    let mut levels = vec![t + 1; n];
    levels[hub] = 0;
    for &v in &inner {
        let d = g.degree(v) as u128;
        let level = (1..=t).find(|&l| power(t + 1 - l) == Some(d));
        levels[v] = level.ok_or_else(|| Error::Levels(format!("vertex {v} has degree {d}, not a power of {m}")))?;
    }
    let inferred = match params {
        Some(p) => *p,
        None => {
            let rim = g.edges().filter(|&(u, v)| is_bottom[u as usize] && is_bottom[v as usize]).count();
            let full = if m == 2 { 1usize << t } else { power(t + 1).unwrap() as usize };
            match rim {
                0 => ModelParams::base(m, t),
                r if r == full => ModelParams::wheel(m, t),
                r => {
                    let p = 1.0 - r as f64 / full as f64;
                    warnings.push(format!("partial rim: deleted variant with p estimated as {p}, seed unknown (0)"));
                    ModelParams::deleted(m, t, p, 0)
                }
            }
        }
    };
    Ok((levels, inferred))
}

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use clique_interdict::{parse_dimacs, parse_edgelist, Edge, EdgeSet, Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dimacs,
    Edgelist,
}

impl Format {
    /// `.clq`, `.col` and `.dimacs` files are DIMACS; anything else is an
    /// edge list.
    pub fn detect(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ["clq", "col", "dimacs"].contains(&ext.to_ascii_lowercase().as_str()) => {
                Format::Dimacs
            }
            _ => Format::Edgelist,
        }
    }
}

pub fn load_graph(path: &Path, format: Option<Format>, zero_indexed: bool) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let reader = BufReader::new(file);
    let parsed = match format.unwrap_or_else(|| Format::detect(path)) {
        Format::Dimacs => parse_dimacs(reader),
        Format::Edgelist => parse_edgelist(reader, !zero_indexed),
    };
    let (graph, _) = parsed.with_context(|| format!("cannot parse {}", path.display()))?;
    Ok(graph)
}

/// A nonnegative decimal (`0.0125`) or fraction (`1/80`) as `(num, den)`.
pub fn parse_rational(text: &str) -> Result<(u128, u128)> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let num: u128 = a.trim().parse().with_context(|| format!("bad numerator in `{text}`"))?;
        let den: u128 = b.trim().parse().with_context(|| format!("bad denominator in `{text}`"))?;
        if den == 0 {
            bail!("zero denominator in `{text}`");
        }
        return Ok((num, den));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        || frac.len() > 30
    {
        bail!("`{text}` is not a nonnegative decimal");
    }
    let den = 10u128.pow(frac.len() as u32);
    let int: u128 = if int.is_empty() { 0 } else { int.parse()? };
    let frac: u128 = if frac.is_empty() { 0 } else { frac.parse()? };
    Ok((int * den + frac, den))
}

/// `⌈c·m⌉` computed exactly.
pub fn k_from_fraction(c: &str, m: usize) -> Result<u64> {
    let (num, den) = parse_rational(c)?;
    let k = (num * m as u128).div_ceil(den);
    u64::try_from(k).context("budget too large")
}

/// Maps input labels back to vertex ids.
pub fn label_index(g: &Graph) -> HashMap<u64, Vertex> {
    (0..g.n()).map(|v| (g.label(v), v)).collect()
}

/// Witness edges as `u-v` pairs separated by commas or whitespace, given
/// inline or as a file path.
pub fn parse_witness(g: &Graph, source: &str) -> Result<EdgeSet> {
    let text = if Path::new(source).is_file() {
        std::fs::read_to_string(source).with_context(|| format!("cannot read {source}"))?
    } else {
        source.to_string()
    };
    let index = label_index(g);
    let mut set = EdgeSet::new();
    for token in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let (a, b) = token
            .split_once('-')
            .with_context(|| format!("edge `{token}` is not of the form u-v"))?;
        let vertex = |s: &str| -> Result<Vertex> {
            let label: u64 = s.parse().with_context(|| format!("bad vertex `{s}`"))?;
            index
                .get(&label)
                .copied()
                .with_context(|| format!("vertex {label} is not in the graph"))
        };
        let (u, v) = (vertex(a)?, vertex(b)?);
        if u == v {
            bail!("edge `{token}` is a self-loop");
        }
        set.insert(Edge::new(u, v));
    }
    Ok(set)
}

pub fn labeled_edges(g: &Graph, edges: &EdgeSet) -> Vec<[u64; 2]> {
    edges.iter().map(|e| [g.label(e.u()), g.label(e.v())]).collect()
}

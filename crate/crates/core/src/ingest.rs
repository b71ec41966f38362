//! Plain-text inputs: edge lists, privacy-label files and sample files.
//!
//! All formats are whitespace-separated and line oriented; blank lines and
//! lines starting with `#` or `%` are skipped.
//!
//! * Edge list: `src dst [ignored columns...]`, arbitrary non-negative integer ids.
//! * Label file: `node_id flag`, flag one of `public`, `private`, `0` (public), `1` (private).
//! * Sample file: `node_id degree public_degree`, or the four-column walk dump
//!   `index node_id degree public_degree`.
//!
//! Edge lists are symmetrized, stripped of self-loops and duplicates,
//! restricted to the largest connected component and remapped to dense ids
//! in increasing order of the original ids.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{EdgePolicy, GraphError, Label, LabelOrigin, LabeledGraph, NodeId, Topology};
use crate::walker::{PublicDegreeMode, Sample, WalkRecord};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no edges left after pre-processing")]
    EmptyGraph,
    #[error("line {line}: node {id} is not in the graph")]
    UnknownNode { line: usize, id: u64 },
    #[error("{missing} graph nodes have no label")]
    MissingLabels { missing: usize },
    #[error("line {line}: public-degree {public_degree} exceeds degree {degree}")]
    PublicDegreeExceedsDegree { line: usize, degree: u32, public_degree: f64 },
    #[error("sample file has no samples")]
    NoSamples,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })
}

/// Yields `(1-based line number, fields)` for every non-comment line.
fn data_lines<R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<(usize, Vec<String>), IngestError>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(IngestError::Parse { line: i + 1, message: e.to_string() })),
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            return None;
        }
        Some(Ok((i + 1, trimmed.split_whitespace().map(str::to_owned).collect())))
    })
}

fn field<T: std::str::FromStr>(fields: &[String], idx: usize, line: usize, what: &str) -> Result<T, IngestError> {
    let raw = fields.get(idx).ok_or_else(|| IngestError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    raw.parse().map_err(|_| IngestError::Parse {
        line,
        message: format!("invalid {what} `{raw}`"),
    })
}

/// Counts of what pre-processing removed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub edge_lines: usize,
    pub self_loops: usize,
    /// Repeated listings of the same edge (same orientation when the input is directed).
    pub duplicate_edges: usize,
    /// Directed input only: `u v` / `v u` pairs merged into one undirected edge.
    pub reciprocal_pairs: usize,
    pub input_nodes: usize,
    /// Nodes outside the largest connected component.
    pub dropped_nodes: usize,
}

/// A pre-processed graph together with the map back to input ids.
#[derive(Debug, Clone)]
pub struct IngestedGraph {
    pub graph: LabeledGraph,
    /// Dense id → original id, increasing.
    pub original_ids: Vec<u64>,
    pub stats: IngestStats,
}

impl IngestedGraph {
    pub fn dense_id(&self, original: u64) -> Option<NodeId> {
        self.original_ids.binary_search(&original).ok().map(|i| i as NodeId)
    }

    /// Writes the cleaned graph as an edge list over original ids, one line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        let g = &self.graph;
        writeln!(w, "# {} nodes, {} edges", g.node_count(), g.edge_count())?;
        for v in 0..g.node_count() as NodeId {
            for &u in g.neighbors(v) {
                if v < u {
                    writeln!(w, "{} {}", self.original_ids[v as usize], self.original_ids[u as usize])?;
                }
            }
        }
        Ok(())
    }

    /// Same id map and stats around a relabeled copy of this graph.
    pub fn with_labels(&self, graph: LabeledGraph) -> IngestedGraph {
        IngestedGraph { graph, original_ids: self.original_ids.clone(), stats: self.stats }
    }
}

struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

pub fn load_edge_list(path: &Path, directed_input: bool) -> Result<IngestedGraph, IngestError> {
    parse_edge_list(open(path)?, directed_input)
}

/// Reads and pre-processes an edge list. `directed_input` only changes how
/// repeated pairs are reported; edges are always symmetrized.
pub fn parse_edge_list<R: BufRead>(reader: R, directed_input: bool) -> Result<IngestedGraph, IngestError> {
    let mut stats = IngestStats::default();
    let mut interned: HashMap<u64, u32> = HashMap::new();
    let mut originals: Vec<u64> = Vec::new();
    // (min, max, forward?) over interned ids
    let mut arcs: Vec<(u32, u32, bool)> = Vec::new();

    let mut intern = |id: u64, originals: &mut Vec<u64>| -> u32 {
        *interned.entry(id).or_insert_with(|| {
            originals.push(id);
            (originals.len() - 1) as u32
        })
    };

    for item in data_lines(reader) {
        let (line, fields) = item?;
        let src: u64 = field(&fields, 0, line, "source id")?;
        let dst: u64 = field(&fields, 1, line, "target id")?;
        stats.edge_lines += 1;
        let a = intern(src, &mut originals);
        let b = intern(dst, &mut originals);
        if a == b {
            stats.self_loops += 1;
            continue;
        }
        arcs.push((a.min(b), a.max(b), a < b));
    }
    stats.input_nodes = originals.len();
    if originals.len() > NodeId::MAX as usize {
        return Err(GraphError::TooManyNodes(originals.len()).into());
    }
    if arcs.is_empty() {
        return Err(IngestError::EmptyGraph);
    }

    arcs.sort_unstable();
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(arcs.len());
    let mut i = 0;
    while i < arcs.len() {
        let (a, b, _) = arcs[i];
        let mut j = i;
        let (mut forward, mut backward) = (0usize, 0usize);
        while j < arcs.len() && arcs[j].0 == a && arcs[j].1 == b {
            if arcs[j].2 {
                forward += 1;
            } else {
                backward += 1;
            }
            j += 1;
        }
        let listings = forward + backward;
        if directed_input && forward > 0 && backward > 0 {
            stats.reciprocal_pairs += 1;
            stats.duplicate_edges += listings - 2;
        } else {
            stats.duplicate_edges += listings - 1;
        }
        edges.push((a, b));
        i = j;
    }
    drop(arcs);

    // Largest connected component; ties go to the component holding the smallest original id.
    let mut dsu = DisjointSet::new(originals.len());
    for &(a, b) in &edges {
        dsu.union(a, b);
    }
    let mut best: Option<(u32, u32, u64)> = None; // (root, size, smallest original id)
    let mut smallest: HashMap<u32, u64> = HashMap::new();
    for (v, &orig) in originals.iter().enumerate() {
        let root = dsu.find(v as u32);
        let entry = smallest.entry(root).or_insert(orig);
        *entry = (*entry).min(orig);
    }
    for (&root, &min_id) in &smallest {
        let size = dsu.size[root as usize];
        let better = match best {
            None => true,
            Some((_, s, m)) => size > s || (size == s && min_id < m),
        };
        if better {
            best = Some((root, size, min_id));
        }
    }
    let (root, _, _) = best.expect("at least one edge");

    let mut kept: Vec<(u64, u32)> = originals
        .iter()
        .enumerate()
        .filter(|&(v, _)| dsu.find(v as u32) == root)
        .map(|(v, &orig)| (orig, v as u32))
        .collect();
    kept.sort_unstable();
    stats.dropped_nodes = originals.len() - kept.len();

    let mut dense = vec![u32::MAX; originals.len()];
    for (new, &(_, old)) in kept.iter().enumerate() {
        dense[old as usize] = new as u32;
    }
    let remapped: Vec<(NodeId, NodeId)> = edges
        .iter()
        .filter(|&&(a, _)| dense[a as usize] != u32::MAX)
        .map(|&(a, b)| (dense[a as usize], dense[b as usize]))
        .collect();
    drop(edges);

    let topology = Topology::from_edges(kept.len(), &remapped, EdgePolicy::Reject)?;
    let graph = LabeledGraph::all_public(Arc::new(topology))?;
    Ok(IngestedGraph {
        graph,
        original_ids: kept.into_iter().map(|(orig, _)| orig).collect(),
        stats,
    })
}

/// How to treat label-file entries that don't match the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelOptions {
    /// Unknown ids and unlabeled nodes are errors.
    pub strict: bool,
    /// Label for nodes the file doesn't mention (lenient mode).
    pub default_label: Label,
}

impl Default for LabelOptions {
    fn default() -> Self {
        LabelOptions { strict: false, default_label: Label::Public }
    }
}

fn parse_flag(raw: &str, line: usize) -> Result<Label, IngestError> {
    match raw.to_ascii_lowercase().as_str() {
        "public" | "0" => Ok(Label::Public),
        "private" | "1" => Ok(Label::Private),
        _ => Err(IngestError::Parse { line, message: format!("invalid privacy flag `{raw}`") }),
    }
}

pub fn load_labels(path: &Path, graph: &IngestedGraph, options: LabelOptions) -> Result<LabeledGraph, IngestError> {
    parse_labels(open(path)?, graph, options)
}

pub fn parse_labels<R: BufRead>(
    reader: R,
    graph: &IngestedGraph,
    options: LabelOptions,
) -> Result<LabeledGraph, IngestError> {
    let n = graph.graph.node_count();
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut skipped = 0usize;
    for item in data_lines(reader) {
        let (line, fields) = item?;
        let id: u64 = field(&fields, 0, line, "node id")?;
        let raw: String = field(&fields, 1, line, "privacy flag")?;
        let label = parse_flag(&raw, line)?;
        match graph.dense_id(id) {
            Some(v) => labels[v as usize] = Some(label),
            None if options.strict => return Err(IngestError::UnknownNode { line, id }),
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} label lines for nodes outside the graph");
    }
    let missing = labels.iter().filter(|l| l.is_none()).count();
    if missing > 0 {
        if options.strict {
            return Err(IngestError::MissingLabels { missing });
        }
        log::warn!("{missing} nodes have no label, defaulting to {}", options.default_label);
    }
    let labels = labels.into_iter().map(|l| l.unwrap_or(options.default_label)).collect();
    Ok(graph.graph.with_labels(labels, LabelOrigin::File)?)
}

/// Writes `original_id flag` lines with flag 0 (public) or 1 (private).
pub fn write_labels<W: Write>(mut w: W, graph: &LabeledGraph, original_ids: &[u64]) -> io::Result<()> {
    writeln!(w, "# node private")?;
    for (v, label) in graph.labels().iter().enumerate() {
        writeln!(w, "{} {}", original_ids[v], u8::from(!label.is_public()))?;
    }
    Ok(())
}

/// A sample sequence read from disk, with node ids remapped densely in
/// order of first appearance.
#[derive(Debug, Clone)]
pub struct SampleFile {
    pub record: WalkRecord,
    pub original_ids: Vec<u64>,
}

pub fn load_sample_records(path: &Path) -> Result<SampleFile, IngestError> {
    parse_sample_records(open(path)?)
}

pub fn parse_sample_records<R: BufRead>(reader: R) -> Result<SampleFile, IngestError> {
    let mut interned: HashMap<u64, NodeId> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut samples = Vec::new();
    for item in data_lines(reader) {
        let (line, fields) = item?;
        let offset = match fields.len() {
            3 => 0,
            4 => 1,
            k => {
                return Err(IngestError::Parse {
                    line,
                    message: format!("expected 3 or 4 columns, found {k}"),
                })
            }
        };
        let id: u64 = field(&fields, offset, line, "node id")?;
        let degree: u32 = field(&fields, offset + 1, line, "degree")?;
        let public_degree: f64 = field(&fields, offset + 2, line, "public-degree")?;
        if !public_degree.is_finite() || public_degree < 0.0 {
            return Err(IngestError::Parse {
                line,
                message: format!("invalid public-degree `{}`", fields[offset + 2]),
            });
        }
        if public_degree > degree as f64 {
            return Err(IngestError::PublicDegreeExceedsDegree { line, degree, public_degree });
        }
        let node = *interned.entry(id).or_insert_with(|| {
            original_ids.push(id);
            (original_ids.len() - 1) as NodeId
        });
        samples.push(Sample { node, degree, public_degree });
    }
    if samples.is_empty() {
        return Err(IngestError::NoSamples);
    }
    Ok(SampleFile {
        record: WalkRecord::from_samples(samples, PublicDegreeMode::ExactHidden),
        original_ids,
    })
}

//! Temporal bipartite multigraphs: ingestion, indexing and time-window queries.
//!
//! A [`TemporalBipartiteGraph`] is immutable once built. Edges are kept in a
//! global `(timestamp, edge_id)` order and every node owns a slice of
//! [`AdjEntry`] sorted the same way, so any time window over a node's
//! neighbourhood is two binary searches away.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::ops::Range;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Timestamp = i64;
pub type EdgeId = u32;
pub type NodeIndex = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Upper,
    Lower,
}

impl Layer {
    pub fn opposite(self) -> Layer {
        match self {
            Layer::Upper => Layer::Lower,
            Layer::Lower => Layer::Upper,
        }
    }
}

impl std::str::FromStr for Layer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" | "u" | "U" => Ok(Layer::Upper),
            "lower" | "l" | "L" => Ok(Layer::Lower),
            other => Err(Error::arg(format!("unknown layer `{other}`"))),
        }
    }
}

/// A node addressed by layer and dense per-layer index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Upper(NodeIndex),
    Lower(NodeIndex),
}

impl Node {
    pub fn new(layer: Layer, index: NodeIndex) -> Node {
        match layer {
            Layer::Upper => Node::Upper(index),
            Layer::Lower => Node::Lower(index),
        }
    }

    pub fn layer(self) -> Layer {
        match self {
            Node::Upper(_) => Layer::Upper,
            Node::Lower(_) => Layer::Lower,
        }
    }

    pub fn index(self) -> NodeIndex {
        match self {
            Node::Upper(i) | Node::Lower(i) => i,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TemporalEdge {
    pub id: EdgeId,
    pub upper: NodeIndex,
    pub lower: NodeIndex,
    pub timestamp: Timestamp,
}

/// One incident edge as seen from a node: the endpoint on the other layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AdjEntry {
    pub other: NodeIndex,
    pub timestamp: Timestamp,
    pub edge: EdgeId,
}

/// A time interval with independently open or closed ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeWindow {
    pub lo: Timestamp,
    pub hi: Timestamp,
    pub lo_exclusive: bool,
    pub hi_inclusive: bool,
}

impl TimeWindow {
    pub fn new(lo: Timestamp, hi: Timestamp, lo_exclusive: bool, hi_inclusive: bool) -> Self {
        TimeWindow { lo, hi, lo_exclusive, hi_inclusive }
    }

    /// `[lo, hi]`
    pub fn closed(lo: Timestamp, hi: Timestamp) -> Self {
        Self::new(lo, hi, false, true)
    }

    /// `(lo, hi]`
    pub fn left_open(lo: Timestamp, hi: Timestamp) -> Self {
        Self::new(lo, hi, true, true)
    }

    /// `(t, t + tau]`: everything strictly after `t` and at most `tau` later.
    pub fn after(t: Timestamp, tau: Timestamp) -> Self {
        Self::left_open(t, t.saturating_add(tau))
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        let above = if self.lo_exclusive { t > self.lo } else { t >= self.lo };
        let below = if self.hi_inclusive { t <= self.hi } else { t < self.hi };
        above && below
    }

    /// Index range of the entries of a timestamp-sorted slice that fall in the window.
    pub(crate) fn range_in<T>(&self, sorted: &[T], ts: impl Fn(&T) -> Timestamp) -> Range<usize> {
        let start = sorted.partition_point(|x| {
            let t = ts(x);
            if self.lo_exclusive { t <= self.lo } else { t < self.lo }
        });
        let end = sorted.partition_point(|x| {
            let t = ts(x);
            if self.hi_inclusive { t <= self.hi } else { t < self.hi }
        });
        start..end.max(start)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    entries: Vec<AdjEntry>,
}

impl Csr {
    fn build(n: usize, edges: &[TemporalEdge], key: impl Fn(&TemporalEdge) -> (NodeIndex, NodeIndex)) -> Csr {
        let mut offsets = vec![0usize; n + 1];
        for e in edges {
            offsets[key(e).0 as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut entries = vec![AdjEntry { other: 0, timestamp: 0, edge: 0 }; edges.len()];
        // `edges` is already in (timestamp, id) order, so each slice comes out sorted.
        for e in edges {
            let (node, other) = key(e);
            let slot = &mut cursor[node as usize];
            entries[*slot] = AdjEntry { other, timestamp: e.timestamp, edge: e.id };
            *slot += 1;
        }
        Csr { offsets, entries }
    }

    fn slice(&self, node: usize) -> &[AdjEntry] {
        &self.entries[self.offsets[node]..self.offsets[node + 1]]
    }
}

/// Immutable, indexed temporal bipartite multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalBipartiteGraph {
    n_upper: usize,
    n_lower: usize,
    /// Sorted by `(timestamp, id)`.
    edges: Vec<TemporalEdge>,
    /// `position[id]` is the index of edge `id` in `edges`.
    position: Vec<u32>,
    upper_adj: Csr,
    lower_adj: Csr,
    upper_labels: Vec<String>,
    lower_labels: Vec<String>,
}

impl TemporalBipartiteGraph {
    /// Builds a graph from `(upper, lower, timestamp)` triples. Edge ids follow
    /// iteration order; node labels are the decimal indices.
    pub fn from_edges<I>(n_upper: usize, n_lower: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeIndex, NodeIndex, Timestamp)>,
    {
        let upper_labels = (0..n_upper).map(|i| i.to_string()).collect();
        let lower_labels = (0..n_lower).map(|i| i.to_string()).collect();
        Self::with_labels(upper_labels, lower_labels, edges)
    }

    fn with_labels<I>(upper_labels: Vec<String>, lower_labels: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeIndex, NodeIndex, Timestamp)>,
    {
        let n_upper = upper_labels.len();
        let n_lower = lower_labels.len();
        if n_upper > u32::MAX as usize || n_lower > u32::MAX as usize {
            return Err(Error::arg("too many nodes for 32-bit indices"));
        }
        let mut list = Vec::new();
        for (i, (upper, lower, timestamp)) in edges.into_iter().enumerate() {
            if upper as usize >= n_upper || lower as usize >= n_lower {
                return Err(Error::arg(format!(
                    "edge {i} ({upper}, {lower}) out of range for {n_upper}x{n_lower} nodes"
                )));
            }
            let id = EdgeId::try_from(i).map_err(|_| Error::arg("too many edges for 32-bit ids"))?;
            list.push(TemporalEdge { id, upper, lower, timestamp });
        }
        list.sort_unstable_by_key(|e| (e.timestamp, e.id));

        let mut position = vec![0u32; list.len()];
        for (pos, e) in list.iter().enumerate() {
            position[e.id as usize] = pos as u32;
        }
        let upper_adj = Csr::build(n_upper, &list, |e| (e.upper, e.lower));
        let lower_adj = Csr::build(n_lower, &list, |e| (e.lower, e.upper));
        Ok(TemporalBipartiteGraph {
            n_upper,
            n_lower,
            edges: list,
            position,
            upper_adj,
            lower_adj,
            upper_labels,
            lower_labels,
        })
    }

    pub fn n_upper(&self) -> usize {
        self.n_upper
    }

    pub fn n_lower(&self) -> usize {
        self.n_lower
    }

    pub fn layer_size(&self, layer: Layer) -> usize {
        match layer {
            Layer::Upper => self.n_upper,
            Layer::Lower => self.n_lower,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// All edges in `(timestamp, edge_id)` order.
    pub fn edges_by_time(&self) -> &[TemporalEdge] {
        &self.edges
    }

    /// All edges in `edge_id` order.
    pub fn edges_by_id(&self) -> impl Iterator<Item = &TemporalEdge> + '_ {
        self.position.iter().map(move |&p| &self.edges[p as usize])
    }

    pub fn edge(&self, id: EdgeId) -> Result<&TemporalEdge> {
        self.position
            .get(id as usize)
            .map(|&p| &self.edges[p as usize])
            .ok_or_else(|| Error::arg(format!("edge id {id} out of range (m = {})", self.edges.len())))
    }

    /// Rank of an edge in the global time order.
    pub fn time_rank(&self, id: EdgeId) -> Result<usize> {
        self.edge(id)?;
        Ok(self.position[id as usize] as usize)
    }

    pub fn label(&self, node: Node) -> Result<&str> {
        self.check_node(node)?;
        Ok(match node {
            Node::Upper(i) => &self.upper_labels[i as usize],
            Node::Lower(i) => &self.lower_labels[i as usize],
        })
    }

    fn check_node(&self, node: Node) -> Result<()> {
        let size = self.layer_size(node.layer());
        if (node.index() as usize) < size {
            Ok(())
        } else {
            Err(Error::arg(format!("{node:?} out of range ({size} nodes in layer)")))
        }
    }

    /// Time-sorted incident edges of `node`.
    pub fn adjacency(&self, node: Node) -> Result<&[AdjEntry]> {
        self.check_node(node)?;
        Ok(self.adjacency_unchecked(node))
    }

    pub(crate) fn adjacency_unchecked(&self, node: Node) -> &[AdjEntry] {
        match node {
            Node::Upper(i) => self.upper_adj.slice(i as usize),
            Node::Lower(i) => self.lower_adj.slice(i as usize),
        }
    }

    pub fn degree(&self, node: Node) -> Result<usize> {
        Ok(self.adjacency(node)?.len())
    }

    /// Incident edges of `node` with timestamps inside `window`, located by binary search.
    pub fn neighbors_in_window(&self, node: Node, window: TimeWindow) -> Result<&[AdjEntry]> {
        let adj = self.adjacency(node)?;
        Ok(&adj[window.range_in(adj, |a| a.timestamp)])
    }

    pub(crate) fn window_unchecked(&self, node: Node, window: TimeWindow) -> &[AdjEntry] {
        let adj = self.adjacency_unchecked(node);
        &adj[window.range_in(adj, |a| a.timestamp)]
    }

    /// Edges (in time order) whose timestamps fall in `window`.
    pub fn edges_in_window(&self, window: TimeWindow) -> &[TemporalEdge] {
        &self.edges[window.range_in(&self.edges, |e| e.timestamp)]
    }

    /// Distinct `(upper, lower)` pairs of the timestamp-free projection.
    pub fn project_static(&self) -> BTreeSet<(NodeIndex, NodeIndex)> {
        self.edges.iter().map(|e| (e.upper, e.lower)).collect()
    }

    /// The same graph with the two layers exchanged. Edge ids are preserved.
    pub fn transpose(&self) -> TemporalBipartiteGraph {
        let triples = self.edges_by_id().map(|e| (e.lower, e.upper, e.timestamp));
        Self::with_labels(self.lower_labels.clone(), self.upper_labels.clone(), triples)
            .expect("transposing a valid graph")
    }

    /// The same graph with `offset` added to every timestamp.
    pub fn shift_time(&self, offset: Timestamp) -> Result<TemporalBipartiteGraph> {
        let mut triples = Vec::with_capacity(self.edges.len());
        for e in self.edges_by_id() {
            let t = e
                .timestamp
                .checked_add(offset)
                .ok_or_else(|| Error::arg("timestamp shift overflows i64"))?;
            triples.push((e.upper, e.lower, t));
        }
        Self::with_labels(self.upper_labels.clone(), self.lower_labels.clone(), triples)
    }

    pub fn stats(&self) -> GraphStats {
        let d_max = (0..self.n_upper)
            .map(|u| self.upper_adj.slice(u).len())
            .chain((0..self.n_lower).map(|l| self.lower_adj.slice(l).len()))
            .max()
            .unwrap_or(0);
        let timespan = match (self.edges.first(), self.edges.last()) {
            (Some(first), Some(last)) => last.timestamp - first.timestamp,
            _ => 0,
        };
        GraphStats {
            n_upper: self.n_upper,
            n_lower: self.n_lower,
            n: self.n_upper + self.n_lower,
            m: self.edges.len(),
            static_edge_count: self.project_static().len(),
            d_max,
            timespan,
        }
    }

    /// Writes the graph as an edge list (`upper lower timestamp`, one edge per
    /// line, edge id order). Reloading the output reproduces the graph.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for e in self.edges_by_id() {
            writeln!(
                out,
                "{} {} {}",
                self.upper_labels[e.upper as usize], self.lower_labels[e.lower as usize], e.timestamp
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_upper: usize,
    pub n_lower: usize,
    pub n: usize,
    pub m: usize,
    pub static_edge_count: usize,
    pub d_max: usize,
    pub timespan: Timestamp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadOptions {
    pub comment_prefixes: Vec<String>,
    /// When set, timestamps are parsed as reals, multiplied by this factor and
    /// rounded. Otherwise they must be integers.
    pub timestamp_scale: Option<f64>,
    /// Zero-based column holding the timestamp.
    pub timestamp_column: usize,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            comment_prefixes: vec!["%".to_string(), "#".to_string()],
            timestamp_scale: None,
            timestamp_column: 2,
        }
    }
}

fn parse_timestamp(field: &str, scale: Option<f64>) -> std::result::Result<Timestamp, String> {
    match scale {
        None => field
            .parse::<i64>()
            .map_err(|_| format!("timestamp `{field}` is not an integer")),
        Some(scale) => {
            let value: f64 = field
                .parse()
                .map_err(|_| format!("timestamp `{field}` is not a number"))?;
            let scaled = (value * scale).round();
            if !scaled.is_finite() || scaled.abs() >= 9.2e18 {
                return Err(format!("timestamp `{field}` out of range after scaling"));
            }
            Ok(scaled as i64)
        }
    }
}

struct Interner {
    ids: HashMap<String, NodeIndex>,
    labels: Vec<String>,
}

impl Interner {
    fn new() -> Self {
        Interner { ids: HashMap::new(), labels: Vec::new() }
    }

    fn intern(&mut self, token: &str) -> NodeIndex {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.labels.len() as NodeIndex;
        self.ids.insert(token.to_string(), id);
        self.labels.push(token.to_string());
        id
    }
}

/// Parses a whitespace-separated edge list. Node tokens are mapped to dense
/// indices per layer in order of first appearance.
pub fn load_graph<R: BufRead>(source: R, options: &LoadOptions) -> Result<TemporalBipartiteGraph> {
    if let Some(scale) = options.timestamp_scale {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Config(format!("timestamp scale must be positive, got {scale}")));
        }
    }
    let needed = options.timestamp_column.max(1) + 1;
    let mut uppers = Interner::new();
    let mut lowers = Interner::new();
    let mut triples = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || options.comment_prefixes.iter().any(|p| trimmed.starts_with(p.as_str())) {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < needed {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected at least {needed} fields, found {}", fields.len()),
            });
        }
        let timestamp = parse_timestamp(fields[options.timestamp_column], options.timestamp_scale)
            .map_err(|reason| Error::Parse { line: line_no, reason })?;
        triples.push((uppers.intern(fields[0]), lowers.intern(fields[1]), timestamp));
    }
    TemporalBipartiteGraph::with_labels(uppers.labels, lowers.labels, triples)
}

pub fn load_graph_file(path: impl AsRef<Path>, options: &LoadOptions) -> Result<TemporalBipartiteGraph> {
    let file = File::open(path)?;
    load_graph(BufReader::new(file), options)
}

/// Uniform random multigraph: endpoints uniform per layer, timestamps uniform
/// integers in `[0, timespan]`. Deterministic in `seed`.
pub fn generate_synthetic(
    n_upper: usize,
    n_lower: usize,
    m: usize,
    timespan: Timestamp,
    seed: u64,
) -> Result<TemporalBipartiteGraph> {
    if n_upper == 0 || n_lower == 0 {
        return Err(Error::arg("both layers need at least one node"));
    }
    if timespan < 0 {
        return Err(Error::arg("timespan must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<_> = (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n_upper) as NodeIndex;
            let l = rng.gen_range(0..n_lower) as NodeIndex;
            let t = rng.gen_range(0..=timespan);
            (u, l, t)
        })
        .collect();
    TemporalBipartiteGraph::from_edges(n_upper, n_lower, triples)
}

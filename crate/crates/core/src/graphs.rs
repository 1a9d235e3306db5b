//! Directed weighted graphs, time-varying graph sequences and generators.
//!
//! Every graph stores both successor and predecessor views: the engine
//! emits pulses along successors, the analytic maps read predecessors.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("node index {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: usize, to: usize },
    #[error("self-loop on node {0} not enabled")]
    SelfLoop(usize),
    #[error("edge {from} -> {to}: {reason}")]
    InvalidEdge { from: usize, to: usize, reason: String },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("could not draw a connected graph in {0} attempts")]
    Unconnectable(usize),
    #[error("graph sequence: {0}")]
    Sequence(String),
    #[error("edge-list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    pub delay_scale: f64,
}

impl Edge {
    pub fn new(from: usize, to: usize) -> Self {
        Edge {
            from,
            to,
            weight: 1.0,
            delay_scale: 1.0,
        }
    }

    pub fn weighted(from: usize, to: usize, weight: f64) -> Self {
        Edge {
            weight,
            ..Edge::new(from, to)
        }
    }
}

/// Immutable directed graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    self_loops: bool,
}

impl DirectedGraph {
    /// Builds a graph; edges are kept sorted by `(from, to)`.
    pub fn from_edges(n: usize, mut edges: Vec<Edge>, allow_self_loops: bool) -> Result<Self, GraphError> {
        for e in &edges {
            for node in [e.from, e.to] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if e.from == e.to && !allow_self_loops {
                return Err(GraphError::SelfLoop(e.from));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(GraphError::InvalidEdge {
                    from: e.from,
                    to: e.to,
                    reason: format!("weight {} must be > 0", e.weight),
                });
            }
            if !(e.delay_scale > 0.0 && e.delay_scale.is_finite()) {
                return Err(GraphError::InvalidEdge {
                    from: e.from,
                    to: e.to,
                    reason: format!("delay_scale {} must be > 0", e.delay_scale),
                });
            }
        }
        edges.sort_by_key(|e| (e.from, e.to));
        for w in edges.windows(2) {
            if (w[0].from, w[0].to) == (w[1].from, w[1].to) {
                return Err(GraphError::DuplicateEdge {
                    from: w[0].from,
                    to: w[0].to,
                });
            }
        }
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            out[e.from].push(i);
            inc[e.to].push(i);
        }
        Ok(DirectedGraph {
            n,
            edges,
            out,
            inc,
            self_loops: allow_self_loops,
        })
    }

    /// Builds a graph from unit-weight `(from, to)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let allow = pairs.iter().any(|(a, b)| a == b);
        Self::from_edges(n, pairs.iter().map(|&(a, b)| Edge::new(a, b)).collect(), allow)
    }

    /// Builds a graph with each pair present in both directions.
    pub fn undirected(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut both = Vec::with_capacity(pairs.len() * 2);
        for &(a, b) in pairs {
            both.push((a, b));
            if a != b {
                both.push((b, a));
            }
        }
        Self::from_pairs(n, &both)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, Vec::new(), false).expect("empty graph")
    }

    pub fn complete(n: usize) -> Self {
        let pairs: Vec<_> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        Self::from_pairs(n, &pairs).expect("complete graph")
    }

    pub fn directed_cycle(n: usize) -> Self {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_pairs(n, &pairs).expect("cycle")
    }

    pub fn path(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::undirected(n, &pairs).expect("path")
    }

    pub fn star(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::undirected(n, &pairs).expect("star")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn self_loops_enabled(&self) -> bool {
        self.self_loops
    }

    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out[node].iter().map(move |&i| &self.edges[i])
    }

    pub fn in_edges(&self, node: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.inc[node].iter().map(move |&i| &self.edges[i])
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges(node).map(|e| e.to)
    }

    pub fn predecessors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_edges(node).map(|e| e.from)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors(from).any(|s| s == to)
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.inc[node].len()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out[node].len()
    }

    /// True when every non-loop edge has its reverse.
    pub fn is_undirected(&self) -> bool {
        self.edges.iter().all(|e| e.from == e.to || self.has_edge(e.to, e.from))
    }

    fn reach(&self, start: usize, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            let next: Vec<usize> = if forward {
                self.successors(u).collect()
            } else {
                self.predecessors(u).collect()
            };
            for v in next {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        self.reach(0, true).into_iter().all(|s| s) && self.reach(0, false).into_iter().all(|s| s)
    }

    /// Weakly connected (edges taken without direction).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in self.successors(u).chain(self.predecessors(u)) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The gcd of all cycle lengths of a strongly connected graph.
    pub fn period(&self) -> Result<usize, GraphError> {
        if !self.is_strongly_connected() {
            return Err(GraphError::NotStronglyConnected);
        }
        let mut level = vec![usize::MAX; self.n];
        level[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for v in self.successors(u) {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g = 0;
        for e in &self.edges {
            let diff = (level[e.from] as i64 + 1 - level[e.to] as i64).unsigned_abs() as usize;
            g = gcd(g, diff);
        }
        Ok(g)
    }

    /// With a self-loop (weight 1, delay scale 1) on every node.
    pub fn with_self_loops(&self) -> DirectedGraph {
        let mut edges = self.edges.clone();
        for v in 0..self.n {
            if !self.has_edge(v, v) {
                edges.push(Edge::new(v, v));
            }
        }
        DirectedGraph::from_edges(self.n, edges, true).expect("adding loops keeps the graph valid")
    }

    /// Same topology, every edge weight replaced.
    pub fn with_uniform_weight(&self, weight: f64) -> Result<DirectedGraph, GraphError> {
        let edges = self.edges.iter().map(|e| Edge { weight, ..*e }).collect();
        DirectedGraph::from_edges(self.n, edges, self.self_loops)
    }

    /// Successor set of a node set.
    pub fn successor_set(&self, set: &[bool]) -> Vec<bool> {
        let mut next = vec![false; self.n];
        for (u, _) in set.iter().enumerate().filter(|(_, &s)| s) {
            for v in self.successors(u) {
                next[v] = true;
            }
        }
        next
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// True iff the strongly connected graph has period 1.
pub fn is_aperiodic(g: &DirectedGraph) -> Result<bool, GraphError> {
    Ok(g.period()? == 1)
}

pub fn add_self_loops(g: &DirectedGraph) -> DirectedGraph {
    g.with_self_loops()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub min_indegree: usize,
    pub max_indegree: usize,
    pub has_isolated: bool,
    pub strongly_connected: bool,
}

pub fn graph_stats(g: &DirectedGraph) -> GraphStats {
    let indeg: Vec<usize> = (0..g.node_count()).map(|v| g.in_degree(v)).collect();
    GraphStats {
        min_indegree: indeg.iter().copied().min().unwrap_or(0),
        max_indegree: indeg.iter().copied().max().unwrap_or(0),
        has_isolated: (0..g.node_count()).any(|v| g.in_degree(v) == 0 && g.out_degree(v) == 0),
        strongly_connected: g.is_strongly_connected(),
    }
}

/// True iff every node with an in-edge has in-weights summing above `tau`.
pub fn weighted_condition(g: &DirectedGraph, tau: f64) -> bool {
    (0..g.node_count()).all(|v| g.in_degree(v) == 0 || g.in_edges(v).map(|e| e.weight).sum::<f64>() > tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequencePolicy {
    /// A single graph for all time.
    Static,
    /// The listed graphs repeat in order.
    Cyclic,
}

/// One graph per window of length `1 + τ`.
#[derive(Debug, Clone)]
pub struct GraphSequence {
    graphs: Vec<Arc<DirectedGraph>>,
    policy: SequencePolicy,
}

impl GraphSequence {
    pub fn fixed(g: DirectedGraph) -> Self {
        GraphSequence {
            graphs: vec![Arc::new(g)],
            policy: SequencePolicy::Static,
        }
    }

    pub fn cyclic(graphs: Vec<DirectedGraph>) -> Result<Self, GraphError> {
        if graphs.is_empty() {
            return Err(GraphError::Sequence("empty graph list".into()));
        }
        let n = graphs[0].node_count();
        if graphs.iter().any(|g| g.node_count() != n) {
            return Err(GraphError::Sequence("graphs differ in node count".into()));
        }
        Ok(GraphSequence {
            graphs: graphs.into_iter().map(Arc::new).collect(),
            policy: SequencePolicy::Cyclic,
        })
    }

    pub fn policy(&self) -> SequencePolicy {
        self.policy
    }

    pub fn node_count(&self) -> usize {
        self.graphs[0].node_count()
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> impl Iterator<Item = &DirectedGraph> + '_ {
        self.graphs.iter().map(|g| g.as_ref())
    }

    /// Graph in force during window `index`.
    pub fn at(&self, index: usize) -> &DirectedGraph {
        match self.policy {
            SequencePolicy::Static => &self.graphs[0],
            SequencePolicy::Cyclic => &self.graphs[index % self.graphs.len()],
        }
    }

    pub fn map(&self, f: impl Fn(&DirectedGraph) -> DirectedGraph) -> GraphSequence {
        GraphSequence {
            graphs: self.graphs.iter().map(|g| Arc::new(f(g))).collect(),
            policy: self.policy,
        }
    }
}

/// Smallest `d ≤ d_max` such that composing the successor maps of windows
/// `start, start+1, …, start+d−1` sends every singleton to the full node
/// set.
pub fn coverage_depth(seq: &GraphSequence, start: usize, d_max: usize) -> Option<usize> {
    let n = seq.node_count();
    let mut sets: Vec<Vec<bool>> = (0..n)
        .map(|v| {
            let mut s = vec![false; n];
            s[v] = true;
            s
        })
        .collect();
    for d in 1..=d_max {
        let g = seq.at(start + d - 1);
        for s in sets.iter_mut() {
            *s = g.successor_set(s);
        }
        if sets.iter().all(|s| s.iter().all(|&b| b)) {
            return Some(d);
        }
    }
    None
}

/// Maximum coverage depth over the start windows `0..windows`.
pub fn max_coverage_depth(seq: &GraphSequence, windows: usize, d_max: usize) -> Option<usize> {
    (0..windows.max(1))
        .map(|l| coverage_depth(seq, l, d_max))
        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
}

/// `n` uniform points in the unit square, joined in both directions when
/// within `radius`; redrawn until connected.
pub fn gen_random_geometric(n: usize, radius: f64, seed: u64) -> Result<DirectedGraph, GraphError> {
    const ATTEMPTS: usize = 1000;
    if n == 0 {
        return Err(GraphError::InvalidParameter("n must be >= 1".into()));
    }
    if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
        return Err(GraphError::InvalidParameter(format!(
            "radius {radius} not in (0, sqrt 2]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                if (dx * dx + dy * dy).sqrt() <= radius {
                    pairs.push((i, j));
                }
            }
        }
        let g = DirectedGraph::undirected(n, &pairs)?;
        if n == 1 || g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::Unconnectable(ATTEMPTS))
}

/// Complete binary tree of the given depth with bidirectional edges and
/// one chord closing a triangle.
///
/// Nodes use heap numbering (children of `i` are `2i+1`, `2i+2`). The
/// chord joins the two children of the root's left child, or the root's
/// two children when `depth == 1`.
pub fn gen_binary_tree_triangle(depth: usize) -> Result<DirectedGraph, GraphError> {
    if depth == 0 {
        return Err(GraphError::InvalidParameter("depth must be >= 1".into()));
    }
    let n = (1usize << (depth + 1)) - 1;
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|c| ((c - 1) / 2, c)).collect();
    pairs.push(if depth == 1 { (1, 2) } else { (3, 4) });
    DirectedGraph::undirected(n, &pairs)
}

/// 4-neighbour `w × h` grid with bidirectional edges.
pub fn grid(w: usize, h: usize) -> Result<DirectedGraph, GraphError> {
    DirectedGraph::undirected(w * h, &grid_pairs(w, h))
}

fn grid_pairs(w: usize, h: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                pairs.push((v, v + 1));
            }
            if y + 1 < h {
                pairs.push((v, v + w));
            }
        }
    }
    pairs
}

/// A grid that loses `fail_per_window` random undirected edges in each
/// window. Draws that would isolate a node are rejected.
pub fn gen_grid_with_failures(
    w: usize,
    h: usize,
    fail_per_window: usize,
    seed: u64,
    windows: usize,
) -> Result<GraphSequence, GraphError> {
    const ATTEMPTS: usize = 1000;
    if w * h < 2 {
        return Err(GraphError::InvalidParameter("grid needs at least two nodes".into()));
    }
    if windows == 0 {
        return Err(GraphError::InvalidParameter("windows must be >= 1".into()));
    }
    let all = grid_pairs(w, h);
    if fail_per_window >= all.len() {
        return Err(GraphError::InvalidParameter(format!(
            "{fail_per_window} failures leave no edges in a {w}x{h} grid"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(windows);
    for _ in 0..windows {
        let mut accepted = None;
        for _ in 0..ATTEMPTS {
            let mut idx: Vec<usize> = (0..all.len()).collect();
            idx.shuffle(&mut rng);
            let failed = &idx[..fail_per_window];
            let kept: Vec<(usize, usize)> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| !failed.contains(i))
                .map(|(_, &p)| p)
                .collect();
            let g = DirectedGraph::undirected(w * h, &kept)?;
            if !graph_stats(&g).has_isolated {
                accepted = Some(g);
                break;
            }
        }
        graphs.push(accepted.ok_or(GraphError::Unconnectable(ATTEMPTS))?);
    }
    GraphSequence::cyclic(graphs)
}

/// Erdős–Rényi digraph redrawn until strongly connected and aperiodic.
pub fn gen_random_aperiodic(n: usize, p: f64, seed: u64) -> Result<DirectedGraph, GraphError> {
    const ATTEMPTS: usize = 10_000;
    if n < 2 {
        return Err(GraphError::InvalidParameter("need at least two nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && rng.gen::<f64>() < p {
                    pairs.push((a, b));
                }
            }
        }
        let g = DirectedGraph::from_pairs(n, &pairs)?;
        if g.is_strongly_connected() && g.period()? == 1 {
            return Ok(g);
        }
    }
    Err(GraphError::Unconnectable(ATTEMPTS))
}

/// Undirected Erdős–Rényi graph redrawn until connected and aperiodic
/// (contains an odd cycle).
pub fn gen_random_undirected(n: usize, p: f64, seed: u64) -> Result<DirectedGraph, GraphError> {
    const ATTEMPTS: usize = 10_000;
    if n < 3 {
        return Err(GraphError::InvalidParameter("need at least three nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen::<f64>() < p {
                    pairs.push((a, b));
                }
            }
        }
        let g = DirectedGraph::undirected(n, &pairs)?;
        if g.is_strongly_connected() && g.period()? == 1 {
            return Ok(g);
        }
    }
    Err(GraphError::Unconnectable(ATTEMPTS))
}

/// Every node draws `k` distinct predecessors uniformly, so the minimum
/// in-degree is exactly `k`.
pub fn gen_random_in_regular(n: usize, k: usize, seed: u64) -> Result<DirectedGraph, GraphError> {
    if k == 0 || k >= n {
        return Err(GraphError::InvalidParameter(format!("need 1 <= k < n (k={k}, n={n})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(n * k);
    for v in 0..n {
        let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        for &u in others.choose_multiple(&mut rng, k) {
            pairs.push((u, v));
        }
    }
    DirectedGraph::from_pairs(n, &pairs)
}

const EDGE_LIST_HEADER: &str = "pco-graph v1";
const SEQUENCE_FORMAT: &str = "pco-graph-seq v1";

/// Serialises to the edge-list text format.
pub fn write_edge_list(g: &DirectedGraph) -> String {
    let mut s = format!("{EDGE_LIST_HEADER} n={}\n", g.node_count());
    for e in g.edges() {
        s.push_str(&format!("{} {} {} {}\n", e.from, e.to, e.weight, e.delay_scale));
    }
    s
}

pub fn parse_edge_list(text: &str) -> Result<DirectedGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let n = header
        .strip_prefix(EDGE_LIST_HEADER)
        .and_then(|rest| rest.trim().strip_prefix("n="))
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or(GraphError::Parse {
            line: hline,
            msg: format!("expected `{EDGE_LIST_HEADER} n=<nodes>`"),
        })?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 2 && parts.len() != 4 {
            return Err(GraphError::Parse {
                line,
                msg: "expected `from to [weight delay_scale]`".into(),
            });
        }
        let bad = |what: &str| GraphError::Parse {
            line,
            msg: format!("bad {what}"),
        };
        let from = parts[0].parse().map_err(|_| bad("from"))?;
        let to = parts[1].parse().map_err(|_| bad("to"))?;
        let (weight, delay_scale) = if parts.len() == 4 {
            (
                parts[2].parse().map_err(|_| bad("weight"))?,
                parts[3].parse().map_err(|_| bad("delay_scale"))?,
            )
        } else {
            (1.0, 1.0)
        };
        edges.push(Edge {
            from,
            to,
            weight,
            delay_scale,
        });
    }
    let loops = edges.iter().any(|e| e.from == e.to);
    DirectedGraph::from_edges(n, edges, loops)
}

#[derive(Debug, Serialize, Deserialize)]
struct SequenceManifest {
    format: String,
    policy: SequencePolicy,
    files: Vec<String>,
}

/// The files of a sequence directory, `(name, contents)` in order: one
/// edge list per graph, then `manifest.json`.
pub fn sequence_files(seq: &GraphSequence) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = seq
        .graphs()
        .enumerate()
        .map(|(i, g)| (format!("g{i:04}.txt"), write_edge_list(g)))
        .collect();
    let manifest = SequenceManifest {
        format: SEQUENCE_FORMAT.into(),
        policy: seq.policy(),
        files: out.iter().map(|(n, _)| n.clone()).collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    out.push(("manifest.json".into(), json + "\n"));
    out
}

/// Writes one edge-list file per graph plus `manifest.json`.
pub fn write_sequence(dir: &Path, seq: &GraphSequence) -> Result<(), GraphError> {
    fs::create_dir_all(dir)?;
    for (name, text) in sequence_files(seq) {
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

pub fn read_sequence(dir: &Path) -> Result<GraphSequence, GraphError> {
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: SequenceManifest = serde_json::from_str(&text).map_err(|e| GraphError::Sequence(e.to_string()))?;
    if manifest.format != SEQUENCE_FORMAT {
        return Err(GraphError::Sequence(format!(
            "unsupported format `{}`",
            manifest.format
        )));
    }
    let graphs = manifest
        .files
        .iter()
        .map(|f| parse_edge_list(&fs::read_to_string(dir.join(f))?))
        .collect::<Result<Vec<_>, _>>()?;
    match manifest.policy {
        SequencePolicy::Static if graphs.len() == 1 => {
            Ok(GraphSequence::fixed(graphs.into_iter().next().expect("one graph")))
        }
        SequencePolicy::Static => Err(GraphError::Sequence("static policy needs exactly one graph".into())),
        SequencePolicy::Cyclic => GraphSequence::cyclic(graphs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    /// gcd of the lengths of all simple cycles, by exhaustive DFS.
    fn brute_force_period(g: &DirectedGraph) -> usize {
        fn dfs(g: &DirectedGraph, start: usize, u: usize, len: usize, on: &mut Vec<bool>, acc: &mut usize) {
            for v in g.successors(u) {
                if v == start {
                    *acc = gcd(*acc, len + 1);
                } else if v > start && !on[v] {
                    on[v] = true;
                    dfs(g, start, v, len + 1, on, acc);
                    on[v] = false;
                }
            }
        }
        let mut acc = 0;
        for s in 0..g.node_count() {
            let mut on = vec![false; g.node_count()];
            on[s] = true;
            dfs(g, s, s, 0, &mut on, &mut acc);
        }
        acc
    }

    /// Smallest d with S^d(v) = V for all v, by explicit set iteration.
    fn brute_force_depth(g: &DirectedGraph, d_max: usize) -> Option<usize> {
        let n = g.node_count();
        let full: u32 = (1 << n) - 1;
        let succ: Vec<u32> = (0..n)
            .map(|u| g.successors(u).fold(0u32, |m, v| m | (1 << v)))
            .collect();
        let mut sets: Vec<u32> = (0..n).map(|v| 1 << v).collect();
        for d in 1..=d_max {
            for s in sets.iter_mut() {
                *s = (0..n).filter(|&u| *s & (1 << u) != 0).fold(0, |m, u| m | succ[u]);
            }
            if sets.iter().all(|&s| s == full) {
                return Some(d);
            }
        }
        None
    }

    #[test]
    fn aperiodicity_examples() {
        let c3 = DirectedGraph::directed_cycle(3);
        assert!(!is_aperiodic(&c3).unwrap());
        assert_eq!(c3.period().unwrap(), 3);
        let c3_loop = DirectedGraph::from_pairs(3, &[(0, 1), (1, 2), (2, 0), (0, 0)]).unwrap();
        assert!(is_aperiodic(&c3_loop).unwrap());
        assert!(is_aperiodic(&DirectedGraph::complete(3)).unwrap());
        let path = DirectedGraph::from_pairs(2, &[(0, 1)]).unwrap();
        assert!(matches!(is_aperiodic(&path), Err(GraphError::NotStronglyConnected)));
    }

    #[test]
    fn coverage_depth_examples() {
        let k3 = GraphSequence::fixed(DirectedGraph::complete(3));
        assert_eq!(coverage_depth(&k3, 0, 10), Some(2));
        // path of 5 with self-loops: diameter 4
        let p5 = GraphSequence::fixed(DirectedGraph::path(5).with_self_loops());
        assert_eq!(coverage_depth(&p5, 0, 20), Some(4));
        let c4 = GraphSequence::fixed(DirectedGraph::directed_cycle(4));
        assert_eq!(coverage_depth(&c4, 0, 20), None);
    }

    #[test]
    fn stats_examples() {
        let s = graph_stats(&DirectedGraph::complete(3));
        assert_eq!(
            s,
            GraphStats {
                min_indegree: 2,
                max_indegree: 2,
                has_isolated: false,
                strongly_connected: true
            }
        );
        let two = DirectedGraph::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        let s = graph_stats(&two);
        assert!(!s.has_isolated && !s.strongly_connected);
        assert!(graph_stats(&DirectedGraph::empty(1)).has_isolated);
    }

    #[test]
    fn random_geometric_examples() {
        let g = gen_random_geometric(2, std::f64::consts::SQRT_2, 1).unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        let a = gen_random_geometric(100, 0.18, 7).unwrap();
        let b = gen_random_geometric(100, 0.18, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!(a.is_connected() && a.is_undirected());
        let one = gen_random_geometric(1, 0.5, 3).unwrap();
        assert_eq!(one.edge_count(), 0);
        assert!(gen_random_geometric(10, 1.5, 3).is_err());
    }

    #[test]
    fn tree_triangle_examples() {
        let g = gen_binary_tree_triangle(2).unwrap();
        assert_eq!(g.node_count(), 7);
        // 6 tree edges both ways plus the chord both ways
        assert_eq!(g.edge_count(), 14);
        assert!(g.has_edge(3, 4) && g.has_edge(4, 3));
        assert!(is_aperiodic(&g).unwrap());
        let k3 = gen_binary_tree_triangle(1).unwrap();
        assert_eq!(k3.edges(), DirectedGraph::complete(3).edges());
    }

    #[test]
    fn grid_failure_examples() {
        let seq = gen_grid_with_failures(2, 2, 0, 1, 3).unwrap();
        let c4 = DirectedGraph::undirected(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]).unwrap();
        for g in seq.graphs() {
            assert_eq!(g.edges(), c4.edges());
        }
        let a = gen_grid_with_failures(3, 3, 1, 11, 20).unwrap();
        let b = gen_grid_with_failures(3, 3, 1, 11, 20).unwrap();
        for (x, y) in a.graphs().zip(b.graphs()) {
            assert_eq!(x.edges(), y.edges());
            assert!(!graph_stats(x).has_isolated);
            assert_eq!(x.edge_count(), 2 * 11);
        }
        let single = gen_grid_with_failures(3, 3, 1, 5, 1).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.at(0).edge_count(), grid(3, 3).unwrap().edge_count() - 2);
    }

    #[test]
    fn self_loops_examples() {
        let k3 = DirectedGraph::complete(3).with_self_loops();
        assert_eq!(k3.edge_count(), 9);
        assert_eq!(k3.with_self_loops().edges(), k3.edges());
        assert!(is_aperiodic(&DirectedGraph::directed_cycle(4).with_self_loops()).unwrap());
    }

    #[test]
    fn weighted_condition_examples() {
        assert!(weighted_condition(&DirectedGraph::complete(3), 0.1));
        let single = DirectedGraph::from_edges(2, vec![Edge::weighted(0, 1, 0.05)], false).unwrap();
        assert!(!weighted_condition(&single, 0.1));
        let three = DirectedGraph::from_edges(4, (1..4).map(|u| Edge::weighted(u, 0, 0.04)).collect(), false).unwrap();
        assert!(weighted_condition(&three, 0.1));
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(
            DirectedGraph::from_pairs(2, &[(0, 1), (0, 1)]),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            DirectedGraph::from_edges(2, vec![Edge::new(1, 1)], false),
            Err(GraphError::SelfLoop(1))
        ));
        assert!(DirectedGraph::from_edges(2, vec![Edge::weighted(0, 1, 0.0)], false).is_err());
        assert!(DirectedGraph::from_pairs(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn edge_list_roundtrip_and_errors() {
        let g = gen_binary_tree_triangle(2).unwrap().with_uniform_weight(0.25).unwrap();
        let back = parse_edge_list(&write_edge_list(&g)).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert!(matches!(
            parse_edge_list("nope\n"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("pco-graph v1 n=2\n0 x 1 1\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn sequence_directory_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let seq = gen_grid_with_failures(3, 3, 1, 2, 4).unwrap();
        write_sequence(dir.path(), &seq).unwrap();
        let back = read_sequence(dir.path()).unwrap();
        assert_eq!(back.len(), 4);
        for (a, b) in seq.graphs().zip(back.graphs()) {
            assert_eq!(a.edges(), b.edges());
        }
    }

    fn small_digraph() -> impl Strategy<Value = DirectedGraph> {
        (2usize..=7, 0.2f64..0.8, any::<u64>()).prop_map(|(n, p, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs: Vec<_> = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|_| rng.gen::<f64>() < p)
                .collect();
            DirectedGraph::from_pairs(n, &pairs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn period_agrees_with_cycle_enumeration(g in small_digraph()) {
            prop_assume!(g.is_strongly_connected());
            prop_assert_eq!(g.period().unwrap(), brute_force_period(&g));
        }

        #[test]
        fn coverage_depth_agrees_with_brute_force(g in small_digraph()) {
            prop_assume!(g.is_strongly_connected());
            let n = g.node_count();
            let d = coverage_depth(&GraphSequence::fixed(g.clone()), 0, n * n);
            prop_assert_eq!(d, brute_force_depth(&g, n * n));
            prop_assert_eq!(d.is_some(), g.period().unwrap() == 1);
        }

        #[test]
        fn grid_failures_never_isolate(w in 2usize..5, h in 2usize..5, seed in any::<u64>()) {
            let seq = gen_grid_with_failures(w, h, 1, seed, 5).unwrap();
            for g in seq.graphs() {
                prop_assert!(!graph_stats(g).has_isolated);
            }
        }
    }
}

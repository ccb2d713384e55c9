//! Optimum-preserving preprocessing.
//!
//! Given a valid lower bound `lb` on η(G, k), a vertex whose neighborhood has
//! clique number at most `lb - 2`, or an edge whose common neighborhood has
//! clique number at most `lb - 3`, lies in no clique of size `lb` and can be
//! deleted without changing η(G, k). The stages below apply that rule with
//! increasingly expensive certificates: degree and common-neighbor counts,
//! greedy colorings, and exact clique searches. Cliques met along the way are
//! collected into a pool that seeds the exact phase.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::time::Instant;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::bounds::estimate_lb;
use crate::clique::{greedy_color_bound, is_clique, max_clique_with, SearchLimits};
use crate::graph::{Graph, Subgraph, Vertex, DENSE_ROW_LIMIT};

/// Per-edge node budget of the exact clique stage.
pub const DEFAULT_EDGE_NODE_BUDGET: u64 = 100_000;

/// Deduplicated cliques of size at least 2, kept in insertion order.
#[derive(Clone, Debug, Default)]
pub struct CliquePool {
    cliques: Vec<Vec<Vertex>>,
    seen: HashSet<Vec<Vertex>>,
}

impl CliquePool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `clique` (any order) unless it is smaller than 2 or already
    /// present. Returns whether it was added.
    pub fn insert(&mut self, mut clique: Vec<Vertex>) -> bool {
        if clique.len() < 2 {
            return false;
        }
        clique.sort_unstable();
        if self.seen.contains(&clique) {
            return false;
        }
        self.seen.insert(clique.clone());
        self.cliques.push(clique);
        true
    }

    pub fn contains(&self, clique: &[Vertex]) -> bool {
        let mut c = clique.to_vec();
        c.sort_unstable();
        self.seen.contains(&c)
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Vertex]> + '_ {
        self.cliques.iter().map(Vec::as_slice)
    }

    fn retain(&mut self, mut keep: impl FnMut(&[Vertex]) -> bool) {
        self.cliques.retain(|c| keep(c));
        self.seen = self.cliques.iter().cloned().collect();
    }

    /// Renames vertices with `f`, dropping cliques that touch an unmapped vertex.
    fn remap(&self, f: impl Fn(Vertex) -> Option<Vertex>) -> CliquePool {
        let mut out = CliquePool::new();
        for c in &self.cliques {
            if let Some(mapped) = c.iter().map(|&v| f(v)).collect::<Option<Vec<_>>>() {
                out.insert(mapped);
            }
        }
        out
    }
}

/// Deletions per rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageCounters {
    pub peel_vertices: usize,
    pub peel_edges: usize,
    pub color_vertices: usize,
    pub color_edges: usize,
    pub exact_edges: usize,
}

impl StageCounters {
    pub fn total(&self) -> usize {
        self.peel_vertices + self.peel_edges + self.color_vertices + self.color_edges + self.exact_edges
    }
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    /// Surviving vertices, relabeled `0..n'`.
    pub reduced_graph: Graph,
    /// `back[v]` is the input id of reduced vertex `v`.
    pub back: Vec<Vertex>,
    /// Cliques of `reduced_graph`, in its ids.
    pub pool: CliquePool,
    pub removed_vertices: usize,
    pub removed_edges: usize,
    pub lb_used: usize,
    pub stage_counters: StageCounters,
}

#[derive(Clone, Copy, Debug)]
pub struct ReduceOptions {
    pub edge_node_budget: u64,
    /// Once passed, the exact stage keeps every unchecked edge.
    pub deadline: Option<Instant>,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            edge_node_budget: DEFAULT_EDGE_NODE_BUDGET,
            deadline: None,
        }
    }
}

/// Mutable graph over the input ids; deleted vertices are marked dead.
struct WorkGraph {
    adj: Vec<BTreeSet<Vertex>>,
    rows: Option<Vec<BitSet>>,
    alive: Vec<bool>,
}

impl WorkGraph {
    fn new(g: &Graph) -> Self {
        WorkGraph {
            adj: (0..g.n()).map(|v| g.neighbors(v).iter().copied().collect()).collect(),
            rows: (g.n() <= DENSE_ROW_LIMIT).then(|| {
                (0..g.n())
                    .map(|v| g.neighbor_bits(v).cloned().expect("rows exist below the limit"))
                    .collect()
            }),
            alive: vec![true; g.n()],
        }
    }

    fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].contains(&v)
    }

    fn remove_edge(&mut self, u: Vertex, v: Vertex) {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
        if let Some(rows) = &mut self.rows {
            rows[u].remove(v);
            rows[v].remove(u);
        }
    }

    fn common(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        match &self.rows {
            Some(rows) => rows[u].intersection(&rows[v]).iter().collect(),
            None => self.adj[u].intersection(&self.adj[v]).copied().collect(),
        }
    }

    fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Induced subgraph on `s` (sorted, alive).
    fn induced(&self, s: &[Vertex]) -> Subgraph {
        let mut local = HashMap::with_capacity(s.len());
        for (i, &v) in s.iter().enumerate() {
            local.insert(v, i);
        }
        let adj = s
            .iter()
            .map(|&v| {
                let mut list: Vec<Vertex> =
                    self.adj[v].iter().filter_map(|w| local.get(w).copied()).collect();
                list.sort_unstable();
                list
            })
            .collect();
        Subgraph {
            graph: Graph::from_adjacency(adj),
            back: s.to_vec(),
        }
    }

    fn into_subgraph(self) -> Subgraph {
        let back: Vec<Vertex> = (0..self.alive.len()).filter(|&v| self.alive[v]).collect();
        let mut local = vec![usize::MAX; self.alive.len()];
        for (i, &v) in back.iter().enumerate() {
            local[v] = i;
        }
        let adj = back
            .iter()
            .map(|&v| self.adj[v].iter().map(|&w| local[w]).collect())
            .collect();
        Subgraph {
            graph: Graph::from_adjacency(adj),
            back,
        }
    }

    fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }
}

#[inline]
fn at_most(value: usize, bound: i64) -> bool {
    (value as i64) <= bound
}

/// Degree and common-neighbor peeling to a fixpoint. The vertex rule runs
/// when `lb >= 3` and the edge rule when `lb >= 4`; below that the
/// thresholds are non-positive and the rules are skipped.
fn peel(w: &mut WorkGraph, lb: usize, counters: &mut StageCounters) {
    let vertex_rule = lb >= 3;
    let edge_rule = lb >= 4;
    let vmax = lb as i64 - 2;
    let emax = lb as i64 - 3;
    if !vertex_rule {
        return;
    }

    let key = |a: Vertex, b: Vertex| if a < b { (a, b) } else { (b, a) };
    let mut support: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    let mut edge_queue: VecDeque<(Vertex, Vertex)> = VecDeque::new();
    if edge_rule {
        for (u, v) in w.edges() {
            let s = w.common(u, v).len();
            support.insert((u, v), s);
            if at_most(s, emax) {
                edge_queue.push_back((u, v));
            }
        }
    }
    let mut vertex_queue: VecDeque<Vertex> = (0..w.alive.len())
        .filter(|&v| w.alive[v] && at_most(w.degree(v), vmax))
        .collect();

    let drop_edge = |w: &mut WorkGraph,
                         support: &mut HashMap<(Vertex, Vertex), usize>,
                         edge_queue: &mut VecDeque<(Vertex, Vertex)>,
                         vertex_queue: &mut VecDeque<Vertex>,
                         u: Vertex,
                         v: Vertex| {
        if edge_rule {
            for x in w.common(u, v) {
                for e in [key(u, x), key(v, x)] {
                    if let Some(s) = support.get_mut(&e) {
                        *s -= 1;
                        if at_most(*s, emax) {
                            edge_queue.push_back(e);
                        }
                    }
                }
            }
            support.remove(&key(u, v));
        }
        w.remove_edge(u, v);
        for x in [u, v] {
            if w.alive[x] && at_most(w.degree(x), vmax) {
                vertex_queue.push_back(x);
            }
        }
    };

    loop {
        if let Some(v) = vertex_queue.pop_front() {
            if !w.alive[v] {
                continue;
            }
            let nbrs: Vec<Vertex> = w.adj[v].iter().copied().collect();
            for x in nbrs {
                drop_edge(w, &mut support, &mut edge_queue, &mut vertex_queue, v, x);
            }
            w.alive[v] = false;
            counters.peel_vertices += 1;
        } else if let Some((u, v)) = edge_queue.pop_front() {
            if !w.has_edge(u, v) {
                continue;
            }
            drop_edge(w, &mut support, &mut edge_queue, &mut vertex_queue, u, v);
            counters.peel_edges += 1;
        } else {
            break;
        }
    }
}

fn kill_vertex(w: &mut WorkGraph, v: Vertex) {
    let nbrs: Vec<Vertex> = w.adj[v].iter().copied().collect();
    for x in nbrs {
        w.remove_edge(v, x);
    }
    w.alive[v] = false;
}

/// Coloring certificates: deletes `u` when its neighborhood colors with at
/// most `lb - 2` colors, then edges whose common neighborhood colors with at
/// most `lb - 3`. Deletions take effect immediately.
fn color_stage(w: &mut WorkGraph, lb: usize, counters: &mut StageCounters) {
    if lb >= 3 {
        for u in 0..w.alive.len() {
            if !w.alive[u] {
                continue;
            }
            let nbrs: Vec<Vertex> = w.adj[u].iter().copied().collect();
            let colors = greedy_color_bound(&w.induced(&nbrs).graph, None);
            if at_most(colors, lb as i64 - 2) {
                kill_vertex(w, u);
                counters.color_vertices += 1;
            }
        }
    }
    if lb >= 4 {
        for (u, v) in w.edges() {
            if !w.has_edge(u, v) {
                continue;
            }
            let common = w.common(u, v);
            let colors = greedy_color_bound(&w.induced(&common).graph, None);
            if at_most(colors, lb as i64 - 3) {
                w.remove_edge(u, v);
                counters.color_edges += 1;
            }
        }
    }
}

/// Exact certificates: for each edge, a (budgeted) maximum clique of the
/// common neighborhood. A proven size of at most `lb - 3` deletes the edge;
/// otherwise the clique plus both endpoints joins the pool.
fn exact_stage(
    w: &mut WorkGraph,
    lb: usize,
    opts: &ReduceOptions,
    pool: &mut CliquePool,
    counters: &mut StageCounters,
) {
    for (u, v) in w.edges() {
        if let Some(d) = opts.deadline {
            if Instant::now() >= d {
                break;
            }
        }
        if !w.has_edge(u, v) {
            continue;
        }
        let common = w.common(u, v);
        let sub = w.induced(&common);
        let result = max_clique_with(
            &sub.graph,
            SearchLimits {
                node_budget: Some(opts.edge_node_budget),
                deadline: opts.deadline,
            },
        );
        if !result.timed_out && at_most(result.size, lb as i64 - 3) {
            w.remove_edge(u, v);
            counters.exact_edges += 1;
        } else {
            let mut clique: Vec<Vertex> = result.clique.iter().map(|&i| sub.back[i]).collect();
            clique.push(u);
            clique.push(v);
            pool.insert(clique);
        }
    }
}

/// Compacted view of a graph after one stage.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub graph: Graph,
    /// `back[v]` is the input id of vertex `v`.
    pub back: Vec<Vertex>,
    pub counters: StageCounters,
}

fn finish(w: WorkGraph, counters: StageCounters) -> Reduced {
    let sub = w.into_subgraph();
    Reduced {
        graph: sub.graph,
        back: sub.back,
        counters,
    }
}

/// Removes vertices of degree at most `lb - 2` and edges with at most
/// `lb - 3` common neighbors until none remain.
pub fn peel_degree(g: &Graph, lb: usize) -> Reduced {
    assert!(lb >= 1);
    let mut w = WorkGraph::new(g);
    let mut counters = StageCounters::default();
    peel(&mut w, lb, &mut counters);
    finish(w, counters)
}

/// One pass of the coloring-certified vertex and edge rules.
pub fn reduce_color(g: &Graph, lb: usize) -> Reduced {
    assert!(lb >= 1);
    let mut w = WorkGraph::new(g);
    let mut counters = StageCounters::default();
    color_stage(&mut w, lb, &mut counters);
    finish(w, counters)
}

/// One pass of the exact edge rule; the pool is in the ids of the returned
/// graph.
pub fn reduce_exact_edges(g: &Graph, lb: usize, node_budget: u64) -> (Reduced, CliquePool) {
    assert!(lb >= 1);
    let mut w = WorkGraph::new(g);
    let mut counters = StageCounters::default();
    let mut pool = CliquePool::new();
    let opts = ReduceOptions {
        edge_node_budget: node_budget,
        deadline: None,
    };
    exact_stage(&mut w, lb, &opts, &mut pool, &mut counters);
    let reduced = finish(w, counters);
    let pool = remap_pool(&pool, &reduced.back, g.n());
    (reduced, pool)
}

fn remap_pool(pool: &CliquePool, back: &[Vertex], n: usize) -> CliquePool {
    let mut local = vec![usize::MAX; n];
    for (i, &v) in back.iter().enumerate() {
        local[v] = i;
    }
    pool.remap(|v| (local[v] != usize::MAX).then_some(local[v]))
}

/// Full preprocessing: lower bound, then peeling, coloring and exact edge
/// stages with peeling re-run after each.
pub fn preprocess(g: &Graph, k: u64) -> ReductionReport {
    preprocess_with(g, k, &ReduceOptions::default())
}

pub fn preprocess_with(g: &Graph, k: u64, opts: &ReduceOptions) -> ReductionReport {
    let lb = estimate_lb(g, k);
    preprocess_with_lb(g, lb, opts)
}

/// Preprocessing with a caller-supplied lower bound, which must not exceed
/// η(g, k) for the reduction to preserve the optimum.
pub fn preprocess_with_lb(g: &Graph, lb: usize, opts: &ReduceOptions) -> ReductionReport {
    let mut w = WorkGraph::new(g);
    let mut counters = StageCounters::default();
    let mut pool = CliquePool::new();
    let m_before = g.m();
    let n_before = g.n();
    if lb >= 1 {
        peel(&mut w, lb, &mut counters);
        color_stage(&mut w, lb, &mut counters);
        peel(&mut w, lb, &mut counters);
        exact_stage(&mut w, lb, opts, &mut pool, &mut counters);
        peel(&mut w, lb, &mut counters);
    }
    let removed_edges = m_before - w.edge_count();
    let removed_vertices = n_before - w.alive_count();
    let reduced = finish(w, counters);
    let mut pool = remap_pool(&pool, &reduced.back, n_before);
    let graph = &reduced.graph;
    pool.retain(|c| is_clique(graph, c));
    ReductionReport {
        reduced_graph: reduced.graph,
        back: reduced.back,
        pool,
        removed_vertices,
        removed_edges,
        lb_used: lb,
        stage_counters: counters,
    }
}

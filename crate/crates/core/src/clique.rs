//! Exact maximum clique and greedy coloring bounds.
//!
//! The exact search is a bitset branch-and-bound in the MCQ/BBMC family:
//! candidates are greedily colored in a fixed initial order (non-increasing
//! degree, ties by id) and a branch is cut as soon as the current clique plus
//! the color count of the remaining candidates cannot beat the incumbent.
//! Graphs with more than [`WHOLE_GRAPH_LIMIT`] vertices are split along a
//! degeneracy order into one small subproblem per vertex.

use std::time::Instant;

use crate::bitset::BitSet;
use crate::graph::{Graph, Vertex};

/// Largest graph searched as a single bitset problem.
pub const WHOLE_GRAPH_LIMIT: usize = 2048;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueResult {
    /// Sorted vertex ids.
    pub clique: Vec<Vertex>,
    pub size: usize,
    pub search_nodes: u64,
    /// Set when a limit stopped the search; `clique` is then only a valid
    /// clique, not necessarily a maximum one.
    pub timed_out: bool,
}

/// Limits for a single search. A node is one branch expansion.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchLimits {
    pub node_budget: Option<u64>,
    pub deadline: Option<Instant>,
}

impl SearchLimits {
    pub fn nodes(budget: u64) -> Self {
        SearchLimits {
            node_budget: Some(budget),
            deadline: None,
        }
    }
}

pub fn max_clique(g: &Graph, node_budget: Option<u64>) -> CliqueResult {
    max_clique_with(
        g,
        SearchLimits {
            node_budget,
            deadline: None,
        },
    )
}

pub fn max_clique_with(g: &Graph, limits: SearchLimits) -> CliqueResult {
    let n = g.n();
    if n == 0 {
        return CliqueResult {
            clique: Vec::new(),
            size: 0,
            search_nodes: 0,
            timed_out: false,
        };
    }
    if g.m() == 0 {
        return CliqueResult {
            clique: vec![0],
            size: 1,
            search_nodes: 0,
            timed_out: false,
        };
    }
    let mut budget = Budget::new(limits);
    let mut clique = if n <= WHOLE_GRAPH_LIMIT {
        let all: Vec<Vertex> = (0..n).collect();
        let local = LocalGraph::new(g, &all);
        let mut search = Search::new(&local, 0, &mut budget);
        search.best = local.greedy_clique();
        search.run();
        let best = search.best;
        best.into_iter().map(|i| local.map[i]).collect()
    } else {
        decomposed(g, &mut budget)
    };
    clique.sort_unstable();
    CliqueResult {
        size: clique.len(),
        clique,
        search_nodes: budget.nodes,
        timed_out: budget.exhausted,
    }
}

/// Per-vertex subproblems along a degeneracy order: each vertex is searched
/// together with its neighbors that come later in the order.
fn decomposed(g: &Graph, budget: &mut Budget) -> Vec<Vertex> {
    let (order, core) = degeneracy(g);
    let mut position = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }

    // Greedy start: walk the order backwards, keep vertices adjacent to all kept.
    let mut best: Vec<Vertex> = Vec::new();
    for &v in order.iter().rev() {
        if best.iter().all(|&w| g.has_edge(v, w)) {
            best.push(v);
        }
    }

    for &v in order.iter().rev() {
        if core[v] < best.len() {
            continue;
        }
        let later: Vec<Vertex> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| position[w] > position[v])
            .collect();
        if later.len() < best.len() {
            continue;
        }
        let local = LocalGraph::new(g, &later);
        let mut search = Search::new(&local, best.len() - 1, budget);
        search.run();
        if search.best.len() + 1 > best.len() {
            let found = search.best;
            best = found.into_iter().map(|i| local.map[i]).collect();
            best.push(v);
        }
        if budget.exhausted {
            break;
        }
    }
    best
}

/// Smallest-last removal order and core numbers.
fn degeneracy(g: &Graph) -> (Vec<Vertex>, Vec<usize>) {
    let n = g.n();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<Vertex>> = vec![Vec::new(); max_degree + 1];
    for v in (0..n).rev() {
        buckets[degree[v]].push(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut core = vec![0; n];
    let mut current = 0;
    let mut low = 0;
    while order.len() < n {
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop().expect("non-empty bucket");
        if removed[v] || degree[v] != low {
            continue;
        }
        removed[v] = true;
        current = current.max(low);
        core[v] = current;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                degree[w] -= 1;
                buckets[degree[w]].push(w);
                if degree[w] < low {
                    low = degree[w];
                }
            }
        }
    }
    (order, core)
}

/// Smallest-last coloring order: reverse of the degeneracy removal order.
pub fn degeneracy_order(g: &Graph) -> Vec<Vertex> {
    let (mut order, _) = degeneracy(g);
    order.reverse();
    order
}

/// Number of colors used by sequential first-fit coloring in `order`
/// (smallest-last order when `None`). An upper bound on χ(g) ≥ ω(g).
pub fn greedy_color_bound(g: &Graph, order: Option<&[Vertex]>) -> usize {
    let default;
    let order = match order {
        Some(o) => o,
        None => {
            default = degeneracy_order(g);
            &default
        }
    };
    let mut color = vec![usize::MAX; g.n()];
    let mut stamp = vec![usize::MAX; g.n() + 1];
    let mut used = 0;
    for &v in order {
        for &w in g.neighbors(v) {
            if color[w] != usize::MAX {
                stamp[color[w]] = v;
            }
        }
        let c = (0..).find(|&c| stamp[c] != v).expect("a free color exists");
        color[v] = c;
        used = used.max(c + 1);
    }
    used
}

/// True iff the members of `s` are pairwise adjacent.
pub fn is_clique(g: &Graph, s: &[Vertex]) -> bool {
    s.iter()
        .enumerate()
        .all(|(i, &a)| s[i + 1..].iter().all(|&b| a != b && g.has_edge(a, b)))
}

struct Budget {
    limits: SearchLimits,
    nodes: u64,
    exhausted: bool,
}

impl Budget {
    fn new(limits: SearchLimits) -> Self {
        Budget {
            limits,
            nodes: 0,
            exhausted: false,
        }
    }

    #[inline]
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if let Some(b) = self.limits.node_budget {
            if self.nodes > b {
                self.exhausted = true;
            }
        }
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.limits.deadline {
                if Instant::now() >= d {
                    self.exhausted = true;
                }
            }
        }
        !self.exhausted
    }
}

/// Bitset copy of an induced subgraph, vertices sorted by non-increasing
/// degree (ties by parent id).
struct LocalGraph {
    rows: Vec<BitSet>,
    map: Vec<Vertex>,
}

impl LocalGraph {
    fn new(g: &Graph, vertices: &[Vertex]) -> Self {
        let k = vertices.len();
        let mut local = vec![usize::MAX; g.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut lists: Vec<Vec<usize>> = vertices
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            lists[b]
                .len()
                .cmp(&lists[a].len())
                .then(vertices[a].cmp(&vertices[b]))
        });
        let mut rank = vec![0; k];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let mut rows = vec![BitSet::new(k); k];
        for (i, list) in lists.iter_mut().enumerate() {
            let row = &mut rows[rank[i]];
            for &j in list.iter() {
                row.insert(rank[j]);
            }
        }
        LocalGraph {
            rows,
            map: order.iter().map(|&i| vertices[i]).collect(),
        }
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    /// First-fit clique in the initial order.
    fn greedy_clique(&self) -> Vec<usize> {
        let mut cand = BitSet::full(self.len());
        let mut clique = Vec::new();
        while let Some(v) = cand.first() {
            clique.push(v);
            cand.intersect_with(&self.rows[v]);
        }
        clique
    }
}

struct Search<'a> {
    graph: &'a LocalGraph,
    best: Vec<usize>,
    /// Only cliques strictly larger than this are of interest.
    floor: usize,
    budget: &'a mut Budget,
}

impl<'a> Search<'a> {
    fn new(graph: &'a LocalGraph, floor: usize, budget: &'a mut Budget) -> Self {
        Search {
            graph,
            best: Vec::new(),
            floor,
            budget,
        }
    }

    fn target(&self) -> usize {
        self.best.len().max(self.floor)
    }

    fn run(&mut self) {
        let n = self.graph.len();
        if n == 0 {
            return;
        }
        let mut clique = Vec::new();
        self.expand(&mut clique, BitSet::full(n));
    }

    /// Greedy coloring of `cand` in index order; returns vertices with color
    /// at least `kmin`, sorted by color.
    fn color_sort(&self, cand: &BitSet, kmin: usize) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = cand.clone();
        let mut verts = Vec::new();
        let mut colors = Vec::new();
        let mut color = 0;
        let mut class = BitSet::new(cand.capacity());
        while !uncolored.is_empty() {
            color += 1;
            class.clone_from(&uncolored);
            while let Some(v) = class.first() {
                class.remove(v);
                class.difference_with(&self.graph.rows[v]);
                uncolored.remove(v);
                if color >= kmin {
                    verts.push(v);
                    colors.push(color);
                }
            }
        }
        (verts, colors)
    }

    fn expand(&mut self, clique: &mut Vec<usize>, mut cand: BitSet) {
        if !self.budget.tick() {
            return;
        }
        let kmin = (self.target() + 1).saturating_sub(clique.len()).max(1);
        let (verts, colors) = self.color_sort(&cand, kmin);
        for idx in (0..verts.len()).rev() {
            if clique.len() + colors[idx] <= self.target() {
                return;
            }
            let v = verts[idx];
            clique.push(v);
            let next = cand.intersection(&self.graph.rows[v]);
            if next.is_empty() {
                if clique.len() > self.target() {
                    self.best = clique.clone();
                }
            } else {
                self.expand(clique, next);
            }
            clique.pop();
            cand.remove(v);
            if self.budget.exhausted {
                return;
            }
        }
    }
}

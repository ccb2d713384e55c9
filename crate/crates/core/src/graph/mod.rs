//! Simple undirected graphs with dense 0-based vertex ids.

mod io;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::bitset::BitSet;

pub use io::{parse_dimacs, parse_edgelist, write_dimacs, ParseStats};

/// Graphs up to this many vertices also keep a bitset adjacency matrix.
pub const DENSE_ROW_LIMIT: usize = 4096;

pub type Vertex = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
}

/// Undirected edge stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: Vertex,
    v: Vertex,
}

impl Edge {
    /// Panics on a self-loop.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        assert_ne!(a, b, "self-loop {a}-{a} is not an edge");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    #[inline]
    pub fn u(&self) -> Vertex {
        self.u
    }

    #[inline]
    pub fn v(&self) -> Vertex {
        self.v
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.u, self.v)
    }
}

/// Ordered set of edges; interdiction and blocking sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EdgeSet(BTreeSet<Edge>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: Edge) -> bool {
        self.0.insert(e)
    }

    pub fn remove(&mut self, e: &Edge) -> bool {
        self.0.remove(e)
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.0.iter()
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = Edge>) {
        self.0.extend(other)
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        EdgeSet(iter.into_iter().collect())
    }
}

impl IntoIterator for EdgeSet {
    type Item = Edge;
    type IntoIter = std::collections::btree_set::IntoIter<Edge>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a EdgeSet {
    type Item = &'a Edge;
    type IntoIter = std::collections::btree_set::Iter<'a, Edge>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Immutable simple undirected graph.
///
/// Neighbor lists are sorted. Graphs with at most [`DENSE_ROW_LIMIT`]
/// vertices additionally carry bitset rows so neighborhood intersections
/// cost O(n/64) words.
#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    rows: Option<Vec<BitSet>>,
    m: usize,
    labels: Option<Vec<u64>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Graph {}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self::from_adjacency(vec![Vec::new(); n])
    }

    /// Builds a graph from an edge list over `0..n`, collapsing duplicates.
    ///
    /// Panics on self-loops or out-of-range endpoints; use the parsers for
    /// untrusted input.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge {a}-{b} out of range for n={n}");
            assert_ne!(a, b, "self-loop on {a}");
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(adj)
    }

    pub fn from_edge_set(n: usize, edges: &EdgeSet) -> Self {
        Self::from_edges(n, edges.iter().map(|e| e.endpoints()))
    }

    /// `adj` must be symmetric, sorted and loop-free.
    pub(crate) fn from_adjacency(adj: Vec<Vec<Vertex>>) -> Self {
        let n = adj.len();
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let rows = (n <= DENSE_ROW_LIMIT).then(|| {
            adj.iter()
                .map(|list| BitSet::from_indices(n, list.iter().copied()))
                .collect()
        });
        Graph {
            adj,
            rows,
            m,
            labels: None,
        }
    }

    /// Attaches source-file labels, one per vertex.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Self {
        assert_eq!(labels.len(), self.n());
        self.labels = Some(labels);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    /// Bitset row of `v`, present for graphs up to [`DENSE_ROW_LIMIT`] vertices.
    #[inline]
    pub fn neighbor_bits(&self, v: Vertex) -> Option<&BitSet> {
        self.rows.as_ref().map(|rows| &rows[v])
    }

    #[inline]
    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        match &self.rows {
            Some(rows) => rows[a].contains(b),
            None => self.adj[a].binary_search(&b).is_ok(),
        }
    }

    /// Label of `v` in the source file; DIMACS convention `v + 1` when the
    /// graph carries no explicit labels.
    pub fn label(&self, v: Vertex) -> u64 {
        match &self.labels {
            Some(l) => l[v],
            None => v as u64 + 1,
        }
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    /// Canonical edges in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let start = list.partition_point(|&w| w <= u);
            list[start..].iter().map(move |&v| Edge { u, v })
        })
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges().collect()
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// `N(u) ∩ N(v)` in increasing order.
    pub fn common_neighbors(&self, u: Vertex, v: Vertex) -> Result<Vec<Vertex>, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        assert_ne!(u, v, "common_neighbors needs two distinct vertices");
        Ok(self.common_neighbors_unchecked(u, v))
    }

    pub(crate) fn common_neighbors_unchecked(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        if let Some(rows) = &self.rows {
            return rows[u].intersection(&rows[v]).iter().collect();
        }
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Residual graph `(V, E \ f)`. Fails if some member of `f` is not an edge.
    pub fn remove_edges(&self, f: &EdgeSet) -> Result<Graph, GraphError> {
        for e in f {
            if e.v >= self.n() || !self.has_edge(e.u, e.v) {
                return Err(GraphError::MissingEdge(*e));
            }
        }
        let mut adj = self.adj.clone();
        for e in f {
            let (u, v) = e.endpoints();
            if let Ok(pos) = adj[u].binary_search(&v) {
                adj[u].remove(pos);
            }
            if let Ok(pos) = adj[v].binary_search(&u) {
                adj[v].remove(pos);
            }
        }
        let mut g = Graph::from_adjacency(adj);
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Graph with `f` added back; the inverse of [`Graph::remove_edges`].
    pub fn add_edges(&self, f: &EdgeSet) -> Result<Graph, GraphError> {
        for e in f {
            self.check_vertex(e.v)?;
        }
        let mut adj = self.adj.clone();
        for e in f {
            let (u, v) = e.endpoints();
            if let Err(pos) = adj[u].binary_search(&v) {
                adj[u].insert(pos, v);
            }
            if let Err(pos) = adj[v].binary_search(&u) {
                adj[v].insert(pos, u);
            }
        }
        let mut g = Graph::from_adjacency(adj);
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Subgraph induced by `s`, relabeled to `0..s.len()` in the order given.
    pub fn induced_subgraph(&self, s: &[Vertex]) -> Result<Subgraph, GraphError> {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in s.iter().enumerate() {
            self.check_vertex(v)?;
            local[v] = i;
        }
        Ok(self.induced_with_map(s, &local))
    }

    /// `local[v]` must be the position of `v` in `s` for members and
    /// `usize::MAX` otherwise.
    pub(crate) fn induced_with_map(&self, s: &[Vertex], local: &[usize]) -> Subgraph {
        let adj: Vec<Vec<Vertex>> = s
            .iter()
            .map(|&v| {
                let mut list: Vec<Vertex> = self.adj[v]
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        Subgraph {
            graph: Graph::from_adjacency(adj),
            back: s.to_vec(),
        }
    }

    /// Symmetry, sortedness, loop-freedom and edge count consistency.
    pub fn check_invariants(&self) -> bool {
        let mut half = 0;
        for (u, list) in self.adj.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &v in list {
                if v == u || v >= self.n() || self.adj[v].binary_search(&u).is_err() {
                    return false;
                }
            }
            half += list.len();
        }
        half % 2 == 0 && half / 2 == self.m
    }
}

/// Induced subgraph plus the map from local ids back to the parent graph.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    pub back: Vec<Vertex>,
}

impl Subgraph {
    pub fn original(&self, local: Vertex) -> Vertex {
        self.back[local]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn edge_is_canonical() {
        let e = Edge::new(5, 2);
        assert_eq!(e.endpoints(), (2, 5));
        assert_eq!(e, Edge::new(2, 5));
    }

    #[test]
    #[should_panic]
    fn edge_rejects_self_loop() {
        let _ = Edge::new(3, 3);
    }

    #[test]
    fn remove_edges_examples() {
        let k3 = generate::complete(3);
        let path = k3.remove_edges(&[Edge::new(0, 1)].into_iter().collect()).unwrap();
        assert_eq!(path.m(), 2);
        assert!(path.check_invariants());

        let k4 = generate::complete(4);
        let matching: EdgeSet = [Edge::new(0, 1), Edge::new(2, 3)].into_iter().collect();
        let c4 = k4.remove_edges(&matching).unwrap();
        assert_eq!(c4.m(), 4);
        assert!(c4.neighbors(0) == [2, 3] && c4.neighbors(1) == [2, 3]);

        assert_eq!(k4.remove_edges(&EdgeSet::new()).unwrap(), k4);
    }

    #[test]
    fn remove_missing_edge_fails() {
        let p = generate::path(3);
        let err = p.remove_edges(&[Edge::new(0, 2)].into_iter().collect());
        assert!(matches!(err, Err(GraphError::MissingEdge(_))));
        let err = p.remove_edges(&[Edge::new(0, 9)].into_iter().collect());
        assert!(matches!(err, Err(GraphError::MissingEdge(_))));
    }

    #[test]
    fn induced_subgraph_examples() {
        let k4 = generate::complete(4);
        let sub = k4.induced_subgraph(&[0, 2, 3]).unwrap();
        assert_eq!(sub.graph, generate::complete(3));
        assert_eq!(sub.original(1), 2);

        let empty = k4.induced_subgraph(&[]).unwrap();
        assert_eq!((empty.graph.n(), empty.graph.m()), (0, 0));

        let c5 = generate::cycle(5);
        let e = c5.induced_subgraph(&[3, 4]).unwrap();
        assert_eq!(e.graph.m(), 1);

        assert!(matches!(
            k4.induced_subgraph(&[0, 4]),
            Err(GraphError::VertexOutOfRange { vertex: 4, n: 4 })
        ));
    }

    #[test]
    fn common_neighbors_examples() {
        let k4 = generate::complete(4);
        assert_eq!(k4.common_neighbors(0, 2).unwrap(), vec![1, 3]);
        let c5 = generate::cycle(5);
        assert!(c5.common_neighbors(0, 1).unwrap().is_empty());
        let k5 = generate::complete(5);
        let k5_minus = k5.remove_edges(&[Edge::new(1, 3)].into_iter().collect()).unwrap();
        assert_eq!(k5_minus.common_neighbors(1, 3).unwrap(), vec![0, 2, 4]);
    }

    #[test]
    fn sparse_path_matches_dense_path() {
        let g = generate::gnp(DENSE_ROW_LIMIT + 5, 0.001, 3);
        assert!(g.neighbor_bits(0).is_none());
        assert!(g.check_invariants());
        for e in g.edges().take(200) {
            assert!(g.has_edge(e.v(), e.u()));
            let common = g.common_neighbors(e.u(), e.v()).unwrap();
            for w in common {
                assert!(g.has_edge(e.u(), w) && g.has_edge(e.v(), w));
            }
        }
    }
}

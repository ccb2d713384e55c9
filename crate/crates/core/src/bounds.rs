//! Cheap bounds on η(G, k).
//!
//! The lower bound packs the graph into vertex-disjoint cliques and solves
//! the interdiction problem exactly on that packing; the upper bound removes
//! random edges from successive maximum cliques and reports the clique
//! number of what is left.

use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clique::{max_clique_with, SearchLimits};
use crate::graph::{Edge, EdgeSet, Graph, Vertex};
use crate::turan::gamma_clq_inverse_le;
use crate::Interrupted;

/// Vertex-disjoint cliques covering every vertex.
#[derive(Clone, Debug)]
pub struct DisjointCliqueCover {
    pub cliques: Vec<Vec<Vertex>>,
    /// Size of the largest member.
    pub delta: usize,
    /// Adjacency tests spent building the cover.
    pub adjacency_tests: u64,
}

/// First-fit cover: vertices in id order join the first clique (in creation
/// order) they are fully adjacent to, else start a new one.
pub fn disjoint_clique_cover(g: &Graph) -> DisjointCliqueCover {
    let mut cliques: Vec<Vec<Vertex>> = Vec::new();
    let mut tests = 0u64;
    for v in 0..g.n() {
        let mut home = None;
        for (ci, c) in cliques.iter().enumerate() {
            let mut fits = true;
            for &w in c {
                tests += 1;
                if !g.has_edge(v, w) {
                    fits = false;
                    break;
                }
            }
            if fits {
                home = Some(ci);
                break;
            }
        }
        match home {
            Some(ci) => cliques[ci].push(v),
            None => cliques.push(vec![v]),
        }
    }
    let delta = cliques.iter().map(Vec::len).max().unwrap_or(0);
    DisjointCliqueCover {
        cliques,
        delta,
        adjacency_tests: tests,
    }
}

/// Lower bound on η(g, k): the smallest `p` for which the disjoint clique
/// cover can be brought to clique number `p` with at most `k` deletions.
pub fn estimate_lb(g: &Graph, k: u64) -> usize {
    let cover = disjoint_clique_cover(g);
    if cover.delta == 0 {
        return 0;
    }
    let sizes: Vec<usize> = cover.cliques.iter().map(Vec::len).collect();
    gamma_clq_inverse_le(&sizes, k, cover.delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UbStep {
    /// Edges removed in this round.
    pub removed: usize,
    /// Clique number after the removal.
    pub clique_size: usize,
}

/// Witness of the heuristic upper bound.
#[derive(Clone, Debug)]
pub struct UbTrace {
    pub removed: EdgeSet,
    pub final_clique_size: usize,
    pub iterations: Vec<UbStep>,
}

/// Upper bound on η(g, k) from adaptive random edge removal.
///
/// Each round removes `r` random edges of the current maximum clique, with
/// `r` capped by the clique's edge count and the remaining budget; `r`
/// doubles while the clique number stalls and resets to 1 when it drops.
/// The returned bound is the clique number of the final residual graph.
pub fn estimate_ub(g: &Graph, k: u64, seed: u64) -> (usize, UbTrace) {
    estimate_ub_until(g, k, seed, None).expect("no deadline set")
}

pub(crate) fn estimate_ub_until(
    g: &Graph,
    k: u64,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<(usize, UbTrace), Interrupted> {
    let limits = SearchLimits {
        node_budget: None,
        deadline,
    };
    let exact = |h: &Graph| {
        let r = max_clique_with(h, limits);
        if r.timed_out {
            Err(Interrupted)
        } else {
            Ok(r.clique)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = g.clone();
    let mut clique = exact(&current)?;
    let mut remaining = k;
    let mut r: u64 = 1;
    let mut removed = EdgeSet::new();
    let mut iterations = Vec::new();

    while remaining > 0 && clique.len() >= 2 {
        let clique_edges: Vec<Edge> = clique
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| clique[i + 1..].iter().map(move |&b| Edge::new(a, b)))
            .collect();
        let take = r.min(clique_edges.len() as u64).min(remaining) as usize;
        let picked: EdgeSet = index::sample(&mut rng, clique_edges.len(), take)
            .into_iter()
            .map(|i| clique_edges[i])
            .collect();
        current = current
            .remove_edges(&picked)
            .expect("clique edges are present in the current graph");
        removed.extend(picked);
        remaining -= take as u64;

        let next = exact(&current)?;
        iterations.push(UbStep {
            removed: take,
            clique_size: next.len(),
        });
        r = if next.len() == clique.len() {
            (2 * r).min(next.len() as u64)
        } else {
            1
        };
        clique = next;
    }

    let size = clique.len();
    Ok((
        size,
        UbTrace {
            removed,
            final_clique_size: size,
            iterations,
        },
    ))
}

//! Brute-force reference solvers for small graphs.
//!
//! These enumerate edge subsets directly and refuse inputs beyond their
//! limits instead of truncating. They exist for testing and verification,
//! not for production solving.

use thiserror::Error;

use crate::graph::{Edge, EdgeSet, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    /// Edge limit for [`brute_ebcp`], whose depth is not known in advance.
    pub max_edges: usize,
    /// Maximum number of edge subsets examined by one call.
    pub subset_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: 14,
            max_edges: 18,
            subset_budget: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} vertices, oracle limit is {limit}")]
    TooManyVertices { n: usize, limit: usize },
    #[error("graph has {m} edges, oracle limit is {limit}")]
    TooManyEdges { m: usize, limit: usize },
    #[error("enumeration needs {needed} subsets, oracle budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
}

fn check_vertices(g: &Graph, limits: &OracleLimits) -> Result<(), OracleError> {
    if g.n() > limits.max_vertices {
        return Err(OracleError::TooManyVertices {
            n: g.n(),
            limit: limits.max_vertices,
        });
    }
    Ok(())
}

/// Binomial coefficient, saturating at `u64::MAX`.
fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Adjacency as bitmasks over at most 64 vertices.
fn masks(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | (1 << w)))
        .collect()
}

/// Largest clique by exhaustive extension: every clique is grown from its
/// smallest vertex through candidates adjacent to all members.
fn omega_masks(adj: &[u64]) -> usize {
    fn grow(adj: &[u64], size: usize, cand: u64, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            grow(adj, size + 1, rest & adj[v], best);
        }
    }
    let all = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    let mut best = 0;
    grow(adj, 0, all, &mut best);
    best
}

/// ω(g) by exhaustive search.
pub fn brute_omega(g: &Graph) -> Result<usize, OracleError> {
    brute_omega_with(g, &OracleLimits::default())
}

pub fn brute_omega_with(g: &Graph, limits: &OracleLimits) -> Result<usize, OracleError> {
    check_vertices(g, limits)?;
    assert!(g.n() <= 64, "oracle bitmasks hold at most 64 vertices");
    Ok(omega_masks(&masks(g)))
}

/// Calls `visit` on every `j`-subset of `0..m` (as index slices) until it
/// returns true. Returns whether it stopped early.
fn for_each_subset(m: usize, j: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    let mut idx: Vec<usize> = (0..j).collect();
    if j > m {
        return false;
    }
    loop {
        if visit(&idx) {
            return true;
        }
        let Some(pos) = (0..j).rev().find(|&i| idx[i] != i + m - j) else {
            return false;
        };
        idx[pos] += 1;
        for i in pos + 1..j {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

fn residual_omega(adj: &[u64], edges: &[Edge], picked: &[usize], scratch: &mut Vec<u64>) -> usize {
    scratch.clear();
    scratch.extend_from_slice(adj);
    for &i in picked {
        let (u, v) = edges[i].endpoints();
        scratch[u] &= !(1 << v);
        scratch[v] &= !(1 << u);
    }
    omega_masks(scratch)
}

/// η(g, k) and an optimal deletion set, by enumerating every edge subset of
/// size at most `k`, smallest first.
pub fn brute_eicp(g: &Graph, k: u64) -> Result<(usize, EdgeSet), OracleError> {
    brute_eicp_with(g, k, &OracleLimits::default())
}

pub fn brute_eicp_with(
    g: &Graph,
    k: u64,
    limits: &OracleLimits,
) -> Result<(usize, EdgeSet), OracleError> {
    check_vertices(g, limits)?;
    let m = g.m() as u64;
    let top = k.min(m);
    let needed = (0..=top).fold(0u64, |acc, j| acc.saturating_add(binomial(m, j)));
    if needed > limits.subset_budget {
        return Err(OracleError::BudgetExceeded {
            needed,
            budget: limits.subset_budget,
        });
    }
    let adj = masks(g);
    let edges: Vec<Edge> = g.edges().collect();
    let mut scratch = Vec::with_capacity(adj.len());
    let mut best = omega_masks(&adj);
    let mut best_set: Vec<usize> = Vec::new();
    // No residual of a nonempty graph goes below 1.
    let floor = usize::from(g.n() > 0);
    for j in 1..=top as usize {
        if best <= floor {
            break;
        }
        for_each_subset(edges.len(), j, |picked| {
            let w = residual_omega(&adj, &edges, picked, &mut scratch);
            if w < best {
                best = w;
                best_set = picked.to_vec();
            }
            best <= floor
        });
    }
    Ok((best, best_set.iter().map(|&i| edges[i]).collect()))
}

/// γ(g, p): fewest deletions leaving clique number at most `p`, with a
/// witness. Enumerates subset sizes upward and stops at the first success.
pub fn brute_ebcp(g: &Graph, p: usize) -> Result<(u64, EdgeSet), OracleError> {
    brute_ebcp_with(g, p, &OracleLimits::default())
}

pub fn brute_ebcp_with(
    g: &Graph,
    p: usize,
    limits: &OracleLimits,
) -> Result<(u64, EdgeSet), OracleError> {
    assert!(p >= 1, "clique bound must be at least 1");
    check_vertices(g, limits)?;
    if g.m() > limits.max_edges {
        return Err(OracleError::TooManyEdges {
            m: g.m(),
            limit: limits.max_edges,
        });
    }
    let adj = masks(g);
    let edges: Vec<Edge> = g.edges().collect();
    let m = edges.len();
    let mut scratch = Vec::with_capacity(adj.len());
    let mut spent = 0u64;
    for j in 0..=m {
        spent = spent.saturating_add(binomial(m as u64, j as u64));
        if spent > limits.subset_budget {
            return Err(OracleError::BudgetExceeded {
                needed: spent,
                budget: limits.subset_budget,
            });
        }
        let mut found = None;
        for_each_subset(m, j, |picked| {
            if residual_omega(&adj, &edges, picked, &mut scratch) <= p {
                found = Some(picked.to_vec());
                true
            } else {
                false
            }
        });
        if let Some(set) = found {
            return Ok((j as u64, set.iter().map(|&i| edges[i]).collect()));
        }
    }
    unreachable!("deleting every edge leaves clique number at most 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::max_clique;
    use crate::generate;

    #[test]
    fn omega_examples() {
        assert_eq!(brute_omega(&generate::complete(6)), Ok(6));
        assert_eq!(brute_omega(&generate::cycle(4)), Ok(2));
        assert_eq!(brute_omega(&Graph::empty(3)), Ok(1));
        assert_eq!(brute_omega(&Graph::empty(0)), Ok(0));
        let g = generate::gnp(8, 0.5, 1);
        assert_eq!(brute_omega(&g).unwrap(), max_clique(&g, None).size);
    }

    #[test]
    fn eicp_examples() {
        let k4 = generate::complete(4);
        assert_eq!(brute_eicp(&k4, 2).unwrap().0, 2);
        assert_eq!(brute_eicp(&k4, 1).unwrap().0, 3);
        let g = generate::gnp(9, 0.6, 4);
        assert_eq!(brute_eicp(&g, 0).unwrap(), (max_clique(&g, None).size, EdgeSet::new()));
        let (eta, f) = brute_eicp(&k4, 100).unwrap();
        assert_eq!(eta, 1);
        assert_eq!(f.len(), 6);
    }

    #[test]
    fn ebcp_examples() {
        assert_eq!(brute_ebcp(&generate::complete(4), 3).unwrap().0, 1);
        assert_eq!(brute_ebcp(&generate::complete(5), 2).unwrap().0, 4);
        assert_eq!(brute_ebcp(&generate::complete(3), 2).unwrap().0, 1);
        assert_eq!(brute_ebcp(&generate::cycle(5), 2).unwrap().0, 0);
    }

    #[test]
    fn witnesses_verify() {
        let g = generate::gnp(8, 0.7, 2);
        let (eta, f) = brute_eicp(&g, 3).unwrap();
        assert!(f.len() <= 3);
        assert_eq!(brute_omega(&g.remove_edges(&f).unwrap()).unwrap(), eta);
        let small = generate::gnp(7, 0.6, 3);
        let (gamma, f) = brute_ebcp(&small, 2).unwrap();
        assert_eq!(f.len() as u64, gamma);
        assert!(brute_omega(&small.remove_edges(&f).unwrap()).unwrap() <= 2);
    }

    #[test]
    fn refuses_oversized_inputs() {
        assert!(matches!(
            brute_omega(&Graph::empty(15)),
            Err(OracleError::TooManyVertices { n: 15, limit: 14 })
        ));
        assert!(matches!(
            brute_ebcp(&generate::complete(7), 2),
            Err(OracleError::TooManyEdges { m: 21, limit: 18 })
        ));
        let tight = OracleLimits {
            subset_budget: 10,
            ..OracleLimits::default()
        };
        assert!(matches!(
            brute_eicp_with(&generate::complete(5), 2, &tight),
            Err(OracleError::BudgetExceeded { needed: 56, budget: 10 })
        ));
    }

    #[test]
    fn subset_enumeration_counts() {
        for m in 0..8 {
            for j in 0..=m {
                let mut count = 0u64;
                for_each_subset(m, j, |_| {
                    count += 1;
                    false
                });
                assert_eq!(count, binomial(m as u64, j as u64));
            }
        }
    }
}

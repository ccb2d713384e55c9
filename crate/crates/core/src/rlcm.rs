//! Exact solver for η(G, k).
//!
//! The driver reduces the graph, brackets η between a cheap lower and upper
//! bound, then walks the clique bound `p` downward. For each `p` it asks the
//! block solver for a blocking set of at most `k` edges that meets every
//! known clique constraint. If none exists, η = p + 1. Otherwise the
//! residual maximum clique either certifies the blocking set (and `p` drops
//! below its size) or becomes a new constraint.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::block::{BlockModel, BlockStatus, SolveGoal, SolveParams};
use crate::bounds::{estimate_lb, estimate_ub_until};
use crate::clique::{max_clique_with, CliqueResult, SearchLimits};
use crate::graph::{Edge, EdgeSet, Graph, Vertex};
use crate::reduce::{peel_degree, preprocess_with_lb, CliquePool, ReduceOptions, StageCounters};

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub seed: u64,
    pub time_limit: Option<Duration>,
    pub disable_reduce: bool,
    pub disable_ub: bool,
    pub disable_ordering_cuts: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Solved,
    /// Stopped at the time limit; `eta` and `lb` bracket the optimum.
    Timeout,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionSummary {
    pub vertices_removed: usize,
    pub edges_removed: usize,
    pub stages: StageCounters,
}

/// One block-solver call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Iteration {
    pub p: usize,
    pub variables: usize,
    pub constraints: usize,
    pub nodes: u64,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Blocking set certified; `p` moves below the residual clique number.
    Accepted,
    /// Residual clique too large; added as a constraint.
    Separated,
    /// No blocking set within budget.
    Exceeds,
    Interrupted,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// η(G, k) when solved, the best upper bound found otherwise.
    pub eta: usize,
    pub k: u64,
    /// Deleted edges in input vertex ids.
    pub witness: EdgeSet,
    pub lb: usize,
    pub ub: usize,
    pub reduction: ReductionSummary,
    pub iterations: Vec<Iteration>,
    pub wall_time: Duration,
    pub status: SolveStatus,
    pub nodes: u64,
    /// Cliques added to a model by separation.
    pub cuts: usize,
    pub seed: u64,
}

struct Clock {
    deadline: Option<Instant>,
}

impl Clock {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn clique(&self, g: &Graph) -> Option<CliqueResult> {
        let r = max_clique_with(
            g,
            SearchLimits {
                node_budget: None,
                deadline: self.deadline,
            },
        );
        (!r.timed_out).then_some(r)
    }
}

/// Adds the cover constraint of `clique` and, unless disabled, two ordering
/// constraints: a random order and its reverse.
fn add_clique(
    model: &mut BlockModel<'_>,
    clique: &[Vertex],
    p: usize,
    orderings: bool,
    rng: &mut ChaCha8Rng,
) {
    model
        .add_cover(clique, p)
        .expect("pool members are cliques of the working graph");
    if orderings && clique.len() > p {
        let mut order = clique.to_vec();
        order.shuffle(rng);
        model.add_ordering(&order, p).expect("clique ordering");
        order.reverse();
        model.add_ordering(&order, p).expect("clique ordering");
    }
}

/// Computes η(g, k) with a witness deletion set.
pub fn solve_eicp(g: &Graph, k: u64, opts: &SolveOptions) -> SolveReport {
    let start = Instant::now();
    let clock = Clock {
        deadline: opts.time_limit.map(|t| start + t),
    };
    let mut report = SolveReport {
        eta: 0,
        k,
        witness: EdgeSet::new(),
        lb: 0,
        ub: 0,
        reduction: ReductionSummary::default(),
        iterations: Vec::new(),
        wall_time: Duration::ZERO,
        status: SolveStatus::Solved,
        nodes: 0,
        cuts: 0,
        seed: opts.seed,
    };
    let finish = |mut r: SolveReport, witness: &EdgeSet, back: &[Vertex]| {
        r.witness = witness
            .iter()
            .map(|e| Edge::new(back[e.u()], back[e.v()]))
            .collect();
        r.wall_time = start.elapsed();
        r
    };
    if g.n() == 0 {
        return finish(report, &EdgeSet::new(), &[]);
    }

    let lb = estimate_lb(g, k);
    report.lb = lb;
    let (work, back, mut pool) = if opts.disable_reduce {
        (g.clone(), (0..g.n()).collect::<Vec<_>>(), CliquePool::new())
    } else {
        let rep = preprocess_with_lb(
            g,
            lb,
            &ReduceOptions {
                deadline: clock.deadline,
                ..ReduceOptions::default()
            },
        );
        report.reduction = ReductionSummary {
            vertices_removed: rep.removed_vertices,
            edges_removed: rep.removed_edges,
            stages: rep.stage_counters,
        };
        (rep.reduced_graph, rep.back, rep.pool)
    };

    // Upper bound and its witness, in working ids.
    let (ub, mut witness) = if opts.disable_ub {
        match clock.clique(&work) {
            Some(c) => (c.size, EdgeSet::new()),
            None => {
                report.status = SolveStatus::Timeout;
                report.eta = g.n();
                report.ub = g.n();
                return finish(report, &EdgeSet::new(), &back);
            }
        }
    } else {
        match estimate_ub_until(&work, k, opts.seed, clock.deadline) {
            Ok((ub, trace)) => (ub, trace.removed),
            Err(_) => {
                report.status = SolveStatus::Timeout;
                report.eta = g.n();
                report.ub = g.n();
                return finish(report, &EdgeSet::new(), &back);
            }
        }
    };
    report.ub = ub;
    let mut upper = ub;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let orderings = !opts.disable_ordering_cuts;

    let mut p = ub.saturating_sub(1);
    'outer: while p >= lb.max(1) {
        let mut model = BlockModel::new(&work);
        model.set_cutoff(Some(k));
        for clique in pool.iter() {
            if clique.len() > p {
                add_clique(&mut model, clique, p, orderings, &mut rng);
            }
        }
        let mut last = witness.clone();
        loop {
            let sol = model.solve_with(&SolveParams {
                goal: SolveGoal::WithinCutoff,
                node_limit: None,
                deadline: clock.deadline,
                warm_start: Some(&last),
            });
            report.nodes += sol.nodes;
            let mut log = Iteration {
                p,
                variables: model.num_vars(),
                constraints: model.num_constraints(),
                nodes: sol.nodes,
                outcome: Outcome::Interrupted,
            };
            match sol.status {
                BlockStatus::Exceeds | BlockStatus::Infeasible => {
                    log.outcome = Outcome::Exceeds;
                    report.iterations.push(log);
                    break 'outer;
                }
                BlockStatus::Interrupted => {
                    report.iterations.push(log);
                    report.status = SolveStatus::Timeout;
                    break 'outer;
                }
                BlockStatus::Optimal | BlockStatus::Feasible => {}
            }
            let residual = work
                .remove_edges(&sol.blocked)
                .expect("model variables are edges of the working graph");
            let Some(c) = clock.clique(&residual) else {
                report.iterations.push(log);
                report.status = SolveStatus::Timeout;
                break 'outer;
            };
            if c.size <= p {
                log.outcome = Outcome::Accepted;
                report.iterations.push(log);
                witness = sol.blocked;
                upper = c.size;
                pool.insert(c.clique);
                p = c.size.saturating_sub(1);
                continue 'outer;
            }
            log.outcome = Outcome::Separated;
            report.iterations.push(log);
            add_clique(&mut model, &c.clique, p, orderings, &mut rng);
            pool.insert(c.clique);
            report.cuts += 1;
            last = sol.blocked;
            if clock.expired() {
                report.status = SolveStatus::Timeout;
                break 'outer;
            }
        }
    }
    report.eta = upper;
    finish(report, &witness, &back)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EbcpOptions {
    pub seed: u64,
    /// Give up once the minimum provably exceeds this many deletions.
    pub cutoff: Option<u64>,
    pub time_limit: Option<Duration>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EbcpStatus {
    Solved,
    /// γ(G, p) is larger than the cutoff.
    ExceedsCutoff,
    Timeout,
}

#[derive(Clone, Debug)]
pub struct EbcpReport {
    /// γ(G, p) when solved.
    pub gamma: Option<u64>,
    /// Deleted edges in input vertex ids.
    pub witness: EdgeSet,
    pub status: EbcpStatus,
    pub nodes: u64,
    pub cuts: usize,
    pub wall_time: Duration,
}

/// Computes γ(g, p), the fewest deletions leaving clique number at most `p`.
pub fn solve_ebcp(g: &Graph, p: usize, opts: &EbcpOptions) -> EbcpReport {
    assert!(p >= 1, "clique bound must be at least 1");
    let start = Instant::now();
    let clock = Clock {
        deadline: opts.time_limit.map(|t| start + t),
    };
    // Vertices and edges outside every (p+1)-clique never need blocking.
    let reduced = peel_degree(g, p + 1);
    let work = reduced.graph;
    let back = reduced.back;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = EbcpReport {
        gamma: None,
        witness: EdgeSet::new(),
        status: EbcpStatus::Timeout,
        nodes: 0,
        cuts: 0,
        wall_time: Duration::ZERO,
    };
    let mut model = BlockModel::new(&work);
    model.set_cutoff(opts.cutoff);
    let mut last = EdgeSet::new();
    loop {
        let sol = model.solve_with(&SolveParams {
            goal: SolveGoal::Minimize,
            node_limit: None,
            deadline: clock.deadline,
            warm_start: Some(&last),
        });
        report.nodes += sol.nodes;
        match sol.status {
            BlockStatus::Exceeds | BlockStatus::Infeasible => {
                report.status = EbcpStatus::ExceedsCutoff;
                break;
            }
            BlockStatus::Interrupted => break,
            BlockStatus::Optimal | BlockStatus::Feasible => {}
        }
        let residual = work
            .remove_edges(&sol.blocked)
            .expect("model variables are edges of the working graph");
        let Some(c) = clock.clique(&residual) else { break };
        if c.size <= p {
            report.gamma = Some(sol.objective);
            report.witness = sol
                .blocked
                .iter()
                .map(|e| Edge::new(back[e.u()], back[e.v()]))
                .collect();
            report.status = EbcpStatus::Solved;
            break;
        }
        add_clique(&mut model, &c.clique, p, true, &mut rng);
        report.cuts += 1;
        last = sol.blocked;
    }
    report.wall_time = start.elapsed();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::max_clique;
    use crate::generate;

    fn verify(g: &Graph, k: u64, r: &SolveReport) {
        assert_eq!(r.status, SolveStatus::Solved);
        assert!(r.witness.len() as u64 <= k);
        let residual = g.remove_edges(&r.witness).unwrap();
        assert_eq!(max_clique(&residual, None).size, r.eta);
        assert!(r.lb <= r.eta && r.eta <= r.ub);
    }

    #[test]
    fn eicp_examples() {
        let k5 = generate::complete(5);
        let r = solve_eicp(&k5, 4, &SolveOptions::default());
        assert_eq!(r.eta, 2);
        assert_eq!(r.witness.len(), 4);
        verify(&k5, 4, &r);

        let g = generate::gnp(30, 0.5, 9);
        let r = solve_eicp(&g, 0, &SolveOptions::default());
        assert_eq!(r.eta, max_clique(&g, None).size);
        assert!(r.witness.is_empty());

        let small = generate::gnp(9, 0.6, 2);
        let r = solve_eicp(&small, small.m() as u64, &SolveOptions::default());
        assert_eq!(r.eta, 1);
        verify(&small, small.m() as u64, &r);

        let r = solve_eicp(&Graph::empty(0), 3, &SolveOptions::default());
        assert_eq!(r.eta, 0);
    }

    #[test]
    fn every_ablation_agrees() {
        let g = generate::gnp(14, 0.6, 5);
        for k in 0..6 {
            let base = solve_eicp(&g, k, &SolveOptions::default());
            verify(&g, k, &base);
            for opts in [
                SolveOptions { disable_reduce: true, ..Default::default() },
                SolveOptions { disable_ub: true, ..Default::default() },
                SolveOptions { disable_ordering_cuts: true, ..Default::default() },
            ] {
                let r = solve_eicp(&g, k, &opts);
                verify(&g, k, &r);
                assert_eq!(r.eta, base.eta, "k={k} {opts:?}");
            }
        }
    }

    #[test]
    fn ebcp_examples() {
        let o = EbcpOptions::default();
        let c5 = solve_ebcp(&generate::cycle(5), 2, &o);
        assert_eq!((c5.gamma, c5.witness.len()), (Some(0), 0));
        assert_eq!(solve_ebcp(&generate::complete(4), 2, &o).gamma, Some(2));
        assert_eq!(solve_ebcp(&generate::complete(5), 2, &o).gamma, Some(4));
        assert_eq!(solve_ebcp(&generate::complete(5), 1, &o).gamma, Some(10));
        let capped = solve_ebcp(
            &generate::complete(5),
            1,
            &EbcpOptions { cutoff: Some(9), ..o },
        );
        assert_eq!(capped.status, EbcpStatus::ExceedsCutoff);
    }

    #[test]
    fn zero_time_limit_reports_timeout() {
        let g = generate::gnp(60, 0.7, 1);
        let r = solve_eicp(
            &g,
            10,
            &SolveOptions {
                time_limit: Some(Duration::ZERO),
                ..Default::default()
            },
        );
        assert_eq!(r.status, SolveStatus::Timeout);
        assert!(r.lb <= r.eta);
    }
}

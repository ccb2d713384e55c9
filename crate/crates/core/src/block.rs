//! Exact minimum edge blocking over a partial clique model.
//!
//! A [`BlockModel`] holds one binary variable per edge that occurs in some
//! constraint and two constraint families:
//!
//! * cover constraints: at least `γ_clq(|C|, p)` edges of clique `C` blocked;
//! * ordering constraints: for an ordering of clique `C`, call a vertex
//!   *open* when none of its edges to later vertices is blocked. At most `p`
//!   vertices may be open (the last vertex always is).
//!
//! Open vertices of an ordering are pairwise adjacent after blocking, so
//! every blocking set that leaves `C` with clique number at most `p`
//! satisfies the ordering constraint; the constraint only removes spurious
//! solutions.
//!
//! Both families are "hit at least `need` of these disjoint groups of
//! variables" constraints: cover groups are single edges, ordering groups are
//! the outgoing edge sets of all but the last vertex with `need = |C| - p`.
//! The solver is a depth-first branch-and-bound on that common form with
//! unit propagation and a greedy fractional packing lower bound.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::time::Instant;

use thiserror::Error;

use crate::clique::is_clique;
use crate::graph::{Edge, EdgeSet, Graph, Vertex};
use crate::turan::gamma_clq;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("vertices {0:?} do not form a clique")]
    NotAClique(Vec<Vertex>),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("vertex {0} repeated in ordering")]
    RepeatedVertex(Vertex),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverConstraint {
    /// Sorted clique vertices.
    pub source_clique: Vec<Vertex>,
    /// All edges of the clique.
    pub support: EdgeSet,
    pub rhs: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingConstraint {
    pub order: Vec<Vertex>,
    pub p: usize,
}

impl OrderingConstraint {
    /// Open vertices (no blocked edge to a later vertex) under `blocked`.
    pub fn open_count(&self, blocked: &EdgeSet) -> usize {
        self.order
            .iter()
            .enumerate()
            .filter(|&(i, &u)| {
                self.order[i + 1..]
                    .iter()
                    .all(|&v| !blocked.contains(&Edge::new(u, v)))
            })
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockStatus {
    /// Minimum found, within the cutoff when one is set.
    Optimal,
    /// A solution within the cutoff; minimality not established.
    Feasible,
    /// Proven: every solution blocks more than `cutoff` edges.
    Exceeds,
    /// No assignment satisfies the constraints.
    Infeasible,
    /// Stopped by a node or time limit before a conclusion.
    Interrupted,
}

#[derive(Clone, Debug)]
pub struct BlockSolution {
    pub status: BlockStatus,
    pub blocked: EdgeSet,
    pub objective: u64,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolveGoal {
    /// Prove a minimum.
    #[default]
    Minimize,
    /// Stop at the first solution within the cutoff.
    WithinCutoff,
}

#[derive(Clone, Debug, Default)]
pub struct SolveParams<'a> {
    pub goal: SolveGoal,
    pub node_limit: Option<u64>,
    pub deadline: Option<Instant>,
    /// Blocked edges to try first when building the starting incumbent.
    pub warm_start: Option<&'a EdgeSet>,
}

/// Partial blocking model over the edges of a working graph.
#[derive(Clone, Debug)]
pub struct BlockModel<'g> {
    graph: &'g Graph,
    vars: Vec<Edge>,
    var_of: HashMap<Edge, usize>,
    covers: Vec<CoverConstraint>,
    orderings: Vec<OrderingConstraint>,
    seen_covers: HashSet<(Vec<Vertex>, u64)>,
    seen_orders: HashSet<(Vec<Vertex>, usize)>,
    cutoff: Option<u64>,
}

impl<'g> BlockModel<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        BlockModel {
            graph,
            vars: Vec::new(),
            var_of: HashMap::new(),
            covers: Vec::new(),
            orderings: Vec::new(),
            seen_covers: HashSet::new(),
            seen_orders: HashSet::new(),
            cutoff: None,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Largest acceptable objective; `None` means unbounded.
    pub fn set_cutoff(&mut self, cutoff: Option<u64>) {
        self.cutoff = cutoff;
    }

    pub fn cutoff(&self) -> Option<u64> {
        self.cutoff
    }

    pub fn covers(&self) -> &[CoverConstraint] {
        &self.covers
    }

    pub fn orderings(&self) -> &[OrderingConstraint] {
        &self.orderings
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.covers.len() + self.orderings.len()
    }

    fn check_clique(&self, vertices: &[Vertex]) -> Result<(), ModelError> {
        let mut seen = HashSet::new();
        for &v in vertices {
            if v >= self.graph.n() {
                return Err(ModelError::VertexOutOfRange(v));
            }
            if !seen.insert(v) {
                return Err(ModelError::RepeatedVertex(v));
            }
        }
        if !is_clique(self.graph, vertices) {
            return Err(ModelError::NotAClique(vertices.to_vec()));
        }
        Ok(())
    }

    fn var(&mut self, e: Edge) -> usize {
        if let Some(&i) = self.var_of.get(&e) {
            return i;
        }
        self.vars.push(e);
        self.var_of.insert(e, self.vars.len() - 1);
        self.vars.len() - 1
    }

    /// Requires at least `γ_clq(|clique|, p)` blocked edges inside `clique`.
    /// Returns `Ok(false)` when the constraint is vacuous or already present.
    pub fn add_cover(&mut self, clique: &[Vertex], p: usize) -> Result<bool, ModelError> {
        self.check_clique(clique)?;
        let rhs = gamma_clq(clique.len(), p.max(1));
        if rhs == 0 {
            return Ok(false);
        }
        let mut sorted = clique.to_vec();
        sorted.sort_unstable();
        if !self.seen_covers.insert((sorted.clone(), rhs)) {
            return Ok(false);
        }
        let support: EdgeSet = sorted
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| sorted[i + 1..].iter().map(move |&b| Edge::new(a, b)))
            .collect();
        for &e in &support {
            self.var(e);
        }
        self.covers.push(CoverConstraint {
            source_clique: sorted,
            support,
            rhs,
        });
        Ok(true)
    }

    /// Allows at most `p` open vertices in `order`. Returns `Ok(false)` when
    /// vacuous (`|order| <= p`) or already present.
    pub fn add_ordering(&mut self, order: &[Vertex], p: usize) -> Result<bool, ModelError> {
        self.check_clique(order)?;
        if order.len() <= p {
            return Ok(false);
        }
        if !self.seen_orders.insert((order.to_vec(), p)) {
            return Ok(false);
        }
        for (i, &a) in order.iter().enumerate() {
            for &b in &order[i + 1..] {
                self.var(Edge::new(a, b));
            }
        }
        self.orderings.push(OrderingConstraint {
            order: order.to_vec(),
            p,
        });
        Ok(true)
    }

    /// Whether `blocked` satisfies every constraint (cutoff not checked).
    pub fn is_satisfied_by(&self, blocked: &EdgeSet) -> bool {
        self.covers.iter().all(|c| {
            c.support.iter().filter(|e| blocked.contains(e)).count() as u64 >= c.rhs
        }) && self
            .orderings
            .iter()
            .all(|o| o.open_count(blocked) <= o.p)
    }

    /// Minimizes the number of blocked edges.
    pub fn solve(&self) -> BlockSolution {
        self.solve_with(&SolveParams::default())
    }

    pub fn solve_with(&self, params: &SolveParams<'_>) -> BlockSolution {
        let mut solver = Solver::new(self, params);
        solver.run()
    }

    /// One constraint per line: `cover <rhs> <vertices...>` or
    /// `order <p> <vertices...>`, then an optional `cutoff <value>` line.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.covers {
            let _ = write!(out, "cover {}", c.rhs);
            for v in &c.source_clique {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        for o in &self.orderings {
            let _ = write!(out, "order {}", o.p);
            for v in &o.order {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        if let Some(c) = self.cutoff {
            let _ = writeln!(out, "cutoff {c}");
        }
        out
    }

    /// Inverse of [`BlockModel::to_lines`]. Cover lines are re-derived from
    /// their clique, so `rhs` must equal `γ_clq(|C|, p)` for some `p`.
    pub fn from_lines(graph: &'g Graph, text: &str) -> Result<Self, ModelError> {
        let mut model = BlockModel::new(graph);
        for (idx, line) in text.lines().enumerate() {
            let syntax = |message: &str| ModelError::Syntax {
                line: idx + 1,
                message: message.to_string(),
            };
            let mut tokens = line.split_whitespace();
            let Some(kind) = tokens.next() else { continue };
            let numbers: Vec<usize> = tokens
                .map(|t| t.parse().map_err(|_| syntax("expected an integer")))
                .collect::<Result<_, _>>()?;
            let (&head, rest) = numbers.split_first().ok_or_else(|| syntax("missing value"))?;
            match kind {
                "cover" => {
                    let p = (1..=rest.len())
                        .find(|&p| gamma_clq(rest.len(), p) == head as u64)
                        .ok_or_else(|| syntax("rhs is not a clique deletion count"))?;
                    model.add_cover(rest, p)?;
                }
                "order" => {
                    model.add_ordering(rest, head)?;
                }
                "cutoff" => model.cutoff = Some(head as u64),
                _ => return Err(syntax("unknown constraint kind")),
            }
        }
        Ok(model)
    }
}

/// "Hit at least `need` of `groups`" with disjoint groups.
struct Con {
    groups: Vec<Vec<usize>>,
    need: usize,
}

const UNDECIDED: i8 = -1;

struct Solver<'m> {
    vars: &'m [Edge],
    cons: Vec<Con>,
    /// For each variable, the (constraint, group) pairs containing it.
    member: Vec<Vec<(usize, usize)>>,
    value: Vec<i8>,
    group_ones: Vec<Vec<u32>>,
    group_free: Vec<Vec<u32>>,
    hit: Vec<usize>,
    open: Vec<usize>,
    ones: u64,
    trail: Vec<usize>,
    goal: SolveGoal,
    cutoff: Option<u64>,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    warm_start: Option<Vec<usize>>,
    nodes: u64,
    best: Option<(u64, Vec<usize>)>,
    load: Vec<f64>,
    /// Lagrange multipliers per constraint, carried from node to node.
    lambda: Vec<f64>,
    reduced_cost: Vec<f64>,
    mark: Vec<bool>,
}

const ROOT_ITERATIONS: usize = 300;
const NODE_ITERATIONS: usize = 20;
const EPS: f64 = 1e-6;

enum Relaxation {
    Prune,
    Fix(Vec<(usize, i8)>),
    Open,
}

enum Node {
    Prune,
    Solution,
    Branch(usize),
}

impl<'m> Solver<'m> {
    fn new(model: &'m BlockModel<'_>, params: &SolveParams<'_>) -> Self {
        let mut cons = Vec::with_capacity(model.num_constraints());
        for c in &model.covers {
            cons.push(Con {
                groups: c.support.iter().map(|e| vec![model.var_of[e]]).collect(),
                need: c.rhs as usize,
            });
        }
        for o in &model.orderings {
            let s = o.order.len();
            let groups = (0..s - 1)
                .map(|i| {
                    o.order[i + 1..]
                        .iter()
                        .map(|&b| model.var_of[&Edge::new(o.order[i], b)])
                        .collect()
                })
                .collect();
            cons.push(Con {
                groups,
                need: s - o.p,
            });
        }
        let nvars = model.vars.len();
        let ncons = cons.len();
        let mut member = vec![Vec::new(); nvars];
        for (ci, c) in cons.iter().enumerate() {
            for (gi, g) in c.groups.iter().enumerate() {
                for &v in g {
                    member[v].push((ci, gi));
                }
            }
        }
        let group_free: Vec<Vec<u32>> = cons
            .iter()
            .map(|c| c.groups.iter().map(|g| g.len() as u32).collect())
            .collect();
        let group_ones = cons.iter().map(|c| vec![0; c.groups.len()]).collect();
        let open = cons
            .iter()
            .map(|c| c.groups.iter().filter(|g| !g.is_empty()).count())
            .collect();
        let warm_start = params.warm_start.map(|ws| {
            ws.iter()
                .filter_map(|e| model.var_of.get(e).copied())
                .collect()
        });
        Solver {
            vars: &model.vars,
            hit: vec![0; cons.len()],
            cons,
            member,
            value: vec![UNDECIDED; nvars],
            group_ones,
            group_free,
            open,
            ones: 0,
            trail: Vec::new(),
            goal: params.goal,
            cutoff: model.cutoff,
            node_limit: params.node_limit,
            deadline: params.deadline,
            warm_start,
            nodes: 0,
            best: None,
            load: vec![0.0; nvars],
            lambda: vec![0.0; ncons],
            reduced_cost: vec![1.0; nvars],
            mark: vec![false; nvars],
        }
    }

    fn deficit(&self, c: usize) -> usize {
        self.cons[c].need.saturating_sub(self.hit[c])
    }

    /// Sets `var` and updates counters; returns false on a violated constraint.
    fn assign(&mut self, var: usize, val: i8) -> bool {
        debug_assert_eq!(self.value[var], UNDECIDED);
        self.value[var] = val;
        self.trail.push(var);
        if val == 1 {
            self.ones += 1;
        }
        let mut ok = true;
        for k in 0..self.member[var].len() {
            let (c, g) = self.member[var][k];
            self.group_free[c][g] -= 1;
            if val == 1 {
                self.group_ones[c][g] += 1;
                if self.group_ones[c][g] == 1 {
                    self.hit[c] += 1;
                    self.open[c] -= 1;
                }
            } else if self.group_ones[c][g] == 0 && self.group_free[c][g] == 0 {
                self.open[c] -= 1;
                if self.open[c] < self.deficit(c) {
                    ok = false;
                }
            }
        }
        ok
    }

    fn unassign(&mut self, var: usize) {
        let val = self.value[var];
        for k in 0..self.member[var].len() {
            let (c, g) = self.member[var][k];
            if val == 1 {
                if self.group_ones[c][g] == 1 {
                    self.hit[c] -= 1;
                    self.open[c] += 1;
                }
                self.group_ones[c][g] -= 1;
            } else if self.group_ones[c][g] == 0 && self.group_free[c][g] == 0 {
                self.open[c] += 1;
            }
            self.group_free[c][g] += 1;
        }
        if val == 1 {
            self.ones -= 1;
        }
        self.value[var] = UNDECIDED;
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let var = self.trail.pop().expect("trail above mark");
            self.unassign(var);
        }
    }

    /// Unit propagation: when a constraint can only be met by hitting every
    /// open group, a group with a single free variable forces it to 1.
    fn propagate(&mut self) -> bool {
        loop {
            let mut forced = None;
            'scan: for c in 0..self.cons.len() {
                let d = self.deficit(c);
                if d == 0 {
                    continue;
                }
                if self.open[c] < d {
                    return false;
                }
                if self.open[c] == d {
                    for (g, group) in self.cons[c].groups.iter().enumerate() {
                        if self.group_ones[c][g] == 0 && self.group_free[c][g] == 1 {
                            let v = group
                                .iter()
                                .copied()
                                .find(|&v| self.value[v] == UNDECIDED)
                                .expect("one free variable");
                            forced = Some(v);
                            break 'scan;
                        }
                    }
                }
            }
            match forced {
                Some(v) => {
                    if !self.assign(v, 1) {
                        return false;
                    }
                }
                None => return true,
            }
        }
    }

    /// Free variables in open groups of `c`.
    fn open_vars(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.cons[c]
            .groups
            .iter()
            .enumerate()
            .filter(move |&(g, _)| self.group_ones[c][g] == 0)
            .flat_map(|(_, group)| group.iter().copied())
            .filter(move |&v| self.value[v] == UNDECIDED)
    }

    /// `ones` plus a greedy dual solution of the covering relaxation
    /// `Σ_{v ∈ open vars of c} x_v ≥ deficit(c)`.
    fn lower_bound(&mut self) -> u64 {
        let mut active: Vec<(usize, usize, usize)> = Vec::new();
        for c in 0..self.cons.len() {
            let d = self.deficit(c);
            if d > 0 {
                let width = self.open_vars(c).count();
                active.push((c, d, width));
            }
        }
        // Most demanding per free variable first.
        active.sort_by(|a, b| (b.1 * a.2).cmp(&(a.1 * b.2)).then(a.0.cmp(&b.0)));
        let mut touched = Vec::new();
        let mut total = 0.0f64;
        for &(c, d, _) in &active {
            let mut y = 1.0f64;
            for v in self.open_vars(c) {
                y = y.min(1.0 - self.load[v]);
                if y <= 1e-12 {
                    break;
                }
            }
            if y <= 1e-12 {
                continue;
            }
            total += d as f64 * y;
            let vars: Vec<usize> = self.open_vars(c).collect();
            for v in vars {
                if self.load[v] == 0.0 {
                    touched.push(v);
                }
                self.load[v] += y;
            }
        }
        for v in touched {
            self.load[v] = 0.0;
        }
        self.ones + (total - 1e-9).ceil().max(0.0) as u64
    }

    /// Objective values that are still interesting are `< limit`.
    fn limit(&self) -> u64 {
        let from_cutoff = self.cutoff.map_or(u64::MAX, |c| c + 1);
        let from_best = self.best.as_ref().map_or(u64::MAX, |b| b.0);
        from_cutoff.min(from_best)
    }

    fn evaluate(&mut self) -> Node {
        loop {
            match self.evaluate_once() {
                Some(node) => return node,
                None => continue,
            }
        }
    }

    /// `None` when variables were fixed and the node must be re-examined.
    fn evaluate_once(&mut self) -> Option<Node> {
        if self.ones >= self.limit() {
            return Some(Node::Prune);
        }
        let mut chosen: Option<(usize, usize, usize)> = None;
        for c in 0..self.cons.len() {
            let d = self.deficit(c);
            if d == 0 {
                continue;
            }
            let slack = self.open[c] - d;
            let better = match chosen {
                None => true,
                Some((_, cs, cd)) => slack < cs || (slack == cs && d > cd),
            };
            if better {
                chosen = Some((c, slack, d));
            }
        }
        let Some((c, _, _)) = chosen else {
            return Some(Node::Solution);
        };
        if self.lower_bound() >= self.limit() {
            return Some(Node::Prune);
        }
        let iterations = if self.trail.is_empty() { ROOT_ITERATIONS } else { NODE_ITERATIONS };
        match self.lagrangian(iterations) {
            Relaxation::Prune => return Some(Node::Prune),
            Relaxation::Fix(fixed) => {
                for (v, val) in fixed {
                    if self.value[v] == UNDECIDED && !self.assign(v, val) {
                        return Some(Node::Prune);
                    }
                }
                if !self.propagate() {
                    return Some(Node::Prune);
                }
                return None;
            }
            Relaxation::Open => {}
        }
        let mut best_var = None;
        let mut best_score = 0usize;
        for v in self.open_vars(c) {
            let score = self.member[v]
                .iter()
                .filter(|&&(c2, g2)| self.group_ones[c2][g2] == 0 && self.deficit(c2) > 0)
                .count();
            let better = match best_var {
                None => true,
                Some(b) => {
                    score > best_score || (score == best_score && self.vars[v] < self.vars[b])
                }
            };
            if better {
                best_var = Some(v);
                best_score = score;
            }
        }
        Some(Node::Branch(
            best_var.expect("an unsatisfied constraint has an open variable"),
        ))
    }

    /// Subgradient ascent on the Lagrangian dual of the covering relaxation.
    /// Any nonnegative multipliers give a valid bound
    /// `Σ λ_c·deficit(c) + Σ_v min(0, 1 - Σ_{c ∋ v} λ_c)`; the reduced cost
    /// `1 - Σ λ_c` of a variable also bounds the effect of fixing it.
    fn lagrangian(&mut self, iterations: usize) -> Relaxation {
        let limit = self.limit();
        if limit == u64::MAX {
            return Relaxation::Open;
        }
        let target = (limit - self.ones) as f64;
        let mut active: Vec<(usize, f64, Vec<usize>)> = Vec::new();
        let mut touched: Vec<usize> = Vec::new();
        for c in 0..self.cons.len() {
            let d = self.deficit(c);
            if d == 0 {
                continue;
            }
            let vars: Vec<usize> = self.open_vars(c).collect();
            for &v in &vars {
                if !self.mark[v] {
                    self.mark[v] = true;
                    touched.push(v);
                }
            }
            active.push((c, d as f64, vars));
        }
        for &v in &touched {
            self.mark[v] = false;
        }

        let mut best = f64::NEG_INFINITY;
        let mut best_costs: Vec<f64> = Vec::new();
        let mut theta = 1.0;
        let mut stall = 0;
        let mut pruned = false;
        for _ in 0..iterations {
            for &v in &touched {
                self.reduced_cost[v] = 1.0;
            }
            let mut value = 0.0;
            for (c, d, vars) in &active {
                let l = self.lambda[*c];
                if l > 0.0 {
                    value += l * d;
                    for &v in vars {
                        self.reduced_cost[v] -= l;
                    }
                }
            }
            value += touched
                .iter()
                .map(|&v| self.reduced_cost[v].min(0.0))
                .sum::<f64>();
            if value > best + 1e-9 {
                best = value;
                best_costs = touched.iter().map(|&v| self.reduced_cost[v]).collect();
                stall = 0;
            } else {
                stall += 1;
                if stall >= 3 {
                    theta *= 0.5;
                    stall = 0;
                }
            }
            if best > target - 1.0 + EPS {
                pruned = true;
                break;
            }
            let mut norm = 0.0;
            let mut grads = Vec::with_capacity(active.len());
            for (c, d, vars) in &active {
                let covered = vars.iter().filter(|&&v| self.reduced_cost[v] < 0.0).count();
                let g = d - covered as f64;
                if g > 0.0 || self.lambda[*c] > 0.0 {
                    norm += g * g;
                }
                grads.push(g);
            }
            if norm == 0.0 || theta < 1e-4 {
                break;
            }
            let step = theta * (target - value).max(1.0) / norm;
            for ((c, _, _), g) in active.iter().zip(grads) {
                self.lambda[*c] = (self.lambda[*c] + step * g).max(0.0);
            }
        }
        for &v in &touched {
            self.reduced_cost[v] = 1.0;
        }
        if pruned {
            return Relaxation::Prune;
        }
        let fixed: Vec<(usize, i8)> = touched
            .iter()
            .zip(&best_costs)
            .filter_map(|(&v, &r)| {
                if r > 0.0 && best + r > target - 1.0 + EPS {
                    Some((v, 0))
                } else if r < 0.0 && best - r > target - 1.0 + EPS {
                    Some((v, 1))
                } else {
                    None
                }
            })
            .collect();
        if fixed.is_empty() {
            Relaxation::Open
        } else {
            Relaxation::Fix(fixed)
        }
    }

    fn record(&mut self) {
        let chosen: Vec<usize> = (0..self.value.len()).filter(|&v| self.value[v] == 1).collect();
        self.best = Some((self.ones, chosen));
    }

    /// Greedy completion from the current assignment: repeatedly block the
    /// free variable that hits the most deficient open groups.
    fn greedy_completion(&mut self) -> Option<(u64, Vec<usize>)> {
        let mark = self.trail.len();
        let mut ok = true;
        if let Some(ws) = self.warm_start.clone() {
            for v in ws {
                if self.value[v] == UNDECIDED && !self.assign(v, 1) {
                    ok = false;
                    break;
                }
            }
        }
        while ok {
            let mut best: Option<(usize, usize)> = None;
            for c in 0..self.cons.len() {
                if self.deficit(c) == 0 {
                    continue;
                }
                for v in self.open_vars(c) {
                    let score: usize = self.member[v]
                        .iter()
                        .filter(|&&(c2, g2)| self.group_ones[c2][g2] == 0)
                        .map(|&(c2, _)| self.deficit(c2))
                        .sum();
                    if best.is_none_or(|(bv, bs)| {
                        score > bs || (score == bs && self.vars[v] < self.vars[bv])
                    }) {
                        best = Some((v, score));
                    }
                }
            }
            match best {
                None => break,
                Some((v, _)) => ok = self.assign(v, 1),
            }
        }
        let all_met = (0..self.cons.len()).all(|c| self.deficit(c) == 0);
        let result = (ok && all_met).then(|| {
            let chosen: Vec<usize> = (0..self.value.len()).filter(|&v| self.value[v] == 1).collect();
            (self.ones, chosen)
        });
        self.undo_to(mark);
        result
    }

    fn out_of_budget(&self) -> bool {
        if let Some(l) = self.node_limit {
            if self.nodes >= l {
                return true;
            }
        }
        if self.nodes % 256 == 0 {
            if let Some(d) = self.deadline {
                return Instant::now() >= d;
            }
        }
        false
    }

    fn finish(&self, status: BlockStatus) -> BlockSolution {
        let (objective, blocked) = match (&self.best, status) {
            (Some((obj, vars)), BlockStatus::Optimal | BlockStatus::Feasible) => {
                (*obj, vars.iter().map(|&v| self.vars[v]).collect())
            }
            _ => (0, EdgeSet::new()),
        };
        BlockSolution {
            status,
            blocked,
            objective,
            nodes: self.nodes,
        }
    }

    fn run(&mut self) -> BlockSolution {
        // Root: constraints that cannot be met even by blocking everything.
        for c in 0..self.cons.len() {
            if self.open[c] < self.deficit(c) {
                return self.finish(BlockStatus::Infeasible);
            }
        }
        if let Some(start) = self.greedy_completion() {
            if start.0 < self.limit() {
                self.best = Some(start);
                if self.goal == SolveGoal::WithinCutoff && self.cutoff.is_some() {
                    return self.finish(BlockStatus::Feasible);
                }
            }
        }

        struct Frame {
            var: usize,
            mark: usize,
            tried_zero: bool,
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut node_ok = self.propagate();
        loop {
            if node_ok {
                self.nodes += 1;
                if self.out_of_budget() {
                    return self.finish(BlockStatus::Interrupted);
                }
                match self.evaluate() {
                    Node::Prune => {}
                    Node::Solution => {
                        self.record();
                        if self.goal == SolveGoal::WithinCutoff {
                            return self.finish(BlockStatus::Feasible);
                        }
                    }
                    Node::Branch(var) => {
                        stack.push(Frame {
                            var,
                            mark: self.trail.len(),
                            tried_zero: false,
                        });
                        node_ok = self.assign(var, 1) && self.propagate();
                        continue;
                    }
                }
            }
            loop {
                let Some(top) = stack.last_mut() else {
                    let status = match (&self.best, self.cutoff) {
                        (Some(_), _) => BlockStatus::Optimal,
                        (None, Some(_)) => BlockStatus::Exceeds,
                        (None, None) => BlockStatus::Infeasible,
                    };
                    return self.finish(status);
                };
                let (var, mark, tried_zero) = (top.var, top.mark, top.tried_zero);
                if !tried_zero {
                    top.tried_zero = true;
                    self.undo_to(mark);
                    node_ok = self.assign(var, 0) && self.propagate();
                    break;
                }
                stack.pop();
                self.undo_to(mark);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn add_cover_examples() {
        let k4 = generate::complete(4);
        let mut m = BlockModel::new(&k4);
        assert!(m.add_cover(&[0, 1, 2, 3], 2).unwrap());
        assert_eq!(m.covers()[0].support.len(), 6);
        assert_eq!(m.covers()[0].rhs, 2);
        assert!(!m.add_cover(&[0, 1, 2], 3).unwrap());
        assert!(m.add_cover(&[2, 3], 1).unwrap());
        assert_eq!(m.covers()[1].rhs, 1);
        assert!(!m.add_cover(&[3, 2], 1).unwrap(), "duplicate");
    }

    #[test]
    fn non_clique_is_rejected() {
        let c4 = generate::cycle(4);
        let mut m = BlockModel::new(&c4);
        assert_eq!(m.add_cover(&[0, 1, 2], 1), Err(ModelError::NotAClique(vec![0, 1, 2])));
        assert!(matches!(m.add_ordering(&[0, 2], 1), Err(ModelError::NotAClique(_))));
        assert_eq!(m.add_ordering(&[0, 0], 1), Err(ModelError::RepeatedVertex(0)));
        assert_eq!(m.add_cover(&[0, 9], 1), Err(ModelError::VertexOutOfRange(9)));
    }

    #[test]
    fn add_ordering_examples() {
        let k4 = generate::complete(4);
        let mut m = BlockModel::new(&k4);
        assert!(m.add_ordering(&[2, 0, 3, 1], 2).unwrap());
        assert_eq!(m.orderings()[0].order.len(), 4);
        assert!(!m.add_ordering(&[0, 1, 2], 3).unwrap());

        // first→second blocked: open pattern (0, 1, 1), two open ≤ 2.
        let o = OrderingConstraint {
            order: vec![0, 1, 2],
            p: 2,
        };
        let blocked: EdgeSet = [Edge::new(0, 1)].into_iter().collect();
        assert_eq!(o.open_count(&blocked), 2);
    }

    #[test]
    fn solve_examples() {
        let k4 = generate::complete(4);
        let mut m = BlockModel::new(&k4);
        m.add_cover(&[0, 1, 2, 3], 2).unwrap();
        let s = m.solve();
        assert_eq!((s.status, s.objective), (BlockStatus::Optimal, 2));
        assert!(m.is_satisfied_by(&s.blocked));

        let k3 = generate::complete(3);
        let mut m = BlockModel::new(&k3);
        m.add_cover(&[0, 1, 2], 2).unwrap();
        m.set_cutoff(Some(0));
        assert_eq!(m.solve().status, BlockStatus::Exceeds);

        let empty = BlockModel::new(&k4);
        let s = empty.solve();
        assert_eq!((s.status, s.objective), (BlockStatus::Optimal, 0));
        assert!(s.blocked.is_empty());

        let two = generate::disjoint_union(&k3, &k3);
        let mut m = BlockModel::new(&two);
        m.add_cover(&[0, 1, 2], 2).unwrap();
        m.add_cover(&[3, 4, 5], 2).unwrap();
        m.set_cutoff(Some(1));
        assert_eq!(m.solve().status, BlockStatus::Exceeds);
        m.set_cutoff(Some(2));
        assert_eq!(m.solve().objective, 2);
    }

    #[test]
    fn ordering_constraints_cut_spurious_solutions() {
        // K5 with p = 3: the cover alone accepts two edges at a common vertex,
        // which leaves a K4. Both orderings of the clique reject that.
        let k5 = generate::complete(5);
        let mut m = BlockModel::new(&k5);
        m.add_cover(&[0, 1, 2, 3, 4], 3).unwrap();
        let star: EdgeSet = [Edge::new(0, 1), Edge::new(0, 2)].into_iter().collect();
        assert!(m.is_satisfied_by(&star));
        m.add_ordering(&[0, 1, 2, 3, 4], 3).unwrap();
        assert!(!m.is_satisfied_by(&star));
        let s = m.solve();
        assert_eq!(s.objective, 2);
        assert!(m.is_satisfied_by(&s.blocked));
    }

    #[test]
    fn within_cutoff_stops_early() {
        let k5 = generate::complete(5);
        let mut m = BlockModel::new(&k5);
        m.add_cover(&[0, 1, 2, 3, 4], 2).unwrap();
        m.set_cutoff(Some(8));
        let s = m.solve_with(&SolveParams {
            goal: SolveGoal::WithinCutoff,
            ..Default::default()
        });
        assert_eq!(s.status, BlockStatus::Feasible);
        assert!(s.objective <= 8 && m.is_satisfied_by(&s.blocked));
    }

    #[test]
    fn lines_round_trip() {
        let k5 = generate::complete(5);
        let mut m = BlockModel::new(&k5);
        m.add_cover(&[0, 1, 2, 3], 2).unwrap();
        m.add_ordering(&[4, 2, 1], 2).unwrap();
        m.set_cutoff(Some(3));
        let text = m.to_lines();
        let back = BlockModel::from_lines(&k5, &text).unwrap();
        assert_eq!(back.to_lines(), text);
        assert!(matches!(
            BlockModel::from_lines(&k5, "cover x 1 2"),
            Err(ModelError::Syntax { line: 1, .. })
        ));
    }
}

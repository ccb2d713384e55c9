//! Exact solver for the edge interdiction clique problem: delete at most `k`
//! edges of a graph so that its clique number is as small as possible.

pub mod bitset;
pub mod block;
pub mod bounds;
pub mod clique;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod reduce;
pub mod rlcm;
pub mod turan;

use thiserror::Error;

/// A time limit was reached before the computation finished.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("time limit reached")]
pub struct Interrupted;

pub use block::{BlockModel, BlockSolution, BlockStatus, SolveGoal, SolveParams};
pub use bounds::{estimate_lb, estimate_ub};
pub use clique::{max_clique, CliqueResult};
pub use graph::{parse_dimacs, parse_edgelist, write_dimacs, Edge, EdgeSet, Graph, GraphError, Vertex};
pub use reduce::{preprocess, ReductionReport};
pub use rlcm::{solve_ebcp, solve_eicp, EbcpOptions, EbcpReport, SolveOptions, SolveReport, SolveStatus};

pub use turan::gamma_clq;

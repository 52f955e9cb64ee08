//! Approximate maximum weight matching on weighted bipartite graphs.
//!
//! The graph is read as an `n x n` crossbar switch whose queue lengths are
//! the edge weights. Each slot, every input proposes an output drawn in
//! proportion to its queue lengths, outputs accept the longest-queue
//! proposal, leftover ports are paired round-robin, and the result is merged
//! with the previous slot's matching cycle by cycle, keeping the heavier
//! side. The matching weight never decreases; after about `n` slots on
//! dense uniform instances it typically sits near 85% of the optimum.
//!
//! * [`instance`]: graphs, reduction to a weight matrix, file formats.
//! * [`alias`], [`qps`]: batched queue-proportional sampling.
//! * [`matching`]: completion and the cycle merge.
//! * [`solver`]: the slot loop.
//! * [`oracle`]: exact optimum for scoring.
//! * [`distsim`]: the same slot on a simulated port network, with
//!   round and message counts.
//! * [`experiment`]: seeded sweeps that produce ratio curves as CSV.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alias;
pub mod distsim;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod instance;
pub mod matching;
pub mod meter;
pub mod oracle;
pub mod qps;
pub mod solver;

pub use error::{Error, Result};
pub use instance::{BipartiteGraph, Edge, WeightMatrix};
pub use matching::FullMatching;
pub use qps::PartialMatching;
pub use solver::{solve, solve_until, Solver, SolverConfig, Trajectory};

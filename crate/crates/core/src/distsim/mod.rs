//! Round-by-round emulation of the per-slot pipeline on a synchronous
//! network of `2n` ports (one per input, one per output).
//!
//! Every stage produces exactly what its sequential counterpart produces;
//! the network log records what it cost in rounds and messages.

mod merge;
mod network;
mod pipeline;
mod populate;
mod scan;

pub use merge::parallel_merge;
pub use network::{DistStats, Envelope, Inboxes, Phase, PortId, PortNetwork, RoundRecord};
pub use pipeline::{parallel_accept, parallel_slot, parallel_slot_with, solve_distributed, DistributedSolver, SlotStats};
pub use populate::{parallel_populate, parallel_populate_with};
pub use scan::{prefix_sum_rank, prefix_sum_rank_with, schedule, ScanSchedule};

/// `ceil(log2 n)`, the depth unit of all round bounds.
pub fn log2_ceil(n: usize) -> usize {
    scan::ceil_log2(n)
}

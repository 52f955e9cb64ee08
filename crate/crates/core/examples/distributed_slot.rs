//! Run slots on the emulated port network and print what each phase cost.
//! The matchings agree with the sequential solver slot for slot.
//!
//! ```bash
//! cargo run --release --example distributed_slot -- 256
//! ```

use rqps::distsim::{log2_ceil, DistributedSolver, Phase, PortNetwork};
use rqps::instance::generate_complete_uniform;
use rqps::solver::Solver;

fn main() -> rqps::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(64);
    let matrix = generate_complete_uniform(n, 10.0, 100.0, 9)?;
    let mut dist = DistributedSolver::new(&matrix, 4).with_horizon(4);
    let mut seq = Solver::new(&matrix, 4).with_horizon(4);

    println!("n = {n}, round bound per slot {}", 4 * log2_ceil(n) + 8);
    println!("slot  rounds  messages  broker-in  weight      same");
    for _ in 0..4 {
        let s = dist.step();
        seq.step();
        println!(
            "{:>4}  {:>6}  {:>8}  {:>9}  {:>10.3}  {}",
            s.slot,
            s.stats.rounds,
            s.stats.messages,
            s.broker.max_in_degree_per_round,
            dist.current_weight(),
            dist.current() == seq.current()
        );
    }

    // A single slot on a fresh network, broken down by phase.
    let mut net = PortNetwork::for_switch(n);
    let mut solver = Solver::new(&matrix, 4);
    let proposals = solver.next_proposals();
    rqps::distsim::parallel_slot(&matrix, solver.current(), &proposals, &mut net)?;
    println!("\nphase    rounds  messages");
    for phase in [Phase::Accept, Phase::Rank, Phase::Broker, Phase::Merge] {
        let s = net.phase_stats(phase);
        println!("{:<8} {:>6}  {:>8}", format!("{phase:?}"), s.rounds, s.messages);
    }
    Ok(())
}

//! Solve one uniform complete instance and watch the ratio to the optimum
//! grow slot by slot.
//!
//! ```bash
//! cargo run --release --example solve_uniform -- 200
//! ```

use std::time::Instant;

use rqps::instance::generate_complete_uniform;
use rqps::oracle::hungarian;
use rqps::solver::{solve, SolverConfig};

fn main() -> rqps::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let matrix = generate_complete_uniform(n, 10.0, 100.0, 42)?;
    let optimum = hungarian(&matrix).weight;

    let config = SolverConfig {
        slots: 16 * n,
        seed: 7,
        record_every: n / 4,
    };
    let start = Instant::now();
    let (matching, trajectory) = solve(&matrix, &config)?;
    let elapsed = start.elapsed();

    println!("n = {n}, optimum = {optimum:.3}");
    println!("{:>8} {:>8} {:>12} {:>8}", "slot", "t/n", "weight", "ratio");
    for p in trajectory.entries() {
        println!(
            "{:>8} {:>8.2} {:>12.3} {:>8.4}",
            p.slot,
            p.slot as f64 / n as f64,
            p.weight,
            p.weight / optimum
        );
    }
    println!(
        "final weight {:.3} after {} slots in {:.2?} ({:.1} us/slot)",
        matching.weight(&matrix)?,
        config.slots,
        elapsed,
        elapsed.as_secs_f64() * 1e6 / config.slots as f64
    );
    Ok(())
}

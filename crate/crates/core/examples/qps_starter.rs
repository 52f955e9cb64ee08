//! One round of queue-proportional sampling: every input proposes an output
//! with probability proportional to its queue lengths, every output keeps the
//! longest proposal, and the leftovers are paired up round-robin.
//!
//! ```bash
//! cargo run --example qps_starter
//! ```

use rqps::instance::generate_complete_uniform;
use rqps::matching::populate;
use rqps::qps::{accept, build_tables, propose_batch, PortRngs};

fn main() -> rqps::Result<()> {
    let n = 8;
    let matrix = generate_complete_uniform(n, 10.0, 100.0, 3)?;
    let tables = build_tables(&matrix);
    let mut rngs = PortRngs::new(11, n);

    let batch = propose_batch(&matrix, &tables, 1, &mut rngs)?;
    let proposals = batch.slot(0);
    for (i, p) in proposals.iter().enumerate() {
        let j = p.expect("complete instance");
        println!("input {i} proposes output {j} (queue {:.1})", matrix.get(i, j));
    }

    let starter = accept(&matrix, proposals)?;
    println!("\naccepted {} of {n} proposals:", starter.len());
    for (i, j) in starter.pairs() {
        println!("  {i} -> {j}");
    }

    let full = populate(&starter);
    println!("\nafter round-robin fill: {:?}", full.as_slice());
    println!("weight {:.3}", full.weight(&matrix)?);
    Ok(())
}

//! Exact optimum by the Hungarian method, checked against its dual
//! certificate and, for a small instance, against full enumeration.
//!
//! ```bash
//! cargo run --release --example oracle_ratio
//! ```

use rqps::instance::generate_complete_uniform;
use rqps::oracle::{brute_force, hungarian};
use rqps::solver::{solve, SolverConfig};

fn main() -> rqps::Result<()> {
    let small = generate_complete_uniform(7, 0.0, 10.0, 5)?;
    let h = hungarian(&small);
    let b = brute_force(&small)?;
    println!("n = 7: hungarian {:.6}, enumeration {:.6}", h.weight, b.weight);

    for n in [50, 200] {
        let matrix = generate_complete_uniform(n, 10.0, 100.0, n as u64)?;
        let opt = hungarian(&matrix);
        let certified = opt
            .certificate
            .as_ref()
            .is_some_and(|c| c.verify(&matrix, &opt.matching, 1e-9));
        println!("\nn = {n}: optimum {:.3}, dual certificate valid: {certified}", opt.weight);
        for multiple in [1, 4, 16] {
            let (_, trajectory) = solve(&matrix, &SolverConfig::new(multiple * n, 1))?;
            let w = trajectory.last().unwrap().weight;
            println!("  after {:>5} slots: ratio {:.4}", multiple * n, w / opt.weight);
        }
    }
    Ok(())
}

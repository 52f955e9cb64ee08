//! Merge two perfect matchings: their union splits into alternating cycles,
//! and each cycle keeps whichever side is heavier.
//!
//! ```bash
//! cargo run --example merge_cycles
//! ```

use rqps::matching::{cycles, merge, FullMatching};
use rqps::WeightMatrix;

fn main() -> rqps::Result<()> {
    let matrix = WeightMatrix::from_rows(&[
        vec![9.0, 1.0, 0.0, 0.0, 0.0],
        vec![1.0, 2.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 6.0, 0.0],
        vec![0.0, 0.0, 6.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 5.0],
    ])?;
    let prev = FullMatching::new(vec![1, 0, 2, 3, 4])?;
    let new = FullMatching::new(vec![0, 1, 3, 2, 4])?;

    for cycle in cycles(&new, &prev)? {
        let side = |m: &FullMatching| cycle.iter().map(|&i| matrix.get(i, m.output_of(i))).sum::<f64>();
        println!("cycle {cycle:?}: new side {:.1}, previous side {:.1}", side(&new), side(&prev));
    }

    let merged = merge(&new, &prev, &matrix)?;
    println!("\nprevious {:?} weighs {:.1}", prev.as_slice(), prev.weight(&matrix)?);
    println!("new      {:?} weighs {:.1}", new.as_slice(), new.weight(&matrix)?);
    println!("merged   {:?} weighs {:.1}", merged.as_slice(), merged.weight(&matrix)?);
    Ok(())
}

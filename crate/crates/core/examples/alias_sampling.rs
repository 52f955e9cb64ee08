//! Build an alias table over a weight vector and compare the empirical
//! histogram with the exact normalized weights.
//!
//! ```bash
//! cargo run --release --example alias_sampling
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rqps::alias::AliasTable;

fn main() -> rqps::Result<()> {
    let weights = [1.0, 2.0, 3.0, 4.0, 0.0];
    let table = AliasTable::build(&weights)?;
    println!("slot  prob    alias");
    for (k, (p, a)) in table.prob().iter().zip(table.alias()).enumerate() {
        println!("{k:>4}  {p:.4}  {a}");
    }

    let draws = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = vec![0usize; weights.len()];
    for _ in 0..draws {
        counts[table.sample(&mut rng)] += 1;
    }

    let total = table.total();
    let mut tv = 0.0;
    println!("\nindex  exact   observed");
    for (k, (&w, &c)) in weights.iter().zip(&counts).enumerate() {
        let (exact, seen) = (w / total, c as f64 / draws as f64);
        tv += 0.5 * (exact - seen).abs();
        println!("{k:>5}  {exact:.4}  {seen:.4}");
    }
    println!("\ntotal variation distance over {draws} draws: {tv:.5}");
    Ok(())
}

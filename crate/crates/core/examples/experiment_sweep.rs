//! A small seeded sweep over sizes and slot counts, written as CSV to stdout.
//! The full-size run is `rqps experiment` with its defaults.
//!
//! ```bash
//! cargo run --release --example experiment_sweep > sweep.csv
//! ```

use rqps::experiment::{run_experiment, write_csv, ExperimentSpec, Mode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ExperimentSpec {
        sizes: vec![25, 50, 100],
        runs: 20,
        slot_grid: vec![0.25, 1.0, 4.0, 16.0],
        seed_base: 1,
        mode: Mode::Sequential,
        ..ExperimentSpec::default()
    };
    let rows = run_experiment(&spec)?;
    write_csv(&rows, spec.mode, std::io::stdout().lock())?;
    Ok(())
}

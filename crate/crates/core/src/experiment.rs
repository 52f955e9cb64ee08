//! Seeded sweeps over instance sizes, scored against the exact optimum and
//! written as CSV.
//!
//! For each size `n` one complete instance is drawn uniformly from
//! `[weight_lo, weight_hi)` with seed `seed_base + (n << 32)`, and `runs`
//! independent runs are made on it; run `r` uses solver seed
//! `seed_base + r`. Grid points are multiples of `n`: multiplier `x` is
//! slot `max(1, ceil(x * n))`.

use std::io::Write;

use rayon::prelude::*;

use crate::distsim::DistributedSolver;
use crate::error::{Error, Result};
use crate::instance::{generate_complete_uniform, WeightMatrix};
use crate::oracle::hungarian;
use crate::solver::Solver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Sequential,
    Distsim,
}

/// Multipliers `1/8, 1/4, ..., 64, 128`.
pub fn default_slot_grid() -> Vec<f64> {
    (-3..=7).map(|e| 2f64.powi(e)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub sizes: Vec<usize>,
    pub weight_lo: f64,
    pub weight_hi: f64,
    pub runs: usize,
    pub slot_grid: Vec<f64>,
    pub seed_base: u64,
    pub mode: Mode,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            sizes: vec![100, 200, 400],
            weight_lo: 10.0,
            weight_hi: 100.0,
            runs: 100,
            slot_grid: default_slot_grid(),
            seed_base: 0,
            mode: Mode::Sequential,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::invalid("no instance sizes given"));
        }
        if self.sizes.contains(&0) {
            return Err(Error::invalid("instance sizes must be at least 1"));
        }
        if !(self.weight_lo >= 0.0) {
            return Err(Error::invalid(format!("weight_lo {} must be nonnegative", self.weight_lo)));
        }
        if !(self.weight_lo < self.weight_hi) || !self.weight_hi.is_finite() {
            return Err(Error::invalid(format!("empty weight range [{}, {})", self.weight_lo, self.weight_hi)));
        }
        if self.runs == 0 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        if self.slot_grid.is_empty() {
            return Err(Error::invalid("slot grid is empty"));
        }
        if !self.slot_grid.iter().all(|x| x.is_finite() && *x > 0.0) {
            return Err(Error::invalid("slot grid multipliers must be positive"));
        }
        if !self.slot_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("slot grid must be strictly increasing"));
        }
        Ok(())
    }

    pub fn instance_seed(&self, n: usize) -> u64 {
        self.seed_base.wrapping_add((n as u64) << 32)
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed_base.wrapping_add(run as u64)
    }
}

pub fn grid_slot(multiplier: f64, n: usize) -> usize {
    ((multiplier * n as f64).ceil() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistColumns {
    pub rounds_per_slot: f64,
    pub messages_per_slot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub t_over_n: f64,
    pub slot: usize,
    pub runs: usize,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Present in [`Mode::Distsim`].
    pub dist: Option<DistColumns>,
}

/// Ratio and (distsim only) mean rounds/messages per slot so far, at every
/// grid point of one run.
type RunPoints = Vec<(f64, Option<DistColumns>)>;

fn single_run(matrix: &WeightMatrix, optimum: f64, slots: &[usize], seed: u64, mode: Mode) -> RunPoints {
    let horizon = *slots.last().unwrap();
    let ratio = |w: f64| if optimum > 0.0 { w / optimum } else { 1.0 };
    let mut out = Vec::with_capacity(slots.len());
    match mode {
        Mode::Sequential => {
            let mut solver = Solver::new(matrix, seed).with_horizon(horizon);
            for &t in slots {
                while solver.slot() < t {
                    solver.step();
                }
                out.push((ratio(solver.current_weight()), None));
            }
        }
        Mode::Distsim => {
            let mut solver = DistributedSolver::new(matrix, seed).with_horizon(horizon);
            let (mut rounds, mut messages) = (0usize, 0usize);
            for &t in slots {
                while solver.slot() < t {
                    let s = solver.step();
                    rounds += s.stats.rounds;
                    messages += s.stats.messages;
                }
                let dist = DistColumns {
                    rounds_per_slot: rounds as f64 / t as f64,
                    messages_per_slot: messages as f64 / t as f64,
                };
                out.push((ratio(solver.current_weight()), Some(dist)));
            }
        }
    }
    out
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &n in &spec.sizes {
        let matrix = generate_complete_uniform(n, spec.weight_lo, spec.weight_hi, spec.instance_seed(n))?;
        let optimum = hungarian(&matrix).weight;
        let slots: Vec<usize> = spec.slot_grid.iter().map(|&x| grid_slot(x, n)).collect();
        let runs: Vec<RunPoints> = (0..spec.runs)
            .into_par_iter()
            .map(|r| single_run(&matrix, optimum, &slots, spec.run_seed(r), spec.mode))
            .collect();
        for (g, (&x, &t)) in spec.slot_grid.iter().zip(&slots).enumerate() {
            let ratios: Vec<f64> = runs.iter().map(|r| r[g].0).collect();
            let k = ratios.len() as f64;
            let mean = ratios.iter().sum::<f64>() / k;
            let var = if ratios.len() > 1 {
                ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            let dist = (spec.mode == Mode::Distsim).then(|| DistColumns {
                rounds_per_slot: runs.iter().map(|r| r[g].1.unwrap().rounds_per_slot).sum::<f64>() / k,
                messages_per_slot: runs.iter().map(|r| r[g].1.unwrap().messages_per_slot).sum::<f64>() / k,
            });
            rows.push(ResultRow {
                n,
                t_over_n: x,
                slot: t,
                runs: spec.runs,
                mean_ratio: mean,
                std_ratio: var.sqrt(),
                min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                dist,
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: [&str; 8] = ["n", "t_over_n", "slot", "runs", "mean_ratio", "std_ratio", "min_ratio", "max_ratio"];
pub const CSV_DIST_HEADER: [&str; 2] = ["rounds_per_slot", "messages_per_slot"];

/// Writes rows with a fixed header. Floats use Rust's shortest round-trip
/// formatting, which does not depend on locale.
pub fn write_csv<W: Write>(rows: &[ResultRow], mode: Mode, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if mode == Mode::Distsim {
        header.extend(CSV_DIST_HEADER);
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.n.to_string(),
            r.t_over_n.to_string(),
            r.slot.to_string(),
            r.runs.to_string(),
            r.mean_ratio.to_string(),
            r.std_ratio.to_string(),
            r.min_ratio.to_string(),
            r.max_ratio.to_string(),
        ];
        if mode == Mode::Distsim {
            let d = r.dist.expect("distsim rows carry round counts");
            rec.push(d.rounds_per_slot.to_string());
            rec.push(d.messages_per_slot.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-slot comparison of a distributed run against the sequential one.
#[derive(Debug, Clone, PartialEq)]
pub struct DistCheckRow {
    pub slot: usize,
    pub rounds: usize,
    pub messages: usize,
    pub broker_max_in_degree: usize,
    pub weight: f64,
    pub matches_sequential: bool,
}

pub fn distsim_check(matrix: &WeightMatrix, slots: usize, seed: u64) -> Result<Vec<DistCheckRow>> {
    if slots == 0 {
        return Err(Error::invalid("slots must be at least 1"));
    }
    let mut seq = Solver::new(matrix, seed).with_horizon(slots);
    let mut dist = DistributedSolver::new(matrix, seed).with_horizon(slots);
    let mut rows = Vec::with_capacity(slots);
    for _ in 0..slots {
        seq.step();
        let s = dist.step();
        rows.push(DistCheckRow {
            slot: s.slot,
            rounds: s.stats.rounds,
            messages: s.stats.messages,
            broker_max_in_degree: s.broker.max_in_degree_per_round,
            weight: dist.current_weight(),
            matches_sequential: seq.current() == dist.current(),
        });
    }
    Ok(rows)
}

pub fn write_distsim_csv<W: Write>(rows: &[DistCheckRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["slot", "rounds", "messages", "broker_max_in_degree", "weight", "matches_sequential"])?;
    for r in rows {
        w.write_record([
            r.slot.to_string(),
            r.rounds.to_string(),
            r.messages.to_string(),
            r.broker_max_in_degree.to_string(),
            r.weight.to_string(),
            r.matches_sequential.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: Mode) -> ExperimentSpec {
        ExperimentSpec {
            sizes: vec![8, 16],
            runs: 4,
            slot_grid: vec![0.5, 1.0, 4.0],
            seed_base: 3,
            mode,
            ..Default::default()
        }
    }

    #[test]
    fn default_grid() {
        let g = default_slot_grid();
        assert_eq!(g.first(), Some(&0.125));
        assert_eq!(g.last(), Some(&128.0));
        assert_eq!(g.len(), 11);
        assert_eq!(grid_slot(0.125, 100), 13);
        assert_eq!(grid_slot(0.125, 1), 1);
        assert_eq!(grid_slot(1.0, 200), 200);
    }

    #[test]
    fn validation() {
        assert!(ExperimentSpec::default().validate().is_ok());
        let bad = [
            ExperimentSpec { sizes: vec![], ..Default::default() },
            ExperimentSpec { sizes: vec![0], ..Default::default() },
            ExperimentSpec { weight_lo: -1.0, ..Default::default() },
            ExperimentSpec { weight_hi: 10.0, ..Default::default() },
            ExperimentSpec { runs: 0, ..Default::default() },
            ExperimentSpec { slot_grid: vec![1.0, 1.0], ..Default::default() },
            ExperimentSpec { slot_grid: vec![0.0, 1.0], ..Default::default() },
        ];
        for spec in bad {
            assert!(run_experiment(&spec).is_err(), "{spec:?}");
        }
    }

    #[test]
    fn single_port_ratio_is_one() {
        let spec = ExperimentSpec { sizes: vec![1], runs: 3, ..Default::default() };
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 11);
        assert!(rows.iter().all(|r| r.mean_ratio == 1.0 && r.min_ratio == 1.0 && r.max_ratio == 1.0));
    }

    #[test]
    fn rows_are_sane_and_monotone() {
        let rows = run_experiment(&small(Mode::Sequential)).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert!(r.min_ratio <= r.mean_ratio && r.mean_ratio <= r.max_ratio);
            assert!(r.max_ratio <= 1.0 + 1e-12);
            assert!(r.dist.is_none());
        }
        for w in rows.windows(2).filter(|w| w[0].n == w[1].n) {
            assert!(w[1].min_ratio >= w[0].min_ratio - 1.0);
            assert!(w[1].mean_ratio >= w[0].mean_ratio);
        }
    }

    #[test]
    fn distsim_mode_matches_sequential_ratios() {
        let seq = run_experiment(&small(Mode::Sequential)).unwrap();
        let dist = run_experiment(&small(Mode::Distsim)).unwrap();
        for (a, b) in seq.iter().zip(&dist) {
            assert_eq!(a.mean_ratio, b.mean_ratio);
            assert!(b.dist.unwrap().rounds_per_slot > 0.0);
        }
    }

    #[test]
    fn csv_is_reproducible() {
        let render = |mode| {
            let rows = run_experiment(&small(mode)).unwrap();
            let mut buf = Vec::new();
            write_csv(&rows, mode, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = render(Mode::Sequential);
        assert_eq!(a, render(Mode::Sequential));
        assert!(a.starts_with("n,t_over_n,slot,runs,mean_ratio,std_ratio,min_ratio,max_ratio\n"));
        assert_eq!(a.lines().count(), 7);
        let d = render(Mode::Distsim);
        assert!(d.lines().next().unwrap().ends_with(",rounds_per_slot,messages_per_slot"));
    }

    #[test]
    fn distsim_check_agrees() {
        let m = generate_complete_uniform(16, 10.0, 100.0, 0).unwrap();
        let rows = distsim_check(&m, 20, 1).unwrap();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|r| r.matches_sequential && r.broker_max_in_degree <= 2));
        let mut buf = Vec::new();
        write_distsim_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 21);
    }
}

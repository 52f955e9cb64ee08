//! The repeated driver: feed the same instance to one sampling, completion
//! and merge step per slot, carrying the merged matching forward.

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::instance::WeightMatrix;
use crate::matching::{merge_metered, populate_metered, FullMatching};
use crate::meter::OpCount;
use crate::qps::{accept_metered, build_tables_metered, propose_batch_metered, PartialMatching, PortRngs, ProposalBatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub slots: usize,
    pub seed: u64,
    /// Trajectory stride; the final slot is always recorded.
    pub record_every: usize,
}

impl SolverConfig {
    pub fn new(slots: usize, seed: u64) -> Self {
        Self {
            slots,
            seed,
            record_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots == 0 {
            return Err(Error::invalid("slots must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub slot: usize,
    pub weight: f64,
}

/// Matching weight after selected slots. Slots increase strictly and
/// weights never decrease.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    entries: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn entries(&self) -> &[TrajectoryPoint] {
        &self.entries
    }

    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.entries.last()
    }

    pub fn weight_at(&self, slot: usize) -> Option<f64> {
        self.entries
            .binary_search_by_key(&slot, |p| p.slot)
            .ok()
            .map(|k| self.entries[k].weight)
    }

    pub(crate) fn push(&mut self, slot: usize, weight: f64) {
        debug_assert!(self.entries.last().is_none_or(|p| p.slot < slot && p.weight <= weight));
        self.entries.push(TrajectoryPoint { slot, weight });
    }
}

/// Slot-by-slot state of one run.
///
/// Starts from the identity matching. Alias tables are built once; proposals
/// are drawn in batches of at most `n` slots (fewer when the planned horizon
/// is closer), so memory stays O(n^2) for any run length.
#[derive(Debug, Clone)]
pub struct Solver<'a> {
    matrix: &'a WeightMatrix,
    tables: Vec<Option<AliasTable>>,
    rngs: PortRngs,
    batch: Option<ProposalBatch>,
    batch_pos: usize,
    horizon: Option<usize>,
    current: FullMatching,
    slot: usize,
    work: OpCount,
}

impl<'a> Solver<'a> {
    pub fn new(matrix: &'a WeightMatrix, seed: u64) -> Self {
        let mut work = OpCount::default();
        let tables = build_tables_metered(matrix, &mut work);
        Self {
            matrix,
            tables,
            rngs: PortRngs::new(seed, matrix.n()),
            batch: None,
            batch_pos: 0,
            horizon: None,
            current: FullMatching::identity(matrix.n()),
            slot: 0,
            work,
        }
    }

    /// Caps proposal batches so no draws are made past `slots`.
    pub fn with_horizon(mut self, slots: usize) -> Self {
        self.horizon = Some(slots);
        self
    }

    pub fn matrix(&self) -> &WeightMatrix {
        self.matrix
    }

    /// Slots completed so far.
    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn current(&self) -> &FullMatching {
        &self.current
    }

    pub fn current_weight(&self) -> f64 {
        self.current.weight(self.matrix).expect("dimensions agree")
    }

    /// Elementary operations spent so far, table construction included.
    pub fn work(&self) -> u64 {
        self.work.0
    }

    /// Proposals for the next slot, drawing a new batch when needed.
    pub fn next_proposals(&mut self) -> Vec<Option<usize>> {
        let exhausted = self.batch.as_ref().is_none_or(|b| self.batch_pos == b.slots());
        if exhausted {
            let n = self.matrix.n();
            let remaining = self.horizon.map_or(n, |h| h.saturating_sub(self.slot));
            let m = n.min(remaining).max(1);
            self.batch = Some(
                propose_batch_metered(self.matrix, &self.tables, m, &mut self.rngs, &mut self.work)
                    .expect("tables and rngs sized to the matrix"),
            );
            self.batch_pos = 0;
        }
        let batch = self.batch.as_ref().unwrap();
        let out = batch.slot(self.batch_pos).to_vec();
        self.batch_pos += 1;
        out
    }

    /// Sampling step only: the starter matching for the next slot.
    pub fn next_starter(&mut self) -> PartialMatching {
        let proposals = self.next_proposals();
        accept_metered(self.matrix, &proposals, &mut self.work).expect("proposals are in range")
    }

    /// Runs one slot and returns the new current matching.
    pub fn step(&mut self) -> &FullMatching {
        let starter = self.next_starter();
        let full = populate_metered(&starter, &mut self.work);
        self.current = merge_metered(&full, &self.current, self.matrix, &mut self.work).expect("dimensions agree");
        self.slot += 1;
        &self.current
    }

    /// Replaces the carried matching with an externally computed one for the
    /// slot just sampled; used by the distributed emulation.
    pub(crate) fn commit(&mut self, next: FullMatching) {
        debug_assert_eq!(next.n(), self.matrix.n());
        self.current = next;
        self.slot += 1;
    }
}

pub fn solve(matrix: &WeightMatrix, config: &SolverConfig) -> Result<(FullMatching, Trajectory)> {
    config.validate()?;
    let mut solver = Solver::new(matrix, config.seed).with_horizon(config.slots);
    let mut trajectory = Trajectory::default();
    for t in 1..=config.slots {
        solver.step();
        if t % config.record_every == 0 || t == config.slots {
            trajectory.push(t, solver.current_weight());
        }
    }
    Ok((solver.current, trajectory))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveUntil {
    pub matching: FullMatching,
    pub weight: f64,
    pub slots_used: usize,
    pub reached: bool,
}

/// Runs until the matching weighs at least `target_ratio * optimum` or
/// `max_slots` slots have run.
pub fn solve_until(
    matrix: &WeightMatrix,
    target_ratio: f64,
    optimum: f64,
    max_slots: usize,
    seed: u64,
) -> Result<SolveUntil> {
    if !(target_ratio > 0.0 && target_ratio < 1.0) {
        return Err(Error::invalid(format!("target ratio {target_ratio} must lie in (0, 1)")));
    }
    if !(optimum > 0.0) {
        return Err(Error::invalid("optimum must be positive"));
    }
    if max_slots == 0 {
        return Err(Error::invalid("max_slots must be at least 1"));
    }
    let goal = target_ratio * optimum;
    let mut solver = Solver::new(matrix, seed).with_horizon(max_slots);
    loop {
        solver.step();
        let weight = solver.current_weight();
        let reached = weight >= goal;
        if reached || solver.slot() == max_slots {
            return Ok(SolveUntil {
                matching: solver.current,
                weight,
                slots_used: solver.slot,
                reached,
            });
        }
    }
}

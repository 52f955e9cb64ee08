//! One full slot on the port network, and whole runs built from it.

use super::merge::parallel_merge;
use super::network::{DistStats, Envelope, Phase, PortNetwork};
use super::populate::parallel_populate_with;
use super::scan::ScanSchedule;
use crate::error::{Error, Result};
use crate::instance::WeightMatrix;
use crate::matching::FullMatching;
use crate::qps::PartialMatching;
use crate::solver::{Solver, SolverConfig, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Proposal {
    input: usize,
    queue: f64,
}

/// Proposals travel to the outputs with their queue lengths; each output
/// grants the longest (lowest input index on ties). Two rounds.
pub fn parallel_accept(matrix: &WeightMatrix, proposals: &[Option<usize>], net: &mut PortNetwork) -> Result<PartialMatching> {
    let n = matrix.n();
    Error::check_dim(n, proposals.len())?;
    Error::check_dim(2 * n, net.ports())?;
    if let Some(j) = proposals.iter().flatten().find(|j| **j >= n) {
        return Err(Error::invalid(format!("proposal to output {j} >= n = {n}")));
    }

    let sends = proposals
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|j| Envelope::new(i, n + j, Proposal { input: i, queue: matrix.get(i, j) })))
        .collect();
    let mut inbox = net.round(Phase::Accept, sends);

    let mut grants = Vec::new();
    for j in 0..n {
        let best = inbox.take(n + j).into_iter().map(|e| e.payload).reduce(|best, p| {
            if p.queue > best.queue || (p.queue == best.queue && p.input < best.input) {
                p
            } else {
                best
            }
        });
        if let Some(p) = best {
            grants.push(Envelope::new(n + j, p.input, j));
        }
    }
    let inbox = net.round(Phase::Accept, grants);

    let pairs: Vec<(usize, usize)> = (0..n)
        .filter_map(|i| inbox.get(i).first().map(|e| (i, e.payload)))
        .collect();
    PartialMatching::from_pairs(n, &pairs)
}

pub fn parallel_slot(
    matrix: &WeightMatrix,
    m_prev: &FullMatching,
    proposals: &[Option<usize>],
    net: &mut PortNetwork,
) -> Result<FullMatching> {
    parallel_slot_with(matrix, m_prev, proposals, net, ScanSchedule::default())
}

/// Accept, populate and merge, all on the network.
pub fn parallel_slot_with(
    matrix: &WeightMatrix,
    m_prev: &FullMatching,
    proposals: &[Option<usize>],
    net: &mut PortNetwork,
    kind: ScanSchedule,
) -> Result<FullMatching> {
    Error::check_dim(matrix.n(), m_prev.n())?;
    let starter = parallel_accept(matrix, proposals, net)?;
    let full = parallel_populate_with(&starter, net, kind);
    parallel_merge(&full, m_prev, matrix, net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotStats {
    pub slot: usize,
    pub stats: DistStats,
    pub broker: DistStats,
}

/// The repeated driver with every slot executed on the port network.
///
/// Proposals come from the same per-port random streams as
/// [`Solver`], so for equal seeds both produce the same matchings.
#[derive(Debug, Clone)]
pub struct DistributedSolver<'a> {
    inner: Solver<'a>,
    net: PortNetwork,
    schedule: ScanSchedule,
}

impl<'a> DistributedSolver<'a> {
    pub fn new(matrix: &'a WeightMatrix, seed: u64) -> Self {
        Self {
            inner: Solver::new(matrix, seed),
            net: PortNetwork::for_switch(matrix.n()),
            schedule: ScanSchedule::default(),
        }
    }

    pub fn with_horizon(mut self, slots: usize) -> Self {
        self.inner = self.inner.with_horizon(slots);
        self
    }

    pub fn with_schedule(mut self, schedule: ScanSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn slot(&self) -> usize {
        self.inner.slot()
    }

    pub fn current(&self) -> &FullMatching {
        self.inner.current()
    }

    pub fn current_weight(&self) -> f64 {
        self.inner.current_weight()
    }

    /// Runs one slot on a fresh round log and reports its cost.
    pub fn step(&mut self) -> SlotStats {
        let proposals = self.inner.next_proposals();
        self.net.reset();
        let next = parallel_slot_with(self.inner.matrix(), self.inner.current(), &proposals, &mut self.net, self.schedule)
            .expect("solver state is consistent");
        self.inner.commit(next);
        SlotStats {
            slot: self.inner.slot(),
            stats: self.net.stats(),
            broker: self.net.phase_stats(Phase::Broker),
        }
    }
}

/// Distributed counterpart of [`crate::solver::solve`], also returning the
/// cost of every slot.
pub fn solve_distributed(
    matrix: &WeightMatrix,
    config: &SolverConfig,
) -> Result<(FullMatching, Trajectory, Vec<SlotStats>)> {
    config.validate()?;
    let mut solver = DistributedSolver::new(matrix, config.seed).with_horizon(config.slots);
    let mut trajectory = Trajectory::default();
    let mut per_slot = Vec::with_capacity(config.slots);
    for t in 1..=config.slots {
        per_slot.push(solver.step());
        if t % config.record_every == 0 || t == config.slots {
            trajectory.push(t, solver.current_weight());
        }
    }
    Ok((solver.current().clone(), trajectory, per_slot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distsim::scan::ceil_log2;
    use crate::instance::generate_complete_uniform;
    use crate::qps::accept;
    use crate::solver::solve;

    #[test]
    fn accept_matches_sequential() {
        let m = generate_complete_uniform(5, 0.0, 3.0, 2).unwrap();
        let m = WeightMatrix::new(5, m.rows().flatten().map(|x| x.floor()).collect()).unwrap();
        let props = [Some(2), Some(2), None, Some(0), Some(2)];
        let mut net = PortNetwork::for_switch(5);
        assert_eq!(parallel_accept(&m, &props, &mut net).unwrap(), accept(&m, &props).unwrap());
        assert_eq!(net.stats().rounds, 2);
    }

    #[test]
    fn single_port_slot() {
        let m = WeightMatrix::from_rows(&[vec![2.0]]).unwrap();
        let mut net = PortNetwork::for_switch(1);
        let out = parallel_slot(&m, &FullMatching::identity(1), &[Some(0)], &mut net).unwrap();
        assert_eq!(out, FullMatching::identity(1));
        assert!(net.stats().rounds <= 8);
    }

    #[test]
    fn full_run_matches_sequential() {
        let m = generate_complete_uniform(64, 10.0, 100.0, 77).unwrap();
        let cfg = SolverConfig::new(64, 5);
        let (seq, seq_traj) = solve(&m, &cfg).unwrap();
        let (dist, dist_traj, stats) = solve_distributed(&m, &cfg).unwrap();
        assert_eq!(seq, dist);
        assert_eq!(seq_traj, dist_traj);
        let bound = 4 * ceil_log2(64) + 8;
        assert!(stats.iter().all(|s| s.stats.rounds <= bound));
        assert!(stats.iter().all(|s| s.broker.max_in_degree_per_round <= 2));
    }

    #[test]
    fn up_down_schedule_gives_same_matchings() {
        let m = generate_complete_uniform(20, 10.0, 100.0, 3).unwrap();
        let mut a = DistributedSolver::new(&m, 1);
        let mut b = DistributedSolver::new(&m, 1).with_schedule(ScanSchedule::UpDownSweep);
        for _ in 0..20 {
            let (sa, sb) = (a.step(), b.step());
            assert_eq!(a.current(), b.current());
            assert!(sb.stats.rounds >= sa.stats.rounds);
        }
    }
}

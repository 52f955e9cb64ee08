//! Prefix sums over a row of ports.
//!
//! A schedule is a list of rounds; in each round every `(src, dst)` pair has
//! `src` send its current partial sum to `dst`, which adds it to its own.
//! Sends read the values held at the start of the round.

use super::network::{Envelope, Phase, PortNetwork};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ScanSchedule {
    /// Ladner-Fischer minimum-depth network: `ceil(log2 n)` rounds; at level
    /// `d` the last port of each left half-block feeds the `2^d` ports of the
    /// right half.
    #[default]
    LadnerFischer,
    /// Work-efficient up-sweep then down-sweep over a binary tree:
    /// `2 ceil(log2 n) - 1` rounds, fewer than `2n` messages in total.
    UpDownSweep,
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

pub fn schedule(n: usize, kind: ScanSchedule) -> Vec<Vec<(usize, usize)>> {
    let levels = ceil_log2(n);
    let mut rounds = Vec::new();
    match kind {
        ScanSchedule::LadnerFischer => {
            for d in 0..levels {
                let low = (1usize << d) - 1;
                let round: Vec<_> = (0..n)
                    .filter(|k| k >> d & 1 == 1)
                    .map(|k| ((k & !low) - 1, k))
                    .collect();
                rounds.push(round);
            }
        }
        ScanSchedule::UpDownSweep => {
            for d in 0..levels {
                let span = 1usize << (d + 1);
                let round: Vec<_> = (span - 1..n).step_by(span).map(|k| (k - span / 2, k)).collect();
                rounds.push(round);
            }
            for d in (0..levels.saturating_sub(1)).rev() {
                let half = 1usize << d;
                let span = half << 1;
                let round: Vec<_> = (span + half - 1..n).step_by(span).map(|k| (k - half, k)).collect();
                rounds.push(round);
            }
        }
    }
    rounds.retain(|r| !r.is_empty());
    rounds
}

/// Runs several independent scans in the same rounds. Each group is a
/// bitmap laid over ports `offset..offset + len`.
pub(crate) fn concurrent_ranks(net: &mut PortNetwork, groups: &[(usize, &[bool])], kind: ScanSchedule) -> Vec<Vec<usize>> {
    let mut values: Vec<Vec<usize>> = groups
        .iter()
        .map(|(_, bits)| bits.iter().map(|&b| b as usize).collect())
        .collect();
    let schedules: Vec<_> = groups.iter().map(|(_, bits)| schedule(bits.len(), kind)).collect();
    let depth = schedules.iter().map(Vec::len).max().unwrap_or(0);
    for r in 0..depth {
        let mut outgoing = Vec::new();
        for (g, (offset, _)) in groups.iter().enumerate() {
            if let Some(round) = schedules[g].get(r) {
                outgoing.extend(round.iter().map(|&(src, dst)| Envelope::new(offset + src, offset + dst, values[g][src])));
            }
        }
        let mut inbox = net.round(Phase::Rank, outgoing);
        for (vals, (offset, _)) in values.iter_mut().zip(groups) {
            for (k, v) in vals.iter_mut().enumerate() {
                for env in inbox.take(offset + k) {
                    *v += env.payload;
                }
            }
        }
    }
    values
}

/// Inclusive prefix sums of `bitmap`, computed on ports `0..len` of `net`
/// with the default schedule: entry `i` is the number of set bits at
/// positions `0..=i`.
pub fn prefix_sum_rank(bitmap: &[bool], net: &mut PortNetwork) -> Vec<usize> {
    prefix_sum_rank_with(bitmap, net, ScanSchedule::default())
}

pub fn prefix_sum_rank_with(bitmap: &[bool], net: &mut PortNetwork, kind: ScanSchedule) -> Vec<usize> {
    assert!(bitmap.len() <= net.ports(), "bitmap longer than the network");
    concurrent_ranks(net, &[(0, bitmap)], kind).pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sequential(bits: &[bool]) -> Vec<usize> {
        bits.iter()
            .scan(0, |acc, &b| {
                *acc += b as usize;
                Some(*acc)
            })
            .collect()
    }

    fn bits(s: &[u8]) -> Vec<bool> {
        s.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn small_example() {
        let mut net = PortNetwork::new(4);
        assert_eq!(prefix_sum_rank(&bits(&[1, 0, 1, 1]), &mut net), vec![1, 1, 2, 3]);
        assert_eq!(net.stats().rounds, 2);
    }

    #[test]
    fn all_zero() {
        let mut net = PortNetwork::new(6);
        assert_eq!(prefix_sum_rank(&[false; 6], &mut net), vec![0; 6]);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 1024, 1025].map(ceil_log2), [0, 1, 2, 2, 3, 10, 11]);
    }

    #[test]
    fn every_size_and_schedule_matches_scan() {
        for kind in [ScanSchedule::LadnerFischer, ScanSchedule::UpDownSweep] {
            for n in 1..=130 {
                let b: Vec<bool> = (0..n).map(|k| (k * 7 + n) % 3 != 0).collect();
                let mut net = PortNetwork::new(n);
                assert_eq!(prefix_sum_rank_with(&b, &mut net, kind), sequential(&b), "{kind:?} n = {n}");
                let s = net.stats();
                let lg = ceil_log2(n);
                match kind {
                    ScanSchedule::LadnerFischer => assert_eq!(s.rounds, lg),
                    ScanSchedule::UpDownSweep => {
                        assert!(s.rounds <= (2 * lg).saturating_sub(1));
                        assert!(s.messages < 2 * n);
                    }
                }
                assert!(s.max_in_degree_per_round <= 1);
            }
        }
    }

    #[test]
    fn thousand_ports_within_twelve_rounds() {
        let b: Vec<bool> = (0..1024u64).map(|k| k.wrapping_mul(2654435761) >> 7 & 1 == 1).collect();
        let mut net = PortNetwork::new(1024);
        assert_eq!(prefix_sum_rank(&b, &mut net), sequential(&b));
        assert!(net.stats().rounds <= ceil_log2(1024) + 2);
        assert!(net.log().iter().all(|r| r.messages <= 1024));
    }

    proptest! {
        #[test]
        fn matches_sequential(b in prop::collection::vec(any::<bool>(), 1..300), up_down in any::<bool>()) {
            let kind = if up_down { ScanSchedule::UpDownSweep } else { ScanSchedule::LadnerFischer };
            let mut net = PortNetwork::new(b.len());
            prop_assert_eq!(prefix_sum_rank_with(&b, &mut net, kind), sequential(&b));
        }
    }
}

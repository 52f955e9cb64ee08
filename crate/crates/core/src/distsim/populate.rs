//! Round-robin completion in O(log n) rounds: ports learn their rank among
//! the unmatched ports of their side by a prefix sum, then the k-th
//! unmatched input and output swap identities through input port `k - 1`.

use super::network::{Envelope, Phase, PortNetwork};
use super::scan::{concurrent_ranks, ScanSchedule};
use crate::matching::FullMatching;
use crate::qps::PartialMatching;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BrokerMsg {
    Input(usize),
    Output(usize),
}

pub fn parallel_populate(partial: &PartialMatching, net: &mut PortNetwork) -> FullMatching {
    parallel_populate_with(partial, net, ScanSchedule::default())
}

/// Runs on a [`PortNetwork::for_switch`] network: input `i` is port `i`,
/// output `j` is port `n + j`.
pub fn parallel_populate_with(partial: &PartialMatching, net: &mut PortNetwork, kind: ScanSchedule) -> FullMatching {
    let n = partial.n();
    assert_eq!(net.ports(), 2 * n, "network must have one port per input and output");
    let out_port = |j: usize| n + j;

    let free_in: Vec<bool> = partial.match_of_input().iter().map(Option::is_none).collect();
    let free_out: Vec<bool> = partial.match_of_output().iter().map(Option::is_none).collect();
    let ranks = concurrent_ranks(net, &[(0, &free_in), (n, &free_out)], kind);
    let (in_rank, out_rank) = (&ranks[0], &ranks[1]);

    // Round 1: the k-th free input registers with broker k - 1.
    let sends = (0..n)
        .filter(|&i| free_in[i])
        .map(|i| Envelope::new(i, in_rank[i] - 1, BrokerMsg::Input(i)))
        .collect();
    let mut inbox = net.round(Phase::Broker, sends);
    let mut held_input = vec![None; n];
    for (b, slot) in held_input.iter_mut().enumerate() {
        for env in inbox.take(b) {
            if let BrokerMsg::Input(i) = env.payload {
                *slot = Some(i);
            }
        }
    }

    // Round 2: the k-th free output registers with the same broker.
    let sends = (0..n)
        .filter(|&j| free_out[j])
        .map(|j| Envelope::new(out_port(j), out_rank[j] - 1, BrokerMsg::Output(j)))
        .collect();
    let mut inbox = net.round(Phase::Broker, sends);
    let mut held_output = vec![None; n];
    for (b, slot) in held_output.iter_mut().enumerate() {
        for env in inbox.take(b) {
            if let BrokerMsg::Output(j) = env.payload {
                *slot = Some(j);
            }
        }
    }

    // Round 3: each broker introduces its pair to each other.
    let mut sends = Vec::new();
    for b in 0..n {
        match (held_input[b], held_output[b]) {
            (Some(i), Some(j)) => {
                sends.push(Envelope::new(b, i, BrokerMsg::Output(j)));
                sends.push(Envelope::new(b, out_port(j), BrokerMsg::Input(i)));
            }
            (None, None) => {}
            _ => unreachable!("free inputs and outputs come in equal numbers"),
        }
    }
    let inbox = net.round(Phase::Broker, sends);

    let perm = (0..n)
        .map(|i| match partial.match_of_input()[i] {
            Some(j) => j,
            None => match inbox.get(i) {
                [Envelope { payload: BrokerMsg::Output(j), .. }] => *j,
                other => unreachable!("free input {i} received {other:?}"),
            },
        })
        .collect();
    FullMatching::new(perm).expect("broker exchange yields a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::populate;

    #[test]
    fn fills_the_gaps() {
        let p = PartialMatching::from_pairs(4, &[(0, 2), (2, 0)]).unwrap();
        let mut net = PortNetwork::for_switch(4);
        let full = parallel_populate(&p, &mut net);
        assert_eq!(full.as_slice(), &[2, 1, 0, 3]);
        assert_eq!(full, populate(&p));
    }

    #[test]
    fn empty_partial_uses_three_broker_rounds() {
        let mut net = PortNetwork::for_switch(8);
        let full = parallel_populate(&PartialMatching::empty(8), &mut net);
        assert_eq!(full, FullMatching::identity(8));
        let broker = net.phase_stats(Phase::Broker);
        assert_eq!(broker.rounds, 3);
        assert!(broker.max_in_degree_per_round <= 2);
    }

    #[test]
    fn full_starter_needs_no_broker_traffic() {
        let p = FullMatching::new(vec![3, 1, 0, 2]).unwrap().to_partial();
        let mut net = PortNetwork::for_switch(4);
        assert_eq!(parallel_populate(&p, &mut net).as_slice(), &[3, 1, 0, 2]);
        assert_eq!(net.phase_stats(Phase::Broker).messages, 0);
        assert_eq!(net.phase_stats(Phase::Broker).rounds, 3);
    }
}

//! Synchronous message-passing machine with per-round accounting.

pub type PortId = usize;

/// Pipeline stage a round belongs to, for per-stage statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Accept,
    Rank,
    Broker,
    Merge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<M> {
    pub from: PortId,
    pub to: PortId,
    pub payload: M,
}

impl<M> Envelope<M> {
    pub fn new(from: PortId, to: PortId, payload: M) -> Self {
        Self { from, to, payload }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRecord {
    pub phase: Phase,
    pub messages: usize,
    pub max_in_degree: usize,
    pub max_out_degree: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DistStats {
    pub rounds: usize,
    pub messages: usize,
    pub max_in_degree_per_round: usize,
    pub max_out_degree_per_round: usize,
}

impl DistStats {
    fn from_records<'a>(records: impl Iterator<Item = &'a RoundRecord>) -> Self {
        records.fold(Self::default(), |acc, r| Self {
            rounds: acc.rounds + 1,
            messages: acc.messages + r.messages,
            max_in_degree_per_round: acc.max_in_degree_per_round.max(r.max_in_degree),
            max_out_degree_per_round: acc.max_out_degree_per_round.max(r.max_out_degree),
        })
    }
}

/// Messages delivered at the start of a round, grouped by destination.
#[derive(Debug)]
pub struct Inboxes<M> {
    boxes: Vec<Vec<Envelope<M>>>,
}

impl<M> Inboxes<M> {
    pub fn take(&mut self, port: PortId) -> Vec<Envelope<M>> {
        std::mem::take(&mut self.boxes[port])
    }

    pub fn get(&self, port: PortId) -> &[Envelope<M>] {
        &self.boxes[port]
    }
}

/// A set of ports that exchange messages in lock-step rounds.
///
/// Everything handed to [`round`](Self::round) was sent during that round and
/// is returned as the inboxes readable in the next one. A message a port
/// addresses to itself stays local: it is delivered but not counted.
#[derive(Debug, Clone)]
pub struct PortNetwork {
    ports: usize,
    log: Vec<RoundRecord>,
}

impl PortNetwork {
    pub fn new(ports: usize) -> Self {
        Self { ports, log: Vec::new() }
    }

    /// Network of a switch with `n` input ports `0..n` and `n` output ports
    /// `n..2n`.
    pub fn for_switch(n: usize) -> Self {
        Self::new(2 * n)
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn round<M>(&mut self, phase: Phase, outgoing: Vec<Envelope<M>>) -> Inboxes<M> {
        let mut boxes: Vec<Vec<Envelope<M>>> = (0..self.ports).map(|_| Vec::new()).collect();
        let mut out_degree = vec![0usize; self.ports];
        let mut messages = 0;
        for env in outgoing {
            assert!(
                env.from < self.ports && env.to < self.ports,
                "message {} -> {} outside a {}-port network",
                env.from,
                env.to,
                self.ports
            );
            if env.from != env.to {
                messages += 1;
                out_degree[env.from] += 1;
            }
            boxes[env.to].push(env);
        }
        let max_in_degree = boxes
            .iter()
            .map(|b| b.iter().filter(|e| e.from != e.to).count())
            .max()
            .unwrap_or(0);
        self.log.push(RoundRecord {
            phase,
            messages,
            max_in_degree,
            max_out_degree: out_degree.into_iter().max().unwrap_or(0),
        });
        Inboxes { boxes }
    }

    pub fn log(&self) -> &[RoundRecord] {
        &self.log
    }

    pub fn stats(&self) -> DistStats {
        DistStats::from_records(self.log.iter())
    }

    pub fn phase_stats(&self, phase: Phase) -> DistStats {
        DistStats::from_records(self.log.iter().filter(|r| r.phase == phase))
    }

    /// Clears the round log, keeping the port count.
    pub fn reset(&mut self) {
        self.log.clear();
    }
}

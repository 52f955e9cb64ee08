//! Cycle-wise merge by pointer doubling.
//!
//! Input `i` links to its successor `prev^-1(new(i))` on the alternating
//! cycle through it. Each doubling round a port learns the summary of the
//! window of `2^k` ports that follows it; once a window wraps past the
//! cycle's minimum-index port twice, the summary closes over exactly one
//! full turn and carries both cycle sums. Sums are exact, so every port of a
//! cycle reaches the decision the sequential merge makes.

use std::cmp::Ordering;

use super::network::{Envelope, Phase, PortNetwork};
use super::scan::ceil_log2;
use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::instance::WeightMatrix;
use crate::matching::FullMatching;

#[derive(Debug, Clone, Default, PartialEq)]
struct SumPair {
    new: ExactSum,
    prev: ExactSum,
}

impl SumPair {
    fn plus(&self, other: &SumPair) -> SumPair {
        SumPair {
            new: self.new.combined(&other.new),
            prev: self.prev.combined(&other.prev),
        }
    }
}

/// Summary of a walk of consecutive cycle ports.
#[derive(Debug, Clone, PartialEq)]
enum Window {
    /// The window holds its minimum port `leader` once; `before` sums the
    /// ports ahead of it, `from` the leader and the ports after it.
    Open { leader: usize, before: SumPair, from: SumPair },
    /// The walk covered the whole cycle; `total` sums it exactly once.
    Closed { leader: usize, total: SumPair },
}

impl Window {
    fn single(port: usize, w_new: f64, w_prev: f64) -> Self {
        let mut from = SumPair::default();
        from.new.add(w_new);
        from.prev.add(w_prev);
        Window::Open {
            leader: port,
            before: SumPair::default(),
            from,
        }
    }

    /// Summary of `self` followed immediately by `next`.
    fn then(&self, next: &Window) -> Window {
        match (self, next) {
            (Window::Closed { .. }, _) => self.clone(),
            (_, Window::Closed { .. }) => next.clone(),
            (
                Window::Open { leader: a, before: ab, from: af },
                Window::Open { leader: b, before: bb, from: bf },
            ) => match a.cmp(b) {
                Ordering::Less => Window::Open {
                    leader: *a,
                    before: ab.clone(),
                    from: af.plus(bb).plus(bf),
                },
                Ordering::Greater => Window::Open {
                    leader: *b,
                    before: ab.plus(af).plus(bb),
                    from: bf.clone(),
                },
                // Consecutive occurrences of the leader bound one full turn.
                Ordering::Equal => Window::Closed {
                    leader: *a,
                    total: af.plus(bb),
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MergeMsg {
    Successor(usize),
    Predecessor(usize),
    /// Sent to the predecessor: the sender's successor pointer and window.
    Forward { succ: usize, window: Window },
    /// Sent to the successor: the sender's predecessor pointer.
    Backward { pred: usize },
    Partner(usize),
}

/// Number of doubling rounds that close every window of an `n`-port switch.
pub(crate) fn doubling_rounds(n: usize) -> usize {
    ceil_log2(n) + 1
}

/// Same result as [`crate::matching::merge`], computed on a
/// [`PortNetwork::for_switch`] network in `ceil(log2 n) + 3` rounds.
pub fn parallel_merge(
    m_new: &FullMatching,
    m_prev: &FullMatching,
    matrix: &WeightMatrix,
    net: &mut PortNetwork,
) -> Result<FullMatching> {
    let n = matrix.n();
    Error::check_dim(n, m_new.n())?;
    Error::check_dim(n, m_prev.n())?;
    Error::check_dim(2 * n, net.ports())?;
    let out_port = |j: usize| n + j;

    // Each output knows both of its partners; it links them up.
    let new_inv = m_new.inverse();
    let prev_inv = m_prev.inverse();
    let mut sends = Vec::with_capacity(2 * n);
    for j in 0..n {
        sends.push(Envelope::new(out_port(j), new_inv[j], MergeMsg::Successor(prev_inv[j])));
        sends.push(Envelope::new(out_port(j), prev_inv[j], MergeMsg::Predecessor(new_inv[j])));
    }
    let mut inbox = net.round(Phase::Merge, sends);
    let mut succ = vec![usize::MAX; n];
    let mut pred = vec![usize::MAX; n];
    for i in 0..n {
        for env in inbox.take(i) {
            match env.payload {
                MergeMsg::Successor(s) => succ[i] = s,
                MergeMsg::Predecessor(p) => pred[i] = p,
                other => unreachable!("unexpected {other:?}"),
            }
        }
    }

    // Queue lengths of an input's own row are local to it.
    let mut window: Vec<Window> = (0..n)
        .map(|i| Window::single(i, matrix.get(i, m_new.output_of(i)), matrix.get(i, m_prev.output_of(i))))
        .collect();

    for _ in 0..doubling_rounds(n) {
        let mut sends = Vec::with_capacity(2 * n);
        for j in 0..n {
            sends.push(Envelope::new(j, pred[j], MergeMsg::Forward { succ: succ[j], window: window[j].clone() }));
            sends.push(Envelope::new(j, succ[j], MergeMsg::Backward { pred: pred[j] }));
        }
        let mut inbox = net.round(Phase::Merge, sends);
        for i in 0..n {
            for env in inbox.take(i) {
                match env.payload {
                    MergeMsg::Forward { succ: s, window: w } => {
                        window[i] = window[i].then(&w);
                        succ[i] = s;
                    }
                    MergeMsg::Backward { pred: p } => pred[i] = p,
                    other => unreachable!("unexpected {other:?}"),
                }
            }
        }
    }

    let perm: Vec<usize> = (0..n)
        .map(|i| match &window[i] {
            Window::Closed { total, .. } if total.new.cmp_exact(&total.prev) == Ordering::Greater => m_new.output_of(i),
            Window::Closed { .. } => m_prev.output_of(i),
            Window::Open { .. } => unreachable!("window of input {i} still open"),
        })
        .collect();

    // Outputs learn the partner the merge left them with.
    let sends = perm.iter().enumerate().map(|(i, &j)| Envelope::new(i, out_port(j), MergeMsg::Partner(i))).collect();
    net.round(Phase::Merge, sends);

    FullMatching::new(perm)
}

/// Leader (minimum input index) of the cycle through every input, as found
/// by the doubling rounds. Exposed for tests.
#[cfg(test)]
fn leaders(m_new: &FullMatching, m_prev: &FullMatching, matrix: &WeightMatrix) -> Vec<usize> {
    let n = matrix.n();
    let prev_inv = m_prev.inverse();
    let succ0: Vec<usize> = (0..n).map(|i| prev_inv[m_new.output_of(i)]).collect();
    let mut succ = succ0.clone();
    let mut window: Vec<Window> = (0..n).map(|i| Window::single(i, 0.0, 0.0)).collect();
    for _ in 0..doubling_rounds(n) {
        let snapshot = window.clone();
        let succ_snapshot = succ.clone();
        for i in 0..n {
            window[i] = snapshot[i].then(&snapshot[succ_snapshot[i]]);
            succ[i] = succ_snapshot[succ_snapshot[i]];
        }
    }
    window
        .iter()
        .map(|w| match w {
            Window::Closed { leader, .. } => *leader,
            Window::Open { .. } => panic!("open window"),
        })
        .collect()
}

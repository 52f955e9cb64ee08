//! Queue-proportional sampling.
//!
//! Every input port proposes one output, drawn with probability proportional
//! to its queue lengths; every output accepts the proposal backed by its
//! longest queue. Proposals for many slots are drawn in one batch per port
//! from prebuilt alias tables, which costs O(n + m) per port for `m` slots.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alias::AliasTable;
use crate::error::{Error, Result};
use crate::instance::WeightMatrix;
use crate::meter::Meter;

/// One independent random stream per input port.
///
/// Port `i` draws from stream `i` of a ChaCha8 generator keyed by the seed,
/// so the proposals a port makes depend only on the seed and how many it
/// has made so far, never on batch boundaries.
#[derive(Debug, Clone)]
pub struct PortRngs(Vec<ChaCha8Rng>);

impl PortRngs {
    pub fn new(seed: u64, n: usize) -> Self {
        Self(
            (0..n as u64)
                .map(|port| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(port);
                    rng
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn port(&mut self, i: usize) -> &mut ChaCha8Rng {
        &mut self.0[i]
    }
}

/// Alias tables for every row of `matrix`; `None` marks an all-zero row,
/// whose port never proposes.
pub fn build_tables(matrix: &WeightMatrix) -> Vec<Option<AliasTable>> {
    build_tables_metered(matrix, &mut ())
}

pub fn build_tables_metered(matrix: &WeightMatrix, meter: &mut impl Meter) -> Vec<Option<AliasTable>> {
    matrix
        .rows()
        .map(|row| match AliasTable::build_metered(row, meter) {
            Ok(t) => Some(t),
            Err(Error::EmptyDistribution) => None,
            Err(e) => unreachable!("matrix rows are validated: {e}"),
        })
        .collect()
}

/// Proposals for `m` consecutive slots, slot-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProposalBatch {
    n: usize,
    m: usize,
    proposals: Vec<Option<usize>>,
}

impl ProposalBatch {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slots(&self) -> usize {
        self.m
    }

    /// Output proposed by each input in slot `t` of the batch.
    pub fn slot(&self, t: usize) -> &[Option<usize>] {
        &self.proposals[t * self.n..(t + 1) * self.n]
    }
}

pub fn propose_batch(
    matrix: &WeightMatrix,
    tables: &[Option<AliasTable>],
    m: usize,
    rngs: &mut PortRngs,
) -> Result<ProposalBatch> {
    propose_batch_metered(matrix, tables, m, rngs, &mut ())
}

pub fn propose_batch_metered(
    matrix: &WeightMatrix,
    tables: &[Option<AliasTable>],
    m: usize,
    rngs: &mut PortRngs,
    meter: &mut impl Meter,
) -> Result<ProposalBatch> {
    let n = matrix.n();
    Error::check_dim(n, tables.len())?;
    Error::check_dim(n, rngs.len())?;
    if m == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    // Streams are per port, so filling slot by slot draws the same values
    // as port by port while writing the buffer in order.
    let mut proposals = vec![None; m * n];
    for row in proposals.chunks_exact_mut(n) {
        for (i, (slot, table)) in row.iter_mut().zip(tables).enumerate() {
            if let Some(table) = table {
                *slot = Some(table.sample(rngs.port(i)));
            }
        }
    }
    meter.tick((m * tables.iter().flatten().count()) as u64);
    Ok(ProposalBatch { n, m, proposals })
}

/// A possibly partial matching, stored from both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatching {
    match_of_input: Vec<Option<usize>>,
    match_of_output: Vec<Option<usize>>,
}

impl PartialMatching {
    pub fn empty(n: usize) -> Self {
        Self {
            match_of_input: vec![None; n],
            match_of_output: vec![None; n],
        }
    }

    /// Builds a matching from `(input, output)` pairs, rejecting any port
    /// used twice.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::empty(n);
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("pair ({i}, {j}) out of range for n = {n}")));
            }
            if m.match_of_input[i].is_some() || m.match_of_output[j].is_some() {
                return Err(Error::invalid(format!("port reused by pair ({i}, {j})")));
            }
            m.match_of_input[i] = Some(j);
            m.match_of_output[j] = Some(i);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.match_of_input.len()
    }

    pub fn match_of_input(&self) -> &[Option<usize>] {
        &self.match_of_input
    }

    pub fn match_of_output(&self) -> &[Option<usize>] {
        &self.match_of_output
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.match_of_input
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.pairs().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.match_of_input.iter().all(Option::is_some)
    }

    pub fn weight(&self, matrix: &WeightMatrix) -> Result<f64> {
        Error::check_dim(matrix.n(), self.n())?;
        Ok(crate::exact::exact_sum(self.pairs().map(|(i, j)| matrix.get(i, j))))
    }

    /// Both sides agree and no port appears twice.
    pub fn is_consistent(&self) -> bool {
        let n = self.n();
        self.match_of_output.len() == n
            && self.match_of_input.iter().enumerate().all(|(i, j)| match j {
                Some(j) => *j < n && self.match_of_output[*j] == Some(i),
                None => true,
            })
            && self.match_of_output.iter().enumerate().all(|(j, i)| match i {
                Some(i) => *i < n && self.match_of_input[*i] == Some(j),
                None => true,
            })
    }
}

/// Each output with at least one proposal takes the proposing input with the
/// longest queue toward it; ties go to the smallest input index.
pub fn accept(matrix: &WeightMatrix, proposals: &[Option<usize>]) -> Result<PartialMatching> {
    accept_metered(matrix, proposals, &mut ())
}

pub fn accept_metered(
    matrix: &WeightMatrix,
    proposals: &[Option<usize>],
    meter: &mut impl Meter,
) -> Result<PartialMatching> {
    let n = matrix.n();
    Error::check_dim(n, proposals.len())?;
    let mut winner: Vec<Option<usize>> = vec![None; n];
    let mut best = vec![0.0; n];
    for (i, p) in proposals.iter().enumerate() {
        let Some(j) = *p else { continue };
        if j >= n {
            return Err(Error::invalid(format!("input {i} proposed output {j} >= n = {n}")));
        }
        let w = matrix.get(i, j);
        if winner[j].is_none() || w > best[j] {
            winner[j] = Some(i);
            best[j] = w;
        }
    }
    meter.tick(2 * n as u64);
    let mut m = PartialMatching::empty(n);
    for (j, w) in winner.into_iter().enumerate() {
        if let Some(i) = w {
            m.match_of_input[i] = Some(j);
            m.match_of_output[j] = Some(i);
        }
    }
    Ok(m)
}

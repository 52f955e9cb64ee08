//! Full matchings, round-robin completion of partial matchings, and the
//! cycle-decomposition merge that keeps whichever of two matchings is
//! heavier on every alternating cycle of their union.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exact::{exact_sum, ExactSum};
use crate::instance::WeightMatrix;
use crate::meter::Meter;
use crate::qps::PartialMatching;

/// A perfect matching: input `i` is paired with output `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FullMatching {
    perm: Vec<usize>,
}

impl FullMatching {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::invalid(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Self { perm })
    }

    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    #[inline]
    pub fn output_of(&self, input: usize) -> usize {
        self.perm[input]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.perm.iter().copied().enumerate()
    }

    /// `inverse()[j]` is the input matched to output `j`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        inv
    }

    /// Total weight, correctly rounded (so it is monotone in the exact weight).
    pub fn weight(&self, matrix: &WeightMatrix) -> Result<f64> {
        Error::check_dim(matrix.n(), self.n())?;
        Ok(exact_sum(self.pairs().map(|(i, j)| matrix.get(i, j))))
    }

    pub fn to_partial(&self) -> PartialMatching {
        let pairs: Vec<_> = self.pairs().collect();
        PartialMatching::from_pairs(self.n(), &pairs).expect("a permutation is a valid matching")
    }
}

impl From<FullMatching> for Vec<usize> {
    fn from(m: FullMatching) -> Self {
        m.perm
    }
}

/// Completes `partial` by pairing the k-th unmatched input with the k-th
/// unmatched output, both in ascending index order.
pub fn populate(partial: &PartialMatching) -> FullMatching {
    populate_metered(partial, &mut ())
}

pub fn populate_metered(partial: &PartialMatching, meter: &mut impl Meter) -> FullMatching {
    let n = partial.n();
    let mut free_outputs = partial
        .match_of_output()
        .iter()
        .enumerate()
        .filter(|(_, i)| i.is_none())
        .map(|(j, _)| j);
    let perm = partial
        .match_of_input()
        .iter()
        .map(|j| match j {
            Some(j) => *j,
            None => free_outputs.next().expect("equal numbers of free inputs and outputs"),
        })
        .collect();
    meter.tick(2 * n as u64);
    FullMatching { perm }
}

/// Alternating cycles of `m_new ∪ m_prev`, each listed by its inputs in walk
/// order: from input `i` go to output `m_new(i)`, then back to the input
/// `m_prev` pairs with that output. Walks start at the lowest unvisited
/// input. An edge shared by both matchings is a cycle of one input.
pub fn cycles(m_new: &FullMatching, m_prev: &FullMatching) -> Result<Vec<Vec<usize>>> {
    Error::check_dim(m_prev.n(), m_new.n())?;
    let prev_inv = m_prev.inverse();
    let mut visited = vec![false; m_new.n()];
    let mut out = Vec::new();
    for start in 0..m_new.n() {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            cycle.push(i);
            i = prev_inv[m_new.output_of(i)];
        }
        out.push(cycle);
    }
    Ok(out)
}

/// Decides one cycle: `Greater` keeps the new edges, anything else keeps the
/// previous ones. The comparison is exact: a rounded comparison is used only
/// when its error bound cannot flip the sign.
fn compare_cycle(matrix: &WeightMatrix, inputs: &[usize], m_new: &FullMatching, m_prev: &FullMatching) -> Ordering {
    let (mut s_new, mut s_prev) = (0.0, 0.0);
    for &i in inputs {
        s_new += matrix.get(i, m_new.output_of(i));
        s_prev += matrix.get(i, m_prev.output_of(i));
    }
    let bound = (inputs.len() + 2) as f64 * f64::EPSILON * (s_new + s_prev);
    let diff = s_new - s_prev;
    if diff.abs() > bound {
        return diff.partial_cmp(&0.0).unwrap();
    }
    let exact_new: ExactSum = inputs.iter().map(|&i| matrix.get(i, m_new.output_of(i))).collect();
    let exact_prev: ExactSum = inputs.iter().map(|&i| matrix.get(i, m_prev.output_of(i))).collect();
    exact_new.cmp_exact(&exact_prev)
}

/// Per alternating cycle, keeps the sub-matching of larger total weight,
/// preferring `m_prev` on ties. The result weighs at least as much as
/// either argument.
pub fn merge(m_new: &FullMatching, m_prev: &FullMatching, matrix: &WeightMatrix) -> Result<FullMatching> {
    merge_metered(m_new, m_prev, matrix, &mut ())
}

pub fn merge_metered(
    m_new: &FullMatching,
    m_prev: &FullMatching,
    matrix: &WeightMatrix,
    meter: &mut impl Meter,
) -> Result<FullMatching> {
    let n = matrix.n();
    Error::check_dim(n, m_new.n())?;
    Error::check_dim(n, m_prev.n())?;

    let prev_inv = m_prev.inverse();
    let mut visited = vec![false; n];
    let mut perm = m_prev.perm.clone();
    let mut cycle = Vec::with_capacity(n);
    for start in 0..n {
        if visited[start] {
            continue;
        }
        cycle.clear();
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            cycle.push(i);
            i = prev_inv[m_new.perm[i]];
        }
        if cycle.len() > 1 && compare_cycle(matrix, &cycle, m_new, m_prev) == Ordering::Greater {
            for &i in &cycle {
                perm[i] = m_new.perm[i];
            }
        }
    }
    meter.tick(4 * n as u64);
    Ok(FullMatching { perm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_complete_uniform;
    use proptest::prelude::*;

    fn mat(rows: &[&[f64]]) -> WeightMatrix {
        WeightMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn fm(perm: &[usize]) -> FullMatching {
        FullMatching::new(perm.to_vec()).unwrap()
    }

    #[test]
    fn weights() {
        let m = mat(&[&[3.0, 1.0], &[2.0, 4.0]]);
        assert_eq!(fm(&[0, 1]).weight(&m).unwrap(), 7.0);
        assert_eq!(fm(&[1, 0]).weight(&m).unwrap(), 3.0);
        assert!(fm(&[0, 1, 2]).weight(&m).is_err());
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(FullMatching::new(vec![0, 0]).is_err());
        assert!(FullMatching::new(vec![0, 2]).is_err());
        assert!(FullMatching::new(vec![]).is_ok());
    }

    #[test]
    fn populate_pairs_by_rank() {
        let p = PartialMatching::from_pairs(4, &[(0, 2), (2, 0)]).unwrap();
        assert_eq!(populate(&p), fm(&[2, 1, 0, 3]));
    }

    #[test]
    fn populate_empty_is_identity() {
        assert_eq!(populate(&PartialMatching::empty(3)), FullMatching::identity(3));
    }

    #[test]
    fn populate_full_is_unchanged() {
        let full = fm(&[2, 0, 1]);
        assert_eq!(populate(&full.to_partial()), full);
    }

    #[test]
    fn merge_two_by_two() {
        // One 4-cycle; sub-matchings weigh 7 (identity) and 3 (swap).
        let m = mat(&[&[3.0, 1.0], &[2.0, 4.0]]);
        let merged = merge(&fm(&[0, 1]), &fm(&[1, 0]), &m).unwrap();
        assert_eq!(merged, fm(&[0, 1]));
        let merged = merge(&fm(&[1, 0]), &fm(&[0, 1]), &m).unwrap();
        assert_eq!(merged, fm(&[0, 1]));
    }

    #[test]
    fn merge_with_self_is_identity_op() {
        let m = generate_complete_uniform(5, 0.0, 1.0, 2).unwrap();
        let a = fm(&[3, 1, 4, 0, 2]);
        assert_eq!(merge(&a, &a, &m).unwrap(), a);
        assert!(cycles(&a, &a).unwrap().iter().all(|c| c.len() == 1));
    }

    #[test]
    fn merge_rotation_against_diagonal() {
        // One 6-cycle; the diagonal sums to 30, the rotation to 3.
        let m = mat(&[&[10.0, 1.0, 1.0], &[1.0, 10.0, 1.0], &[1.0, 1.0, 10.0]]);
        let merged = merge(&fm(&[1, 2, 0]), &FullMatching::identity(3), &m).unwrap();
        assert_eq!(merged, FullMatching::identity(3));
        assert_eq!(merged.weight(&m).unwrap(), 30.0);
        assert_eq!(cycles(&fm(&[1, 2, 0]), &FullMatching::identity(3)).unwrap(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn merge_tie_keeps_previous() {
        let m = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(merge(&fm(&[1, 0]), &fm(&[0, 1]), &m).unwrap(), fm(&[0, 1]));
    }

    #[test]
    fn merge_decides_cycles_independently() {
        // Inputs {0,1} and {2,3} form separate 4-cycles.
        let m = mat(&[
            &[5.0, 1.0, 0.0, 0.0],
            &[1.0, 5.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 5.0],
            &[0.0, 0.0, 5.0, 1.0],
        ]);
        let merged = merge(&fm(&[1, 0, 3, 2]), &fm(&[0, 1, 2, 3]), &m).unwrap();
        assert_eq!(merged, fm(&[0, 1, 3, 2]));
    }

    #[test]
    fn merge_sees_differences_below_rounding() {
        // 1e16 + 1 rounds to 1e16, so the rounded cycle sums tie.
        let m = mat(&[&[1e16, 1e16], &[0.0, 1.0]]);
        let (ident, swap) = (fm(&[0, 1]), fm(&[1, 0]));
        assert_eq!(1e16 + 1.0, 1e16 + 0.0);
        assert_eq!(merge(&ident, &swap, &m).unwrap(), ident);
        assert_eq!(merge(&swap, &ident, &m).unwrap(), ident);
    }

    #[test]
    fn merge_rejects_mismatched_sizes() {
        let m = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(merge(&fm(&[0, 1, 2]), &fm(&[0, 1]), &m).is_err());
        assert!(merge(&fm(&[0, 1, 2]), &fm(&[0, 1, 2]), &m).is_err());
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = FullMatching> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|p| FullMatching::new(p).unwrap())
    }

    fn arb_case() -> impl Strategy<Value = (WeightMatrix, FullMatching, FullMatching)> {
        (1usize..=12).prop_flat_map(|n| {
            (any::<u64>().prop_map(move |s| generate_complete_uniform(n, 0.0, 10.0, s).unwrap()), arb_perm(n), arb_perm(n))
        })
    }

    proptest! {
        #[test]
        fn merge_dominates_both((m, a, b) in arb_case()) {
            let merged = merge(&a, &b, &m).unwrap();
            let w = merged.weight(&m).unwrap();
            prop_assert!(w >= a.weight(&m).unwrap());
            prop_assert!(w >= b.weight(&m).unwrap());
            for (i, j) in merged.pairs() {
                prop_assert!(a.output_of(i) == j || b.output_of(i) == j);
            }
        }

        #[test]
        fn cycles_cover_every_input_once((_m, a, b) in arb_case()) {
            let cs = cycles(&a, &b).unwrap();
            let mut count = vec![0; a.n()];
            for c in &cs {
                for &i in c {
                    count[i] += 1;
                }
            }
            prop_assert!(count.iter().all(|&c| c == 1));
        }

        #[test]
        fn populate_preserves_pairs(n in 1usize..20, seed in any::<u64>(), keep in any::<u32>()) {
            let base = FullMatching::new({
                let mut v: Vec<usize> = (0..n).collect();
                let mut s = seed;
                for k in (1..n).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    v.swap(k, (s >> 33) as usize % (k + 1));
                }
                v
            }).unwrap();
            let pairs: Vec<_> = base.pairs().filter(|(i, _)| keep >> (i % 32) & 1 == 1).collect();
            let partial = PartialMatching::from_pairs(n, &pairs).unwrap();
            let full = populate(&partial);
            prop_assert!(FullMatching::new(full.as_slice().to_vec()).is_ok());
            for (i, j) in pairs {
                prop_assert_eq!(full.output_of(i), j);
            }
        }
    }
}

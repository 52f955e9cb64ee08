//! Exact maximum weight perfect matching, used to score approximations.

use crate::error::{Error, Result};
use crate::instance::WeightMatrix;
use crate::matching::FullMatching;

/// Dual potentials with `row[i] + col[j] >= w[i][j]` everywhere and equality
/// on the matched edges; together they prove the matching optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub row: Vec<f64>,
    pub col: Vec<f64>,
}

impl DualCertificate {
    /// Checks feasibility and tightness up to `tol * max(1, max weight)`.
    pub fn verify(&self, matrix: &WeightMatrix, matching: &FullMatching, tol: f64) -> bool {
        let n = matrix.n();
        if self.row.len() != n || self.col.len() != n || matching.n() != n {
            return false;
        }
        let eps = tol * matrix.max_weight().max(1.0);
        let feasible = (0..n).all(|i| (0..n).all(|j| self.row[i] + self.col[j] >= matrix.get(i, j) - eps));
        let tight = matching
            .pairs()
            .all(|(i, j)| (self.row[i] + self.col[j] - matrix.get(i, j)).abs() <= eps);
        feasible && tight
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumResult {
    pub weight: f64,
    pub matching: FullMatching,
    /// Present for [`hungarian`] results.
    pub certificate: Option<DualCertificate>,
}

/// Shortest augmenting path Hungarian method with potentials, O(n^3).
pub fn hungarian(matrix: &WeightMatrix) -> OptimumResult {
    let n = matrix.n();
    // Minimize cost = -w. Index 0 is a virtual column; rows/cols are 1-based.
    let cost = |i: usize, j: usize| -matrix.get(i - 1, j - 1);
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0f64; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0, j) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[owner[j] - 1] = j - 1;
    }
    let matching = FullMatching::new(perm).expect("assignment is a permutation");
    let weight = matching.weight(matrix).expect("dimensions agree");
    // For cost -w, u + v <= -w; negating gives maximization duals.
    let certificate = DualCertificate {
        row: u[1..].iter().map(|x| -x).collect(),
        col: v[1..].iter().map(|x| -x).collect(),
    };
    OptimumResult {
        weight,
        matching,
        certificate: Some(certificate),
    }
}

pub const BRUTE_FORCE_MAX_N: usize = 10;

/// Enumerates all `n!` permutations; the first maximum in lexicographic
/// order wins.
pub fn brute_force(matrix: &WeightMatrix) -> Result<OptimumResult> {
    let n = matrix.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::invalid(format!(
            "brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }

    struct Search<'a> {
        matrix: &'a WeightMatrix,
        used: Vec<bool>,
        current: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        fn go(&mut self, row: usize) {
            let n = self.matrix.n();
            if row == n {
                let w = crate::exact::exact_sum(self.current.iter().enumerate().map(|(i, &j)| self.matrix.get(i, j)));
                if self.best.as_ref().is_none_or(|(b, _)| w > *b) {
                    self.best = Some((w, self.current.clone()));
                }
                return;
            }
            for j in 0..n {
                if !self.used[j] {
                    self.used[j] = true;
                    self.current.push(j);
                    self.go(row + 1);
                    self.current.pop();
                    self.used[j] = false;
                }
            }
        }
    }

    let mut s = Search {
        matrix,
        used: vec![false; n],
        current: Vec::with_capacity(n),
        best: None,
    };
    s.go(0);
    let (weight, perm) = s.best.expect("at least one permutation");
    Ok(OptimumResult {
        weight,
        matching: FullMatching::new(perm)?,
        certificate: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_complete_uniform;
    use proptest::prelude::*;

    fn mat(rows: &[&[f64]]) -> WeightMatrix {
        WeightMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn diagonal_dominant() {
        let m = mat(&[&[10.0, 1.0, 1.0], &[1.0, 10.0, 1.0], &[1.0, 1.0, 10.0]]);
        let h = hungarian(&m);
        assert_eq!(h.weight, 30.0);
        assert_eq!(h.matching, FullMatching::identity(3));
        assert!(h.certificate.as_ref().unwrap().verify(&m, &h.matching, 1e-9));
        assert_eq!(brute_force(&m).unwrap().weight, 30.0);
    }

    #[test]
    fn single_entry() {
        let m = mat(&[&[4.5]]);
        assert_eq!(hungarian(&m).weight, 4.5);
        assert_eq!(brute_force(&m).unwrap().weight, 4.5);
    }

    #[test]
    fn brute_force_small_cases() {
        let b = brute_force(&mat(&[&[3.0, 1.0], &[2.0, 4.0]])).unwrap();
        assert_eq!(b.weight, 7.0);
        assert_eq!(b.matching, FullMatching::identity(2));
        assert_eq!(brute_force(&WeightMatrix::zeros(4).unwrap()).unwrap().weight, 0.0);
        let c = WeightMatrix::new(5, vec![2.5; 25]).unwrap();
        assert_eq!(brute_force(&c).unwrap().weight, 12.5);
        assert_eq!(hungarian(&c).weight, 12.5);
    }

    #[test]
    fn brute_force_refuses_large_n() {
        let m = WeightMatrix::zeros(11).unwrap();
        assert!(brute_force(&m).is_err());
    }

    #[test]
    fn seven_by_seven_cross_check() {
        for seed in 0..10 {
            let m = generate_complete_uniform(7, 0.0, 100.0, seed).unwrap();
            let h = hungarian(&m);
            let b = brute_force(&m).unwrap();
            assert!((h.weight - b.weight).abs() <= 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn certificate_rejects_wrong_matching() {
        let m = mat(&[&[3.0, 1.0], &[2.0, 4.0]]);
        let h = hungarian(&m);
        let cert = h.certificate.unwrap();
        assert!(!cert.verify(&m, &FullMatching::new(vec![1, 0]).unwrap(), 1e-9));
    }

    #[test]
    fn certificate_holds_at_benchmark_scale() {
        let m = generate_complete_uniform(200, 10.0, 100.0, 4).unwrap();
        let h = hungarian(&m);
        assert!(h.certificate.as_ref().unwrap().verify(&m, &h.matching, 1e-9));
    }

    proptest! {
        #[test]
        fn hungarian_matches_enumeration(n in 1usize..=6, seed in any::<u64>(), sparse in any::<bool>()) {
            let mut m = generate_complete_uniform(n, 0.0, 20.0, seed).unwrap();
            if sparse {
                let w = m.rows().flatten().enumerate().map(|(k, x)| if k % 3 == 0 { 0.0 } else { x.floor() }).collect();
                m = WeightMatrix::new(n, w).unwrap();
            }
            let h = hungarian(&m);
            prop_assert!((h.weight - brute_force(&m).unwrap().weight).abs() <= 1e-9);
            prop_assert!(h.certificate.as_ref().unwrap().verify(&m, &h.matching, 1e-9));
        }

        #[test]
        fn row_permutation_invariance(n in 1usize..=8, seed in any::<u64>(), rot in 0usize..8) {
            let m = generate_complete_uniform(n, 0.0, 20.0, seed).unwrap();
            let order: Vec<usize> = (0..n).map(|k| (k + rot) % n).collect();
            let p = m.permute_rows(&order).unwrap();
            let (hm, hp) = (hungarian(&m), hungarian(&p));
            prop_assert!((hm.weight - hp.weight).abs() <= 1e-9);
            // Row k of p is row order[k] of m, so the matching carries over.
            let carried = FullMatching::new(order.iter().map(|&r| hm.matching.output_of(r)).collect()).unwrap();
            prop_assert!((carried.weight(&p).unwrap() - hp.weight).abs() <= 1e-9);
        }
    }
}

//! Vose's alias method: O(n) construction, O(1) draws from a fixed discrete
//! distribution proportional to a vector of nonnegative weights.

use rand::Rng;

use crate::error::{Error, Result};
use crate::meter::Meter;

#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
    total: f64,
}

impl AliasTable {
    pub fn build(weights: &[f64]) -> Result<Self> {
        Self::build_metered(weights, &mut ())
    }

    /// Like [`build`](Self::build), reporting one tick per weight read and
    /// per worklist step.
    pub fn build_metered(weights: &[f64], meter: &mut impl Meter) -> Result<Self> {
        let n = weights.len();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("alias weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        meter.tick(n as u64);
        if !(total > 0.0) {
            return Err(Error::EmptyDistribution);
        }

        let scale = n as f64 / total;
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        let mut prob = vec![0.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let mut small = Vec::with_capacity(n);
        let mut large = Vec::with_capacity(n);
        // Zero weights go on top of the small stack so they are paired while
        // large entries are still plentiful.
        for (k, &s) in scaled.iter().enumerate() {
            if s >= 1.0 {
                large.push(k);
            } else if s > 0.0 {
                small.push(k);
            }
        }
        small.extend((0..n).filter(|&k| scaled[k] == 0.0));
        meter.tick(2 * n as u64);

        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
            meter.tick(1);
        }
        // Leftovers hold (numerically) exactly one unit of mass each.
        let fallback = weights
            .iter()
            .enumerate()
            .fold(0, |best, (k, w)| if *w > weights[best] { k } else { best });
        for k in large.into_iter().chain(small) {
            if weights[k] > 0.0 {
                prob[k] = 1.0;
            } else {
                prob[k] = 0.0;
                alias[k] = fallback;
            }
            meter.tick(1);
        }

        Ok(Self { prob, alias, total })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    /// Sum of the weights the table was built from.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn alias(&self) -> &[usize] {
        &self.alias
    }

    /// Draws an index with probability `weights[j] / total`: one uniform slot
    /// index, then one biased coin.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let slot = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[slot] {
            slot
        } else {
            self.alias[slot]
        }
    }

    /// The distribution encoded by the table, rebuilt slot by slot.
    pub fn implied_distribution(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut p = vec![0.0; self.len()];
        for (k, (&pr, &al)) in self.prob.iter().zip(&self.alias).enumerate() {
            p[k] += pr / n;
            p[al] += (1.0 - pr) / n;
        }
        p
    }
}

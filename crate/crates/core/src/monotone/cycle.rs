//! Chain digraph over two-marginal pairs.
//!
//! Node `p` is a pair `(x_p, y_p)`; the edge `p -> q` has weight
//! `c(x_q, y_p) - c(x_p, y_p)`. A cycle's total weight is exactly the gain of
//! the cyclic-shift rearrangement, so the pairs are cyclically monotone iff
//! no cycle has positive weight. Longest paths in the same graph give the
//! chain sums of the Rockafellar potential.

use crate::cost::PairwiseCost;
use crate::error::Result;
use crate::point::MarginalPoint;

use super::{CycleWitness, MonotonicityVerdict, Witness, TOLERANCE};

/// Pair counts above this are evaluated lazily instead of caching `m^2` costs.
const CACHE_LIMIT: usize = 4096;

pub(crate) struct ChainGraph<'a> {
    pairs: &'a [(MarginalPoint, MarginalPoint)],
    cost: &'a PairwiseCost,
    diag: Vec<f64>,
    cross: Option<Vec<f64>>,
}

impl<'a> ChainGraph<'a> {
    pub(crate) fn new(pairs: &'a [(MarginalPoint, MarginalPoint)], cost: &'a PairwiseCost) -> Result<Self> {
        let m = pairs.len();
        let diag = pairs
            .iter()
            .map(|(x, y)| cost.eval(x, y))
            .collect::<Result<Vec<_>>>()?;
        let cross = if m <= CACHE_LIMIT {
            let mut cross = Vec::with_capacity(m * m);
            for (_, y) in pairs {
                for (x, _) in pairs {
                    cross.push(cost.eval(x, y)?);
                }
            }
            Some(cross)
        } else {
            None
        };
        Ok(Self {
            pairs,
            cost,
            diag,
            cross,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.pairs.len()
    }

    pub(crate) fn pair(&self, p: usize) -> &(MarginalPoint, MarginalPoint) {
        &self.pairs[p]
    }

    pub(crate) fn diag(&self, p: usize) -> f64 {
        self.diag[p]
    }

    /// Weight of `p -> q`.
    pub(crate) fn weight(&self, p: usize, q: usize) -> Result<f64> {
        let cross = match &self.cross {
            Some(c) => c[p * self.len() + q],
            None => self.cost.eval(&self.pairs[q].0, &self.pairs[p].1)?,
        };
        Ok(cross - self.diag[p])
    }

    /// Bellman-Ford from a virtual source on weights `w - delta`. Returns a
    /// positive cycle (in forward order, rotated to start at its lowest
    /// index) if one survives `len()` relaxation rounds.
    pub(crate) fn find_positive_cycle(&self, delta: f64) -> Result<(Option<Vec<usize>>, u64)> {
        let m = self.len();
        let mut dist = vec![0.0f64; m];
        let mut pred = vec![usize::MAX; m];
        let mut relaxed = 0u64;
        let mut last = None;
        for _round in 0..=m {
            last = None;
            for p in 0..m {
                for q in 0..m {
                    if p == q {
                        continue;
                    }
                    relaxed += 1;
                    let cand = dist[p] + self.weight(p, q)? - delta;
                    if cand > dist[q] {
                        dist[q] = cand;
                        pred[q] = p;
                        last = Some(q);
                    }
                }
            }
            if last.is_none() {
                return Ok((None, relaxed));
            }
        }
        // Walking m predecessors from a node improved in the last round
        // lands on a cycle of the predecessor graph.
        let mut v = last.expect("updated in final round");
        for _ in 0..m {
            v = pred[v];
        }
        let start = v;
        let mut back = vec![start];
        let mut u = pred[start];
        while u != start {
            back.push(u);
            u = pred[u];
        }
        back.reverse();
        let lowest = back
            .iter()
            .enumerate()
            .min_by_key(|(_, &n)| n)
            .map(|(k, _)| k)
            .unwrap_or(0);
        back.rotate_left(lowest);
        Ok((Some(back), relaxed))
    }

    pub(crate) fn cycle_witness(&self, cycle: &[usize]) -> Result<CycleWitness> {
        let k = cycle.len();
        let mut shifted = 0.0;
        let mut diagonal = 0.0;
        for j in 0..k {
            let p = cycle[j];
            let q = cycle[(j + 1) % k];
            shifted += self.cost.eval(&self.pairs[q].0, &self.pairs[p].1)?;
            diagonal += self.diag[p];
        }
        Ok(CycleWitness {
            indices: cycle.to_vec(),
            pairs: cycle.iter().map(|&p| self.pairs[p].clone()).collect(),
            shifted_sum: shifted,
            diagonal_sum: diagonal,
            gain: shifted - diagonal,
        })
    }

    /// Positive cycle with gain above `tol`, if any.
    pub(crate) fn violating_cycle(&self, tol: f64) -> Result<(Option<CycleWitness>, u64)> {
        let m = self.len().max(1);
        let (cycle, relaxed) = self.find_positive_cycle(tol / m as f64)?;
        match cycle {
            Some(c) => {
                let w = self.cycle_witness(&c)?;
                Ok(((w.gain > tol).then_some(w), relaxed))
            }
            None => Ok((None, relaxed)),
        }
    }

    /// Longest chain values `D(p)` from the given source nodes (value 0 at a
    /// source). Assumes no cycle with gain above the caller's tolerance;
    /// updates smaller than a relative `1e-14` are ignored so that near-zero
    /// cycles cannot keep the relaxation alive.
    pub(crate) fn longest_from(&self, sources: &[usize]) -> Result<Vec<f64>> {
        let m = self.len();
        let mut dist = vec![f64::NEG_INFINITY; m];
        for &s in sources {
            dist[s] = 0.0;
        }
        for _round in 0..m {
            let mut changed = false;
            for p in 0..m {
                if dist[p] == f64::NEG_INFINITY {
                    continue;
                }
                for q in 0..m {
                    if p == q {
                        continue;
                    }
                    let cand = dist[p] + self.weight(p, q)?;
                    if cand > dist[q] + 1e-14 * (1.0 + cand.abs()) {
                        dist[q] = cand;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Ok(dist)
    }
}

/// Cyclic monotonicity of a two-marginal set via positive-cycle detection.
///
/// Equivalent to checking the cyclic-shift inequality for every cycle of
/// distinct pairs; gains up to [`TOLERANCE`] are accepted.
pub fn is_two_marginal_cyclically_monotone(
    pairs: &[(MarginalPoint, MarginalPoint)],
    c: &PairwiseCost,
) -> Result<MonotonicityVerdict> {
    is_two_marginal_cyclically_monotone_with(pairs, c, TOLERANCE)
}

pub(crate) fn is_two_marginal_cyclically_monotone_with(
    pairs: &[(MarginalPoint, MarginalPoint)],
    c: &PairwiseCost,
    tol: f64,
) -> Result<MonotonicityVerdict> {
    let graph = ChainGraph::new(pairs, c)?;
    let (cycle, relaxed) = graph.violating_cycle(tol)?;
    Ok(match cycle {
        Some(w) => MonotonicityVerdict::fails(Witness::Cycle(w), relaxed, tol),
        None => MonotonicityVerdict::holds(relaxed, tol),
    })
}

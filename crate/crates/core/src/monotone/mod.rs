//! Monotonicity verifiers.
//!
//! A finite set is `n`-c-monotone when no rearrangement of any `n` of its
//! tuples, one permutation per marginal, increases the summed cost. The
//! verifiers here cover the general definition by exhaustive permutation
//! search ([`is_n_c_monotone_bruteforce`]), the two-marginal case by positive
//! cycle detection ([`is_two_marginal_cyclically_monotone`]), and the cheaper
//! criteria available for classical costs.
//!
//! All inequality checks use an additive slack ([`TOLERANCE`] unless stated
//! otherwise); violations no larger than the slack count as holding.

mod brute;
mod classical;
pub(crate) mod cycle;

use serde::Serialize;

use crate::cost::{CostSpec, PairwiseCost};
use crate::error::Result;
use crate::point::{MarginalPoint, ProductPoint};

pub use brute::{
    brute_force_optimal_coupling, is_c_monotone, is_n_c_monotone_bruteforce,
    is_n_c_monotone_bruteforce_with, permutations, BruteForceConfig, OptimalCoupling,
};
pub use classical::{
    check_projection_condition, is_pair_monotone_classical, sign_criterion_1d, PairVerdict,
    ProjectionReport, PAIR_TOLERANCE,
};
pub use cycle::is_two_marginal_cyclically_monotone;

/// Default slack for inequality checks.
pub const TOLERANCE: f64 = 1e-9;

/// `n` tuples of `Gamma` and `N` permutations whose rearranged cost sum
/// exceeds the diagonal sum.
#[derive(Clone, Debug, Serialize)]
pub struct PermutationWitness {
    pub points: Vec<ProductPoint>,
    /// One permutation per marginal; entry `j` of permutation `i` is the
    /// index of the point whose `i`-th part goes into rearranged tuple `j`.
    pub permutations: Vec<Vec<usize>>,
    pub permuted_sum: f64,
    pub diagonal_sum: f64,
}

impl PermutationWitness {
    pub fn rearranged(&self) -> Vec<ProductPoint> {
        let n = self.points.len();
        (0..n)
            .map(|j| {
                ProductPoint::new(
                    self.permutations
                        .iter()
                        .enumerate()
                        .map(|(i, sigma)| self.points[sigma[j]].part(i).clone())
                        .collect(),
                )
            })
            .collect()
    }

    /// Recomputes `permuted - diagonal` through [`CostSpec::eval`].
    pub fn recheck(&self, spec: &CostSpec) -> Result<f64> {
        let mut permuted = 0.0;
        for p in self.rearranged() {
            permuted += spec.eval(&p)?;
        }
        let mut diagonal = 0.0;
        for p in &self.points {
            diagonal += spec.eval(p)?;
        }
        Ok(permuted - diagonal)
    }
}

/// A cycle `p_1 -> ... -> p_k -> p_1` through two-marginal pairs with
/// positive gain `sum_j c(x_{p_{j+1}}, y_{p_j}) - c(x_{p_j}, y_{p_j})`.
#[derive(Clone, Debug, Serialize)]
pub struct CycleWitness {
    pub indices: Vec<usize>,
    pub pairs: Vec<(MarginalPoint, MarginalPoint)>,
    pub shifted_sum: f64,
    pub diagonal_sum: f64,
    pub gain: f64,
}

impl CycleWitness {
    pub fn recheck(&self, c: &PairwiseCost) -> Result<f64> {
        let k = self.pairs.len();
        let mut gain = 0.0;
        for j in 0..k {
            let (x, y) = &self.pairs[j];
            let (x_next, _) = &self.pairs[(j + 1) % k];
            gain += c.eval(x_next, y)? - c.eval(x, y)?;
        }
        Ok(gain)
    }
}

/// Two pairs `(x, y)`, `(x', y')` with `<x - x', y - y'> < 0`.
#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub first: (MarginalPoint, MarginalPoint),
    pub second: (MarginalPoint, MarginalPoint),
    pub inner_product: f64,
}

impl PairWitness {
    pub fn recheck(&self) -> f64 {
        let dx = self.first.0.sub(&self.second.0);
        let dy = self.first.1.sub(&self.second.1);
        dx.dot(&dy)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Permutation(PermutationWitness),
    Cycle(CycleWitness),
    Pair(PairWitness),
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Number of elementary inequalities (or relaxations) evaluated.
    pub checked: u64,
    pub tolerance: f64,
}

impl MonotonicityVerdict {
    pub(crate) fn holds(checked: u64, tolerance: f64) -> Self {
        Self {
            holds: true,
            witness: None,
            checked,
            tolerance,
        }
    }

    pub(crate) fn fails(witness: Witness, checked: u64, tolerance: f64) -> Self {
        Self {
            holds: false,
            witness: Some(witness),
            checked,
            tolerance,
        }
    }

    pub fn permutation_witness(&self) -> Option<&PermutationWitness> {
        match &self.witness {
            Some(Witness::Permutation(w)) => Some(w),
            _ => None,
        }
    }

    pub fn cycle_witness(&self) -> Option<&CycleWitness> {
        match &self.witness {
            Some(Witness::Cycle(w)) => Some(w),
            _ => None,
        }
    }

    pub fn pair_witness(&self) -> Option<&PairWitness> {
        match &self.witness {
            Some(Witness::Pair(w)) => Some(w),
            _ => None,
        }
    }
}

//! Exhaustive permutation search over `S_n^{N-1}`.
//!
//! The first permutation is pinned to the identity: relabeling every
//! permutation by a common one leaves the rearranged sum unchanged.

use rayon::prelude::*;
use serde::Serialize;

use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::point::{MarginalPoint, ProductPoint};

use super::{MonotonicityVerdict, PermutationWitness, Witness, TOLERANCE};

#[derive(Clone, Copy, Debug)]
pub struct BruteForceConfig {
    pub max_order: usize,
    pub max_marginals: usize,
    /// Cap on `(n!)^(N-1) * C(|Gamma| + n - 1, n)`.
    pub max_evaluations: u128,
    pub tolerance: f64,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        Self {
            max_order: 7,
            max_marginals: 4,
            max_evaluations: 500_000_000,
            tolerance: TOLERANCE,
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Nondecreasing index sequences of length `n` over `0..m` (multisets).
fn multisets(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..n).rev().find(|&k| cur[k] + 1 < m) else {
            return out;
        };
        let v = cur[pos] + 1;
        for slot in &mut cur[pos..] {
            *slot = v;
        }
    }
}

/// Per-selection cost tables: `pair[(i,k)][a][b] = c_ik(x_i^a, x_k^b)` and
/// `shift[i][a] = h_i(x_i^a)`.
struct Tables {
    n: usize,
    pairs: Vec<(usize, usize, Vec<f64>)>,
    shift: Option<Vec<Vec<f64>>>,
}

impl Tables {
    fn build(spec: &CostSpec, columns: &[Vec<&MarginalPoint>]) -> Result<Self> {
        let n = columns[0].len();
        let mut pairs = Vec::new();
        for (i, k, c) in spec.pairs() {
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    t.push(c.eval(columns[i][a], columns[k][b])?);
                }
            }
            pairs.push((i, k, t));
        }
        let shift = match spec.shift() {
            Some(h) => Some(
                h.iter()
                    .zip(columns)
                    .map(|(hi, col)| col.iter().map(|x| hi.eval(x)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Ok(Self { n, pairs, shift })
    }

    /// Cost of the tuple whose marginal `i` takes row `rows[i]`, summed in the
    /// same order as [`CostSpec::eval`].
    fn tuple_cost(&self, rows: &[usize]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for (i, k, t) in &self.pairs {
            total += t[rows[*i] * n + rows[*k]];
        }
        if let Some(h) = &self.shift {
            for (i, hi) in h.iter().enumerate() {
                total += hi[rows[i]];
            }
        }
        total
    }

    fn rearranged_sum(&self, perms: &[&[usize]], rows: &mut [usize]) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.n {
            for (r, sigma) in rows.iter_mut().zip(perms) {
                *r = sigma[j];
            }
            sum += self.tuple_cost(rows);
        }
        sum
    }
}

/// Iterates `(sigma_2, ..., sigma_N)` as a mixed-radix counter over indices
/// into `perms`, most significant digit first.
fn next_tuple(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// `n`-c-monotonicity of `g` by exhaustive search, default configuration.
pub fn is_n_c_monotone_bruteforce(g: &GammaSet, spec: &CostSpec, n: usize) -> Result<MonotonicityVerdict> {
    is_n_c_monotone_bruteforce_with(g, spec, n, &BruteForceConfig::default())
}

/// Checks every multiset of `n` points of `g` (repetition allowed) against
/// every permutation tuple with `sigma_1 = id`. The witness returned is the
/// first violation in lexicographic (multiset, permutation tuple) order,
/// independent of thread scheduling.
pub fn is_n_c_monotone_bruteforce_with(
    g: &GammaSet,
    spec: &CostSpec,
    n: usize,
    cfg: &BruteForceConfig,
) -> Result<MonotonicityVerdict> {
    let big_n = spec.n_marginals();
    if g.dims() != spec.dims() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_marginals(),
            found: g.n_marginals(),
        });
    }
    if n < 2 {
        return Ok(MonotonicityVerdict::holds(0, cfg.tolerance));
    }
    let m = g.len();
    let selections = binomial((m + n - 1) as u128, n as u128);
    let per_selection = factorial(n).pow((big_n - 1) as u32);
    let required = per_selection.saturating_mul(selections);
    if n > cfg.max_order || big_n > cfg.max_marginals || required > cfg.max_evaluations {
        return Err(Error::OrderTooLarge {
            order: n,
            required,
            cap: cfg.max_evaluations,
        });
    }
    let perms = permutations(n);
    let sets = multisets(m, n);
    let tol = cfg.tolerance;

    let found = sets
        .par_iter()
        .enumerate()
        .map(|(s_idx, set)| -> Result<Option<(usize, u64, PermutationWitness)>> {
            let columns: Vec<Vec<&MarginalPoint>> = (0..big_n)
                .map(|i| set.iter().map(|&k| g.points()[k].part(i)).collect())
                .collect();
            let tables = Tables::build(spec, &columns)?;
            let mut rows = vec![0usize; big_n];
            let mut diagonal = 0.0;
            for j in 0..n {
                rows.iter_mut().for_each(|r| *r = j);
                diagonal += tables.tuple_cost(&rows);
            }
            let mut digits = vec![0usize; big_n - 1];
            let mut count = 0u64;
            loop {
                count += 1;
                let chosen: Vec<&[usize]> = std::iter::once(perms[0].as_slice())
                    .chain(digits.iter().map(|&d| perms[d].as_slice()))
                    .collect();
                let permuted = tables.rearranged_sum(&chosen, &mut rows);
                if permuted > diagonal + tol {
                    let witness = PermutationWitness {
                        points: set.iter().map(|&k| g.points()[k].clone()).collect(),
                        permutations: chosen.iter().map(|p| p.to_vec()).collect(),
                        permuted_sum: permuted,
                        diagonal_sum: diagonal,
                    };
                    return Ok(Some((s_idx, count, witness)));
                }
                if !next_tuple(&mut digits, perms.len()) {
                    return Ok(None);
                }
            }
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });

    match found {
        None => Ok(MonotonicityVerdict::holds(required as u64, tol)),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!("filtered above"),
        Some(Ok(Some((s_idx, count, w)))) => {
            let checked = s_idx as u64 * per_selection as u64 + count;
            Ok(MonotonicityVerdict::fails(Witness::Permutation(w), checked, tol))
        }
    }
}

/// 2-c-monotonicity over all pairs of points. For two tuples each
/// permutation is the identity or the swap, so it suffices to enumerate
/// which marginals (other than the first) exchange coordinates.
pub fn is_c_monotone(g: &GammaSet, spec: &CostSpec) -> Result<MonotonicityVerdict> {
    let big_n = spec.n_marginals();
    if g.dims() != spec.dims() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_marginals(),
            found: g.n_marginals(),
        });
    }
    let pts = g.points();
    let costs = pts.iter().map(|p| spec.eval(p)).collect::<Result<Vec<_>>>()?;
    let mut checked = 0u64;
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            for mask in 1u32..(1 << (big_n - 1)) {
                checked += 1;
                let swapped = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
                let r1 = ProductPoint::new(
                    (0..big_n)
                        .map(|i| if swapped(i) { pts[b].part(i) } else { pts[a].part(i) }.clone())
                        .collect(),
                );
                let r2 = ProductPoint::new(
                    (0..big_n)
                        .map(|i| if swapped(i) { pts[a].part(i) } else { pts[b].part(i) }.clone())
                        .collect(),
                );
                let permuted = spec.eval(&r1)? + spec.eval(&r2)?;
                let diagonal = costs[a] + costs[b];
                if permuted > diagonal + TOLERANCE {
                    let witness = PermutationWitness {
                        points: vec![pts[a].clone(), pts[b].clone()],
                        permutations: (0..big_n)
                            .map(|i| if swapped(i) { vec![1, 0] } else { vec![0, 1] })
                            .collect(),
                        permuted_sum: permuted,
                        diagonal_sum: diagonal,
                    };
                    return Ok(MonotonicityVerdict::fails(
                        Witness::Permutation(witness),
                        checked,
                        TOLERANCE,
                    ));
                }
            }
        }
    }
    Ok(MonotonicityVerdict::holds(checked, TOLERANCE))
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimalCoupling {
    pub value: f64,
    /// One permutation per marginal, the first being the identity.
    pub permutations: Vec<Vec<usize>>,
    pub diagonal_value: f64,
}

impl OptimalCoupling {
    pub fn diagonal_is_optimal(&self, tol: f64) -> bool {
        self.value <= self.diagonal_value + tol
    }
}

/// Maximizes `sum_j c(x_1^j, x_2^{sigma_2(j)}, ..., x_N^{sigma_N(j)})` over
/// all permutation tuples. Ties keep the lexicographically first tuple.
pub fn brute_force_optimal_coupling(
    marginal_lists: &[Vec<MarginalPoint>],
    spec: &CostSpec,
) -> Result<OptimalCoupling> {
    let big_n = spec.n_marginals();
    if marginal_lists.len() != big_n {
        return Err(Error::DimensionMismatch {
            expected: big_n,
            found: marginal_lists.len(),
        });
    }
    let n = marginal_lists[0].len();
    if marginal_lists.iter().any(|l| l.len() != n) {
        return Err(Error::Invalid("all marginal lists must have the same length".into()));
    }
    if n == 0 {
        return Err(Error::Invalid("marginal lists must be nonempty".into()));
    }
    if n > 6 || big_n > 4 {
        return Err(Error::BudgetExceeded(format!(
            "coupling search supports n <= 6 and N <= 4, got n = {n}, N = {big_n}"
        )));
    }
    for (list, &d) in marginal_lists.iter().zip(spec.dims()) {
        if let Some(p) = list.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
    }
    let columns: Vec<Vec<&MarginalPoint>> = marginal_lists.iter().map(|l| l.iter().collect()).collect();
    let tables = Tables::build(spec, &columns)?;
    let perms = permutations(n);
    let mut rows = vec![0usize; big_n];
    let mut digits = vec![0usize; big_n - 1];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut diagonal_value = 0.0;
    loop {
        let chosen: Vec<&[usize]> = std::iter::once(perms[0].as_slice())
            .chain(digits.iter().map(|&d| perms[d].as_slice()))
            .collect();
        let v = tables.rearranged_sum(&chosen, &mut rows);
        if digits.iter().all(|&d| d == 0) {
            diagonal_value = v;
        }
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, digits.clone()));
        }
        if !next_tuple(&mut digits, perms.len()) {
            break;
        }
    }
    let (value, digits) = best.expect("at least one permutation tuple");
    Ok(OptimalCoupling {
        value,
        permutations: std::iter::once(perms[0].clone())
            .chain(digits.iter().map(|&d| perms[d].clone()))
            .collect(),
        diagonal_value,
    })
}

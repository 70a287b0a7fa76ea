//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use cmono_core::monotone::brute_force_optimal_coupling;
use cmono_core::{CostSpec, GammaSet, MarginalPoint, PairwiseCost};

pub type Pairs = [(MarginalPoint, MarginalPoint)];

pub fn pairs_of(g: &GammaSet) -> Vec<(MarginalPoint, MarginalPoint)> {
    g.points().iter().map(|p| (p.part(0).clone(), p.part(1).clone())).collect()
}

/// Largest gain of a rearrangement of all of `Gamma` over the identity.
pub fn coupling_excess(g: &GammaSet, spec: &CostSpec) -> f64 {
    let lists: Vec<Vec<MarginalPoint>> = (0..g.n_marginals())
        .map(|i| g.points().iter().map(|p| p.part(i).clone()).collect())
        .collect();
    let oc = brute_force_optimal_coupling(&lists, spec).unwrap();
    oc.value - oc.diagonal_value
}

fn step(c: &PairwiseCost, pairs: &Pairs, from: usize, to: &MarginalPoint) -> f64 {
    let (xp, yp) = &pairs[from];
    c.eval(to, yp).unwrap() - c.eval(xp, yp).unwrap()
}

/// Best value over chains of distinct pairs that start at a pair whose first
/// point is `s1` and end with the jump to `x`.
pub fn chain_value(c: &PairwiseCost, pairs: &Pairs, s1: &MarginalPoint, x: &MarginalPoint) -> f64 {
    fn walk(c: &PairwiseCost, pairs: &Pairs, x: &MarginalPoint, used: &mut [bool], last: usize, acc: f64, best: &mut f64) {
        *best = best.max(acc + step(c, pairs, last, x));
        for next in 0..pairs.len() {
            if !used[next] {
                used[next] = true;
                let s = step(c, pairs, last, &pairs[next].0);
                walk(c, pairs, x, used, next, acc + s, best);
                used[next] = false;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    for start in 0..pairs.len() {
        if &pairs[start].0 == s1 {
            let mut used = vec![false; pairs.len()];
            used[start] = true;
            walk(c, pairs, x, &mut used, start, 0.0, &mut best);
        }
    }
    best
}

/// Best value over walks (pairs may repeat) of at most `len` steps from the
/// pairs based at `s1`, one entry per ending pair.
pub fn walk_values(c: &PairwiseCost, pairs: &Pairs, s1: &MarginalPoint, len: usize) -> Vec<f64> {
    let mut best: Vec<f64> = pairs
        .iter()
        .map(|p| if &p.0 == s1 { 0.0 } else { f64::NEG_INFINITY })
        .collect();
    for _ in 0..len {
        let mut next = best.clone();
        for a in 0..pairs.len() {
            if best[a].is_finite() {
                for b in 0..pairs.len() {
                    next[b] = next[b].max(best[a] + step(c, pairs, a, &pairs[b].0));
                }
            }
        }
        best = next;
    }
    best
}

/// The chain supremum is finite iff doubling the walk length beyond the
/// number of pairs gains nothing.
pub fn chains_bounded(c: &PairwiseCost, pairs: &Pairs, s1: &MarginalPoint, tol: f64) -> bool {
    let m = pairs.len();
    let short = walk_values(c, pairs, s1, m);
    let long = walk_values(c, pairs, s1, 2 * m);
    short.iter().zip(&long).all(|(s, l)| *l <= *s + tol)
}

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::cost::{classical_cost, Classical, CostSpec};
use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::point::MarginalPoint;

use super::cycle::is_two_marginal_cyclically_monotone;
use super::{MonotonicityVerdict, PairWitness, PermutationWitness, Witness};

/// Slack for the classical pairwise test `<x - x', y - y'> >= 0`.
pub const PAIR_TOLERANCE: f64 = 1e-12;

/// Classical (inner product) monotonicity of a two-marginal set.
pub fn is_pair_monotone_classical(pairs: &[(MarginalPoint, MarginalPoint)]) -> Result<MonotonicityVerdict> {
    let mut checked = 0;
    for (a, (x, y)) in pairs.iter().enumerate() {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: y.dim(),
            });
        }
        for (x2, y2) in &pairs[a + 1..] {
            checked += 1;
            let inner = x.sub(x2).dot(&y.sub(y2));
            if inner < -PAIR_TOLERANCE {
                let w = PairWitness {
                    first: (x.clone(), y.clone()),
                    second: (x2.clone(), y2.clone()),
                    inner_product: inner,
                };
                return Ok(MonotonicityVerdict::fails(Witness::Pair(w), checked, PAIR_TOLERANCE));
            }
        }
    }
    Ok(MonotonicityVerdict::holds(checked, PAIR_TOLERANCE))
}

/// Comonotonicity on the line: every difference `p - q` of two points lies
/// in the nonnegative or the nonpositive orthant. This is exact (no slack).
///
/// A failing pair yields a permutation witness for `c1`: exchanging the
/// coordinates where `p - q` is negative raises the summed cost by
/// `-(sum of positive parts)(sum of negative parts) > 0`.
pub fn sign_criterion_1d(g: &GammaSet) -> Result<MonotonicityVerdict> {
    if !g.is_one_dimensional() {
        return Err(Error::NotOneDimensional);
    }
    let n = g.n_marginals();
    let rows: Vec<Vec<f64>> = g
        .points()
        .iter()
        .map(|p| p.scalars().expect("one-dimensional"))
        .collect();
    let mut checked = 0;
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            checked += 1;
            let t: Vec<f64> = rows[a].iter().zip(&rows[b]).map(|(x, y)| x - y).collect();
            let has_pos = t.iter().any(|&v| v > 0.0);
            let has_neg = t.iter().any(|&v| v < 0.0);
            if has_pos && has_neg {
                // Swap the side that does not contain marginal 0.
                let neg_side = t[0] >= 0.0;
                let swapped = |i: usize| if neg_side { t[i] < 0.0 } else { t[i] >= 0.0 };
                let c1 = classical_cost(Classical::C1, n, 1)?;
                let points = vec![g.points()[a].clone(), g.points()[b].clone()];
                let mut w = PermutationWitness {
                    points,
                    permutations: (0..n)
                        .map(|i| if swapped(i) { vec![1, 0] } else { vec![0, 1] })
                        .collect(),
                    permuted_sum: 0.0,
                    diagonal_sum: 0.0,
                };
                w.permuted_sum = w.rearranged().iter().map(|p| c1.eval(p)).sum::<Result<f64>>()?;
                w.diagonal_sum = w.points.iter().map(|p| c1.eval(p)).sum::<Result<f64>>()?;
                return Ok(MonotonicityVerdict::fails(Witness::Permutation(w), checked, 0.0));
            }
        }
    }
    Ok(MonotonicityVerdict::holds(checked, 0.0))
}

#[derive(Clone, Debug)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub verdict: MonotonicityVerdict,
}

/// Cyclic monotonicity of every two-marginal projection `Gamma_ij` under its
/// own coupling `c_ij`.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub pairs: Vec<PairVerdict>,
    pub all_hold: bool,
}

impl ProjectionReport {
    pub fn get(&self, i: usize, j: usize) -> Option<&MonotonicityVerdict> {
        self.pairs.iter().find(|p| p.i == i && p.j == j).map(|p| &p.verdict)
    }

    pub fn failing(&self) -> impl Iterator<Item = &PairVerdict> {
        self.pairs.iter().filter(|p| !p.verdict.holds)
    }
}

impl Serialize for ProjectionReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Pairs<'a>(&'a [PairVerdict]);
        impl Serialize for Pairs<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for p in self.0 {
                    m.serialize_entry(&format!("{},{}", p.i + 1, p.j + 1), &p.verdict)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("pairs", &Pairs(&self.pairs))?;
        m.serialize_entry("all_hold", &self.all_hold)?;
        m.end()
    }
}

pub fn check_projection_condition(g: &GammaSet, spec: &CostSpec) -> Result<ProjectionReport> {
    if g.dims() != spec.dims() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_marginals(),
            found: g.n_marginals(),
        });
    }
    let mut pairs = Vec::new();
    for (i, j, c) in spec.pairs() {
        let proj = g.project_pair(i, j)?;
        let verdict = is_two_marginal_cyclically_monotone(&proj, c)?;
        pairs.push(PairVerdict { i, j, verdict });
    }
    let all_hold = pairs.iter().all(|p| p.verdict.holds);
    Ok(ProjectionReport { pairs, all_hold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{classical_cost, Classical};
    use crate::point::ProductPoint;

    fn mp(v: &[f64]) -> MarginalPoint {
        MarginalPoint::new(v.to_vec())
    }

    #[test]
    fn identity_samples_are_pair_monotone() {
        let ps: Vec<_> = (-3..=3).map(|k| (mp(&[k as f64, 1.0]), mp(&[k as f64, 1.0]))).collect();
        assert!(is_pair_monotone_classical(&ps).unwrap().holds);
    }

    #[test]
    fn counterexample_12_projection_at_lambda_3() {
        let ps = vec![(mp(&[0.0, 0.0]), mp(&[0.0, 0.0])), (mp(&[1.0, 0.0]), mp(&[-1.0, -1.0]))];
        let v = is_pair_monotone_classical(&ps).unwrap();
        assert!(!v.holds);
        assert_eq!(v.pair_witness().unwrap().inner_product, -1.0);
    }

    #[test]
    fn counterexample_23_projection_at_lambda_1_9() {
        let lambda = 1.9;
        let x2 = mp(&[2.0 - lambda, 2.0 - lambda]);
        let x3 = mp(&[lambda, 7.0 - 5.0 * lambda]);
        let ps = vec![(mp(&[0.0, 0.0]), mp(&[0.0, 0.0])), (x2, x3)];
        let v = is_pair_monotone_classical(&ps).unwrap();
        assert!(!v.holds);
        let w = v.pair_witness().unwrap();
        assert!((w.inner_product + 0.06).abs() < 1e-12);
        assert_eq!(w.recheck(), w.inner_product);
    }

    #[test]
    fn sign_criterion_examples() {
        let ok = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(sign_criterion_1d(&ok).unwrap().holds);

        let bad = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, -1.0, 2.0]]).unwrap();
        let v = sign_criterion_1d(&bad).unwrap();
        assert!(!v.holds);
        let w = v.permutation_witness().unwrap();
        let c1 = classical_cost(Classical::C1, 3, 1).unwrap();
        // t = (-1, 1, -2) relative to the second point: (sum pos)(sum neg) = 1 * -3
        assert_eq!(w.recheck(&c1).unwrap(), 3.0);
        assert_eq!(w.permutations[0], vec![0, 1]);

        let curve = GammaSet::from_scalar_rows(
            &[-1.0f64, 0.0, 2.0]
                .iter()
                .map(|t| vec![*t, t.powi(3), t.powi(5)])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(sign_criterion_1d(&curve).unwrap().holds);
    }

    #[test]
    fn sign_criterion_needs_1d() {
        let g = GammaSet::new(vec![ProductPoint::from_coords(vec![vec![0.0, 1.0], vec![0.0, 1.0]])]).unwrap();
        assert!(matches!(sign_criterion_1d(&g), Err(Error::NotOneDimensional)));
    }

    #[test]
    fn zero_counts_as_both_signs() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, -1.0, 0.0]])
            .unwrap();
        assert!(sign_criterion_1d(&g).unwrap().holds);
    }

    #[test]
    fn projection_condition_on_diagonal() {
        let g = GammaSet::new(
            (-2..=2)
                .map(|k| ProductPoint::from_coords(vec![vec![k as f64, -(k as f64)]; 3]))
                .collect(),
        )
        .unwrap();
        let c1 = classical_cost(Classical::C1, 3, 2).unwrap();
        let r = check_projection_condition(&g, &c1).unwrap();
        assert!(r.all_hold);
        assert_eq!(r.pairs.len(), 3);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["pairs"]["1,2"]["holds"].as_bool().unwrap());
    }
}

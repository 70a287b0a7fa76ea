//! Finite subsets of the product space and their projections.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::point::{MarginalPoint, ProductPoint};

/// A nonempty, deduplicated, finite set of product points with common
/// marginal dimensions. Input order is preserved (first occurrence wins).
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    dims: Vec<usize>,
    points: Vec<ProductPoint>,
}

impl GammaSet {
    pub fn new(points: Vec<ProductPoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Invalid("gamma must be nonempty".into()))?;
        let dims = first.dims();
        if dims.len() < 2 {
            return Err(Error::Invalid("at least two marginals are required".into()));
        }
        let mut seen = HashSet::with_capacity(points.len());
        let mut unique = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dims.len() {
                return Err(Error::DimensionMismatch {
                    expected: dims.len(),
                    found: p.len(),
                });
            }
            for (part, &d) in p.parts().iter().zip(&dims) {
                if part.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: part.dim(),
                    });
                }
            }
            if seen.insert(p.clone()) {
                unique.push(p);
            }
        }
        Ok(Self {
            dims,
            points: unique,
        })
    }

    /// Points with one-dimensional marginals, given as rows of scalars.
    pub fn from_scalar_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| ProductPoint::from_scalars(r)).collect())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_marginals(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProductPoint] {
        &self.points
    }

    pub fn contains(&self, p: &ProductPoint) -> bool {
        self.points.contains(p)
    }

    pub fn index_of(&self, p: &ProductPoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.dims.iter().all(|&d| d == 1)
    }

    pub fn translate(&self, z: &ProductPoint) -> Result<Self> {
        Self::new(self.points.iter().map(|p| p.translate(z)).collect())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n_marginals() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.n_marginals(),
            })
        }
    }

    /// `Gamma_i`, deduplicated, in order of first appearance.
    pub fn project(&self, i: usize) -> Result<Vec<MarginalPoint>> {
        self.check_index(i)?;
        let mut seen = HashSet::new();
        Ok(self
            .points
            .iter()
            .map(|p| p.part(i))
            .filter(|x| seen.insert(*x))
            .cloned()
            .collect())
    }

    /// `Gamma_ij` for `i < j`, deduplicated, in order of first appearance.
    pub fn project_pair(&self, i: usize, j: usize) -> Result<Vec<(MarginalPoint, MarginalPoint)>> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i >= j {
            return Err(Error::UnorderedPair(i, j));
        }
        let mut seen = HashSet::new();
        Ok(self
            .points
            .iter()
            .map(|p| (p.part(i), p.part(j)))
            .filter(|xy| seen.insert(*xy))
            .map(|(x, y)| (x.clone(), y.clone()))
            .collect())
    }

    /// `bigcap_{i<j} P_ij^{-1}(Gamma_ij)` restricted to the finite product
    /// `Gamma_1 x ... x Gamma_N`, enumerated in lexicographic index order.
    pub fn preimage_intersection(&self) -> Result<Vec<ProductPoint>> {
        let n = self.n_marginals();
        let marginals: Vec<Vec<MarginalPoint>> =
            (0..n).map(|i| self.project(i)).collect::<Result<_>>()?;
        let mut pair_sets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let set: HashSet<(MarginalPoint, MarginalPoint)> =
                    self.project_pair(i, j)?.into_iter().collect();
                pair_sets.push(((i, j), set));
            }
        }
        let mut out = Vec::new();
        let mut chosen: Vec<usize> = Vec::with_capacity(n);
        extend_consistent(&marginals, &pair_sets, &mut chosen, &mut out);
        Ok(out)
    }
}

type PairSets = Vec<((usize, usize), HashSet<(MarginalPoint, MarginalPoint)>)>;

fn extend_consistent(
    marginals: &[Vec<MarginalPoint>],
    pair_sets: &PairSets,
    chosen: &mut Vec<usize>,
    out: &mut Vec<ProductPoint>,
) {
    let k = chosen.len();
    if k == marginals.len() {
        out.push(ProductPoint::new(
            chosen
                .iter()
                .enumerate()
                .map(|(i, &a)| marginals[i][a].clone())
                .collect(),
        ));
        return;
    }
    for a in 0..marginals[k].len() {
        let x = &marginals[k][a];
        let ok = pair_sets
            .iter()
            .filter(|((_, j), _)| *j == k)
            .all(|((i, _), set)| set.contains(&(marginals[*i][chosen[*i]].clone(), x.clone())));
        if ok {
            chosen.push(a);
            extend_consistent(marginals, pair_sets, chosen, out);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> MarginalPoint {
        MarginalPoint::scalar(x)
    }

    #[test]
    fn project_examples() {
        let g = GammaSet::from_scalar_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(g.project(1).unwrap(), vec![s(2.0)]);
        let g = GammaSet::from_scalar_rows(&[vec![5.0, 1.0, 2.0], vec![5.0, 3.0, 4.0]]).unwrap();
        assert_eq!(g.project(0).unwrap(), vec![s(5.0)]);
        let ks = GammaSet::from_scalar_rows(
            &[-1.0f64, 0.0, 1.0]
                .iter()
                .map(|t| vec![*t, t.powi(3), t.powi(5)])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(ks.project(2).unwrap(), vec![s(-1.0), s(0.0), s(1.0)]);
    }

    #[test]
    fn project_pair_examples() {
        let g = GammaSet::from_scalar_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(g.project_pair(0, 2).unwrap(), vec![(s(1.0), s(3.0))]);
        let v2 = ProductPoint::from_coords(vec![vec![1.0, 0.0], vec![2.0, 2.0], vec![0.0, 7.0]]);
        let zero = ProductPoint::from_coords(vec![vec![0.0, 0.0]; 3]);
        let g = GammaSet::new(vec![zero, v2]).unwrap();
        assert_eq!(
            g.project_pair(0, 1).unwrap(),
            vec![
                (MarginalPoint::zeros(2), MarginalPoint::zeros(2)),
                (MarginalPoint::new(vec![1.0, 0.0]), MarginalPoint::new(vec![2.0, 2.0])),
            ]
        );
        let curve = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(
            curve.project_pair(1, 2).unwrap(),
            vec![(s(0.0), s(0.0)), (s(1.0), s(1.0))]
        );
    }

    #[test]
    fn projection_errors() {
        let g = GammaSet::from_scalar_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(g.project(3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(g.project_pair(2, 1), Err(Error::UnorderedPair(2, 1))));
        assert!(matches!(g.project_pair(1, 1), Err(Error::UnorderedPair(1, 1))));
        assert!(matches!(g.project_pair(0, 5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn construction_dedups_and_validates() {
        let g = GammaSet::from_scalar_rows(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(g.len(), 2);
        assert!(GammaSet::new(vec![]).is_err());
        assert!(GammaSet::from_scalar_rows(&[vec![1.0, 2.0], vec![1.0, 2.0, 3.0]]).is_err());
        let mixed = vec![
            ProductPoint::from_coords(vec![vec![1.0], vec![1.0, 2.0]]),
            ProductPoint::from_coords(vec![vec![1.0], vec![1.0]]),
        ];
        assert!(GammaSet::new(mixed).is_err());
    }

    #[test]
    fn preimage_intersection_by_enumeration() {
        let g = GammaSet::from_scalar_rows(&[
            vec![0.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        // Oracle: scan all 8 candidates of {0,1}^3 against the pair projections.
        let p12 = g.project_pair(0, 1).unwrap();
        let p13 = g.project_pair(0, 2).unwrap();
        let p23 = g.project_pair(1, 2).unwrap();
        let mut expected = Vec::new();
        for a in [0.0, 1.0] {
            for b in [0.0, 1.0] {
                for c in [0.0, 1.0] {
                    if p12.contains(&(s(a), s(b)))
                        && p13.contains(&(s(a), s(c)))
                        && p23.contains(&(s(b), s(c)))
                    {
                        expected.push(ProductPoint::from_scalars(&[a, b, c]));
                    }
                }
            }
        }
        let mut got = g.preimage_intersection().unwrap();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn preimage_intersection_can_exceed_gamma() {
        // Each pair projection is full, so the intersection is the whole product.
        let g = GammaSet::from_scalar_rows(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(g.preimage_intersection().unwrap().len(), 8);
    }
}

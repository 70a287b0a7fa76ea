//! Two-marginal potentials: Rockafellar antiderivatives on finite sets,
//! c-conjugates, c-subdifferential graphs and the antiderivative test.
//!
//! A tabulated [`Potential`] lists its values on finitely many points and is
//! `+inf` everywhere else unless it carries a closed form. Conjugate suprema
//! run over the listed points only.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedForm;
use crate::cost::{CostKind, PairwiseCost};
use crate::error::{Error, Result};
use crate::io::ext_real_vec;
use crate::monotone::cycle::ChainGraph;
use crate::monotone::TOLERANCE;
use crate::point::MarginalPoint;

/// Largest pair set accepted by the Rockafellar construction.
pub const MAX_PAIRS: usize = 10_000;

/// Agreement required between a closed form and its tabulated values.
const CLOSED_FORM_AGREEMENT: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PotentialRaw", into = "PotentialRaw")]
pub struct Potential {
    points: Vec<MarginalPoint>,
    values: Vec<f64>,
    index: HashMap<MarginalPoint, usize>,
    closed_form: Option<ClosedForm>,
}

#[derive(Serialize, Deserialize)]
struct PotentialRaw {
    points: Vec<MarginalPoint>,
    #[serde(with = "ext_real_vec")]
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    closed_form: Option<ClosedForm>,
}

impl TryFrom<PotentialRaw> for Potential {
    type Error = Error;

    fn try_from(raw: PotentialRaw) -> Result<Self> {
        let p = Potential::new(raw.points, raw.values)?;
        match raw.closed_form {
            Some(cf) => p.with_closed_form(cf),
            None => Ok(p),
        }
    }
}

impl From<Potential> for PotentialRaw {
    fn from(p: Potential) -> Self {
        Self {
            points: p.points,
            values: p.values,
            closed_form: p.closed_form,
        }
    }
}

impl PartialEq for Potential {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
            && self.closed_form == other.closed_form
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Potential {
    /// Values must be finite or `+inf`; points must be distinct and share a
    /// dimension.
    pub fn new(points: Vec<MarginalPoint>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| v.is_nan() || **v == f64::NEG_INFINITY) {
            return Err(Error::Invalid(format!("potential value {v} is not in (-inf, +inf]")));
        }
        if let Some(first) = points.first() {
            if let Some(p) = points.iter().find(|p| p.dim() != first.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: p.dim(),
                });
            }
        }
        let mut index = HashMap::with_capacity(points.len());
        for (k, p) in points.iter().enumerate() {
            if index.insert(p.clone(), k).is_some() {
                return Err(Error::Invalid(format!("duplicate potential point {p:?}")));
            }
        }
        Ok(Self {
            points,
            values,
            index,
            closed_form: None,
        })
    }

    /// Tabulates `cf` on `points` and keeps it for evaluation elsewhere.
    pub fn from_closed_form(cf: ClosedForm, points: Vec<MarginalPoint>) -> Result<Self> {
        let values = points.iter().map(|p| cf.eval(p)).collect::<Result<Vec<_>>>()?;
        let mut p = Self::new(points, values)?;
        p.closed_form = Some(cf);
        Ok(p)
    }

    pub fn with_closed_form(mut self, cf: ClosedForm) -> Result<Self> {
        for (x, &v) in self.points.iter().zip(&self.values) {
            let w = cf.eval(x)?;
            let agree = if v.is_infinite() || w.is_infinite() {
                v == w
            } else {
                (v - w).abs() <= CLOSED_FORM_AGREEMENT
            };
            if !agree {
                return Err(Error::Invalid(format!(
                    "closed form gives {w} at {x:?}, table has {v}"
                )));
            }
        }
        self.closed_form = Some(cf);
        Ok(self)
    }

    pub fn points(&self) -> &[MarginalPoint] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    /// Tabulated value, if `x` is a listed point.
    pub fn value_at(&self, x: &MarginalPoint) -> Option<f64> {
        self.index.get(x).map(|&k| self.values[k])
    }

    /// Tabulated value, else the closed form, else `+inf`.
    pub fn eval(&self, x: &MarginalPoint) -> Result<f64> {
        match (self.value_at(x), &self.closed_form) {
            (Some(v), _) => Ok(v),
            (None, Some(cf)) => cf.eval(x),
            (None, None) => Ok(f64::INFINITY),
        }
    }

    fn require_proper(&self) -> Result<()> {
        if self.is_proper() {
            Ok(())
        } else {
            Err(Error::ImproperInput)
        }
    }
}

/// `R(x) = max_p D(p) + c(x, y_p) - c(x_p, y_p)` where `D(p)` is the best
/// chain value from a pair based at `s1` to pair `p`.
#[derive(Clone, Debug)]
pub struct RockafellarPotential {
    cost: PairwiseCost,
    base: MarginalPoint,
    /// `(y_p, D(p) - c(x_p, y_p))`
    anchors: Vec<(MarginalPoint, f64)>,
}

impl RockafellarPotential {
    pub fn build(c: &PairwiseCost, pairs: &[(MarginalPoint, MarginalPoint)], s1: &MarginalPoint) -> Result<Self> {
        if pairs.len() > MAX_PAIRS {
            return Err(Error::BudgetExceeded(format!(
                "{} pairs exceed the limit of {MAX_PAIRS}",
                pairs.len()
            )));
        }
        let sources: Vec<usize> = (0..pairs.len()).filter(|&p| &pairs[p].0 == s1).collect();
        if sources.is_empty() {
            return Err(Error::BasePointNotInProjection);
        }
        let graph = ChainGraph::new(pairs, c)?;
        if let (Some(w), _) = graph.violating_cycle(TOLERANCE)? {
            return Err(Error::NotCyclicallyMonotone(Box::new(w)));
        }
        let dist = graph.longest_from(&sources)?;
        let anchors = (0..graph.len())
            .filter(|&p| dist[p].is_finite())
            .map(|p| (graph.pair(p).1.clone(), dist[p] - graph.diag(p)))
            .collect();
        Ok(Self {
            cost: c.clone(),
            base: s1.clone(),
            anchors,
        })
    }

    pub fn base(&self) -> &MarginalPoint {
        &self.base
    }

    pub fn eval(&self, x: &MarginalPoint) -> Result<f64> {
        if x == &self.base {
            return Ok(0.0);
        }
        let mut best = f64::NEG_INFINITY;
        for (y, offset) in &self.anchors {
            let v = offset + self.cost.eval(x, y)?;
            if v > best {
                best = v;
            }
        }
        Ok(best)
    }

    /// Values on `points` (deduplicated, order kept).
    pub fn tabulate(&self, points: &[MarginalPoint]) -> Result<Potential> {
        let points = dedup(points);
        let values = points.par_iter().map(|x| self.eval(x)).collect::<Result<Vec<_>>>()?;
        Potential::new(points, values)
    }
}

fn dedup(points: &[MarginalPoint]) -> Vec<MarginalPoint> {
    let mut seen = std::collections::HashSet::new();
    points.iter().filter(|p| seen.insert(*p)).cloned().collect()
}

pub fn rockafellar_potential(
    c: &PairwiseCost,
    pairs: &[(MarginalPoint, MarginalPoint)],
    s1: &MarginalPoint,
    eval_points: &[MarginalPoint],
) -> Result<Potential> {
    RockafellarPotential::build(c, pairs, s1)?.tabulate(eval_points)
}

/// `f^c(y)` and the lowest index attaining it.
pub fn conjugate_at(f: &Potential, c: &PairwiseCost, y: &MarginalPoint) -> Result<(f64, usize)> {
    let mut best = (f64::NEG_INFINITY, usize::MAX);
    for (k, (x, &fx)) in f.points.iter().zip(&f.values).enumerate() {
        if fx == f64::INFINITY {
            continue;
        }
        let v = c.eval(x, y)? - fx;
        if v > best.0 {
            best = (v, k);
        }
    }
    if best.1 == usize::MAX {
        return Err(Error::ImproperInput);
    }
    Ok(best)
}

/// Conjugate values together with their argmax indices into `f.points()`.
pub fn c_conjugate_with_argmax(
    f: &Potential,
    c: &PairwiseCost,
    eval_points: &[MarginalPoint],
) -> Result<Vec<(f64, usize)>> {
    f.require_proper()?;
    eval_points.par_iter().map(|y| conjugate_at(f, c, y)).collect()
}

pub fn c_conjugate(f: &Potential, c: &PairwiseCost, eval_points: &[MarginalPoint]) -> Result<Potential> {
    let points = dedup(eval_points);
    let values = c_conjugate_with_argmax(f, c, &points)?
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    Potential::new(points, values)
}

/// Exact conjugate of a registered closed form under the inner-product
/// cost: `q_A -> q_{A^{-1}}` for positive definite `A`, `s q -> q / s`.
pub fn registered_conjugate(cf: &ClosedForm, c: &PairwiseCost) -> Option<ClosedForm> {
    if !matches!(c.kind, CostKind::InnerProduct) || c.sign() != 1 {
        return None;
    }
    match cf {
        ClosedForm::HalfSqNorm { scale } if *scale > 0.0 => Some(ClosedForm::HalfSqNorm { scale: 1.0 / scale }),
        ClosedForm::Quadratic { matrix } => {
            let d = matrix.len();
            if matrix.iter().any(|r| r.len() != d) {
                return None;
            }
            let a = nalgebra::DMatrix::from_fn(d, d, |i, j| 0.5 * (matrix[i][j] + matrix[j][i]));
            let inv = a.cholesky()?.inverse();
            Some(ClosedForm::quadratic(
                (0..d).map(|i| (0..d).map(|j| inv[(i, j)]).collect()).collect(),
            ))
        }
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdiffPair {
    pub x: MarginalPoint,
    pub y: MarginalPoint,
    /// `|f(x) + f^c(y) - c(x, y)|`
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdiffGraph {
    pub pairs: Vec<SubdiffPair>,
    pub tolerance: f64,
}

/// Candidates on which Young-Fenchel is an equality up to [`TOLERANCE`].
pub fn c_subdifferential_graph(
    f: &Potential,
    c: &PairwiseCost,
    candidates: &[(MarginalPoint, MarginalPoint)],
) -> Result<SubdiffGraph> {
    f.require_proper()?;
    let scored = candidates
        .par_iter()
        .map(|(x, y)| -> Result<Option<SubdiffPair>> {
            let fx = f.eval(x)?;
            if !fx.is_finite() {
                return Ok(None);
            }
            let (fc, _) = conjugate_at(f, c, y)?;
            let residual = (fx + fc - c.eval(x, y)?).abs();
            Ok((residual <= TOLERANCE).then(|| SubdiffPair {
                x: x.clone(),
                y: y.clone(),
                residual,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubdiffGraph {
        pairs: scored.into_iter().flatten().collect(),
        tolerance: TOLERANCE,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AntiderivativeReport {
    pub holds: bool,
    /// Largest `f(x) + c(x', y) - f(x') - c(x, y)`; `-inf` for no pairs.
    pub max_residual: f64,
    /// `(pair index, index into f.points())` of the largest residual.
    pub worst: Option<(usize, usize)>,
    pub tolerance: f64,
}

/// Checks `f(x) + c(x', y) <= f(x') + c(x, y)` for every pair `(x, y)` and
/// every listed point `x'` where `f` is finite.
pub fn verify_antiderivative(
    f: &Potential,
    pairs: &[(MarginalPoint, MarginalPoint)],
    c: &PairwiseCost,
) -> Result<AntiderivativeReport> {
    f.require_proper()?;
    let per_pair = pairs
        .par_iter()
        .map(|(x, y)| -> Result<(f64, usize)> {
            let fx = f.eval(x)?;
            let cxy = c.eval(x, y)?;
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for (k, (xp, &fxp)) in f.points.iter().zip(&f.values).enumerate() {
                if fxp == f64::INFINITY {
                    continue;
                }
                let r = if fx == f64::INFINITY {
                    f64::INFINITY
                } else {
                    fx + c.eval(xp, y)? - fxp - cxy
                };
                if r > best.0 {
                    best = (r, k);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_residual = f64::NEG_INFINITY;
    let mut worst = None;
    for (p, &(r, k)) in per_pair.iter().enumerate() {
        if r > max_residual {
            max_residual = r;
            worst = Some((p, k));
        }
    }
    Ok(AntiderivativeReport {
        holds: max_residual <= TOLERANCE,
        max_residual,
        worst,
        tolerance: TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::is_two_marginal_cyclically_monotone;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(x: f64) -> MarginalPoint {
        MarginalPoint::scalar(x)
    }

    fn pairs(v: &[(f64, f64)]) -> Vec<(MarginalPoint, MarginalPoint)> {
        v.iter().map(|&(x, y)| (s(x), s(y))).collect()
    }

    fn scalars(v: &[f64]) -> Vec<MarginalPoint> {
        v.iter().map(|&x| s(x)).collect()
    }

    /// Best value over all simple chains of distinct pairs starting at a pair
    /// based at `s1` and ending at `x`.
    fn chain_oracle(c: &PairwiseCost, ps: &[(MarginalPoint, MarginalPoint)], s1: &MarginalPoint, x: &MarginalPoint) -> f64 {
        fn extend(
            c: &PairwiseCost,
            ps: &[(MarginalPoint, MarginalPoint)],
            used: &mut Vec<bool>,
            last: usize,
            acc: f64,
            x: &MarginalPoint,
            best: &mut f64,
        ) {
            let (xl, yl) = &ps[last];
            let close = acc + c.eval(x, yl).unwrap() - c.eval(xl, yl).unwrap();
            *best = best.max(close);
            for q in 0..ps.len() {
                if !used[q] {
                    used[q] = true;
                    let step = c.eval(&ps[q].0, yl).unwrap() - c.eval(xl, yl).unwrap();
                    extend(c, ps, used, q, acc + step, x, best);
                    used[q] = false;
                }
            }
        }
        if x == s1 {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for p in 0..ps.len() {
            if &ps[p].0 == s1 {
                let mut used = vec![false; ps.len()];
                used[p] = true;
                extend(c, ps, &mut used, p, 0.0, x, &mut best);
            }
        }
        best
    }

    #[test]
    fn rockafellar_examples() {
        let c = PairwiseCost::inner_product();
        let r = rockafellar_potential(&c, &pairs(&[(0.0, 0.0), (1.0, 1.0)]), &s(0.0), &scalars(&[0.0, 1.0])).unwrap();
        assert_eq!(r.values(), &[0.0, 0.0]);

        let r = rockafellar_potential(&c, &pairs(&[(0.0, 0.0)]), &s(0.0), &scalars(&[0.0])).unwrap();
        assert_eq!(r.values(), &[0.0]);

        let err = rockafellar_potential(&c, &pairs(&[(0.0, 1.0), (1.0, 0.0)]), &s(0.0), &scalars(&[0.0]));
        match err {
            Err(Error::NotCyclicallyMonotone(w)) => assert_eq!(w.gain, 1.0),
            other => panic!("expected a positive cycle, got {other:?}"),
        }
    }

    #[test]
    fn base_must_be_in_first_projection() {
        let c = PairwiseCost::inner_product();
        assert!(matches!(
            rockafellar_potential(&c, &pairs(&[(0.0, 1.0)]), &s(1.0), &scalars(&[0.0])),
            Err(Error::BasePointNotInProjection)
        ));
    }

    #[test]
    fn identity_graph_on_integer_grid_is_a_riemann_sum() {
        let c = PairwiseCost::inner_product();
        let ps = pairs(&[(-2.0, -2.0), (-1.0, -1.0), (0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        let r = rockafellar_potential(&c, &ps, &s(0.0), &scalars(&[-2.0, -1.0, 0.0, 1.0, 2.0])).unwrap();
        // lower sums of t dt from 0, not the continuum value x^2 / 2
        assert_eq!(r.values(), &[1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn rockafellar_matches_chain_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let costs = [PairwiseCost::inner_product(), PairwiseCost::half_sq_dist().negated()];
        let mut built = 0;
        for trial in 0..300 {
            let c = &costs[trial % 2];
            let m = rng.gen_range(1..=6);
            let ps: Vec<_> = (0..m)
                .map(|_| (s(rng.gen_range(-3..=3) as f64), s(rng.gen_range(-3..=3) as f64)))
                .collect();
            let base = ps[rng.gen_range(0..m)].0.clone();
            let evals = scalars(&[-3.5, -1.0, 0.0, 0.5, 2.0, 3.0]);
            let mono = is_two_marginal_cyclically_monotone(&ps, c).unwrap().holds;
            match RockafellarPotential::build(c, &ps, &base) {
                Ok(r) => {
                    assert!(mono);
                    built += 1;
                    for x in evals.iter().chain(ps.iter().map(|p| &p.0)) {
                        let want = chain_oracle(c, &ps, &base, x);
                        assert!((r.eval(x).unwrap() - want).abs() <= 1e-9, "trial {trial} at {x:?}");
                    }
                }
                Err(Error::NotCyclicallyMonotone(_)) => assert!(!mono),
                Err(e) => panic!("{e}"),
            }
        }
        assert!(built > 50);
    }

    #[test]
    fn rockafellar_is_an_antiderivative() {
        let c = PairwiseCost::inner_product();
        let ps = pairs(&[(-1.0, -2.0), (0.0, 0.5), (1.0, 1.0), (3.0, 4.0)]);
        let evals = scalars(&[-1.0, 0.0, 1.0, 3.0, 2.0, -4.0]);
        let f = rockafellar_potential(&c, &ps, &s(0.0), &evals).unwrap();
        assert_eq!(f.value_at(&s(0.0)), Some(0.0));
        let rep = verify_antiderivative(&f, &ps, &c).unwrap();
        assert!(rep.holds, "{rep:?}");
        let graph = c_subdifferential_graph(&f, &c, &ps).unwrap();
        assert_eq!(graph.pairs.len(), ps.len());
    }

    #[test]
    fn conjugate_examples() {
        let c = PairwiseCost::inner_product();
        let f = Potential::from_closed_form(ClosedForm::q(), scalars(&[-1.0, 0.0, 1.0])).unwrap();
        let fc = c_conjugate(&f, &c, &scalars(&[1.0])).unwrap();
        assert_eq!(fc.values(), &[0.5]);

        let zero = Potential::new(scalars(&[0.0]), vec![0.0]).unwrap();
        let fc = c_conjugate(&zero, &c, &scalars(&[-3.0, 5.0])).unwrap();
        assert_eq!(fc.values(), &[0.0, 0.0]);

        // f^c(0) = max(-0.5, 0, -0.5): unique argmax at index 1
        let am = c_conjugate_with_argmax(&f, &c, &scalars(&[0.0])).unwrap();
        assert_eq!(am[0], (0.0, 1));
        // ties keep the lowest index
        let flat = Potential::new(scalars(&[-1.0, 1.0]), vec![0.0, 0.0]).unwrap();
        let am = c_conjugate_with_argmax(&flat, &c, &scalars(&[0.0])).unwrap();
        assert_eq!(am[0], (0.0, 0));
    }

    #[test]
    fn conjugate_skips_infinite_entries() {
        let c = PairwiseCost::inner_product();
        let f = Potential::new(scalars(&[0.0, 5.0]), vec![1.0, f64::INFINITY]).unwrap();
        assert_eq!(c_conjugate(&f, &c, &scalars(&[2.0])).unwrap().values(), &[-1.0]);
        let none = Potential::new(scalars(&[0.0]), vec![f64::INFINITY]).unwrap();
        assert!(matches!(c_conjugate(&none, &c, &scalars(&[1.0])), Err(Error::ImproperInput)));
    }

    #[test]
    fn numeric_conjugate_of_quadratic_approaches_inverse() {
        let c = PairwiseCost::inner_product();
        let b = vec![vec![2.0, 0.5], vec![0.5, 1.0]];
        let cf = ClosedForm::quadratic(b);
        let h = 0.05;
        let grid: Vec<MarginalPoint> = (-80..=80)
            .flat_map(|i| (-80..=80).map(move |j| MarginalPoint::new(vec![i as f64 * h, j as f64 * h])))
            .collect();
        let f = Potential::from_closed_form(cf.clone(), grid).unwrap();
        let exact = registered_conjugate(&cf, &c).unwrap();
        for y in [vec![0.3, -0.2], vec![1.0, 1.0], vec![-0.7, 0.4]] {
            let y = MarginalPoint::new(y);
            let (num, _) = conjugate_at(&f, &c, &y).unwrap();
            let want = exact.eval(&y).unwrap();
            // discrete sup is below the true sup by O(h^2)
            assert!(num <= want + 1e-12);
            assert!(want - num < 2.0 * h * h, "{num} vs {want}");
        }
        assert_eq!(
            registered_conjugate(&ClosedForm::HalfSqNorm { scale: 4.0 }, &c),
            Some(ClosedForm::HalfSqNorm { scale: 0.25 })
        );
        assert!(registered_conjugate(&cf, &PairwiseCost::half_sq_dist()).is_none());
    }

    #[test]
    fn young_fenchel_on_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = PairwiseCost::inner_product();
        for _ in 0..50 {
            let pts = dedup(&scalars(&(0..6).map(|_| rng.gen_range(-5..=5) as f64).collect::<Vec<_>>()));
            let vals = pts.iter().map(|_| rng.gen_range(-3.0..3.0)).collect();
            let f = Potential::new(pts.clone(), vals).unwrap();
            let ys = scalars(&[-2.0, -0.5, 0.0, 1.5, 4.0]);
            let fc = c_conjugate(&f, &c, &ys).unwrap();
            for (x, fx) in pts.iter().zip(f.values()) {
                for (y, fcy) in ys.iter().zip(fc.values()) {
                    assert!(c.eval(x, y).unwrap() <= fx + fcy + 1e-9);
                }
            }
        }
    }

    #[test]
    fn subdifferential_examples() {
        let c = PairwiseCost::inner_product();
        let f = Potential::from_closed_form(ClosedForm::q(), scalars(&[-1.0, 0.0, 1.0])).unwrap();
        let g = c_subdifferential_graph(&f, &c, &pairs(&[(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)])).unwrap();
        assert_eq!(g.pairs.len(), 3);
        assert!(g.pairs.iter().all(|p| p.residual == 0.0));

        // f(0) + f^c(10) - 0 = 0 + 9.5
        let (fc, _) = conjugate_at(&f, &c, &s(10.0)).unwrap();
        assert_eq!(fc, 9.5);
        let g = c_subdifferential_graph(&f, &c, &pairs(&[(0.0, 10.0)])).unwrap();
        assert!(g.pairs.is_empty());

        assert!(c_subdifferential_graph(&f, &c, &[]).unwrap().pairs.is_empty());
    }

    #[test]
    fn antiderivative_examples() {
        let c = PairwiseCost::inner_product();
        let zero = Potential::new(scalars(&[0.0, 1.0]), vec![0.0, 0.0]).unwrap();
        let rep = verify_antiderivative(&zero, &pairs(&[(0.0, 1.0), (1.0, 0.0)]), &c).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.max_residual, 1.0);
        assert_eq!(rep.worst, Some((0, 1)));

        let constant = PairwiseCost::bilinear(vec![vec![0.0]]);
        let f = Potential::new(scalars(&[2.0]), vec![0.0]).unwrap();
        assert!(verify_antiderivative(&f, &pairs(&[(2.0, -7.0)]), &constant).unwrap().holds);
    }

    #[test]
    fn potential_validation_and_json() {
        assert!(Potential::new(scalars(&[0.0, 0.0]), vec![1.0, 2.0]).is_err());
        assert!(Potential::new(scalars(&[0.0]), vec![f64::NEG_INFINITY]).is_err());
        assert!(Potential::new(scalars(&[0.0]), vec![]).is_err());
        let p = Potential::new(scalars(&[0.0, 1.0]), vec![0.0, 2.0]).unwrap();
        assert!(p.clone().with_closed_form(ClosedForm::q()).is_err());
        assert_eq!(p.eval(&s(3.0)).unwrap(), f64::INFINITY);

        let ind = ClosedForm::indicator(crate::closed_form::Constraint::ZeroCoords { coords: vec![1] }, ClosedForm::q());
        let pts = vec![MarginalPoint::new(vec![1.0, 0.0]), MarginalPoint::new(vec![1.0, 1.0])];
        let p = Potential::from_closed_form(ind, pts).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""values":[0.5,"inf"]"#), "{json}");
        let back: Potential = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.eval(&MarginalPoint::new(vec![2.0, 0.0])).unwrap(), 2.0);
    }
}

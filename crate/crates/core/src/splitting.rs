//! Splitting tuples `(u_1, ..., u_N)` with `sum_i u_i(x_i) >= c(x)` everywhere
//! and equality on `Gamma`.
//!
//! [`assemble_splitting_tuple`] builds one from Rockafellar potentials of
//! the two-marginal projections:
//! `u_i = sum_{k>i} f_ik + sum_{k<i} f_ki^c + h_i`, each tabulated on
//! `Gamma_i` plus a caller grid. [`certify_splitting`] checks the inequality
//! on a declared sample and equality on `Gamma`.

use std::collections::HashSet;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antiderivative::{c_subdifferential_graph, conjugate_at, Potential, RockafellarPotential};
use crate::closed_form::ClosedForm;
use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::monotone::{is_n_c_monotone_bruteforce, MonotonicityVerdict, TOLERANCE};
use crate::point::{MarginalPoint, ProductPoint};

/// How a pair potential `f_ij` was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum PairSource {
    Rockafellar { i: usize, j: usize, base: MarginalPoint },
    ClosedForm { i: usize, j: usize, form: ClosedForm },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub base: ProductPoint,
    pub pairs: Vec<PairSource>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingTuple {
    pub potentials: Vec<Potential>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl SplittingTuple {
    pub fn new(potentials: Vec<Potential>) -> Self {
        Self {
            potentials,
            provenance: None,
        }
    }

    /// Tuple given entirely by closed forms, evaluable everywhere.
    pub fn from_closed_forms(forms: Vec<ClosedForm>) -> Result<Self> {
        Ok(Self::new(
            forms
                .into_iter()
                .map(|cf| Potential::from_closed_form(cf, Vec::new()))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn len(&self) -> usize {
        self.potentials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potentials.is_empty()
    }

    /// `sum_i u_i(p_i)`, `+inf` if any term is.
    pub fn sum_at(&self, p: &ProductPoint) -> Result<f64> {
        if p.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: p.len(),
            });
        }
        let mut total = 0.0;
        for (u, x) in self.potentials.iter().zip(p.parts()) {
            total += u.eval(x)?;
        }
        Ok(total)
    }

    /// `(u_1 + h_1, ..., u_N + h_N)`, the splitting tuple for `c + sum h_i`.
    pub fn shifted(&self, h: &[ClosedForm]) -> Result<Self> {
        if h.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: h.len(),
            });
        }
        let potentials = self
            .potentials
            .iter()
            .zip(h)
            .map(|(u, hi)| {
                let values = u
                    .points()
                    .iter()
                    .zip(u.values())
                    .map(|(x, v)| Ok(v + hi.eval(x)?))
                    .collect::<Result<Vec<_>>>()?;
                let p = Potential::new(u.points().to_vec(), values)?;
                match u.closed_form() {
                    Some(cf) => p.with_closed_form(cf.clone().plus(hi.clone())),
                    None => Ok(p),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            potentials,
            provenance: self.provenance.clone(),
        })
    }

    /// Listed points of every potential.
    pub fn domains(&self) -> Vec<Vec<MarginalPoint>> {
        self.potentials.iter().map(|u| u.points().to_vec()).collect()
    }
}

fn dedup_chain<'a>(first: impl Iterator<Item = &'a MarginalPoint>, rest: &'a [MarginalPoint]) -> Vec<MarginalPoint> {
    let mut seen = HashSet::new();
    first
        .chain(rest.iter())
        .filter(|p| seen.insert(*p))
        .cloned()
        .collect()
}

/// Builds `u_i` on `Gamma_i` followed by `eval_grids[i]` (duplicates
/// dropped). Requires every projection `Gamma_ij` to be `c_ij`-cyclically
/// monotone.
pub fn assemble_splitting_tuple(
    g: &GammaSet,
    spec: &CostSpec,
    s: &ProductPoint,
    eval_grids: &[Vec<MarginalPoint>],
) -> Result<SplittingTuple> {
    let n = spec.n_marginals();
    if g.dims() != spec.dims() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.n_marginals(),
        });
    }
    if eval_grids.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: eval_grids.len(),
        });
    }
    if !g.contains(s) {
        return Err(Error::BasePointNotInGamma);
    }
    let mut domains = Vec::with_capacity(n);
    for (i, grid) in eval_grids.iter().enumerate() {
        if let Some(x) = grid.iter().find(|x| x.dim() != spec.dims()[i]) {
            return Err(Error::DimensionMismatch {
                expected: spec.dims()[i],
                found: x.dim(),
            });
        }
        domains.push(dedup_chain(g.project(i)?.iter(), grid));
    }

    // f_ij tabulated on domain_i, keyed by (i, j).
    let mut pair_tables = Vec::new();
    let mut sources = Vec::new();
    for (i, j, c) in spec.pairs() {
        let proj = g.project_pair(i, j)?;
        let r = match RockafellarPotential::build(c, &proj, s.part(i)) {
            Ok(r) => r,
            Err(Error::NotCyclicallyMonotone(cycle)) => return Err(Error::ProjectionNotMonotone { i, j, cycle }),
            Err(e) => return Err(e),
        };
        pair_tables.push(((i, j), r.tabulate(&domains[i])?));
        sources.push(PairSource::Rockafellar {
            i,
            j,
            base: s.part(i).clone(),
        });
    }

    let mut potentials = Vec::with_capacity(n);
    for (i, domain) in domains.into_iter().enumerate() {
        let values = domain
            .par_iter()
            .map(|x| -> Result<f64> {
                let mut u = 0.0;
                for ((a, b), f) in &pair_tables {
                    if *a == i {
                        u += f.value_at(x).expect("tabulated on domain_i");
                    } else if *b == i {
                        u += conjugate_at(f, spec.pair(*a, *b)?, x)?.0;
                    }
                }
                Ok(u + spec.shift_term(i, x)?)
            })
            .collect::<Result<Vec<_>>>()?;
        potentials.push(Potential::new(domain, values)?);
    }
    Ok(SplittingTuple {
        potentials,
        provenance: Some(Provenance {
            base: s.clone(),
            pairs: sources,
        }),
    })
}

/// Cartesian product of per-marginal point lists, first marginal slowest.
pub fn product_grid(lists: &[Vec<MarginalPoint>]) -> Vec<ProductPoint> {
    let mut out = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for x in list {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(ProductPoint::new).collect()
}

/// Sample of points on which the inequality is tested.
#[derive(Clone, Debug)]
pub enum TestPoints {
    Explicit(Vec<ProductPoint>),
    /// Product of the tuple's listed points; seeded uniform draws from it if
    /// it has more than `max_points` elements.
    ProductOfDomains { max_points: usize, seed: u64 },
    /// Lattice over the bounding box of `Gamma`'s marginals, expanded by
    /// half its width on every side, plus seeded uniform points in the box.
    Lattice { per_axis: usize, random: usize, seed: u64 },
}

/// Cap on lattice size; the per-axis count shrinks in high dimension.
const MAX_LATTICE: usize = 1 << 16;

impl TestPoints {
    pub fn lattice_default(seed: u64) -> Self {
        TestPoints::Lattice {
            per_axis: 11,
            random: 10_000,
            seed,
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            TestPoints::Explicit(_) => None,
            TestPoints::ProductOfDomains { seed, .. } | TestPoints::Lattice { seed, .. } => Some(*seed),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            TestPoints::Explicit(_) => "explicit",
            TestPoints::ProductOfDomains { .. } => "product_of_domains",
            TestPoints::Lattice { .. } => "lattice",
        }
    }

    pub fn generate(&self, g: &GammaSet, tuple: &SplittingTuple) -> Result<Vec<ProductPoint>> {
        match self {
            TestPoints::Explicit(v) => Ok(v.clone()),
            TestPoints::ProductOfDomains { max_points, seed } => {
                let domains = tuple.domains();
                let total = domains.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()));
                match total {
                    Some(t) if t <= *max_points => Ok(product_grid(&domains)),
                    _ => {
                        if domains.iter().any(|d| d.is_empty()) {
                            return Ok(Vec::new());
                        }
                        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                        Ok((0..*max_points)
                            .map(|_| {
                                ProductPoint::new(domains.iter().map(|d| d[rng.gen_range(0..d.len())].clone()).collect())
                            })
                            .collect())
                    }
                }
            }
            TestPoints::Lattice { per_axis, random, seed } => {
                let (lo, hi) = bounding_box(g);
                let total_dim: usize = g.dims().iter().sum();
                let mut k = (*per_axis).max(2);
                while k > 2 && (k as f64).powi(total_dim as i32) > MAX_LATTICE as f64 {
                    k -= 1;
                }
                let axes: Vec<Vec<f64>> = lo
                    .iter()
                    .zip(&hi)
                    .map(|(&a, &b)| (0..k).map(|t| a + (b - a) * t as f64 / (k - 1) as f64).collect())
                    .collect();
                let mut flat: Vec<Vec<f64>> = vec![Vec::new()];
                if (k as f64).powi(total_dim as i32) <= MAX_LATTICE as f64 {
                    for axis in &axes {
                        flat = flat
                            .into_iter()
                            .flat_map(|p| {
                                axis.iter().map(move |&v| {
                                    let mut q = p.clone();
                                    q.push(v);
                                    q
                                })
                            })
                            .collect();
                    }
                } else {
                    flat.clear();
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let dists: Vec<Uniform<f64>> = lo.iter().zip(&hi).map(|(&a, &b)| Uniform::new_inclusive(a, b)).collect();
                for _ in 0..*random {
                    flat.push(dists.iter().map(|d| d.sample(&mut rng)).collect());
                }
                flat.into_iter().map(|coords| split_coords(&coords, g.dims())).collect()
            }
        }
    }
}

fn bounding_box(g: &GammaSet) -> (Vec<f64>, Vec<f64>) {
    let total: usize = g.dims().iter().sum();
    let mut lo = vec![f64::INFINITY; total];
    let mut hi = vec![f64::NEG_INFINITY; total];
    for p in g.points() {
        for (k, v) in p.parts().iter().flat_map(|x| x.coords()).enumerate() {
            lo[k] = lo[k].min(*v);
            hi[k] = hi[k].max(*v);
        }
    }
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let w = *b - *a;
        let pad = if w > 0.0 { 0.5 * w } else { 1.0 };
        *a -= pad;
        *b += pad;
    }
    (lo, hi)
}

fn split_coords(coords: &[f64], dims: &[usize]) -> Result<ProductPoint> {
    let mut parts = Vec::with_capacity(dims.len());
    let mut at = 0;
    for &d in dims {
        parts.push(MarginalPoint::try_new(coords[at..at + d].to_vec())?);
        at += d;
    }
    Ok(ProductPoint::new(parts))
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleInfo {
    pub kind: &'static str,
    pub seed: Option<u64>,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplittingCertificate {
    pub pass: bool,
    /// Largest `c(p) - sum_i u_i(p_i)` over test points with all `u_i`
    /// finite; negative means strict slack. `None` if there are no such points.
    pub max_inequality_violation: Option<f64>,
    pub worst_violation: Option<ProductPoint>,
    pub max_equality_residual_on_gamma: f64,
    pub worst_residual: ProductPoint,
    pub finite_points: usize,
    /// Test points where some `u_i` is `+inf`; the inequality holds there
    /// trivially.
    pub infinite_points: usize,
    pub sample: SampleInfo,
    pub tolerance: f64,
}

impl SplittingCertificate {
    /// Recomputes `(violation at worst_violation, residual at worst_residual)`.
    pub fn recheck(&self, tuple: &SplittingTuple, spec: &CostSpec) -> Result<(Option<f64>, f64)> {
        let viol = match &self.worst_violation {
            Some(p) => Some(spec.eval(p)? - tuple.sum_at(p)?),
            None => None,
        };
        let p = &self.worst_residual;
        Ok((viol, (spec.eval(p)? - tuple.sum_at(p)?).abs()))
    }
}

pub fn certify_splitting(
    tuple: &SplittingTuple,
    g: &GammaSet,
    spec: &CostSpec,
    test_points: &TestPoints,
) -> Result<SplittingCertificate> {
    certify_splitting_with(tuple, g, spec, test_points, TOLERANCE)
}

/// Maxima are reduced sequentially in point order (ties keep the earliest
/// point), so certificates do not depend on thread scheduling.
pub fn certify_splitting_with(
    tuple: &SplittingTuple,
    g: &GammaSet,
    spec: &CostSpec,
    test_points: &TestPoints,
    tol: f64,
) -> Result<SplittingCertificate> {
    if tuple.len() != spec.n_marginals() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_marginals(),
            found: tuple.len(),
        });
    }
    let mut max_res = f64::NEG_INFINITY;
    let mut worst_res = None;
    for p in g.points() {
        for (i, (u, x)) in tuple.potentials.iter().zip(p.parts()).enumerate() {
            if u.eval(x)? == f64::INFINITY {
                return Err(Error::UndefinedOnGamma { marginal: i });
            }
        }
        let r = (spec.eval(p)? - tuple.sum_at(p)?).abs();
        if r > max_res {
            max_res = r;
            worst_res = Some(p.clone());
        }
    }

    let points = test_points.generate(g, tuple)?;
    let gaps = points
        .par_iter()
        .map(|p| -> Result<Option<f64>> {
            let s = tuple.sum_at(p)?;
            if s == f64::INFINITY {
                Ok(None)
            } else {
                Ok(Some(spec.eval(p)? - s))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_viol: Option<(f64, usize)> = None;
    let mut infinite = 0;
    for (k, gap) in gaps.iter().enumerate() {
        match gap {
            None => infinite += 1,
            Some(v) => {
                if max_viol.is_none_or(|(m, _)| *v > m) {
                    max_viol = Some((*v, k));
                }
            }
        }
    }
    let pass = max_res <= tol && max_viol.is_none_or(|(v, _)| v <= tol);
    Ok(SplittingCertificate {
        pass,
        max_inequality_violation: max_viol.map(|(v, _)| v),
        worst_violation: max_viol.map(|(_, k)| points[k].clone()),
        max_equality_residual_on_gamma: max_res,
        worst_residual: worst_res.expect("gamma is nonempty"),
        finite_points: points.len() - infinite,
        infinite_points: infinite,
        sample: SampleInfo {
            kind: test_points.kind(),
            seed: test_points.seed(),
            count: points.len(),
        },
        tolerance: tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairGraphCheck {
    pub i: usize,
    pub j: usize,
    /// Pairs of `Gamma_i x Gamma_j` in the c-subdifferential graph of `f_ij`
    /// but not in `Gamma_ij`.
    pub extra_pairs: Vec<(MarginalPoint, MarginalPoint)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    /// `Gamma` equals the intersection of the preimages of its pair
    /// projections within `Gamma_1 x ... x Gamma_N`.
    pub gamma_is_intersection: bool,
    /// Intersection points outside `Gamma`.
    pub extra_points: Vec<ProductPoint>,
    /// Whether every `Gamma_ij` is the whole c-subdifferential graph of its
    /// pair potential (restricted to `Gamma_i x Gamma_j`). `None` when the
    /// tuple does not record Rockafellar pair potentials.
    pub pair_graphs_exact: Option<bool>,
    pub pair_graphs: Vec<PairGraphCheck>,
    /// Test points on `Gamma_1 x ... x Gamma_N` that attain equality but are
    /// not in `Gamma`.
    pub equality_off_gamma: Vec<ProductPoint>,
    pub checked_on_product: usize,
    /// Equality on the checked points happens exactly on `Gamma`.
    pub holds: bool,
}

fn pair_graph_checks(g: &GammaSet, tuple: &SplittingTuple, spec: &CostSpec) -> Result<Option<Vec<PairGraphCheck>>> {
    let Some(prov) = &tuple.provenance else {
        return Ok(None);
    };
    let mut out = Vec::new();
    for src in &prov.pairs {
        let PairSource::Rockafellar { i, j, base } = src else {
            return Ok(None);
        };
        let (i, j) = (*i, *j);
        let c = spec.pair(i, j)?;
        let f = RockafellarPotential::build(c, &g.project_pair(i, j)?, base)?.tabulate(tuple.potentials[i].points())?;
        let gamma_ij: HashSet<(MarginalPoint, MarginalPoint)> = g.project_pair(i, j)?.into_iter().collect();
        let candidates: Vec<(MarginalPoint, MarginalPoint)> = g
            .project(i)?
            .into_iter()
            .flat_map(|x| g.project(j).unwrap_or_default().into_iter().map(move |y| (x.clone(), y)))
            .filter(|xy| !gamma_ij.contains(xy))
            .collect();
        let graph = c_subdifferential_graph(&f, c, &candidates)?;
        out.push(PairGraphCheck {
            i,
            j,
            extra_pairs: graph.pairs.into_iter().map(|p| (p.x, p.y)).collect(),
        });
    }
    Ok(Some(out))
}

/// Compares the equality set of the tuple with `Gamma` on the test points
/// that lie in `Gamma_1 x ... x Gamma_N`, alongside the two hypotheses under
/// which equality must happen only on `Gamma`: `Gamma` is the intersection
/// of its pair preimages, and each `Gamma_ij` is the full c-subdifferential
/// graph of `f_ij`. If both hypotheses hold and equality still occurs off
/// `Gamma`, the result is an [`Error::InternalInconsistency`].
pub fn check_exactness_condition(
    g: &GammaSet,
    tuple: &SplittingTuple,
    spec: &CostSpec,
    test_points: &TestPoints,
) -> Result<ExactnessReport> {
    let extra: Vec<ProductPoint> = g
        .preimage_intersection()?
        .into_iter()
        .filter(|p| !g.contains(p))
        .collect();
    let pair_graphs = pair_graph_checks(g, tuple, spec)?;
    let pair_graphs_exact = pair_graphs
        .as_ref()
        .map(|v| v.iter().all(|c| c.extra_pairs.is_empty()));
    let projections: Vec<HashSet<MarginalPoint>> = (0..g.n_marginals())
        .map(|i| g.project(i).map(|v| v.into_iter().collect()))
        .collect::<Result<_>>()?;
    let on_product: Vec<ProductPoint> = test_points
        .generate(g, tuple)?
        .into_iter()
        .filter(|p| p.parts().iter().zip(&projections).all(|(x, set)| set.contains(x)))
        .collect();
    let equal = on_product
        .par_iter()
        .map(|p| -> Result<bool> {
            let s = tuple.sum_at(p)?;
            Ok(s.is_finite() && (spec.eval(p)? - s).abs() <= TOLERANCE)
        })
        .collect::<Result<Vec<_>>>()?;
    let equality_off_gamma: Vec<ProductPoint> = on_product
        .iter()
        .zip(&equal)
        .filter(|(p, &eq)| eq && !g.contains(p))
        .map(|(p, _)| p.clone())
        .collect();
    if extra.is_empty() && pair_graphs_exact == Some(true) && !equality_off_gamma.is_empty() {
        return Err(Error::InternalInconsistency(format!(
            "equality at {:?} outside gamma although both exactness hypotheses hold",
            equality_off_gamma[0]
        )));
    }
    Ok(ExactnessReport {
        gamma_is_intersection: extra.is_empty(),
        extra_points: extra,
        pair_graphs_exact,
        pair_graphs: pair_graphs.unwrap_or_default(),
        holds: equality_off_gamma.is_empty(),
        equality_off_gamma,
        checked_on_product: on_product.len(),
    })
}

/// Largest product of projections certified before the brute-force run.
const MAX_PRODUCT_CHECK: usize = 200_000;

/// Brute-force `n`-c-monotonicity of a set that carries a splitting tuple.
/// The tuple is first certified on `Gamma_1 x ... x Gamma_N`, which holds
/// every rearranged tuple; a failing brute-force verdict after that is a bug.
pub fn splitting_implies_monotone_check(
    tuple: &SplittingTuple,
    g: &GammaSet,
    spec: &CostSpec,
    n: usize,
) -> Result<MonotonicityVerdict> {
    let projections: Vec<Vec<MarginalPoint>> = (0..g.n_marginals()).map(|i| g.project(i)).collect::<Result<_>>()?;
    let size = projections.iter().try_fold(1usize, |a, p| a.checked_mul(p.len()));
    if size.is_none_or(|s| s > MAX_PRODUCT_CHECK) {
        return Err(Error::BudgetExceeded("product of projections is too large".into()));
    }
    let cert = certify_splitting(tuple, g, spec, &TestPoints::Explicit(product_grid(&projections)))?;
    if !cert.pass {
        return Err(Error::Invalid(
            "tuple does not certify on the product of projections".into(),
        ));
    }
    let verdict = is_n_c_monotone_bruteforce(g, spec, n)?;
    if !verdict.holds {
        return Err(Error::InternalInconsistency(format!(
            "certified splitting tuple but {n}-c-monotonicity fails"
        )));
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antiderivative::rockafellar_potential;
    use crate::cost::{classical_cost, Classical};

    fn s(x: f64) -> MarginalPoint {
        MarginalPoint::scalar(x)
    }

    #[test]
    fn single_point_gives_zero_potentials() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 3, 1).unwrap();
        let t = assemble_splitting_tuple(&g, &c1, &g.points()[0], &[vec![], vec![], vec![]]).unwrap();
        for u in &t.potentials {
            assert_eq!(u.values(), &[0.0]);
        }
        let cert = certify_splitting(&t, &g, &c1, &TestPoints::ProductOfDomains { max_points: 100, seed: 0 }).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.max_equality_residual_on_gamma, 0.0);
    }

    #[test]
    fn diagonal_samples_double_the_pair_potential() {
        let g = GammaSet::from_scalar_rows(&[vec![-1.0; 3], vec![0.0; 3], vec![1.0; 3]]).unwrap();
        let c1 = classical_cost(Classical::C1, 3, 1).unwrap();
        let base = ProductPoint::from_scalars(&[0.0, 0.0, 0.0]);
        let t = assemble_splitting_tuple(&g, &c1, &base, &[vec![], vec![], vec![]]).unwrap();
        let proj = g.project_pair(0, 1).unwrap();
        let pts = g.project(0).unwrap();
        let f = rockafellar_potential(c1.pair(0, 1).unwrap(), &proj, &s(0.0), &pts).unwrap();
        // Every chain from 0 gains nothing, and f^c(t) = max_x xt = |t|.
        assert_eq!(f.values(), &[0.0, 0.0, 0.0]);
        assert_eq!(t.potentials[0].values(), &[0.0, 0.0, 0.0]);
        assert_eq!(t.potentials[1].values(), &[1.0, 0.0, 1.0]);
        assert_eq!(t.potentials[2].values(), &[2.0, 0.0, 2.0]);
        let cert = certify_splitting(&t, &g, &c1, &TestPoints::ProductOfDomains { max_points: 1000, seed: 0 }).unwrap();
        assert!(cert.pass, "{cert:?}");
        assert_eq!(cert.sample.count, 27);
        // Gamma is the intersection of its pair preimages, but the discrete
        // pair potentials have larger subdifferential graphs, e.g. (-1, 0)
        // for f_12, so equality also occurs off gamma.
        let rep = check_exactness_condition(&g, &t, &c1, &TestPoints::ProductOfDomains { max_points: 1000, seed: 0 }).unwrap();
        assert!(rep.gamma_is_intersection);
        assert_eq!(rep.pair_graphs_exact, Some(false));
        assert!(rep.pair_graphs[0].extra_pairs.contains(&(s(-1.0), s(0.0))));
        assert!(rep.equality_off_gamma.contains(&ProductPoint::from_scalars(&[-1.0, -1.0, 0.0])));
        assert!(!rep.holds);
        assert!(splitting_implies_monotone_check(&t, &g, &c1, 3).unwrap().holds);
    }

    #[test]
    fn zero_potentials_fail_against_c1() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 2, 1).unwrap();
        let t = SplittingTuple::from_closed_forms(vec![ClosedForm::Zero, ClosedForm::Zero]).unwrap();
        let p = ProductPoint::from_scalars(&[1.0, 1.0]);
        let cert = certify_splitting(&t, &g, &c1, &TestPoints::Explicit(vec![p.clone()])).unwrap();
        assert!(!cert.pass);
        assert_eq!(cert.max_inequality_violation, Some(1.0));
        assert_eq!(cert.worst_violation, Some(p));
        assert_eq!(cert.recheck(&t, &c1).unwrap(), (Some(1.0), 0.0));
    }

    #[test]
    fn projection_failure_reports_the_pair() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, -1.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 3, 1).unwrap();
        match assemble_splitting_tuple(&g, &c1, &g.points()[0], &[vec![], vec![], vec![]]) {
            Err(Error::ProjectionNotMonotone { i, j, cycle }) => {
                assert_eq!((i, j), (0, 2));
                assert_eq!(cycle.gain, 1.0);
            }
            other => panic!("{other:?}"),
        }
        let off = ProductPoint::from_scalars(&[5.0, 5.0, 5.0]);
        assert!(matches!(
            assemble_splitting_tuple(&g, &c1, &off, &[vec![], vec![], vec![]]),
            Err(Error::BasePointNotInGamma)
        ));
    }

    #[test]
    fn grid_points_extend_domains() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0], vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 2, 1).unwrap();
        let grid: Vec<MarginalPoint> = (-4..=8).map(|k| s(0.5 * k as f64)).collect();
        let t = assemble_splitting_tuple(&g, &c1, &g.points()[1], &[grid.clone(), grid]).unwrap();
        assert_eq!(t.potentials[0].len(), 13);
        assert_eq!(t.potentials[0].value_at(&s(1.0)), Some(0.0));
        let cert = certify_splitting(&t, &g, &c1, &TestPoints::ProductOfDomains { max_points: 10_000, seed: 3 }).unwrap();
        assert!(cert.pass, "{cert:?}");
        assert_eq!(cert.sample.count, 13 * 13);
    }

    #[test]
    fn infinite_points_are_counted() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 2, 1).unwrap();
        let t = SplittingTuple::new(vec![
            Potential::new(vec![s(0.0)], vec![0.0]).unwrap(),
            Potential::new(vec![s(0.0)], vec![0.0]).unwrap(),
        ]);
        let cert = certify_splitting(&t, &g, &c1, &TestPoints::Lattice { per_axis: 3, random: 5, seed: 1 }).unwrap();
        assert_eq!(cert.infinite_points + cert.finite_points, cert.sample.count);
        assert_eq!(cert.sample.count, 9 + 5);
        assert_eq!(cert.finite_points, 1);
        assert!(cert.pass);

        let bad = SplittingTuple::new(vec![
            Potential::new(vec![s(1.0)], vec![0.0]).unwrap(),
            Potential::new(vec![s(0.0)], vec![0.0]).unwrap(),
        ]);
        assert!(matches!(
            certify_splitting(&bad, &g, &c1, &TestPoints::Explicit(vec![])),
            Err(Error::UndefinedOnGamma { marginal: 0 })
        ));
    }

    #[test]
    fn lattice_is_deterministic_and_covers_the_box() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0], vec![2.0, 4.0]]).unwrap();
        let t = SplittingTuple::from_closed_forms(vec![ClosedForm::Zero, ClosedForm::Zero]).unwrap();
        let tp = TestPoints::Lattice { per_axis: 5, random: 20, seed: 9 };
        let a = tp.generate(&g, &t).unwrap();
        assert_eq!(a, tp.generate(&g, &t).unwrap());
        assert_eq!(a.len(), 25 + 20);
        assert_eq!(a[0], ProductPoint::from_scalars(&[-1.0, -2.0]));
        assert_eq!(a[24], ProductPoint::from_scalars(&[3.0, 6.0]));
    }

    #[test]
    fn exactness_on_three_point_set() {
        // Gamma_13 = {(0,0),(1,0),(0,1)} is not monotone, so no tuple can be
        // assembled; the intersection test needs none.
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 3, 1).unwrap();
        assert!(assemble_splitting_tuple(&g, &c1, &g.points()[0], &[vec![], vec![], vec![]]).is_err());
        let t = SplittingTuple::from_closed_forms(vec![ClosedForm::Zero, ClosedForm::Zero, ClosedForm::Zero]).unwrap();
        let rep = check_exactness_condition(&g, &t, &c1, &TestPoints::Explicit(vec![])).unwrap();
        assert!(rep.gamma_is_intersection);
        assert!(rep.extra_points.is_empty());
        assert_eq!(rep.pair_graphs_exact, None);
    }

    #[test]
    fn exactness_hypotheses_are_reported() {
        // Rockafellar potentials of finite pair sets are piecewise affine,
        // so their subdifferential graphs pick up neighbouring pairs.
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 1.0], vec![3.0, 3.0, 2.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 3, 1).unwrap();
        let t = assemble_splitting_tuple(&g, &c1, &g.points()[0], &[vec![], vec![], vec![]]).unwrap();
        let tp = TestPoints::ProductOfDomains { max_points: 100, seed: 0 };
        let rep = check_exactness_condition(&g, &t, &c1, &tp).unwrap();
        assert_eq!(rep.checked_on_product, 27);
        assert!(rep.gamma_is_intersection);
        assert_eq!(rep.pair_graphs_exact, Some(false));
        assert!(rep.pair_graphs[0].extra_pairs.contains(&(s(1.0), s(0.0))));
        assert!(rep.equality_off_gamma.contains(&ProductPoint::from_scalars(&[1.0, 0.0, 0.0])));

        let single = GammaSet::from_scalar_rows(&[vec![2.0, -1.0, 0.5]]).unwrap();
        let t = assemble_splitting_tuple(&single, &c1, &single.points()[0], &[vec![], vec![], vec![]]).unwrap();
        let rep = check_exactness_condition(&single, &t, &c1, &tp).unwrap();
        assert_eq!(rep.pair_graphs_exact, Some(true));
        assert!(rep.holds);
    }

    #[test]
    fn exactness_detects_extra_points() {
        // Pair projections are all full; the intersection is all of {0,1}^3
        // and equality holds at the four points outside gamma as well.
        let g = GammaSet::from_scalar_rows(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let t = SplittingTuple::from_closed_forms(vec![ClosedForm::Zero, ClosedForm::Zero, ClosedForm::Zero]).unwrap();
        let zero_cost = crate::cost::CostSpec::uniform(vec![1, 1, 1], crate::cost::PairwiseCost::bilinear(vec![vec![0.0]])).unwrap();
        let grid = product_grid(&vec![vec![s(0.0), s(1.0)]; 3]);
        let rep = check_exactness_condition(&g, &t, &zero_cost, &TestPoints::Explicit(grid)).unwrap();
        assert!(!rep.gamma_is_intersection);
        assert_eq!(rep.extra_points.len(), 4);
        assert_eq!(rep.equality_off_gamma.len(), 4);
        assert!(!rep.holds);
    }

    #[test]
    fn shift_covariance() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 1.0], vec![2.0, 3.0, 5.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 3, 1).unwrap();
        let grid: Vec<MarginalPoint> = (-3..=6).map(|k| s(k as f64)).collect();
        let t = assemble_splitting_tuple(&g, &c1, &g.points()[0], &vec![grid; 3]).unwrap();
        let h = vec![
            ClosedForm::q(),
            ClosedForm::Linear { w: vec![-3.0] },
            ClosedForm::Constant { value: 2.5 },
        ];
        let shifted_spec = crate::cost::add_separable_shift(&c1, h.clone()).unwrap();
        let tp = TestPoints::ProductOfDomains { max_points: 5000, seed: 2 };
        let a = certify_splitting(&t, &g, &c1, &tp).unwrap();
        let b = certify_splitting(&t.shifted(&h).unwrap(), &g, &shifted_spec, &tp).unwrap();
        assert!(a.pass && b.pass);
        let (va, vb) = (a.max_inequality_violation.unwrap(), b.max_inequality_violation.unwrap());
        assert!((va - vb).abs() <= 1e-12);
        assert!((a.max_equality_residual_on_gamma - b.max_equality_residual_on_gamma).abs() <= 1e-12);
    }

    #[test]
    fn tuple_json_round_trip() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap();
        let c1 = classical_cost(Classical::C1, 2, 1).unwrap();
        let t = assemble_splitting_tuple(&g, &c1, &g.points()[0], &[vec![s(0.5)], vec![]]).unwrap();
        let json = crate::io::to_json(&t).unwrap();
        let back: SplittingTuple = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}

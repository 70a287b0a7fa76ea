//! Quadratic examples: splitting potentials for commuting positive definite
//! families, and a three-marginal set in `(R^2)^3` that is a c1-splitting
//! set although none of its planar projections is monotone.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::distributions::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::closed_form::{ClosedForm, Constraint};
use crate::cost::{classical_cost, Classical, CostSpec};
use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::monotone::{
    check_projection_condition, is_n_c_monotone_bruteforce, is_pair_monotone_classical, ProjectionReport,
};
use crate::point::{MarginalPoint, ProductPoint};
use crate::splitting::{certify_splitting_with, SplittingCertificate, SplittingTuple, TestPoints};

pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
pub const PSD_THRESHOLD: f64 = -1e-10;
pub const COMMUTE_TOLERANCE: f64 = 1e-9;

/// Dense real symmetric matrix, serialized row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Fails with [`Error::NotSymmetric`] if `|a_ij - a_ji| > 1e-12` for
    /// some entry; the stored matrix is the exact symmetric part.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(m, SYMMETRY_TOLERANCE)
    }

    fn with_tolerance(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let asym = (&m - m.transpose()).amax();
        if !(asym <= tol) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self((&m + m.transpose()) * 0.5))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: r.len(),
            });
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn scaled_identity(d: usize, s: f64) -> Self {
        Self(DMatrix::identity(d, d) * s)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.0.row(i).iter().copied().collect()).collect()
    }

    /// Ascending eigenvalues with matching unit eigenvectors (columns).
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<f64>) {
        let e = SymmetricEigen::try_new(self.0.clone(), 1e-15, 0)
            .expect("symmetric eigen iteration converges");
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let values = order.iter().map(|&k| e.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |i, j| e.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0.first().copied().unwrap_or(f64::INFINITY)
    }

    /// `q_A(x) = <x, A x> / 2`.
    pub fn q(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let v = DVector::from_column_slice(x);
        Ok(0.5 * v.dot(&(&self.0 * &v)))
    }

    pub fn to_closed_form(&self) -> ClosedForm {
        ClosedForm::quadratic(self.rows())
    }

    pub fn inverse(&self) -> Option<SymMatrix> {
        let inv = self.0.clone().cholesky()?.inverse();
        Some(Self((&inv + inv.transpose()) * 0.5))
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

pub fn psd_check(a: &SymMatrix) -> PsdCheck {
    let min_eigenvalue = a.min_eigenvalue();
    PsdCheck {
        is_psd: min_eigenvalue >= PSD_THRESHOLD,
        min_eigenvalue,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticSplitting {
    /// `M_i = (sum_{k != i} Q_k) Q_i^{-1}`
    pub m: Vec<SymMatrix>,
    /// `G_i = (sum_k Q_k) Q_i^{-1} = I + M_i`
    pub g: Vec<SymMatrix>,
    pub m_min_eigenvalues: Vec<f64>,
}

impl QuadraticSplitting {
    /// `(q_{M_1}, ..., q_{M_N})`, a c1-splitting tuple of
    /// `{(Q_1 v, ..., Q_N v)}`.
    pub fn tuple(&self) -> Result<SplittingTuple> {
        SplittingTuple::from_closed_forms(self.m.iter().map(SymMatrix::to_closed_form).collect())
    }

    /// `(q_{G_1}, ..., q_{G_N})`, the matching tuple for c3.
    pub fn shifted_tuple(&self) -> Result<SplittingTuple> {
        SplittingTuple::from_closed_forms(self.g.iter().map(SymMatrix::to_closed_form).collect())
    }
}

fn product_symmetric(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<SymMatrix> {
    let p = a * b;
    let scale = p.amax().max(1.0);
    SymMatrix::with_tolerance(p, COMMUTE_TOLERANCE * scale)
}

pub fn quadratic_splitting(q: &[SymMatrix]) -> Result<QuadraticSplitting> {
    if q.is_empty() {
        return Err(Error::Invalid("need at least one matrix".into()));
    }
    let d = q[0].dim();
    if let Some(m) = q.iter().find(|m| m.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.dim(),
        });
    }
    let mut inverses = Vec::with_capacity(q.len());
    for (i, qi) in q.iter().enumerate() {
        if qi.min_eigenvalue() <= 0.0 {
            return Err(Error::NotPositiveDefinite(i));
        }
        inverses.push(qi.inverse().ok_or(Error::NotPositiveDefinite(i))?);
    }
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let (a, b) = (q[i].matrix(), q[j].matrix());
            let scale = (a.amax() * b.amax()).max(1.0);
            if (a * b - b * a).amax() > COMMUTE_TOLERANCE * scale {
                return Err(Error::NotCommuting(i, j));
            }
        }
    }
    let total = q.iter().fold(DMatrix::zeros(d, d), |acc, m| acc + m.matrix());
    let mut m = Vec::with_capacity(q.len());
    let mut g = Vec::with_capacity(q.len());
    let mut mins = Vec::with_capacity(q.len());
    for (i, inv) in inverses.iter().enumerate() {
        let others = &total - q[i].matrix();
        let mi = product_symmetric(&others, inv.matrix())?;
        let gi = product_symmetric(&total, inv.matrix())?;
        let min = mi.min_eigenvalue();
        if min < -COMMUTE_TOLERANCE * mi.matrix().amax().max(1.0) {
            return Err(Error::InternalInconsistency(format!(
                "M_{} has eigenvalue {min:e} for commuting positive definite input",
                i + 1
            )));
        }
        m.push(mi);
        g.push(gi);
        mins.push(min);
    }
    Ok(QuadraticSplitting {
        m,
        g,
        m_min_eigenvalues: mins,
    })
}

/// `{(Q_1 v, ..., Q_N v) : v in vs}`.
pub fn commuting_spd_gamma(q: &[SymMatrix], vs: &[Vec<f64>]) -> Result<GammaSet> {
    quadratic_splitting(q)?;
    let points = vs
        .iter()
        .map(|v| {
            if v.len() != q[0].dim() {
                return Err(Error::DimensionMismatch {
                    expected: q[0].dim(),
                    found: v.len(),
                });
            }
            let v = DVector::from_column_slice(v);
            Ok(ProductPoint::new(
                q.iter()
                    .map(|m| MarginalPoint::new((m.matrix() * &v).iter().copied().collect()))
                    .collect(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    GammaSet::new(points)
}

/// `n` commuting positive definite `d x d` matrices `U diag(lambda_i) U^T`
/// sharing one random orthogonal `U`, with `lambda_i` uniform in `[0.5, 2]`.
pub fn random_commuting_spd<R: Rng>(n: usize, d: usize, rng: &mut R) -> Vec<SymMatrix> {
    let entry = Uniform::new_inclusive(-1.0f64, 1.0);
    let u = loop {
        let a = DMatrix::from_fn(d, d, |_, _| rng.sample(entry));
        if a.determinant().abs() > 1e-3 {
            break a.qr().q();
        }
    };
    let diag = Uniform::new_inclusive(0.5f64, 2.0);
    (0..n)
        .map(|_| {
            let l = DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| rng.sample(diag)));
            let m = &u * l * u.transpose();
            SymMatrix(((&m + m.transpose()) * 0.5).clone())
        })
        .collect()
}

fn flatten(p: &ProductPoint) -> DVector<f64> {
    DVector::from_iterator(
        p.dims().iter().sum(),
        p.parts().iter().flat_map(|x| x.coords().iter().copied()),
    )
}

fn unflatten(v: &DVector<f64>, d: usize) -> ProductPoint {
    ProductPoint::new(v.as_slice().chunks(d).map(|c| MarginalPoint::new(c.to_vec())).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticReport {
    pub n: usize,
    pub d: usize,
    pub m_min_eigenvalues: Vec<f64>,
    pub m_psd: bool,
    /// Largest `|q_{G_i}(x) - q(x) - q_{M_i}(x)|` over the samples.
    pub g_relation_error: f64,
    /// Certificate over `Gamma` samples, inequality tested at the
    /// perturbed points.
    pub certificate: SplittingCertificate,
    /// Smallest `sum_i q_{M_i}(x_i) - c1(x)` at the perturbed points.
    pub min_off_gamma_slack: f64,
    pub perturbation_norm: f64,
    pub pass: bool,
}

/// Splits `{(Q_1 v, ..., Q_N v)}` with `q_{M_i}` and certifies it on `samples`
/// random `v`, testing strict slack at `samples` points moved off `Gamma`
/// by `perturbation_norm` orthogonally to it.
pub fn quadratic_family_report(
    q: &[SymMatrix],
    samples: usize,
    perturbation_norm: f64,
    seed: u64,
) -> Result<QuadraticReport> {
    let split = quadratic_splitting(q)?;
    let (n, d) = (q.len(), q[0].dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Uniform::new_inclusive(-1.0, 1.0);
    let vs: Vec<Vec<f64>> = (0..samples).map(|_| (0..d).map(|_| rng.sample(unit)).collect()).collect();
    let g = commuting_spd_gamma(q, &vs)?;

    // Orthonormal basis of Gamma as a subspace of R^(N d).
    let basis = DMatrix::from_fn(n * d, d, |r, c| q[r / d].matrix()[(r % d, c)]);
    let onb = basis.qr().q();
    let mut off = Vec::with_capacity(samples);
    for p in g.points() {
        let w = loop {
            let w = DVector::from_fn(n * d, |_, _| rng.sample(unit));
            let w = &w - &onb * (onb.transpose() * &w);
            if w.norm() > 1e-3 {
                break w;
            }
        };
        let moved = flatten(p) + w.normalize() * perturbation_norm;
        off.push(unflatten(&moved, d));
    }

    let tuple = split.tuple()?;
    let c1 = classical_cost(Classical::C1, n, d)?;
    let certificate = certify_splitting_with(&tuple, &g, &c1, &TestPoints::Explicit(off), 1e-9)?;
    let min_off_gamma_slack = -certificate.max_inequality_violation.unwrap_or(f64::NEG_INFINITY);

    let mut g_relation_error: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..d).map(|_| rng.sample(unit)).collect();
        let q0 = 0.5 * x.iter().map(|v| v * v).sum::<f64>();
        for (mi, gi) in split.m.iter().zip(&split.g) {
            g_relation_error = g_relation_error.max((gi.q(&x)? - q0 - mi.q(&x)?).abs());
        }
    }
    let m_psd = split.m_min_eigenvalues.iter().all(|&e| e >= -1e-9);
    let pass = m_psd && certificate.pass && min_off_gamma_slack > 0.0 && g_relation_error <= 1e-12;
    Ok(QuadraticReport {
        n,
        d,
        m_min_eigenvalues: split.m_min_eigenvalues,
        m_psd,
        g_relation_error,
        certificate,
        min_off_gamma_slack,
        perturbation_norm,
        pass,
    })
}

/// The six-dimensional example: matrices, potentials and the two vectors
/// spanning its equality set.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub a1: SymMatrix,
    pub a2: SymMatrix,
    pub a3: SymMatrix,
    /// `iota_{R x {0}} + q_{A1}`, `iota_Delta + 2q`, `q_{A3}`.
    pub u: Vec<ClosedForm>,
    pub v1: ProductPoint,
    pub v2: ProductPoint,
    /// Upper triangular `M` with `sum u_i - c1 = <x, M x>` for
    /// `x = (a1, a2, a3, b3)` on the domain.
    pub m: Vec<Vec<f64>>,
}

impl Counterexample {
    pub fn tuple(&self) -> Result<SplittingTuple> {
        SplittingTuple::from_closed_forms(self.u.clone())
    }

    pub fn sym_m(&self) -> SymMatrix {
        let m = DMatrix::from_fn(4, 4, |i, j| self.m[i][j]);
        SymMatrix((&m + m.transpose()) * 0.5)
    }

    /// `lambda v1 + mu v2`.
    pub fn point(&self, lambda: f64, mu: f64) -> ProductPoint {
        unflatten(&(flatten(&self.v1) * lambda + flatten(&self.v2) * mu), 2)
    }
}

pub fn counterexample_construct() -> Counterexample {
    let a1 = SymMatrix::from_diagonal(&[2.0, 0.0]);
    let a2 = SymMatrix::scaled_identity(2, 2.0);
    let a3 = SymMatrix::from_rows(&[vec![8.0 / 7.0, 3.0 / 7.0], vec![3.0 / 7.0, 2.0 / 7.0]]).expect("symmetric");
    let u = vec![
        ClosedForm::indicator(Constraint::ZeroCoords { coords: vec![1] }, a1.to_closed_form()),
        ClosedForm::indicator(Constraint::Diagonal, ClosedForm::HalfSqNorm { scale: 2.0 }),
        a3.to_closed_form(),
    ];
    Counterexample {
        a1,
        a2,
        a3,
        u,
        v1: ProductPoint::from_coords(vec![vec![0.0, 0.0], vec![-1.0, -1.0], vec![1.0, -5.0]]),
        v2: ProductPoint::from_coords(vec![vec![1.0, 0.0], vec![2.0, 2.0], vec![0.0, 7.0]]),
        m: vec![
            vec![1.0, -1.0, -1.0, 0.0],
            vec![0.0, 2.0, -1.0, -1.0],
            vec![0.0, 0.0, 4.0 / 7.0, 3.0 / 7.0],
            vec![0.0, 0.0, 0.0, 1.0 / 7.0],
        ],
    }
}

/// Kernel basis of `sym(M)` stated for the example.
pub const COUNTEREXAMPLE_KERNEL: [[f64; 4]; 2] = [[0.0, -1.0, 1.0, -5.0], [1.0, 2.0, 0.0, 7.0]];

/// `(pair i, pair j, lambda, expected inner product)`, 0-based pairs:
/// `<x_i(lambda), x_j(lambda)>` at `lambda v1 + v2` against the origin.
pub const COUNTEREXAMPLE_WITNESSES: [(usize, usize, f64, f64); 3] =
    [(0, 1, 3.0, -1.0), (0, 2, -1.0, -1.0), (1, 2, 1.9, -0.06)];

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleConfig {
    pub equality_samples: usize,
    pub domain_samples: usize,
    pub seed: u64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            equality_samples: 200,
            domain_samples: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCheck {
    /// 1-based, e.g. `"1,2"`.
    pub pair: String,
    pub lambda: f64,
    pub value: f64,
    pub expected: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub sym_m: SymMatrix,
    pub eigenvalues: Vec<f64>,
    pub psd: bool,
    pub kernel_dimension: usize,
    /// Largest distance of a normalised stated kernel vector from the
    /// numerical kernel.
    pub kernel_mismatch: f64,
    /// Sum and product of the two positive eigenvalues.
    pub positive_sum: f64,
    pub positive_product: f64,
    pub equality: SplittingCertificate,
    /// Points of the form `lambda v1 + mu v2` on which equality was checked.
    pub equality_samples: usize,
    /// Smallest `sum u_i - c1` over the domain samples.
    pub min_domain_slack: f64,
    pub domain_samples: usize,
    pub witnesses: Vec<WitnessCheck>,
    /// Projection condition on the origin, `v1`, `v2` and the witness points.
    pub projections: ProjectionReport,
    /// Brute-force verdicts for `n = 2, 3` on the same points.
    pub brute_force: Vec<(usize, bool)>,
    pub seed: u64,
    pub pass: bool,
}

pub fn counterexample_verify(cfg: &CounterexampleConfig) -> Result<CounterexampleReport> {
    let ce = counterexample_construct();
    let sym_m = ce.sym_m();
    let (eigenvalues, vectors) = sym_m.eigen();
    let psd = eigenvalues[0] >= PSD_THRESHOLD;
    let kernel: Vec<usize> = (0..4).filter(|&k| eigenvalues[k].abs() < 1e-10).collect();
    let kb = DMatrix::from_fn(4, kernel.len(), |i, j| vectors[(i, kernel[j])]);
    let kernel_mismatch = COUNTEREXAMPLE_KERNEL
        .iter()
        .map(|k| {
            let v = DVector::from_column_slice(k).normalize();
            (&v - &kb * (kb.transpose() * &v)).norm()
        })
        .fold(0.0, f64::max);
    let positive: Vec<f64> = eigenvalues.iter().copied().filter(|e| *e >= 1e-10).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coef = Uniform::new_inclusive(-5.0, 5.0);
    let mut on_gamma = vec![ProductPoint::new(vec![MarginalPoint::zeros(2); 3])];
    while on_gamma.len() < cfg.equality_samples.max(1) {
        on_gamma.push(ce.point(rng.sample(coef), rng.sample(coef)));
    }
    let domain: Vec<ProductPoint> = (0..cfg.domain_samples)
        .map(|_| {
            let (a1, a2, a3, b3) = (rng.sample(coef), rng.sample(coef), rng.sample(coef), rng.sample(coef));
            ProductPoint::from_coords(vec![vec![a1, 0.0], vec![a2, a2], vec![a3, b3]])
        })
        .collect();
    let tuple = ce.tuple()?;
    let c1 = classical_cost(Classical::C1, 3, 2)?;
    let gamma = GammaSet::new(on_gamma)?;
    let equality_samples = gamma.len();
    let equality = certify_splitting_with(&tuple, &gamma, &c1, &TestPoints::Explicit(domain), 1e-9)?;
    let min_domain_slack = -equality.max_inequality_violation.unwrap_or(f64::NEG_INFINITY);

    let origin = ProductPoint::new(vec![MarginalPoint::zeros(2); 3]);
    let mut witnesses = Vec::new();
    let mut witness_points = vec![origin.clone(), ce.v1.clone(), ce.v2.clone()];
    for &(i, j, lambda, expected) in &COUNTEREXAMPLE_WITNESSES {
        let p = ce.point(lambda, 1.0);
        let pairs = vec![
            (origin.part(i).clone(), origin.part(j).clone()),
            (p.part(i).clone(), p.part(j).clone()),
        ];
        let verdict = is_pair_monotone_classical(&pairs)?;
        let value = verdict.pair_witness().map_or(p.part(i).dot(p.part(j)), |w| w.inner_product);
        witnesses.push(WitnessCheck {
            pair: format!("{},{}", i + 1, j + 1),
            lambda,
            value,
            expected,
            ok: !verdict.holds && (value - expected).abs() <= 1e-12,
        });
        witness_points.push(p);
    }
    let sample = GammaSet::new(witness_points)?;
    let projections = check_projection_condition(&sample, &c1)?;
    let brute_force = [2, 3]
        .iter()
        .map(|&n| Ok((n, is_n_c_monotone_bruteforce(&sample, &c1, n)?.holds)))
        .collect::<Result<Vec<_>>>()?;

    let pass = psd
        && kernel.len() == 2
        && kernel_mismatch <= 1e-9
        && equality.max_equality_residual_on_gamma <= 1e-9
        && min_domain_slack >= -1e-9
        && witnesses.iter().all(|w| w.ok)
        && projections.pairs.iter().all(|p| !p.verdict.holds)
        && brute_force.iter().all(|&(_, h)| h);
    Ok(CounterexampleReport {
        sym_m,
        kernel_dimension: kernel.len(),
        positive_sum: positive.iter().sum(),
        positive_product: positive.iter().product(),
        eigenvalues,
        psd,
        kernel_mismatch,
        equality,
        equality_samples,
        min_domain_slack,
        domain_samples: cfg.domain_samples,
        witnesses,
        projections,
        brute_force,
        seed: cfg.seed,
        pass,
    })
}

/// The c1 cost on `(R^2)^3` used by the example.
pub fn counterexample_cost() -> Result<CostSpec> {
    classical_cost(Classical::C1, 3, 2)
}

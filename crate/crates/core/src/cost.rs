//! Costs of the form `c(x_1, ..., x_N) = sum_{i<j} c_ij(x_i, x_j) + sum_i h_i(x_i)`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedForm;
use crate::error::{Error, Result};
use crate::point::{MarginalPoint, ProductPoint};

/// A cost tabulated on a finite grid. Lookups require exact grid membership.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TabulatedRaw", into = "TabulatedRaw")]
pub struct TabulatedCost {
    grid_i: Vec<MarginalPoint>,
    grid_j: Vec<MarginalPoint>,
    table: Vec<Vec<f64>>,
    index_i: HashMap<MarginalPoint, usize>,
    index_j: HashMap<MarginalPoint, usize>,
}

#[derive(Serialize, Deserialize)]
struct TabulatedRaw {
    grid_i: Vec<MarginalPoint>,
    grid_j: Vec<MarginalPoint>,
    table: Vec<Vec<f64>>,
}

impl TabulatedCost {
    pub fn new(
        grid_i: Vec<MarginalPoint>,
        grid_j: Vec<MarginalPoint>,
        table: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if table.len() != grid_i.len() {
            return Err(Error::DimensionMismatch {
                expected: grid_i.len(),
                found: table.len(),
            });
        }
        for row in &table {
            if row.len() != grid_j.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid_j.len(),
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invalid("tabulated cost must be finite".into()));
            }
        }
        let index_i = index_of(&grid_i)?;
        let index_j = index_of(&grid_j)?;
        Ok(Self {
            grid_i,
            grid_j,
            table,
            index_i,
            index_j,
        })
    }

    pub fn lookup(&self, x: &MarginalPoint, y: &MarginalPoint) -> Result<f64> {
        let a = self.index_i.get(x).ok_or(Error::OffGrid)?;
        let b = self.index_j.get(y).ok_or(Error::OffGrid)?;
        Ok(self.table[*a][*b])
    }

    pub fn grid_i(&self) -> &[MarginalPoint] {
        &self.grid_i
    }

    pub fn grid_j(&self) -> &[MarginalPoint] {
        &self.grid_j
    }
}

fn index_of(grid: &[MarginalPoint]) -> Result<HashMap<MarginalPoint, usize>> {
    let mut index = HashMap::with_capacity(grid.len());
    for (k, p) in grid.iter().enumerate() {
        if index.insert(p.clone(), k).is_some() {
            return Err(Error::Invalid(format!("duplicate grid point {p:?}")));
        }
    }
    Ok(index)
}

impl TryFrom<TabulatedRaw> for TabulatedCost {
    type Error = Error;
    fn try_from(raw: TabulatedRaw) -> Result<Self> {
        Self::new(raw.grid_i, raw.grid_j, raw.table)
    }
}

impl From<TabulatedCost> for TabulatedRaw {
    fn from(t: TabulatedCost) -> Self {
        Self {
            grid_i: t.grid_i,
            grid_j: t.grid_j,
            table: t.table,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostKind {
    /// `<x, y>`
    InnerProduct,
    /// `|x - y|^2 / 2`
    HalfSqDist,
    /// `<x, A y>` with `A` of shape `d_i x d_j`, row-major.
    Bilinear { matrix: Vec<Vec<f64>> },
    Tabulated(TabulatedCost),
}

fn plus_one() -> i8 {
    1
}

/// One coupling `c_ij`, optionally negated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairwiseCost {
    #[serde(flatten)]
    pub kind: CostKind,
    #[serde(default = "plus_one")]
    sign: i8,
}

impl PairwiseCost {
    pub fn new(kind: CostKind) -> Self {
        Self { kind, sign: 1 }
    }

    pub fn inner_product() -> Self {
        Self::new(CostKind::InnerProduct)
    }

    pub fn half_sq_dist() -> Self {
        Self::new(CostKind::HalfSqDist)
    }

    pub fn bilinear(matrix: Vec<Vec<f64>>) -> Self {
        Self::new(CostKind::Bilinear { matrix })
    }

    pub fn tabulated(t: TabulatedCost) -> Self {
        Self::new(CostKind::Tabulated(t))
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn negated(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    pub fn eval(&self, x: &MarginalPoint, y: &MarginalPoint) -> Result<f64> {
        let raw = match &self.kind {
            CostKind::InnerProduct => {
                same_dim(x, y)?;
                x.dot(y)
            }
            CostKind::HalfSqDist => {
                same_dim(x, y)?;
                0.5 * x
                    .coords()
                    .iter()
                    .zip(y.coords())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            }
            CostKind::Bilinear { matrix } => {
                if matrix.len() != x.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: matrix.len(),
                        found: x.dim(),
                    });
                }
                let mut acc = 0.0;
                for (row, xi) in matrix.iter().zip(x.coords()) {
                    if row.len() != y.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: row.len(),
                            found: y.dim(),
                        });
                    }
                    acc += xi * row.iter().zip(y.coords()).map(|(a, b)| a * b).sum::<f64>();
                }
                acc
            }
            CostKind::Tabulated(t) => t.lookup(x, y)?,
        };
        Ok(if self.sign < 0 { -raw } else { raw })
    }

    fn validate(&self, di: usize, dj: usize) -> Result<()> {
        if !(self.sign == 1 || self.sign == -1) {
            return Err(Error::Invalid(format!("cost sign must be +1 or -1, got {}", self.sign)));
        }
        match &self.kind {
            CostKind::InnerProduct | CostKind::HalfSqDist if di != dj => {
                Err(Error::DimensionMismatch {
                    expected: di,
                    found: dj,
                })
            }
            CostKind::Bilinear { matrix } => {
                if matrix.len() != di {
                    return Err(Error::DimensionMismatch {
                        expected: di,
                        found: matrix.len(),
                    });
                }
                match matrix.iter().find(|r| r.len() != dj) {
                    Some(r) => Err(Error::DimensionMismatch {
                        expected: dj,
                        found: r.len(),
                    }),
                    None => Ok(()),
                }
            }
            CostKind::Tabulated(t) => {
                let bad = t
                    .grid_i()
                    .iter()
                    .map(|p| (di, p.dim()))
                    .chain(t.grid_j().iter().map(|p| (dj, p.dim())))
                    .find(|(d, pd)| d != pd);
                match bad {
                    Some((expected, found)) => Err(Error::DimensionMismatch { expected, found }),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

fn same_dim(x: &MarginalPoint, y: &MarginalPoint) -> Result<()> {
    if x.dim() == y.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        })
    }
}

pub fn eval_pairwise(c: &PairwiseCost, x: &MarginalPoint, y: &MarginalPoint) -> Result<f64> {
    c.eval(x, y)
}

/// Full cost specification over `N` marginals with fixed dimensions.
///
/// Pair keys are 0-based `(i, j)` with `i < j`.
#[derive(Clone, Debug)]
pub struct CostSpec {
    dims: Vec<usize>,
    pairwise: BTreeMap<(usize, usize), PairwiseCost>,
    shift: Option<Vec<ClosedForm>>,
}

impl CostSpec {
    pub fn new(dims: Vec<usize>, pairwise: BTreeMap<(usize, usize), PairwiseCost>) -> Result<Self> {
        let n = dims.len();
        if n < 2 {
            return Err(Error::Invalid("at least two marginals are required".into()));
        }
        for (&(i, j), c) in &pairwise {
            if i >= j {
                return Err(Error::UnorderedPair(i, j));
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, len: n });
            }
            c.validate(dims[i], dims[j])?;
        }
        let expected = n * (n - 1) / 2;
        if pairwise.len() != expected {
            return Err(Error::Invalid(format!(
                "expected {expected} pairwise costs, found {}",
                pairwise.len()
            )));
        }
        Ok(Self {
            dims,
            pairwise,
            shift: None,
        })
    }

    /// Same pairwise cost for every pair.
    pub fn uniform(dims: Vec<usize>, c: PairwiseCost) -> Result<Self> {
        let n = dims.len();
        let pairwise = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|k| (k, c.clone()))
            .collect();
        Self::new(dims, pairwise)
    }

    pub fn n_marginals(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn pair(&self, i: usize, j: usize) -> Result<&PairwiseCost> {
        if i >= j {
            return Err(Error::UnorderedPair(i, j));
        }
        self.pairwise.get(&(i, j)).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.n_marginals(),
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &PairwiseCost)> {
        self.pairwise.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn shift(&self) -> Option<&[ClosedForm]> {
        self.shift.as_deref()
    }

    /// Separable part `h_i(x_i)`, zero when no shift is registered.
    pub fn shift_term(&self, i: usize, x: &MarginalPoint) -> Result<f64> {
        match &self.shift {
            Some(h) => h[i].eval(x),
            None => Ok(0.0),
        }
    }

    pub fn check_point(&self, p: &ProductPoint) -> Result<()> {
        if p.len() != self.n_marginals() {
            return Err(Error::DimensionMismatch {
                expected: self.n_marginals(),
                found: p.len(),
            });
        }
        for (part, &d) in p.parts().iter().zip(&self.dims) {
            if part.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: part.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, p: &ProductPoint) -> Result<f64> {
        self.check_point(p)?;
        let mut total = 0.0;
        for (&(i, j), c) in &self.pairwise {
            total += c.eval(p.part(i), p.part(j))?;
        }
        if let Some(h) = &self.shift {
            for (hi, x) in h.iter().zip(p.parts()) {
                total += hi.eval(x)?;
            }
        }
        Ok(total)
    }

    /// `-c`: every coupling and every shift term negated.
    pub fn negated(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            pairwise: self
                .pairwise
                .iter()
                .map(|(k, c)| (*k, c.clone().negated()))
                .collect(),
            shift: self.shift.as_ref().map(|h| {
                h.iter().map(|t| t.clone().scaled(-1.0)).collect()
            }),
        }
    }

    /// Spec with only the pairwise couplings (shift dropped).
    pub fn without_shift(&self) -> Self {
        Self {
            shift: None,
            ..self.clone()
        }
    }
}

impl ClosedForm {
    /// Multiplies every finite value by `s`. Indicators are kept as they are,
    /// so only nonnegative `s` preserves the extended-real meaning.
    pub fn scaled(self, s: f64) -> ClosedForm {
        match self {
            ClosedForm::Zero => ClosedForm::Zero,
            ClosedForm::Constant { value } => ClosedForm::Constant { value: s * value },
            ClosedForm::Linear { w } => ClosedForm::Linear {
                w: w.into_iter().map(|v| s * v).collect(),
            },
            ClosedForm::HalfSqNorm { scale } => ClosedForm::HalfSqNorm { scale: s * scale },
            ClosedForm::Quadratic { matrix } => ClosedForm::Quadratic {
                matrix: matrix
                    .into_iter()
                    .map(|r| r.into_iter().map(|v| s * v).collect())
                    .collect(),
            },
            ClosedForm::PowerSeries { terms } => ClosedForm::PowerSeries {
                terms: terms
                    .into_iter()
                    .map(|mut t| {
                        t.coef *= s;
                        t
                    })
                    .collect(),
            },
            ClosedForm::Indicator { constraint, inner } => ClosedForm::Indicator {
                constraint,
                inner: Box::new(inner.scaled(s)),
            },
            ClosedForm::Sum { terms } => ClosedForm::Sum {
                terms: terms.into_iter().map(|t| t.scaled(s)).collect(),
            },
        }
    }
}

pub fn eval_total_cost(spec: &CostSpec, p: &ProductPoint) -> Result<f64> {
    spec.eval(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classical {
    /// `sum_{i<j} <x_i, x_j>`
    C1,
    /// `sum_{i<j} |x_i - x_j|^2 / 2`
    C2,
    /// `|sum_i x_i|^2 / 2`, stored as `c1 + sum_i q(x_i)`.
    C3,
}

impl std::str::FromStr for Classical {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c1" => Ok(Classical::C1),
            "c2" => Ok(Classical::C2),
            "c3" => Ok(Classical::C3),
            other => Err(Error::Invalid(format!("unknown classical cost {other:?}"))),
        }
    }
}

pub fn classical_cost(which: Classical, n: usize, d: usize) -> Result<CostSpec> {
    if d == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    let dims = vec![d; n];
    match which {
        Classical::C1 => CostSpec::uniform(dims, PairwiseCost::inner_product()),
        Classical::C2 => CostSpec::uniform(dims, PairwiseCost::half_sq_dist()),
        Classical::C3 => {
            let c1 = CostSpec::uniform(dims, PairwiseCost::inner_product())?;
            add_separable_shift(&c1, vec![ClosedForm::q(); n])
        }
    }
}

/// Adds `sum_i h_i(x_i)` to the cost, on top of any existing shift.
pub fn add_separable_shift(spec: &CostSpec, h: Vec<ClosedForm>) -> Result<CostSpec> {
    if h.len() != spec.n_marginals() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_marginals(),
            found: h.len(),
        });
    }
    let shift = match &spec.shift {
        None => h,
        Some(old) => old.iter().cloned().zip(h).map(|(a, b)| a.plus(b)).collect(),
    };
    Ok(CostSpec {
        shift: Some(shift),
        ..spec.clone()
    })
}

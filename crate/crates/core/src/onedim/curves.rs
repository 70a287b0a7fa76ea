use rayon::prelude::*;
use serde::Serialize;

use super::bijection::MonotoneBijection;
use super::quadrature::{integrate, Quadrature, QUAD_EPS};
use crate::antiderivative::Potential;
use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::io::to_csv;
use crate::point::{MarginalPoint, ProductPoint};
use crate::splitting::SplittingTuple;

/// Equality tolerance of [`young_check`].
pub const YOUNG_EQUALITY_TOLERANCE: f64 = 1e-9;

/// `{(alpha_1(t), ..., alpha_N(t)) : t in ts}`.
pub fn curve_gamma(alphas: &[MonotoneBijection], ts: &[f64]) -> Result<GammaSet> {
    let rows = ts
        .iter()
        .map(|&t| alphas.iter().map(|a| a.eval(t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    GammaSet::from_scalar_rows(&rows)
}

/// `F(x) = int_0^x f`, tabulated on `xs` by integrating between consecutive
/// sorted points outward from 0. The returned error estimate for each point
/// accumulates the estimates of every segment between it and 0.
pub fn cumulative_integral<F>(f: F, xs: &[f64]) -> Result<Vec<Quadrature>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("grid point {x} is not finite")));
    }
    let mut pos: Vec<f64> = xs.iter().copied().filter(|&x| x > 0.0).collect();
    let mut neg: Vec<f64> = xs.iter().copied().filter(|&x| x < 0.0).collect();
    pos.sort_by(f64::total_cmp);
    pos.dedup();
    neg.sort_by(|a, b| b.total_cmp(a));
    neg.dedup();

    let run = |side: &[f64]| -> Result<Vec<(f64, Quadrature)>> {
        let mut knots = vec![0.0];
        knots.extend_from_slice(side);
        let pieces = knots
            .par_windows(2)
            .map(|w| integrate(&f, w[0], w[1], QUAD_EPS))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = Quadrature::default();
        Ok(side
            .iter()
            .zip(pieces)
            .map(|(&x, q)| {
                acc = acc + q;
                (x, acc)
            })
            .collect())
    };
    let mut table = run(&pos)?;
    table.extend(run(&neg)?);
    Ok(xs
        .iter()
        .map(|&x| {
            if x == 0.0 {
                Quadrature::default()
            } else {
                table
                    .iter()
                    .find(|(y, _)| *y == x)
                    .map(|(_, q)| *q)
                    .expect("every nonzero grid point was integrated")
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvePotentials {
    pub tuple: SplittingTuple,
    /// Largest accumulated quadrature error estimate, per marginal.
    pub error_estimates: Vec<f64>,
}

/// `u_i(x) = int_0^x sum_{k != i} alpha_k(alpha_i^{-1}(t)) dt` on `grid`
/// (duplicates dropped), one potential per curve coordinate.
pub fn curve_potentials(alphas: &[MonotoneBijection], grid: &[f64]) -> Result<CurvePotentials> {
    if alphas.len() < 2 {
        return Err(Error::Invalid("a curve needs at least two coordinates".into()));
    }
    let mut xs: Vec<f64> = Vec::with_capacity(grid.len());
    for &x in grid {
        let x = if x == 0.0 { 0.0 } else { x };
        if !xs.iter().any(|y| y.to_bits() == x.to_bits()) {
            xs.push(x);
        }
    }
    let mut potentials = Vec::with_capacity(alphas.len());
    let mut error_estimates = Vec::with_capacity(alphas.len());
    for (i, ai) in alphas.iter().enumerate() {
        let integrand = |t: f64| -> Result<f64> {
            let s = ai.inverse(t)?;
            let mut v = 0.0;
            for (k, ak) in alphas.iter().enumerate() {
                if k != i {
                    v += ak.eval(s)?;
                }
            }
            Ok(v)
        };
        let qs = cumulative_integral(integrand, &xs)?;
        error_estimates.push(qs.iter().map(|q| q.error_estimate).fold(0.0, f64::max));
        potentials.push(Potential::new(
            xs.iter().map(|&x| MarginalPoint::scalar(x)).collect(),
            qs.iter().map(|q| q.value).collect(),
        )?);
    }
    Ok(CurvePotentials {
        tuple: SplittingTuple::new(potentials),
        error_estimates,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct YoungReport {
    pub a: f64,
    pub b: f64,
    /// `a * b`
    pub lhs: f64,
    /// `int_0^a g + int_0^b g^{-1}`
    pub rhs: f64,
    pub integral_g: Quadrature,
    pub integral_inverse: Quadrature,
    /// `|b - g(a)| <= 1e-9`
    pub equality: bool,
    pub g_of_a: f64,
}

impl YoungReport {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Young's inequality `ab <= int_0^a g + int_0^b g^{-1}` by quadrature.
pub fn young_check(g: &MonotoneBijection, a: f64, b: f64) -> Result<YoungReport> {
    let integral_g = integrate(|t| g.eval(t), 0.0, a, QUAD_EPS)?;
    let integral_inverse = integrate(|t| g.inverse(t), 0.0, b, QUAD_EPS)?;
    let g_of_a = g.eval(a)?;
    Ok(YoungReport {
        a,
        b,
        lhs: a * b,
        rhs: integral_g.value + integral_inverse.value,
        integral_g,
        integral_inverse,
        equality: (b - g_of_a).abs() <= YOUNG_EQUALITY_TOLERANCE,
        g_of_a,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FigureData {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureData {
    pub fn to_csv(&self) -> String {
        to_csv(&self.header, &self.rows)
    }
}

/// Samples the curve at `samples` equally spaced `t` in `t_range`. Columns
/// are `t, x1..xN`, then `pair_i_j_x, pair_i_j_y` for each `i < j`
/// (1-based), the planar projections.
pub fn emit_curve_figure_data(
    alphas: &[MonotoneBijection],
    t_range: (f64, f64),
    samples: usize,
) -> Result<FigureData> {
    if samples < 2 {
        return Err(Error::Invalid(format!("need at least 2 samples, got {samples}")));
    }
    let (lo, hi) = t_range;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Invalid("t range must be finite".into()));
    }
    let n = alphas.len();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    for i in 1..=n {
        for j in i + 1..=n {
            header.push(format!("pair_{i}_{j}_x"));
            header.push(format!("pair_{i}_{j}_y"));
        }
    }
    let mut rows = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = if k + 1 == samples {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (samples - 1) as f64
        };
        let xs = alphas.iter().map(|a| a.eval(t)).collect::<Result<Vec<_>>>()?;
        let mut row = vec![t];
        row.extend(&xs);
        for i in 0..n {
            for j in i + 1..n {
                row.push(xs[i]);
                row.push(xs[j]);
            }
        }
        rows.push(row);
    }
    Ok(FigureData { header, rows })
}

/// Off-curve test point: keeps `alpha_i(t)` for `i != k` and moves
/// coordinate `k` by `delta`.
pub fn perturb_curve_point(alphas: &[MonotoneBijection], t: f64, k: usize, delta: f64) -> Result<ProductPoint> {
    let mut xs = alphas.iter().map(|a| a.eval(t)).collect::<Result<Vec<_>>>()?;
    xs[k] += delta;
    Ok(ProductPoint::from_scalars(&xs))
}

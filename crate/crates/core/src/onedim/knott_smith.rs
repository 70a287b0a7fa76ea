//! The curve `{(t, t^3, t^5)}` and its closed-form splitting potentials.

use serde::Serialize;

use super::bijection::MonotoneBijection;
use super::curves::{curve_gamma, curve_potentials};
use super::quadrature::{integrate, QUAD_EPS};
use crate::closed_form::{odd_root, ClosedForm, PowerTerm};
use crate::cost::{classical_cost, Classical};
use crate::error::{Error, Result};
use crate::point::{MarginalPoint, ProductPoint};
use crate::splitting::{certify_splitting_with, SplittingCertificate, SplittingTuple, TestPoints};

pub fn knott_smith_alphas() -> Vec<MonotoneBijection> {
    vec![
        MonotoneBijection::identity(),
        MonotoneBijection::power(3, 1).expect("odd power"),
        MonotoneBijection::power(5, 1).expect("odd power"),
    ]
}

/// `u1 = x^4/4 + x^6/6`, `u2 = 3/4 x^(4/3) + 3/8 x^(8/3)`,
/// `u3 = 5/6 x^(6/5) + 5/8 x^(8/5)`.
pub fn knott_smith_closed_forms() -> Vec<ClosedForm> {
    let series = |terms: [(f64, i32, u32); 2]| ClosedForm::PowerSeries {
        terms: terms.iter().map(|&(c, n, d)| PowerTerm::new(c, n, d)).collect(),
    };
    vec![
        series([(0.25, 4, 1), (1.0 / 6.0, 6, 1)]),
        series([(0.75, 4, 3), (0.375, 8, 3)]),
        series([(5.0 / 6.0, 6, 5), (0.625, 8, 5)]),
    ]
}

/// `u_i + q`, the splitting tuple for `c3(x) = |x1 + x2 + x3|^2 / 2`.
pub fn knott_smith_shifted_forms() -> Vec<ClosedForm> {
    knott_smith_closed_forms()
        .into_iter()
        .map(|u| u.plus(ClosedForm::q()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct KnottSmithValues {
    pub x: [f64; 3],
    pub u: [f64; 3],
    /// `u_i(x_i) + x_i^2 / 2`
    pub shifted: [f64; 3],
    pub c1: f64,
    pub c3: f64,
    /// `sum u_i - c1`, zero exactly on the curve.
    pub c1_slack: f64,
    /// `sum (u_i + q) - c3`
    pub c3_slack: f64,
}

pub fn knott_smith_potentials(x1: f64, x2: f64, x3: f64) -> KnottSmithValues {
    let x = [x1, x2, x3];
    let forms = knott_smith_closed_forms();
    let mut u = [0.0; 3];
    for (k, form) in forms.iter().enumerate() {
        let ClosedForm::PowerSeries { terms } = form else {
            unreachable!("power series by construction")
        };
        u[k] = terms.iter().map(|t| t.eval(x[k])).sum();
    }
    let shifted = [0, 1, 2].map(|k| u[k] + 0.5 * x[k] * x[k]);
    let c1 = x1 * x2 + x1 * x3 + x2 * x3;
    let s = x1 + x2 + x3;
    let c3 = 0.5 * s * s;
    KnottSmithValues {
        x,
        u,
        shifted,
        c1,
        c3,
        c1_slack: u.iter().sum::<f64>() - c1,
        c3_slack: shifted.iter().sum::<f64>() - c3,
    }
}

/// One row of [`knott_smith_conjugate_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ConjugateRow {
    /// 1 for `alpha`, 3 for `beta`, 5 for `gamma`.
    pub power: u32,
    pub max_deviation: f64,
    pub worst_x: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugateCheck {
    pub rows: Vec<ConjugateRow>,
    pub step: f64,
    pub v_max: f64,
    /// `h^2 / 8` (the integrands have second derivative at most 1) plus
    /// quadrature slack.
    pub bound: f64,
    pub holds: bool,
}

/// Numerical check that `u_k + q` is the convex conjugate of
/// `v -> int_0^v phi^p` (`p = 1, 3, 5`), where `phi` inverts
/// `t + t^3 + t^5`.
///
/// The integrals are tabulated on the grid `{-v_max, ..., v_max}` of step
/// `h` by Simpson's rule on each cell, and the conjugate is the discrete
/// sup over that grid. `xs` must be small enough that the maximiser lies
/// inside the grid.
pub fn knott_smith_conjugate_check(xs: &[f64], h: f64, v_max: f64) -> Result<ConjugateCheck> {
    if !(h > 0.0) || !(v_max > h) {
        return Err(Error::Invalid(format!("bad grid: step {h}, half-width {v_max}")));
    }
    let psi = MonotoneBijection::odd_polynomial(&[(1.0, 1), (1.0, 3), (1.0, 5)])?;
    let phi = psi.inverted();
    let powers = [1u32, 3, 5];
    for &x in xs {
        for &p in &powers {
            let v_star = psi.eval(odd_root(x, p))?;
            if v_star.abs() > v_max - h {
                return Err(Error::Invalid(format!(
                    "maximiser {v_star} for x = {x}, power {p} lies outside the grid"
                )));
            }
        }
    }

    let cells = (v_max / h).ceil() as i64;
    let nodes: Vec<f64> = (-cells..=cells).map(|k| k as f64 * h).collect();
    // Cumulative integrals from 0 outward, one table per power.
    let zero = cells as usize;
    let mut tables = vec![vec![0.0; nodes.len()]; powers.len()];
    let mut quad_err: f64 = 0.0;
    for dir in [1i64, -1] {
        let mut acc = [0.0; 3];
        for step in 0..cells {
            let a = (step * dir) as f64 * h;
            let b = ((step + 1) * dir) as f64 * h;
            for (k, &p) in powers.iter().enumerate() {
                let q = integrate(|v| Ok(phi.eval(v)?.powi(p as i32)), a, b, QUAD_EPS)?;
                acc[k] += q.value;
                quad_err += q.error_estimate;
                let idx = (zero as i64 + (step + 1) * dir) as usize;
                tables[k][idx] = acc[k];
            }
        }
    }

    let closed = knott_smith_shifted_forms();
    let bound = h * h / 8.0 + quad_err + 1e-10;
    let mut rows = Vec::with_capacity(3);
    for (k, &p) in powers.iter().enumerate() {
        let mut row = ConjugateRow {
            power: p,
            max_deviation: 0.0,
            worst_x: f64::NAN,
        };
        for &x in xs {
            let sup = nodes
                .iter()
                .zip(&tables[k])
                .map(|(v, a)| x * v - a)
                .fold(f64::NEG_INFINITY, f64::max);
            let exact = closed[k].eval(&MarginalPoint::scalar(x))?;
            let dev = (sup - exact).abs();
            if !(dev <= row.max_deviation) {
                row.max_deviation = dev;
                row.worst_x = x;
            }
        }
        rows.push(row);
    }
    let holds = rows.iter().all(|r| r.max_deviation <= bound);
    Ok(ConjugateCheck {
        rows,
        step: h,
        v_max,
        bound,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KnottSmithConfig {
    /// Curve parameter range `[-t_max, t_max]`; also the half-width of the
    /// test lattice and of the quadrature grid.
    pub t_max: f64,
    pub curve_samples: usize,
    pub lattice_per_axis: usize,
    pub quadrature_step: f64,
    pub tolerance: f64,
}

impl Default for KnottSmithConfig {
    fn default() -> Self {
        Self {
            t_max: 1.5,
            curve_samples: 61,
            lattice_per_axis: 31,
            quadrature_step: 0.1,
            tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KnottSmithReport {
    pub config: KnottSmithConfig,
    /// Largest `|quadrature - closed form|` over the grid, per potential.
    pub quadrature_deviation: [f64; 3],
    pub quadrature_error_estimates: Vec<f64>,
    /// `u1(1) + u2(1) + u3(1) - 3`
    pub spot_identity_error: f64,
    pub c1_certificate: SplittingCertificate,
    pub c3_certificate: SplittingCertificate,
    pub pass: bool,
}

fn symmetric_grid(half_width: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| {
            if k + 1 == count {
                half_width
            } else {
                -half_width + 2.0 * half_width * k as f64 / (count - 1) as f64
            }
        })
        .collect()
}

/// End-to-end check of the curve `(t, t^3, t^5)`: quadrature potentials
/// against the closed forms, certification of the closed-form tuple for
/// c1 and of the shifted tuple for c3 on a cubic lattice, equality on curve
/// samples, and the spot identity at `t = 1`.
pub fn knott_smith_verify(cfg: &KnottSmithConfig) -> Result<KnottSmithReport> {
    if cfg.curve_samples < 2 || cfg.lattice_per_axis < 2 || !(cfg.quadrature_step > 0.0) || !(cfg.t_max > 0.0) {
        return Err(Error::Invalid("knott-smith configuration out of range".into()));
    }
    let steps = (cfg.t_max / cfg.quadrature_step).round() as i64;
    let grid: Vec<f64> = (-steps..=steps).map(|k| k as f64 * cfg.quadrature_step).collect();
    let cp = curve_potentials(&knott_smith_alphas(), &grid)?;
    let forms = knott_smith_closed_forms();
    let mut quadrature_deviation = [0.0f64; 3];
    for (k, u) in cp.tuple.potentials.iter().enumerate() {
        for (x, v) in u.points().iter().zip(u.values()) {
            quadrature_deviation[k] = quadrature_deviation[k].max((v - forms[k].eval(x)?).abs());
        }
    }

    let ts = symmetric_grid(cfg.t_max, cfg.curve_samples);
    let g = curve_gamma(&knott_smith_alphas(), &ts)?;
    let axis = symmetric_grid(cfg.t_max, cfg.lattice_per_axis);
    let mut lattice = Vec::with_capacity(axis.len().pow(3));
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                lattice.push(ProductPoint::from_scalars(&[a, b, c]));
            }
        }
    }
    let points = TestPoints::Explicit(lattice);
    let c1 = classical_cost(Classical::C1, 3, 1)?;
    let c3 = classical_cost(Classical::C3, 3, 1)?;
    let u = SplittingTuple::from_closed_forms(forms)?;
    let shifted = SplittingTuple::from_closed_forms(knott_smith_shifted_forms())?;
    let c1_certificate = certify_splitting_with(&u, &g, &c1, &points, cfg.tolerance)?;
    let c3_certificate = certify_splitting_with(&shifted, &g, &c3, &points, cfg.tolerance)?;
    let spot = knott_smith_potentials(1.0, 1.0, 1.0);
    let spot_identity_error = spot.u.iter().sum::<f64>() - 3.0;
    let pass = quadrature_deviation.iter().all(|&d| d <= 1e-6)
        && spot_identity_error.abs() <= 1e-12
        && c1_certificate.pass
        && c3_certificate.pass;
    Ok(KnottSmithReport {
        config: cfg.clone(),
        quadrature_deviation,
        quadrature_error_estimates: cp.error_estimates,
        spot_identity_error,
        c1_certificate,
        c3_certificate,
        pass,
    })
}

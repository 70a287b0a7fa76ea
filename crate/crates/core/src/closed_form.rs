//! Registered closed-form functions on a single marginal.
//!
//! These back separable cost shifts `h_i` and the explicit potentials of the
//! worked examples. Values live in `(-inf, +inf]`; only indicator terms
//! produce `+inf`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::MarginalPoint;

/// Constraint sets used by indicator functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum Constraint {
    /// The listed (0-based) coordinates vanish, e.g. `R x {0}` is `[1]`.
    ZeroCoords { coords: Vec<usize> },
    /// All coordinates are equal (the diagonal line).
    Diagonal,
}

impl Constraint {
    pub fn contains(&self, x: &MarginalPoint) -> bool {
        match self {
            Constraint::ZeroCoords { coords } => {
                coords.iter().all(|&k| x.coords().get(k).is_some_and(|v| *v == 0.0))
            }
            Constraint::Diagonal => x.coords().windows(2).all(|w| w[0] == w[1]),
        }
    }
}

/// `coef * x^(num/den)` on the real line, with `den` odd and the real odd
/// root taken for negative `x`, i.e. `(x^(1/den))^num`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coef: f64,
    pub num: i32,
    pub den: u32,
}

impl PowerTerm {
    pub fn new(coef: f64, num: i32, den: u32) -> Self {
        Self { coef, num, den }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coef * odd_root(x, self.den).powi(self.num)
    }
}

/// Real `den`-th root with the sign of `x` (odd `den`).
pub fn odd_root(x: f64, den: u32) -> f64 {
    match den {
        1 => x,
        3 => x.cbrt(),
        _ => x.signum() * x.abs().powf(1.0 / den as f64),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ClosedForm {
    Zero,
    Constant { value: f64 },
    /// `<w, x>`
    Linear { w: Vec<f64> },
    /// `scale * q(x) = scale * |x|^2 / 2`, any dimension.
    HalfSqNorm { scale: f64 },
    /// `q_A(x) = <x, A x> / 2` with `A` row-major.
    Quadratic { matrix: Vec<Vec<f64>> },
    /// Sum of odd-root power terms, one-dimensional only.
    PowerSeries { terms: Vec<PowerTerm> },
    /// `iota_S + inner`.
    Indicator {
        constraint: Constraint,
        inner: Box<ClosedForm>,
    },
    Sum { terms: Vec<ClosedForm> },
}

impl ClosedForm {
    /// `q = |.|^2 / 2`.
    pub fn q() -> Self {
        ClosedForm::HalfSqNorm { scale: 1.0 }
    }

    pub fn quadratic(matrix: Vec<Vec<f64>>) -> Self {
        ClosedForm::Quadratic { matrix }
    }

    pub fn indicator(constraint: Constraint, inner: ClosedForm) -> Self {
        ClosedForm::Indicator {
            constraint,
            inner: Box::new(inner),
        }
    }

    pub fn plus(self, other: ClosedForm) -> Self {
        match (self, other) {
            (ClosedForm::Zero, o) | (o, ClosedForm::Zero) => o,
            (ClosedForm::Sum { mut terms }, o) => {
                terms.push(o);
                ClosedForm::Sum { terms }
            }
            (s, o) => ClosedForm::Sum { terms: vec![s, o] },
        }
    }

    pub fn eval(&self, x: &MarginalPoint) -> Result<f64> {
        let c = x.coords();
        Ok(match self {
            ClosedForm::Zero => 0.0,
            ClosedForm::Constant { value } => *value,
            ClosedForm::Linear { w } => {
                check_dim(w.len(), c.len())?;
                w.iter().zip(c).map(|(a, b)| a * b).sum()
            }
            ClosedForm::HalfSqNorm { scale } => 0.5 * scale * x.norm_sq(),
            ClosedForm::Quadratic { matrix } => {
                check_dim(matrix.len(), c.len())?;
                let mut acc = 0.0;
                for (row, xi) in matrix.iter().zip(c) {
                    check_dim(row.len(), c.len())?;
                    acc += xi * row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
                }
                0.5 * acc
            }
            ClosedForm::PowerSeries { terms } => {
                check_dim(1, c.len())?;
                terms.iter().map(|t| t.eval(c[0])).sum()
            }
            ClosedForm::Indicator { constraint, inner } => {
                if constraint.contains(x) {
                    inner.eval(x)?
                } else {
                    f64::INFINITY
                }
            }
            ClosedForm::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval(x)?;
                }
                acc
            }
        })
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_form_is_half_inner_product() {
        let a3 = vec![vec![8.0 / 7.0, 3.0 / 7.0], vec![3.0 / 7.0, 2.0 / 7.0]];
        let v = ClosedForm::quadratic(a3).eval(&MarginalPoint::new(vec![0.0, 7.0])).unwrap();
        assert!((v - 7.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_is_infinite_off_the_set() {
        let f = ClosedForm::indicator(
            Constraint::ZeroCoords { coords: vec![1] },
            ClosedForm::quadratic(vec![vec![2.0, 0.0], vec![0.0, 0.0]]),
        );
        assert_eq!(f.eval(&MarginalPoint::new(vec![1.0, 1.0])).unwrap(), f64::INFINITY);
        assert_eq!(f.eval(&MarginalPoint::new(vec![1.0, 0.0])).unwrap(), 1.0);
        let diag = ClosedForm::indicator(Constraint::Diagonal, ClosedForm::Zero);
        assert_eq!(diag.eval(&MarginalPoint::new(vec![2.0, 2.0])).unwrap(), 0.0);
        assert!(diag.eval(&MarginalPoint::new(vec![2.0, 2.5])).unwrap().is_infinite());
    }

    #[test]
    fn odd_root_powers_are_even_for_even_numerators() {
        let t = PowerTerm::new(0.75, 4, 3);
        assert!((t.eval(-8.0) - t.eval(8.0)).abs() < 1e-12);
        assert!((t.eval(8.0) - 12.0).abs() < 1e-12);
        let t5 = PowerTerm::new(1.0, 6, 5);
        assert!((t5.eval(-32.0) - 64.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_checks() {
        let f = ClosedForm::Linear { w: vec![1.0, 2.0] };
        assert!(matches!(
            f.eval(&MarginalPoint::scalar(1.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_shape() {
        let f = ClosedForm::q().plus(ClosedForm::Constant { value: 1.0 });
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"form":"sum","terms":[{"form":"half_sq_norm","scale":1.0},{"form":"constant","value":1.0}]}"#
        );
    }
}

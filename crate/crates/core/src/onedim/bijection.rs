use std::fmt;
use std::sync::Arc;

use crate::closed_form::odd_root;
use crate::error::{Error, Result};

const ZERO_TOLERANCE: f64 = 1e-12;
/// Doublings of the bracket before inversion gives up (`2^64 ~ 1.8e19`).
const MAX_BRACKET_DOUBLINGS: u32 = 64;
const MAX_BISECTIONS: u32 = 2_000;

type Forward = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Map {
    Func(Forward),
    Inverse(Box<MonotoneBijection>),
}

/// Continuous, strictly increasing map of the real line onto itself with
/// `alpha(0) = 0`. Only the forward map needs to be supplied; the inverse
/// is found by bisection.
#[derive(Clone)]
pub struct MonotoneBijection {
    name: String,
    map: Map,
}

impl fmt::Debug for MonotoneBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("MonotoneBijection").field(&self.name).finish()
    }
}

fn probe_grid() -> Vec<f64> {
    let mut xs: Vec<f64> = (-80..=80).map(|k| k as f64 / 20.0).collect();
    for k in -20..=20 {
        let v = 2f64.powi(k);
        xs.push(v);
        xs.push(-v);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

impl MonotoneBijection {
    /// Wraps `f` after checking `f(0) = 0` and strict increase on a probe
    /// grid. Being onto is taken on trust; inversion reports a failure if a
    /// bracket cannot be found.
    pub fn new<F>(name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let b = Self {
            name: name.into(),
            map: Map::Func(Arc::new(f)),
        };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        let z = self.eval(0.0)?;
        if z.is_nan() || z.abs() > ZERO_TOLERANCE {
            return Err(Error::Invalid(format!("{}: value at 0 is {z}, expected 0", self.name)));
        }
        let mut prev: Option<(f64, f64)> = None;
        for x in probe_grid() {
            let y = self.eval(x)?;
            if y.is_nan() {
                return Err(Error::Invalid(format!("{}: NaN at {x}", self.name)));
            }
            if let Some((px, py)) = prev {
                if y <= py {
                    return Err(Error::Invalid(format!(
                        "{}: not strictly increasing between {px} and {x}",
                        self.name
                    )));
                }
            }
            prev = Some((x, y));
        }
        Ok(())
    }

    pub fn identity() -> Self {
        Self::power(1, 1).expect("identity is valid")
    }

    /// `t^(num/den)` with the real odd root for negative `t`; both exponents
    /// must be odd and positive.
    pub fn power(num: u32, den: u32) -> Result<Self> {
        if num % 2 == 0 || den % 2 == 0 {
            return Err(Error::Invalid(format!("power {num}/{den} needs odd numerator and denominator")));
        }
        let name = if den == 1 {
            format!("t^{num}")
        } else {
            format!("t^({num}/{den})")
        };
        let n = num as i32;
        Self::new(name, move |t| odd_root(t, den).powi(n))
    }

    /// `sum_k coef_k t^(p_k)` with positive coefficients and odd positive
    /// integer powers.
    pub fn odd_polynomial(terms: &[(f64, u32)]) -> Result<Self> {
        if terms.is_empty() || terms.iter().any(|&(c, p)| !(c > 0.0) || p % 2 == 0) {
            return Err(Error::Invalid("odd polynomial needs positive coefficients and odd powers".into()));
        }
        let name = terms
            .iter()
            .map(|(c, p)| format!("{c}*t^{p}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let terms = terms.to_vec();
        Self::new(name, move |t| terms.iter().map(|&(c, p)| c * t.powi(p as i32)).sum())
    }

    /// The inverse map, evaluated by bisection on `self`.
    pub fn inverted(&self) -> Self {
        match &self.map {
            Map::Inverse(inner) => (**inner).clone(),
            Map::Func(_) => Self {
                name: format!("inverse of {}", self.name),
                map: Map::Inverse(Box::new(self.clone())),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match &self.map {
            Map::Func(f) => Ok(f(x)),
            Map::Inverse(inner) => inner.inverse(x),
        }
    }

    /// Solves `alpha(x) = w` by growing a bracket geometrically from
    /// `[0, 1]` (or `[-1, 0]`) and bisecting until the midpoint coincides
    /// with an endpoint, i.e. to full double precision.
    pub fn inverse(&self, w: f64) -> Result<f64> {
        if let Map::Inverse(inner) = &self.map {
            return inner.eval(w);
        }
        if !w.is_finite() {
            return Err(Error::InversionFailure(format!("{}: target {w} is not finite", self.name)));
        }
        if w == 0.0 {
            return Ok(0.0);
        }
        let up = w > 0.0;
        let sign = if up { 1.0 } else { -1.0 };
        let (mut lo, mut hi) = if up { (0.0, 1.0) } else { (-1.0, 0.0) };
        let mut found = false;
        for _ in 0..=MAX_BRACKET_DOUBLINGS {
            let edge = if up { hi } else { lo };
            let v = self.eval(edge)?;
            if v.is_nan() {
                break;
            }
            if (up && v >= w) || (!up && v <= w) {
                found = true;
                break;
            }
            if up {
                lo = hi;
                hi *= 2.0;
            } else {
                hi = lo;
                lo *= 2.0;
            }
        }
        if !found {
            return Err(Error::InversionFailure(format!(
                "{}: no bracket for {w} within |x| <= {:e}",
                self.name,
                sign * if up { hi } else { lo }
            )));
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid)? < w {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (flo, fhi) = (self.eval(lo)?, self.eval(hi)?);
        Ok(if (w - flo).abs() <= (fhi - w).abs() { lo } else { hi })
    }
}

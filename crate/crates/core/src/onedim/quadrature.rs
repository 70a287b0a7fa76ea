use serde::Serialize;

use crate::error::{Error, Result};

/// Panels narrower than this fraction of the interval get the floor
/// tolerance instead of their proportional share, so endpoint singularities
/// such as `t^(1/3)` at 0 terminate at a bounded depth.
const SHARE_FLOOR: f64 = 1.0 / 1_048_576.0;
const MAX_DEPTH: u32 = 60;

/// Default absolute accuracy target for [`integrate`], scaled by
/// `max(1, |integral|)`.
pub const QUAD_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel Richardson error estimates.
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl std::ops::Add for Quadrature {
    type Output = Quadrature;
    fn add(self, o: Quadrature) -> Quadrature {
        Quadrature {
            value: self.value + o.value,
            error_estimate: self.error_estimate + o.error_estimate,
            evaluations: self.evaluations + o.evaluations,
        }
    }
}

struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` (either orientation).
///
/// A panel of width `h` is accepted when `|S2 - S1| / 15` is at most
/// `eps * max(1, |S|) * max(h / (b - a), 2^-20)`, and the Richardson value
/// `S2 + (S2 - S1) / 15` is used. Non-finite integrand values are errors.
pub fn integrate<F>(mut f: F, a: f64, b: f64, eps: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Invalid(format!("integration bounds [{a}, {b}] are not finite")));
    }
    if a == b {
        return Ok(Quadrature::default());
    }
    if b < a {
        let q = integrate(f, b, a, eps)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Invalid(format!("integrand is {y} at {x}")))
        }
    };
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (eval(a)?, eval(m)?, eval(b)?);
    let whole = simpson(a, b, fa, fm, fb);
    let scale = eps * whole.abs().max(1.0);
    let width = b - a;

    let mut out = Quadrature {
        evaluations: 3,
        ..Quadrature::default()
    };
    // Explicit stack, left panel on top, so panels are summed left to right.
    let mut stack = vec![(
        Panel {
            a,
            m,
            b,
            fa,
            fm,
            fb,
            whole,
        },
        0u32,
    )];
    while let Some((p, depth)) = stack.pop() {
        let lm = 0.5 * (p.a + p.m);
        let rm = 0.5 * (p.m + p.b);
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        out.evaluations += 2;
        let left = simpson(p.a, p.m, p.fa, flm, p.fm);
        let right = simpson(p.m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        let share = ((p.b - p.a) / width).max(SHARE_FLOOR);
        let narrow = lm <= p.a || p.m <= lm || rm <= p.m || p.b <= rm;
        if delta.abs() <= 15.0 * scale * share || depth >= MAX_DEPTH || narrow {
            out.value += left + right + delta / 15.0;
            out.error_estimate += delta.abs() / 15.0;
        } else {
            stack.push((
                Panel {
                    a: p.m,
                    m: rm,
                    b: p.b,
                    fa: p.fm,
                    fm: frm,
                    fb: p.fb,
                    whole: right,
                },
                depth + 1,
            ));
            stack.push((
                Panel {
                    a: p.a,
                    m: lm,
                    b: p.m,
                    fa: p.fa,
                    fm: flm,
                    fb: p.fm,
                    whole: left,
                },
                depth + 1,
            ));
        }
    }
    Ok(out)
}

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use cmono_core::onedim::{
    curve_gamma, curve_potentials, emit_curve_figure_data, knott_smith_alphas, knott_smith_verify, young_check,
    KnottSmithConfig, MonotoneBijection,
};
use cmono_core::quadratic::{
    counterexample_verify, quadratic_family_report, quadratic_splitting, random_commuting_spd, CounterexampleConfig,
    SymMatrix,
};
use cmono_core::splitting::{certify_splitting_with, TestPoints};
use cmono_core::{classical_cost, Classical};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::common::{emit, write_text};
use crate::{Common, Format};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Example {
    Quadratic,
    Counterexample,
    Curves,
    KnottSmith,
    Young,
}

#[derive(Args)]
pub struct ExampleArgs {
    #[arg(value_enum)]
    pub name: Example,
    /// Sample count (meaning depends on the example).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Curve parameter range `[-tmax, tmax]`.
    #[arg(long, default_value_t = 1.5)]
    pub tmax: f64,
    /// Curve coordinates as odd powers, e.g. `1,3,5` or `1/3,1`.
    #[arg(long, default_value = "1,3,5")]
    pub powers: String,
    /// Young: the increasing map, `identity`, `cube` or a power `p/q`.
    #[arg(long, default_value = "cube")]
    pub g: String,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Quadratic: number of marginals and their dimension.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Also write curve figure data (CSV) here.
    #[arg(long)]
    pub figure: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

/// `identity`, `cube`, `t^p`, `t^(p/q)`, `p` or `p/q` with odd `p`, `q`.
pub fn parse_bijection(s: &str) -> Result<MonotoneBijection> {
    let t = s.trim();
    match t {
        "identity" | "id" | "t" => return Ok(MonotoneBijection::identity()),
        "cube" => return Ok(MonotoneBijection::power(3, 1)?),
        _ => {}
    }
    let body = t.strip_prefix("t^").unwrap_or(t);
    let body = body.trim_start_matches('(').trim_end_matches(')');
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (body, "1"),
    };
    let num: u32 = num.parse().with_context(|| format!("bad power {s:?}"))?;
    let den: u32 = den.parse().with_context(|| format!("bad power {s:?}"))?;
    Ok(MonotoneBijection::power(num, den)?)
}

fn figure(a: &ExampleArgs, alphas: &[MonotoneBijection], samples: usize) -> Result<Option<String>> {
    if a.figure.is_none() && a.common.format != Format::Csv {
        return Ok(None);
    }
    let csv = emit_curve_figure_data(alphas, (-a.tmax, a.tmax), samples)?.to_csv();
    if let Some(p) = &a.figure {
        write_text(Some(p), &csv)?;
    }
    Ok(Some(csv))
}

pub fn run(a: ExampleArgs) -> Result<bool> {
    match a.name {
        Example::Quadratic => quadratic(&a),
        Example::Counterexample => {
            let cfg = CounterexampleConfig {
                domain_samples: a.samples.unwrap_or(10_000),
                seed: a.common.seed,
                ..CounterexampleConfig::default()
            };
            let r = counterexample_verify(&cfg)?;
            emit(&a.common, &r)?;
            Ok(r.pass)
        }
        Example::Curves => curves(&a),
        Example::KnottSmith => {
            let cfg = KnottSmithConfig {
                t_max: a.tmax,
                curve_samples: a.samples.unwrap_or(61),
                ..KnottSmithConfig::default()
            };
            let r = knott_smith_verify(&cfg)?;
            if let Some(csv) = figure(&a, &knott_smith_alphas(), cfg.curve_samples)? {
                if a.common.format == Format::Csv {
                    write_text(a.common.out.as_deref(), &csv)?;
                    return Ok(r.pass);
                }
            }
            emit(&a.common, &r)?;
            Ok(r.pass)
        }
        Example::Young => {
            let g = parse_bijection(&a.g)?;
            let r = young_check(&g, a.a, a.b)?;
            #[derive(Serialize)]
            struct YoungOut<'a> {
                g: &'a str,
                #[serde(flatten)]
                report: &'a cmono_core::onedim::YoungReport,
                holds: bool,
            }
            let holds = r.rhs >= r.lhs - a.common.tol;
            emit(
                &a.common,
                &YoungOut {
                    g: g.name(),
                    report: &r,
                    holds,
                },
            )?;
            Ok(holds)
        }
    }
}

fn quadratic(a: &ExampleArgs) -> Result<bool> {
    ensure!(a.n >= 2 && a.d >= 1, "need at least two marginals of positive dimension");
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let q = random_commuting_spd(a.n, a.d, &mut rng);
    let split = quadratic_splitting(&q)?;
    let report = quadratic_family_report(&q, a.samples.unwrap_or(100), 0.05, a.common.seed)?;
    #[derive(Serialize)]
    struct Out<'a> {
        seed: u64,
        q: &'a [SymMatrix],
        m: &'a [SymMatrix],
        g: &'a [SymMatrix],
        report: &'a cmono_core::quadratic::QuadraticReport,
    }
    emit(
        &a.common,
        &Out {
            seed: a.common.seed,
            q: &q,
            m: &split.m,
            g: &split.g,
            report: &report,
        },
    )?;
    Ok(report.pass)
}

fn curves(a: &ExampleArgs) -> Result<bool> {
    let alphas = a.powers.split(',').map(parse_bijection).collect::<Result<Vec<_>>>()?;
    if alphas.len() < 2 {
        bail!("a curve needs at least two coordinates");
    }
    let samples = a.samples.unwrap_or(31);
    ensure!(samples >= 2, "need at least two samples");
    let ts: Vec<f64> = (0..samples)
        .map(|k| -a.tmax + 2.0 * a.tmax * k as f64 / (samples - 1) as f64)
        .collect();
    let g = curve_gamma(&alphas, &ts)?;
    let mut grid: Vec<f64> = Vec::new();
    for alpha in &alphas {
        for &t in &ts {
            grid.push(alpha.eval(t)?);
        }
    }
    let cp = curve_potentials(&alphas, &grid)?;
    let spec = classical_cost(Classical::C1, alphas.len(), 1)?;
    let tol = a.common.tol.max(1e-8);
    let cert = certify_splitting_with(
        &cp.tuple,
        &g,
        &spec,
        &TestPoints::ProductOfDomains {
            max_points: 200_000,
            seed: a.common.seed,
        },
        tol,
    )?;
    if let Some(csv) = figure(a, &alphas, samples)? {
        if a.common.format == Format::Csv {
            write_text(a.common.out.as_deref(), &csv)?;
            return Ok(cert.pass);
        }
    }
    #[derive(Serialize)]
    struct Out<'a> {
        seed: u64,
        alphas: Vec<&'a str>,
        error_estimates: &'a [f64],
        tuple: &'a cmono_core::SplittingTuple,
        certificate: &'a cmono_core::SplittingCertificate,
    }
    emit(
        &a.common,
        &Out {
            seed: a.common.seed,
            alphas: alphas.iter().map(|x| x.name()).collect(),
            error_estimates: &cp.error_estimates,
            tuple: &cp.tuple,
            certificate: &cert,
        },
    )?;
    Ok(cert.pass)
}

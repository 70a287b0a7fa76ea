use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use cmono_core::io::{from_json, to_json};
use cmono_core::monotone::check_projection_condition;
use cmono_core::splitting::{assemble_splitting_tuple, certify_splitting_with, TestPoints};
use cmono_core::{Error, SplittingCertificate, SplittingTuple};
use serde::Serialize;

use crate::common::{emit, lattice, load_cost, load_gamma, one_based, parse_grid, read};
use crate::Common;

const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Args)]
pub struct SplitArgs {
    /// Gamma JSON file.
    pub gamma: PathBuf,
    /// 1-based index of the base point in Gamma.
    #[arg(long, default_value_t = 1)]
    pub base: usize,
    /// Extra evaluation points `lo:hi:step` per coordinate of every marginal.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Cap on certification points drawn from the product of domains.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args)]
pub struct CertifyArgs {
    /// Tuple JSON written by `split`.
    pub tuple: PathBuf,
    /// Gamma JSON file.
    pub gamma: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct SplitReport<'a> {
    command: &'static str,
    cost: &'a str,
    seed: u64,
    base: usize,
    certificate: &'a SplittingCertificate,
}

fn certify(tuple: &SplittingTuple, g: &cmono_core::GammaSet, spec: &cmono_core::CostSpec, samples: usize, c: &Common) -> Result<SplittingCertificate> {
    let points = TestPoints::ProductOfDomains {
        max_points: samples,
        seed: c.seed,
    };
    Ok(certify_splitting_with(tuple, g, spec, &points, c.tol)?)
}

pub fn run(a: SplitArgs) -> Result<bool> {
    let g = load_gamma(&a.gamma)?;
    let spec = load_cost(&a.common.cost, g.dims())?;
    let base = one_based(a.base, g.len(), "base")?;
    let grids = match &a.grid {
        Some(s) => {
            let axis = parse_grid(s)?;
            g.dims().iter().map(|&d| lattice(&axis, d)).collect::<Result<Vec<_>>>()?
        }
        None => vec![Vec::new(); g.n_marginals()],
    };
    let tuple = match assemble_splitting_tuple(&g, &spec, &g.points()[base], &grids) {
        Ok(t) => t,
        Err(Error::ProjectionNotMonotone { .. }) => {
            let report = check_projection_condition(&g, &spec)?;
            for p in report.failing() {
                eprintln!("projection ({},{}) is not cyclically monotone", p.i + 1, p.j + 1);
                if let Some(w) = p.verdict.cycle_witness() {
                    eprintln!("{}", to_json(w)?.trim_end());
                }
            }
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    let certificate = certify(&tuple, &g, &spec, a.samples, &a.common)?;
    let report = SplitReport {
        command: "split",
        cost: &a.common.cost,
        seed: a.common.seed,
        base: a.base,
        certificate: &certificate,
    };
    match &a.common.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (i, u) in tuple.potentials.iter().enumerate() {
                fs::write(dir.join(format!("u{}.json", i + 1)), to_json(u)?)?;
            }
            fs::write(dir.join("tuple.json"), to_json(&tuple)?)?;
            fs::write(dir.join("certificate.json"), to_json(&report)?)?;
        }
        None => emit(&a.common, &report)?,
    }
    Ok(certificate.pass)
}

pub fn run_certify(a: CertifyArgs) -> Result<bool> {
    let tuple: SplittingTuple =
        from_json(&read(&a.tuple)?).with_context(|| format!("parsing {}", a.tuple.display()))?;
    let g = load_gamma(&a.gamma)?;
    let spec = load_cost(&a.common.cost, g.dims())?;
    let certificate = certify(&tuple, &g, &spec, a.samples, &a.common)?;
    #[derive(Serialize)]
    struct CertifyReport<'a> {
        command: &'static str,
        cost: &'a str,
        seed: u64,
        certificate: &'a SplittingCertificate,
    }
    emit(
        &a.common,
        &CertifyReport {
            command: "certify",
            cost: &a.common.cost,
            seed: a.common.seed,
            certificate: &certificate,
        },
    )?;
    Ok(certificate.pass)
}

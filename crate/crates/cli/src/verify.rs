use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use cmono_core::monotone::{
    check_projection_condition, is_n_c_monotone_bruteforce_with, sign_criterion_1d, BruteForceConfig, ProjectionReport,
};
use cmono_core::MonotonicityVerdict;
use serde::Serialize;

use crate::common::{emit, load_cost, load_gamma};
use crate::Common;

#[derive(Args)]
pub struct VerifyArgs {
    /// Gamma JSON file.
    pub gamma: PathBuf,
    /// Also run the permutation oracle for tuples of this order.
    #[arg(long)]
    pub brute: Option<usize>,
    /// Also run the comonotonicity criterion (scalar marginals only).
    #[arg(long)]
    pub sign_criterion: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct BruteReport {
    n: usize,
    verdict: MonotonicityVerdict,
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    cost: String,
    seed: u64,
    tolerance: f64,
    points: usize,
    dims: Vec<usize>,
    projection: ProjectionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign_criterion: Option<MonotonicityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force: Option<BruteReport>,
    holds: bool,
}

pub fn run(a: VerifyArgs) -> Result<bool> {
    let g = load_gamma(&a.gamma)?;
    let spec = load_cost(&a.common.cost, g.dims())?;
    let projection = check_projection_condition(&g, &spec)?;
    let sign_criterion = if a.sign_criterion {
        Some(sign_criterion_1d(&g)?)
    } else {
        None
    };
    let brute_force = match a.brute {
        Some(n) => {
            let cfg = BruteForceConfig {
                tolerance: a.common.tol,
                ..BruteForceConfig::default()
            };
            Some(BruteReport {
                n,
                verdict: is_n_c_monotone_bruteforce_with(&g, &spec, n, &cfg)?,
            })
        }
        None => None,
    };
    let holds = projection.all_hold
        && sign_criterion.as_ref().is_none_or(|v| v.holds)
        && brute_force.as_ref().is_none_or(|b| b.verdict.holds);
    for p in projection.failing() {
        eprintln!("projection ({},{}) is not cyclically monotone", p.i + 1, p.j + 1);
    }
    let report = VerifyReport {
        command: "verify",
        cost: a.common.cost.clone(),
        seed: a.common.seed,
        tolerance: a.common.tol,
        points: g.len(),
        dims: g.dims().to_vec(),
        projection,
        sign_criterion,
        brute_force,
        holds,
    };
    emit(&a.common, &report)?;
    Ok(holds)
}

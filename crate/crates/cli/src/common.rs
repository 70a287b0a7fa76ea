use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use cmono_core::io::{parse_cost, parse_gamma, to_json};
use cmono_core::{classical_cost, Classical, CostSpec, GammaSet, MarginalPoint, PairwiseCost};
use serde::Serialize;

use crate::Common;

const MAX_GRID: usize = 1_000_000;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_gamma(path: &Path) -> Result<GammaSet> {
    parse_gamma(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn classical(name: &str) -> Option<Classical> {
    name.parse().ok()
}

/// Cost for marginals of the given dimensions.
pub fn load_cost(name: &str, dims: &[usize]) -> Result<CostSpec> {
    if let Some(which) = classical(name) {
        let d = dims[0];
        ensure!(
            dims.iter().all(|&x| x == d),
            "classical costs need equal marginal dimensions, got {dims:?}"
        );
        return Ok(classical_cost(which, dims.len(), d)?);
    }
    let path = Path::new(name);
    parse_cost(&read(path)?, Some(dims)).with_context(|| format!("parsing {}", path.display()))
}

/// The coupling of a two-marginal problem.
pub fn load_pair_cost(name: &str, dims: [usize; 2]) -> Result<PairwiseCost> {
    match classical(name) {
        Some(Classical::C1 | Classical::C3) => Ok(PairwiseCost::inner_product()),
        Some(Classical::C2) => Ok(PairwiseCost::half_sq_dist()),
        None => Ok(load_cost(name, &dims)?.pair(0, 1)?.clone()),
    }
}

/// `"lo:hi:step"` to the points `lo, lo + step, ..., <= hi`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    ensure!(parts.len() == 3, "grid must look like lo:hi:step, got {spec:?}");
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number {p:?} in grid")))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    ensure!(lo.is_finite() && hi.is_finite() && lo <= hi, "grid bounds must be finite with lo <= hi");
    ensure!(step > 0.0, "grid step must be positive");
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    ensure!(count <= MAX_GRID, "grid has {count} points, limit is {MAX_GRID}");
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

/// Lattice `axis^d` of marginal points.
pub fn lattice(axis: &[f64], d: usize) -> Result<Vec<MarginalPoint>> {
    let total = (axis.len() as f64).powi(d as i32);
    ensure!(total <= MAX_GRID as f64, "grid of {total} points per marginal is too large");
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(MarginalPoint::new).collect())
}

/// 1-based index flag to a 0-based index below `len`.
pub fn one_based(idx: usize, len: usize, what: &str) -> Result<usize> {
    if idx == 0 || idx > len {
        bail!("{what} index {idx} is out of range 1..={len}");
    }
    Ok(idx - 1)
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn emit<T: Serialize + ?Sized>(common: &Common, value: &T) -> Result<()> {
    ensure!(
        common.format == crate::Format::Json,
        "this command only writes JSON"
    );
    write_text(common.out.as_deref(), &to_json(value)?)
}

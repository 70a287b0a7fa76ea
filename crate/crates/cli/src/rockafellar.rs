use std::path::PathBuf;

use anyhow::{ensure, Context, Result};
use clap::Args;
use cmono_core::antiderivative::RockafellarPotential;
use cmono_core::io::{from_json, to_csv, to_json, PairsFile};
use cmono_core::Error;

use crate::common::{emit, lattice, load_pair_cost, one_based, parse_grid, read, write_text};
use crate::{Common, Format};

#[derive(Args)]
pub struct RockafellarArgs {
    /// Pairs JSON file: `{"pairs": [[[x], [y]], ...]}`.
    pub pairs: PathBuf,
    /// 1-based index of the pair whose first point is the base point.
    #[arg(long, default_value_t = 1)]
    pub base: usize,
    /// Evaluation points `lo:hi:step` per coordinate, added to the first
    /// projection of the pairs.
    #[arg(long, alias = "grid", allow_hyphen_values = true)]
    pub eval: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(a: RockafellarArgs) -> Result<bool> {
    let file: PairsFile = from_json(&read(&a.pairs)?).with_context(|| format!("parsing {}", a.pairs.display()))?;
    let pairs = file.pairs;
    ensure!(!pairs.is_empty(), "pair list is empty");
    let dims = [pairs[0].0.dim(), pairs[0].1.dim()];
    let c = load_pair_cost(&a.common.cost, dims)?;
    let base = one_based(a.base, pairs.len(), "base")?;

    let r = match RockafellarPotential::build(&c, &pairs, &pairs[base].0) {
        Ok(r) => r,
        Err(Error::NotCyclicallyMonotone(w)) => {
            eprintln!("pairs are not cyclically monotone (cycle gain {:e})", w.gain);
            eprintln!("{}", to_json(&*w)?.trim_end());
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    let mut points: Vec<_> = pairs.iter().map(|(x, _)| x.clone()).collect();
    if let Some(spec) = &a.eval {
        points.extend(lattice(&parse_grid(spec)?, dims[0])?);
    }
    let table = r.tabulate(&points)?;
    match a.common.format {
        Format::Json => emit(&a.common, &table)?,
        Format::Csv => {
            let mut header: Vec<String> = (1..=dims[0]).map(|k| format!("x{k}")).collect();
            header.push("value".into());
            let rows: Vec<Vec<f64>> = table
                .points()
                .iter()
                .zip(table.values())
                .map(|(x, v)| {
                    let mut row = x.coords().to_vec();
                    row.push(*v);
                    row
                })
                .collect();
            write_text(a.common.out.as_deref(), &to_csv(&header, &rows))?;
        }
    }
    Ok(true)
}

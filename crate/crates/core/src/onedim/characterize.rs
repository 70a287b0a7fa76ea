use serde::Serialize;

use crate::antiderivative::{verify_antiderivative, RockafellarPotential};
use crate::cost::{classical_cost, Classical, CostSpec, PairwiseCost};
use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::monotone::{
    check_projection_condition, is_n_c_monotone_bruteforce, is_pair_monotone_classical, sign_criterion_1d,
    MonotonicityVerdict, PairVerdict, ProjectionReport, TOLERANCE,
};
use crate::splitting::{assemble_splitting_tuple, certify_splitting, SplittingCertificate, TestPoints};

/// Largest order tried by the brute-force item.
pub const CHARACTERIZE_MAX_ORDER: usize = 4;
const PRODUCT_CAP: usize = 200_000;

#[derive(Clone, Debug, Serialize)]
pub struct OrderVerdict {
    pub n: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgradientItem {
    /// 1-based pair key, e.g. `"1,2"`.
    pub pair: String,
    pub holds: bool,
    pub max_residual: Option<f64>,
}

/// Verdicts of the equivalent characterisations of c-monotone sets on the
/// line, evaluated independently.
#[derive(Clone, Debug, Serialize)]
pub struct Characterization1d {
    pub cost: Classical,
    /// (i) brute-force `n`-monotonicity for `n = 2..=min(|Gamma|, 4)`.
    pub brute_force: Vec<OrderVerdict>,
    pub brute_force_holds: bool,
    /// (ii) comonotonicity sign criterion.
    pub sign_criterion: MonotonicityVerdict,
    /// (iii) cyclic monotonicity of each projection under its coupling.
    pub projections_cyclic: ProjectionReport,
    /// (iv) monotonicity of each projection in the plane.
    pub projections_monotone: ProjectionReport,
    /// (v) assembled tuple certified on the product of its domains; `None`
    /// if assembly was refused.
    pub splitting: Option<SplittingCertificate>,
    pub splitting_holds: bool,
    /// (vi) each projection lies in the subdifferential graph of a convex
    /// function (its Rockafellar antiderivative).
    pub subgradients: Vec<SubgradientItem>,
    pub subgradients_hold: bool,
    /// Common verdict, taken from the sign criterion.
    pub holds: bool,
    /// Verdicts disagree only through violations below tolerance.
    pub borderline: bool,
    /// Most negative `(p_i - q_i)(p_j - q_j)` over point pairs and `i < j`
    /// (0 if none is negative).
    pub worst_pair_product: f64,
}

/// The cost used for `which`: `c1`, `-c2` or `c3`, which share their
/// monotone sets.
pub fn characterize_cost(which: Classical, n: usize) -> Result<CostSpec> {
    let c = classical_cost(which, n, 1)?;
    Ok(match which {
        Classical::C2 => c.negated(),
        _ => c,
    })
}

fn worst_pair_product(g: &GammaSet) -> f64 {
    let rows: Vec<Vec<f64>> = g.points().iter().map(|p| p.scalars().expect("scalar")).collect();
    let mut worst: f64 = 0.0;
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            for i in 0..rows[a].len() {
                for j in i + 1..rows[a].len() {
                    worst = worst.min((rows[a][i] - rows[b][i]) * (rows[a][j] - rows[b][j]));
                }
            }
        }
    }
    worst
}

/// Runs every item on `g` and checks that they agree. Disagreement beyond
/// tolerance is an [`Error::InternalInconsistency`].
pub fn characterize_1d(g: &GammaSet, which: Classical) -> Result<Characterization1d> {
    if !g.is_one_dimensional() {
        return Err(Error::NotOneDimensional);
    }
    let n = g.n_marginals();
    let spec = characterize_cost(which, n)?;

    let mut brute_force = Vec::new();
    for order in 2..=g.len().min(CHARACTERIZE_MAX_ORDER) {
        match is_n_c_monotone_bruteforce(g, &spec, order) {
            Ok(v) => brute_force.push(OrderVerdict { n: order, holds: v.holds }),
            Err(Error::OrderTooLarge { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let brute_force_holds = brute_force.iter().all(|v| v.holds);

    let sign_criterion = sign_criterion_1d(g)?;
    let projections_cyclic = check_projection_condition(g, &spec)?;

    let mut monotone_pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let verdict = is_pair_monotone_classical(&g.project_pair(i, j)?)?;
            monotone_pairs.push(PairVerdict { i, j, verdict });
        }
    }
    let projections_monotone = ProjectionReport {
        all_hold: monotone_pairs.iter().all(|p| p.verdict.holds),
        pairs: monotone_pairs,
    };

    let base = g.points()[0].clone();
    let empty = vec![Vec::new(); n];
    let splitting = match assemble_splitting_tuple(g, &spec, &base, &empty) {
        Ok(tuple) => Some(certify_splitting(
            &tuple,
            g,
            &spec,
            &TestPoints::ProductOfDomains {
                max_points: PRODUCT_CAP,
                seed: 0,
            },
        )?),
        Err(Error::ProjectionNotMonotone { .. }) => None,
        Err(e) => return Err(e),
    };
    let splitting_holds = splitting.as_ref().is_some_and(|c| c.pass);

    let ip = PairwiseCost::inner_product();
    let mut subgradients = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let pairs = g.project_pair(i, j)?;
            let item = match RockafellarPotential::build(&ip, &pairs, base.part(i)) {
                Ok(r) => {
                    let f = r.tabulate(&g.project(i)?)?;
                    let rep = verify_antiderivative(&f, &pairs, &ip)?;
                    SubgradientItem {
                        pair: format!("{},{}", i + 1, j + 1),
                        holds: rep.holds,
                        max_residual: Some(rep.max_residual),
                    }
                }
                Err(Error::NotCyclicallyMonotone(_)) => SubgradientItem {
                    pair: format!("{},{}", i + 1, j + 1),
                    holds: false,
                    max_residual: None,
                },
                Err(e) => return Err(e),
            };
            subgradients.push(item);
        }
    }
    let subgradients_hold = subgradients.iter().all(|s| s.holds);

    let holds = sign_criterion.holds;
    let items = [
        ("brute force", brute_force_holds),
        ("cyclic projections", projections_cyclic.all_hold),
        ("monotone projections", projections_monotone.all_hold),
        ("splitting tuple", splitting_holds),
        ("subgradient graphs", subgradients_hold),
    ];
    let worst = worst_pair_product(g);
    let disagreeing: Vec<&str> = items.iter().filter(|(_, v)| *v != holds).map(|(k, _)| *k).collect();
    let borderline = !disagreeing.is_empty();
    if borderline && worst < -TOLERANCE {
        return Err(Error::InternalInconsistency(format!(
            "sign criterion says {holds} but {} disagree (worst pair product {worst:e})",
            disagreeing.join(", ")
        )));
    }
    Ok(Characterization1d {
        cost: which,
        brute_force,
        brute_force_holds,
        sign_criterion,
        projections_cyclic,
        projections_monotone,
        splitting,
        splitting_holds,
        subgradients,
        subgradients_hold,
        holds,
        borderline,
        worst_pair_product: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::to_json;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_true(r: &Characterization1d) -> bool {
        r.brute_force_holds
            && r.sign_criterion.holds
            && r.projections_cyclic.all_hold
            && r.projections_monotone.all_hold
            && r.splitting_holds
            && r.subgradients_hold
    }

    fn all_false(r: &Characterization1d) -> bool {
        !(r.brute_force_holds
            || r.sign_criterion.holds
            || r.projections_cyclic.all_hold
            || r.projections_monotone.all_hold
            || r.splitting_holds
            || r.subgradients_hold)
    }

    #[test]
    fn comonotone_set() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 2.0], vec![2.0, 3.0, 5.0]]).unwrap();
        for which in [Classical::C1, Classical::C2, Classical::C3] {
            let r = characterize_1d(&g, which).unwrap();
            assert!(all_true(&r) && r.holds && !r.borderline);
        }
    }

    #[test]
    fn violated_set_has_sign_witness() {
        let g = GammaSet::from_scalar_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, -1.0, 2.0]]).unwrap();
        let r = characterize_1d(&g, Classical::C1).unwrap();
        assert!(all_false(&r) && !r.holds);
        let w = r.sign_criterion.permutation_witness().unwrap();
        assert!(w.permuted_sum > w.diagonal_sum);
        assert_eq!(r.worst_pair_product, -2.0);
    }

    #[test]
    fn curve_samples() {
        let rows: Vec<Vec<f64>> = [-1.0, -0.4, 0.0, 0.5, 1.2]
            .iter()
            .map(|&t: &f64| vec![t, t.powi(3), t.powi(5)])
            .collect();
        let g = GammaSet::from_scalar_rows(&rows).unwrap();
        let r = characterize_1d(&g, Classical::C1).unwrap();
        assert!(all_true(&r));
        let json = to_json(&r).unwrap();
        assert!(json.contains("\"1,2\""));
    }

    #[test]
    fn random_instances_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..300 {
            let n = rng.gen_range(2..=4);
            let m = rng.gen_range(1..=5);
            let comonotone = k % 2 == 0;
            let rows: Vec<Vec<f64>> = if comonotone {
                let mut cols: Vec<Vec<f64>> = (0..n)
                    .map(|_| {
                        let mut c: Vec<f64> = (0..m).map(|_| rng.gen_range(-5..=5) as f64).collect();
                        c.sort_by(f64::total_cmp);
                        c
                    })
                    .collect();
                for c in cols.iter_mut() {
                    c.dedup();
                    while c.len() < m {
                        let last = *c.last().unwrap();
                        c.push(last + 1.0);
                    }
                }
                (0..m).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
            } else {
                (0..m).map(|_| (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect()).collect()
            };
            let mut dedup = rows.clone();
            dedup.sort_by(|a, b| a.partial_cmp(b).unwrap());
            dedup.dedup();
            let g = GammaSet::from_scalar_rows(&dedup).unwrap();
            let which = [Classical::C1, Classical::C2, Classical::C3][k % 3];
            let r = characterize_1d(&g, which).unwrap();
            assert!(!r.borderline);
            assert!(if r.holds { all_true(&r) } else { all_false(&r) }, "instance {k}");
        }
    }
}

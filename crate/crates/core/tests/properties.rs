use cmono_core::antiderivative::RockafellarPotential;
use cmono_core::cost::add_separable_shift;
use cmono_core::monotone::{is_n_c_monotone_bruteforce, is_two_marginal_cyclically_monotone};
use cmono_core::{
    classical_cost, Classical, ClosedForm, CostSpec, Error, GammaSet, MarginalPoint, PairwiseCost, PowerTerm,
    ProductPoint,
};
use proptest::prelude::*;

mod common;
use common::{chain_value, chains_bounded, coupling_excess, pairs_of};

fn coord() -> impl Strategy<Value = f64> {
    (-4i32..=4).prop_map(f64::from)
}

/// `len` product points over `n` marginals of dimension `d`, integer coordinates.
fn gamma(n: usize, d: usize, len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = GammaSet> {
    prop::collection::vec(prop::collection::vec(prop::collection::vec(coord(), d), n), len).prop_filter_map(
        "duplicate points",
        |pts| GammaSet::new(pts.into_iter().map(ProductPoint::from_coords).collect()).ok(),
    )
}

fn shift_term(d: usize) -> impl Strategy<Value = ClosedForm> {
    (prop::collection::vec(-3.0f64..3.0, d), -2.0f64..2.0, -1.0f64..1.0, 1i32..=4).prop_map(
        move |(w, scale, coef, pow)| {
            let base = ClosedForm::Linear { w }.plus(ClosedForm::HalfSqNorm { scale });
            if d == 1 {
                base.plus(ClosedForm::PowerSeries {
                    terms: vec![PowerTerm::new(coef, pow, 1)],
                })
            } else {
                base
            }
        },
    )
}

fn cost_strategy() -> impl Strategy<Value = PairwiseCost> {
    prop_oneof![
        Just(PairwiseCost::inner_product()),
        Just(PairwiseCost::half_sq_dist()),
        Just(PairwiseCost::bilinear(vec![vec![2.0, 1.0], vec![0.0, 1.0]])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separable_shift_leaves_verdicts_unchanged(
        (g, h) in (1usize..=2).prop_flat_map(|d| (gamma(3, d, 2..=4), prop::collection::vec(shift_term(d), 3)))
    ) {
        let spec = classical_cost(Classical::C1, 3, g.dims()[0]).unwrap();
        let shifted = add_separable_shift(&spec, h).unwrap();
        let (a, b) = (coupling_excess(&g, &spec), coupling_excess(&g, &shifted));
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
        for n in 2..=g.len().min(3) {
            prop_assert_eq!(
                is_n_c_monotone_bruteforce(&g, &spec, n).unwrap().holds,
                is_n_c_monotone_bruteforce(&g, &shifted, n).unwrap().holds
            );
        }
    }

    #[test]
    fn translation_leaves_verdicts_unchanged(
        (g, z) in (1usize..=2).prop_flat_map(|d| (
            gamma(3, d, 2..=4),
            prop::collection::vec(prop::collection::vec(coord(), d), 3),
        ))
    ) {
        let spec = classical_cost(Classical::C1, 3, g.dims()[0]).unwrap();
        let moved = g.translate(&ProductPoint::from_coords(z)).unwrap();
        prop_assert_eq!(coupling_excess(&g, &spec), coupling_excess(&moved, &spec));
        for n in 2..=g.len().min(3) {
            prop_assert_eq!(
                is_n_c_monotone_bruteforce(&g, &spec, n).unwrap().holds,
                is_n_c_monotone_bruteforce(&moved, &spec, n).unwrap().holds
            );
        }
    }

    #[test]
    fn classical_costs_are_equivalent(g in (1usize..=2).prop_flat_map(|d| gamma(3, d, 2..=4))) {
        let d = g.dims()[0];
        let c1 = classical_cost(Classical::C1, 3, d).unwrap();
        let c2 = classical_cost(Classical::C2, 3, d).unwrap().negated();
        let c3 = classical_cost(Classical::C3, 3, d).unwrap();
        let e1 = coupling_excess(&g, &c1);
        prop_assert_eq!(e1, coupling_excess(&g, &c2));
        prop_assert_eq!(e1, coupling_excess(&g, &c3));
        for n in 2..=g.len().min(3) {
            let v = is_n_c_monotone_bruteforce(&g, &c1, n).unwrap().holds;
            prop_assert_eq!(v, is_n_c_monotone_bruteforce(&g, &c2, n).unwrap().holds);
            prop_assert_eq!(v, is_n_c_monotone_bruteforce(&g, &c3, n).unwrap().holds);
        }
    }

    #[test]
    fn cycle_detection_matches_permutations(g in gamma(2, 2, 2..=5), c in cost_strategy()) {
        let spec = CostSpec::uniform(vec![2, 2], c.clone()).unwrap();
        let pairs = pairs_of(&g);
        let cyclic = is_two_marginal_cyclically_monotone(&pairs, &c).unwrap();
        let brute = (2..=g.len()).all(|n| is_n_c_monotone_bruteforce(&g, &spec, n).unwrap().holds);
        prop_assert_eq!(cyclic.holds, brute);
        if let Some(w) = cyclic.cycle_witness() {
            prop_assert!(w.recheck(&c).unwrap() > 0.0);
        }
    }

    #[test]
    fn rockafellar_matches_chains_and_is_proper_iff_monotone(
        g in gamma(2, 2, 1..=6),
        c in cost_strategy(),
        base in 0usize..6,
        probes in prop::collection::vec(prop::collection::vec(coord(), 2), 1..4),
    ) {
        let pairs = pairs_of(&g);
        let spec = CostSpec::uniform(vec![2, 2], c.clone()).unwrap();
        let monotone = (2..=g.len()).all(|n| is_n_c_monotone_bruteforce(&g, &spec, n).unwrap().holds);
        let s1 = pairs[base % pairs.len()].0.clone();
        match RockafellarPotential::build(&c, &pairs, &s1) {
            Ok(r) => {
                prop_assert!(monotone);
                prop_assert!(chains_bounded(&c, &pairs, &s1, 1e-9));
                let xs = pairs.iter().map(|p| p.0.clone()).chain(probes.into_iter().map(MarginalPoint::new));
                for x in xs {
                    let got = r.eval(&x).unwrap();
                    prop_assert!(got.is_finite());
                    let want = if x == s1 { 0.0 } else { chain_value(&c, &pairs, &s1, &x) };
                    prop_assert!((got - want).abs() <= 1e-9, "R({x:?}) = {got}, chains give {want}");
                }
            }
            Err(Error::NotCyclicallyMonotone(_)) => {
                prop_assert!(!monotone);
                prop_assert!(!chains_bounded(&c, &pairs, &s1, 1e-9));
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

use jetcalc_core::series::{diffeo_invert, identity_map, series_compose, TruncatedSeries};
use jetcalc_core::{TensorFieldJet, Valence};
use proptest::prelude::*;

fn random_series(m: usize, order: usize, seed: u64) -> TruncatedSeries {
    TensorFieldJet::random(m, 0, Valence::scalar(), order, seed, 6).components()[0].clone()
}

fn without_constant(s: TruncatedSeries) -> TruncatedSeries {
    let mut s = s;
    s.set_coeff(&jetcalc_core::MultiIndex::empty(), jetcalc_core::scalar::zero());
    s
}

/// Near-identity map `x + (higher-order terms)` for composition and inversion tests.
fn random_diffeo(m: usize, order: usize, seed: u64) -> Vec<TruncatedSeries> {
    identity_map(m, order)
        .into_iter()
        .enumerate()
        .map(|(l, x)| {
            let extra = random_series(m, order, seed + l as u64 * 17);
            &x + &(&extra - &extra.below_degree(2))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn ring_laws(seed in 0u64..1_000_000, m in 1usize..=3, order in 0usize..=4) {
        let a = random_series(m, order, seed);
        let b = random_series(m, order, seed + 1);
        let c = random_series(m, order, seed + 2);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn leibniz_rule(seed in 0u64..1_000_000, m in 1usize..=3, order in 1usize..=4) {
        let a = random_series(m, order, seed);
        let b = random_series(m, order, seed + 1);
        for axis in 0..m {
            let lhs = (&a * &b).partial(axis).unwrap();
            let rhs = &(&a.partial(axis).unwrap() * &b.truncate(order - 1).unwrap())
                + &(&a.truncate(order - 1).unwrap() * &b.partial(axis).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn chain_rule(seed in 0u64..1_000_000, m in 1usize..=2, order in 1usize..=4) {
        let f = random_series(m, order, seed);
        let g: Vec<TruncatedSeries> = (0..m)
            .map(|l| without_constant(random_series(m, order, seed + 10 + l as u64)))
            .collect();
        let fg = series_compose(&f, &g).unwrap();
        for axis in 0..m {
            let lhs = fg.partial(axis).unwrap();
            let mut rhs = TruncatedSeries::zero(m, order - 1);
            for b in 0..m {
                let outer = series_compose(&f.partial(b).unwrap(), &g).unwrap();
                rhs.add_product(&outer, &g[b].partial(axis).unwrap());
            }
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn inversion_round_trip(seed in 0u64..1_000_000, m in 1usize..=3, order in 1usize..=4) {
        let phi = random_diffeo(m, order, seed);
        let psi = diffeo_invert(&phi).unwrap();
        let id = identity_map(m, order);
        for l in 0..m {
            prop_assert_eq!(&series_compose(&phi[l], &psi).unwrap(), &id[l]);
            prop_assert_eq!(&series_compose(&psi[l], &phi).unwrap(), &id[l]);
        }
    }

    #[test]
    fn composition_is_associative(seed in 0u64..1_000_000, order in 1usize..=4) {
        let m = 2;
        let f = random_series(m, order, seed);
        let g = random_diffeo(m, order, seed + 3);
        let h = random_diffeo(m, order, seed + 7);
        let gh: Vec<TruncatedSeries> = g.iter().map(|c| series_compose(c, &h).unwrap()).collect();
        let left = series_compose(&series_compose(&f, &g).unwrap(), &h).unwrap();
        prop_assert_eq!(left, series_compose(&f, &gh).unwrap());
    }
}

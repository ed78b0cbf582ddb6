use jetcalc_core::group::{act_on_classical, act_on_linear, act_on_tensor, make_kernel_element_from};
use jetcalc_core::scalar::{frac, int};
use jetcalc_core::series::{series_compose, TruncatedSeries};
use jetcalc_core::{ClassicalConnectionJet, DiffeoJet, LinearConnectionJet, MultiIndex, TensorFieldJet, Valence, WGroupElement};
use proptest::prelude::*;

fn mi(labels: &[usize]) -> MultiIndex {
    MultiIndex::new(labels.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn associativity(seed in 0u64..10_000) {
        let a = WGroupElement::random(2, 2, 3, 3, seed, 3);
        let b = WGroupElement::random(2, 2, 3, 3, seed + 1, 3);
        let c = WGroupElement::random(2, 2, 3, 3, seed + 2, 3);
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_laws(seed in 0u64..10_000) {
        let g = WGroupElement::random(3, 2, 3, 2, seed, 3);
        let inv = g.inv().unwrap();
        prop_assert!(g.mul(&inv).unwrap().is_identity());
        prop_assert!(inv.mul(&g).unwrap().is_identity());
        prop_assert_eq!(inv.inv().unwrap(), g);
    }

    #[test]
    fn left_action_classical(seed in 0u64..10_000) {
        let s = 2;
        let g1 = WGroupElement::random(2, 1, s + 2, 1, seed, 3);
        let g2 = WGroupElement::random(2, 1, s + 2, 1, seed + 7, 3);
        let lam = ClassicalConnectionJet::random(2, s, seed + 13, 4);
        let lhs = act_on_classical(&g1.mul(&g2).unwrap(), &lam).unwrap();
        let rhs = act_on_classical(&g1, &act_on_classical(&g2, &lam).unwrap()).unwrap();
        lhs.field().audit().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn left_action_linear(seed in 0u64..10_000) {
        let r = 2;
        let g1 = WGroupElement::random(2, 2, r + 1, r + 1, seed, 3);
        let g2 = WGroupElement::random(2, 2, r + 1, r + 1, seed + 7, 3);
        let k = LinearConnectionJet::random(2, 2, r, seed + 13, 4);
        let lhs = act_on_linear(&g1.mul(&g2).unwrap(), &k).unwrap();
        let rhs = act_on_linear(&g1, &act_on_linear(&g2, &k).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn left_action_tensor(seed in 0u64..10_000) {
        let order = 2;
        let g1 = WGroupElement::random(2, 2, order + 1, order, seed, 3);
        let g2 = WGroupElement::random(2, 2, order + 1, order, seed + 7, 3);
        let t = TensorFieldJet::random(2, 2, Valence::standard(1, 1, 0, 1), order, seed + 13, 4);
        let lhs = act_on_tensor(&g1.mul(&g2).unwrap(), &t).unwrap();
        let rhs = act_on_tensor(&g1, &act_on_tensor(&g2, &t).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn base_parts_compose() {
    let g1 = WGroupElement::random(2, 1, 3, 2, 1, 3);
    let g2 = WGroupElement::random(2, 1, 3, 2, 2, 3);
    let prod = g1.mul(&g2).unwrap();
    for l in 0..2 {
        let expected = series_compose(&g1.base().components()[l], g2.base().components()).unwrap();
        assert_eq!(prod.base().components()[l], expected);
    }
}

#[test]
fn linear_only_inverse() {
    let a = vec![
        &TruncatedSeries::variable(2, 1, 0).scale(&int(2)) + &TruncatedSeries::variable(2, 1, 1),
        TruncatedSeries::variable(2, 1, 1),
    ];
    let base = DiffeoJet::new(a).unwrap();
    let gauge = jetcalc_core::GaugeJet::new(
        2,
        vec![vec![
            &TruncatedSeries::constant(2, 1, int(3)) + &TruncatedSeries::variable(2, 1, 0),
        ]],
    )
    .unwrap();
    let g = WGroupElement::new(base, gauge).unwrap();
    let inv = g.inv().unwrap();
    // base inverse: x1 -> (x1 - x2)/2, x2 -> x2
    let b = inv.base().components();
    assert_eq!(b[0].coeff(&mi(&[0])), frac(1, 2));
    assert_eq!(b[0].coeff(&mi(&[1])), frac(-1, 2));
    // gauge inverse: 1 / (3 + (x1 - x2)/2) = 1/3 - (x1 - x2)/18 at order 1
    let c = &inv.gauge().matrix()[0][0];
    assert_eq!(c.coeff(&MultiIndex::empty()), frac(1, 3));
    assert_eq!(c.coeff(&mi(&[0])), frac(-1, 18));
    assert_eq!(c.coeff(&mi(&[1])), frac(1, 18));
}

#[test]
fn classical_kernel_shift_matches_coordinate_law() {
    for s in 0..=3 {
        let lam = ClassicalConnectionJet::random(2, s, 40 + s as u64, 5);
        let top = MultiIndex::new([vec![0, 1], vec![1; s]].concat());
        let h = make_kernel_element_from(2, 1, s + 2, s + 1, &[(1, top.clone(), int(7))], &[]).unwrap();
        let out = act_on_classical(&h, &lam).unwrap();
        for mu in 0..2 {
            for l in 0..2 {
                for nu in 0..2 {
                    for t in 0..=s {
                        for d in MultiIndex::all_of_order(2, t) {
                            let before = lam.jet_coordinate(mu, l, nu, &d).unwrap();
                            let after = out.jet_coordinate(mu, l, nu, &d).unwrap();
                            let hit = l == 1 && t == s && d.with(mu).with(nu) == top;
                            let shift = if hit { int(7) } else { int(0) };
                            assert_eq!(after - before, shift, "s={s} comp=({mu},{l},{nu}) d={d}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn linear_kernel_shift_matches_coordinate_law() {
    for r in 0..=3 {
        let k = LinearConnectionJet::random(2, 2, r, 50 + r as u64, 5);
        let top = MultiIndex::new([vec![0], vec![1; r]].concat());
        let h = make_kernel_element_from(2, 2, r + 1, r + 1, &[], &[(0, 1, top.clone(), int(5))]).unwrap();
        let out = act_on_linear(&h, &k).unwrap();
        for j in 0..2 {
            for i in 0..2 {
                for l in 0..2 {
                    for t in 0..=r {
                        for d in MultiIndex::all_of_order(2, t) {
                            let before = k.jet_coordinate(j, i, l, &d).unwrap();
                            let after = out.jet_coordinate(j, i, l, &d).unwrap();
                            let hit = i == 0 && j == 1 && t == r && d.with(l) == top;
                            let shift = if hit { int(5) } else { int(0) };
                            assert_eq!(after - before, shift, "r={r} comp=({j},{i},{l}) d={d}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn second_order_base_coefficient_example() {
    let h = make_kernel_element_from(2, 1, 2, 1, &[(0, mi(&[1, 1]), int(3))], &[]).unwrap();
    let out = act_on_classical(&h, &ClassicalConnectionJet::zero(2, 0)).unwrap();
    assert_eq!(out.jet_coordinate(1, 0, 1, &MultiIndex::empty()).unwrap(), int(3));
    assert_eq!(out.jet_coordinate(0, 0, 0, &MultiIndex::empty()).unwrap(), int(0));
}

#[test]
fn constant_abelian_gauge_fixes_k() {
    let g = make_kernel_element_from(2, 1, 2, 2, &[], &[]).unwrap();
    let scaled = WGroupElement::new(
        g.base().clone(),
        jetcalc_core::GaugeJet::new(2, vec![vec![TruncatedSeries::constant(2, 2, int(4))]]).unwrap(),
    )
    .unwrap();
    let k = LinearConnectionJet::random(2, 1, 1, 3, 5);
    assert_eq!(act_on_linear(&scaled, &k).unwrap(), k);
}

#[test]
fn kernel_profiles() {
    let e = WGroupElement::random_kernel(2, 2, 3, 3, 3, 1, 4).unwrap();
    assert!(e.is_identity());
    let h1 = WGroupElement::random_kernel(2, 2, 4, 3, 2, 1, 4).unwrap();
    let h2 = WGroupElement::random_kernel(2, 2, 4, 3, 2, 2, 4).unwrap();
    assert!(h1.project(2, 2).unwrap().is_identity());
    assert!(h1.mul(&h2).unwrap().project(2, 2).unwrap().is_identity());
    assert!(WGroupElement::random_kernel(2, 2, 2, 3, 3, 1, 4).is_err());
}

#[test]
fn under_ordered_action_refused() {
    let g = WGroupElement::random(2, 1, 2, 2, 1, 3);
    let lam = ClassicalConnectionJet::random(2, 1, 1, 3);
    assert!(act_on_classical(&g, &lam).is_err());
    let k = LinearConnectionJet::random(2, 1, 2, 1, 3);
    assert!(act_on_linear(&g, &k).is_err());
}

#[test]
fn scalar_field_is_recomposed() {
    let g = WGroupElement::random(2, 1, 3, 2, 9, 3);
    let f = TensorFieldJet::random(2, 1, Valence::scalar(), 2, 4, 5);
    let out = act_on_tensor(&g, &f).unwrap();
    let psi = g.base().inverse().unwrap();
    let expected = series_compose(&f.components()[0], psi.components()).unwrap().truncate(2).unwrap();
    assert_eq!(out.components()[0], expected);
}

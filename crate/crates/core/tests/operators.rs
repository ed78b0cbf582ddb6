use jetcalc_core::covariant::{formal_curvature_map_classical, formal_curvature_map_linear};
use jetcalc_core::operators::{
    contract_nabla_rl_with_rk, equivariance_check, evaluate, factorization_check, operator, probe_manifest,
    run_probe_case, seeded_jets, JetSet, OPERATORS,
};
use jetcalc_core::reduction::group_orders;
use jetcalc_core::scalar::int;
use jetcalc_core::{ClassicalConnectionJet, LinearConnectionJet, TensorFieldJet, Valence, WGroupElement};

fn field_valences() -> Vec<Valence> {
    vec![Valence::standard(1, 0, 0, 0), Valence::standard(0, 1, 0, 1), Valence::standard(1, 1, 0, 0)]
}

#[test]
fn natural_operators_factor_through_reduced_data() {
    for k in 1..=3 {
        let jets = seeded_jets(2, 2, 3, 3, None, 500 + k as u64, 5);
        for op in OPERATORS.iter().filter(|o| o.natural && !o.uses_field() && o.target_order <= k) {
            let rep = factorization_check(op, &jets, k).unwrap();
            assert!(rep.equal(), "k={k}: {rep}");
        }
    }
}

#[test]
fn field_operators_factor_through_second_reduction() {
    for (vi, v) in field_valences().into_iter().enumerate() {
        for (s1, s2, r, k) in [(3, 3, 3, 1), (2, 3, 3, 2), (3, 2, 2, 3), (2, 2, 3, 2)] {
            let mut jets = seeded_jets(2, 2, s1, s2, Some((v.clone(), r)), 600 + vi as u64 * 7 + k as u64, 5);
            jets.phi = jets.phi.map(|p| p.project(r).unwrap());
            for op in OPERATORS.iter().filter(|o| o.natural && o.target_order <= k) {
                let rep = factorization_check(op, &jets, k).unwrap();
                assert!(rep.equal(), "valence {v} (s1,s2,r,k)=({s1},{s2},{r},{k}): {rep}");
            }
        }
    }
}

#[test]
fn natural_operators_are_equivariant() {
    let (s, r) = (3, 3);
    let (t1, t2) = group_orders(s, r);
    for seed in 0..3u64 {
        let jets = seeded_jets(2, 2, s, r, Some((Valence::standard(1, 0, 0, 1), 3)), 700 + seed, 5);
        let g = WGroupElement::random(2, 2, t1, t2, 800 + seed, 3);
        for op in OPERATORS.iter().filter(|o| o.natural) {
            let rep = equivariance_check(op, &jets, &g).unwrap();
            assert!(rep.equal(), "seed {seed}: {rep}");
        }
    }
}

#[test]
fn identity_group_element_is_trivially_equivariant() {
    let jets = seeded_jets(2, 1, 2, 2, Some((Valence::scalar(), 2)), 3, 5);
    let g = WGroupElement::identity(2, 1, 4, 3);
    for op in OPERATORS {
        assert!(equivariance_check(op, &jets, &g).unwrap().equal(), "{}", op.name);
    }
}

#[test]
fn probe_breaks_equivariance_under_kernel_element() {
    let jets = seeded_jets(2, 2, 3, 3, None, 41, 5);
    let (t1, t2) = group_orders(3, 3);
    let h = WGroupElement::random_kernel(2, 2, t1, t2, 1, 42, 3).unwrap();
    let rep = equivariance_check(&operator("rawK11").unwrap(), &jets, &h).unwrap();
    assert!(!rep.equal());
    assert!(rep.to_string().contains("residual != 0"));
}

#[test]
fn pinned_probe_outcomes_hold() {
    let cases = probe_manifest().unwrap();
    assert!(cases.iter().filter(|c| c.expect_differs).count() >= 10);
    for case in cases {
        let (ok, rep) = run_probe_case(&case).unwrap();
        assert!(ok, "{case:?}: {rep}");
    }
}

#[test]
fn primitive_recipes_match_engine() {
    let jets = seeded_jets(2, 2, 2, 2, None, 9, 5);
    let rk = evaluate(&operator("RK").unwrap(), &jets).unwrap();
    assert_eq!(&rk, formal_curvature_map_linear(None, &jets.k, 0).unwrap().value());
    let raw = evaluate(&operator("rawK11").unwrap(), &jets).unwrap();
    assert_eq!(
        raw.components()[0].constant_term(),
        &jets.k.jet_coordinate(0, 0, 0, &jetcalc_core::MultiIndex::new(vec![0, 0])).unwrap()
    );
}

#[test]
fn contraction_is_bilinear() {
    let lam = ClassicalConnectionJet::random(2, 2, 3, 5);
    let k = LinearConnectionJet::random(2, 2, 1, 4, 5);
    let w1 = formal_curvature_map_classical(&lam, 1).unwrap().value().clone();
    let u0 = formal_curvature_map_linear(None, &k, 0).unwrap().value().clone();
    let base = contract_nabla_rl_with_rk(&w1, &u0).unwrap();
    let left = contract_nabla_rl_with_rk(&w1.scale(&int(3)), &u0).unwrap();
    let right = contract_nabla_rl_with_rk(&w1, &u0.scale(&int(-2))).unwrap();
    assert_eq!(left, base.scale(&int(3)));
    assert_eq!(right, base.scale(&int(-2)));
    let sum = contract_nabla_rl_with_rk(&w1, &u0.checked_add(&u0.scale(&int(4))).unwrap()).unwrap();
    assert_eq!(sum, base.scale(&int(5)));
}

#[test]
fn flat_jets_give_zero_curvature_operators() {
    let jets = JetSet::new(
        ClassicalConnectionJet::zero(2, 3),
        LinearConnectionJet::zero(2, 2, 3),
        Some(TensorFieldJet::zero(2, 2, Valence::standard(1, 0, 0, 0), 2)),
    )
    .unwrap();
    for name in ["RK", "RL", "nablaRK", "nablaRL", "trR2", "ricciL", "nablaRLxRK", "RPhi"] {
        let op = operator(name).unwrap();
        assert!(evaluate(&op, &jets).unwrap().is_zero(), "{name}");
        assert!(factorization_check(&op, &jets, 2).unwrap().equal());
    }
}

#[test]
fn order_mismatch_is_an_error() {
    let jets = seeded_jets(2, 2, 1, 1, None, 1, 5);
    assert!(evaluate(&operator("nablaRL").unwrap(), &jets).is_err());
    assert!(evaluate(&operator("PhiVal").unwrap(), &jets).is_err());
    assert!(operator("nope").is_err());
}

use jetcalc_core::connection::{symmetrize_classical, symmetrize_linear};
use jetcalc_core::group::{act_on_classical, act_on_linear, act_on_tensor};
use jetcalc_core::reduction::{
    c_space_membership, canonicalize, group_orders, orbit_solve, reconstruct_first, reconstruct_first_with,
    reconstruct_second, reconstruct_second_with_report, reduce_first, reduce_second, ricci_equation_residuals,
};
use jetcalc_core::scalar::int;
use jetcalc_core::{ClassicalConnectionJet, JetError, LinearConnectionJet, TensorFieldJet, Valence, WGroupElement};
use proptest::prelude::*;

fn pair(m: usize, n: usize, s: usize, r: usize, seed: u64) -> (ClassicalConnectionJet, LinearConnectionJet) {
    (
        ClassicalConnectionJet::random(m, s, seed, 5),
        LinearConnectionJet::random(m, n, r, seed + 1, 5),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reduce_after_reconstruct_is_identity(seed in 0u64..100_000, k in 1usize..=3) {
        let (lam, kj) = pair(2, 2, 3, 3, seed);
        let d = reduce_first(&lam, &kj, k).unwrap();
        let (l2, k2, trace) = reconstruct_first_with(&d, None, None).unwrap();
        prop_assert!(trace.iter().all(|r| r.full_rank()));
        prop_assert_eq!(reduce_first(&l2, &k2, k).unwrap(), d);
    }

    #[test]
    fn reduction_is_kernel_invariant(seed in 0u64..100_000, k in 1usize..=3) {
        let (lam, kj) = pair(2, 2, 2, 3, seed);
        let (t1, t2) = group_orders(2, 3);
        let h = WGroupElement::random_kernel(2, 2, t1, t2, k, seed + 5, 3).unwrap();
        let moved = reduce_first(&act_on_classical(&h, &lam).unwrap(), &act_on_linear(&h, &kj).unwrap(), k).unwrap();
        prop_assert_eq!(moved, reduce_first(&lam, &kj, k).unwrap());
    }

    #[test]
    fn prescribed_symmetric_parts_recover_the_jet(seed in 0u64..100_000, k in 1usize..=3) {
        let (lam, kj) = pair(2, 1, 3, 2, seed);
        let d = reduce_first(&lam, &kj, k).unwrap();
        let (l2, k2, _) =
            reconstruct_first_with(&d, Some(&symmetrize_classical(&lam)), Some(&symmetrize_linear(&kj))).unwrap();
        prop_assert_eq!(l2, lam);
        prop_assert_eq!(k2, kj);
    }

    #[test]
    fn orbit_solver_finds_the_kernel_element(seed in 0u64..100_000, k in 1usize..=2) {
        let (lam, kj) = pair(2, 2, 2, 2, seed);
        let (t1, t2) = group_orders(2, 2);
        let h = WGroupElement::random_kernel(2, 2, t1, t2, k, seed + 9, 3).unwrap();
        let (l2, k2) = (act_on_classical(&h, &lam).unwrap(), act_on_linear(&h, &kj).unwrap());
        let found = orbit_solve((&l2, &k2), (&lam, &kj), k).unwrap().expect("same orbit");
        prop_assert_eq!(act_on_classical(&found, &lam).unwrap(), l2);
        prop_assert_eq!(act_on_linear(&found, &kj).unwrap(), k2);
    }
}

#[test]
fn canonical_representative_matches_reconstruction() {
    for (m, n, s, r, k) in [(2, 2, 3, 3, 1), (2, 2, 3, 3, 2), (3, 2, 2, 2, 2), (2, 1, 2, 3, 3)] {
        let (lam, kj) = pair(m, n, s, r, 70 + k as u64);
        let (h, lc, kc) = canonicalize(&lam, &kj, k).unwrap();
        assert!(h.project(k, k).unwrap().is_identity() || k == 1);
        let (lr, kr) = reconstruct_first(&reduce_first(&lam, &kj, k).unwrap()).unwrap();
        assert_eq!(lc, lr, "m={m} s={s} r={r} k={k}");
        assert_eq!(kc, kr);
        assert_eq!(act_on_classical(&h, &lam).unwrap(), lc);
    }
}

#[test]
fn different_orbits_are_separated() {
    let (l1, k1) = pair(2, 2, 2, 2, 1);
    let (l2, k2) = pair(2, 2, 2, 2, 2);
    assert!(orbit_solve((&l1, &k1), (&l2, &k2), 2).unwrap().is_none());
}

#[test]
fn broken_first_bianchi_is_rejected() {
    let (lam, kj) = pair(3, 2, 2, 2, 11);
    let mut d = reduce_first(&lam, &kj, 1).unwrap();
    assert!(c_space_membership(&d).unwrap());
    let w0 = d.w[0].value_mut();
    for (idx, v) in [([0, 1, 1, 2], 1), ([0, 1, 2, 1], -1)] {
        let c = w0.component(&idx).constant_term() + int(v);
        w0.set_jet_coordinate(&idx, &jetcalc_core::MultiIndex::empty(), c).unwrap();
    }
    match reconstruct_first(&d) {
        Err(JetError::NotMember { stage, order }) => {
            assert_eq!(stage, "classical curvature");
            assert_eq!(order, 0);
        }
        other => panic!("expected rejection, got {other:?}"),
    }
    assert!(!c_space_membership(&d).unwrap());
}

#[test]
fn broken_linear_bianchi_is_rejected_at_its_order() {
    let (lam, kj) = pair(3, 2, 2, 3, 12);
    let mut d = reduce_first(&lam, &kj, 1).unwrap();
    let u1 = d.u[1].value_mut();
    for (idx, v) in [([0, 1, 0, 1, 2], 2), ([0, 1, 1, 0, 2], -2)] {
        let c = u1.component(&idx).constant_term() + int(v);
        u1.set_jet_coordinate(&idx, &jetcalc_core::MultiIndex::empty(), c).unwrap();
    }
    assert_eq!(
        reconstruct_first(&d),
        Err(JetError::NotMember {
            stage: "linear curvature".into(),
            order: 1
        })
    );
}

#[test]
fn asymmetric_curvature_entry_is_rejected() {
    let (lam, kj) = pair(2, 2, 2, 2, 13);
    let mut d = reduce_first(&lam, &kj, 2).unwrap();
    let u = d.u[0].value_mut();
    u.set_jet_coordinate(&[0, 0, 0, 0, 1], &jetcalc_core::MultiIndex::empty(), int(1)).unwrap();
    assert!(matches!(reconstruct_first(&d), Err(JetError::NotMember { order: 1, .. })));
}

#[test]
fn boundary_orders_leave_only_low_jets() {
    for k in 2..=4 {
        let (lam, kj) = pair(2, 2, k - 2, k - 1, 20 + k as u64);
        let d = reduce_first(&lam, &kj, k).unwrap();
        assert!(d.w.is_empty() && d.u.is_empty(), "k={k}");
        let (l2, k2) = reconstruct_first(&d).unwrap();
        assert_eq!((l2, k2), (lam, kj));
    }
}

#[test]
fn bad_orders_are_refused() {
    let (lam, kj) = pair(2, 2, 0, 3, 1);
    assert!(matches!(reduce_first(&lam, &kj, 1), Err(JetError::Precondition(_))));
    let (lam, kj) = pair(2, 2, 3, 1, 1);
    assert!(matches!(reduce_first(&lam, &kj, 3), Err(JetError::Precondition(_))));
    assert!(matches!(reduce_first(&lam, &kj, 0), Err(JetError::Precondition(_))));
}

fn triple(seed: u64, valence: Valence) -> (ClassicalConnectionJet, LinearConnectionJet, TensorFieldJet) {
    (
        ClassicalConnectionJet::random(2, 2, seed, 4),
        LinearConnectionJet::random(2, 2, 2, seed + 1, 4),
        TensorFieldJet::random(2, 2, valence, 3, seed + 2, 4),
    )
}

#[test]
fn second_reduction_round_trip_and_invariance() {
    let valences = [Valence::scalar(), Valence::standard(1, 0, 0, 0), Valence::standard(0, 1, 0, 1)];
    for (vi, v) in valences.into_iter().enumerate() {
        for k in 1..=3 {
            let seed = 100 + 10 * vi as u64 + k as u64;
            let (lam, kj, phi) = triple(seed, v.clone());
            let d = reduce_second(&lam, &kj, &phi, k).unwrap();
            assert!(ricci_equation_residuals(&d).unwrap().iter().all(|r| r.residual.is_zero()));
            let (l2, k2, p2, trace) = reconstruct_second_with_report(&d).unwrap();
            assert!(trace.iter().all(|r| r.full_rank()));
            assert_eq!(reduce_second(&l2, &k2, &p2, k).unwrap(), d, "valence {v} k={k}");

            let (t1, t2) = group_orders(2, 2);
            let h = WGroupElement::random_kernel(2, 2, t1, t2, k, seed + 3, 3).unwrap();
            let moved = reduce_second(
                &act_on_classical(&h, &lam).unwrap(),
                &act_on_linear(&h, &kj).unwrap(),
                &act_on_tensor(&h, &phi).unwrap(),
                k,
            )
            .unwrap();
            assert_eq!(moved, d, "kernel invariance valence {v} k={k}");
        }
    }
}

#[test]
fn perturbed_field_differential_fails_ricci_equations() {
    let (lam, kj, phi) = triple(7, Valence::standard(1, 0, 0, 0));
    let mut d = reduce_second(&lam, &kj, &phi, 1).unwrap();
    let v2 = &mut d.phi_diffs[1];
    let c = v2.component(&[1, 0, 1]).constant_term() + int(1);
    v2.set_jet_coordinate(&[1, 0, 1], &jetcalc_core::MultiIndex::empty(), c).unwrap();
    let res = ricci_equation_residuals(&d).unwrap();
    assert!(res.iter().any(|r| r.i == 2 && r.j == 1 && !r.residual.is_zero()));
    assert_eq!(
        reconstruct_second(&d),
        Err(JetError::NotMember {
            stage: "Ricci equations".into(),
            order: 2
        })
    );
}

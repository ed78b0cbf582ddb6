use jetcalc_core::covariant::formal_curvature_map_linear;
use jetcalc_core::io::{decode, encode, Document};
use jetcalc_core::operators::seeded_jets;
use jetcalc_core::reduction::{reconstruct_first, reconstruct_second, reduce_first, reduce_second};
use jetcalc_core::tensor::{SlotGroup, SymmetryKind};
use jetcalc_core::{ClassicalConnectionJet, JetError, LinearConnectionJet, SlotKind, TensorFieldJet, Valence, WGroupElement};
use proptest::prelude::*;

fn round_trip(doc: Document) {
    let text = encode(&doc);
    let back = decode(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(back, doc);
    assert_eq!(encode(&back), text);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn every_core_type_round_trips(seed in 0u64..50_000) {
        round_trip(Document::Classical(ClassicalConnectionJet::random(2, 2, seed, 7)));
        round_trip(Document::Linear(LinearConnectionJet::random(3, 2, 1, seed, 7)));
        let sym = Valence::new(
            vec![SlotKind::FiberUp, SlotKind::BaseDown, SlotKind::BaseDown],
            0,
            vec![SlotGroup { kind: SymmetryKind::Antisymmetric, slots: vec![1, 2] }],
        )
        .unwrap();
        round_trip(Document::Tensor(TensorFieldJet::random(2, 2, sym, 2, seed, 7)));
        round_trip(Document::Group(WGroupElement::random(2, 2, 3, 2, seed, 4)));
        let jets = seeded_jets(2, 2, 2, 2, Some((Valence::standard(1, 0, 0, 1), 2)), seed, 5);
        round_trip(Document::Curvature(formal_curvature_map_linear(Some(&jets.lambda), &jets.k, 1).unwrap()));
        round_trip(Document::ReducedFirst(reduce_first(&jets.lambda, &jets.k, 2).unwrap()));
        round_trip(Document::ReducedFirst(reduce_first(&jets.lambda, &jets.k, 1).unwrap()));
        let phi = jets.phi.clone().unwrap();
        round_trip(Document::ReducedSecond(reduce_second(&jets.lambda, &jets.k, &phi, 1).unwrap()));
        round_trip(Document::Jets(jets));
    }
}

#[test]
fn reduce_reconstruct_reduce_is_byte_identical() {
    let jets = seeded_jets(2, 2, 3, 3, None, 77, 5);
    let d1 = encode(&Document::ReducedFirst(reduce_first(&jets.lambda, &jets.k, 2).unwrap()));
    let Document::ReducedFirst(d) = decode(&d1).unwrap() else { panic!() };
    let (l, k) = reconstruct_first(&d).unwrap();
    let d2 = encode(&Document::ReducedFirst(reduce_first(&l, &k, 2).unwrap()));
    assert_eq!(d1, d2);

    let jets = seeded_jets(2, 1, 2, 2, Some((Valence::standard(1, 1, 0, 0), 3)), 78, 5);
    let phi = jets.phi.clone().unwrap();
    let e1 = encode(&Document::ReducedSecond(reduce_second(&jets.lambda, &jets.k, &phi, 2).unwrap()));
    let Document::ReducedSecond(d) = decode(&e1).unwrap() else { panic!() };
    let (l, k, p) = reconstruct_second(&d).unwrap();
    assert_eq!(e1, encode(&Document::ReducedSecond(reduce_second(&l, &k, &p, 2).unwrap())));
}

#[test]
fn broken_connection_symmetry_is_rejected() {
    let text = "jetcalc 1\nbegin classical m=2 order=0\nL[1,1,2|] 1/2\nend\n";
    match decode(text) {
        Err(JetError::Format { path, message, .. }) => {
            assert_eq!(path, "classical");
            assert!(message.contains("symmetry"), "{message}");
        }
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn unknown_version_is_rejected() {
    let text = "jetcalc 2\nbegin classical m=2 order=0\nend\n";
    assert!(matches!(decode(text), Err(JetError::Format { line: 1, .. })));
    assert!(decode("begin classical m=2 order=0\nend\n").is_err());
}

#[test]
fn diagnostics_point_at_the_offending_line() {
    let jets = seeded_jets(2, 2, 1, 1, None, 5, 5);
    let text = encode(&Document::Jets(jets));
    let lines: Vec<&str> = text.lines().collect();
    let target = lines.iter().position(|l| l.starts_with("K[")).unwrap();
    let mut broken: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    broken[target] = "K[1,1,3|] 1".into();
    match decode(&broken.join("\n")) {
        Err(JetError::Format { line, path, .. }) => {
            assert_eq!(line, target + 1);
            assert_eq!(path, "jets/linear#2");
        }
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn malformed_entries_are_rejected() {
    for body in ["L[1,1,1] 1", "L[1,1,1|] x", "L[0,1,1|] 1", "L[1,1,1|2,1] 1", "Q[1,1,1|] 1", "L[1,1,1|] 1\nL[1,1,1|] 2"] {
        let text = format!("jetcalc 1\nbegin classical m=2 order=1\n{body}\nend\n");
        assert!(matches!(decode(&text), Err(JetError::Format { .. })), "{body}");
    }
    assert!(decode("jetcalc 1\nbegin classical m=2 order=1\n").is_err());
}

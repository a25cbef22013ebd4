use ecsy_core::consequence::{weaker_than, Corpus, Fuel};
use ecsy_core::fibring::{check_conservation, check_symmetry, FibringSession, Side};
use ecsy_core::report::Status;
use ecsy_core::{fixtures, parse_formula_set};
use proptest::prelude::*;

#[test]
fn conservation_on_shallow_corpora() {
    let fuel = Fuel::default();
    let (cpl, conj) = (fixtures::cpl(), fixtures::conj());
    let s = FibringSession::open(&cpl, &conj, fuel).unwrap();
    let left = Corpus::new(cpl.signature(), 2, 2).unwrap();
    let right = Corpus::new(conj.signature(), 2, 2).unwrap();
    for (side, corpus) in [(Side::Left, &left), (Side::Right, &right)] {
        let line = check_conservation(&s, side, corpus, &fuel).unwrap();
        assert_eq!(line.status, Status::Pass, "{line}");
    }
}

#[test]
fn order_of_the_inputs_does_not_matter() {
    let (cpl, conj) = (fixtures::cpl(), fixtures::conj());
    let union = cpl.signature().union(conj.signature());
    let corpus = Corpus::new(&union, 2, 1).unwrap();
    let line = check_symmetry(&cpl, &conj, &corpus, &Fuel::default()).unwrap();
    assert_eq!(line.status, Status::Pass, "{line}");
}

#[test]
fn inputs_are_weaker_than_the_fibring() {
    let fuel = Fuel::default();
    let (imp, conj) = (fixtures::imp_fragment(), fixtures::conj());
    let s = FibringSession::open(&imp, &conj, fuel).unwrap();
    let e = weaker_than(&conj, &s, 2, &fuel).unwrap();
    assert!(e.full.is_verified(), "{}", e.full);
    let e = weaker_than(&imp, &s, 2, &fuel).unwrap();
    assert!(e.full.is_verified(), "{}", e.full);
}

const PREMISES: &[&str] = &["and(x1, x2)", "imp(x1, x3)", "imp(x3, and(x2, x2))", "x2", "and(imp(x1, x2), x1)"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alternating_sequence_grows(picks in proptest::sample::subsequence(PREMISES.to_vec(), 0..=3)) {
        let (cpl, conj) = (fixtures::cpl(), fixtures::conj());
        let s = FibringSession::open(&cpl, &conj, Fuel::default()).unwrap();
        let gamma = parse_formula_set(&picks.join(", "), s.union_signature()).unwrap();
        let stages = s.fibred_sequence(&gamma, &Fuel::default().with_rounds(3)).unwrap();
        for g in &gamma {
            prop_assert!(stages[0].contains(g));
        }
        for w in stages.windows(2) {
            prop_assert!(w[0].iter().all(|f| w[1].contains(f)));
        }
    }
}

mod common;

use common::{all_words, arb_binary_transducer, arb_dfa_with_output, arb_transducer, word, Raw};
use fsmkit::automata::minimize;
use fsmkit::transducer::{cartesian_product, compose, output_projection, simplify, with_final_word_out};
use fsmkit::{Machine, Symbol, Word};
use proptest::prelude::*;

fn run(m: &Machine, x: &[i64]) -> Option<Word> {
    let r = m.process(&word(x)).unwrap();
    r.accepted.then_some(r.output)
}

fn expected(raw: &Raw, x: &[i64]) -> Option<Word> {
    raw.transduce(x).map(|o| word(&o))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn built_transducer_matches_reference(raw in arb_transducer()) {
        let t = raw.transducer();
        for x in all_words(&common::LETTERS, 6) {
            prop_assert_eq!(run(&t, &x), expected(&raw, &x));
        }
    }

    #[test]
    fn composition_is_sequential_application(outer in arb_binary_transducer(), inner in arb_binary_transducer()) {
        let c = compose(&outer.transducer(), &inner.transducer()).unwrap();
        prop_assert!(c.is_deterministic());
        for x in all_words(&common::LETTERS, 6) {
            let two_stage = inner.transduce(&x).and_then(|y| outer.transduce(&y)).map(|o| word(&o));
            prop_assert_eq!(run(&c, &x), two_stage, "{:?}", x);
        }
    }

    #[test]
    fn product_zips_outputs(
        a in arb_dfa_with_output(3, 1, 1, -1, 1),
        b in arb_dfa_with_output(3, 1, 1, -1, 1),
    ) {
        let p = cartesian_product(&a.transducer(), &b.transducer()).unwrap();
        for x in all_words(&common::LETTERS, 5) {
            let zipped = match (a.transduce(&x), b.transduce(&x)) {
                (Some(l), Some(r)) => {
                    let len = l.len().max(r.len());
                    let cell = |v: &[i64], i: usize| v.get(i).map_or(Symbol::Absent, |&d| Symbol::Digit(d));
                    Some((0..len).map(|i| Symbol::pair(cell(&l, i), cell(&r, i))).collect::<Word>())
                }
                _ => None,
            };
            prop_assert_eq!(run(&p, &x), zipped, "{:?}", x);
        }
    }

    #[test]
    fn projection_accepts_exactly_the_outputs(raw in arb_dfa_with_output(3, 1, 2, -1, 1)) {
        // Every transition writes, so an output of length n comes from an
        // input of length at most n.
        let n = 4;
        let outputs: std::collections::BTreeSet<Vec<i64>> =
            all_words(&common::LETTERS, n).iter().filter_map(|x| raw.transduce(x)).collect();
        let proj = minimize(&output_projection(&raw.transducer()).unwrap()).unwrap();
        for y in all_words(&[-1, 0, 1], n) {
            prop_assert_eq!(proj.accepts(&word(&y)), outputs.contains(&y), "{:?}", y);
        }
    }

    #[test]
    fn simplify_preserves_behavior(raw in arb_transducer()) {
        let t = raw.transducer();
        let s = simplify(&t).unwrap();
        prop_assert!(s.len() <= t.accessible().len().max(1));
        prop_assert_eq!(simplify(&s).unwrap(), s.clone());
        for x in all_words(&common::LETTERS, 6) {
            prop_assert_eq!(run(&s, &x), expected(&raw, &x));
        }
    }

    #[test]
    fn final_word_out_pads_with_the_letter(raw in arb_transducer()) {
        let Ok(t) = with_final_word_out(&raw.transducer(), &Symbol::Digit(0)) else {
            // No final state reachable by padding: nothing to compare.
            return Ok(());
        };
        for x in all_words(&common::LETTERS, 5) {
            // Reference: append zeros until a final state is reached, at
            // most once around every state.
            let padded = (0..=raw.states).find_map(|k| {
                let mut y = x.clone();
                y.extend(std::iter::repeat_n(0, k));
                raw.transduce(&y)
            });
            prop_assert_eq!(run(&t, &x), padded.map(|o| word(&o)), "{:?}", x);
        }
    }
}

#[test]
fn composition_blocking_is_an_error() {
    // The outer machine has no transition on 1.
    let outer = fsmkit::machine::MachineBuilder::transducer([Symbol::Digit(0), Symbol::Digit(1)])
        .transition("a", "a", word(&[0]), word(&[0]))
        .initial("a")
        .final_state("a")
        .build()
        .unwrap();
    let inner = fsmkit::transducer::identity_transducer(&[Symbol::Digit(0), Symbol::Digit(1)]).unwrap();
    assert!(matches!(compose(&outer, &inner), Err(fsmkit::FsmError::CompositionBlocked { .. })));
}

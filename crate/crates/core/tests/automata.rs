mod common;

use std::collections::BTreeMap;

use common::{all_words, arb_dfa, arb_nfa, Raw};
use fsmkit::automata::{
    complement, concat, count_words, determinize, intersection, is_equivalent, kleene_star, language, minimize, union,
    word_count_recurrence,
};
use fsmkit::{Machine, Rational, Symbol, Word};
use num_bigint::BigUint;
use proptest::prelude::*;

const MAX_LEN: usize = 6;

fn w(ds: &[i64]) -> Word {
    Word::digits(ds)
}

/// Words of length at most `max_len` up to which all states of `m` are
/// pairwise distinguishable, via residual signatures.
fn residual_signatures(m: &Machine, max_len: usize) -> Vec<Vec<bool>> {
    let runner = m.runner().unwrap();
    let words = all_words(&common::LETTERS, max_len);
    m.state_ids()
        .map(|s| {
            words
                .iter()
                .map(|word| {
                    let mut cur = Some(s);
                    for &d in word {
                        cur = cur.and_then(|c| runner.step(c, &Symbol::Digit(d)).map(|(n, _)| n));
                    }
                    cur.is_some_and(|c| m.state(c).is_final)
                })
                .collect()
        })
        .collect()
}

fn split_member(word: &[i64], left: &dyn Fn(&[i64]) -> bool, right: &dyn Fn(&[i64]) -> bool) -> bool {
    (0..=word.len()).any(|i| left(&word[..i]) && right(&word[i..]))
}

fn star_member(word: &[i64], inner: &dyn Fn(&[i64]) -> bool) -> bool {
    let n = word.len();
    let mut ok = vec![false; n + 1];
    ok[0] = true;
    for j in 1..=n {
        ok[j] = (0..j).any(|i| ok[i] && inner(&word[i..j]));
    }
    ok[n]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinize_preserves_language(raw in arb_nfa()) {
        let d = determinize(&raw.automaton()).unwrap();
        prop_assert!(d.is_deterministic());
        for word in all_words(&common::LETTERS, MAX_LEN) {
            prop_assert_eq!(d.accepts(&w(&word)), raw.accepts(&word), "{:?}", word);
        }
    }

    #[test]
    fn minimize_is_minimal_and_idempotent(raw in arb_nfa()) {
        let m = minimize(&raw.automaton()).unwrap();
        prop_assert!(m.is_deterministic() && m.is_complete());
        prop_assert_eq!(minimize(&m).unwrap(), m.clone());
        for word in all_words(&common::LETTERS, MAX_LEN) {
            prop_assert_eq!(m.accepts(&w(&word)), raw.accepts(&word));
        }
        // Every state is reachable and any two states have different
        // residual languages; words up to length n - 1 suffice.
        prop_assert_eq!(m.accessible().len(), m.len());
        let sigs = residual_signatures(&m, m.len().saturating_sub(1).max(1));
        for i in 0..sigs.len() {
            for j in i + 1..sigs.len() {
                prop_assert_ne!(&sigs[i], &sigs[j]);
            }
        }
    }

    #[test]
    fn boolean_operations(a in arb_nfa(), b in arb_nfa()) {
        let (ma, mb) = (a.automaton(), b.automaton());
        let not_a = complement(&ma).unwrap();
        let both = intersection(&ma, &mb).unwrap();
        let either = union(&ma, &mb).unwrap();
        for word in all_words(&common::LETTERS, MAX_LEN) {
            let x = w(&word);
            prop_assert_eq!(not_a.accepts(&x), !a.accepts(&word));
            prop_assert_eq!(both.accepts(&x), a.accepts(&word) && b.accepts(&word));
            prop_assert_eq!(either.accepts(&x), a.accepts(&word) || b.accepts(&word));
        }
    }

    #[test]
    fn concatenation_and_star(a in arb_nfa(), b in arb_nfa()) {
        let (ma, mb) = (a.automaton(), b.automaton());
        let ab = concat(&ma, &mb).unwrap();
        let star = kleene_star(&ma).unwrap();
        let la = |x: &[i64]| a.accepts(x);
        let lb = |x: &[i64]| b.accepts(x);
        for word in all_words(&common::LETTERS, 5) {
            let x = w(&word);
            prop_assert_eq!(ab.accepts(&x), split_member(&word, &la, &lb), "{:?}", word);
            prop_assert_eq!(star.accepts(&x), star_member(&word, &la), "{:?}", word);
        }
    }

    #[test]
    fn equivalence_matches_enumeration(a in arb_dfa(), b in arb_dfa()) {
        // Distinct DFA languages differ on a word shorter than n_a + n_b.
        let bound = a.states + b.states;
        let same = all_words(&common::LETTERS, bound).iter().all(|x| a.accepts(x) == b.accepts(x));
        prop_assert_eq!(is_equivalent(&a.automaton(), &b.automaton()).unwrap(), same);
        prop_assert!(is_equivalent(&a.automaton(), &minimize(&a.automaton()).unwrap()).unwrap());
    }

    #[test]
    fn counting_and_listing(raw in arb_nfa()) {
        let m = raw.automaton();
        let words = all_words(&common::LETTERS, MAX_LEN);
        let mut by_length: BTreeMap<usize, usize> = BTreeMap::new();
        let mut accepted = Vec::new();
        for x in &words {
            if raw.accepts(x) {
                *by_length.entry(x.len()).or_default() += 1;
                accepted.push(w(x));
            }
        }
        for n in 0..=MAX_LEN {
            let expected = by_length.get(&n).copied().unwrap_or(0);
            prop_assert_eq!(count_words(&m, n).unwrap(), BigUint::from(expected));
        }
        accepted.sort_by(|x, y| x.shortlex_cmp(y));
        let listed: Vec<Word> = language(&m, MAX_LEN).unwrap().collect();
        prop_assert_eq!(listed, accepted);

        let rec = word_count_recurrence(&m).unwrap();
        let terms = rec.terms(10);
        for (n, t) in terms.iter().enumerate() {
            let c = count_words(&m, n).unwrap();
            prop_assert_eq!(t.clone(), Rational::from_integer(c.into()));
        }
    }
}

#[test]
fn recurrence_of_naf_language() {
    let a = fsmkit::digits::build_naf_acceptor().unwrap();
    let rec = word_count_recurrence(&a).unwrap();
    assert_eq!(rec.order(), 2);
    let mut roots = rec.rational_roots();
    roots.sort();
    assert_eq!(roots, vec![Rational::from_integer((-1).into()), Rational::from_integer(2.into())]);
}

#[test]
fn random_machines_are_well_formed() {
    let raw = Raw {
        states: 2,
        initial: 0,
        finals: vec![false, true],
        final_outputs: vec![vec![], vec![]],
        transitions: vec![(0, 1, Some(1), vec![]), (1, 1, None, vec![])],
    };
    let m = raw.automaton();
    assert!(m.accepts(&w(&[1])) && raw.accepts(&[1]));
    assert!(!m.accepts(&w(&[0])) && !raw.accepts(&[0]));
}

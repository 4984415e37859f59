//! Random machines and independent reference simulators for the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use fsmkit::machine::MachineBuilder;
use fsmkit::{Machine, Symbol, Word};
use proptest::prelude::*;

pub const LETTERS: [i64; 2] = [0, 1];

pub fn alphabet() -> Vec<Symbol> {
    LETTERS.iter().copied().map(Symbol::Digit).collect()
}

/// A machine as plain data; `None` input marks an epsilon transition.
#[derive(Debug, Clone)]
pub struct Raw {
    pub states: usize,
    pub initial: usize,
    pub finals: Vec<bool>,
    pub final_outputs: Vec<Vec<i64>>,
    pub transitions: Vec<(usize, usize, Option<i64>, Vec<i64>)>,
}

impl Raw {
    pub fn automaton(&self) -> Machine {
        let mut b = MachineBuilder::automaton(alphabet());
        for s in 0..self.states {
            b = b.state(&format!("q{s}"));
        }
        b = b.initial(&format!("q{}", self.initial));
        for (s, &f) in self.finals.iter().enumerate() {
            if f {
                b = b.final_state(&format!("q{s}"));
            }
        }
        for (from, to, input, _) in &self.transitions {
            let input = input.map_or_else(Word::empty, |d| Word::digits(&[d]));
            b = b.transition(&format!("q{from}"), &format!("q{to}"), input, Word::empty());
        }
        b.build().expect("valid random automaton")
    }

    pub fn transducer(&self) -> Machine {
        let mut b = MachineBuilder::transducer(alphabet());
        for s in 0..self.states {
            b = b.state(&format!("q{s}"));
        }
        b = b.initial(&format!("q{}", self.initial));
        for (s, &f) in self.finals.iter().enumerate() {
            if f {
                b = b.final_output(&format!("q{s}"), Word::digits(&self.final_outputs[s]));
            }
        }
        for (from, to, input, output) in &self.transitions {
            let input = input.map_or_else(Word::empty, |d| Word::digits(&[d]));
            b = b.transition(&format!("q{from}"), &format!("q{to}"), input, Word::digits(output));
        }
        b.build().expect("valid random transducer")
    }

    fn closure(&self, mut set: BTreeSet<usize>) -> BTreeSet<usize> {
        loop {
            let more: BTreeSet<usize> = self
                .transitions
                .iter()
                .filter(|t| t.2.is_none() && set.contains(&t.0))
                .map(|t| t.1)
                .collect();
            if more.is_subset(&set) {
                return set;
            }
            set.extend(more);
        }
    }

    /// Subset simulation, independent of the library.
    pub fn accepts(&self, word: &[i64]) -> bool {
        let mut current = self.closure(BTreeSet::from([self.initial]));
        for &d in word {
            let next = self
                .transitions
                .iter()
                .filter(|t| t.2 == Some(d) && current.contains(&t.0))
                .map(|t| t.1)
                .collect();
            current = self.closure(next);
        }
        current.iter().any(|&s| self.finals[s])
    }

    /// Deterministic run with final output; `None` if blocked or rejected.
    pub fn transduce(&self, word: &[i64]) -> Option<Vec<i64>> {
        let mut state = self.initial;
        let mut out = Vec::new();
        for &d in word {
            let t = self.transitions.iter().find(|t| t.0 == state && t.2 == Some(d))?;
            out.extend_from_slice(&t.3);
            state = t.1;
        }
        if !self.finals[state] {
            return None;
        }
        out.extend_from_slice(&self.final_outputs[state]);
        Some(out)
    }
}

pub fn all_words(alphabet: &[i64], max_len: usize) -> Vec<Vec<i64>> {
    let mut result = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<i64>| {
                alphabet.iter().map(move |&d| {
                    let mut v = w.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
        result.extend(layer.iter().cloned());
    }
    result
}

/// Nondeterministic automaton with epsilon transitions over {0, 1}.
pub fn arb_nfa() -> impl Strategy<Value = Raw> {
    (1usize..=4).prop_flat_map(|n| {
        let transition = (0..n, 0..n, prop_oneof![3 => (0i64..2).prop_map(Some), 1 => Just(None)]);
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(transition, 0..=3 * n),
        )
            .prop_map(move |(finals, ts)| {
                let mut transitions: Vec<(usize, usize, Option<i64>, Vec<i64>)> =
                    ts.into_iter().map(|(f, t, i)| (f, t, i, Vec::new())).collect();
                transitions.sort();
                transitions.dedup();
                Raw {
                    states: n,
                    initial: 0,
                    finals,
                    final_outputs: vec![Vec::new(); n],
                    transitions,
                }
            })
    })
}

/// Complete deterministic machine over {0, 1}; transitions write words of
/// length `min_out..=max_out` over the digits `lo..=hi`.
pub fn arb_dfa_with_output(max_states: usize, min_out: usize, max_out: usize, lo: i64, hi: i64) -> impl Strategy<Value = Raw> {
    (1usize..=max_states).prop_flat_map(move |n| {
        let word = proptest::collection::vec(lo..=hi, min_out..=max_out);
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(proptest::collection::vec(lo..=hi, 0..=2), n),
            proptest::collection::vec((0..n, word), 2 * n),
        )
            .prop_map(move |(finals, final_outputs, targets)| {
                let transitions = targets
                    .into_iter()
                    .enumerate()
                    .map(|(k, (to, out))| (k / 2, to, Some(LETTERS[k % 2]), out))
                    .collect();
                Raw {
                    states: n,
                    initial: 0,
                    finals,
                    final_outputs,
                    transitions,
                }
            })
    })
}

pub fn arb_dfa() -> impl Strategy<Value = Raw> {
    arb_dfa_with_output(5, 0, 0, 0, 1)
}

/// Signed-digit output, possibly empty per transition.
pub fn arb_transducer() -> impl Strategy<Value = Raw> {
    arb_dfa_with_output(4, 0, 2, -1, 1)
}

/// Binary output, so that it can feed another machine over {0, 1}.
pub fn arb_binary_transducer() -> impl Strategy<Value = Raw> {
    arb_dfa_with_output(4, 0, 2, 0, 1)
}

pub fn word(ds: &[i64]) -> Word {
    Word::digits(ds)
}

//! Transducer constructions: transition-function exploration, prebuilt
//! letterwise transducers, products, composition, output projection,
//! final-output completion and simplification.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Display;
use std::hash::Hash;

use crate::automata::{fresh_label, quotient};
use crate::error::{FsmError, Result};
use crate::machine::{Kind, Machine, State, StateId, Transition};
use crate::symbol::{Symbol, Word};

pub const DEFAULT_STATE_CAP: usize = 10_000;

/// A transducer given by its transition function: from a state label and an
/// input letter, the next state label and the output word. Labels are
/// displayed with [`Display`], so distinct labels must display differently.
pub struct TransitionFunction<L, F> {
    pub function: F,
    pub initial: Vec<L>,
    pub finals: Vec<L>,
    pub alphabet: Vec<Symbol>,
    pub state_cap: usize,
}

impl<L, F> TransitionFunction<L, F>
where
    L: Clone + Eq + Hash + Display,
    F: Fn(&L, &Symbol) -> (L, Word),
{
    pub fn new(function: F, initial: Vec<L>, finals: Vec<L>, alphabet: Vec<Symbol>) -> Self {
        TransitionFunction {
            function,
            initial,
            finals,
            alphabet,
            state_cap: DEFAULT_STATE_CAP,
        }
    }

    pub fn with_state_cap(mut self, cap: usize) -> Self {
        self.state_cap = cap;
        self
    }

    pub fn build(&self) -> Result<Machine> {
        from_transition_function(self)
    }
}

/// Breadth-first exploration of a transition function from its initial
/// labels, adding a transition for every letter of every reached state.
pub fn from_transition_function<L, F>(tf: &TransitionFunction<L, F>) -> Result<Machine>
where
    L: Clone + Eq + Hash + Display,
    F: Fn(&L, &Symbol) -> (L, Word),
{
    if tf.alphabet.is_empty() {
        return Err(FsmError::EmptyAlphabet);
    }
    let mut alphabet = tf.alphabet.clone();
    alphabet.sort();
    alphabet.dedup();
    let mut index: HashMap<L, usize> = HashMap::new();
    let mut labels: Vec<L> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |label: &L, labels: &mut Vec<L>, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(&i) = index.get(label) {
            return Ok(i);
        }
        if labels.len() >= tf.state_cap {
            return Err(FsmError::StateCapExceeded(tf.state_cap));
        }
        labels.push(label.clone());
        index.insert(label.clone(), labels.len() - 1);
        queue.push_back(labels.len() - 1);
        Ok(labels.len() - 1)
    };
    for label in &tf.initial {
        intern(label, &mut labels, &mut queue)?;
    }
    let mut transitions = Vec::new();
    while let Some(k) = queue.pop_front() {
        let from = labels[k].clone();
        for a in &alphabet {
            let (to, output) = (tf.function)(&from, a);
            let j = intern(&to, &mut labels, &mut queue)?;
            transitions.push(Transition::new(StateId(k), StateId(j), Word::letter(a.clone()), output));
        }
    }
    let states = labels
        .iter()
        .map(|l| State {
            label: l.to_string(),
            is_initial: tf.initial.contains(l),
            is_final: tf.finals.contains(l),
            final_output: Word::empty(),
        })
        .collect();
    Machine::from_parts(Kind::Transducer, states, transitions, alphabet, None)
}

/// One state, initial and final, applying `f` to every letter.
pub fn operator_lift<F>(f: F, alphabet: &[Symbol]) -> Result<Machine>
where
    F: Fn(&Symbol) -> std::result::Result<Symbol, String>,
{
    if alphabet.is_empty() {
        return Err(FsmError::EmptyAlphabet);
    }
    let mut alphabet = alphabet.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let mut state = State::new("0");
    state.is_initial = true;
    state.is_final = true;
    let mut transitions = Vec::with_capacity(alphabet.len());
    let mut image = Vec::with_capacity(alphabet.len());
    for a in &alphabet {
        let b = f(a).map_err(|reason| FsmError::OperatorFailed {
            symbol: a.clone(),
            reason,
        })?;
        image.push(b.clone());
        transitions.push(Transition::new(StateId(0), StateId(0), Word::letter(a.clone()), Word::letter(b)));
    }
    Machine::from_parts(Kind::Transducer, vec![state], transitions, alphabet, Some(image))
}

pub fn identity_transducer(alphabet: &[Symbol]) -> Result<Machine> {
    operator_lift(|a| Ok(a.clone()), alphabet)
}

fn require_digit(a: &Symbol) -> std::result::Result<i64, String> {
    a.digit().ok_or_else(|| "not a digit".to_string())
}

/// Writes 1 for every nonzero digit and 0 otherwise.
pub fn weight_transducer(alphabet: &[Symbol]) -> Result<Machine> {
    operator_lift(|a| require_digit(a).map(|d| Symbol::Digit(i64::from(d != 0))), alphabet)
}

/// Writes the absolute value of every digit.
pub fn abs_transducer(alphabet: &[Symbol]) -> Result<Machine> {
    operator_lift(|a| require_digit(a).map(|d| Symbol::Digit(d.abs())), alphabet)
}

fn digit_or_zero(s: &Symbol) -> std::result::Result<i64, String> {
    match s {
        Symbol::Absent => Ok(0),
        other => require_digit(other),
    }
}

/// Letterwise difference of pairs over `digits` and the absent marker,
/// reading an absent component as 0.
pub fn minus_transducer(digits: &[i64]) -> Result<Machine> {
    let components: Vec<Symbol> = digits
        .iter()
        .copied()
        .map(Symbol::Digit)
        .chain([Symbol::Absent])
        .collect();
    let pairs: Vec<Symbol> = components
        .iter()
        .flat_map(|l| components.iter().map(move |r| Symbol::pair(l.clone(), r.clone())))
        .collect();
    operator_lift(
        |p| match p {
            Symbol::Pair(l, r) => Ok(Symbol::Digit(digit_or_zero(l)? - digit_or_zero(r)?)),
            _ => Err("not a pair".to_string()),
        },
        &pairs,
    )
}

fn require_transducer(t: &Machine) -> Result<()> {
    if t.kind() == Kind::Transducer {
        Ok(())
    } else {
        Err(FsmError::NotATransducer)
    }
}

fn require_single_outputs(t: &Machine) -> Result<()> {
    match t.transitions().iter().find(|tr| tr.output.len() != 1) {
        Some(tr) => Err(FsmError::OutputLengthNotOne {
            from: t.label(tr.from).to_string(),
            to: t.label(tr.to).to_string(),
            len: tr.output.len(),
        }),
        None => Ok(()),
    }
}

/// Runs both factors in parallel on the same input, writing the pair of
/// their output letters. Every transition of each factor must write exactly
/// one letter; final outputs are zipped, the shorter padded with
/// [`Symbol::Absent`].
pub fn cartesian_product(t1: &Machine, t2: &Machine) -> Result<Machine> {
    require_transducer(t1)?;
    require_transducer(t2)?;
    if t1.input_alphabet() != t2.input_alphabet() {
        return Err(FsmError::AlphabetMismatch);
    }
    require_single_outputs(t1)?;
    require_single_outputs(t2)?;
    let (r1, r2) = (t1.runner()?, t2.runner()?);
    let start = (r1.initial(), r2.initial());
    let mut index = HashMap::from([(start, 0usize)]);
    let mut pairs = vec![start];
    let mut transitions = Vec::new();
    let mut k = 0;
    while k < pairs.len() {
        let (p, q) = pairs[k];
        for a in t1.input_alphabet() {
            if let (Some((p2, o1)), Some((q2, o2))) = (r1.step(p, a), r2.step(q, a)) {
                let j = *index.entry((p2, q2)).or_insert_with(|| {
                    pairs.push((p2, q2));
                    pairs.len() - 1
                });
                let out = Symbol::pair(o1[0].clone(), o2[0].clone());
                transitions.push(Transition::new(StateId(k), StateId(j), Word::letter(a.clone()), Word::letter(out)));
            }
        }
        k += 1;
    }
    let states = pairs
        .iter()
        .enumerate()
        .map(|(k, &(p, q))| {
            let (s1, s2) = (t1.state(p), t2.state(q));
            let is_final = s1.is_final && s2.is_final;
            let final_output = if is_final {
                let len = s1.final_output.len().max(s2.final_output.len());
                (0..len)
                    .map(|i| {
                        let left = s1.final_output.get(i).cloned().unwrap_or(Symbol::Absent);
                        let right = s2.final_output.get(i).cloned().unwrap_or(Symbol::Absent);
                        Symbol::pair(left, right)
                    })
                    .collect()
            } else {
                Word::empty()
            };
            State {
                label: format!("({}, {})", s1.label, s2.label),
                is_initial: k == 0,
                is_final,
                final_output,
            }
        })
        .collect();
    Machine::from_parts(Kind::Transducer, states, transitions, t1.input_alphabet().to_vec(), None)
}

/// `compose(outer, inner)` runs `inner` and feeds its output to `outer`.
/// States are `(inner, outer)` pairs reachable from the initial pair.
pub fn compose(outer: &Machine, inner: &Machine) -> Result<Machine> {
    let (ro, ri) = (outer.runner()?, inner.runner()?);
    let run_outer = |mut state: StateId, word: &Word| -> Option<(StateId, Word)> {
        let mut out = Word::empty();
        for a in word {
            let (next, o) = ro.step(state, a)?;
            out.extend_from(o);
            state = next;
        }
        Some((state, out))
    };
    let mut outgoing = inner.outgoing_lists();
    for list in &mut outgoing {
        list.sort_by(|&a, &b| inner.transitions()[a].cmp(&inner.transitions()[b]));
    }
    let start = (ri.initial(), ro.initial());
    let mut index = HashMap::from([(start, 0usize)]);
    let mut pairs = vec![start];
    let mut transitions = Vec::new();
    let mut k = 0;
    while k < pairs.len() {
        let (s, o) = pairs[k];
        for &i in &outgoing[s.0] {
            let t = &inner.transitions()[i];
            let (o2, out) = run_outer(o, &t.output).ok_or_else(|| FsmError::CompositionBlocked {
                from: inner.label(t.from).to_string(),
                to: inner.label(t.to).to_string(),
                word: t.output.clone(),
            })?;
            let j = *index.entry((t.to, o2)).or_insert_with(|| {
                pairs.push((t.to, o2));
                pairs.len() - 1
            });
            transitions.push(Transition::new(StateId(k), StateId(j), t.input.clone(), out));
        }
        k += 1;
    }
    let states = pairs
        .iter()
        .enumerate()
        .map(|(k, &(s, o))| {
            let si = inner.state(s);
            let completed = if si.is_final {
                run_outer(o, &si.final_output).filter(|(o2, _)| outer.state(*o2).is_final)
            } else {
                None
            };
            let (is_final, final_output) = match completed {
                Some((o2, mut out)) => {
                    out.extend_from(&outer.state(o2).final_output);
                    (true, out)
                }
                None => (false, Word::empty()),
            };
            State {
                label: format!("({}, {})", si.label, outer.label(o)),
                is_initial: k == 0,
                is_final,
                final_output,
            }
        })
        .collect();
    Machine::from_parts(
        outer.kind(),
        states,
        transitions,
        inner.input_alphabet().to_vec(),
        outer.declared_output_alphabet().map(<[Symbol]>::to_vec),
    )
}

/// Automaton over the output alphabet accepting exactly the outputs of
/// accepting runs, final outputs included. Multi-letter outputs become
/// chains through fresh states and empty outputs become epsilon
/// transitions, so the result usually needs determinising.
pub fn output_projection(t: &Machine) -> Result<Machine> {
    require_transducer(t)?;
    let mut states: Vec<State> = t
        .states()
        .iter()
        .map(|s| State {
            label: s.label.clone(),
            is_initial: s.is_initial,
            is_final: s.is_final && s.final_output.is_empty(),
            final_output: Word::empty(),
        })
        .collect();
    let mut taken: BTreeSet<String> = states.iter().map(|s| s.label.clone()).collect();
    let mut counter = 0usize;
    let mut fresh = |states: &mut Vec<State>| -> StateId {
        let label = loop {
            let l = format!("#{counter}");
            counter += 1;
            if taken.insert(l.clone()) {
                break l;
            }
        };
        states.push(State::new(label));
        StateId(states.len() - 1)
    };
    let mut transitions = Vec::new();
    let mut spell = |from: StateId, to: StateId, word: &Word, states: &mut Vec<State>, transitions: &mut Vec<Transition>| {
        let mut current = from;
        for (i, a) in word.iter().enumerate() {
            let next = if i + 1 == word.len() { to } else { fresh(states) };
            transitions.push(Transition::new(current, next, Word::letter(a.clone()), Word::empty()));
            current = next;
        }
        if word.is_empty() {
            transitions.push(Transition::new(from, to, Word::empty(), Word::empty()));
        }
    };
    for tr in t.transitions() {
        spell(tr.from, tr.to, &tr.output, &mut states, &mut transitions);
    }
    for id in t.state_ids() {
        let s = t.state(id);
        if s.is_final && !s.final_output.is_empty() {
            let accept = StateId(states.len());
            states.push(State::new(String::new()));
            spell(id, accept, &s.final_output, &mut states, &mut transitions);
            states[accept.0].label = format!("#end{}", accept.0);
            states[accept.0].is_final = true;
        }
    }
    Machine::from_parts(Kind::Automaton, states, transitions, t.output_alphabet(), None)
}

/// Gives every state from which repeatedly reading `letter` reaches a
/// final state the output along that path as its final output. States
/// that are already final keep their final output.
pub fn with_final_word_out(t: &Machine, letter: &Symbol) -> Result<Machine> {
    if !t.input_alphabet().contains(letter) {
        return Err(FsmError::SymbolOutsideAlphabet(letter.clone()));
    }
    let runner = t.runner()?;
    let mut states = t.states().to_vec();
    for id in t.state_ids() {
        if t.state(id).is_final {
            continue;
        }
        let mut seen = BTreeSet::from([id]);
        let mut current = id;
        let mut out = Word::empty();
        while let Some((next, o)) = runner.step(current, letter) {
            out.extend_from(o);
            current = next;
            let s = t.state(current);
            if s.is_final {
                out.extend_from(&s.final_output);
                states[id.0].is_final = true;
                states[id.0].final_output = out;
                break;
            }
            if !seen.insert(current) {
                break;
            }
        }
    }
    if !states.iter().any(|s| s.is_final) {
        return Err(FsmError::NoCompletableState(letter.clone()));
    }
    Machine::from_parts(
        t.kind(),
        states,
        t.transitions().to_vec(),
        t.input_alphabet().to_vec(),
        t.declared_output_alphabet().map(<[Symbol]>::to_vec),
    )
}

/// Current block plus, per input letter, the output and target block.
type Signature<'a> = (usize, Vec<Option<(&'a Word, usize)>>);

/// Merges behaviorally equivalent states of a deterministic transducer:
/// same finality and final output, and for every letter the same output
/// word into equivalent successors. The result computes the same function
/// but need not be the smallest such transducer.
pub fn simplify(t: &Machine) -> Result<Machine> {
    let t = t.accessible();
    let runner = t.runner()?;
    let mut ids: HashMap<(bool, &Word), usize> = HashMap::new();
    let mut block: Vec<usize> = t
        .states()
        .iter()
        .map(|s| {
            let n = ids.len();
            *ids.entry((s.is_final, &s.final_output)).or_insert(n)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut ids: HashMap<Signature, usize> = HashMap::new();
        let next: Vec<usize> = t
            .state_ids()
            .map(|id| {
                let signature = t
                    .input_alphabet()
                    .iter()
                    .map(|a| runner.step(id, a).map(|(to, out)| (out, block[to.0])))
                    .collect();
                let n = ids.len();
                *ids.entry((block[id.0], signature)).or_insert(n)
            })
            .collect();
        block = next;
        if ids.len() == count {
            break;
        }
        count = ids.len();
    }
    Ok(quotient(&t, &block)?.relabeled())
}

impl Machine {
    pub fn with_final_word_out(&self, letter: &Symbol) -> Result<Machine> {
        with_final_word_out(self, letter)
    }

    pub fn output_projection(&self) -> Result<Machine> {
        output_projection(self)
    }

    pub fn simplify(&self) -> Result<Machine> {
        simplify(self)
    }

    /// Label of a fresh state that does not clash with existing labels.
    pub fn fresh_label(&self, base: &str) -> String {
        fresh_label(self, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digits(ds: &[i64]) -> Vec<Symbol> {
        ds.iter().copied().map(Symbol::Digit).collect()
    }

    fn w(ds: &[i64]) -> Word {
        Word::digits(ds)
    }

    fn triple() -> Machine {
        let f = |carry: &i64, read: &Symbol| {
            let current = 3 * read.digit().unwrap() + carry;
            let write = current.rem_euclid(2);
            ((current - write) / 2, w(&[write]))
        };
        TransitionFunction::new(f, vec![0], vec![0], digits(&[0, 1]))
            .build()
            .unwrap()
            .with_final_word_out(&Symbol::Digit(0))
            .unwrap()
    }

    #[test]
    fn triple_of_fourteen() {
        let t = triple();
        assert_eq!(t.len(), 3);
        assert_eq!(t.transduce(&w(&[0, 1, 1, 1])).unwrap(), w(&[0, 1, 0, 1, 0, 1]));
        let two = t.find("2").unwrap();
        assert_eq!(t.state(two).final_output, w(&[0, 1]));
    }

    #[test]
    fn state_cap() {
        let runaway = |n: &u64, _: &Symbol| (n + 1, Word::empty());
        let err = TransitionFunction::new(runaway, vec![0], vec![], digits(&[0]))
            .with_state_cap(50)
            .build()
            .unwrap_err();
        assert_eq!(err, FsmError::StateCapExceeded(50));
    }

    #[test]
    fn prebuilt_letterwise() {
        let id = identity_transducer(&digits(&[0, 1])).unwrap();
        assert_eq!(id.len(), 1);
        assert_eq!(id.transduce(&w(&[0, 1, 1, 1])).unwrap(), w(&[0, 1, 1, 1]));
        let explicit = crate::machine::build_machine(
            &[("0", "0", w(&[0]), w(&[0])), ("0", "0", w(&[1]), w(&[1]))],
            &["0"],
            &["0"],
            digits(&[0, 1]),
        )
        .unwrap();
        assert_eq!(explicit.transitions(), id.transitions());

        let weight = weight_transducer(&digits(&[-2, -1, 0, 1, 2])).unwrap();
        let out = weight.transduce(&w(&[0, 0, 2, 0, 1, -1, 1])).unwrap();
        assert_eq!(out.digit_sum(), Some(4));
        assert_eq!(weight.transduce(&w(&[0, 0, 0])).unwrap(), w(&[0, 0, 0]));
        let s = digits(&[-1, 0, 1]);
        assert_eq!(
            abs_transducer(&s).unwrap().sorted_transitions(),
            weight_transducer(&s).unwrap().sorted_transitions()
        );
        assert!(matches!(
            weight_transducer(&[Symbol::Absent]),
            Err(FsmError::OperatorFailed { .. })
        ));
        let lifted = operator_lift(|a| Ok(a.clone()), &digits(&[0, 1])).unwrap();
        assert_eq!(lifted, id);
    }

    #[test]
    fn minus_reads_absent_as_zero() {
        let minus = minus_transducer(&[-1, 0, 1]).unwrap();
        assert_eq!(minus.input_alphabet().len(), 16);
        let p = |l: Symbol, r: Symbol| Symbol::pair(l, r);
        let d = Symbol::Digit;
        let input = Word::new(vec![
            p(d(0), d(0)),
            p(d(1), d(1)),
            p(d(0), d(1)),
            p(d(1), d(1)),
            p(d(0), Symbol::Absent),
            p(d(1), Symbol::Absent),
        ]);
        assert_eq!(minus.transduce(&input).unwrap(), w(&[0, 0, -1, 0, 0, 1]));
        assert_eq!(minus.transduce(&[p(Symbol::Absent, d(1))]).unwrap(), w(&[-1]));
        assert_eq!(minus.output_alphabet(), digits(&[-2, -1, 0, 1, 2]));
    }

    #[test]
    fn product_zips_final_outputs() {
        let id = identity_transducer(&digits(&[0, 1])).unwrap();
        let combined = cartesian_product(&triple(), &id).unwrap();
        let out = combined.transduce(&w(&[0, 1, 1, 1])).unwrap();
        let p = |l: i64, r: Option<i64>| Symbol::pair(Symbol::Digit(l), r.map_or(Symbol::Absent, Symbol::Digit));
        assert_eq!(
            out,
            Word::new(vec![p(0, Some(0)), p(1, Some(1)), p(0, Some(1)), p(1, Some(1)), p(0, None), p(1, None)])
        );
        assert!(combined
            .states()
            .iter()
            .flat_map(|s| s.final_output.iter())
            .any(|sym| matches!(sym, Symbol::Pair(_, r) if **r == Symbol::Absent)));

        let zero = compose(&minus_transducer(&[0, 1]).unwrap(), &cartesian_product(&id, &id).unwrap()).unwrap();
        assert_eq!(zero.transduce(&w(&[1, 0, 1])).unwrap(), w(&[0, 0, 0]));

        let naf1 = crate::machine::MachineBuilder::transducer(digits(&[0, 1]))
            .transition("I", "0", w(&[0]), w(&[]))
            .transition("I", "0", w(&[1]), w(&[]))
            .initial("I")
            .final_state("0")
            .build()
            .unwrap();
        assert!(matches!(cartesian_product(&naf1, &id), Err(FsmError::OutputLengthNotOne { .. })));
    }

    #[test]
    fn composition_runs_inner_then_outer() {
        let t = triple();
        let doubled = compose(&t, &t).unwrap();
        for n in 0u64..64 {
            let input: Vec<i64> = (0..6).map(|i| ((n >> i) & 1) as i64).collect();
            let direct = t.transduce(&t.transduce(&w(&input)).unwrap()).unwrap();
            assert_eq!(doubled.transduce(&w(&input)).unwrap(), direct);
        }
        let narrow = identity_transducer(&digits(&[0])).unwrap();
        assert!(matches!(compose(&narrow, &t), Err(FsmError::CompositionBlocked { .. })));
    }

    #[test]
    fn projection_of_identity_accepts_everything() {
        let id = identity_transducer(&digits(&[0, 1])).unwrap();
        let p = output_projection(&id).unwrap();
        let all = crate::automata::all_words_automaton(&digits(&[0, 1])).unwrap();
        assert!(crate::automata::is_equivalent(&p, &all).unwrap());
        let t = triple();
        let p = output_projection(&t).unwrap();
        assert!(p.accepts(&w(&[0, 1, 0, 1, 0, 1])));
        assert!(p.accepts(&w(&[1, 1])));
        assert!(!p.accepts(&w(&[1])));
        assert!(!p.accepts(&w(&[0, 1])));
    }

    #[test]
    fn final_word_completion() {
        let t = crate::machine::build_machine(
            &[("a", "b", w(&[0]), w(&[1])), ("b", "b", w(&[1]), w(&[]))],
            &["a"],
            &[],
            digits(&[0, 1]),
        )
        .unwrap();
        assert_eq!(with_final_word_out(&t, &Symbol::Digit(1)).unwrap_err(), FsmError::NoCompletableState(Symbol::Digit(1)));
        assert!(matches!(with_final_word_out(&t, &Symbol::Digit(7)), Err(FsmError::SymbolOutsideAlphabet(_))));
    }

    #[test]
    fn simplify_merges_duplicates() {
        let t = crate::machine::build_machine(
            &[
                ("a", "b", w(&[0]), w(&[0])),
                ("a", "c", w(&[1]), w(&[1])),
                ("b", "b", w(&[0]), w(&[0])),
                ("b", "c", w(&[1]), w(&[1])),
                ("c", "b", w(&[0]), w(&[0])),
                ("c", "c", w(&[1]), w(&[1])),
            ],
            &["a"],
            &["a", "b", "c"],
            digits(&[0, 1]),
        )
        .unwrap();
        let s = simplify(&t).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(simplify(&s).unwrap(), s);
        let id = identity_transducer(&digits(&[0, 1])).unwrap();
        assert_eq!(simplify(&id).unwrap().len(), 1);
    }
}

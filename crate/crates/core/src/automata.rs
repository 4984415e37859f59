//! Language constructions and decision procedures on automata.
//!
//! The regular-expression builders ([`concat`], [`union`], [`kleene_star`])
//! return nondeterministic machines with epsilon transitions and leave
//! determinisation to the caller. [`complement`] and [`intersection`]
//! determinise their operands themselves.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{FsmError, Result};
use crate::io::label_order;
use crate::machine::{Kind, Machine, State, StateId, Transition};
use crate::symbol::{Symbol, Word};
use crate::Rational;

fn require_automaton(a: &Machine) -> Result<()> {
    if a.kind() == Kind::Automaton {
        Ok(())
    } else {
        Err(FsmError::NotAnAutomaton)
    }
}

fn same_alphabet(a: &Machine, b: &Machine) -> Result<()> {
    if a.input_alphabet() == b.input_alphabet() {
        Ok(())
    } else {
        Err(FsmError::AlphabetMismatch)
    }
}

fn check_word(word: &Word, alphabet: &[Symbol]) -> Result<()> {
    match word.iter().find(|s| !alphabet.contains(s)) {
        Some(s) => Err(FsmError::SymbolOutsideAlphabet(s.clone())),
        None => Ok(()),
    }
}

pub(crate) fn fresh_label(machine: &Machine, base: &str) -> String {
    let mut label = base.to_string();
    while machine.find(&label).is_some() {
        label.push('\'');
    }
    label
}

fn automaton(states: Vec<State>, transitions: Vec<Transition>, alphabet: &[Symbol]) -> Result<Machine> {
    Machine::from_parts(Kind::Automaton, states, transitions, alphabet.to_vec(), None)
}

/// Chain automaton accepting exactly `word`.
pub fn word_automaton(word: &Word, alphabet: &[Symbol]) -> Result<Machine> {
    if alphabet.is_empty() {
        return Err(FsmError::EmptyAlphabet);
    }
    check_word(word, alphabet)?;
    let mut states: Vec<State> = (0..=word.len()).map(|i| State::new(i.to_string())).collect();
    states[0].is_initial = true;
    states[word.len()].is_final = true;
    let transitions = word
        .iter()
        .enumerate()
        .map(|(i, a)| Transition::new(StateId(i), StateId(i + 1), Word::letter(a.clone()), Word::empty()))
        .collect();
    automaton(states, transitions, alphabet)
}

pub fn empty_word_automaton(alphabet: &[Symbol]) -> Result<Machine> {
    word_automaton(&Word::empty(), alphabet)
}

/// One accepting state with a loop on every letter.
pub fn all_words_automaton(alphabet: &[Symbol]) -> Result<Machine> {
    let mut state = State::new("0");
    state.is_initial = true;
    state.is_final = true;
    let loops = alphabet
        .iter()
        .map(|a| Transition::new(StateId(0), StateId(0), Word::letter(a.clone()), Word::empty()))
        .collect();
    automaton(vec![state], loops, alphabet)
}

/// Accepts the words containing `factor` as a contiguous subword. State `i`
/// records the longest prefix of `factor` that is a suffix of the input
/// read so far; state `len(factor)` absorbs.
pub fn contains_word(factor: &Word, alphabet: &[Symbol]) -> Result<Machine> {
    if factor.is_empty() {
        return Err(FsmError::EmptyFactor);
    }
    if alphabet.is_empty() {
        return Err(FsmError::EmptyAlphabet);
    }
    check_word(factor, alphabet)?;
    let mut alphabet = alphabet.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let m = factor.len();
    // failure[i]: length of the longest proper border of factor[..i].
    let mut failure = vec![0usize; m + 1];
    for i in 1..m {
        let mut k = failure[i];
        while k > 0 && factor[i] != factor[k] {
            k = failure[k];
        }
        if factor[i] == factor[k] {
            k += 1;
        }
        failure[i + 1] = k;
    }
    let mut states: Vec<State> = (0..=m).map(|i| State::new(i.to_string())).collect();
    states[0].is_initial = true;
    states[m].is_final = true;
    let mut transitions = Vec::new();
    for i in 0..=m {
        for a in &alphabet {
            let next = if i == m {
                m
            } else {
                let mut k = i;
                loop {
                    if factor[k] == *a {
                        break k + 1;
                    }
                    if k == 0 {
                        break 0;
                    }
                    k = failure[k];
                }
            };
            transitions.push(Transition::new(StateId(i), StateId(next), Word::letter(a.clone()), Word::empty()));
        }
    }
    automaton(states, transitions, &alphabet)
}

/// Copies `m`'s states and transitions into `states`/`transitions`, with
/// labels prefixed by `tag`. Returns the offset of the copy.
fn embed(m: &Machine, tag: &str, states: &mut Vec<State>, transitions: &mut Vec<Transition>) -> usize {
    let offset = states.len();
    for s in m.states() {
        let mut s = s.clone();
        s.label = format!("{tag}{}", s.label);
        states.push(s);
    }
    for t in m.transitions() {
        transitions.push(Transition::new(
            StateId(t.from.0 + offset),
            StateId(t.to.0 + offset),
            t.input.clone(),
            Word::empty(),
        ));
    }
    offset
}

fn epsilon(from: usize, to: usize) -> Transition {
    Transition::new(StateId(from), StateId(to), Word::empty(), Word::empty())
}

pub fn concat(a: &Machine, b: &Machine) -> Result<Machine> {
    require_automaton(a)?;
    require_automaton(b)?;
    same_alphabet(a, b)?;
    let (mut states, mut transitions) = (Vec::new(), Vec::new());
    let oa = embed(a, "0:", &mut states, &mut transitions);
    let ob = embed(b, "1:", &mut states, &mut transitions);
    for f in a.final_states() {
        for i in b.initial_states() {
            transitions.push(epsilon(f.0 + oa, i.0 + ob));
        }
    }
    for s in &mut states[oa..ob] {
        s.is_final = false;
    }
    for s in &mut states[ob..] {
        s.is_initial = false;
    }
    automaton(states, transitions, a.input_alphabet())
}

/// Disjoint union; the result has the initial states of both operands.
pub fn union(a: &Machine, b: &Machine) -> Result<Machine> {
    require_automaton(a)?;
    require_automaton(b)?;
    same_alphabet(a, b)?;
    let (mut states, mut transitions) = (Vec::new(), Vec::new());
    embed(a, "0:", &mut states, &mut transitions);
    embed(b, "1:", &mut states, &mut transitions);
    automaton(states, transitions, a.input_alphabet())
}

pub fn kleene_star(a: &Machine) -> Result<Machine> {
    require_automaton(a)?;
    let (mut states, mut transitions) = (Vec::new(), Vec::new());
    let mut hub = State::new("*");
    hub.is_initial = true;
    hub.is_final = true;
    states.push(hub);
    let offset = embed(a, "0:", &mut states, &mut transitions);
    for i in a.initial_states() {
        transitions.push(epsilon(0, i.0 + offset));
    }
    for f in a.final_states() {
        transitions.push(epsilon(f.0 + offset, 0));
    }
    for s in &mut states[offset..] {
        s.is_initial = false;
        s.is_final = false;
    }
    automaton(states, transitions, a.input_alphabet())
}

fn subset_label(a: &Machine, subset: &BTreeSet<StateId>) -> String {
    let mut labels: Vec<&str> = subset.iter().map(|&id| a.label(id)).collect();
    labels.sort_by(|x, y| label_order(x, y));
    format!("{{{}}}", labels.join(", "))
}

/// Subset construction with epsilon closure, restricted to reachable
/// subsets. The empty subset is never created, so the result may be
/// incomplete.
pub fn determinize(a: &Machine) -> Result<Machine> {
    require_automaton(a)?;
    let closure = a.epsilon_closure_fn();
    let outgoing = a.outgoing_lists();
    let start = closure(a.initial_states().into_iter().collect());
    let mut index: HashMap<BTreeSet<StateId>, usize> = HashMap::new();
    let mut subsets = vec![start.clone()];
    index.insert(start, 0);
    let mut transitions = Vec::new();
    let mut k = 0;
    while k < subsets.len() {
        let mut targets: BTreeMap<&Symbol, BTreeSet<StateId>> = BTreeMap::new();
        for &s in &subsets[k] {
            for &i in &outgoing[s.0] {
                let t = &a.transitions()[i];
                if let Some(letter) = t.letter() {
                    targets.entry(letter).or_default().insert(t.to);
                }
            }
        }
        for (letter, target) in targets {
            let target = closure(target);
            let j = match index.get(&target) {
                Some(&j) => j,
                None => {
                    subsets.push(target.clone());
                    index.insert(target, subsets.len() - 1);
                    subsets.len() - 1
                }
            };
            transitions.push(Transition::new(StateId(k), StateId(j), Word::letter(letter.clone()), Word::empty()));
        }
        k += 1;
    }
    let states = subsets
        .iter()
        .enumerate()
        .map(|(k, subset)| State {
            label: subset_label(a, subset),
            is_initial: k == 0,
            is_final: subset.iter().any(|&id| a.state(id).is_final),
            final_output: Word::empty(),
        })
        .collect();
    automaton(states, transitions, a.input_alphabet())
}

/// Adds a non-final sink named `sink_label` so that every state has a
/// transition on every letter. Complete machines are returned unchanged.
/// On transducers the sink transitions write nothing.
pub fn complete(a: &Machine, sink_label: &str) -> Result<Machine> {
    a.require_deterministic()?;
    if a.first_missing_transition().is_none() {
        return Ok(a.clone());
    }
    if a.find(sink_label).is_some() {
        return Err(FsmError::DuplicateLabel(sink_label.to_string()));
    }
    let sink = StateId(a.len());
    let present: BTreeSet<(StateId, &Symbol)> = a
        .transitions()
        .iter()
        .filter_map(|t| t.letter().map(|l| (t.from, l)))
        .collect();
    let mut states = a.states().to_vec();
    states.push(State::new(sink_label));
    let mut transitions = a.transitions().to_vec();
    for id in a.state_ids().chain([sink]) {
        for letter in a.input_alphabet() {
            if !present.contains(&(id, letter)) {
                transitions.push(Transition::new(id, sink, Word::letter(letter.clone()), Word::empty()));
            }
        }
    }
    Machine::from_parts(
        a.kind(),
        states,
        transitions,
        a.input_alphabet().to_vec(),
        a.declared_output_alphabet().map(<[Symbol]>::to_vec),
    )
}

fn complete_dfa(a: &Machine) -> Result<Machine> {
    let dfa = if a.is_deterministic() { a.clone() } else { determinize(a)? };
    complete(&dfa, &fresh_label(&dfa, "sink"))
}

/// Accepts exactly the words over the alphabet that `a` rejects.
pub fn complement(a: &Machine) -> Result<Machine> {
    require_automaton(a)?;
    let mut m = complete_dfa(a)?;
    for s in &mut m.states {
        s.is_final = !s.is_final;
    }
    Ok(m)
}

/// Product construction on the reachable pairs of the determinised
/// operands.
pub fn intersection(a: &Machine, b: &Machine) -> Result<Machine> {
    require_automaton(a)?;
    require_automaton(b)?;
    same_alphabet(a, b)?;
    let da = if a.is_deterministic() { a.clone() } else { determinize(a)? };
    let db = if b.is_deterministic() { b.clone() } else { determinize(b)? };
    let (ra, rb) = (da.runner()?, db.runner()?);
    let start = (ra.initial(), rb.initial());
    let mut index = HashMap::from([(start, 0usize)]);
    let mut pairs = vec![start];
    let mut transitions = Vec::new();
    let mut k = 0;
    while k < pairs.len() {
        let (p, q) = pairs[k];
        for letter in da.input_alphabet() {
            if let (Some((p2, _)), Some((q2, _))) = (ra.step(p, letter), rb.step(q, letter)) {
                let j = *index.entry((p2, q2)).or_insert_with(|| {
                    pairs.push((p2, q2));
                    pairs.len() - 1
                });
                transitions.push(Transition::new(StateId(k), StateId(j), Word::letter(letter.clone()), Word::empty()));
            }
        }
        k += 1;
    }
    let states = pairs
        .iter()
        .enumerate()
        .map(|(k, &(p, q))| State {
            label: format!("({}, {})", da.label(p), db.label(q)),
            is_initial: k == 0,
            is_final: da.state(p).is_final && db.state(q).is_final,
            final_output: Word::empty(),
        })
        .collect();
    automaton(states, transitions, da.input_alphabet())
}

/// Moore refinement of a complete DFA. Returns the block of every state;
/// blocks are numbered by first appearance in state order.
fn moore_blocks(dfa: &Machine) -> Vec<usize> {
    let runner = dfa.runner().expect("complete DFA");
    let mut block: Vec<usize> = dfa.states().iter().map(|s| usize::from(s.is_final)).collect();
    let mut count = 0;
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = dfa
            .state_ids()
            .map(|id| {
                let signature: Vec<usize> = dfa
                    .input_alphabet()
                    .iter()
                    .map(|a| block[runner.step(id, a).expect("complete DFA").0 .0])
                    .collect();
                let n = ids.len();
                *ids.entry((block[id.0], signature)).or_insert(n)
            })
            .collect();
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

pub(crate) fn quotient(m: &Machine, block: &[usize]) -> Result<Machine> {
    let n = block.iter().max().map_or(0, |b| b + 1);
    let mut representative = vec![None; n];
    for id in m.state_ids() {
        representative[block[id.0]].get_or_insert(id);
    }
    let states = representative
        .iter()
        .enumerate()
        .map(|(b, rep)| {
            let s = m.state(rep.expect("every block has a member"));
            State {
                label: b.to_string(),
                is_initial: m.initial_states().iter().any(|i| block[i.0] == b),
                is_final: s.is_final,
                final_output: s.final_output.clone(),
            }
        })
        .collect();
    let transitions = m
        .transitions()
        .iter()
        .filter(|t| representative[block[t.from.0]] == Some(t.from))
        .map(|t| Transition::new(StateId(block[t.from.0]), StateId(block[t.to.0]), t.input.clone(), t.output.clone()))
        .collect();
    Machine::from_parts(
        m.kind(),
        states,
        transitions,
        m.input_alphabet().to_vec(),
        m.declared_output_alphabet().map(<[Symbol]>::to_vec),
    )
}

/// The minimal complete DFA of `a`, canonically relabeled. A sink is kept
/// when the language needs one; [`Machine::coaccessible`] removes it.
pub fn minimize(a: &Machine) -> Result<Machine> {
    require_automaton(a)?;
    let dfa = complete_dfa(a)?.accessible();
    let blocks = moore_blocks(&dfa);
    Ok(quotient(&dfa, &blocks)?.relabeled())
}

/// Language equality, decided by comparing canonical minimal DFAs.
pub fn is_equivalent(a: &Machine, b: &Machine) -> Result<bool> {
    require_automaton(a)?;
    require_automaton(b)?;
    same_alphabet(a, b)?;
    Ok(minimize(a)? == minimize(b)?)
}

/// The accepted words of length at most `max_length`, in shortlex order.
pub fn language(a: &Machine, max_length: usize) -> Result<Language> {
    require_automaton(a)?;
    let dfa = minimize(a)?.trim();
    let outgoing: Vec<Vec<(Symbol, usize)>> = dfa
        .state_ids()
        .map(|id| {
            let mut out: Vec<(Symbol, usize)> = dfa
                .outgoing(id)
                .map(|t| (t.letter().expect("DFA").clone(), t.to.0))
                .collect();
            out.sort();
            out
        })
        .collect();
    // reach[r][s]: some word of length exactly r leads from s to a final state.
    let mut reach = vec![dfa.states().iter().map(|s| s.is_final).collect::<Vec<_>>()];
    for r in 1..=max_length {
        let row = outgoing
            .iter()
            .map(|out| out.iter().any(|&(_, to)| reach[r - 1][to]))
            .collect();
        reach.push(row);
    }
    Ok(Language {
        initial: dfa.initial_states().first().map(|s| s.0),
        outgoing,
        reach,
        length: 0,
        buffer: VecDeque::new(),
    })
}

/// Cursor over an accepted language, length by length.
#[derive(Debug, Clone)]
pub struct Language {
    initial: Option<usize>,
    outgoing: Vec<Vec<(Symbol, usize)>>,
    reach: Vec<Vec<bool>>,
    length: usize,
    buffer: VecDeque<Word>,
}

impl Language {
    fn words_of_length(&self, length: usize, state: usize, prefix: &mut Vec<Symbol>, out: &mut VecDeque<Word>) {
        let remaining = length - prefix.len();
        if remaining == 0 {
            out.push_back(Word::new(prefix.clone()));
            return;
        }
        for (letter, to) in &self.outgoing[state] {
            if self.reach[remaining - 1][*to] {
                prefix.push(letter.clone());
                self.words_of_length(length, *to, prefix, out);
                prefix.pop();
            }
        }
    }
}

impl Iterator for Language {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let initial = self.initial?;
        while self.buffer.is_empty() {
            if self.length >= self.reach.len() {
                return None;
            }
            if self.reach[self.length][initial] {
                let mut buffer = VecDeque::new();
                self.words_of_length(self.length, initial, &mut Vec::new(), &mut buffer);
                self.buffer = buffer;
            }
            self.length += 1;
        }
        self.buffer.pop_front()
    }
}

/// Trimmed minimal DFA as a square matrix of transition counts plus the
/// initial and final indicator vectors.
/// Transition counts, initial index, final flags.
type CountMatrix = (Vec<Vec<u64>>, Option<usize>, Vec<bool>);

fn count_matrix(a: &Machine) -> Result<CountMatrix> {
    let dfa = minimize(a)?.trim();
    let n = dfa.len();
    let mut matrix = vec![vec![0u64; n]; n];
    for t in dfa.transitions() {
        matrix[t.from.0][t.to.0] += 1;
    }
    let finals = dfa.states().iter().map(|s| s.is_final).collect();
    Ok((matrix, dfa.initial_states().first().map(|s| s.0), finals))
}

/// Number of accepted words of length exactly `n`.
pub fn count_words(a: &Machine, n: usize) -> Result<BigUint> {
    require_automaton(a)?;
    let (matrix, initial, finals) = count_matrix(a)?;
    let Some(initial) = initial else {
        return Ok(BigUint::zero());
    };
    let size = matrix.len();
    let mut v = vec![BigUint::zero(); size];
    v[initial] = BigUint::one();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); size];
        for (k, row) in matrix.iter().enumerate() {
            if v[k].is_zero() {
                continue;
            }
            for (l, &c) in row.iter().enumerate() {
                if c != 0 {
                    next[l] += &v[k] * c;
                }
            }
        }
        v = next;
    }
    Ok(v.iter().zip(&finals).filter(|(_, &f)| f).map(|(x, _)| x).sum())
}

/// `a(n) = c_1 a(n-1) + ... + c_d a(n-d)` for `n >= d`, with the first `d`
/// terms given explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub coefficients: Vec<Rational>,
    pub initial_terms: Vec<BigInt>,
}

impl Recurrence {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// Terms `a(0)..a(len-1)`.
    pub fn terms(&self, len: usize) -> Vec<Rational> {
        let mut terms: Vec<Rational> = self.initial_terms.iter().take(len).cloned().map(Rational::from_integer).collect();
        while terms.len() < len {
            let n = terms.len();
            let next = self
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, c)| c * &terms[n - 1 - i])
                .sum();
            terms.push(next);
        }
        terms
    }

    /// Coefficients of `x^d - c_1 x^(d-1) - ... - c_d`, constant term first.
    pub fn characteristic_polynomial(&self) -> Vec<Rational> {
        let mut poly: Vec<Rational> = self.coefficients.iter().rev().map(|c| -c).collect();
        poly.push(Rational::one());
        poly
    }

    /// Rational roots of the characteristic polynomial, ascending, without
    /// multiplicity.
    pub fn rational_roots(&self) -> Vec<Rational> {
        rational_roots(&self.characteristic_polynomial())
    }
}

/// Rational roots of an integer-valued polynomial (constant term first).
fn rational_roots(poly: &[Rational]) -> Vec<Rational> {
    let mut poly: Vec<Rational> = poly.to_vec();
    while poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    let mut roots = BTreeSet::new();
    // Factor out x^k.
    let shift = poly.iter().take_while(|c| c.is_zero()).count();
    if shift > 0 {
        roots.insert(Rational::zero());
        poly.drain(..shift);
    }
    if poly.len() < 2 {
        return roots.into_iter().collect();
    }
    let denominators = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = poly.iter().map(|c| (c * Rational::from_integer(denominators.clone())).to_integer()).collect();
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.abs();
        let mut ds = Vec::new();
        let mut d = BigInt::one();
        while &d * &d <= n {
            if (&n % &d).is_zero() {
                ds.push(d.clone());
                ds.push(&n / &d);
            }
            d += 1;
        }
        ds
    };
    let evaluate = |x: &Rational| -> Rational {
        ints.iter().rev().fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
    };
    for p in divisors(&ints[0]) {
        for q in divisors(ints.last().expect("degree >= 1")) {
            for sign in [1, -1] {
                let x = Rational::new(&p * sign, q.clone());
                if evaluate(&x).is_zero() {
                    roots.insert(x);
                }
            }
        }
    }
    roots.into_iter().collect()
}

/// Characteristic polynomial by Faddeev–LeVerrier, constant term first.
fn characteristic_polynomial(matrix: &[Vec<u64>]) -> Vec<Rational> {
    let n = matrix.len();
    let a: Vec<Vec<Rational>> = matrix
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
        .collect();
    let mul = |x: &Vec<Vec<Rational>>, y: &Vec<Vec<Rational>>| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &x[i][k] * &y[k][j]).sum()).collect())
            .collect()
    };
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = mul(&a, &m);
        let trace: Rational = (0..n).map(|i| m[i][i].clone()).sum();
        coeffs[n - k] = -trace / Rational::from_integer(BigInt::from(k));
    }
    coeffs
}

/// Linear recurrence for `count_words(a, n)` from the characteristic
/// polynomial of the trimmed minimal DFA.
pub fn word_count_recurrence(a: &Machine) -> Result<Recurrence> {
    require_automaton(a)?;
    let (matrix, initial, _) = count_matrix(a)?;
    if initial.is_none() {
        return Ok(Recurrence {
            coefficients: vec![Rational::zero()],
            initial_terms: vec![BigInt::zero()],
        });
    }
    let poly = characteristic_polynomial(&matrix);
    let d = matrix.len();
    let coefficients = (1..=d).map(|i| -poly[d - i].clone()).collect();
    let initial_terms = (0..d).map(|n| count_words(a, n).map(BigInt::from)).collect::<Result<_>>()?;
    Ok(Recurrence {
        coefficients,
        initial_terms,
    })
}

impl Machine {
    pub fn determinize(&self) -> Result<Machine> {
        determinize(self)
    }

    pub fn minimize(&self) -> Result<Machine> {
        minimize(self)
    }

    pub fn complement(&self) -> Result<Machine> {
        complement(self)
    }
}

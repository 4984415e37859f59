//! The machine data model shared by automata and transducers.
//!
//! A [`Machine`] is an immutable value. Every operation, including
//! [`Machine::add_state`] and [`Machine::add_transition`], returns a new
//! machine and leaves the receiver untouched.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FsmError, Result};
use crate::symbol::{Symbol, Word, MAX_PAIR_DEPTH};

/// Index of a state inside its machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Automaton,
    Transducer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub label: String,
    pub is_initial: bool,
    pub is_final: bool,
    pub final_output: Word,
}

impl State {
    pub fn new(label: impl Into<String>) -> Self {
        State {
            label: label.into(),
            is_initial: false,
            is_final: false,
            final_output: Word::empty(),
        }
    }
}

/// A labeled arc. The input is a word of length 0 (epsilon) or 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: StateId,
    pub input: Word,
    pub output: Word,
    pub to: StateId,
}

impl Transition {
    pub fn new(from: StateId, to: StateId, input: Word, output: Word) -> Self {
        Transition {
            from,
            input,
            output,
            to,
        }
    }

    pub fn is_epsilon(&self) -> bool {
        self.input.is_empty()
    }

    pub fn letter(&self) -> Option<&Symbol> {
        self.input.first()
    }
}

/// Outcome of running a deterministic machine on an input word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub accepted: bool,
    pub stop_state: StateId,
    pub stop_label: String,
    /// Output written so far, whether or not the run accepted. The final
    /// output of the stop state is included only for accepting runs.
    pub output: Word,
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.accepted, self.stop_label, self.output)
    }
}

#[derive(Debug, Clone)]
pub struct Machine {
    pub(crate) kind: Kind,
    pub(crate) states: Vec<State>,
    pub(crate) transitions: Vec<Transition>,
    pub(crate) input_alphabet: Vec<Symbol>,
    pub(crate) output_alphabet: Option<Vec<Symbol>>,
}

pub(crate) fn normalize_alphabet(mut symbols: Vec<Symbol>) -> Vec<Symbol> {
    symbols.sort();
    symbols.dedup();
    symbols
}

impl Machine {
    /// Assembles a machine from raw parts and checks every invariant.
    pub(crate) fn from_parts(
        kind: Kind,
        states: Vec<State>,
        transitions: Vec<Transition>,
        input_alphabet: Vec<Symbol>,
        output_alphabet: Option<Vec<Symbol>>,
    ) -> Result<Machine> {
        let machine = Machine {
            kind,
            states,
            transitions,
            input_alphabet: normalize_alphabet(input_alphabet),
            output_alphabet: output_alphabet.map(normalize_alphabet),
        };
        machine.validate()?;
        Ok(machine)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for state in &self.states {
            if !seen.insert(state.label.as_str()) {
                return Err(FsmError::DuplicateLabel(state.label.clone()));
            }
            if !state.final_output.is_empty() {
                if self.kind == Kind::Automaton {
                    return Err(FsmError::AutomatonWithOutput(state.label.clone()));
                }
                if !state.is_final {
                    return Err(FsmError::Format(format!(
                        "non-final state {:?} carries a final output",
                        state.label
                    )));
                }
                self.check_output_word(&state.final_output, &state.label, &state.label)?;
            }
        }
        for symbol in &self.input_alphabet {
            check_depth(symbol)?;
        }
        for t in &self.transitions {
            let endpoint = |id: StateId| {
                self.states
                    .get(id.0)
                    .map(|s| s.label.clone())
                    .ok_or_else(|| FsmError::UnknownState(id.to_string()))
            };
            let from = endpoint(t.from)?;
            let to = endpoint(t.to)?;
            if t.input.len() > 1 {
                return Err(FsmError::InputTooLong {
                    from,
                    to,
                    input: t.input.clone(),
                });
            }
            if let Some(symbol) = t.letter() {
                if self.input_alphabet.binary_search(symbol).is_err() {
                    return Err(FsmError::InputOutsideAlphabet {
                        from,
                        to,
                        symbol: symbol.clone(),
                    });
                }
            }
            if !t.output.is_empty() && self.kind == Kind::Automaton {
                return Err(FsmError::AutomatonWithOutput(from));
            }
            self.check_output_word(&t.output, &from, &to)?;
        }
        Ok(())
    }

    fn check_output_word(&self, word: &Word, from: &str, to: &str) -> Result<()> {
        for symbol in word {
            check_depth(symbol)?;
            if let Some(alphabet) = &self.output_alphabet {
                if alphabet.binary_search(symbol).is_err() {
                    return Err(FsmError::OutputOutsideAlphabet {
                        from: from.to_string(),
                        to: to.to_string(),
                        symbol: symbol.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_automaton(&self) -> bool {
        self.kind == Kind::Automaton
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id.0]
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn input_alphabet(&self) -> &[Symbol] {
        &self.input_alphabet
    }

    /// The declared output alphabet, if any.
    pub fn declared_output_alphabet(&self) -> Option<&[Symbol]> {
        self.output_alphabet.as_deref()
    }

    /// The declared output alphabet, or the symbols that actually occur in
    /// outputs when none was declared.
    pub fn output_alphabet(&self) -> Vec<Symbol> {
        match &self.output_alphabet {
            Some(a) => a.clone(),
            None => normalize_alphabet(
                self.transitions
                    .iter()
                    .flat_map(|t| t.output.iter().cloned())
                    .chain(self.states.iter().flat_map(|s| s.final_output.iter().cloned()))
                    .collect(),
            ),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn find(&self, label: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s.label == label)
            .map(StateId)
    }

    pub(crate) fn require(&self, label: &str) -> Result<StateId> {
        self.find(label)
            .ok_or_else(|| FsmError::UnknownState(label.to_string()))
    }

    pub fn label(&self, id: StateId) -> &str {
        &self.states[id.0].label
    }

    pub fn initial_states(&self) -> Vec<StateId> {
        self.state_ids()
            .filter(|&id| self.states[id.0].is_initial)
            .collect()
    }

    pub fn final_states(&self) -> Vec<StateId> {
        self.state_ids()
            .filter(|&id| self.states[id.0].is_final)
            .collect()
    }

    pub fn outgoing(&self, id: StateId) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.from == id)
    }

    pub(crate) fn outgoing_lists(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            lists[t.from.0].push(i);
        }
        lists
    }

    /// Returns a copy with one more state, neither initial nor final.
    pub fn add_state(&self, label: &str) -> Result<Machine> {
        if self.find(label).is_some() {
            return Err(FsmError::DuplicateLabel(label.to_string()));
        }
        let mut states = self.states.clone();
        states.push(State::new(label));
        Machine::from_parts(
            self.kind,
            states,
            self.transitions.clone(),
            self.input_alphabet.clone(),
            self.output_alphabet.clone(),
        )
    }

    pub fn add_transition(&self, from: &str, to: &str, input: Word, output: Word) -> Result<Machine> {
        let t = Transition::new(self.require(from)?, self.require(to)?, input, output);
        let mut transitions = self.transitions.clone();
        transitions.push(t);
        Machine::from_parts(
            self.kind,
            self.states.clone(),
            transitions,
            self.input_alphabet.clone(),
            self.output_alphabet.clone(),
        )
    }

    /// Returns a copy where the given state is (or is not) final, with the
    /// given final output.
    pub fn with_final(&self, label: &str, is_final: bool, final_output: Word) -> Result<Machine> {
        let id = self.require(label)?;
        let mut states = self.states.clone();
        states[id.0].is_final = is_final;
        states[id.0].final_output = final_output;
        Machine::from_parts(
            self.kind,
            states,
            self.transitions.clone(),
            self.input_alphabet.clone(),
            self.output_alphabet.clone(),
        )
    }

    pub fn with_initial(&self, label: &str, is_initial: bool) -> Result<Machine> {
        let id = self.require(label)?;
        let mut states = self.states.clone();
        states[id.0].is_initial = is_initial;
        Ok(Machine {
            states,
            ..self.clone()
        })
    }

    /// Single initial state, no epsilon inputs, at most one transition per
    /// state and letter.
    pub fn is_deterministic(&self) -> bool {
        self.determinism_violation().is_none()
    }

    pub(crate) fn determinism_violation(&self) -> Option<String> {
        let initial = self.initial_states();
        if initial.len() != 1 {
            return Some(format!("{} initial states", initial.len()));
        }
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            match t.letter() {
                None => {
                    return Some(format!(
                        "epsilon transition {} -> {}",
                        self.label(t.from),
                        self.label(t.to)
                    ))
                }
                Some(a) => {
                    if !seen.insert((t.from, a)) {
                        return Some(format!(
                            "state {:?} has several transitions on {a}",
                            self.label(t.from)
                        ));
                    }
                }
            }
        }
        None
    }

    pub(crate) fn require_deterministic(&self) -> Result<()> {
        match self.determinism_violation() {
            Some(reason) => Err(FsmError::NotDeterministic(reason)),
            None => Ok(()),
        }
    }

    /// Deterministic with exactly one transition per state and letter.
    pub fn is_complete(&self) -> bool {
        self.is_deterministic() && self.first_missing_transition().is_none()
    }

    pub(crate) fn first_missing_transition(&self) -> Option<(StateId, Symbol)> {
        let present: BTreeSet<(StateId, &Symbol)> = self
            .transitions
            .iter()
            .filter_map(|t| t.letter().map(|a| (t.from, a)))
            .collect();
        self.state_ids().find_map(|id| {
            self.input_alphabet
                .iter()
                .find(|a| !present.contains(&(id, *a)))
                .map(|a| (id, a.clone()))
        })
    }

    /// Compiles the transition table for repeated runs.
    pub fn runner(&self) -> Result<Runner<'_>> {
        self.require_deterministic()?;
        let mut table: Vec<HashMap<&Symbol, &Transition>> = vec![HashMap::new(); self.states.len()];
        for t in &self.transitions {
            if let Some(a) = t.letter() {
                table[t.from.0].insert(a, t);
            }
        }
        Ok(Runner {
            machine: self,
            initial: self.initial_states()[0],
            table,
        })
    }

    /// Runs the machine on `input`. Rejection is reported in the result;
    /// an error means the machine cannot be run deterministically at all.
    pub fn process(&self, input: &[Symbol]) -> Result<RunResult> {
        Ok(self.runner()?.process(input))
    }

    /// Output of an accepting run.
    pub fn transduce(&self, input: &[Symbol]) -> Result<Word> {
        self.runner()?.transduce(input)
    }

    /// Whether some run on `input` ends in a final state. Works for
    /// nondeterministic machines with epsilon transitions.
    pub fn accepts(&self, input: &[Symbol]) -> bool {
        let eps = self.epsilon_closure_fn();
        let mut current = eps(self.initial_states().into_iter().collect());
        for a in input {
            let next = self
                .transitions
                .iter()
                .filter(|t| current.contains(&t.from) && t.letter() == Some(a))
                .map(|t| t.to)
                .collect();
            current = eps(next);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|id| self.states[id.0].is_final)
    }

    pub(crate) fn epsilon_closure_fn(&self) -> impl Fn(BTreeSet<StateId>) -> BTreeSet<StateId> + '_ {
        let eps: Vec<Vec<StateId>> = {
            let mut lists = vec![Vec::new(); self.states.len()];
            for t in self.transitions.iter().filter(|t| t.is_epsilon()) {
                lists[t.from.0].push(t.to);
            }
            lists
        };
        move |mut set: BTreeSet<StateId>| {
            let mut stack: Vec<StateId> = set.iter().copied().collect();
            while let Some(s) = stack.pop() {
                for &n in &eps[s.0] {
                    if set.insert(n) {
                        stack.push(n);
                    }
                }
            }
            set
        }
    }

    /// Keeps only the states marked `true`, renumbering the survivors in
    /// their original order.
    pub(crate) fn restrict(&self, keep: &[bool]) -> Machine {
        let mut map = vec![None; self.states.len()];
        let mut states = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if keep[i] {
                map[i] = Some(StateId(states.len()));
                states.push(s.clone());
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter_map(|t| {
                Some(Transition::new(map[t.from.0]?, map[t.to.0]?, t.input.clone(), t.output.clone()))
            })
            .collect();
        Machine {
            kind: self.kind,
            states,
            transitions,
            input_alphabet: self.input_alphabet.clone(),
            output_alphabet: self.output_alphabet.clone(),
        }
    }

    fn reachable_from(&self, roots: Vec<StateId>, forward: bool) -> Vec<bool> {
        let mut adjacency = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            if forward {
                adjacency[t.from.0].push(t.to);
            } else {
                adjacency[t.to.0].push(t.from);
            }
        }
        let mut seen = vec![false; self.states.len()];
        let mut stack = roots;
        for s in &stack {
            seen[s.0] = true;
        }
        while let Some(s) = stack.pop() {
            for &n in &adjacency[s.0] {
                if !seen[n.0] {
                    seen[n.0] = true;
                    stack.push(n);
                }
            }
        }
        seen
    }

    /// States reachable from an initial state.
    pub fn accessible(&self) -> Machine {
        self.restrict(&self.reachable_from(self.initial_states(), true))
    }

    /// States from which a final state is reachable.
    pub fn coaccessible(&self) -> Machine {
        self.restrict(&self.reachable_from(self.final_states(), false))
    }

    /// Accessible and coaccessible.
    pub fn trim(&self) -> Machine {
        self.accessible().coaccessible()
    }

    /// Canonical breadth-first order of the states: initial states first,
    /// successors visited in transition order (input, output, target).
    pub(crate) fn bfs_order(&self) -> Vec<StateId> {
        let mut lists = self.outgoing_lists();
        for list in &mut lists {
            list.sort_by(|&a, &b| {
                let (ta, tb) = (&self.transitions[a], &self.transitions[b]);
                (&ta.input, &ta.output, ta.to).cmp(&(&tb.input, &tb.output, tb.to))
            });
        }
        let mut seen = vec![false; self.states.len()];
        let mut order = Vec::with_capacity(self.states.len());
        let roots = self
            .initial_states()
            .into_iter()
            .chain(self.state_ids());
        for root in roots {
            if seen[root.0] {
                continue;
            }
            seen[root.0] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(s) = queue.pop_front() {
                order.push(s);
                for &i in &lists[s.0] {
                    let to = self.transitions[i].to;
                    if !seen[to.0] {
                        seen[to.0] = true;
                        queue.push_back(to);
                    }
                }
            }
        }
        order
    }

    /// Reorders states; `order[k]` becomes state `k`. Labels are kept.
    pub(crate) fn permuted(&self, order: &[StateId]) -> Machine {
        let mut position = vec![StateId(0); self.states.len()];
        for (k, id) in order.iter().enumerate() {
            position[id.0] = StateId(k);
        }
        let states = order.iter().map(|id| self.states[id.0].clone()).collect();
        let mut transitions: Vec<Transition> = self
            .transitions
            .iter()
            .map(|t| Transition::new(position[t.from.0], position[t.to.0], t.input.clone(), t.output.clone()))
            .collect();
        transitions.sort();
        Machine {
            kind: self.kind,
            states,
            transitions,
            input_alphabet: self.input_alphabet.clone(),
            output_alphabet: self.output_alphabet.clone(),
        }
    }

    /// States renamed `0..n` in canonical breadth-first order.
    pub fn relabeled(&self) -> Machine {
        let mut m = self.permuted(&self.bfs_order());
        for (k, s) in m.states.iter_mut().enumerate() {
            s.label = k.to_string();
        }
        m
    }

    /// Same states, transitions sorted; transition order never changes
    /// semantics.
    pub(crate) fn sorted_transitions(&self) -> Vec<Transition> {
        let mut ts = self.transitions.clone();
        ts.sort();
        ts
    }
}

/// Structural equality: same states in the same order (labels, flags and
/// final outputs) and the same multiset of transitions.
impl PartialEq for Machine {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.input_alphabet == other.input_alphabet
            && self.output_alphabet == other.output_alphabet
            && self.states == other.states
            && self.sorted_transitions() == other.sorted_transitions()
    }
}

impl Eq for Machine {}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            Kind::Automaton => "Automaton",
            Kind::Transducer => "Transducer",
        };
        write!(f, "{kind} with {} states", self.states.len())
    }
}

fn check_depth(symbol: &Symbol) -> Result<()> {
    if symbol.depth() > MAX_PAIR_DEPTH {
        Err(FsmError::PairTooDeep(symbol.clone()))
    } else {
        Ok(())
    }
}

/// A deterministic machine compiled for repeated runs.
pub struct Runner<'m> {
    machine: &'m Machine,
    initial: StateId,
    table: Vec<HashMap<&'m Symbol, &'m Transition>>,
}

impl<'m> Runner<'m> {
    pub fn process(&self, input: &[Symbol]) -> RunResult {
        let mut state = self.initial;
        let mut output = Word::empty();
        for a in input {
            match self.table[state.0].get(a) {
                Some(t) => {
                    output.extend_from(&t.output);
                    state = t.to;
                }
                None => return self.result(false, state, output),
            }
        }
        let s = &self.machine.states[state.0];
        if s.is_final {
            output.extend_from(&s.final_output);
        }
        self.result(s.is_final, state, output)
    }

    fn result(&self, accepted: bool, state: StateId, output: Word) -> RunResult {
        RunResult {
            accepted,
            stop_state: state,
            stop_label: self.machine.states[state.0].label.clone(),
            output,
        }
    }

    pub fn transduce(&self, input: &[Symbol]) -> Result<Word> {
        let r = self.process(input);
        if r.accepted {
            Ok(r.output)
        } else {
            Err(FsmError::InvalidInputSequence)
        }
    }

    /// Follows one letter from `state`.
    pub fn step(&self, state: StateId, letter: &Symbol) -> Option<(StateId, &'m Word)> {
        self.table[state.0].get(letter).map(|t| (t.to, &t.output))
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }
}

/// Incremental construction of a machine from labeled transitions. States
/// are created on first mention, in order of appearance.
#[derive(Debug, Clone)]
pub struct MachineBuilder {
    kind: Kind,
    alphabet: Vec<Symbol>,
    output_alphabet: Option<Vec<Symbol>>,
    states: Vec<State>,
    index: HashMap<String, usize>,
    transitions: Vec<(usize, usize, Word, Word)>,
}

impl MachineBuilder {
    pub fn new(kind: Kind, alphabet: impl IntoIterator<Item = Symbol>) -> Self {
        MachineBuilder {
            kind,
            alphabet: alphabet.into_iter().collect(),
            output_alphabet: None,
            states: Vec::new(),
            index: HashMap::new(),
            transitions: Vec::new(),
        }
    }

    pub fn automaton(alphabet: impl IntoIterator<Item = Symbol>) -> Self {
        Self::new(Kind::Automaton, alphabet)
    }

    pub fn transducer(alphabet: impl IntoIterator<Item = Symbol>) -> Self {
        Self::new(Kind::Transducer, alphabet)
    }

    pub fn output_alphabet(mut self, alphabet: impl IntoIterator<Item = Symbol>) -> Self {
        self.output_alphabet = Some(alphabet.into_iter().collect());
        self
    }

    fn slot(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        self.states.push(State::new(label));
        self.index.insert(label.to_string(), self.states.len() - 1);
        self.states.len() - 1
    }

    pub fn state(mut self, label: &str) -> Self {
        self.slot(label);
        self
    }

    pub fn initial(mut self, label: &str) -> Self {
        let i = self.slot(label);
        self.states[i].is_initial = true;
        self
    }

    pub fn final_state(mut self, label: &str) -> Self {
        let i = self.slot(label);
        self.states[i].is_final = true;
        self
    }

    pub fn final_output(mut self, label: &str, word: Word) -> Self {
        let i = self.slot(label);
        self.states[i].is_final = true;
        self.states[i].final_output = word;
        self
    }

    pub fn transition(mut self, from: &str, to: &str, input: Word, output: Word) -> Self {
        let f = self.slot(from);
        let t = self.slot(to);
        self.transitions.push((f, t, input, output));
        self
    }

    pub fn build(self) -> Result<Machine> {
        if self.alphabet.is_empty() {
            return Err(FsmError::EmptyAlphabet);
        }
        let transitions = self
            .transitions
            .into_iter()
            .map(|(f, t, i, o)| Transition::new(StateId(f), StateId(t), i, o))
            .collect();
        Machine::from_parts(self.kind, self.states, transitions, self.alphabet, self.output_alphabet)
    }
}

/// Builds a machine from `(from, to, input, output)` tuples. The kind is a
/// transducer as soon as some transition writes output.
pub fn build_machine(
    transitions: &[(&str, &str, Word, Word)],
    initial: &[&str],
    finals: &[&str],
    alphabet: impl IntoIterator<Item = Symbol>,
) -> Result<Machine> {
    let kind = if transitions.iter().any(|t| !t.3.is_empty()) {
        Kind::Transducer
    } else {
        Kind::Automaton
    };
    let mut b = MachineBuilder::new(kind, alphabet);
    for (from, to, input, output) in transitions {
        b = b.transition(from, to, input.clone(), output.clone());
    }
    for label in initial {
        b = b.initial(label);
    }
    for label in finals {
        b = b.final_state(label);
    }
    b.build()
}

use thiserror::Error;

use crate::symbol::{Symbol, Word};

pub type Result<T, E = FsmError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsmError {
    #[error("transition {from} -> {to}: input symbol {symbol} is not in the input alphabet")]
    InputOutsideAlphabet {
        from: String,
        to: String,
        symbol: Symbol,
    },
    #[error("transition {from} -> {to}: output symbol {symbol} is not in the output alphabet")]
    OutputOutsideAlphabet {
        from: String,
        to: String,
        symbol: Symbol,
    },
    #[error("transition {from} -> {to}: input word {input} is longer than one letter")]
    InputTooLong { from: String, to: String, input: Word },
    #[error("symbol {0} is not in the alphabet")]
    SymbolOutsideAlphabet(Symbol),
    #[error("symbol {0} nests pairs deeper than {max}", max = crate::symbol::MAX_PAIR_DEPTH)]
    PairTooDeep(Symbol),
    #[error("duplicate state label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("an automaton cannot carry output (state or transition at {0:?})")]
    AutomatonWithOutput(String),
    #[error("operation requires an automaton, got a transducer")]
    NotAnAutomaton,
    #[error("operation requires a transducer, got an automaton")]
    NotATransducer,
    #[error("input alphabets differ")]
    AlphabetMismatch,
    #[error("the alphabet must not be empty")]
    EmptyAlphabet,
    #[error("machine is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("machine is not complete: state {state:?} has no transition on {symbol}")]
    NotComplete { state: String, symbol: Symbol },
    #[error("invalid input sequence")]
    InvalidInputSequence,
    #[error("the factor of a contains-word automaton must not be empty")]
    EmptyFactor,
    #[error("exploration exceeded the state cap of {0} states")]
    StateCapExceeded(usize),
    #[error("operator failed on {symbol}: {reason}")]
    OperatorFailed { symbol: Symbol, reason: String },
    #[error("transition {from} -> {to} writes {len} symbols; products need exactly one")]
    OutputLengthNotOne { from: String, to: String, len: usize },
    #[error("outer machine blocks on word {word} emitted by inner transition {from} -> {to}")]
    CompositionBlocked { from: String, to: String, word: Word },
    #[error("no state can reach a final state by reading {0}")]
    NoCompletableState(Symbol),
    #[error("state {0:?} is not a vertex of the graph")]
    UnknownVertex(String),
    #[error("negative cycle reachable from the source: {}", .0.join(" -> "))]
    NegativeCycle(Vec<String>),
    #[error("machine must have exactly one initial state, found {0}")]
    InitialStateCount(usize),
    #[error("output word {0} contains a non-digit symbol")]
    NonDigitOutput(Word),
    #[error("expected a unique terminal strongly connected component, found {}: {}",
        .0.len(),
        .0.iter().map(|c| format!("{{{}}}", c.join(", "))).collect::<Vec<_>>().join(" "))]
    TerminalComponents(Vec<Vec<String>>),
    #[error("terminal component is periodic with period {0}")]
    Periodic(u64),
    #[error("dominant eigenvalue 1 is not simple")]
    DegenerateEigenvalue,
    #[error("n must be nonnegative, got {0}")]
    NegativeInteger(i64),
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("malformed machine file: {0}")]
    Format(String),
}

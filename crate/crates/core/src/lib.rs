//! Finite automata and subsequential transducers over signed-digit
//! alphabets, together with exact-arithmetic analyses of the machines.
//!
//! The crate is organized bottom-up:
//!
//! * [`symbol`] and [`machine`] hold the data model and run semantics,
//!   [`graph`], [`export`] and [`io`] give graph, text and file views of it.
//! * [`automata`] has the language constructions and decision procedures.
//! * [`transducer`] has products, composition, projection and completion.
//! * [`analysis`] has shortest paths, stationary distributions and
//!   asymptotic moments, all over exact rationals.
//! * [`digits`] assembles the non-adjacent-form machines and the
//!   three-half/one-half expansion from the pieces above.

pub mod analysis;
pub mod automata;
pub mod cli;
pub mod digits;
pub mod error;
pub mod export;
pub mod graph;
pub mod io;
pub mod machine;
pub mod symbol;
pub mod transducer;

pub use error::{FsmError, Result};
pub use machine::{build_machine, Kind, Machine, MachineBuilder, RunResult, State, StateId, Transition};
pub use symbol::{Symbol, Word};

pub type Rational = num_rational::BigRational;

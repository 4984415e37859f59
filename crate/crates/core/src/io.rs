//! JSON machine files.
//!
//! ```json
//! {
//!   "kind": "transducer",
//!   "alphabet": [0, 1],
//!   "output_alphabet": [-1, 0, 1],
//!   "states": [{"label": "I", "initial": true, "final": false, "final_output": []}],
//!   "transitions": [{"from": "I", "to": "0", "input": [0], "output": []}]
//! }
//! ```
//!
//! Symbols are integers (digits), `"~"` (absent) or two-element arrays
//! (pairs). States are written in label order (integer labels numerically,
//! then the rest lexicographically) and transitions sorted by source,
//! input, output and target, so equal machines serialize to equal bytes.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{FsmError, Result};
use crate::machine::{Kind, Machine, State, StateId, Transition};
use crate::symbol::{Symbol, Word};

#[derive(Debug, Serialize, Deserialize)]
struct MachineFile {
    kind: Kind,
    alphabet: Vec<Symbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output_alphabet: Option<Vec<Symbol>>,
    states: Vec<StateRecord>,
    transitions: Vec<TransitionRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateRecord {
    label: String,
    #[serde(default)]
    initial: bool,
    #[serde(default, rename = "final")]
    is_final: bool,
    #[serde(default)]
    final_output: Word,
}

#[derive(Debug, Serialize, Deserialize)]
struct TransitionRecord {
    from: String,
    to: String,
    #[serde(default)]
    input: Word,
    #[serde(default)]
    output: Word,
}

/// Integer labels first in numeric order, then the others lexicographically.
pub fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

pub fn to_json(machine: &Machine) -> String {
    let mut order: Vec<StateId> = machine.state_ids().collect();
    order.sort_by(|&a, &b| label_order(machine.label(a), machine.label(b)));
    let mut rank = vec![0; machine.len()];
    for (k, id) in order.iter().enumerate() {
        rank[id.0] = k;
    }
    let mut transitions: Vec<&Transition> = machine.transitions().iter().collect();
    transitions.sort_by(|a, b| {
        (rank[a.from.0], &a.input, &a.output, rank[a.to.0]).cmp(&(rank[b.from.0], &b.input, &b.output, rank[b.to.0]))
    });
    let file = MachineFile {
        kind: machine.kind(),
        alphabet: machine.input_alphabet().to_vec(),
        output_alphabet: machine.declared_output_alphabet().map(<[Symbol]>::to_vec),
        states: order
            .iter()
            .map(|&id| {
                let s = machine.state(id);
                StateRecord {
                    label: s.label.clone(),
                    initial: s.is_initial,
                    is_final: s.is_final,
                    final_output: s.final_output.clone(),
                }
            })
            .collect(),
        transitions: transitions
            .into_iter()
            .map(|t| TransitionRecord {
                from: machine.label(t.from).to_string(),
                to: machine.label(t.to).to_string(),
                input: t.input.clone(),
                output: t.output.clone(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("machine files always serialize");
    text.push('\n');
    text
}

pub fn from_json(text: &str) -> Result<Machine> {
    let file: MachineFile = serde_json::from_str(text).map_err(|e| FsmError::Format(e.to_string()))?;
    let mut states = Vec::with_capacity(file.states.len());
    for r in file.states {
        states.push(State {
            label: r.label,
            is_initial: r.initial,
            is_final: r.is_final,
            final_output: r.final_output,
        });
    }
    let lookup = |label: &str| {
        states
            .iter()
            .position(|s| s.label == label)
            .map(StateId)
            .ok_or_else(|| FsmError::UnknownState(label.to_string()))
    };
    let transitions = file
        .transitions
        .into_iter()
        .map(|t| Ok(Transition::new(lookup(&t.from)?, lookup(&t.to)?, t.input, t.output)))
        .collect::<Result<Vec<_>>>()?;
    Machine::from_parts(file.kind, states, transitions, file.alphabet, file.output_alphabet)
}

pub fn read_file(path: &std::path::Path) -> Result<Machine> {
    let text = std::fs::read_to_string(path).map_err(|e| FsmError::Format(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

//! Graphviz and TikZ text export.
//!
//! Both writers are deterministic: states appear in machine order and
//! transitions sorted, so equal machines give byte-identical text.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use crate::error::FsmError;
use crate::machine::{Kind, Machine, StateId};
use crate::symbol::{Symbol, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dot,
    Tikz,
}

impl FromStr for Format {
    type Err = FsmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(Format::Dot),
            "tikz" => Ok(Format::Tikz),
            other => Err(FsmError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LetterFormat {
    #[default]
    Plain,
    /// Negative digits as overlined absolute values, `\overline{1}` for -1.
    NegativeOverline,
}

#[derive(Debug, Clone, Default)]
pub struct TikzOptions {
    /// State label to `(x, y)`; unplaced states go on a row below.
    pub coordinates: BTreeMap<String, (f64, f64)>,
    pub letter_format: LetterFormat,
    /// TeX replacing the displayed label of a state, e.g. `\mathcal{I}`.
    pub state_labels: BTreeMap<String, String>,
    /// Draw the final-output arrow even when the final output is empty.
    pub accepting_show_empty: bool,
}

pub fn export(machine: &Machine, format: Format, options: &TikzOptions) -> String {
    match format {
        Format::Dot => to_dot(machine),
        Format::Tikz => to_tikz(machine, options),
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn plain_word(word: &Word) -> String {
    if word.is_empty() {
        "ε".to_string()
    } else {
        word.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    }
}

pub fn to_dot(machine: &Machine) -> String {
    let mut out = String::new();
    out.push_str("digraph fsm {\n    rankdir=LR;\n");
    for id in machine.state_ids() {
        let s = machine.state(id);
        let mut attrs = vec![
            format!("label=\"{}\"", dot_escape(&s.label)),
            format!("shape={}", if s.is_final { "doublecircle" } else { "circle" }),
        ];
        if s.is_initial {
            attrs.push("style=bold".to_string());
        }
        if !s.final_output.is_empty() {
            attrs.push(format!("xlabel=\"$ | {}\"", dot_escape(&plain_word(&s.final_output))));
        }
        writeln!(out, "    s{} [{}];", id.0, attrs.join(", ")).unwrap();
    }
    for t in machine.sorted_transitions() {
        let mut label = plain_word(&t.input);
        if machine.kind() == Kind::Transducer {
            label = format!("{label} | {}", plain_word(&t.output));
        }
        writeln!(out, "    s{} -> s{} [label=\"{}\"];", t.from.0, t.to.0, dot_escape(&label)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn tex_escape(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        match c {
            '{' | '}' | '_' | '#' | '%' | '&' | '$' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\bot"),
            '\\' => out.push_str("\\backslash "),
            '|' => out.push_str("\\mid "),
            _ => out.push(c),
        }
    }
    out
}

fn tex_symbol(symbol: &Symbol, format: LetterFormat) -> String {
    match symbol {
        Symbol::Digit(d) if *d < 0 && format == LetterFormat::NegativeOverline => {
            format!("\\overline{{{}}}", -d)
        }
        Symbol::Digit(d) => d.to_string(),
        Symbol::Absent => "\\bot".to_string(),
        Symbol::Pair(l, r) => format!("({}, {})", tex_symbol(l, format), tex_symbol(r, format)),
    }
}

fn tex_word(word: &Word, format: LetterFormat) -> String {
    if word.is_empty() {
        "\\varepsilon".to_string()
    } else {
        word.iter().map(|s| tex_symbol(s, format)).collect::<Vec<_>>().join(" ")
    }
}

fn fmt_coord(x: f64) -> String {
    format!("{x:.6}")
}

pub fn to_tikz(machine: &Machine, options: &TikzOptions) -> String {
    let mut out = String::new();
    out.push_str("\\begin{tikzpicture}[auto, initial text=, >=latex, accepting text=, accepting/.style=accepting by arrow]\n");
    let mut unplaced = 0usize;
    for id in machine.state_ids() {
        let s = machine.state(id);
        let (x, y) = match options.coordinates.get(&s.label) {
            Some(&xy) => xy,
            None => {
                unplaced += 1;
                (3.0 * (unplaced - 1) as f64, -3.0)
            }
        };
        let mut style = vec!["state"];
        if s.is_initial {
            style.push("initial");
        }
        let label = options
            .state_labels
            .get(&s.label)
            .cloned()
            .unwrap_or_else(|| tex_escape(&s.label));
        writeln!(
            out,
            "\\node[{}] (v{}) at ({}, {}) {{${}$}};",
            style.join(", "),
            id.0,
            fmt_coord(x),
            fmt_coord(y),
            label
        )
        .unwrap();
    }
    for id in machine.state_ids() {
        let s = machine.state(id);
        if s.is_final && (options.accepting_show_empty || !s.final_output.is_empty() || machine.kind() == Kind::Automaton) {
            let text = if machine.kind() == Kind::Transducer {
                format!("$\\$ \\mid {}$", tex_word(&s.final_output, options.letter_format))
            } else {
                String::new()
            };
            writeln!(out, "\\path[->] (v{}.south) edge node[right] {{{}}} ++(0, -1);", id.0, text).unwrap();
        }
    }
    // Parallel transitions share one edge with comma-separated labels.
    let mut grouped: BTreeMap<(StateId, StateId), Vec<String>> = BTreeMap::new();
    for t in machine.sorted_transitions() {
        let mut label = tex_word(&t.input, options.letter_format);
        if machine.kind() == Kind::Transducer {
            label = format!("{label}\\mid {}", tex_word(&t.output, options.letter_format));
        }
        grouped.entry((t.from, t.to)).or_default().push(label);
    }
    for (&(from, to), labels) in &grouped {
        let label = labels.join(", ");
        if from == to {
            writeln!(out, "\\path[->] (v{}) edge[loop above] node {{${}$}} ();", from.0, label).unwrap();
        } else if grouped.contains_key(&(to, from)) {
            writeln!(out, "\\path[->] (v{}) edge[bend left] node {{${}$}} (v{});", from.0, label, to.0).unwrap();
        } else {
            writeln!(out, "\\path[->] (v{}) edge node {{${}$}} (v{});", from.0, label, to.0).unwrap();
        }
    }
    out.push_str("\\end{tikzpicture}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{build_machine, MachineBuilder};

    #[test]
    fn single_state_dot() {
        let m = MachineBuilder::automaton([Symbol::Digit(0)])
            .initial("q")
            .final_state("q")
            .build()
            .unwrap();
        let dot = to_dot(&m);
        let nodes = dot.lines().filter(|l| l.trim_start().starts_with('s') && !l.contains("->")).count();
        assert_eq!(nodes, 1);
        assert!(dot.starts_with("digraph fsm {"));
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn tikz_is_balanced_and_uses_overlines() {
        let m = build_machine(
            &[
                ("I", "0", Word::digits(&[1]), Word::digits(&[-1])),
                ("0", "I", Word::digits(&[0]), Word::empty()),
                ("0", "0", Word::digits(&[1]), Word::digits(&[0])),
            ],
            &["I"],
            &["0"],
            [0, 1].map(Symbol::Digit),
        )
        .unwrap();
        let options = TikzOptions {
            coordinates: BTreeMap::from([("I".to_string(), (1.5, 3.0))]),
            letter_format: LetterFormat::NegativeOverline,
            state_labels: BTreeMap::from([("I".to_string(), "\\mathcal{I}".to_string())]),
            accepting_show_empty: true,
        };
        let tikz = to_tikz(&m, &options);
        assert!(tikz.contains("(v0) at (1.500000, 3.000000) {$\\mathcal{I}$}"));
        assert!(tikz.contains("\\overline{1}"));
        assert!(tikz.contains("bend left"));
        assert!(tikz.contains("loop above"));
        assert_eq!(tikz.matches('{').count(), tikz.matches('}').count());
        assert_eq!(tikz.replace("\\$", "").matches('$').count() % 2, 0);
        assert_eq!(tikz, to_tikz(&m, &options));
    }

    #[test]
    fn formats_parse() {
        assert_eq!("dot".parse::<Format>().unwrap(), Format::Dot);
        assert_eq!("svg".parse::<Format>().unwrap_err(), FsmError::UnknownFormat("svg".into()));
    }
}

//! Binary digit expansions and the machines that compute them: the
//! non-adjacent form (NAF) and the three-half/one-half NAF, obtained as the
//! digitwise difference of the NAFs of `3n/2` and `n/2`.
//!
//! Every builder assembles its machine from the algebra modules rather
//! than from a hand-written transition table, except [`naf1`], which is the
//! classical four-state table.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::automata::{complement, concat, contains_word, determinize, empty_word_automaton, intersection, kleene_star, minimize, union, word_automaton};
use crate::error::{FsmError, Result};
use crate::machine::{build_machine, Machine};
use crate::symbol::{Symbol, Word};
use crate::transducer::{cartesian_product, compose, identity_transducer, minus_transducer, output_projection, simplify, weight_transducer, TransitionFunction, DEFAULT_STATE_CAP};
use crate::Rational;

/// Digits `d_i` weighing `2^(i + exponent_offset)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub digits: Word,
    pub exponent_offset: i64,
}

impl Expansion {
    pub fn new(digits: Word, exponent_offset: i64) -> Self {
        Expansion { digits, exponent_offset }
    }

    pub fn value(&self) -> Result<Rational> {
        eval_expansion(self)
    }

    /// Digits in `{-1, 0, 1}` with no two adjacent nonzeros.
    pub fn is_naf(&self) -> bool {
        match self.digits.to_digits() {
            Some(ds) => ds.iter().all(|d| d.abs() <= 1) && ds.windows(2).all(|p| p[0] == 0 || p[1] == 0),
            None => false,
        }
    }

    pub fn weight(&self) -> Result<usize> {
        hamming_weight(&self.digits)
    }

    /// Most significant digit first with a radix point, e.g. `(1 -1 1 0 2 . 0 0)`.
    pub fn to_positional(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, s) in self.digits.iter().enumerate().rev() {
            parts.push(s.to_string());
            if i as i64 + self.exponent_offset == 0 && i > 0 {
                parts.push(".".to_string());
            }
        }
        format!("({})", parts.join(" "))
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * 2^{}", self.digits, self.exponent_offset)
    }
}

/// Binary digits of `n`, least significant first; empty for 0.
pub fn binary_digits(n: i64) -> Result<Word> {
    if n < 0 {
        return Err(FsmError::NegativeInteger(n));
    }
    let mut ds = Vec::new();
    let mut m = n;
    while m > 0 {
        ds.push(m & 1);
        m >>= 1;
    }
    Ok(Word::digits(&ds))
}

pub fn eval_expansion(e: &Expansion) -> Result<Rational> {
    let ds = e.digits.to_digits().ok_or_else(|| FsmError::NonDigitOutput(e.digits.clone()))?;
    let two = BigInt::from(2);
    let mut value = BigInt::zero();
    for d in ds.iter().rev() {
        value = value * &two + BigInt::from(*d);
    }
    let scale = num_traits::pow(two, e.exponent_offset.unsigned_abs() as usize);
    Ok(if e.exponent_offset >= 0 {
        Rational::from_integer(value * scale)
    } else {
        Rational::new(value, scale)
    })
}

/// Number of nonzero digits.
pub fn hamming_weight(w: &Word) -> Result<usize> {
    let ds = w.to_digits().ok_or_else(|| FsmError::NonDigitOutput(w.clone()))?;
    Ok(ds.iter().filter(|&&d| d != 0).count())
}

/// State label of the NAF transition function: the initial state, or the
/// pending carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NafState {
    Initial,
    Carry(i64),
}

impl fmt::Display for NafState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NafState::Initial => f.write_str("I"),
            NafState::Carry(c) => write!(f, "{c}"),
        }
    }
}

/// Reads two input digits before writing: the first letter is only stored,
/// afterwards the NAF digit of `2 * read + carry` is written and the rest
/// halved into the next carry.
pub fn naf_transition(state: &NafState, read: &Symbol) -> (NafState, Word) {
    let read = read.digit().expect("NAF transducers read digits");
    match *state {
        NafState::Initial => (NafState::Carry(read), Word::empty()),
        NafState::Carry(carry) => {
            let current = 2 * read + carry;
            let write = match current.rem_euclid(4) {
                0 | 2 => 0,
                1 => 1,
                _ => -1,
            };
            (NafState::Carry((current - write) / 2), Word::digits(&[write]))
        }
    }
}

/// Multiplication by 3 with the carry as state.
pub fn triple_transition(carry: &i64, read: &Symbol) -> (i64, Word) {
    let current = 3 * read.digit().expect("digit input") + carry;
    let write = current.rem_euclid(2);
    ((current - write) / 2, Word::digits(&[write]))
}

fn digits(ds: &[i64]) -> Vec<Symbol> {
    ds.iter().copied().map(Symbol::Digit).collect()
}

fn bits() -> Vec<Symbol> {
    digits(&[0, 1])
}

fn signed() -> Vec<Symbol> {
    digits(&[-1, 0, 1])
}

fn zero() -> Symbol {
    Symbol::Digit(0)
}

/// Builders for the named machines with a configurable exploration cap for
/// the transition-function constructions.
#[derive(Debug, Clone, Copy)]
pub struct CaseStudies {
    pub state_cap: usize,
}

impl Default for CaseStudies {
    fn default() -> Self {
        CaseStudies {
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl CaseStudies {
    pub fn new(state_cap: usize) -> Self {
        CaseStudies { state_cap }
    }

    /// `(0 + 10 + -10)* (1 + -1 + ε)`, minimized. Keeps its sink.
    pub fn naf_acceptor(&self) -> Result<Machine> {
        let s = signed();
        let word = |ds: &[i64]| word_automaton(&Word::digits(ds), &s);
        let block = union(
            &union(&word(&[0])?, &concat(&word(&[1])?, &word(&[0])?)?)?,
            &concat(&word(&[-1])?, &word(&[0])?)?,
        )?;
        let tail = union(&union(&word(&[1])?, &word(&[-1])?)?, &empty_word_automaton(&s)?)?;
        minimize(&concat(&kleene_star(&block)?, &tail)?)
    }

    fn forbidden_blocks(&self) -> Result<Vec<Machine>> {
        let s = signed();
        [[1, 1], [1, -1], [-1, 1], [-1, -1]]
            .iter()
            .map(|f| contains_word(&Word::digits(f), &s))
            .collect()
    }

    /// Intersection of the complements of the four forbidden blocks.
    pub fn naf_language2(&self) -> Result<Machine> {
        let mut parts = self.forbidden_blocks()?.into_iter().map(|m| complement(&m));
        let first = parts.next().expect("four blocks")?;
        let product = parts.try_fold(first, |acc, m| intersection(&acc, &m?))?;
        minimize(&product)
    }

    /// Complement of the union of the four forbidden blocks.
    pub fn naf_language3(&self) -> Result<Machine> {
        let mut parts = self.forbidden_blocks()?.into_iter();
        let first = parts.next().expect("four blocks");
        let any = parts.try_fold(first, |acc, m| union(&acc, &m))?;
        minimize(&complement(&determinize(&any)?)?)
    }

    /// Outputs of the NAF transducer on all `{-1, 0, 1}` inputs.
    pub fn naf_language4(&self) -> Result<Machine> {
        minimize(&output_projection(&self.naf_all()?)?)
    }

    /// Binary to NAF, the classical table without final outputs.
    pub fn naf1(&self) -> Result<Machine> {
        let w = Word::digits;
        build_machine(
            &[
                ("I", "0", w(&[0]), w(&[])),
                ("I", "1", w(&[1]), w(&[])),
                ("0", "0", w(&[0]), w(&[0])),
                ("0", "1", w(&[1]), w(&[0])),
                ("1", "0", w(&[0]), w(&[1])),
                ("1", "2", w(&[1]), w(&[-1])),
                ("2", "1", w(&[0]), w(&[0])),
                ("2", "2", w(&[1]), w(&[0])),
            ],
            &["I"],
            &["0"],
            bits(),
        )
    }

    pub fn naf1_completed(&self) -> Result<Machine> {
        self.naf1()?.with_final_word_out(&zero())
    }

    fn naf_from_function(&self, alphabet: Vec<Symbol>) -> Result<Machine> {
        TransitionFunction::new(naf_transition, vec![NafState::Initial], vec![NafState::Carry(0)], alphabet)
            .with_state_cap(self.state_cap)
            .build()?
            .with_final_word_out(&zero())
    }

    /// Binary to NAF from the transition function, completed.
    pub fn naf2(&self) -> Result<Machine> {
        self.naf_from_function(bits())
    }

    /// Any `{-1, 0, 1}` expansion to NAF, completed.
    pub fn naf_all(&self) -> Result<Machine> {
        self.naf_from_function(signed())
    }

    pub fn triple(&self) -> Result<Machine> {
        TransitionFunction::new(triple_transition, vec![0], vec![0], bits())
            .with_state_cap(self.state_cap)
            .build()?
            .with_final_word_out(&zero())
    }

    pub fn identity(&self) -> Result<Machine> {
        identity_transducer(&bits())
    }

    /// Weight over the digits `-2..=2`.
    pub fn weight(&self) -> Result<Machine> {
        weight_transducer(&digits(&[-2, -1, 0, 1, 2]))
    }

    pub fn abs(&self) -> Result<Machine> {
        crate::transducer::abs_transducer(&signed())
    }

    /// Difference of pairs over `{-1, 0, 1}` and the absent marker.
    pub fn minus(&self) -> Result<Machine> {
        minus_transducer(&[-1, 0, 1])
    }

    /// Binary digits of `3n` and `n` side by side.
    pub fn combined_3n_n(&self) -> Result<Machine> {
        Ok(cartesian_product(&self.triple()?, &self.identity()?)?.relabeled())
    }

    /// NAF of `n` starting at the digit of `1/2`, as `3n - n` read at offset
    /// -1.
    pub fn naf3(&self) -> Result<Machine> {
        Ok(compose(&self.minus()?, &self.combined_3n_n()?)?.relabeled())
    }

    /// NAF of `3n` starting at the digit of `1/2`.
    pub fn naf3n(&self) -> Result<Machine> {
        compose(&self.naf3()?, &self.triple()?)
    }

    pub fn combined_naf_3n_n(&self) -> Result<Machine> {
        Ok(cartesian_product(&self.naf3n()?, &self.naf3()?)?.relabeled())
    }

    /// Three-half/one-half NAF starting at the digit of `1/4`.
    pub fn t(&self) -> Result<Machine> {
        Ok(compose(&self.minus()?, &self.combined_naf_3n_n()?)?.relabeled())
    }

    /// Weight of the three-half/one-half NAF, simplified.
    pub fn w(&self) -> Result<Machine> {
        simplify(&compose(&self.weight()?, &self.t()?)?)
    }

    /// Acceptor of all three-half/one-half NAFs, minimized.
    pub fn r(&self) -> Result<Machine> {
        minimize(&output_projection(&self.t()?)?)
    }

    /// Weight of the NAF of binary input.
    pub fn weight_of_naf(&self) -> Result<Machine> {
        compose(&self.weight()?, &self.naf1_completed()?)
    }

    /// Looks up a machine by its preset name.
    pub fn preset(&self, name: &str) -> Result<Machine> {
        match name {
            "naf-acceptor" => self.naf_acceptor(),
            "naf-language2" => self.naf_language2(),
            "naf-language3" => self.naf_language3(),
            "naf-language4" => self.naf_language4(),
            "naf1" => self.naf1(),
            "naf1-completed" => self.naf1_completed(),
            "naf2" => self.naf2(),
            "naf-all" => self.naf_all(),
            "triple" => self.triple(),
            "identity" => self.identity(),
            "weight" => self.weight(),
            "abs" => self.abs(),
            "minus" => self.minus(),
            "naf3" => self.naf3(),
            "naf3n" => self.naf3n(),
            "combined-3n-n" => self.combined_3n_n(),
            "combined-naf-3n-n" => self.combined_naf_3n_n(),
            "weight-naf" => self.weight_of_naf(),
            "T" => self.t(),
            "W" => self.w(),
            "R" => self.r(),
            other => Err(FsmError::UnknownPreset(other.to_string())),
        }
    }
}

pub const PRESETS: &[&str] = &[
    "naf-acceptor",
    "naf-language2",
    "naf-language3",
    "naf-language4",
    "naf1",
    "naf1-completed",
    "naf2",
    "naf-all",
    "triple",
    "identity",
    "weight",
    "abs",
    "minus",
    "naf3",
    "naf3n",
    "combined-3n-n",
    "combined-naf-3n-n",
    "weight-naf",
    "T",
    "W",
    "R",
];

pub fn build_naf_acceptor() -> Result<Machine> {
    CaseStudies::default().naf_acceptor()
}

pub fn build_naf1() -> Result<Machine> {
    CaseStudies::default().naf1()
}

pub fn build_naf2() -> Result<Machine> {
    CaseStudies::default().naf2()
}

pub fn build_naf_all() -> Result<Machine> {
    CaseStudies::default().naf_all()
}

pub fn build_triple() -> Result<Machine> {
    CaseStudies::default().triple()
}

pub fn build_naf3() -> Result<Machine> {
    CaseStudies::default().naf3()
}

pub fn build_t() -> Result<Machine> {
    CaseStudies::default().t()
}

pub fn build_w() -> Result<Machine> {
    CaseStudies::default().w()
}

pub fn build_r() -> Result<Machine> {
    CaseStudies::default().r()
}

/// Hand-placed drawing coordinates for the relabeled states `0..=8` of T.
pub fn t_coordinates() -> std::collections::BTreeMap<String, (f64, f64)> {
    [
        (0, (-2.0, 0.75)),
        (1, (0.0, -1.0)),
        (2, (-6.0, -1.0)),
        (3, (6.0, -1.0)),
        (4, (-4.0, 2.5)),
        (5, (-6.0, 5.0)),
        (6, (6.0, 5.0)),
        (7, (4.0, 2.5)),
        (8, (2.0, 0.75)),
    ]
    .into_iter()
    .map(|(k, xy)| (k.to_string(), xy))
    .collect()
}

/// A completed transducer from binary input to an expansion with a fixed
/// exponent offset, reusable across many inputs.
#[derive(Debug, Clone)]
pub struct Expander {
    machine: Machine,
    offset: i64,
}

impl Expander {
    pub fn new(machine: Machine, offset: i64) -> Self {
        Expander { machine, offset }
    }

    pub fn naf() -> Result<Self> {
        Ok(Expander::new(build_naf2()?, 0))
    }

    pub fn three_half_naf() -> Result<Self> {
        Ok(Expander::new(build_t()?, -2))
    }

    pub fn machine(&self) -> &Machine {
        &self.machine
    }

    pub fn expand(&self, n: i64) -> Result<Expansion> {
        let digits = self.machine.transduce(&binary_digits(n)?)?;
        Ok(Expansion::new(digits, self.offset))
    }
}

pub fn naf_of(n: i64) -> Result<Expansion> {
    Expander::naf()?.expand(n)
}

/// Digits in `{-2, ..., 2}`, offset -2.
pub fn three_half_naf_of(n: i64) -> Result<Expansion> {
    Expander::three_half_naf()?.expand(n)
}

/// `2^k` as a rational, for tests and reports.
pub fn power_of_two(k: i64) -> Rational {
    eval_expansion(&Expansion::new(Word::digits(&[1]), k)).unwrap_or_else(|_| Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn binary() {
        assert_eq!(binary_digits(14).unwrap(), Word::digits(&[0, 1, 1, 1]));
        assert_eq!(binary_digits(0).unwrap(), Word::empty());
        assert_eq!(binary_digits(42).unwrap(), Word::digits(&[0, 1, 0, 1, 0, 1]));
        assert_eq!(binary_digits(-1).unwrap_err(), FsmError::NegativeInteger(-1));
    }

    #[test]
    fn evaluation() {
        let e = |ds: &[i64], off| eval_expansion(&Expansion::new(Word::digits(ds), off)).unwrap();
        assert_eq!(e(&[0, -1, 0, 0, 1], 0), int(14));
        assert_eq!(e(&[0, 0, -1, 0, 0, 1], -1), int(14));
        assert_eq!(e(&[0, 0, 2, 0, 1, -1, 1], -2), int(14));
        assert_eq!(e(&[1], -2), Rational::new(1.into(), 4.into()));
        assert_eq!(e(&[], 3), int(0));
        assert_eq!(power_of_two(-1), Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn weights() {
        assert_eq!(hamming_weight(&Word::digits(&[0, -1, 0, 0, 1])).unwrap(), 2);
        assert_eq!(hamming_weight(&Word::empty()).unwrap(), 0);
        assert_eq!(hamming_weight(&Word::digits(&[0, 0, 2, 0, 1, -1, 1])).unwrap(), 4);
        assert!(hamming_weight(&Word::new(vec![Symbol::Absent])).is_err());
    }

    #[test]
    fn positional_rendering() {
        let e = Expansion::new(Word::digits(&[0, 0, 2, 0, 1, -1, 1]), -2);
        assert_eq!(e.to_positional(), "(1 -1 1 0 2 . 0 0)");
        assert!(!e.is_naf());
        assert!(Expansion::new(Word::digits(&[0, -1, 0, 0, 1]), 0).is_naf());
    }

    #[test]
    fn naf_transition_table() {
        let m = CaseStudies::default().naf_all().unwrap();
        let mut labels: Vec<&str> = m.states().iter().map(|s| s.label.as_str()).collect();
        labels.sort();
        assert_eq!(labels, ["-1", "-2", "0", "1", "2", "I"]);
    }
}

//! Letters and words.
//!
//! A [`Symbol`] is a signed digit, the absent marker produced when one
//! component of a product machine has run out of output, or a pair of
//! symbols. The derived ordering (`Digit < Absent < Pair`, digits by value,
//! pairs lexicographically) is the canonical order used for every iteration
//! over alphabets, so constructions are reproducible.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

pub const MAX_PAIR_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Digit(i64),
    Absent,
    Pair(Box<Symbol>, Box<Symbol>),
}

impl Symbol {
    pub fn pair(left: Symbol, right: Symbol) -> Self {
        Symbol::Pair(Box::new(left), Box::new(right))
    }

    pub fn digit(&self) -> Option<i64> {
        match self {
            Symbol::Digit(d) => Some(*d),
            _ => None,
        }
    }

    /// Number of nested `Pair` layers; digits and `Absent` have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Symbol::Pair(l, r) => 1 + l.depth().max(r.depth()),
            _ => 0,
        }
    }

    fn fmt_nested(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Pair(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl From<i64> for Symbol {
    fn from(d: i64) -> Self {
        Symbol::Digit(d)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Digit(d) => write!(f, "{d}"),
            Symbol::Absent => f.write_str("~"),
            Symbol::Pair(l, r) => {
                l.fmt_nested(f)?;
                f.write_str("|")?;
                r.fmt_nested(f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseSymbolError(pub String);

impl fmt::Display for ParseSymbolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse symbol {:?}", self.0)
    }
}

impl std::error::Error for ParseSymbolError {}

/// Parses the command-line token syntax: `-1`, `~`, `a|b`, `(a|b)|c`.
impl FromStr for Symbol {
    type Err = ParseSymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseSymbolError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        let mut depth = 0i32;
        let mut split = None;
        for (i, c) in t.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '|' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
            if depth < 0 {
                return Err(err());
            }
        }
        if let Some(i) = split {
            let left = t[..i].parse().map_err(|_| err())?;
            let right = t[i + 1..].parse().map_err(|_| err())?;
            return Ok(Symbol::pair(left, right));
        }
        if t.starts_with('(') && t.ends_with(')') {
            return t[1..t.len() - 1].parse().map_err(|_| err());
        }
        if t == "~" {
            return Ok(Symbol::Absent);
        }
        t.parse::<i64>().map(Symbol::Digit).map_err(|_| err())
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Symbol::Digit(d) => serializer.serialize_i64(*d),
            Symbol::Absent => serializer.serialize_str("~"),
            Symbol::Pair(l, r) => {
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(l)?;
                seq.serialize_element(r)?;
                seq.end()
            }
        }
    }
}

struct SymbolVisitor;

impl<'de> Visitor<'de> for SymbolVisitor {
    type Value = Symbol;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer, the string \"~\", or a two-element array")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Symbol, E> {
        Ok(Symbol::Digit(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Symbol, E> {
        i64::try_from(v)
            .map(Symbol::Digit)
            .map_err(|_| E::custom(format!("digit {v} out of range")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Symbol, E> {
        if v == "~" {
            Ok(Symbol::Absent)
        } else {
            Err(E::invalid_value(de::Unexpected::Str(v), &self))
        }
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Symbol, A::Error> {
        let left = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let right = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
        if seq.next_element::<Symbol>()?.is_some() {
            return Err(de::Error::invalid_length(3, &self));
        }
        Ok(Symbol::pair(left, right))
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(SymbolVisitor)
    }
}

/// A finite sequence of symbols, least significant digit first when read as
/// a digit expansion.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn letter(symbol: Symbol) -> Self {
        Word(vec![symbol])
    }

    pub fn digits(ds: &[i64]) -> Self {
        Word(ds.iter().copied().map(Symbol::Digit).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    pub fn push(&mut self, symbol: Symbol) {
        self.0.push(symbol);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    /// The digit values, or `None` if some symbol is not a digit.
    pub fn to_digits(&self) -> Option<Vec<i64>> {
        self.0.iter().map(Symbol::digit).collect()
    }

    /// Sum of the digit values, or `None` if some symbol is not a digit.
    pub fn digit_sum(&self) -> Option<i64> {
        self.0.iter().map(Symbol::digit).sum()
    }

    /// Comma-separated tokens, the command-line input syntax.
    pub fn to_tokens(&self) -> String {
        self.0
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_tokens(s: &str) -> Result<Word, ParseSymbolError> {
        if s.trim().is_empty() {
            return Ok(Word::empty());
        }
        s.split(',').map(str::parse).collect::<Result<_, _>>().map(Word)
    }

    /// Shortlex comparison: shorter words first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl Deref for Word {
    type Target = [Symbol];

    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl IntoIterator for Word {
    type Item = Symbol;
    type IntoIter = std::vec::IntoIter<Symbol>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Symbol;
    type IntoIter = std::slice::Iter<'a, Symbol>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        let pair = Symbol::pair(Symbol::Digit(-5), Symbol::Digit(0));
        assert!(Symbol::Digit(-1) < Symbol::Digit(0));
        assert!(Symbol::Digit(1000) < Symbol::Absent);
        assert!(Symbol::Absent < pair);
        assert!(
            Symbol::pair(Symbol::Digit(0), Symbol::Absent)
                < Symbol::pair(Symbol::Digit(1), Symbol::Digit(-1))
        );
        assert!(
            Symbol::pair(Symbol::Digit(0), Symbol::Digit(3))
                < Symbol::pair(Symbol::Digit(0), Symbol::Absent)
        );
        assert_eq!(Symbol::Absent, Symbol::Absent);
    }

    #[test]
    fn empty_word_differs_from_absent() {
        assert_ne!(Word::empty(), Word::letter(Symbol::Absent));
        assert!(Word::empty().is_empty());
    }

    #[test]
    fn token_syntax() {
        let w = Word::parse_tokens("0,-1, ~ ,1|~,(0|1)|2").unwrap();
        assert_eq!(
            w,
            Word::new(vec![
                Symbol::Digit(0),
                Symbol::Digit(-1),
                Symbol::Absent,
                Symbol::pair(Symbol::Digit(1), Symbol::Absent),
                Symbol::pair(
                    Symbol::pair(Symbol::Digit(0), Symbol::Digit(1)),
                    Symbol::Digit(2)
                ),
            ])
        );
        assert_eq!(w.to_tokens(), "0,-1,~,1|~,(0|1)|2");
        assert_eq!(Word::parse_tokens("").unwrap(), Word::empty());
        assert!(Word::parse_tokens("0,x").is_err());
        assert!(Word::parse_tokens("0,,1").is_err());
    }

    #[test]
    fn json_encoding() {
        let w = Word::new(vec![
            Symbol::Digit(-2),
            Symbol::Absent,
            Symbol::pair(Symbol::Digit(0), Symbol::Absent),
        ]);
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, r#"[-2,"~",[0,"~"]]"#);
        assert_eq!(serde_json::from_str::<Word>(&text).unwrap(), w);
        assert!(serde_json::from_str::<Symbol>(r#""x""#).is_err());
        assert!(serde_json::from_str::<Symbol>("[1,2,3]").is_err());
        assert!(serde_json::from_str::<Symbol>("[1]").is_err());
    }

    #[test]
    fn depth_and_sums() {
        let s = Symbol::pair(Symbol::pair(Symbol::Digit(0), Symbol::Absent), Symbol::Digit(1));
        assert_eq!(s.depth(), 2);
        assert_eq!(Word::digits(&[0, -1, 0, 0, 1]).digit_sum(), Some(0));
        assert_eq!(Word::new(vec![Symbol::Absent]).digit_sum(), None);
    }
}

//! Words over a named generator alphabet.
//!
//! Generator names are one ASCII letter optionally followed by digits (`x`, `c12`).
//! Text syntax: letters concatenated, `^k` or `^{k}` for exponents, `[u, v]`
//! for the commutator `u v u^-1 v^-1`; whitespace and `*` are ignored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// A freely reduced word. Adjacent letters never share a generator and no exponent is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<(String, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(name: &str) -> Self {
        Word::power_of(name, 1)
    }

    pub fn power_of(name: &str, exp: i64) -> Self {
        Word::from_pairs([(name.to_string(), exp)])
    }

    /// Builds a word from `(generator, exponent)` pairs, reducing freely.
    pub fn from_pairs<I: IntoIterator<Item = (String, i64)>>(pairs: I) -> Self {
        let mut letters: Vec<(String, i64)> = Vec::new();
        for (gen, exp) in pairs {
            push_reduced(&mut letters, gen, exp);
        }
        Word { letters }
    }

    pub fn letters(&self) -> impl Iterator<Item = (&str, &i64)> {
        self.letters.iter().map(|(g, e)| (g.as_str(), e))
    }

    pub fn syllables(&self) -> &[(String, i64)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letter count: `g^k` contributes `|k|`.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|(g, e)| (g.clone(), -e)).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for (g, e) in &other.letters {
            push_reduced(&mut letters, g.clone(), *e);
        }
        Word { letters }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.concat(&base);
        }
        acc
    }

    /// `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    pub fn exponent_sum(&self, gen: &str) -> i64 {
        self.letters.iter().filter(|(g, _)| g == gen).map(|(_, e)| e).sum()
    }

    pub fn occurrences(&self, gen: &str) -> usize {
        self.letters.iter().filter(|(g, _)| g == gen).count()
    }

    pub fn mentions(&self, gen: &str) -> bool {
        self.occurrences(gen) > 0
    }

    /// Replaces every occurrence of `gen` by `replacement`, reducing the result.
    pub fn substitute(&self, gen: &str, replacement: &Word) -> Word {
        let mut out = Word::identity();
        for (g, e) in &self.letters {
            let piece = if g == gen { replacement.pow(*e) } else { Word::power_of(g, *e) };
            out = out.concat(&piece);
        }
        out
    }

    /// Splits as `prefix g^e suffix` at syllable `index`.
    pub(crate) fn split_at_syllable(&self, index: usize) -> (Word, Word) {
        (Word { letters: self.letters[..index].to_vec() }, Word { letters: self.letters[index + 1..].to_vec() })
    }
}

fn push_reduced(letters: &mut Vec<(String, i64)>, gen: String, exp: i64) {
    if exp == 0 {
        return;
    }
    match letters.last_mut() {
        Some((g, e)) if *g == gen => {
            *e += exp;
            if *e == 0 {
                letters.pop();
            }
        }
        _ => letters.push((gen, exp)),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (g, e) in &self.letters {
            f.write_str(g)?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let mut parser = Parser { chars: &chars, pos: 0, src: s };
        let w = parser.sequence()?;
        if parser.pos != chars.len() {
            return Err(parser.err("trailing input"));
        }
        Ok(w)
    }
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sequence(&mut self) -> Result<Word, Error> {
        let mut acc = Word::identity();
        loop {
            let atom = match self.peek() {
                Some('[') => {
                    self.pos += 1;
                    let u = self.sequence()?;
                    if self.peek() != Some(',') {
                        return Err(self.err("expected ','"));
                    }
                    self.pos += 1;
                    let v = self.sequence()?;
                    if self.peek() != Some(']') {
                        return Err(self.err("expected ']'"));
                    }
                    self.pos += 1;
                    Word::commutator(&u, &v)
                }
                Some('(') => {
                    self.pos += 1;
                    let inner = self.sequence()?;
                    if self.peek() != Some(')') {
                        return Err(self.err("expected ')'"));
                    }
                    self.pos += 1;
                    inner
                }
                Some('1') if self.pos == 0 || !self.chars[self.pos - 1].is_ascii_alphanumeric() => {
                    self.pos += 1;
                    Word::identity()
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let start = self.pos;
                    self.pos += 1;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    let name: String = self.chars[start..self.pos].iter().collect();
                    Word::generator(&name)
                }
                _ => break,
            };
            let exp = self.exponent()?;
            acc = acc.concat(&atom.pow(exp));
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<i64, Error> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let braced = self.peek() == Some('{');
        if braced {
            self.pos += 1;
        }
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let exp = text.parse::<i64>().map_err(|_| self.err("bad exponent"))?;
        if braced {
            if self.peek() != Some('}') {
                return Err(self.err("expected '}'"));
            }
            self.pos += 1;
        }
        Ok(exp)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

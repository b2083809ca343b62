use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Longest word a [`Word`] can hold.
pub const MAX_WORD_LEN: usize = 15;
/// Largest auxiliary letter index (codes are 4 bits wide).
pub const MAX_AUX: u8 = 14;

/// A basis letter of the one-particle space: the `A`-eigenvectors `e`, `ebar`
/// and `U`-fixed orthonormal auxiliary directions `Aux(1)`, `Aux(2)`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    E,
    EBar,
    Aux(u8),
}

impl Letter {
    pub fn code(self) -> u8 {
        match self {
            Letter::E => 0,
            Letter::EBar => 1,
            Letter::Aux(k) => 1 + k,
        }
    }

    pub fn from_code(code: u8) -> Letter {
        match code {
            0 => Letter::E,
            1 => Letter::EBar,
            c => Letter::Aux(c - 1),
        }
    }

    /// The bar conjugate used in Wick expansions.
    pub fn bar(self) -> Letter {
        match self {
            Letter::E => Letter::EBar,
            Letter::EBar => Letter::E,
            aux => aux,
        }
    }

    /// `<l, l>_U`.
    pub fn u_norm_sq(self, lambda: f64) -> f64 {
        match self {
            Letter::E => lambda.powf(-0.5),
            Letter::EBar => lambda.sqrt(),
            Letter::Aux(_) => 1.0,
        }
    }

    /// Eigenvalue of the analytic generator `A`.
    pub fn a_eigenvalue(self, lambda: f64) -> f64 {
        match self {
            Letter::E => 1.0 / lambda,
            Letter::EBar => lambda,
            Letter::Aux(_) => 1.0,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::E => f.write_str("e"),
            Letter::EBar => f.write_str("Ebar"),
            Letter::Aux(k) => write!(f, "Aux{k}"),
        }
    }
}

/// A word of at most [`MAX_WORD_LEN`] letters packed in a `u64`: the length
/// in the top nibble, then letter 0 in bits 56..60, letter 1 in bits 52..56
/// and so on. The derived order is therefore by length, then lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(u64);

const LETTER_MASK: u64 = (1 << 60) - 1;

impl Word {
    pub const EMPTY: Word = Word(0);

    pub fn from_letters(letters: &[Letter]) -> Result<Word> {
        if letters.len() > MAX_WORD_LEN {
            return Err(Error::Domain(format!(
                "word of length {} exceeds {MAX_WORD_LEN}",
                letters.len()
            )));
        }
        let mut w = Word::EMPTY;
        for &l in letters {
            if let Letter::Aux(k) = l {
                if k == 0 || k > MAX_AUX {
                    return Err(Error::Domain(format!("auxiliary index {k} out of 1..={MAX_AUX}")));
                }
            }
            w = w.push_back(l);
        }
        Ok(w)
    }

    pub fn single(l: Letter) -> Word {
        Word::EMPTY.push_back(l)
    }

    /// `l` repeated `n` times.
    pub fn power(l: Letter, n: usize) -> Word {
        (0..n).fold(Word::EMPTY, |w, _| w.push_back(l))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        (self.0 >> 60) as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    fn code_at(self, i: usize) -> u8 {
        ((self.0 >> (56 - 4 * i)) & 0xF) as u8
    }

    pub fn get(self, i: usize) -> Letter {
        debug_assert!(i < self.len());
        Letter::from_code(self.code_at(i))
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn first(self) -> Option<Letter> {
        (!self.is_empty()).then(|| self.get(0))
    }

    /// `l` followed by `self`. Caller guarantees `len < MAX_WORD_LEN`.
    pub fn push_front(self, l: Letter) -> Word {
        debug_assert!(self.len() < MAX_WORD_LEN);
        let body = (self.0 & LETTER_MASK) >> 4 | (l.code() as u64) << 56;
        Word(((self.len() as u64 + 1) << 60) | body)
    }

    /// `self` followed by `l`. Caller guarantees `len < MAX_WORD_LEN`.
    pub fn push_back(self, l: Letter) -> Word {
        let n = self.len();
        debug_assert!(n < MAX_WORD_LEN);
        let body = (self.0 & LETTER_MASK) | (l.code() as u64) << (56 - 4 * n);
        Word(((n as u64 + 1) << 60) | body)
    }

    /// The word with letter `i` deleted.
    pub fn remove(self, i: usize) -> Word {
        let n = self.len();
        debug_assert!(i < n);
        let body = self.0 & LETTER_MASK;
        let cut = 60 - 4 * i;
        let head = if i == 0 { 0 } else { body >> cut << cut };
        let tail = (body << (4 * (i + 1))) & LETTER_MASK;
        let tail = tail >> (4 * i);
        Word(((n as u64 - 1) << 60) | head | tail)
    }

    /// Letters `1..` of the word.
    pub fn tail(self) -> Word {
        self.remove(0)
    }

    pub fn reversed(self) -> Word {
        let mut w = Word::EMPTY;
        for i in (0..self.len()).rev() {
            w = w.push_back(self.get(i));
        }
        w
    }

    /// Concatenation; `None` when the result would not fit.
    pub fn concat(self, other: Word) -> Option<Word> {
        let n = self.len() + other.len();
        if n > MAX_WORD_LEN {
            return None;
        }
        let body = (self.0 & LETTER_MASK) | (other.0 & LETTER_MASK) >> (4 * self.len());
        Some(Word(((n as u64) << 60) | body))
    }

    /// Prefix of length `k` and the remaining suffix.
    pub fn split_at(self, k: usize) -> (Word, Word) {
        let n = self.len();
        debug_assert!(k <= n);
        let body = self.0 & LETTER_MASK;
        let head = if k == 0 { 0 } else { body >> (60 - 4 * k) << (60 - 4 * k) };
        let tail = (body << (4 * k)) & LETTER_MASK;
        (Word(((k as u64) << 60) | head), Word((((n - k) as u64) << 60) | tail))
    }

    /// Letter counts, indexed by letter code.
    pub fn signature(self) -> Signature {
        let mut s = Signature::EMPTY;
        for i in 0..self.len() {
            s = s.add(Letter::from_code(self.code_at(i)));
        }
        s
    }

    pub fn count(self, l: Letter) -> usize {
        (0..self.len()).filter(|&i| self.code_at(i) == l.code()).count()
    }

    /// Maximal runs of equal letters, in order.
    pub fn runs(self) -> Vec<(Letter, usize)> {
        let mut runs: Vec<(Letter, usize)> = Vec::new();
        for l in self.letters() {
            match runs.last_mut() {
                Some((last, n)) if *last == l => *n += 1,
                _ => runs.push((l, 1)),
            }
        }
        runs
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("Word(Ω)")
        } else {
            write!(f, "Word({self})")
        }
    }
}

/// Parses concatenated letter tokens `e`, `Ebar`, `Aux<k>`; the empty string
/// is the vacuum word.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let mut letters = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix("Ebar") {
                letters.push(Letter::EBar);
                rest = r;
            } else if let Some(r) = rest.strip_prefix('e') {
                letters.push(Letter::E);
                rest = r;
            } else if let Some(r) = rest.strip_prefix("Aux") {
                let digits = r.chars().take_while(|c| c.is_ascii_digit()).count();
                let k: u8 = r[..digits]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad auxiliary index in {s:?}")))?;
                letters.push(Letter::Aux(k));
                rest = &r[digits..];
            } else {
                return Err(Error::Parse(format!("unrecognized letter at {rest:?} in {s:?}")));
            }
        }
        Word::from_letters(&letters)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Letter multiset of a word: a 4-bit count per letter code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(u64);

impl Signature {
    pub const EMPTY: Signature = Signature(0);

    pub fn count(self, l: Letter) -> usize {
        ((self.0 >> (4 * l.code())) & 0xF) as usize
    }

    pub fn add(self, l: Letter) -> Signature {
        Signature(self.0 + (1 << (4 * l.code())))
    }

    /// Removes one `l`; `None` if the multiset has none.
    pub fn sub(self, l: Letter) -> Option<Signature> {
        (self.count(l) > 0).then(|| Signature(self.0 - (1 << (4 * l.code()))))
    }

    pub fn level(self) -> usize {
        (0..16).map(|i| ((self.0 >> (4 * i)) & 0xF) as usize).sum()
    }

    /// `#e - #ebar`.
    pub fn charge(self) -> i64 {
        self.count(Letter::E) as i64 - self.count(Letter::EBar) as i64
    }

    /// Multiset with `e` and `ebar` counts exchanged.
    pub fn barred(self) -> Signature {
        let e = self.count(Letter::E) as u64;
        let eb = self.count(Letter::EBar) as u64;
        Signature((self.0 & !0xFF) | eb | e << 4)
    }

    /// `prod <l, l>_U` over the multiset, i.e. `lambda^((#ebar - #e)/2)`.
    pub fn u_scale(self, lambda: f64) -> f64 {
        lambda.powf(-0.5 * self.charge() as f64)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for code in 0..16u8 {
            let l = Letter::from_code(code);
            let c = self.count(l);
            if c > 0 {
                parts.push(format!("{l}^{c}"));
            }
        }
        if parts.is_empty() {
            f.write_str("{}")
        } else {
            write!(f, "{{{}}}", parts.join(","))
        }
    }
}

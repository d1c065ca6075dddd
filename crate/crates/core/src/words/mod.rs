//! Alphabets, freely and cyclically reduced words, exact counting and
//! uniform sampling in the free group `F(a_1, ..., a_k)`.

mod automaton;
mod count;
mod enumerate;
mod sample;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use automaton::{count_with_prefix_constraint, AcceptAll, FactorAvoider, LetterAutomaton};
pub use count::{count_cyclic, CountEntry, CountTable};
pub use enumerate::{enumerate_cyclic, for_each_cyclic, freely_reduced_prefixes, CyclicWords};
pub use sample::{sample_cyclic, sample_cyclic_with, sample_freely_reduced_with};

/// A signed generator index: `i` stands for `a_i`, `-i` for its inverse.
pub type Letter = i32;

/// Rendering of the empty word.
pub const EMPTY_WORD: &str = "ε";

/// The `2k` letters `{±1, ..., ±k}` of a free group of rank `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank < 2 {
            return Err(Error::InvalidRank(rank));
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of signed letters, `2k`.
    pub fn size(&self) -> usize {
        2 * self.rank
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter != 0 && letter.unsigned_abs() as usize <= self.rank
    }

    /// Position of `letter` in the ascending order `-k < ... < -1 < 1 < ... < k`.
    #[inline]
    pub fn index(&self, letter: Letter) -> usize {
        let k = self.rank as i32;
        if letter < 0 {
            (letter + k) as usize
        } else {
            (letter + k - 1) as usize
        }
    }

    #[inline]
    pub fn letter_at(&self, index: usize) -> Letter {
        let k = self.rank as i32;
        let i = index as i32;
        if i < k {
            i - k
        } else {
            i - k + 1
        }
    }

    /// All letters in ascending signed order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        let k = self.rank as i32;
        (-k..=k).filter(|&l| l != 0)
    }

    fn check(&self, letter: Letter) -> Result<()> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(Error::InvalidLetter {
                letter: letter as i64,
                rank: self.rank,
            })
        }
    }

    /// Parses the text form of a word (`abAB`, `1 2 -1 -2`, or `ε`) and
    /// freely reduces it.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let letters = parse_letters(text, *self)?;
        Word::free_reduce(letters, *self)
    }

    pub fn parse_cyclic(&self, text: &str) -> Result<CyclicWord> {
        CyclicWord::new(self.parse(text)?)
    }
}

fn parse_letters(text: &str, alphabet: Alphabet) -> Result<Vec<Letter>> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == EMPTY_WORD {
        return Ok(Vec::new());
    }
    let err = |reason: String| Error::Parse {
        text: text.to_string(),
        reason,
    };
    if trimmed.chars().any(|c| c.is_ascii_digit()) {
        trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                let value: i64 = t.parse().map_err(|_| err(format!("bad token {t:?}")))?;
                let letter = i32::try_from(value).map_err(|_| err(format!("bad token {t:?}")))?;
                alphabet.check(letter)?;
                Ok(letter)
            })
            .collect()
    } else {
        trimmed
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                let letter = if c.is_ascii_lowercase() {
                    (c as u8 - b'a' + 1) as Letter
                } else if c.is_ascii_uppercase() {
                    -((c as u8 - b'A' + 1) as Letter)
                } else {
                    return Err(err(format!("unexpected character {c:?}")));
                };
                alphabet.check(letter)?;
                Ok(letter)
            })
            .collect()
    }
}

/// Writes letters in the compact form for rank ≤ 26 and the generic signed
/// integer form otherwise.
pub fn format_letters(letters: &[Letter], rank: usize) -> String {
    if letters.is_empty() {
        return EMPTY_WORD.to_string();
    }
    if rank <= 26 {
        letters
            .iter()
            .map(|&l| {
                let base = if l > 0 { b'a' } else { b'A' };
                (base + (l.unsigned_abs() as u8) - 1) as char
            })
            .collect()
    } else {
        letters
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn is_freely_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|p| p[1] != -p[0])
}

pub fn is_cyclically_reduced(letters: &[Letter]) -> bool {
    is_freely_reduced(letters)
        && match (letters.first(), letters.last()) {
            (Some(&f), Some(&l)) if letters.len() > 1 => l != -f,
            _ => true,
        }
}

/// A freely reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<Letter>,
}

impl Word {
    /// Freely reduces `raw`, rejecting letters outside the alphabet.
    pub fn free_reduce<I>(raw: I, alphabet: Alphabet) -> Result<Word>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut letters: Vec<Letter> = Vec::new();
        for x in raw {
            alphabet.check(x)?;
            if letters.last() == Some(&-x) {
                letters.pop();
            } else {
                letters.push(x);
            }
        }
        Ok(Word { alphabet, letters })
    }

    pub fn empty(alphabet: Alphabet) -> Word {
        Word {
            alphabet,
            letters: Vec::new(),
        }
    }

    /// Wraps letters already known to be freely reduced and valid.
    pub(crate) fn from_reduced(letters: Vec<Letter>, alphabet: Alphabet) -> Word {
        debug_assert!(is_freely_reduced(&letters));
        debug_assert!(letters.iter().all(|&l| alphabet.contains(l)));
        Word { alphabet, letters }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: self.alphabet,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        is_cyclically_reduced(&self.letters)
    }

    /// Strips matching inverse letters from both ends; the result is a
    /// conjugate of `self`.
    pub fn cyclic_reduce(&self) -> CyclicWord {
        let w = &self.letters;
        let (mut lo, mut hi) = (0, w.len());
        while hi - lo >= 2 && w[hi - 1] == -w[lo] {
            lo += 1;
            hi -= 1;
        }
        CyclicWord(Word::from_reduced(w[lo..hi].to_vec(), self.alphabet))
    }

    /// Contiguous subword `letters[start..end]`.
    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word::from_reduced(self.letters[start..end].to_vec(), self.alphabet)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.letters, self.alphabet.rank))
    }
}

/// A cyclically reduced word. The empty word and single letters qualify.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn new(word: Word) -> Result<CyclicWord> {
        if word.is_cyclically_reduced() {
            Ok(CyclicWord(word))
        } else {
            Err(Error::InvalidInput(format!(
                "{word} is not cyclically reduced"
            )))
        }
    }

    pub fn from_letters(letters: Vec<Letter>, alphabet: Alphabet) -> Result<CyclicWord> {
        for &l in &letters {
            alphabet.check(l)?;
        }
        if !is_cyclically_reduced(&letters) {
            return Err(Error::InvalidInput(format!(
                "{} is not cyclically reduced",
                format_letters(&letters, alphabet.rank)
            )));
        }
        Ok(CyclicWord(Word { alphabet, letters }))
    }

    pub(crate) fn from_cyclic_letters(letters: Vec<Letter>, alphabet: Alphabet) -> CyclicWord {
        debug_assert!(is_cyclically_reduced(&letters));
        CyclicWord(Word { alphabet, letters })
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0.letters
    }

    pub fn alphabet(&self) -> Alphabet {
        self.0.alphabet
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord(self.0.inverse())
    }

    /// The cyclic permutation starting at position `shift`.
    pub fn rotation(&self, shift: usize) -> CyclicWord {
        let w = self.letters();
        if w.is_empty() {
            return self.clone();
        }
        let s = shift % w.len();
        let letters = w[s..].iter().chain(&w[..s]).copied().collect();
        CyclicWord::from_cyclic_letters(letters, self.alphabet())
    }

    pub fn rotations(&self) -> impl Iterator<Item = CyclicWord> + '_ {
        (0..self.len().max(1)).map(move |s| self.rotation(s))
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<CyclicWord> for Word {
    fn from(w: CyclicWord) -> Word {
        w.0
    }
}

//! Core value types: patterns over a variable alphabet and concrete words
//! over a finite alphabet, plus letter statistics and small generators.
//!
//! Patterns are canonicalized at construction: variables are renumbered
//! `0..k-1` in order of first occurrence, so two pattern texts that are
//! renamings of each other compare equal structurally.

use crate::{Error, Result};

/// Maximum alphabet size for concrete words (symbols are stored as `u8`).
pub const MAX_ALPHABET: usize = 256;

/// A pattern word over a variable alphabet, in canonical form.
///
/// Variables are small integers numbered in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    symbols: Vec<u8>,
    multiplicities: Vec<u32>,
}

impl Pattern {
    /// Builds a pattern from raw variable identifiers, canonicalizing by
    /// first occurrence.
    pub fn from_symbols(raw: &[usize]) -> Result<Pattern> {
        if raw.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let mut map: Vec<(usize, u8)> = Vec::new();
        let mut symbols = Vec::with_capacity(raw.len());
        for &s in raw {
            let id = match map.iter().find(|(orig, _)| *orig == s) {
                Some(&(_, id)) => id,
                None => {
                    let id = map.len();
                    if id >= 255 {
                        return Err(Error::InvalidParameter(
                            "patterns support at most 255 distinct variables".into(),
                        ));
                    }
                    map.push((s, id as u8));
                    id as u8
                }
            };
            symbols.push(id);
        }
        let k = map.len();
        let mut multiplicities = vec![0u32; k];
        for &s in &symbols {
            multiplicities[s as usize] += 1;
        }
        Ok(Pattern { symbols, multiplicities })
    }

    /// Parses ASCII letter text (case-sensitive) into a canonical pattern.
    pub fn parse(text: &str) -> Result<Pattern> {
        if text.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let mut raw = Vec::with_capacity(text.len());
        for c in text.chars() {
            if !c.is_ascii_alphabetic() {
                return Err(Error::InvalidPatternChar(c));
            }
            raw.push(c as usize);
        }
        Pattern::from_symbols(&raw)
    }

    /// Renders the canonical form as letters: variable `0` is `a`, ...,
    /// variable `25` is `z`, then `A`..`Z`.
    pub fn render(&self) -> String {
        self.symbols
            .iter()
            .map(|&v| {
                if v < 26 {
                    (b'a' + v) as char
                } else if v < 52 {
                    (b'A' + v - 26) as char
                } else {
                    '?'
                }
            })
            .collect()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // patterns are nonempty by construction
    }

    /// Number of distinct variables.
    pub fn distinct(&self) -> usize {
        self.multiplicities.len()
    }

    /// Occurrence count per variable, indexed by canonical variable id.
    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Minimum multiplicity over all variables.
    pub fn min_multiplicity(&self) -> u32 {
        *self.multiplicities.iter().min().expect("nonempty")
    }

    /// Gcd of all multiplicities.
    pub fn multiplicity_gcd(&self) -> u32 {
        self.multiplicities.iter().fold(0, |g, &m| gcd(g, m))
    }

    /// True iff every variable occurs at least twice.
    pub fn is_doubled(&self) -> bool {
        self.multiplicities.iter().all(|&m| m >= 2)
    }

    /// True iff the multiplicity multisets agree under some variable
    /// bijection.
    pub fn is_anagram_of(&self, other: &Pattern) -> bool {
        if self.len() != other.len() || self.distinct() != other.distinct() {
            return false;
        }
        let mut a = self.multiplicities.clone();
        let mut b = other.multiplicities.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    /// The Zimin word `Z_n`: `Z_1 = a`, `Z_{i+1} = Z_i x_{i+1} Z_i`.
    /// `Z_n` has length `2^n - 1` and `n` distinct variables.
    pub fn zimin(n: u32) -> Result<Pattern> {
        if n == 0 {
            return Err(Error::ZiminIndexZero);
        }
        let mut raw: Vec<usize> = vec![0];
        for v in 1..n as usize {
            let prev = raw.clone();
            raw.push(v);
            raw.extend_from_slice(&prev);
        }
        Pattern::from_symbols(&raw)
    }

    pub fn letter_stats(&self) -> LetterStats {
        LetterStats::from_counts(self.len(), self.distinct())
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// A concrete word over an alphabet of size `q`, stored as symbol indices.
///
/// The empty word is representable as a value; operations that require a
/// nonempty word reject it explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<u8>,
    alphabet_size: usize,
}

impl Word {
    pub fn new(symbols: Vec<u8>, alphabet_size: usize) -> Result<Word> {
        if alphabet_size == 0 {
            return Err(Error::InvalidAlphabetSize(alphabet_size));
        }
        if alphabet_size > MAX_ALPHABET {
            return Err(Error::AlphabetTooLarge(alphabet_size));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s as usize >= alphabet_size) {
            return Err(Error::SymbolOutOfRange { symbol: s as usize, q: alphabet_size });
        }
        Ok(Word { symbols, alphabet_size })
    }

    /// Parses lowercase/uppercase ASCII letters: `a..z` map to `0..25`,
    /// `A..Z` to `26..51`. The alphabet size defaults to the smallest size
    /// covering the symbols present.
    pub fn parse(text: &str) -> Result<Word> {
        let mut symbols = Vec::with_capacity(text.len());
        let mut max = 0usize;
        for c in text.chars() {
            let s = if c.is_ascii_lowercase() {
                c as u8 - b'a'
            } else if c.is_ascii_uppercase() {
                26 + (c as u8 - b'A')
            } else {
                return Err(Error::InvalidWordChar(c));
            };
            max = max.max(s as usize + 1);
            symbols.push(s);
        }
        Word::new(symbols, max.max(1))
    }

    /// Same as [`Word::parse`] but with an explicit alphabet size.
    pub fn parse_with_alphabet(text: &str, q: usize) -> Result<Word> {
        let w = Word::parse(text)?;
        Word::new(w.symbols, q)
    }

    pub fn render(&self) -> String {
        self.symbols
            .iter()
            .map(|&s| {
                if s < 26 {
                    (b'a' + s) as char
                } else if s < 52 {
                    (b'A' + s - 26) as char
                } else {
                    '?'
                }
            })
            .collect()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn letter_stats(&self) -> LetterStats {
        let mut seen = [false; MAX_ALPHABET];
        let mut distinct = 0usize;
        for &s in &self.symbols {
            if !seen[s as usize] {
                seen[s as usize] = true;
                distinct += 1;
            }
        }
        LetterStats::from_counts(self.symbols.len(), distinct)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }}

/// Letter statistics: `length = distinct + repeats`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LetterStats {
    pub length: usize,
    pub distinct: usize,
    pub repeats: usize,
}

impl LetterStats {
    fn from_counts(length: usize, distinct: usize) -> LetterStats {
        LetterStats { length, distinct, repeats: length - distinct }
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_canonicalizes_renamings() {
        let p = Pattern::parse("huh").unwrap();
        assert_eq!(p.symbols(), &[0, 1, 0]);
        assert_eq!(p, Pattern::parse("xyx").unwrap());
        assert_eq!(p, Pattern::parse("ZzZ").unwrap());
    }

    #[test]
    fn parse_cool() {
        let p = Pattern::parse("cool").unwrap();
        assert_eq!(p.symbols(), &[0, 1, 1, 2]);
        assert_eq!(p.multiplicities(), &[1, 2, 1]);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert_eq!(Pattern::parse(""), Err(Error::EmptyPattern));
        assert!(matches!(Pattern::parse("a b"), Err(Error::InvalidPatternChar(' '))));
        assert!(matches!(Pattern::parse("x1"), Err(Error::InvalidPatternChar('1'))));
    }

    #[test]
    fn letter_stats_banana() {
        let w = Word::parse("banana").unwrap();
        let s = w.letter_stats();
        assert_eq!((s.length, s.distinct, s.repeats), (6, 3, 3));
    }

    #[test]
    fn letter_stats_small() {
        let s = Word::parse("a").unwrap().letter_stats();
        assert_eq!((s.length, s.distinct, s.repeats), (1, 1, 0));
        let s = Pattern::parse("abacaba").unwrap().letter_stats();
        assert_eq!((s.length, s.distinct, s.repeats), (7, 3, 4));
    }

    #[test]
    fn doubled_classifier() {
        assert!(Pattern::parse("xx").unwrap().is_doubled());
        assert!(!Pattern::parse("aba").unwrap().is_doubled());
        assert!(Pattern::parse("xyxy").unwrap().is_doubled());
    }

    #[test]
    fn zimin_words() {
        assert_eq!(Pattern::zimin(1).unwrap(), Pattern::parse("a").unwrap());
        assert_eq!(Pattern::zimin(2).unwrap(), Pattern::parse("aba").unwrap());
        assert_eq!(Pattern::zimin(3).unwrap(), Pattern::parse("abacaba").unwrap());
        assert_eq!(Pattern::zimin(0), Err(Error::ZiminIndexZero));
    }

    #[test]
    fn zimin_structure() {
        for n in 1..=6u32 {
            let z = Pattern::zimin(n).unwrap();
            assert_eq!(z.len(), (1usize << n) - 1);
            assert_eq!(z.distinct(), n as usize);
            let singles =
                z.multiplicities().iter().filter(|&&m| m == 1).count();
            assert_eq!(singles, 1, "exactly the center variable occurs once");
            assert!(!z.is_doubled());
        }
    }

    #[test]
    fn anagram_checks() {
        let xyxy = Pattern::parse("xyxy").unwrap();
        let xxyy = Pattern::parse("xxyy").unwrap();
        assert!(xyxy.is_anagram_of(&xxyy));
        assert!(!Pattern::parse("xx").unwrap().is_anagram_of(&Pattern::parse("xy").unwrap()));
        assert!(Pattern::parse("abba").unwrap().is_anagram_of(&Pattern::parse("aabb").unwrap()));
    }

    #[test]
    fn word_validation() {
        assert!(Word::new(vec![0, 1, 2], 3).is_ok());
        assert_eq!(
            Word::new(vec![0, 3], 3),
            Err(Error::SymbolOutOfRange { symbol: 3, q: 3 })
        );
        assert_eq!(Word::new(vec![], 0), Err(Error::InvalidAlphabetSize(0)));
        // empty word is a representable value
        assert!(Word::new(vec![], 1).unwrap().is_empty());
    }

    #[test]
    fn word_parse_render_roundtrip() {
        let w = Word::parse("banana").unwrap();
        assert_eq!(w.render(), "banana");
        assert_eq!(w.alphabet_size(), 14); // 'n' is index 13
    }
}

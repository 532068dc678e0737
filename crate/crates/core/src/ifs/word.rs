use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite word over the alphabet `{1, ..., N}`.
///
/// Symbols are stored zero-based (`0` stands for map `f_1`); `Display` and
/// `FromStr` use the one-based, dot-separated form `1.2.1`, with `θ` for the
/// empty word. The derived ordering is lexicographic with a prefix ordered
/// before its extensions, which is the order every enumerator emits.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from zero-based symbols.
    pub fn from_indices(indices: Vec<usize>) -> Self {
        Word(indices)
    }

    /// Builds a word from one-based symbols, checking them against `n_maps`.
    pub fn from_symbols(symbols: &[usize], n_maps: usize) -> Result<Self> {
        let mut indices = Vec::with_capacity(symbols.len());
        for &s in symbols {
            if s == 0 || s > n_maps {
                return Err(Error::InvalidWord { word: format!("{symbols:?}"), symbol: s, n_maps });
            }
            indices.push(s - 1);
        }
        Ok(Word(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// The first `n` symbols. Panics if `n > self.len()`.
    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    /// Drops the first `h` symbols. Panics if `h > self.len()`.
    pub fn drop_left(&self, h: usize) -> Word {
        Word(self.0[h..].to_vec())
    }

    /// Drops the last `h` symbols. Panics if `h > self.len()`.
    pub fn drop_right(&self, h: usize) -> Word {
        Word(self.0[..self.0.len() - h].to_vec())
    }

    /// The word with its last symbol removed, or `None` for the empty word.
    pub fn parent(&self) -> Option<Word> {
        if self.is_empty() {
            None
        } else {
            Some(self.drop_right(1))
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Appends the zero-based symbol `i`.
    pub fn child(&self, i: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(i);
        Word(v)
    }

    /// Strict prefix relation: `self` is a proper predecessor of `other`.
    pub fn precedes(&self, other: &Word) -> bool {
        self.len() < other.len() && other.0.starts_with(&self.0)
    }

    pub fn comparable(&self, other: &Word) -> bool {
        self == other || self.precedes(other) || other.precedes(self)
    }

    /// Checks every symbol against an alphabet of size `n_maps`.
    pub fn validate(&self, n_maps: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= n_maps) {
            Some(&bad) => Err(Error::InvalidWord { word: self.to_string(), symbol: bad + 1, n_maps }),
            None => Ok(()),
        }
    }

    /// All words of length `depth` over `n_maps` symbols, in lexicographic order.
    pub fn level(n_maps: usize, depth: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..depth {
            out = out.iter().flat_map(|w| (0..n_maps).map(move |i| w.child(i))).collect();
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("θ");
        }
        for (pos, i) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "θ" {
            return Ok(Word::empty());
        }
        let mut indices = Vec::new();
        for part in s.split('.') {
            let sym: usize =
                part.trim().parse().map_err(|_| Error::InvalidInput(format!("bad word symbol {part:?} in {s:?}")))?;
            if sym == 0 {
                return Err(Error::InvalidInput(format!("word symbols are one-based: {s:?}")));
            }
            indices.push(sym - 1);
        }
        Ok(Word(indices))
    }
}

/// True iff `words` is a finite maximal antichain over `n_maps` symbols.
///
/// The words are checked for pairwise incomparability and for covering the
/// full `n_maps`-ary tree: every internal node of their prefix tree must have
/// all `n_maps` children.
pub fn is_maximal_antichain(n_maps: usize, words: &[Word]) -> Result<bool> {
    if words.is_empty() {
        return Err(Error::InvalidInput("empty word set".into()));
    }
    if n_maps == 0 {
        return Err(Error::InvalidInput("alphabet must be nonempty".into()));
    }
    for w in words {
        w.validate(n_maps)?;
    }
    let mut sorted: Vec<&Word> = words.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Ok(false);
    }
    Ok(covers(n_maps, &sorted, 0))
}

fn covers(n_maps: usize, words: &[&Word], depth: usize) -> bool {
    if words.len() == 1 && words[0].len() == depth {
        return true;
    }
    // Anything ending here while siblings continue is a comparable pair.
    if words.iter().any(|w| w.len() <= depth) {
        return false;
    }
    let mut start = 0;
    for sym in 0..n_maps {
        let end = start + words[start..].iter().take_while(|w| w.0[depth] == sym).count();
        if end == start || !covers(n_maps, &words[start..end], depth + 1) {
            return false;
        }
        start = end;
    }
    start == words.len()
}

//! Small sets of agent indices.
//!
//! Choice functions are evaluated millions of times on brute-force paths, so
//! partner sets are dense bitsets rather than tree sets. The word vector is kept
//! trimmed (no trailing zero words) so that derived equality and ordering are
//! set equality and a total order that is stable across runs.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct AgentSet {
    words: Vec<u64>,
}

impl AgentSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(index: usize) -> Self {
        let mut s = Self::new();
        s.insert(index);
        s
    }

    /// The set `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        (0..n).collect()
    }

    pub fn insert(&mut self, index: usize) -> bool {
        let (w, b) = (index / WORD, index % WORD);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, index: usize) -> bool {
        let (w, b) = (index / WORD, index % WORD);
        if w >= self.words.len() {
            return false;
        }
        let present = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        self.trim();
        present
    }

    pub fn contains(&self, index: usize) -> bool {
        let (w, b) = (index / WORD, index % WORD);
        w < self.words.len() && self.words[w] & (1 << b) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_subset(&self, other: &AgentSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn union(&self, other: &AgentSet) -> AgentSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.word(i) | other.word(i))
            .collect();
        AgentSet { words }
    }

    pub fn intersection(&self, other: &AgentSet) -> AgentSet {
        let n = self.words.len().min(other.words.len());
        let mut s = AgentSet {
            words: (0..n).map(|i| self.word(i) & other.word(i)).collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &AgentSet) -> AgentSet {
        let mut s = AgentSet {
            words: (0..self.words.len())
                .map(|i| self.word(i) & !other.word(i))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn with(&self, index: usize) -> AgentSet {
        let mut s = self.clone();
        s.insert(index);
        s
    }

    pub fn without(&self, index: usize) -> AgentSet {
        let mut s = self.clone();
        s.remove(index);
        s
    }

    /// Indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Subset of `universe` selected by the low bits of `mask`, where bit `i`
    /// stands for `universe[i]`.
    pub fn from_mask(universe: &[usize], mask: u64) -> AgentSet {
        universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &a)| a)
            .collect()
    }

    /// Inverse of [`AgentSet::from_mask`]; `None` if the set leaves `universe`.
    pub fn to_mask(&self, universe: &[usize]) -> Option<u64> {
        let mut mask = 0u64;
        for a in self.iter() {
            let pos = universe.iter().position(|&u| u == a)?;
            mask |= 1 << pos;
        }
        Some(mask)
    }

    fn word(&self, i: usize) -> u64 {
        self.words.get(i).copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<usize> for AgentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = AgentSet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl PartialOrd for AgentSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on the sorted element lists.
impl Ord for AgentSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

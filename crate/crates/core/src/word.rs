//! *-words: finite products of labelled family symbols and their adjoints.

use std::fmt;

use crate::error::{Error, Result};

/// Exponent of a single symbol occurrence: the symbol itself or its adjoint.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum StarExp {
    Plain,
    Star,
}

impl StarExp {
    pub fn flipped(self) -> StarExp {
        match self {
            StarExp::Plain => StarExp::Star,
            StarExp::Star => StarExp::Plain,
        }
    }
}

/// One letter of a word: a family label (1-based) with an exponent.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter {
    pub label: u8,
    pub exp: StarExp,
}

impl Letter {
    pub fn new(label: u8, exp: StarExp) -> Letter {
        Letter { label, exp }
    }
}

/// An ordered word of letters; the empty word is the identity (moment 1).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct StarWord(Vec<Letter>);

impl StarWord {
    pub fn new(letters: Vec<Letter>) -> Result<StarWord> {
        if let Some(bad) = letters.iter().find(|l| l.label == 0) {
            return Err(Error::Domain(format!("letter has label 0: {bad:?}")));
        }
        Ok(StarWord(letters))
    }

    pub fn empty() -> StarWord {
        StarWord(Vec::new())
    }

    pub fn from_pairs(pairs: &[(u8, StarExp)]) -> StarWord {
        StarWord(
            pairs
                .iter()
                .map(|&(label, exp)| {
                    assert!(label > 0, "labels are 1-based");
                    Letter { label, exp }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// `w*`: reversed order, every exponent flipped.
    pub fn adjoint(&self) -> StarWord {
        StarWord(
            self.0
                .iter()
                .rev()
                .map(|l| Letter::new(l.label, l.exp.flipped()))
                .collect(),
        )
    }

    /// Cyclic rotation by `k` positions to the left.
    pub fn rotated_left(&self, k: usize) -> StarWord {
        if self.is_empty() {
            return self.clone();
        }
        let k = k % self.len();
        let mut letters = self.0[k..].to_vec();
        letters.extend_from_slice(&self.0[..k]);
        StarWord(letters)
    }

    pub fn concat(&self, other: &StarWord) -> StarWord {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        StarWord(letters)
    }

    /// Subword at the given 1-based positions, order preserved.
    pub fn subword(&self, positions: &[usize]) -> Result<StarWord> {
        let mut letters = Vec::with_capacity(positions.len());
        for &p in positions {
            if p < 1 || p > self.len() {
                return Err(Error::Domain(format!(
                    "position {p} outside word of length {}",
                    self.len()
                )));
            }
            letters.push(self.0[p - 1]);
        }
        Ok(StarWord(letters))
    }

    pub fn exponents(&self) -> Vec<StarExp> {
        self.0.iter().map(|l| l.exp).collect()
    }

    /// Sorted distinct labels.
    pub fn distinct_labels(&self) -> Vec<u8> {
        let mut labels: Vec<u8> = self.0.iter().map(|l| l.label).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// The common label, if the word is nonempty and single-labelled.
    pub fn single_label(&self) -> Option<u8> {
        let labels = self.distinct_labels();
        if labels.len() == 1 {
            Some(labels[0])
        } else {
            None
        }
    }
}

impl fmt::Display for StarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "c{}", l.label)?;
            if l.exp == StarExp::Star {
                write!(f, "*")?;
            }
        }
        Ok(())
    }
}

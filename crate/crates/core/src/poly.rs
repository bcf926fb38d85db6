//! Noncommutative *-polynomials over the family symbols, with expansion,
//! adjoint, powers, moment evaluation under any state, and the text syntax
//! used by CLI configs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::cumulant::{MomentFunctional, WORD_CAP};
use crate::error::{Error, Result};
use crate::scalar::Rat;
use crate::word::{Letter, StarExp, StarWord};

/// A finite linear combination of *-words with exact rational coefficients.
/// The empty word is the identity; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NCPolynomial {
    terms: BTreeMap<StarWord, Rat>,
}

impl NCPolynomial {
    pub fn zero() -> NCPolynomial {
        NCPolynomial::default()
    }

    /// The identity polynomial.
    pub fn one() -> NCPolynomial {
        NCPolynomial::from_word(StarWord::empty())
    }

    pub fn from_word(word: StarWord) -> NCPolynomial {
        let mut terms = BTreeMap::new();
        terms.insert(word, Rat::one());
        NCPolynomial { terms }
    }

    /// A single family symbol `c_label` or `c_label*`.
    pub fn symbol(label: u8, exp: StarExp) -> NCPolynomial {
        NCPolynomial::from_word(StarWord::from_pairs(&[(label, exp)]))
    }

    pub fn from_terms<I: IntoIterator<Item = (StarWord, Rat)>>(iter: I) -> NCPolynomial {
        let mut poly = NCPolynomial::zero();
        for (word, coeff) in iter {
            poly.accumulate(word, coeff);
        }
        poly
    }

    fn accumulate(&mut self, word: StarWord, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(word);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&StarWord, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &StarWord) -> Rat {
        self.terms.get(word).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(StarWord::len).max().unwrap_or(0)
    }

    /// Sorted distinct labels appearing in any term.
    pub fn labels(&self) -> Vec<u8> {
        let mut labels: Vec<u8> = self
            .terms
            .keys()
            .flat_map(|w| w.letters().iter().map(|l| l.label))
            .collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    pub fn scale(&self, factor: &Rat) -> NCPolynomial {
        NCPolynomial::from_terms(
            self.terms
                .iter()
                .map(|(w, c)| (w.clone(), c * factor)),
        )
    }

    /// Adjoint: reverse each word, flip each exponent; coefficients are
    /// real rationals, so conjugation is the identity.
    pub fn adjoint(&self) -> NCPolynomial {
        NCPolynomial::from_terms(self.terms.iter().map(|(w, c)| (w.adjoint(), c.clone())))
    }

    /// Structural symmetry: `a = a*`.
    pub fn is_symmetric(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn pow(&self, k: usize) -> NCPolynomial {
        let mut acc = NCPolynomial::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `φ(a^k)`: expand the power and sum coefficient-weighted word
    /// moments. Errors with the offending length if any expanded word would
    /// exceed the engine cap.
    pub fn moment(&self, k: usize, phi: &dyn MomentFunctional) -> Result<Rat> {
        let worst = self.max_word_len() * k;
        if worst > WORD_CAP {
            return Err(Error::SizeLimit {
                what: "expanded word length",
                got: worst,
                limit: WORD_CAP,
            });
        }
        let expanded = self.pow(k);
        let mut acc = Rat::zero();
        for (word, coeff) in expanded.terms() {
            acc += coeff * phi.moment(word)?;
        }
        Ok(acc)
    }
}

impl Add for &NCPolynomial {
    type Output = NCPolynomial;

    fn add(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (w, c) in rhs.terms.iter() {
            out.accumulate(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NCPolynomial {
    type Output = NCPolynomial;

    fn sub(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (w, c) in rhs.terms.iter() {
            out.accumulate(w.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &NCPolynomial {
    type Output = NCPolynomial;

    fn mul(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = NCPolynomial::zero();
        for (wa, ca) in self.terms.iter() {
            for (wb, cb) in rhs.terms.iter() {
                out.accumulate(wa.concat(wb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (word, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{coeff}")?;
            if word.is_empty() {
                write!(f, "*I")?;
            } else {
                for l in word.letters() {
                    write!(f, "*c{}", l.label)?;
                    if l.exp == StarExp::Star {
                        write!(f, "^*")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Which symbol family a parsed polynomial uses: raw cross-covariance
/// symbols `C<l>` or centered-scaled symbols `E<l>`. Mixing is rejected.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SymbolFamily {
    C,
    E,
}

/// A parsed polynomial plus the symbol family it was written in
/// (`None` when only `I` appears).
#[derive(Clone, Debug)]
pub struct ParsedPoly {
    pub poly: NCPolynomial,
    pub family: Option<SymbolFamily>,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Plus,
    Minus,
    Times,
    Number(Rat),
    Identity,
    Symbol { family: SymbolFamily, letter: Letter },
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' => i += 1,
            b'+' => {
                tokens.push((i, Token::Plus));
                i += 1;
            }
            b'-' => {
                tokens.push((i, Token::Minus));
                i += 1;
            }
            b'*' => {
                tokens.push((i, Token::Times));
                i += 1;
            }
            b'I' => {
                tokens.push((i, Token::Identity));
                i += 1;
            }
            b'C' | b'E' => {
                let family = if b == b'C' { SymbolFamily::C } else { SymbolFamily::E };
                let start = i;
                i += 1;
                let digit = bytes.get(i).copied().filter(u8::is_ascii_digit).ok_or(
                    Error::Parse {
                        pos: i,
                        msg: format!("expected a digit after '{}'", b as char),
                    },
                )?;
                let label = digit - b'0';
                if label == 0 {
                    return Err(Error::Parse {
                        pos: i,
                        msg: "symbol labels start at 1".into(),
                    });
                }
                i += 1;
                let exp = if bytes.get(i) == Some(&b'^') {
                    if bytes.get(i + 1) != Some(&b'*') {
                        return Err(Error::Parse {
                            pos: i + 1,
                            msg: "expected '*' after '^'".into(),
                        });
                    }
                    i += 2;
                    StarExp::Star
                } else {
                    StarExp::Plain
                };
                tokens.push((
                    start,
                    Token::Symbol {
                        family,
                        letter: Letter::new(label, exp),
                    },
                ));
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let slice = &text[start..i];
                let value = crate::scalar::parse_rat(slice).ok_or(Error::Parse {
                    pos: start,
                    msg: format!("bad number '{slice}'"),
                })?;
                tokens.push((start, Token::Number(value)));
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character '{}'", b as char),
                });
            }
        }
    }
    Ok(tokens)
}

/// Parses the CLI polynomial syntax: terms `coef*SYM[*SYM...]` joined by
/// `+`/`-`, with `SYM` one of `I`, `C<digit>`, `C<digit>^*`, `E<digit>`,
/// `E<digit>^*`. The coefficient is an optional decimal.
pub fn parse_poly(text: &str) -> Result<ParsedPoly> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty polynomial".into(),
        });
    }
    let mut poly = NCPolynomial::zero();
    let mut family: Option<(SymbolFamily, usize)> = None;
    let mut i = 0usize;
    let end = text.len();
    loop {
        // optional unary minus at the start of a term
        let mut sign = Rat::one();
        if let Some((_, Token::Minus)) = tokens.get(i) {
            sign = -sign;
            i += 1;
        }
        // factors separated by '*'
        let mut coeff = sign;
        let mut word = StarWord::empty();
        let mut factors = 0usize;
        loop {
            let (pos, tok) = tokens.get(i).ok_or(Error::Parse {
                pos: end,
                msg: "expected a factor".into(),
            })?;
            match tok {
                Token::Number(v) => coeff *= v,
                Token::Identity => {}
                Token::Symbol { family: fam, letter } => {
                    match family {
                        None => family = Some((*fam, *pos)),
                        Some((seen, _)) if seen != *fam => {
                            return Err(Error::Parse {
                                pos: *pos,
                                msg: "cannot mix C and E symbols in one polynomial".into(),
                            });
                        }
                        _ => {}
                    }
                    word = word.concat(&StarWord::new(vec![*letter])?);
                }
                _ => {
                    return Err(Error::Parse {
                        pos: *pos,
                        msg: "expected a number or symbol".into(),
                    });
                }
            }
            factors += 1;
            i += 1;
            match tokens.get(i) {
                Some((_, Token::Times)) => i += 1,
                _ => break,
            }
        }
        if factors == 0 {
            return Err(Error::Parse {
                pos: end,
                msg: "empty term".into(),
            });
        }
        poly.accumulate(word, coeff);
        match tokens.get(i) {
            None => break,
            Some((_, Token::Plus)) | Some((_, Token::Minus)) => {
                // Minus separates and negates the next term; rewind so the
                // term parser sees it as its unary sign
                if matches!(tokens[i].1, Token::Plus) {
                    i += 1;
                }
            }
            Some((pos, _)) => {
                return Err(Error::Parse {
                    pos: *pos,
                    msg: "expected '+' or '-' between terms".into(),
                });
            }
        }
    }
    Ok(ParsedPoly {
        poly,
        family: family.map(|(f, _)| f),
    })
}

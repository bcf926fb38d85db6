//! Centered-scaled limits: substitute `C_l = ρ_l·I + √(p/n_l)·E_l` into a
//! polynomial in raw symbols and take the regime where every `p/n_l → 0`.
//!
//! With the overall `√(n_ref/p)` scaling, words of length ≥ 2 in the
//! centered symbols vanish, single letters survive with a `√(n_ref/n_l)`
//! factor, and the identity coefficient must cancel exactly — otherwise
//! the limit diverges. Coefficients of the limit live in the ring of
//! `rational·√rational` values, carried exactly.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::cumulant::{elliptic_family_moment, FamilyParams};
use crate::error::{Error, Result};
use crate::poly::NCPolynomial;
use crate::scalar::{exact_sqrt, to_f64, Rat};
use crate::word::{Letter, StarWord};

/// Per-label ratio limits `ν_l = lim n_ref/n_l` against a chosen reference
/// sample-size sequence; `ν_l = 0` drops the label from the limit.
#[derive(Clone, Debug)]
pub struct RatioLimits {
    map: BTreeMap<u8, Rat>,
}

impl RatioLimits {
    pub fn new(entries: Vec<(u8, Rat)>) -> Result<RatioLimits> {
        let mut map = BTreeMap::new();
        for (label, nu) in entries {
            if label == 0 {
                return Err(Error::Domain("labels are 1-based".into()));
            }
            if nu.is_negative() {
                return Err(Error::Domain(format!("ratio limit for label {label} is negative")));
            }
            if map.insert(label, nu).is_some() {
                return Err(Error::Domain(format!("label {label} given twice")));
            }
        }
        Ok(RatioLimits { map })
    }

    pub fn get(&self, label: u8) -> Result<&Rat> {
        self.map.get(&label).ok_or(Error::UnknownLabel(label))
    }
}

/// An exact `coef·√radicand` value. Perfect-square radicands are folded
/// into the rational part, so purely rational values have radicand 1.
#[derive(Clone, Debug)]
pub struct SqrtCoeff {
    coef: Rat,
    radicand: Rat,
}

impl SqrtCoeff {
    pub fn new(coef: Rat, radicand: Rat) -> Result<SqrtCoeff> {
        if radicand.is_negative() {
            return Err(Error::Domain("radicand must be >= 0".into()));
        }
        if coef.is_zero() || radicand.is_zero() {
            return Ok(SqrtCoeff {
                coef: Rat::zero(),
                radicand: Rat::one(),
            });
        }
        match exact_sqrt(&radicand) {
            Some(root) => Ok(SqrtCoeff {
                coef: coef * root,
                radicand: Rat::one(),
            }),
            None => Ok(SqrtCoeff { coef, radicand }),
        }
    }

    pub fn rational(coef: Rat) -> SqrtCoeff {
        SqrtCoeff {
            coef,
            radicand: Rat::one(),
        }
    }

    pub fn coef(&self) -> &Rat {
        &self.coef
    }

    pub fn radicand(&self) -> &Rat {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.coef) * to_f64(&self.radicand).sqrt()
    }
}

impl PartialEq for SqrtCoeff {
    fn eq(&self, other: &SqrtCoeff) -> bool {
        // a√q = b√r iff the signs agree and a²q = b²r
        if self.coef.is_zero() && other.coef.is_zero() {
            return true;
        }
        self.coef.is_positive() == other.coef.is_positive()
            && &self.coef * &self.coef * &self.radicand
                == &other.coef * &other.coef * &other.radicand
    }
}

impl Eq for SqrtCoeff {}

impl std::fmt::Display for SqrtCoeff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", self.coef)
        } else {
            write!(f, "{}*sqrt({})", self.coef, self.radicand)
        }
    }
}

/// The limiting polynomial in centered symbols: a linear combination of
/// single letters `e_l`, `e_l*` with [`SqrtCoeff`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LimitPolynomial {
    terms: BTreeMap<Letter, SqrtCoeff>,
}

impl LimitPolynomial {
    pub fn from_terms<I: IntoIterator<Item = (Letter, SqrtCoeff)>>(iter: I) -> LimitPolynomial {
        let mut terms = BTreeMap::new();
        for (letter, coeff) in iter {
            if !coeff.is_zero() {
                terms.insert(letter, coeff);
            }
        }
        LimitPolynomial { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Letter, &SqrtCoeff)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `φ(Π^k)` under the free elliptic family with the given per-label
    /// parameters. Any word with a nonzero elliptic moment pairs letters
    /// within labels, so every radicand appears an even number of times
    /// and the result is rational.
    pub fn moment(&self, k: usize, elliptic_params: &BTreeMap<u8, Rat>) -> Result<Rat> {
        if k == 0 {
            return Ok(Rat::one());
        }
        let letters: Vec<(&Letter, &SqrtCoeff)> = self.terms.iter().collect();
        if letters.is_empty() {
            return Ok(Rat::zero());
        }
        let mut total = Rat::zero();
        let mut choice = vec![0usize; k];
        loop {
            let word = StarWord::new(
                choice.iter().map(|&i| *letters[i].0).collect(),
            )?;
            let m = elliptic_family_moment(&word, elliptic_params)?;
            if !m.is_zero() {
                let mut coef_prod = Rat::one();
                let mut rad_prod = Rat::one();
                for &i in &choice {
                    coef_prod *= letters[i].1.coef();
                    rad_prod *= letters[i].1.radicand();
                }
                let root = exact_sqrt(&rad_prod).ok_or_else(|| {
                    Error::Domain(format!(
                        "radicand product {rad_prod} is not a perfect square"
                    ))
                })?;
                total += coef_prod * root * m;
            }
            // odometer over letter choices
            let mut pos = 0;
            loop {
                if pos == k {
                    return Ok(total);
                }
                choice[pos] += 1;
                if choice[pos] < letters.len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }
}

impl std::fmt::Display for LimitPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (letter, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({coeff})*e{}", letter.label)?;
            if letter.exp == crate::word::StarExp::Star {
                write!(f, "^*")?;
            }
        }
        Ok(())
    }
}

/// Substitutes `C_l = ρ_l·I + √(p/n_l)·E_l` into `a`, applies the overall
/// `√(n_ref/p)` scaling, and takes the `p/n_l → 0` limit:
///
/// - words of length ≥ 2 in the centered symbols vanish;
/// - a single letter with label `l` keeps its accumulated rational
///   coefficient times `√ν_l`, and drops out entirely when `ν_l = 0`;
/// - the identity coefficient must vanish exactly, otherwise the scaled
///   polynomial diverges and the limit is reported as such.
pub fn centered_scaled_limit(
    a: &NCPolynomial,
    params: &FamilyParams,
    ratios: &RatioLimits,
) -> Result<LimitPolynomial> {
    const SUBSET_CAP: usize = 16;
    let mut identity_total = Rat::zero();
    let mut letter_totals: BTreeMap<Letter, Rat> = BTreeMap::new();
    for (word, coeff) in a.terms() {
        let len = word.len();
        if len > SUBSET_CAP {
            return Err(Error::SizeLimit {
                what: "word length",
                got: len,
                limit: SUBSET_CAP,
            });
        }
        // expand Π_i (ρ_{l_i}·I + s_{l_i}·E_{l_i}^{η_i}) over which positions
        // take the centered symbol
        for mask in 0u32..(1u32 << len) {
            let picked = mask.count_ones() as usize;
            if picked >= 2 {
                continue;
            }
            let mut q = coeff.clone();
            let mut picked_letter = None;
            for (i, letter) in word.letters().iter().enumerate() {
                if mask & (1 << i) != 0 {
                    picked_letter = Some(*letter);
                } else {
                    q *= params.rho(letter.label)?;
                }
            }
            if q.is_zero() {
                continue;
            }
            match picked_letter {
                None => identity_total += q,
                Some(letter) => {
                    *letter_totals.entry(letter).or_insert_with(Rat::zero) += q;
                }
            }
        }
    }
    if !identity_total.is_zero() {
        return Err(Error::Divergent(format!(
            "identity coefficient {identity_total} survives the √(n/p) scaling; \
             the polynomial is not centered"
        )));
    }
    let mut terms = BTreeMap::new();
    for (letter, q) in letter_totals {
        if q.is_zero() {
            continue;
        }
        let nu = ratios.get(letter.label)?;
        if nu.is_zero() {
            // the label's sample size dominates the reference: the term
            // drops out of the limit
            continue;
        }
        let coeff = SqrtCoeff::new(q, nu.clone())?;
        if !coeff.is_zero() {
            terms.insert(letter, coeff);
        }
    }
    Ok(LimitPolynomial { terms })
}

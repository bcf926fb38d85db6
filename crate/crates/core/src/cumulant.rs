//! Moment↔free-cumulant transforms over the NC lattice and the exact
//! functionals of free families of cross-covariance and elliptic variables.
//!
//! The cross-covariance marginal cumulant of a word with exponents
//! `η_1..η_k` is `y^{k−1}·ρ^{S}` (for `ρ ≠ 0`) where `S` counts cyclically
//! adjacent equal exponents; at `ρ = 0` only words with `S = 0` survive.
//! Family moments follow by summing multiplicatively over non-crossing
//! partitions whose blocks are label-constant. Elliptic variables have
//! order-2 cumulants only, so their joint moments are non-crossing pair
//! partition sums.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::partition::{enumerate_nc_pair, nc_level, NCPartition, PAIR_ENUM_BOUND};
use crate::scalar::{int, powu, Rat};
use crate::word::{StarExp, StarWord};

/// Default cap on word length for transforms that sum over all of NC(n);
/// NC(8) has 1430 elements, keeping the sums sub-second.
pub const WORD_CAP: usize = 8;

/// A state: assigns an exact scalar to every *-word, with moment 1 on the
/// empty word. Backends must be tracial; tests assert it.
pub trait MomentFunctional {
    fn moment(&self, word: &StarWord) -> Result<Rat>;
    fn backend_name(&self) -> &'static str;
}

/// Joint free cumulants: defined for words of length ≥ 1.
pub trait CumulantFunctional {
    fn cumulant(&self, word: &StarWord) -> Result<Rat>;
    fn backend_name(&self) -> &'static str;
}

/// Cyclic count of adjacent equal exponents, with `η_{k+1} = η_1`.
/// A single letter is cyclically adjacent to itself, so `S = 1`.
pub fn s_statistic(etas: &[StarExp]) -> Result<usize> {
    if etas.is_empty() {
        return Err(Error::Domain("S-statistic of an empty exponent list".into()));
    }
    let k = etas.len();
    Ok((0..k).filter(|&u| etas[u] == etas[(u + 1) % k]).count())
}

/// Cyclic adjacent-equal count of the exponents restricted to a block,
/// taken in block order.
pub fn t_block_statistic(block: &[usize], etas: &[StarExp]) -> Result<usize> {
    if block.is_empty() {
        return Err(Error::Domain("T-statistic of an empty block".into()));
    }
    let sub: Result<Vec<StarExp>> = block
        .iter()
        .map(|&j| {
            if j < 1 || j > etas.len() {
                Err(Error::Domain(format!(
                    "block index {j} outside exponent list of length {}",
                    etas.len()
                )))
            } else {
                Ok(etas[j - 1])
            }
        })
        .collect();
    s_statistic(&sub?)
}

/// Marginal cross-covariance cumulant `κ_k(c^{η_1},…,c^{η_k})`:
/// `y^{k−1}·ρ^S` when `ρ ≠ 0`, and `y^{k−1}·[S = 0]` when `ρ = 0`.
pub fn cc_cumulant(etas: &[StarExp], rho: &Rat, y: &Rat) -> Result<Rat> {
    if !y.is_positive() {
        return Err(Error::Domain(
            "cross-covariance cumulants need y > 0; y = 0 is the centered elliptic regime".into(),
        ));
    }
    if rho.abs() > Rat::one() {
        return Err(Error::Domain("|rho| must be <= 1".into()));
    }
    let s = s_statistic(etas)?;
    let k = etas.len();
    let scale = powu(y, k - 1);
    if rho.is_zero() {
        Ok(if s == 0 { scale } else { Rat::zero() })
    } else {
        Ok(scale * powu(rho, s))
    }
}

/// Order-2 elliptic cumulant: equal exponents give the parameter, unequal
/// give 1. All other orders are zero.
pub fn elliptic_cumulant(etas: &[StarExp], param: &Rat) -> Rat {
    if etas.len() != 2 {
        return Rat::zero();
    }
    if etas[0] == etas[1] {
        param.clone()
    } else {
        Rat::one()
    }
}

/// Per-label family parameters `(ρ_l, y_l)`.
///
/// `y_l = 0` is allowed by the type (it routes to the elliptic regime);
/// the cross-covariance moment operations themselves require `y_l > 0`.
#[derive(Clone, Debug)]
pub struct FamilyParams {
    map: BTreeMap<u8, (Rat, Rat)>,
}

impl FamilyParams {
    pub fn new(entries: Vec<(u8, Rat, Rat)>) -> Result<FamilyParams> {
        let mut map = BTreeMap::new();
        for (label, rho, y) in entries {
            if label == 0 {
                return Err(Error::Domain("labels are 1-based".into()));
            }
            if rho.abs() > Rat::one() {
                return Err(Error::Domain(format!("|rho_{label}| must be <= 1")));
            }
            if y.is_negative() {
                return Err(Error::Domain(format!("y_{label} must be >= 0")));
            }
            if map.insert(label, (rho, y)).is_some() {
                return Err(Error::Domain(format!("label {label} given twice")));
            }
        }
        Ok(FamilyParams { map })
    }

    pub fn rho(&self, label: u8) -> Result<&Rat> {
        self.map
            .get(&label)
            .map(|(r, _)| r)
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn y(&self, label: u8) -> Result<&Rat> {
        self.map
            .get(&label)
            .map(|(_, y)| y)
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn labels(&self) -> impl Iterator<Item = u8> + '_ {
        self.map.keys().copied()
    }
}

fn check_word_cap(len: usize) -> Result<()> {
    if len > WORD_CAP {
        return Err(Error::SizeLimit {
            what: "word length",
            got: len,
            limit: WORD_CAP,
        });
    }
    Ok(())
}

/// Multiplicative extension `φ_π[w] = Π_{V ∈ π} φ(w|_V)`, order preserved
/// inside each block.
pub fn phi_pi(p: &NCPartition, w: &StarWord, phi: &dyn MomentFunctional) -> Result<Rat> {
    if p.n() != w.len() {
        return Err(Error::Domain(format!(
            "partition of {} points against word of length {}",
            p.n(),
            w.len()
        )));
    }
    let mut acc = Rat::one();
    for block in p.blocks() {
        acc *= phi.moment(&w.subword(block)?)?;
    }
    Ok(acc)
}

/// Multiplicative extension `κ_π[w] = Π_{V ∈ π} κ(w|_V)`.
pub fn kappa_pi(p: &NCPartition, w: &StarWord, kappa: &dyn CumulantFunctional) -> Result<Rat> {
    if p.n() != w.len() {
        return Err(Error::Domain(format!(
            "partition of {} points against word of length {}",
            p.n(),
            w.len()
        )));
    }
    let mut acc = Rat::one();
    for block in p.blocks() {
        acc *= kappa.cumulant(&w.subword(block)?)?;
    }
    Ok(acc)
}

/// `φ(w) = Σ_{π ∈ NC(n)} κ_π[w]` — the moment-free cumulant relation.
pub fn moments_from_cumulants(w: &StarWord, kappa: &dyn CumulantFunctional) -> Result<Rat> {
    check_word_cap(w.len())?;
    if w.is_empty() {
        return Ok(Rat::one());
    }
    let level = nc_level(w.len())?;
    let mut acc = Rat::zero();
    for p in &level.parts {
        acc += kappa_pi(p, w, kappa)?;
    }
    Ok(acc)
}

/// `κ_n(w) = Σ_{σ ∈ NC(n)} φ_σ[w]·μ(σ, 1_n)` — exact Möbius inversion of
/// [`moments_from_cumulants`].
pub fn cumulants_from_moments(w: &StarWord, phi: &dyn MomentFunctional) -> Result<Rat> {
    check_word_cap(w.len())?;
    if w.is_empty() {
        return Err(Error::Domain("cumulants start at order 1".into()));
    }
    let level = nc_level(w.len())?;
    let mobius = level.mobius_top();
    let mut acc = Rat::zero();
    for (i, sigma) in level.parts.iter().enumerate() {
        if mobius[i] == 0 {
            continue;
        }
        acc += phi_pi(sigma, w, phi)? * int(mobius[i]);
    }
    Ok(acc)
}

/// Mixed *-moments of a free family of cross-covariance variables, by the
/// direct sum over non-crossing partitions with label-constant blocks:
/// each block `V` contributes `y^{|V|−1}·ρ^{T̃(V)}` (with the `ρ = 0`
/// indicator branch).
pub fn cc_family_moment(w: &StarWord, params: &FamilyParams) -> Result<Rat> {
    check_word_cap(w.len())?;
    cc_family_moment_unchecked(w, params)
}

/// As [`cc_family_moment`] with a raised word-length cap, for callers that
/// accept the larger enumeration cost (NC(12) has 208012 elements).
pub fn cc_family_moment_with_bound(
    w: &StarWord,
    params: &FamilyParams,
    bound: usize,
) -> Result<Rat> {
    let bound = bound.min(crate::partition::MAX_ENUM_BOUND);
    if w.len() > bound {
        return Err(Error::SizeLimit {
            what: "word length",
            got: w.len(),
            limit: bound,
        });
    }
    cc_family_moment_unchecked(w, params)
}

fn cc_family_moment_unchecked(w: &StarWord, params: &FamilyParams) -> Result<Rat> {
    if w.is_empty() {
        return Ok(Rat::one());
    }
    for label in w.distinct_labels() {
        params.rho(label)?;
    }
    let etas = w.exponents();
    let labels: Vec<u8> = w.letters().iter().map(|l| l.label).collect();
    let level = nc_level(w.len())?;
    let mut acc = Rat::zero();
    'parts: for p in &level.parts {
        let mut term = Rat::one();
        for block in p.blocks() {
            let label = labels[block[0] - 1];
            if block.iter().any(|&j| labels[j - 1] != label) {
                continue 'parts;
            }
            let rho = params.rho(label)?;
            let y = params.y(label)?;
            if !y.is_positive() {
                return Err(Error::Domain(format!(
                    "label {label} has y = 0; centered elliptic scaling applies instead"
                )));
            }
            let t = t_block_statistic(block, &etas)?;
            let factor = if rho.is_zero() {
                if t == 0 {
                    powu(y, block.len() - 1)
                } else {
                    Rat::zero()
                }
            } else {
                powu(y, block.len() - 1) * powu(rho, t)
            };
            if factor.is_zero() {
                continue 'parts;
            }
            term *= factor;
        }
        acc += term;
    }
    Ok(acc)
}

/// A free family of cross-covariance variables. As a [`MomentFunctional`]
/// it evaluates the direct label-constant partition sum; as a
/// [`CumulantFunctional`] it returns the marginal cumulants (zero on mixed
/// words), which is the independent route to the same moments.
#[derive(Clone, Debug)]
pub struct CrossCovariance {
    params: FamilyParams,
}

impl CrossCovariance {
    pub fn new(params: FamilyParams) -> CrossCovariance {
        CrossCovariance { params }
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }
}

impl MomentFunctional for CrossCovariance {
    fn moment(&self, word: &StarWord) -> Result<Rat> {
        cc_family_moment(word, &self.params)
    }

    fn backend_name(&self) -> &'static str {
        "cross-covariance"
    }
}

impl CumulantFunctional for CrossCovariance {
    fn cumulant(&self, word: &StarWord) -> Result<Rat> {
        if word.is_empty() {
            return Err(Error::Domain("cumulants start at order 1".into()));
        }
        match word.single_label() {
            Some(label) => cc_cumulant(
                &word.exponents(),
                self.params.rho(label)?,
                self.params.y(label)?,
            ),
            None => {
                for label in word.distinct_labels() {
                    self.params.rho(label)?;
                }
                Ok(Rat::zero())
            }
        }
    }

    fn backend_name(&self) -> &'static str {
        "cross-covariance"
    }
}

/// `cc_family_moment` through the generic moment-cumulant relation; the
/// two routes are cross-asserted in tests.
pub fn cc_family_moment_via_cumulants(w: &StarWord, params: &FamilyParams) -> Result<Rat> {
    let backend = CrossCovariance::new(params.clone());
    moments_from_cumulants(w, &backend)
}

/// Joint moments of a free family of elliptic variables: a sum over
/// non-crossing pair partitions where every pair must be label-constant and
/// contributes the label's parameter when its exponents agree, 1 otherwise.
/// Odd-length words vanish.
pub fn elliptic_family_moment(w: &StarWord, params: &BTreeMap<u8, Rat>) -> Result<Rat> {
    if w.len() > PAIR_ENUM_BOUND {
        return Err(Error::SizeLimit {
            what: "word length",
            got: w.len(),
            limit: PAIR_ENUM_BOUND,
        });
    }
    if w.is_empty() {
        return Ok(Rat::one());
    }
    for label in w.distinct_labels() {
        if !params.contains_key(&label) {
            return Err(Error::UnknownLabel(label));
        }
    }
    if w.len() % 2 != 0 {
        return Ok(Rat::zero());
    }
    let letters = w.letters();
    let mut acc = Rat::zero();
    'pairings: for p in enumerate_nc_pair(w.len())? {
        let mut term = Rat::one();
        for (r, s) in p.pairs() {
            let a = letters[r - 1];
            let b = letters[s - 1];
            if a.label != b.label {
                continue 'pairings;
            }
            if a.exp == b.exp {
                term *= &params[&a.label];
            }
        }
        acc += term;
    }
    Ok(acc)
}

/// A free family of elliptic variables with per-label parameters.
#[derive(Clone, Debug)]
pub struct EllipticFamily {
    params: BTreeMap<u8, Rat>,
}

impl EllipticFamily {
    pub fn new(entries: Vec<(u8, Rat)>) -> Result<EllipticFamily> {
        let mut params = BTreeMap::new();
        for (label, r) in entries {
            if label == 0 {
                return Err(Error::Domain("labels are 1-based".into()));
            }
            if r.abs() > Rat::one() {
                return Err(Error::Domain(format!(
                    "elliptic parameter for label {label} must be in [-1, 1]"
                )));
            }
            if params.insert(label, r).is_some() {
                return Err(Error::Domain(format!("label {label} given twice")));
            }
        }
        Ok(EllipticFamily { params })
    }

    pub fn params(&self) -> &BTreeMap<u8, Rat> {
        &self.params
    }
}

impl MomentFunctional for EllipticFamily {
    fn moment(&self, word: &StarWord) -> Result<Rat> {
        elliptic_family_moment(word, &self.params)
    }

    fn backend_name(&self) -> &'static str {
        "elliptic"
    }
}

impl CumulantFunctional for EllipticFamily {
    fn cumulant(&self, word: &StarWord) -> Result<Rat> {
        if word.is_empty() {
            return Err(Error::Domain("cumulants start at order 1".into()));
        }
        for label in word.distinct_labels() {
            if !self.params.contains_key(&label) {
                return Err(Error::UnknownLabel(label));
            }
        }
        if word.len() != 2 {
            return Ok(Rat::zero());
        }
        match word.single_label() {
            Some(label) => Ok(elliptic_cumulant(&word.exponents(), &self.params[&label])),
            None => Ok(Rat::zero()),
        }
    }

    fn backend_name(&self) -> &'static str {
        "elliptic"
    }
}

/// Checks that a mixed word's joint cumulant vanishes exactly under the
/// cross-covariance family, via Möbius inversion of the moments.
pub fn is_free_check(w: &StarWord, params: &FamilyParams) -> Result<bool> {
    if w.distinct_labels().len() < 2 {
        return Err(Error::Domain(
            "freeness check needs a word with at least two distinct labels".into(),
        ));
    }
    let backend = CrossCovariance::new(params.clone());
    Ok(cumulants_from_moments(w, &backend)?.is_zero())
}

/// Moments or cumulants looked up from an explicit word table. Used for
/// round-trip tests and for packaging derived moment sequences.
#[derive(Clone, Debug, Default)]
pub struct WordTable {
    values: HashMap<StarWord, Rat>,
    name: &'static str,
}

impl WordTable {
    pub fn new(name: &'static str) -> WordTable {
        WordTable {
            values: HashMap::new(),
            name,
        }
    }

    pub fn insert(&mut self, word: StarWord, value: Rat) {
        self.values.insert(word, value);
    }

    pub fn get(&self, word: &StarWord) -> Option<&Rat> {
        self.values.get(word)
    }
}

impl MomentFunctional for WordTable {
    fn moment(&self, word: &StarWord) -> Result<Rat> {
        if word.is_empty() {
            return Ok(Rat::one());
        }
        self.values
            .get(word)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("no table entry for word {word}")))
    }

    fn backend_name(&self) -> &'static str {
        self.name
    }
}

impl CumulantFunctional for WordTable {
    fn cumulant(&self, word: &StarWord) -> Result<Rat> {
        if word.is_empty() {
            return Err(Error::Domain("cumulants start at order 1".into()));
        }
        self.values
            .get(word)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("no table entry for word {word}")))
    }

    fn backend_name(&self) -> &'static str {
        self.name
    }
}

/// Synchronized word→moment memo around any backend.
pub struct CachedMoments<F> {
    inner: F,
    cache: Mutex<HashMap<StarWord, Rat>>,
}

impl<F: MomentFunctional> CachedMoments<F> {
    pub fn new(inner: F) -> CachedMoments<F> {
        CachedMoments {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl<F: MomentFunctional> MomentFunctional for CachedMoments<F> {
    fn moment(&self, word: &StarWord) -> Result<Rat> {
        if let Some(v) = self.cache.lock().unwrap().get(word) {
            return Ok(v.clone());
        }
        let v = self.inner.moment(word)?;
        self.cache.lock().unwrap().insert(word.clone(), v.clone());
        Ok(v)
    }

    fn backend_name(&self) -> &'static str {
        self.inner.backend_name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::word::Letter;
    use StarExp::*;

    fn cc(rho: Rat, y: Rat) -> CrossCovariance {
        CrossCovariance::new(FamilyParams::new(vec![(1, rho, y)]).unwrap())
    }

    fn cc2(rho1: Rat, y1: Rat, rho2: Rat, y2: Rat) -> CrossCovariance {
        CrossCovariance::new(FamilyParams::new(vec![(1, rho1, y1), (2, rho2, y2)]).unwrap())
    }

    fn w(pairs: &[(u8, StarExp)]) -> StarWord {
        StarWord::from_pairs(pairs)
    }

    #[test]
    fn s_statistic_examples() {
        assert_eq!(s_statistic(&[Plain]).unwrap(), 1);
        assert_eq!(s_statistic(&[Plain, Star]).unwrap(), 0);
        // pairs (1,1) equal, (1,*) not, (*,1 wrap) not
        assert_eq!(s_statistic(&[Plain, Plain, Star]).unwrap(), 1);
        assert!(s_statistic(&[]).is_err());
    }

    #[test]
    fn t_block_examples() {
        let etas = [Plain, Star, Plain];
        // whole word reduces to S
        assert_eq!(
            t_block_statistic(&[1, 2, 3], &etas).unwrap(),
            s_statistic(&etas).unwrap()
        );
        // subword (1,1): both cyclic pairs equal
        assert_eq!(t_block_statistic(&[1, 3], &etas).unwrap(), 2);
        // singleton self-adjacency
        assert_eq!(t_block_statistic(&[2], &etas).unwrap(), 1);
        assert!(t_block_statistic(&[4], &etas).is_err());
        assert!(t_block_statistic(&[], &etas).is_err());
    }

    #[test]
    fn cc_cumulant_branches() {
        let y = rat(1, 2);
        // rho = 1: always y^{k-1}
        for etas in [vec![Plain], vec![Plain, Star], vec![Star, Star, Plain]] {
            assert_eq!(
                cc_cumulant(&etas, &int(1), &y).unwrap(),
                powu(&y, etas.len() - 1)
            );
        }
        // rho = 0, alternating even word: y^{2k-1}
        assert_eq!(
            cc_cumulant(&[Plain, Star, Plain, Star], &int(0), &y).unwrap(),
            powu(&y, 3)
        );
        // rho = 0, S != 0 vanishes
        assert_eq!(
            cc_cumulant(&[Plain, Plain], &int(0), &y).unwrap(),
            Rat::zero()
        );
        // the two branches agree where they overlap (S = 0)
        assert_eq!(
            cc_cumulant(&[Plain, Star], &rat(1, 3), &y).unwrap(),
            powu(&y, 1)
        );
        assert_eq!(
            cc_cumulant(&[Plain, Star], &int(0), &y).unwrap(),
            powu(&y, 1)
        );
        // y <= 0 routes the caller elsewhere
        assert!(cc_cumulant(&[Plain], &int(0), &int(0)).is_err());
    }

    #[test]
    fn phi_pi_examples() {
        let params = cc(rat(1, 2), rat(1, 3));
        let word = w(&[(1, Plain), (1, Star), (1, Plain)]);
        // 1_n gives the plain moment
        assert_eq!(
            phi_pi(&NCPartition::full(3), &word, &params).unwrap(),
            params.moment(&word).unwrap()
        );
        // 0_n gives the product of first-order moments: rho^3
        assert_eq!(
            phi_pi(&NCPartition::singletons(3), &word, &params).unwrap(),
            powu(&rat(1, 2), 3)
        );
        // {{1,2},{3}}: phi(c c*)·phi(c) = (y + rho^2)·rho
        let p = NCPartition::new(
            crate::partition::SetPartition::new(3, vec![vec![1, 2], vec![3]]).unwrap(),
        )
        .unwrap();
        let expect = (rat(1, 3) + rat(1, 4)) * rat(1, 2);
        assert_eq!(phi_pi(&p, &word, &params).unwrap(), expect);
        // length mismatch
        assert!(phi_pi(&NCPartition::full(2), &word, &params).is_err());
    }

    #[test]
    fn kappa_pi_is_multiplicative_over_blocks() {
        let params = cc(rat(2, 5), rat(1, 2));
        let word = w(&[(1, Plain), (1, Star), (1, Plain), (1, Star)]);
        let p = NCPartition::new(
            crate::partition::SetPartition::new(4, vec![vec![1, 4], vec![2, 3]]).unwrap(),
        )
        .unwrap();
        let by_blocks = CumulantFunctional::cumulant(&params, &word.subword(&[1, 4]).unwrap())
            .unwrap()
            * CumulantFunctional::cumulant(&params, &word.subword(&[2, 3]).unwrap()).unwrap();
        assert_eq!(kappa_pi(&p, &word, &params).unwrap(), by_blocks);
        assert_eq!(
            kappa_pi(&NCPartition::full(4), &word, &params).unwrap(),
            CumulantFunctional::cumulant(&params, &word).unwrap()
        );
    }

    #[test]
    fn semicircular_fourth_moment_counts_pairings() {
        // κ_2 = 1, everything else 0 → φ(s^4) = |NC_2(4)| = 2
        let mut table = WordTable::new("semicircular");
        for len in 1..=4usize {
            for mask in 0..(1u32 << len) {
                let letters: Vec<Letter> = (0..len)
                    .map(|i| {
                        Letter::new(1, if mask & (1 << i) != 0 { Star } else { Plain })
                    })
                    .collect();
                let word = StarWord::new(letters).unwrap();
                let v = if len == 2 { Rat::one() } else { Rat::zero() };
                table.insert(word, v);
            }
        }
        let word = w(&[(1, Plain); 4]);
        assert_eq!(
            moments_from_cumulants(&word, &table).unwrap(),
            int(2)
        );
        // order 1: moment = cumulant
        let single = w(&[(1, Plain)]);
        assert_eq!(
            moments_from_cumulants(&single, &table).unwrap(),
            Rat::zero()
        );
    }

    #[test]
    fn order_two_inversion_matches_covariance_formula() {
        // κ_2(a,b) = φ(ab) − φ(a)φ(b)
        let params = cc(rat(1, 2), rat(1, 2));
        let word = w(&[(1, Plain), (1, Star)]);
        let phi_ab = params.moment(&word).unwrap();
        let phi_a = params.moment(&w(&[(1, Plain)])).unwrap();
        let phi_b = params.moment(&w(&[(1, Star)])).unwrap();
        assert_eq!(
            cumulants_from_moments(&word, &params).unwrap(),
            phi_ab - phi_a * phi_b
        );
        // and equals y for the (c, c*) pair: κ_2(c,c*) = y
        assert_eq!(
            cumulants_from_moments(&word, &params).unwrap(),
            rat(1, 2)
        );
    }

    #[test]
    fn cumulants_from_moments_order_one() {
        let params = cc(rat(1, 3), rat(1, 2));
        let word = w(&[(1, Plain)]);
        assert_eq!(
            cumulants_from_moments(&word, &params).unwrap(),
            params.moment(&word).unwrap()
        );
        assert!(cumulants_from_moments(&StarWord::empty(), &params).is_err());
    }

    #[test]
    fn word_cap_enforced() {
        let params = cc(rat(1, 2), rat(1, 2));
        let word = w(&[(1, Plain); 9]);
        assert!(matches!(
            moments_from_cumulants(&word, &params),
            Err(Error::SizeLimit { .. })
        ));
        assert!(matches!(
            cumulants_from_moments(&word, &params),
            Err(Error::SizeLimit { .. })
        ));
        assert!(matches!(
            cc_family_moment(&word, params.params()),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn cc_family_moment_examples() {
        let rho = rat(1, 2);
        let y = rat(1, 3);
        let params = FamilyParams::new(vec![(1, rho.clone(), y.clone())]).unwrap();
        assert_eq!(cc_family_moment(&w(&[(1, Plain)]), &params).unwrap(), rho);
        assert_eq!(
            cc_family_moment(&w(&[(1, Plain), (1, Star)]), &params).unwrap(),
            &y + &rho * &rho
        );
        // mixed labels: only 0_2 is label-constant
        let two = FamilyParams::new(vec![
            (1, rat(1, 2), rat(1, 3)),
            (2, rat(1, 5), rat(2, 3)),
        ])
        .unwrap();
        assert_eq!(
            cc_family_moment(&w(&[(1, Plain), (2, Star)]), &two).unwrap(),
            rat(1, 2) * rat(1, 5)
        );
        // unknown label
        assert!(matches!(
            cc_family_moment(&w(&[(3, Plain)]), &params),
            Err(Error::UnknownLabel(3))
        ));
        // empty word is the unit state
        assert_eq!(
            cc_family_moment(&StarWord::empty(), &params).unwrap(),
            Rat::one()
        );
    }

    #[test]
    fn cc_family_moment_two_routes_agree() {
        let params = FamilyParams::new(vec![
            (1, rat(2, 5), rat(1, 2)),
            (2, int(0), int(2)),
        ])
        .unwrap();
        // exhaustive over all words of length <= 4 in two labels
        for len in 1..=4usize {
            for code in 0..(4usize.pow(len as u32)) {
                let mut c = code;
                let mut letters = Vec::new();
                for _ in 0..len {
                    let label = (c % 2 + 1) as u8;
                    let exp = if (c / 2) % 2 == 0 { Plain } else { Star };
                    letters.push(Letter::new(label, exp));
                    c /= 4;
                }
                let word = StarWord::new(letters).unwrap();
                assert_eq!(
                    cc_family_moment(&word, &params).unwrap(),
                    cc_family_moment_via_cumulants(&word, &params).unwrap(),
                    "word {word}"
                );
            }
        }
    }

    #[test]
    fn cc_family_moment_is_tracial_and_adjoint_symmetric() {
        let params = FamilyParams::new(vec![
            (1, rat(2, 5), rat(1, 2)),
            (2, rat(-1, 3), int(1)),
        ])
        .unwrap();
        for len in 1..=5usize {
            for code in 0..(4usize.pow(len as u32)) {
                let mut c = code;
                let mut letters = Vec::new();
                for _ in 0..len {
                    let label = (c % 2 + 1) as u8;
                    let exp = if (c / 2) % 2 == 0 { Plain } else { Star };
                    letters.push(Letter::new(label, exp));
                    c /= 4;
                }
                let word = StarWord::new(letters).unwrap();
                let base = cc_family_moment(&word, &params).unwrap();
                for k in 1..len {
                    assert_eq!(
                        cc_family_moment(&word.rotated_left(k), &params).unwrap(),
                        base,
                        "rotation of {word}"
                    );
                }
                assert_eq!(
                    cc_family_moment(&word.adjoint(), &params).unwrap(),
                    base,
                    "adjoint of {word}"
                );
            }
        }
    }

    #[test]
    fn elliptic_cumulant_table() {
        let r = rat(2, 5);
        assert_eq!(elliptic_cumulant(&[Plain, Plain], &r), r);
        assert_eq!(elliptic_cumulant(&[Star, Star], &r), r);
        assert_eq!(elliptic_cumulant(&[Plain, Star], &r), Rat::one());
        assert_eq!(elliptic_cumulant(&[Star, Plain], &r), Rat::one());
        assert_eq!(elliptic_cumulant(&[Plain], &r), Rat::zero());
        assert_eq!(elliptic_cumulant(&[Plain, Plain, Star], &r), Rat::zero());
    }

    #[test]
    fn elliptic_family_moment_examples() {
        let fam = EllipticFamily::new(vec![(1, rat(2, 5))]).unwrap();
        assert_eq!(
            fam.moment(&w(&[(1, Plain), (1, Star)])).unwrap(),
            Rat::one()
        );
        assert_eq!(
            fam.moment(&w(&[(1, Plain), (1, Plain)])).unwrap(),
            rat(2, 5)
        );
        assert_eq!(
            fam.moment(&w(&[(1, Plain), (1, Star), (1, Plain), (1, Star)]))
                .unwrap(),
            int(2)
        );
        // odd length vanishes
        assert_eq!(
            fam.moment(&w(&[(1, Plain), (1, Star), (1, Plain)])).unwrap(),
            Rat::zero()
        );
        assert!(matches!(
            fam.moment(&w(&[(2, Plain)])),
            Err(Error::UnknownLabel(2))
        ));
    }

    #[test]
    fn elliptic_two_routes_agree_and_are_tracial() {
        let fam = EllipticFamily::new(vec![(1, rat(2, 5)), (2, rat(-1, 2))]).unwrap();
        for len in 1..=6usize {
            for code in 0..(4usize.pow(len as u32)) {
                let mut c = code;
                let mut letters = Vec::new();
                for _ in 0..len {
                    let label = (c % 2 + 1) as u8;
                    let exp = if (c / 2) % 2 == 0 { Plain } else { Star };
                    letters.push(Letter::new(label, exp));
                    c /= 4;
                }
                let word = StarWord::new(letters).unwrap();
                let direct = fam.moment(&word).unwrap();
                let generic = moments_from_cumulants(&word, &fam).unwrap();
                assert_eq!(direct, generic, "word {word}");
                if len > 1 {
                    assert_eq!(
                        fam.moment(&word.rotated_left(1)).unwrap(),
                        direct,
                        "rotation of {word}"
                    );
                }
            }
        }
    }

    #[test]
    fn freeness_check() {
        let params = FamilyParams::new(vec![
            (1, rat(1, 2), rat(1, 3)),
            (2, rat(2, 5), int(1)),
        ])
        .unwrap();
        assert!(is_free_check(&w(&[(1, Plain), (2, Plain)]), &params).unwrap());
        assert!(is_free_check(
            &w(&[(1, Plain), (1, Star), (2, Plain), (2, Star)]),
            &params
        )
        .unwrap());
        // single label is not a mixed cumulant
        assert!(is_free_check(&w(&[(1, Plain), (1, Star)]), &params).is_err());
    }

    #[test]
    fn single_label_inversion_recovers_marginal_cumulants() {
        let rho = rat(2, 5);
        let y = rat(1, 2);
        let backend = cc(rho.clone(), y.clone());
        for len in 1..=5usize {
            for mask in 0..(1u32 << len) {
                let letters: Vec<Letter> = (0..len)
                    .map(|i| {
                        Letter::new(1, if mask & (1 << i) != 0 { Star } else { Plain })
                    })
                    .collect();
                let word = StarWord::new(letters).unwrap();
                assert_eq!(
                    cumulants_from_moments(&word, &backend).unwrap(),
                    cc_cumulant(&word.exponents(), &rho, &y).unwrap(),
                    "word {word}"
                );
            }
        }
    }

    #[test]
    fn cached_moments_passthrough() {
        let backend = CachedMoments::new(cc(rat(1, 2), rat(1, 2)));
        let word = w(&[(1, Plain), (1, Star)]);
        let first = backend.moment(&word).unwrap();
        let second = backend.moment(&word).unwrap();
        assert_eq!(first, second);
        assert_eq!(backend.backend_name(), "cross-covariance");
    }

    #[test]
    fn family_params_validation() {
        assert!(FamilyParams::new(vec![(1, int(2), int(1))]).is_err());
        assert!(FamilyParams::new(vec![(1, int(0), int(-1))]).is_err());
        assert!(FamilyParams::new(vec![(0, int(0), int(1))]).is_err());
        assert!(FamilyParams::new(vec![(1, int(0), int(1)), (1, int(0), int(1))]).is_err());
        // y = 0 is representable (elliptic regime), but cc moments reject it
        let zero_y = FamilyParams::new(vec![(1, rat(1, 2), int(0))]).unwrap();
        assert!(cc_family_moment(&w(&[(1, Plain)]), &zero_y).is_err());
    }
}

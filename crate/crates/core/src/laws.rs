//! Closed-form moment and cumulant sequences for the named limit laws:
//! Marčenko–Pastur, its symmetrization, the law of `cc*` at `ρ = 0`,
//! `c + c*`, the alternating product family, and compound free Poisson.
//!
//! Every closed form here is independent of the generic NC-sum engine and
//! is cross-checked against it in tests; disagreement is a bug, not a
//! tolerance event.

use num_traits::{One, Signed, Zero};

use crate::cumulant::{
    cc_family_moment, cumulants_from_moments, moments_from_cumulants, s_statistic,
    CumulantFunctional, FamilyParams, WordTable, WORD_CAP,
};
use crate::error::{Error, Result};
use crate::partition::{enumerate_nc, kreweras_complement, leq};
use crate::scalar::{powu, Rat};
use crate::word::{StarExp, StarWord};

/// Moments `m_1..m_order` of a law, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSequence {
    values: Vec<Rat>,
}

impl MomentSequence {
    pub fn new(values: Vec<Rat>) -> MomentSequence {
        MomentSequence { values }
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// 1-based moment access.
    pub fn moment(&self, k: usize) -> Option<&Rat> {
        if k == 0 {
            None
        } else {
            self.values.get(k - 1)
        }
    }
}

/// One of the named limit laws, with its parameters.
#[derive(Clone, Debug)]
pub enum LawSpec {
    Mp { y: Rat },
    SymMp { y: Rat },
    /// Law of `cc*` at `ρ = 0`.
    CcStar { y: Rat },
    CPlusCStar { y: Rat, rho: Rat },
    /// Law of `c₁c₂* + c₂c₁*` at `ρ₁ = ρ₂ = 0`.
    ProdAlt { y1: Rat, y2: Rat },
}

impl LawSpec {
    pub fn validate(&self) -> Result<()> {
        let check_y = |y: &Rat, name: &str| {
            if y.is_positive() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be > 0")))
            }
        };
        match self {
            LawSpec::Mp { y } | LawSpec::SymMp { y } | LawSpec::CcStar { y } => check_y(y, "y"),
            LawSpec::CPlusCStar { y, rho } => {
                check_y(y, "y")?;
                if rho.abs() > Rat::one() {
                    return Err(Error::Domain("|rho| must be <= 1".into()));
                }
                Ok(())
            }
            LawSpec::ProdAlt { y1, y2 } => {
                check_y(y1, "y1")?;
                check_y(y2, "y2")
            }
        }
    }

    /// Moments `m_1..m_order`, exact.
    pub fn moments(&self, order: usize) -> Result<MomentSequence> {
        self.validate()?;
        let values: Result<Vec<Rat>> = (1..=order)
            .map(|k| match self {
                LawSpec::Mp { y } => mp_moment(k, y),
                LawSpec::SymMp { y } => sym_mp_moment(k, y),
                LawSpec::CcStar { y } => cc_star_moment_rho0(k, y),
                LawSpec::CPlusCStar { y, rho } => {
                    moment_of_self_adjoint(k, &CPlusCStarCumulants {
                        y: y.clone(),
                        rho: rho.clone(),
                    })
                }
                LawSpec::ProdAlt { y1, y2 } => prod_alt_sum_moment(k, y1, y2),
            })
            .collect();
        Ok(MomentSequence::new(values?))
    }
}

/// Cumulants of a self-adjoint variable, keyed by order alone.
struct ByOrder<F: Fn(usize) -> Result<Rat>> {
    kappa: F,
    name: &'static str,
}

impl<F: Fn(usize) -> Result<Rat>> CumulantFunctional for ByOrder<F> {
    fn cumulant(&self, word: &StarWord) -> Result<Rat> {
        if word.is_empty() {
            return Err(Error::Domain("cumulants start at order 1".into()));
        }
        (self.kappa)(word.len())
    }

    fn backend_name(&self) -> &'static str {
        self.name
    }
}

fn moment_of_self_adjoint(k: usize, kappa: &dyn CumulantFunctional) -> Result<Rat> {
    let word = StarWord::from_pairs(&vec![(1u8, StarExp::Plain); k]);
    moments_from_cumulants(&word, kappa)
}

struct CPlusCStarCumulants {
    y: Rat,
    rho: Rat,
}

impl CumulantFunctional for CPlusCStarCumulants {
    fn cumulant(&self, word: &StarWord) -> Result<Rat> {
        if word.is_empty() {
            return Err(Error::Domain("cumulants start at order 1".into()));
        }
        c_plus_cstar_cumulant(word.len(), &self.y, &self.rho)
    }

    fn backend_name(&self) -> &'static str {
        "c+c*"
    }
}

/// k-th Marčenko–Pastur moment via the cumulant engine (`κ_j = y^{j−1}`).
pub fn mp_moment(k: usize, y: &Rat) -> Result<Rat> {
    if !y.is_positive() {
        return Err(Error::Domain("MP parameter y must be > 0".into()));
    }
    let y = y.clone();
    moment_of_self_adjoint(
        k,
        &ByOrder {
            kappa: move |j| Ok(powu(&y, j - 1)),
            name: "marchenko-pastur",
        },
    )
}

/// Independent closed form: `m_k = Σ_{r=0}^{k−1} C(k,r)·C(k−1,r)·y^r/(r+1)`
/// (the Narayana polynomial).
pub fn mp_moment_closed(k: usize, y: &Rat) -> Result<Rat> {
    if k == 0 {
        return Err(Error::Domain("moments start at order 1".into()));
    }
    let mut acc = Rat::zero();
    for r in 0..k {
        let count = Rat::new(
            crate::scalar::binom(k, r) * crate::scalar::binom(k - 1, r),
            (r as i64 + 1).into(),
        );
        acc += count * powu(y, r);
    }
    Ok(acc)
}

/// Symmetrized Marčenko–Pastur cumulants: `y^{k−1}` for even k, 0 for odd.
pub fn sym_mp_cumulant(k: usize, y: &Rat) -> Rat {
    if k == 0 || k % 2 == 1 {
        Rat::zero()
    } else {
        powu(y, k - 1)
    }
}

/// Moments of the symmetrized Marčenko–Pastur law; odd moments vanish.
pub fn sym_mp_moment(k: usize, y: &Rat) -> Result<Rat> {
    let y = y.clone();
    moment_of_self_adjoint(
        k,
        &ByOrder {
            kappa: move |j| Ok(sym_mp_cumulant(j, &y)),
            name: "symmetrized marchenko-pastur",
        },
    )
}

/// Cumulants of `cc*` at `ρ = 0`:
/// `κ_k = Σ_{r=0}^{k−1} C(k−1,r)·C(k,r)·y^{k+r}/(r+1)`, which is also the
/// k-th moment of `y·M_y`.
pub fn cc_star_cumulant_rho0(k: usize, y: &Rat) -> Result<Rat> {
    if k == 0 {
        return Err(Error::Domain("cumulants start at order 1".into()));
    }
    let mut acc = Rat::zero();
    for r in 0..k {
        let count = Rat::new(
            crate::scalar::binom(k - 1, r) * crate::scalar::binom(k, r),
            (r as i64 + 1).into(),
        );
        acc += count * powu(y, k + r);
    }
    Ok(acc)
}

/// Moments of `cc*` at `ρ = 0`, induced from [`cc_star_cumulant_rho0`]
/// through the moment-cumulant relation.
pub fn cc_star_moment_rho0(k: usize, y: &Rat) -> Result<Rat> {
    let y = y.clone();
    moment_of_self_adjoint(
        k,
        &ByOrder {
            kappa: move |j| cc_star_cumulant_rho0(j, &y),
            name: "cc* (rho = 0)",
        },
    )
}

/// Cumulants of `c + c*` by multilinearity over all `2^k` exponent words:
/// `κ_k = y^{k−1}·Σ_η ρ^{S(η)}` (indicator branch at `ρ = 0`).
pub fn c_plus_cstar_cumulant(k: usize, y: &Rat, rho: &Rat) -> Result<Rat> {
    const EXPONENT_CAP: usize = 16;
    if k == 0 {
        return Err(Error::Domain("cumulants start at order 1".into()));
    }
    if k > EXPONENT_CAP {
        return Err(Error::SizeLimit {
            what: "c+c* cumulant order",
            got: k,
            limit: EXPONENT_CAP,
        });
    }
    if !y.is_positive() {
        return Err(Error::Domain("y must be > 0".into()));
    }
    if rho.abs() > Rat::one() {
        return Err(Error::Domain("|rho| must be <= 1".into()));
    }
    let mut total = Rat::zero();
    for mask in 0u32..(1u32 << k) {
        let etas: Vec<StarExp> = (0..k)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    StarExp::Star
                } else {
                    StarExp::Plain
                }
            })
            .collect();
        let s = s_statistic(&etas)?;
        if rho.is_zero() {
            if s == 0 {
                total += Rat::one();
            }
        } else {
            total += powu(rho, s);
        }
    }
    Ok(powu(y, k - 1) * total)
}

/// Alternating cumulants `κ_{2k}(c₁c₂*, c₂c₁*, …)` at `ρ₁ = ρ₂ = 0`, by the
/// double Kreweras sum `Σ_{π} Σ_{σ ≤ K(π)} y₁^{2k−|π|}·y₂^{2k−|σ|}`.
pub fn prod_alt_cumulant(k: usize, y1: &Rat, y2: &Rat) -> Result<Rat> {
    if k == 0 {
        return Err(Error::Domain("cumulants start at order 1".into()));
    }
    if !y1.is_positive() || !y2.is_positive() {
        return Err(Error::Domain("y1 and y2 must be > 0".into()));
    }
    let parts = enumerate_nc(k)?;
    let mut total = Rat::zero();
    for pi in &parts {
        let complement = kreweras_complement(pi);
        let outer = powu(y1, 2 * k - pi.num_blocks());
        let mut inner = Rat::zero();
        for sigma in &parts {
            if leq(sigma.as_set(), complement.as_set())? {
                inner += powu(y2, 2 * k - sigma.num_blocks());
            }
        }
        total += outer * inner;
    }
    Ok(total)
}

/// The same alternating cumulant as `φ((y₁M_{y₁}·y₂M_{y₂})^k)` through the
/// free-product moment route: MP cumulants on each partition block, MP
/// moments (closed form) on the Kreweras blocks.
pub fn prod_alt_cumulant_product_route(k: usize, y1: &Rat, y2: &Rat) -> Result<Rat> {
    if k == 0 {
        return Err(Error::Domain("cumulants start at order 1".into()));
    }
    if !y1.is_positive() || !y2.is_positive() {
        return Err(Error::Domain("y1 and y2 must be > 0".into()));
    }
    let parts = enumerate_nc(k)?;
    let mut total = Rat::zero();
    for pi in &parts {
        // κ_j(y1·M_{y1}) = y1^{2j−1}
        let mut term = Rat::one();
        for block in pi.blocks() {
            term *= powu(y1, 2 * block.len() - 1);
        }
        for block in kreweras_complement(pi).blocks() {
            term *= powu(y2, block.len()) * mp_moment_closed(block.len(), y2)?;
        }
        total += term;
    }
    Ok(total)
}

/// Alternating cumulants through the generic engine: moments of words in
/// the product letters `v = c₁c₂*`, `v* = c₂c₁*` under the ρ = 0 family,
/// Möbius-inverted at the product level. Word expansion limits this to
/// `4k ≤ WORD_CAP`.
pub fn prod_alt_cumulant_via_engine(k: usize, y1: &Rat, y2: &Rat) -> Result<Rat> {
    use StarExp::{Plain, Star};
    if k == 0 {
        return Err(Error::Domain("cumulants start at order 1".into()));
    }
    if 4 * k > WORD_CAP {
        return Err(Error::SizeLimit {
            what: "expanded alternating word length",
            got: 4 * k,
            limit: WORD_CAP,
        });
    }
    let params = FamilyParams::new(vec![
        (1, Rat::zero(), y1.clone()),
        (2, Rat::zero(), y2.clone()),
    ])?;
    // moments of every word over {v, v*} up to length 2k
    let mut table = WordTable::new("alternating product");
    for len in 1..=(2 * k) {
        for mask in 0u32..(1u32 << len) {
            let mut vword = Vec::new();
            let mut cword = StarWord::empty();
            for i in 0..len {
                if mask & (1 << i) == 0 {
                    vword.push((1u8, Plain));
                    cword = cword.concat(&StarWord::from_pairs(&[(1, Plain), (2, Star)]));
                } else {
                    vword.push((1u8, Star));
                    cword = cword.concat(&StarWord::from_pairs(&[(2, Plain), (1, Star)]));
                }
            }
            let value = cc_family_moment(&cword, &params)?;
            table.insert(StarWord::from_pairs(&vword), value);
        }
    }
    let alternating: Vec<(u8, StarExp)> = (0..2 * k)
        .map(|i| (1u8, if i % 2 == 0 { Plain } else { Star }))
        .collect();
    cumulants_from_moments(&StarWord::from_pairs(&alternating), &table)
}

/// Moments of `c₁c₂* + c₂c₁*` at `ρ = 0`, by multilinear word expansion.
fn prod_alt_sum_moment(k: usize, y1: &Rat, y2: &Rat) -> Result<Rat> {
    use StarExp::{Plain, Star};
    if 2 * k > WORD_CAP {
        return Err(Error::SizeLimit {
            what: "expanded word length",
            got: 2 * k,
            limit: WORD_CAP,
        });
    }
    let params = FamilyParams::new(vec![
        (1, Rat::zero(), y1.clone()),
        (2, Rat::zero(), y2.clone()),
    ])?;
    let mut total = Rat::zero();
    for mask in 0u32..(1u32 << k) {
        let mut word = StarWord::empty();
        for i in 0..k {
            if mask & (1 << i) == 0 {
                word = word.concat(&StarWord::from_pairs(&[(1, Plain), (2, Star)]));
            } else {
                word = word.concat(&StarWord::from_pairs(&[(2, Plain), (1, Star)]));
            }
        }
        total += cc_family_moment(&word, &params)?;
    }
    Ok(total)
}

/// k-th moment of a compound free Poisson variable: `κ_j = rate·(j-th jump
/// moment)`, pushed through the moment-cumulant relation.
pub fn compound_poisson_moment(
    k: usize,
    rate: &Rat,
    jump_moments: &MomentSequence,
) -> Result<Rat> {
    if k == 0 {
        return Err(Error::Domain("moments start at order 1".into()));
    }
    if jump_moments.order() < k {
        return Err(Error::Domain(format!(
            "need {k} jump moments, have {}",
            jump_moments.order()
        )));
    }
    let rate = rate.clone();
    let jumps = jump_moments.clone();
    moment_of_self_adjoint(
        k,
        &ByOrder {
            kappa: move |j| {
                Ok(&rate
                    * jumps
                        .moment(j)
                        .expect("jump moment order checked"))
            },
            name: "compound free poisson",
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn mp_moments_small_orders() {
        let y = rat(1, 2);
        assert_eq!(mp_moment(1, &y).unwrap(), int(1));
        assert_eq!(mp_moment(2, &y).unwrap(), int(1) + &y);
        assert_eq!(
            mp_moment(3, &y).unwrap(),
            int(1) + int(3) * &y + &y * &y
        );
    }

    #[test]
    fn mp_engine_route_matches_narayana_closed_form() {
        for y in [rat(1, 2), int(1), int(2), rat(5, 3)] {
            for k in 1..=8 {
                assert_eq!(
                    mp_moment(k, &y).unwrap(),
                    mp_moment_closed(k, &y).unwrap(),
                    "k={k}, y={y}"
                );
            }
        }
    }

    #[test]
    fn mp_equals_cc_family_at_rho_one() {
        use StarExp::Plain;
        let y = rat(2, 3);
        let params = FamilyParams::new(vec![(1, int(1), y.clone())]).unwrap();
        for k in 1..=6 {
            let word = StarWord::from_pairs(&vec![(1u8, Plain); k]);
            assert_eq!(
                cc_family_moment(&word, &params).unwrap(),
                mp_moment(k, &y).unwrap(),
                "k={k}"
            );
        }
    }

    #[test]
    fn sym_mp_values_and_vanishing_odd_moments() {
        let y = rat(1, 2);
        assert_eq!(sym_mp_cumulant(2, &y), y);
        assert_eq!(sym_mp_cumulant(3, &y), Rat::zero());
        assert_eq!(sym_mp_cumulant(4, &y), powu(&y, 3));
        for k in [1usize, 3, 5, 7] {
            assert_eq!(sym_mp_moment(k, &y).unwrap(), Rat::zero(), "k={k}");
        }
        // second moment equals κ_2 = y
        assert_eq!(sym_mp_moment(2, &y).unwrap(), y);
    }

    #[test]
    fn cc_star_cumulant_examples() {
        let y = rat(1, 2);
        assert_eq!(cc_star_cumulant_rho0(1, &y).unwrap(), y);
        // k=2: y² + y³, evaluated by hand from the stated sum
        assert_eq!(
            cc_star_cumulant_rho0(2, &y).unwrap(),
            &y * &y + powu(&y, 3)
        );
    }

    #[test]
    fn cc_star_cumulant_is_moment_of_scaled_mp() {
        for y in [rat(1, 2), int(1), int(3)] {
            for k in 1..=6 {
                assert_eq!(
                    cc_star_cumulant_rho0(k, &y).unwrap(),
                    powu(&y, k) * mp_moment(k, &y).unwrap(),
                    "k={k}, y={y}"
                );
            }
        }
    }

    #[test]
    fn cc_star_moments_match_direct_family_moments() {
        use StarExp::{Plain, Star};
        let y = rat(1, 2);
        let params = FamilyParams::new(vec![(1, Rat::zero(), y.clone())]).unwrap();
        for k in 1..=4usize {
            let mut pairs = Vec::new();
            for _ in 0..k {
                pairs.push((1u8, Plain));
                pairs.push((1u8, Star));
            }
            let word = StarWord::from_pairs(&pairs);
            assert_eq!(
                cc_star_moment_rho0(k, &y).unwrap(),
                cc_family_moment(&word, &params).unwrap(),
                "k={k}"
            );
        }
    }

    #[test]
    fn c_plus_cstar_cumulant_branches() {
        let y = rat(1, 3);
        // ρ = 0: 2y^{k−1} for even k, 0 for odd
        for k in 1..=8usize {
            let got = c_plus_cstar_cumulant(k, &y, &Rat::zero()).unwrap();
            let expect = if k % 2 == 0 {
                int(2) * powu(&y, k - 1)
            } else {
                Rat::zero()
            };
            assert_eq!(got, expect, "k={k}");
        }
        // ρ = 1, k = 2: all four exponent words contribute
        assert_eq!(
            c_plus_cstar_cumulant(2, &y, &int(1)).unwrap(),
            int(4) * &y
        );
        assert!(c_plus_cstar_cumulant(17, &y, &Rat::zero()).is_err());
    }

    #[test]
    fn prod_alt_first_order_and_vanishing() {
        let y1 = rat(1, 2);
        let y2 = rat(1, 3);
        assert_eq!(prod_alt_cumulant(1, &y1, &y2).unwrap(), &y1 * &y2);
        assert!(prod_alt_cumulant(0, &y1, &y2).is_err());
    }

    #[test]
    fn prod_alt_routes_agree() {
        let y1 = rat(1, 2);
        let y2 = int(2);
        for k in 1..=4 {
            assert_eq!(
                prod_alt_cumulant(k, &y1, &y2).unwrap(),
                prod_alt_cumulant_product_route(k, &y1, &y2).unwrap(),
                "k={k}"
            );
        }
        for k in 1..=2 {
            assert_eq!(
                prod_alt_cumulant(k, &y1, &y2).unwrap(),
                prod_alt_cumulant_via_engine(k, &y1, &y2).unwrap(),
                "k={k}"
            );
        }
        assert!(prod_alt_cumulant_via_engine(3, &y1, &y2).is_err());
    }

    #[test]
    fn compound_poisson_reproduces_mp() {
        // rate 1/y with jump δ_y (moments y^j) gives MP(y)
        let y = rat(2, 3);
        let jump = MomentSequence::new((1..=6).map(|j| powu(&y, j)).collect());
        let rate = int(1) / &y;
        for k in 1..=6 {
            assert_eq!(
                compound_poisson_moment(k, &rate, &jump).unwrap(),
                mp_moment(k, &y).unwrap(),
                "k={k}"
            );
        }
    }

    #[test]
    fn compound_poisson_with_scaled_mp_jump_gives_cc_star() {
        // rate 1 with jump y·M_y reproduces the cc* law at ρ = 0
        let y = rat(1, 2);
        let jump = MomentSequence::new(
            (1..=6)
                .map(|j| powu(&y, j) * mp_moment(j, &y).unwrap())
                .collect(),
        );
        for k in 1..=6 {
            assert_eq!(
                compound_poisson_moment(k, &int(1), &jump).unwrap(),
                cc_star_moment_rho0(k, &y).unwrap(),
                "k={k}"
            );
        }
    }

    #[test]
    fn compound_poisson_edge_cases() {
        let jump = MomentSequence::new(vec![int(1), int(2)]);
        // zero rate: all cumulants vanish, so all moments vanish
        for k in 1..=2 {
            assert_eq!(
                compound_poisson_moment(k, &Rat::zero(), &jump).unwrap(),
                Rat::zero()
            );
        }
        assert!(compound_poisson_moment(3, &int(1), &jump).is_err());
    }

    #[test]
    fn law_spec_dispatch() {
        let mp = LawSpec::Mp { y: rat(1, 2) };
        let seq = mp.moments(3).unwrap();
        assert_eq!(seq.order(), 3);
        assert_eq!(seq.moment(2).unwrap(), &rat(3, 2));

        let sym = LawSpec::SymMp { y: int(1) }.moments(4).unwrap();
        assert_eq!(sym.moment(1).unwrap(), &Rat::zero());
        assert_eq!(sym.moment(3).unwrap(), &Rat::zero());

        let prod = LawSpec::ProdAlt {
            y1: rat(1, 2),
            y2: int(1),
        };
        let seq = prod.moments(2).unwrap();
        // m_1 = φ(c1c2*) + φ(c2c1*) = 0 at ρ = 0
        assert_eq!(seq.moment(1).unwrap(), &Rat::zero());

        assert!(LawSpec::Mp { y: int(0) }.moments(2).is_err());
        assert!(LawSpec::CPlusCStar {
            y: int(1),
            rho: int(2)
        }
        .moments(1)
        .is_err());
    }

    #[test]
    fn c_plus_cstar_matches_engine_cumulants() {
        use crate::cumulant::CrossCovariance;
        use StarExp::{Plain, Star};
        // multilinearity oracle: κ_k(c+c*) = Σ_η κ_k(c^{η_1},…,c^{η_k})
        let y = rat(1, 2);
        for rho in [Rat::zero(), rat(2, 5)] {
            let backend = CrossCovariance::new(
                FamilyParams::new(vec![(1, rho.clone(), y.clone())]).unwrap(),
            );
            for k in 1..=6usize {
                let mut total = Rat::zero();
                for mask in 0u32..(1 << k) {
                    let pairs: Vec<(u8, StarExp)> = (0..k)
                        .map(|i| (1u8, if mask & (1 << i) != 0 { Star } else { Plain }))
                        .collect();
                    total += cumulants_from_moments(&StarWord::from_pairs(&pairs), &backend)
                        .unwrap();
                }
                assert_eq!(
                    total,
                    c_plus_cstar_cumulant(k, &y, &rho).unwrap(),
                    "k={k}, rho={rho}"
                );
            }
        }
    }
}

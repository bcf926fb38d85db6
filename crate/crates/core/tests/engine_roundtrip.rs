//! Exact round-trip and state-property tests for the moment↔cumulant
//! engine, driven by randomly generated rational tables.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crosscov_core::cumulant::{
    cc_family_moment, cumulants_from_moments, moments_from_cumulants, CrossCovariance,
    EllipticFamily, FamilyParams, MomentFunctional, WordTable,
};
use crosscov_core::poly::NCPolynomial;
use crosscov_core::scalar::{int, rat, Rat};
use crosscov_core::word::{Letter, StarExp, StarWord};

fn all_words_one_label(max_len: usize) -> Vec<StarWord> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for mask in 0u32..(1 << len) {
            let letters: Vec<Letter> = (0..len)
                .map(|i| {
                    Letter::new(
                        1,
                        if mask & (1 << i) != 0 {
                            StarExp::Star
                        } else {
                            StarExp::Plain
                        },
                    )
                })
                .collect();
            out.push(StarWord::new(letters).unwrap());
        }
    }
    out
}

fn random_table(rng: &mut ChaCha8Rng, words: &[StarWord], name: &'static str) -> WordTable {
    let mut table = WordTable::new(name);
    for w in words {
        let num = rng.random_range(-9i64..=9);
        let den = rng.random_range(1i64..=9);
        table.insert(w.clone(), rat(num, den));
    }
    table
}

/// moments_from_cumulants then cumulants_from_moments recovers an
/// arbitrary rational cumulant table exactly, through order 7.
#[test]
fn roundtrip_from_random_cumulant_tables() {
    let words = all_words_one_label(7);
    let mut rng = ChaCha8Rng::seed_from_u64(7_101_104);
    for trial in 0..5 {
        let kappa = random_table(&mut rng, &words, "random cumulants");
        let mut moments = WordTable::new("derived moments");
        for w in &words {
            moments.insert(w.clone(), moments_from_cumulants(w, &kappa).unwrap());
        }
        for w in &words {
            let recovered = cumulants_from_moments(w, &moments).unwrap();
            assert_eq!(&recovered, kappa.get(w).unwrap(), "trial {trial}, word {w}");
        }
    }
}

/// The reverse direction: a random rational moment table inverts to
/// cumulants and regenerates exactly.
#[test]
fn roundtrip_from_random_moment_tables() {
    let words = all_words_one_label(6);
    let mut rng = ChaCha8Rng::seed_from_u64(24_601);
    for trial in 0..5 {
        let moments = random_table(&mut rng, &words, "random moments");
        let mut kappa = WordTable::new("derived cumulants");
        for w in &words {
            kappa.insert(w.clone(), cumulants_from_moments(w, &moments).unwrap());
        }
        for w in &words {
            let regenerated = moments_from_cumulants(w, &kappa).unwrap();
            assert_eq!(
                &regenerated,
                moments.get(w).unwrap(),
                "trial {trial}, word {w}"
            );
        }
    }
}

/// Mixed joint cumulants of the two-label cross-covariance family vanish
/// exactly for all words up to length 5 (length 6 runs in the acceptance
/// suite).
#[test]
fn mixed_cross_covariance_cumulants_vanish() {
    let params = FamilyParams::new(vec![
        (1, rat(2, 5), rat(1, 2)),
        (2, rat(-1, 3), int(2)),
    ])
    .unwrap();
    let backend = CrossCovariance::new(params);
    for len in 2..=5usize {
        for code in 0..(4usize.pow(len as u32)) {
            let mut c = code;
            let mut letters = Vec::new();
            for _ in 0..len {
                let label = (c % 2 + 1) as u8;
                let exp = if (c / 2) % 2 == 0 {
                    StarExp::Plain
                } else {
                    StarExp::Star
                };
                letters.push(Letter::new(label, exp));
                c /= 4;
            }
            let word = StarWord::new(letters).unwrap();
            if word.distinct_labels().len() < 2 {
                continue;
            }
            let kappa = cumulants_from_moments(&word, &backend).unwrap();
            assert!(kappa.is_zero(), "mixed cumulant of {word} = {kappa}");
        }
    }
}

#[test]
fn mixed_elliptic_cumulants_vanish() {
    let fam = EllipticFamily::new(vec![(1, rat(2, 5)), (2, rat(-1, 2))]).unwrap();
    for len in 2..=5usize {
        for code in 0..(4usize.pow(len as u32)) {
            let mut c = code;
            let mut letters = Vec::new();
            for _ in 0..len {
                let label = (c % 2 + 1) as u8;
                let exp = if (c / 2) % 2 == 0 {
                    StarExp::Plain
                } else {
                    StarExp::Star
                };
                letters.push(Letter::new(label, exp));
                c /= 4;
            }
            let word = StarWord::new(letters).unwrap();
            if word.distinct_labels().len() < 2 {
                continue;
            }
            let kappa = cumulants_from_moments(&word, &fam).unwrap();
            assert!(kappa.is_zero(), "mixed elliptic cumulant of {word} = {kappa}");
        }
    }
}

/// Exact principal-minor check: the Hankel matrix of a genuine moment
/// sequence of a self-adjoint variable is positive semidefinite.
fn hankel_psd(moments: &[Rat]) -> bool {
    // moments = m_0..m_{2r}; H[i][j] = m_{i+j}
    let r = (moments.len() - 1) / 2;
    let size = r + 1;
    let minor = |rows: &[usize]| -> Rat {
        // Laplace expansion; the matrices are at most 4×4
        fn det(m: &Vec<Vec<Rat>>) -> Rat {
            let n = m.len();
            if n == 0 {
                return Rat::one();
            }
            if n == 1 {
                return m[0][0].clone();
            }
            let mut acc = Rat::zero();
            for (j, head) in m[0].iter().enumerate() {
                if head.is_zero() {
                    continue;
                }
                let sub: Vec<Vec<Rat>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(jj, _)| *jj != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = head * det(&sub);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        let m: Vec<Vec<Rat>> = rows
            .iter()
            .map(|&i| rows.iter().map(|&j| moments[i + j].clone()).collect())
            .collect();
        det(&m)
    };
    // PSD iff every principal minor is nonnegative
    for subset in 1u32..(1 << size) {
        let rows: Vec<usize> = (0..size).filter(|i| subset & (1 << i) != 0).collect();
        if minor(&rows) < Rat::zero() {
            return false;
        }
    }
    true
}

#[test]
fn symmetric_polynomial_moments_form_psd_hankel_matrices() {
    let cc = CrossCovariance::new(
        FamilyParams::new(vec![(1, rat(2, 5), rat(1, 2)), (2, int(0), int(1))]).unwrap(),
    );
    let elliptic = EllipticFamily::new(vec![(1, rat(3, 5))]).unwrap();

    let c1 = NCPolynomial::symbol(1, StarExp::Plain);
    let c1s = NCPolynomial::symbol(1, StarExp::Star);
    let c2 = NCPolynomial::symbol(2, StarExp::Plain);
    let c2s = NCPolynomial::symbol(2, StarExp::Star);

    // degree-1 symmetric polynomials: Hankel up to H_3 (moments to order 6)
    let deg1 = vec![
        &c1 + &c1s,
        &(&c1 + &c1s) + &NCPolynomial::one().scale(&rat(-1, 2)),
    ];
    for a in &deg1 {
        assert!(a.is_symmetric());
        let mut m = vec![Rat::one()];
        for k in 1..=6 {
            m.push(a.moment(k, &cc).unwrap());
        }
        assert!(hankel_psd(&m), "cc Hankel failed for {a}");
    }
    let e_sym = &c1 + &c1s;
    let mut m = vec![Rat::one()];
    for k in 1..=6 {
        m.push(e_sym.moment(k, &elliptic).unwrap());
    }
    assert!(hankel_psd(&m), "elliptic Hankel failed");

    // degree-2 symmetric polynomials: Hankel up to H_2 (moments to order 4)
    let deg2 = vec![&c1 * &c1s, &(&c1 * &c2s) + &(&c2 * &c1s)];
    for a in &deg2 {
        assert!(a.is_symmetric());
        let mut m = vec![Rat::one()];
        for k in 1..=4 {
            m.push(a.moment(k, &cc).unwrap());
        }
        assert!(hankel_psd(&m), "cc Hankel failed for {a}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Traciality and adjoint symmetry of the family moment under random
    /// parameters and words.
    #[test]
    fn cc_moment_rotation_and_adjoint_invariance(
        rho1_num in -4i64..=4, rho2_num in -4i64..=4,
        y1 in 1i64..=4, y2 in 1i64..=4,
        word_code in 0usize..4096, len in 1usize..=6,
        rotation in 0usize..6,
    ) {
        let params = FamilyParams::new(vec![
            (1, rat(rho1_num, 5), int(y1)),
            (2, rat(rho2_num, 5), rat(y2, 2)),
        ]).unwrap();
        let mut c = word_code;
        let mut letters = Vec::new();
        for _ in 0..len {
            let label = (c % 2 + 1) as u8;
            let exp = if (c / 2) % 2 == 0 { StarExp::Plain } else { StarExp::Star };
            letters.push(Letter::new(label, exp));
            c /= 4;
        }
        let word = StarWord::new(letters).unwrap();
        let base = cc_family_moment(&word, &params).unwrap();
        prop_assert_eq!(
            cc_family_moment(&word.rotated_left(rotation % len.max(1)), &params).unwrap(),
            base.clone()
        );
        prop_assert_eq!(cc_family_moment(&word.adjoint(), &params).unwrap(), base);
    }

    /// Odd-length elliptic moments vanish for any word and parameters.
    #[test]
    fn elliptic_odd_moments_vanish(
        r1 in -5i64..=5, r2 in -5i64..=5,
        word_code in 0usize..16384, half_len in 0usize..=2,
    ) {
        let fam = EllipticFamily::new(vec![(1, rat(r1, 5)), (2, rat(r2, 5))]).unwrap();
        let len = 2 * half_len + 1;
        let mut c = word_code;
        let mut letters = Vec::new();
        for _ in 0..len {
            let label = (c % 2 + 1) as u8;
            let exp = if (c / 2) % 2 == 0 { StarExp::Plain } else { StarExp::Star };
            letters.push(Letter::new(label, exp));
            c /= 4;
        }
        let word = StarWord::new(letters).unwrap();
        prop_assert_eq!(fam.moment(&word).unwrap(), Rat::zero());
    }

    /// The empty word is the unit of every shipped backend.
    #[test]
    fn unit_state(y in 1i64..=6, r in -5i64..=5) {
        let cc = CrossCovariance::new(
            FamilyParams::new(vec![(1, rat(r, 5), int(y))]).unwrap(),
        );
        prop_assert_eq!(cc.moment(&StarWord::empty()).unwrap(), Rat::one());
        let fam = EllipticFamily::new(vec![(1, rat(r, 5))]).unwrap();
        prop_assert_eq!(fam.moment(&StarWord::empty()).unwrap(), Rat::one());
    }
}

/// Elliptic family moments, spot values against the limit predictions used
/// by the simulation tolerances: φ(ee*) = 1, φ(e²) = r, φ((e+e*)²) = 2+2r,
/// φ((e+e*)⁴) = 2(2+2r)².
#[test]
fn elliptic_prediction_spot_values() {
    let r = rat(4, 25); // ρ = 2/5, parameter ρ²
    let fam = EllipticFamily::new(vec![(1, r.clone())]).unwrap();
    let e = NCPolynomial::symbol(1, StarExp::Plain);
    let es = NCPolynomial::symbol(1, StarExp::Star);
    let sym = &e + &es;

    let gram = &e * &es;
    assert_eq!(gram.moment(1, &fam).unwrap(), int(1));
    let sq = &e * &e;
    assert_eq!(sq.moment(1, &fam).unwrap(), r.clone());
    let two_plus_2r = int(2) + int(2) * &r;
    assert_eq!(sym.moment(2, &fam).unwrap(), two_plus_2r.clone());
    assert_eq!(
        sym.moment(4, &fam).unwrap(),
        int(2) * &two_plus_2r * &two_plus_2r
    );
}

/// The elliptic moment formula as a BTreeMap-facing function is consistent
/// with the trait backend.
#[test]
fn elliptic_map_and_backend_agree() {
    let mut map = BTreeMap::new();
    map.insert(1u8, rat(1, 4));
    let fam = EllipticFamily::new(vec![(1, rat(1, 4))]).unwrap();
    let word = StarWord::from_pairs(&[
        (1, StarExp::Plain),
        (1, StarExp::Plain),
        (1, StarExp::Star),
        (1, StarExp::Star),
    ]);
    assert_eq!(
        crosscov_core::cumulant::elliptic_family_moment(&word, &map).unwrap(),
        fam.moment(&word).unwrap()
    );
}

//! Matrix-polynomial evaluation, normalized trace moments, and
//! replicate-based Monte-Carlo estimates.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::config::{EnsembleConfig, Error, Regime, Result};
use crate::sample::Replicate;
use crosscov_core::poly::NCPolynomial;
use crosscov_core::scalar::to_f64;
use crosscov_core::word::StarWord;

/// Monte-Carlo summary of a scalar statistic over replicates.
#[derive(Clone, Copy, Debug)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicates: usize,
}

/// Mean and standard error (sample std over √replicates) of the values.
/// A single replicate reports a standard error of 0.
pub fn summarize(values: &[f64]) -> MomentEstimate {
    let r = values.len();
    let mean = values.iter().sum::<f64>() / r as f64;
    let std_error = if r < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
        (var / r as f64).sqrt()
    };
    MomentEstimate {
        mean,
        std_error,
        replicates: r,
    }
}

/// `[p⁻¹·Tr(M^k)]` for `k = 1..=k_max`, by iterated multiplication.
pub fn trace_moments(m: &DMatrix<f64>, k_max: usize) -> Vec<f64> {
    let p = m.nrows() as f64;
    let mut out = Vec::with_capacity(k_max);
    if k_max == 0 {
        return out;
    }
    let mut power = m.clone();
    out.push(power.trace() / p);
    for _ in 1..k_max {
        power *= m;
        out.push(power.trace() / p);
    }
    out
}

/// The matrix a word stands for: the ordered product of its letters'
/// matrices. The empty word is the identity.
pub fn word_matrix(word: &StarWord, rep: &Replicate, regime: Regime) -> Result<DMatrix<f64>> {
    let mut acc = DMatrix::identity(rep.p, rep.p);
    for &letter in word.letters() {
        acc *= rep.matrix(letter, regime)?;
    }
    Ok(acc)
}

/// Substitutes matrices for symbols (identity for the empty word) and sums
/// the coefficient-weighted products.
pub fn eval_matrix_poly(
    poly: &NCPolynomial,
    rep: &Replicate,
    regime: Regime,
) -> Result<DMatrix<f64>> {
    let mut acc = DMatrix::zeros(rep.p, rep.p);
    for (word, coeff) in poly.terms() {
        acc += word_matrix(word, rep, regime)? * to_f64(coeff);
    }
    Ok(acc)
}

/// Runs `f` on every replicate (concurrently) and returns the results in
/// replicate order, so any later reduction is schedule-independent.
pub fn map_replicates<T, F>(cfg: &EnsembleConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Replicate) -> Result<T> + Sync,
{
    cfg.validate()?;
    (0..cfg.replicates)
        .into_par_iter()
        .map(|idx| {
            let rep = cfg.replicate(idx)?;
            f(&rep)
        })
        .collect()
}

/// Monte-Carlo estimate of `p⁻¹·E[Tr(word)]` over independent replicates.
pub fn monte_carlo_word_moment(
    cfg: &EnsembleConfig,
    word: &StarWord,
    regime: Regime,
) -> Result<MomentEstimate> {
    let values = map_replicates(cfg, |rep| {
        let m = word_matrix(word, rep, regime)?;
        Ok(m.trace() / rep.p as f64)
    })?;
    Ok(summarize(&values))
}

/// Monte-Carlo estimates of `p⁻¹·E[Tr(Π^k)]` for `k = 1..=max_order`,
/// reusing each replicate's matrices across orders.
pub fn monte_carlo_poly_moments(
    cfg: &EnsembleConfig,
    poly: &NCPolynomial,
    regime: Regime,
    max_order: usize,
) -> Result<Vec<MomentEstimate>> {
    if max_order == 0 {
        return Err(Error::Domain("max_order must be >= 1".into()));
    }
    let per_replicate = map_replicates(cfg, |rep| {
        let m = eval_matrix_poly(poly, rep, regime)?;
        Ok(trace_moments(&m, max_order))
    })?;
    Ok((0..max_order)
        .map(|k| {
            let values: Vec<f64> = per_replicate.iter().map(|v| v[k]).collect();
            summarize(&values)
        })
        .collect())
}

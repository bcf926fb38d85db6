//! Eigenvalues, singular values, complex spectra, ESD moments, and
//! histogram binning.

use nalgebra::linalg::{Schur, SymmetricEigen, SVD};
use nalgebra::DMatrix;

use crate::config::{Error, Result};

/// Iteration budget for the iterative eigensolvers; exceeding it is
/// reported as a diagnostic error rather than a hang.
const MAX_EIGEN_ITER: usize = 100_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpectrumKind {
    RealEigs,
    Singular,
    ComplexEigs,
}

/// A matrix spectrum: real eigenvalues sorted ascending, singular values
/// sorted ascending, or complex eigenvalues as (re, im) pairs.
#[derive(Clone, Debug)]
pub enum SpectralSample {
    RealEigs(Vec<f64>),
    Singular(Vec<f64>),
    ComplexEigs(Vec<(f64, f64)>),
}

impl SpectralSample {
    pub fn len(&self) -> usize {
        match self {
            SpectralSample::RealEigs(v) | SpectralSample::Singular(v) => v.len(),
            SpectralSample::ComplexEigs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn eigen_failure(m: &DMatrix<f64>, what: &str) -> Error {
    Error::Eigen(format!(
        "{what} did not converge within {MAX_EIGEN_ITER} iterations \
         (matrix {}x{}, max |entry| {:.3e}, trace {:.6e})",
        m.nrows(),
        m.ncols(),
        m.amax(),
        m.trace()
    ))
}

/// Computes the requested spectrum.
///
/// `RealEigs` requires a symmetric input up to float noise (max asymmetry
/// ≤ 1e−10·max|entry|) and symmetrizes as `(M+Mᵀ)/2` before solving.
pub fn spectrum(m: &DMatrix<f64>, kind: SpectrumKind) -> Result<SpectralSample> {
    if m.nrows() != m.ncols() && kind != SpectrumKind::Singular {
        return Err(Error::Shape(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    match kind {
        SpectrumKind::RealEigs => {
            let asym = (m - m.transpose()).amax();
            let scale = m.amax();
            if asym > 1e-10 * scale {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric (max asymmetry {asym:.3e} vs scale {scale:.3e})"
                )));
            }
            let sym = (m + m.transpose()) * 0.5;
            let eigen = SymmetricEigen::try_new(sym.clone(), f64::EPSILON, MAX_EIGEN_ITER)
                .ok_or_else(|| eigen_failure(&sym, "symmetric eigendecomposition"))?;
            let mut vals: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
            vals.sort_unstable_by(f64::total_cmp);
            Ok(SpectralSample::RealEigs(vals))
        }
        SpectrumKind::Singular => {
            let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, MAX_EIGEN_ITER)
                .ok_or_else(|| eigen_failure(m, "singular value decomposition"))?;
            let mut vals: Vec<f64> = svd.singular_values.iter().copied().collect();
            vals.sort_unstable_by(f64::total_cmp);
            Ok(SpectralSample::Singular(vals))
        }
        SpectrumKind::ComplexEigs => {
            let schur = Schur::try_new(m.clone(), f64::EPSILON, MAX_EIGEN_ITER)
                .ok_or_else(|| eigen_failure(m, "Schur decomposition"))?;
            let vals: Vec<(f64, f64)> = schur
                .complex_eigenvalues()
                .iter()
                .map(|z| (z.re, z.im))
                .collect();
            Ok(SpectralSample::ComplexEigs(vals))
        }
    }
}

/// ESD moments: the k-th entry is the mean of `λ_i^k`, `k = 1..=k_max`.
/// Requires real eigenvalues.
pub fn esd_moments(sample: &SpectralSample, k_max: usize) -> Result<Vec<f64>> {
    let eigs = match sample {
        SpectralSample::RealEigs(v) => v,
        _ => {
            return Err(Error::Domain(
                "ESD moments need real eigenvalues".into(),
            ))
        }
    };
    if eigs.is_empty() {
        return Err(Error::Domain("empty spectrum".into()));
    }
    let p = eigs.len() as f64;
    Ok((1..=k_max)
        .map(|k| eigs.iter().map(|l| l.powi(k as i32)).sum::<f64>() / p)
        .collect())
}

/// One histogram bin; `density` integrates to 1 over all bins.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
    pub density: f64,
}

/// Fixed-width bins over the observed range. A degenerate range (all
/// values equal) produces a single unit-width bin centered on the value.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<HistBin>> {
    if values.is_empty() {
        return Err(Error::Domain("histogram of no values".into()));
    }
    if bins == 0 {
        return Err(Error::Domain("bins must be >= 1".into()));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::Domain("histogram values must be finite".into()));
    }
    let total = values.len() as f64;
    if min == max {
        return Ok(vec![HistBin {
            left: min - 0.5,
            right: min + 0.5,
            count: values.len(),
            density: 1.0,
        }]);
    }
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistBin {
            left: min + i as f64 * width,
            right: min + (i + 1) as f64 * width,
            count,
            density: count as f64 / (total * width),
        })
        .collect())
}

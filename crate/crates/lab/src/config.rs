//! Ensemble configuration and the lab error type.

use thiserror::Error;

/// Entry distribution for the sampled pairs. Both have mean 0, variance 1,
/// and entrywise correlation ρ; one continuous, one discrete.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dist {
    Gaussian,
    Rademacher,
}

/// Which matrices a polynomial's symbols stand for: the raw
/// cross-covariance matrices `C_l`, or the centered-scaled
/// `E_l = √(n_l/p)·(C_l − ρ_l·I)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Regime {
    RawC,
    CenteredE,
}

/// One matrix family: sample count and entry correlation.
#[derive(Clone, Copy, Debug)]
pub struct FamilySpec {
    pub n: usize,
    pub rho: f64,
}

/// A simulated ensemble: dimension, per-label families, entry distribution,
/// root seed, and replicate count.
#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub p: usize,
    pub families: Vec<FamilySpec>,
    pub dist: Dist,
    pub seed: u64,
    pub replicates: usize,
}

/// Largest p·n accepted per family (raw matrix of 2^24 f64 is 128 MiB).
pub const MAX_ENTRIES: usize = 1 << 24;

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Domain("p must be >= 1".into()));
        }
        if self.families.is_empty() {
            return Err(Error::Domain("at least one family is required".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Domain("replicates must be >= 1".into()));
        }
        for (idx, fam) in self.families.iter().enumerate() {
            let label = idx + 1;
            if fam.n == 0 {
                return Err(Error::Domain(format!("n{label} must be >= 1")));
            }
            if !(fam.rho.is_finite() && fam.rho.abs() <= 1.0) {
                return Err(Error::Domain(format!("|rho{label}| must be <= 1")));
            }
            if self.p.saturating_mul(fam.n) > MAX_ENTRIES {
                return Err(Error::Resource(format!(
                    "family {label}: p*n = {} exceeds the {} entry limit",
                    self.p * fam.n,
                    MAX_ENTRIES
                )));
            }
        }
        Ok(())
    }

    pub fn family(&self, label: u8) -> Result<&FamilySpec> {
        if label == 0 || label as usize > self.families.len() {
            return Err(Error::Domain(format!(
                "label {label} outside the {} configured families",
                self.families.len()
            )));
        }
        Ok(&self.families[label as usize - 1])
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error(transparent)]
    Core(#[from] crosscov_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

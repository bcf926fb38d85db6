//! Sampling of correlated matrix pairs and construction of the
//! cross-covariance and centered-scaled matrices.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::{Dist, EnsembleConfig, Error, Regime, Result};
use crosscov_core::word::{Letter, StarExp};

/// Substream seed for one replicate: a SplitMix64 finalizer over the root
/// seed and the replicate index. This is the reproducibility contract —
/// replicate r always sees the same stream, in any execution order.
pub fn replicate_seed(root_seed: u64, replicate: u64) -> u64 {
    let mut z = root_seed.wrapping_add(replicate.wrapping_add(1).wrapping_mul(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Samples a correlated pair `(X, Y)` of p×n matrices. Entries are i.i.d.
/// across positions with mean 0, variance 1, and `E[X_ij·Y_ij] = ρ`:
///
/// - `Gaussian`: `Y = ρX + √(1−ρ²)·Z` with X, Z independent standard normal;
/// - `Rademacher`: `X = ±1` uniform, `Y = X` with probability `(1+ρ)/2`,
///   else `−X`.
///
/// Entries are generated in column-major order from the given stream.
pub fn sample_pair(
    p: usize,
    n: usize,
    rho: f64,
    dist: Dist,
    rng: &mut ChaCha8Rng,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !(rho.is_finite() && rho.abs() <= 1.0) {
        return Err(Error::Domain("|rho| must be <= 1".into()));
    }
    let len = p * n;
    let mut xs = Vec::with_capacity(len);
    let mut ys = Vec::with_capacity(len);
    match dist {
        Dist::Gaussian => {
            let tail = (1.0 - rho * rho).sqrt();
            for _ in 0..len {
                let x: f64 = rng.sample(StandardNormal);
                let z: f64 = rng.sample(StandardNormal);
                xs.push(x);
                ys.push(rho * x + tail * z);
            }
        }
        Dist::Rademacher => {
            let flip = (1.0 + rho) / 2.0;
            for _ in 0..len {
                let x = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let y = if rng.random_bool(flip) { x } else { -x };
                xs.push(x);
                ys.push(y);
            }
        }
    }
    Ok((DMatrix::from_vec(p, n, xs), DMatrix::from_vec(p, n, ys)))
}

/// `C = (1/n)·X·Yᵀ`, the p×p sample cross-covariance matrix.
pub fn cross_covariance(x: &DMatrix<f64>, y: &DMatrix<f64>, n: usize) -> Result<DMatrix<f64>> {
    if x.nrows() != y.nrows() || x.ncols() != y.ncols() {
        return Err(Error::Shape(format!(
            "X is {}x{}, Y is {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    Ok(x * y.transpose() / n as f64)
}

/// `E = √(n/p)·(C − ρ·I_p)`, the centered-scaled matrix.
pub fn centered_scaled(c: &DMatrix<f64>, rho: f64, n: usize, p: usize) -> DMatrix<f64> {
    let scale = (n as f64 / p as f64).sqrt();
    let mut e = c.clone();
    for i in 0..c.nrows() {
        e[(i, i)] -= rho;
    }
    e * scale
}

/// One family's sampled matrices, bit-deterministic given the stream.
pub struct MatrixFamily {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub n: usize,
    pub rho: f64,
}

/// All families of one replicate; label `l` is `families[l-1]`.
pub struct Replicate {
    pub p: usize,
    pub families: Vec<MatrixFamily>,
}

impl Replicate {
    /// The matrix a symbol letter stands for under the given regime
    /// (starred symbols are transposes; the matrices are real).
    pub fn matrix(&self, letter: Letter, regime: Regime) -> Result<DMatrix<f64>> {
        let idx = letter.label as usize;
        if letter.label == 0 || idx > self.families.len() {
            return Err(Error::Domain(format!(
                "label {} outside the {} sampled families",
                letter.label,
                self.families.len()
            )));
        }
        let fam = &self.families[idx - 1];
        let base = match regime {
            Regime::RawC => &fam.c,
            Regime::CenteredE => &fam.e,
        };
        Ok(match letter.exp {
            StarExp::Plain => base.clone(),
            StarExp::Star => base.transpose(),
        })
    }
}

impl EnsembleConfig {
    /// Builds replicate `idx` from its substream: families are sampled in
    /// label order from a single ChaCha stream seeded by [`replicate_seed`].
    pub fn replicate(&self, idx: usize) -> Result<Replicate> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(self.seed, idx as u64));
        let mut families = Vec::with_capacity(self.families.len());
        for fam in &self.families {
            let (x, y) = sample_pair(self.p, fam.n, fam.rho, self.dist, &mut rng)?;
            let c = cross_covariance(&x, &y, fam.n)?;
            let e = centered_scaled(&c, fam.rho, fam.n, self.p);
            families.push(MatrixFamily {
                x,
                y,
                c,
                e,
                n: fam.n,
                rho: fam.rho,
            });
        }
        Ok(Replicate {
            p: self.p,
            families,
        })
    }
}

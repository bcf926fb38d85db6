//! The five subcommands: exact moment/cumulant tables, Monte-Carlo
//! verification, pooled eigenvalue histograms, and complex-eigenvalue
//! scatter exports.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crosscov_core::cumulant::{
    cumulants_from_moments, CrossCovariance, EllipticFamily, MomentFunctional, WordTable,
};
use crosscov_core::scalar::{to_f64, Rat};
use crosscov_core::word::{StarExp, StarWord};
use crosscov_lab::{
    histogram, map_replicates, monte_carlo_poly_moments, spectrum, SpectralSample, SpectrumKind,
};

use crate::config::RunConfig;
use crate::fmt::{fmt_g, rat_decimal, rat_display, SIG_DIGITS};
use crate::CliError;

/// One mc-verify table row: exact limit against the Monte-Carlo estimate.
pub struct ComparisonRow {
    pub order: usize,
    pub exact: Rat,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub z_score: f64,
}

enum Backend {
    Cc(CrossCovariance),
    Elliptic(EllipticFamily),
}

impl Backend {
    fn for_config(cfg: &RunConfig) -> Result<Backend, CliError> {
        match cfg.regime {
            crosscov_lab::Regime::RawC => Ok(Backend::Cc(CrossCovariance::new(
                cfg.family_params()?,
            ))),
            crosscov_lab::Regime::CenteredE => Ok(Backend::Elliptic(
                EllipticFamily::new(cfg.elliptic_params()?).map_err(CliError::Core)?,
            )),
        }
    }

    fn functional(&self) -> &dyn MomentFunctional {
        match self {
            Backend::Cc(b) => b,
            Backend::Elliptic(b) => b,
        }
    }
}

/// Exact `φ(Π^k)` for `k = 1..=max_order` under the regime's backend.
pub fn exact_moments(cfg: &RunConfig) -> Result<Vec<Rat>, CliError> {
    let poly = cfg.polynomial()?;
    let backend = Backend::for_config(cfg)?;
    (1..=cfg.max_order)
        .map(|k| poly.moment(k, backend.functional()).map_err(CliError::Core))
        .collect()
}

/// Exact `κ_k(Π)` for `k = 1..=max_order`: the polynomial's moments are
/// Möbius-inverted at the variable level.
pub fn exact_cumulants(cfg: &RunConfig) -> Result<Vec<Rat>, CliError> {
    let moments = exact_moments(cfg)?;
    let mut table = WordTable::new("polynomial moments");
    for (idx, m) in moments.iter().enumerate() {
        let word = StarWord::from_pairs(&vec![(1u8, StarExp::Plain); idx + 1]);
        table.insert(word, m.clone());
    }
    (1..=cfg.max_order)
        .map(|k| {
            let word = StarWord::from_pairs(&vec![(1u8, StarExp::Plain); k]);
            cumulants_from_moments(&word, &table).map_err(CliError::Core)
        })
        .collect()
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(header.as_bytes())?;
    file.write_all(b"\n")?;
    for row in rows {
        file.write_all(row.as_bytes())?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

fn print_value_table(title: &str, values: &[Rat]) {
    println!("{title}");
    println!("{:>3}  {}", "k", "exact");
    for (idx, v) in values.iter().enumerate() {
        println!("{:>3}  {}", idx + 1, rat_display(v));
    }
}

fn emit_value_csv(cfg: &RunConfig, values: &[Rat]) -> Result<(), CliError> {
    if let Some(out) = &cfg.out {
        let rows: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(idx, v)| format!("{},{}", idx + 1, rat_decimal(v)))
            .collect();
        write_csv(out, "k,value", &rows)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

pub fn run_moments(cfg: &RunConfig) -> Result<(), CliError> {
    let values = exact_moments(cfg)?;
    print_value_table(&format!("exact moments of {}", cfg.poly_text), &values);
    emit_value_csv(cfg, &values)
}

pub fn run_cumulants(cfg: &RunConfig) -> Result<(), CliError> {
    let values = exact_cumulants(cfg)?;
    print_value_table(&format!("exact free cumulants of {}", cfg.poly_text), &values);
    emit_value_csv(cfg, &values)
}

/// Default finite-size bias numerator per regime; the allowance added to
/// `z·SE` is this over p.
pub fn default_bias(regime: crosscov_lab::Regime) -> f64 {
    match regime {
        crosscov_lab::Regime::RawC => 10.0,
        crosscov_lab::Regime::CenteredE => 30.0,
    }
}

/// Compares exact limits against Monte-Carlo trace moments. Returns the
/// rows plus whether every row passed
/// `|mean − exact| ≤ z_threshold·SE + bias/p`.
pub fn mc_verify_rows(
    cfg: &RunConfig,
    z_threshold: f64,
    bias: Option<f64>,
) -> Result<(Vec<ComparisonRow>, bool), CliError> {
    let exact = exact_moments(cfg)?;
    let poly = cfg.polynomial()?;
    let ensemble = cfg.ensemble()?;
    let estimates = monte_carlo_poly_moments(&ensemble, &poly, cfg.regime, cfg.max_order)
        .map_err(CliError::Lab)?;
    let allowance = bias.unwrap_or_else(|| default_bias(cfg.regime)) / cfg.p as f64;
    let mut rows = Vec::with_capacity(exact.len());
    let mut all_pass = true;
    for (idx, (exact_k, est)) in exact.iter().zip(estimates.iter()).enumerate() {
        let exact_f = to_f64(exact_k);
        let diff = est.mean - exact_f;
        let z_score = if est.std_error > 0.0 {
            diff / est.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY * diff.signum()
        };
        if diff.abs() > z_threshold * est.std_error + allowance {
            all_pass = false;
        }
        rows.push(ComparisonRow {
            order: idx + 1,
            exact: exact_k.clone(),
            mc_mean: est.mean,
            mc_se: est.std_error,
            z_score,
        });
    }
    Ok((rows, all_pass))
}

pub fn run_mc_verify(
    cfg: &RunConfig,
    z_threshold: f64,
    bias: Option<f64>,
) -> Result<bool, CliError> {
    let (rows, all_pass) = mc_verify_rows(cfg, z_threshold, bias)?;
    let allowance = bias.unwrap_or_else(|| default_bias(cfg.regime)) / cfg.p as f64;
    println!(
        "mc-verify {} ({} replicates, |z| <= {z_threshold} after {} bias allowance)",
        cfg.poly_text,
        cfg.replicates,
        fmt_g(allowance, 6),
    );
    println!(
        "{:>3}  {:>22}  {:>16}  {:>12}  {:>10}  result",
        "k", "exact", "mc_mean", "mc_se", "z"
    );
    for row in &rows {
        let pass =
            (row.mc_mean - to_f64(&row.exact)).abs() <= z_threshold * row.mc_se + allowance;
        println!(
            "{:>3}  {:>22}  {:>16}  {:>12}  {:>10}  {}",
            row.order,
            rat_decimal(&row.exact),
            fmt_g(row.mc_mean, SIG_DIGITS),
            fmt_g(row.mc_se, 6),
            fmt_g(row.z_score, 4),
            if pass { "pass" } else { "FAIL" }
        );
    }
    if let Some(out) = &cfg.out {
        let rows_text: Vec<String> = rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{}",
                    r.order,
                    rat_decimal(&r.exact),
                    fmt_g(r.mc_mean, SIG_DIGITS),
                    fmt_g(r.mc_se, SIG_DIGITS),
                    fmt_g(r.z_score, SIG_DIGITS)
                )
            })
            .collect();
        write_csv(out, "k,exact,mc_mean,mc_se,z", &rows_text)?;
        println!("wrote {}", out.display());
    }
    Ok(all_pass)
}

pub fn run_esd(cfg: &RunConfig) -> Result<(), CliError> {
    let poly = cfg.polynomial()?;
    if !poly.is_symmetric() {
        return Err(CliError::Config(format!(
            "polynomial '{}' is not symmetric: eigenvalue histograms exist only for \
             symmetric matrix polynomials (Π = Π^*)",
            cfg.poly_text
        )));
    }
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| CliError::Config("esd needs 'out' for the histogram CSV".into()))?;
    let ensemble = cfg.ensemble()?;
    let regime = cfg.regime;
    let pooled: Vec<Vec<f64>> = map_replicates(&ensemble, |rep| {
        let m = crosscov_lab::eval_matrix_poly(&poly, rep, regime)?;
        match spectrum(&m, SpectrumKind::RealEigs)? {
            SpectralSample::RealEigs(v) => Ok(v),
            _ => unreachable!("requested real eigenvalues"),
        }
    })
    .map_err(CliError::Lab)?;
    let values: Vec<f64> = pooled.into_iter().flatten().collect();
    let bins = histogram(&values, cfg.bins).map_err(CliError::Lab)?;
    let rows: Vec<String> = bins
        .iter()
        .map(|b| {
            format!(
                "{},{},{},{}",
                fmt_g(b.left, SIG_DIGITS),
                fmt_g(b.right, SIG_DIGITS),
                b.count,
                fmt_g(b.density, SIG_DIGITS)
            )
        })
        .collect();
    write_csv(&out, "bin_left,bin_right,count,density", &rows)?;
    println!(
        "pooled {} eigenvalues over {} replicates into {} bins; wrote {}",
        values.len(),
        cfg.replicates,
        bins.len(),
        out.display()
    );
    Ok(())
}

pub fn run_scatter(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.regime != crosscov_lab::Regime::CenteredE {
        return Err(CliError::Config(
            "scatter is a centered-scaled view; set regime = CENTERED_E".into(),
        ));
    }
    let poly = cfg.polynomial()?;
    let mut terms = poly.terms();
    let single = match (terms.next(), terms.next()) {
        (Some((word, coeff)), None) if word.len() == 1 && coeff == &Rat::from_integer(1.into()) => {
            word.letters()[0]
        }
        _ => {
            return Err(CliError::Config(format!(
                "scatter needs a single matrix symbol like E1, got '{}'",
                cfg.poly_text
            )));
        }
    };
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| CliError::Config("scatter needs 'out' for the CSV".into()))?;
    let ensemble = cfg.ensemble()?;
    let regime = cfg.regime;
    let pooled: Vec<Vec<(f64, f64)>> = map_replicates(&ensemble, |rep| {
        let m = rep.matrix(single, regime)?;
        match spectrum(&m, SpectrumKind::ComplexEigs)? {
            SpectralSample::ComplexEigs(v) => Ok(v),
            _ => unreachable!("requested complex eigenvalues"),
        }
    })
    .map_err(CliError::Lab)?;
    let rows: Vec<String> = pooled
        .into_iter()
        .flatten()
        .map(|(re, im)| format!("{},{}", fmt_g(re, SIG_DIGITS), fmt_g(im, SIG_DIGITS)))
        .collect();
    write_csv(&out, "re,im", &rows)?;
    println!(
        "wrote {} complex eigenvalues over {} replicates to {}",
        rows.len(),
        cfg.replicates,
        out.display()
    );
    Ok(())
}

/// Elliptic parameters as the map form used by the core limit module.
pub fn elliptic_param_map(cfg: &RunConfig) -> Result<BTreeMap<u8, Rat>, CliError> {
    Ok(cfg.elliptic_params()?.into_iter().collect())
}

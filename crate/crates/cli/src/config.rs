//! Flat key=value experiment configuration with `--set` overrides.
//!
//! Recognized keys: `p`, `n1..n9`, `rho1..rho9`, `dist`, `seed`,
//! `replicates`, `poly`, `regime`, `max_order`, `bins`, `out`. Lines
//! starting with `#` are comments; `[section]` headers are allowed and
//! ignored.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crosscov_core::cumulant::FamilyParams;
use crosscov_core::poly::{parse_poly, NCPolynomial, SymbolFamily};
use crosscov_core::scalar::{parse_rat, to_f64, Rat};
use crosscov_lab::{Dist, EnsembleConfig, FamilySpec, Regime};

use crate::CliError;

/// One family as configured: sample count plus the correlation in both
/// exact and float form (the exact side consumes the decimal exactly, the
/// sampler uses the nearest f64).
#[derive(Clone, Debug)]
pub struct FamilyConfig {
    pub n: usize,
    pub rho_exact: Rat,
    pub rho_f64: f64,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub p: usize,
    pub families: Vec<FamilyConfig>,
    pub dist: Dist,
    pub seed: u64,
    pub replicates: usize,
    pub poly_text: String,
    pub regime: Regime,
    pub max_order: usize,
    pub bins: usize,
    pub out: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "p",
    "dist",
    "seed",
    "replicates",
    "poly",
    "regime",
    "max_order",
    "bins",
    "out",
];

fn is_known_key(key: &str) -> bool {
    if KNOWN_KEYS.contains(&key) {
        return true;
    }
    if let Some(rest) = key.strip_prefix('n').or_else(|| key.strip_prefix("rho")) {
        return rest.len() == 1 && rest.as_bytes()[0].is_ascii_digit() && rest != "0";
    }
    false
}

fn parse_entries(text: &str, source: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{source}:{}: expected key=value", lineno + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !is_known_key(&key) {
            return Err(CliError::Config(format!(
                "{source}:{}: unknown key '{key}'",
                lineno + 1
            )));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(CliError::Config(format!(
                "{source}:{}: key '{key}' given twice",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

fn apply_overrides(
    map: &mut BTreeMap<String, String>,
    overrides: &[String],
) -> Result<(), CliError> {
    for item in overrides {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            CliError::Config(format!("--set needs KEY=VALUE, got '{item}'"))
        })?;
        let key = key.trim().to_string();
        if !is_known_key(&key) {
            return Err(CliError::Config(format!("--set: unknown key '{key}'")));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(())
}

fn get_parsed<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, CliError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Config(format!("bad value for '{key}': '{v}'"))),
    }
}

impl RunConfig {
    pub fn load(path: &std::path::Path, overrides: &[String]) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut map = parse_entries(&text, &path.display().to_string())?;
        apply_overrides(&mut map, overrides)?;
        RunConfig::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
        let p: usize = match map.get("p") {
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Config(format!("bad value for 'p': '{v}'")))?,
            None => return Err(CliError::Config("missing required key 'p'".into())),
        };
        let poly_text = map
            .get("poly")
            .cloned()
            .ok_or_else(|| CliError::Config("missing required key 'poly'".into()))?;

        let mut families = Vec::new();
        for label in 1..=9u8 {
            let n_key = format!("n{label}");
            let rho_key = format!("rho{label}");
            match (map.get(&n_key), map.get(&rho_key)) {
                (None, None) => break,
                (Some(n), Some(rho)) => {
                    let n: usize = n.parse().map_err(|_| {
                        CliError::Config(format!("bad value for '{n_key}': '{n}'"))
                    })?;
                    let rho_exact = parse_rat(rho).ok_or_else(|| {
                        CliError::Config(format!("bad value for '{rho_key}': '{rho}'"))
                    })?;
                    let rho_f64 = to_f64(&rho_exact);
                    families.push(FamilyConfig {
                        n,
                        rho_exact,
                        rho_f64,
                    });
                }
                (Some(_), None) => {
                    return Err(CliError::Config(format!(
                        "'{n_key}' given without '{rho_key}'"
                    )));
                }
                (None, Some(_)) => {
                    return Err(CliError::Config(format!(
                        "'{rho_key}' given without '{n_key}'"
                    )));
                }
            }
        }
        if families.is_empty() {
            return Err(CliError::Config(
                "at least one family (n1, rho1) is required".into(),
            ));
        }

        let dist = match map.get("dist").map(String::as_str) {
            None => Dist::Gaussian,
            Some(v) if v.eq_ignore_ascii_case("gaussian") => Dist::Gaussian,
            Some(v) if v.eq_ignore_ascii_case("rademacher") => Dist::Rademacher,
            Some(v) => {
                return Err(CliError::Config(format!(
                    "dist must be GAUSSIAN or RADEMACHER, got '{v}'"
                )));
            }
        };
        let regime = match map.get("regime").map(String::as_str) {
            None => Regime::RawC,
            Some(v) if v.eq_ignore_ascii_case("raw_c") => Regime::RawC,
            Some(v) if v.eq_ignore_ascii_case("centered_e") => Regime::CenteredE,
            Some(v) => {
                return Err(CliError::Config(format!(
                    "regime must be RAW_C or CENTERED_E, got '{v}'"
                )));
            }
        };

        let config = RunConfig {
            p,
            families,
            dist,
            seed: get_parsed(map, "seed", 1u64)?,
            replicates: get_parsed(map, "replicates", 30usize)?,
            poly_text,
            regime,
            max_order: get_parsed(map, "max_order", 4usize)?,
            bins: get_parsed(map, "bins", 50usize)?,
            out: map.get("out").map(PathBuf::from),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.max_order == 0 {
            return Err(CliError::Config("max_order must be >= 1".into()));
        }
        if self.bins == 0 {
            return Err(CliError::Config("bins must be >= 1".into()));
        }
        let parsed = self.parse_polynomial()?;
        for label in parsed.poly.labels() {
            if label as usize > self.families.len() {
                return Err(CliError::Config(format!(
                    "polynomial uses label {label} but only {} families are configured",
                    self.families.len()
                )));
            }
        }
        self.ensemble()?.validate().map_err(CliError::Lab)?;
        // the exact-side parameters must also be admissible
        match self.regime {
            Regime::RawC => {
                self.family_params()?;
            }
            Regime::CenteredE => {
                self.elliptic_params()?;
            }
        }
        Ok(())
    }

    /// Parses the polynomial and checks the symbol family against the
    /// regime (`C` with RAW_C, `E` with CENTERED_E; `I` alone fits both).
    pub fn parse_polynomial(&self) -> Result<crosscov_core::poly::ParsedPoly, CliError> {
        let parsed = parse_poly(&self.poly_text).map_err(CliError::Core)?;
        match (parsed.family, self.regime) {
            (Some(SymbolFamily::C), Regime::CenteredE) => Err(CliError::Config(
                "regime CENTERED_E needs E symbols, but the polynomial uses C".into(),
            )),
            (Some(SymbolFamily::E), Regime::RawC) => Err(CliError::Config(
                "regime RAW_C needs C symbols, but the polynomial uses E".into(),
            )),
            _ => Ok(parsed),
        }
    }

    pub fn polynomial(&self) -> Result<NCPolynomial, CliError> {
        Ok(self.parse_polynomial()?.poly)
    }

    pub fn ensemble(&self) -> Result<EnsembleConfig, CliError> {
        Ok(EnsembleConfig {
            p: self.p,
            families: self
                .families
                .iter()
                .map(|f| FamilySpec {
                    n: f.n,
                    rho: f.rho_f64,
                })
                .collect(),
            dist: self.dist,
            seed: self.seed,
            replicates: self.replicates,
        })
    }

    /// Exact cross-covariance parameters with `y_l = p/n_l` as a rational.
    pub fn family_params(&self) -> Result<FamilyParams, CliError> {
        let entries = self
            .families
            .iter()
            .enumerate()
            .map(|(idx, f)| {
                let y = Rat::new((self.p as i64).into(), (f.n as i64).into());
                (idx as u8 + 1, f.rho_exact.clone(), y)
            })
            .collect();
        FamilyParams::new(entries).map_err(CliError::Core)
    }

    /// Exact elliptic parameters `ρ_l²` per label.
    pub fn elliptic_params(&self) -> Result<Vec<(u8, Rat)>, CliError> {
        Ok(self
            .families
            .iter()
            .enumerate()
            .map(|(idx, f)| (idx as u8 + 1, &f.rho_exact * &f.rho_exact))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_from(text: &str) -> Result<RunConfig, CliError> {
        let map = parse_entries(text, "test").unwrap();
        RunConfig::from_map(&map)
    }

    const BASE: &str = "p = 100\nn1 = 200\nrho1 = 0.4\npoly = C1*C1^*\nseed = 3\n";

    #[test]
    fn parses_minimal_config() {
        let cfg = cfg_from(BASE).unwrap();
        assert_eq!(cfg.p, 100);
        assert_eq!(cfg.families.len(), 1);
        assert_eq!(cfg.families[0].rho_exact, crosscov_core::scalar::rat(2, 5));
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.replicates, 30);
        assert_eq!(cfg.max_order, 4);
        assert!(cfg.out.is_none());
    }

    #[test]
    fn sections_and_comments_are_skipped() {
        let text = "# comment\n[ensemble]\np=10\nn1=20\nrho1=0\n[run]\npoly=C1+C1^*\n";
        assert!(cfg_from(text).is_ok());
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(parse_entries("wat = 1\n", "t").is_err());
        assert!(parse_entries("p = 1\np = 2\n", "t").is_err());
        assert!(parse_entries("n0 = 5\n", "t").is_err());
    }

    #[test]
    fn families_must_be_complete() {
        assert!(cfg_from("p=10\nn1=20\npoly=C1\n").is_err());
        assert!(cfg_from("p=10\nrho1=0\npoly=C1\n").is_err());
        assert!(cfg_from("p=10\npoly=I\n").is_err());
    }

    #[test]
    fn regime_and_family_must_agree() {
        let text = "p=10\nn1=500\nrho1=0\npoly=E1+E1^*\n";
        assert!(cfg_from(text).is_err());
        let text = "p=10\nn1=500\nrho1=0\npoly=E1+E1^*\nregime=CENTERED_E\n";
        assert!(cfg_from(text).is_ok());
        let text = "p=10\nn1=500\nrho1=0\npoly=C1\nregime=CENTERED_E\n";
        assert!(cfg_from(text).is_err());
    }

    #[test]
    fn polynomial_labels_must_be_configured() {
        let text = "p=10\nn1=20\nrho1=0\npoly=C2\n";
        assert!(cfg_from(text).is_err());
    }

    #[test]
    fn overrides_apply_last() {
        let mut map = parse_entries(BASE, "t").unwrap();
        apply_overrides(&mut map, &["p=50".into(), "rho1=0.8".into()]).unwrap();
        let cfg = RunConfig::from_map(&map).unwrap();
        assert_eq!(cfg.p, 50);
        assert_eq!(cfg.families[0].rho_exact, crosscov_core::scalar::rat(4, 5));
        assert!(apply_overrides(&mut map, &["nope=1".into()]).is_err());
        assert!(apply_overrides(&mut map, &["justakey".into()]).is_err());
    }

    #[test]
    fn exact_parameters() {
        let cfg = cfg_from(BASE).unwrap();
        let params = cfg.family_params().unwrap();
        assert_eq!(params.y(1).unwrap(), &crosscov_core::scalar::rat(1, 2));
        let elliptic = cfg.elliptic_params().unwrap();
        assert_eq!(elliptic[0].1, crosscov_core::scalar::rat(4, 25));
    }
}

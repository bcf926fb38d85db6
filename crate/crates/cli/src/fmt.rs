//! Output formatting: C-style `%.12g` floats and decimal views of exact
//! rationals.

use crosscov_core::scalar::{to_f64, Rat};

/// Number of significant digits used in all file and table output.
pub const SIG_DIGITS: usize = 12;

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Formats like C's `%.{sig}g`: `sig` significant digits, trailing zeros
/// trimmed, scientific notation outside the exponent range `[-4, sig)`.
pub fn fmt_g(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sig = sig.max(1);
    let exp_form = format!("{:.*e}", sig - 1, x);
    let (mantissa, exponent) = exp_form
        .split_once('e')
        .expect("exponential format contains 'e'");
    let exponent: i32 = exponent.parse().expect("numeric exponent");
    if exponent < -4 || exponent >= sig as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exponent.abs())
    } else {
        let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
        let rounded: f64 = exp_form.parse().expect("round-trip of formatted float");
        trim_fraction(&format!("{rounded:.decimals$}"))
    }
}

/// 12-significant-digit decimal view of an exact rational.
pub fn rat_decimal(r: &Rat) -> String {
    fmt_g(to_f64(r), SIG_DIGITS)
}

/// `num/den` plus the decimal view, for human-readable tables.
pub fn rat_display(r: &Rat) -> String {
    format!("{r} ({})", rat_decimal(r))
}

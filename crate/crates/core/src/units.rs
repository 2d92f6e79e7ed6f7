//! Parsing and formatting of dimensioned quantities such as `"1.27 /W/km"`.
//!
//! Values are held in SI internally; decibel conversions are provided for
//! reporting only.

use alloc::format;
use alloc::string::String;

use crate::{Error, Result};

/// Physical dimension of a quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// metres
    Length,
    /// hertz
    Frequency,
    /// seconds
    Time,
    /// 1/(W m)
    Nonlinearity,
    /// watts
    Power,
    /// W/Hz
    Psd,
    /// W/Hz/m
    PsdPerLength,
    /// kelvin
    Temperature,
}

const UNITS: &[(&str, Dimension, f64)] = &[
    ("m", Dimension::Length, 1.0),
    ("km", Dimension::Length, 1e3),
    ("Hz", Dimension::Frequency, 1.0),
    ("kHz", Dimension::Frequency, 1e3),
    ("MHz", Dimension::Frequency, 1e6),
    ("GHz", Dimension::Frequency, 1e9),
    ("THz", Dimension::Frequency, 1e12),
    ("s", Dimension::Time, 1.0),
    ("ms", Dimension::Time, 1e-3),
    ("us", Dimension::Time, 1e-6),
    ("ns", Dimension::Time, 1e-9),
    ("ps", Dimension::Time, 1e-12),
    ("fs", Dimension::Time, 1e-15),
    ("/W/m", Dimension::Nonlinearity, 1.0),
    ("/W/km", Dimension::Nonlinearity, 1e-3),
    ("W", Dimension::Power, 1.0),
    ("mW", Dimension::Power, 1e-3),
    ("uW", Dimension::Power, 1e-6),
    ("W/Hz", Dimension::Psd, 1.0),
    ("W/Hz/m", Dimension::PsdPerLength, 1.0),
    ("W/Hz/km", Dimension::PsdPerLength, 1e-3),
    ("K", Dimension::Temperature, 1.0),
];

fn normalise_unit(raw: &str) -> String {
    let mut u: String = raw
        .chars()
        .filter(|c| !c.is_whitespace() && !matches!(c, '·' | '*' | '(' | ')'))
        .collect();
    if u.starts_with("1/") {
        u.remove(0);
    }
    match u.as_str() {
        "/Wkm" => "/W/km".into(),
        "/Wm" => "/W/m".into(),
        _ => u,
    }
}

fn lookup(unit: &str) -> Option<(Dimension, f64)> {
    let u = normalise_unit(unit);
    UNITS
        .iter()
        .find(|(sym, _, _)| *sym == u)
        .map(|&(_, d, f)| (d, f))
}

/// Parses `"<number> <unit>"` (the space is optional) into SI units.
///
/// Power also accepts `dBm`.
pub fn parse_quantity(s: &str, dim: Dimension) -> Result<f64> {
    let s = s.trim();
    let split = (1..=s.len())
        .rev()
        .filter(|&i| s.is_char_boundary(i))
        .find(|&i| s[..i].trim_end().parse::<f64>().is_ok())
        .ok_or(Error::Parse("quantity value"))?;
    let value: f64 = s[..split].trim_end().parse().map_err(|_| Error::Parse("quantity value"))?;
    let unit = s[split..].trim();
    if dim == Dimension::Power && unit == "dBm" {
        return Ok(dbm_to_watts(value));
    }
    match lookup(unit) {
        Some((d, f)) if d == dim => Ok(value * f),
        Some(_) => Err(Error::Parse("quantity unit dimension")),
        None => Err(Error::Parse("quantity unit")),
    }
}

/// Formats an SI value in the requested unit, round-trippable through
/// [`parse_quantity`].
pub fn format_quantity(value_si: f64, unit: &str) -> Result<String> {
    if unit == "dBm" {
        return Ok(format!("{:e} dBm", watts_to_dbm(value_si)));
    }
    let (_, f) = lookup(unit).ok_or(Error::Parse("quantity unit"))?;
    Ok(format!("{:e} {}", value_si / f, unit))
}

/// Watts to dBm.
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * libm::log10(w / 1e-3)
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * libm::pow(10.0, dbm / 10.0)
}

/// Linear ratio to decibels.
pub fn to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// Decibels to linear ratio.
pub fn from_db(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        let g = parse_quantity("1.27 /W/km", Dimension::Nonlinearity).unwrap();
        assert!((g - 1.27e-3).abs() < 1e-18);
        assert_eq!(parse_quantity("1.27 1/(W km)", Dimension::Nonlinearity).unwrap(), g);
        assert_eq!(parse_quantity("500GHz", Dimension::Frequency).unwrap(), 5e11);
        assert_eq!(parse_quantity("2000 km", Dimension::Length).unwrap(), 2e6);
        assert_eq!(parse_quantity("10 ps", Dimension::Time).unwrap(), 1e-11);
        assert!((parse_quantity("20 dBm", Dimension::Power).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(parse_quantity("5 km", Dimension::Time).is_err());
        assert!(parse_quantity("5 furlongs", Dimension::Length).is_err());
        assert!(parse_quantity("km", Dimension::Length).is_err());
    }

    #[test]
    fn db_round_trip() {
        assert!((watts_to_dbm(dbm_to_watts(42.7)) - 42.7).abs() < 1e-12);
        assert!((from_db(to_db(3.3)) - 3.3).abs() < 1e-14);
    }
}

//! Canonical units: durations in seconds, bandwidth in bits per second.
//!
//! Config files must spell the unit out (`"120s"`, `"7h"`, `"3Mbps"`); the
//! parsers here reject bare numbers.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("`{input}`: {reason}")]
pub struct UnitError {
    pub input: String,
    pub reason: String,
}

fn unit_error(input: &str, reason: impl Into<String>) -> UnitError {
    UnitError {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Split `"12.5Mbps"` into `(12.5, "Mbps")`.
fn split_quantity(input: &str) -> Result<(f64, &str), UnitError> {
    let s = input.trim();
    let idx = s
        .find(|c: char| c.is_ascii_alphabetic() || c == '/')
        .ok_or_else(|| unit_error(input, "missing unit suffix"))?;
    let (num, unit) = s.split_at(idx);
    let num = num.trim();
    if num.is_empty() {
        return Err(unit_error(input, "missing numeric value"));
    }
    let value: f64 = num
        .parse()
        .map_err(|_| unit_error(input, format!("`{num}` is not a number")))?;
    if !value.is_finite() || value < 0.0 {
        return Err(unit_error(input, "value must be finite and non-negative"));
    }
    Ok((value, unit.trim()))
}

/// A duration in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Seconds(pub f64);

impl Seconds {
    pub fn from_minutes(m: f64) -> Self {
        Seconds(m * 60.0)
    }

    pub fn from_hours(h: f64) -> Self {
        Seconds(h * 3600.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Parse `"<number><unit>"` with unit one of `ms`, `s`, `min`, `h`.
    pub fn parse(input: &str) -> Result<Self, UnitError> {
        let (v, unit) = split_quantity(input)?;
        let secs = match unit {
            "ms" => v / 1000.0,
            "s" | "sec" => v,
            "min" => v * 60.0,
            "h" | "hr" | "hrs" => v * 3600.0,
            other => {
                return Err(unit_error(
                    input,
                    format!("unknown duration unit `{other}`"),
                ))
            }
        };
        Ok(Seconds(secs))
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.0)
    }
}

/// A bandwidth in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct BitRate(pub f64);

impl BitRate {
    pub fn mbps(m: f64) -> Self {
        BitRate(m * 1e6)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Parse `"<number><unit>"` with unit one of `bps`, `kbps`, `Mbps`, `Gbps`
    /// (decimal prefixes; `Kbps` is accepted as an alias of `kbps`).
    pub fn parse(input: &str) -> Result<Self, UnitError> {
        let (v, unit) = split_quantity(input)?;
        let scale = match unit {
            "bps" | "b/s" => 1.0,
            "kbps" | "Kbps" | "kb/s" => 1e3,
            "Mbps" | "Mb/s" => 1e6,
            "Gbps" | "Gb/s" => 1e9,
            other => {
                return Err(unit_error(
                    input,
                    format!("unknown bandwidth unit `{other}`"),
                ))
            }
        };
        Ok(BitRate(v * scale))
    }
}

impl fmt::Display for BitRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}bps", self.0)
    }
}

/// Parse a message size, `"<integer>bit"` or `"<integer>byte"`, into bits.
pub fn parse_bits(input: &str) -> Result<u64, UnitError> {
    let (v, unit) = split_quantity(input)?;
    let scale = match unit {
        "b" | "bit" | "bits" => 1.0,
        "B" | "byte" | "bytes" => 8.0,
        other => return Err(unit_error(input, format!("unknown size unit `{other}`"))),
    };
    let bits = v * scale;
    if bits.fract() != 0.0 || bits > u64::MAX as f64 {
        return Err(unit_error(input, "size must be a whole number of bits"));
    }
    Ok(bits as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(Seconds::parse("120s").unwrap(), Seconds(120.0));
        assert_eq!(Seconds::parse("7h").unwrap(), Seconds(25_200.0));
        assert_eq!(Seconds::parse("420 min").unwrap(), Seconds(25_200.0));
        assert_eq!(Seconds::parse("0.1min").unwrap(), Seconds(6.0));
        assert_eq!(Seconds::parse("250ms").unwrap(), Seconds(0.25));
    }

    #[test]
    fn bandwidths() {
        assert_eq!(BitRate::parse("3Mbps").unwrap(), BitRate(3e6));
        assert_eq!(BitRate::parse("8 Mbps").unwrap(), BitRate(8e6));
        assert_eq!(BitRate::parse("173.8Kbps").unwrap(), BitRate(173_800.0));
        assert_eq!(BitRate::parse("1Gbps").unwrap(), BitRate(1e9));
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_bits("400bit").unwrap(), 400);
        assert_eq!(parse_bits("50byte").unwrap(), 400);
        assert!(parse_bits("0.5bit").is_err());
    }

    #[test]
    fn rejects_bare_or_unknown() {
        assert!(Seconds::parse("120").is_err());
        assert!(Seconds::parse("s").is_err());
        assert!(Seconds::parse("3 fortnights").is_err());
        assert!(Seconds::parse("-3s").is_err());
        assert!(BitRate::parse("3").is_err());
        assert!(BitRate::parse("3MBps").is_err());
    }
}

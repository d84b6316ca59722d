//! Ranges, config files and the flag-over-file merge.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Inclusive integer range written `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IndexRange {
    pub start: u64,
    pub end: u64,
}

/// Closed real interval written `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RealRange {
    pub start: f64,
    pub end: f64,
}

fn split_range(s: &str) -> Result<(&str, &str), String> {
    s.split_once("..")
        .map(|(a, b)| (a.trim(), b.trim_start_matches('=').trim()))
        .ok_or_else(|| format!("expected a range like 5..50, got '{s}'"))
}

impl FromStr for IndexRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = split_range(s)?;
        let parse = |t: &str| t.parse::<u64>().map_err(|e| format!("bad range bound '{t}': {e}"));
        Ok(IndexRange {
            start: parse(a)?,
            end: parse(b)?,
        })
    }
}

impl FromStr for RealRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = split_range(s)?;
        let parse = |t: &str| t.parse::<f64>().map_err(|e| format!("bad range bound '{t}': {e}"));
        Ok(RealRange {
            start: parse(a)?,
            end: parse(b)?,
        })
    }
}

impl TryFrom<String> for IndexRange {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl TryFrom<String> for RealRange {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl fmt::Display for IndexRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl fmt::Display for RealRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}..{:?}", self.start, self.end)
    }
}

impl From<IndexRange> for String {
    fn from(r: IndexRange) -> String {
        r.to_string()
    }
}

impl From<RealRange> for String {
    fn from(r: RealRange) -> String {
        r.to_string()
    }
}

impl IndexRange {
    pub fn validate(&self, name: &str) -> Result<(), CliError> {
        if self.start == 0 {
            return Err(CliError::Usage(format!("--{name}: modes start at 1, got {self}")));
        }
        if self.start > self.end {
            return Err(CliError::Usage(format!("--{name}: empty range {self}")));
        }
        Ok(())
    }
}

impl RealRange {
    pub fn validate(&self, name: &str) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(CliError::Usage(format!("--{name}: bounds must be finite, got {self}")));
        }
        if self.start > self.end {
            return Err(CliError::Usage(format!("--{name}: empty range {self}")));
        }
        Ok(())
    }
}

/// Reads a TOML config, or JSON when the file ends in `.json`. Missing file is
/// exit 66; unreadable contents or unknown keys are exit 64.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::MissingInput(format!("cannot read config {}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|x| x == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

/// Overwrites `slot` when the flag was given.
pub fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

pub fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be positive and finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_and_print() {
        let r: IndexRange = "5..50".parse().unwrap();
        assert_eq!((r.start, r.end), (5, 50));
        assert_eq!(r.to_string(), "5..50");
        let r: IndexRange = "1..=3".parse().unwrap();
        assert_eq!(r.end, 3);
        let x: RealRange = "0.5..3".parse().unwrap();
        assert_eq!((x.start, x.end), (0.5, 3.0));
        assert_eq!(x.to_string(), "0.5..3.0");
        assert!("5".parse::<IndexRange>().is_err());
        assert!("a..b".parse::<RealRange>().is_err());
    }

    #[test]
    fn empty_ranges_rejected() {
        let r: IndexRange = "5..3".parse().unwrap();
        assert!(r.validate("k").is_err());
        let r: IndexRange = "0..3".parse().unwrap();
        assert!(r.validate("k").is_err());
        let x: RealRange = "3..0.5".parse().unwrap();
        assert!(x.validate("s").is_err());
    }
}

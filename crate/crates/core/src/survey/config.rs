//! Scan configuration files.
//!
//! A configuration is a flat TOML document of `key = value` lines; `#`
//! starts a comment. Recognised keys:
//!
//! ```toml
//! x_min = 524289          # default: x_max / 2 + 1
//! x_max = 1048576
//! y_max = 96
//! w = 10.0                # optional; adds singular-series columns
//! variant = "three"       # or "four"
//! stride = 1              # emit every stride-th row (exceptions always kept)
//! exceptions_only = false
//! ```
//!
//! Command-line values override file values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Three,
    Four,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Three => "three",
            Variant::Four => "four",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "three" => Ok(Variant::Three),
            "four" => Ok(Variant::Four),
            _ => Err(invalid!("unknown variant {s:?}")),
        }
    }
}

/// Partially specified scan parameters, from a file or from flags.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSettings {
    pub x_min: Option<u64>,
    pub x_max: Option<u64>,
    pub y_max: Option<u64>,
    pub w: Option<f64>,
    pub variant: Option<Variant>,
    pub stride: Option<u64>,
    pub exceptions_only: Option<bool>,
}

impl ScanSettings {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Values from `self`, falling back to `base` where unset.
    pub fn over(self, base: ScanSettings) -> ScanSettings {
        ScanSettings {
            x_min: self.x_min.or(base.x_min),
            x_max: self.x_max.or(base.x_max),
            y_max: self.y_max.or(base.y_max),
            w: self.w.or(base.w),
            variant: self.variant.or(base.variant),
            stride: self.stride.or(base.stride),
            exceptions_only: self.exceptions_only.or(base.exceptions_only),
        }
    }
}

/// Fully resolved scan parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanConfig {
    pub x_min: u64,
    pub x_max: u64,
    pub y_max: u64,
    pub w: Option<f64>,
    pub variant: Variant,
    pub stride: u64,
    pub exceptions_only: bool,
}

impl ScanConfig {
    pub fn resolve(settings: ScanSettings) -> Result<Self> {
        let x_max = settings
            .x_max
            .ok_or_else(|| Error::Config("x_max is required".into()))?;
        let y_max = settings
            .y_max
            .ok_or_else(|| Error::Config("y_max is required".into()))?;
        let x_min = settings.x_min.unwrap_or(x_max / 2 + 1);
        if x_min == 0 || x_min > x_max {
            return Err(Error::Config(format!("need 1 <= x_min <= x_max, got {x_min}..{x_max}")));
        }
        let stride = settings.stride.unwrap_or(1);
        if stride == 0 {
            return Err(Error::Config("stride must be positive".into()));
        }
        Ok(Self {
            x_min,
            x_max,
            y_max,
            w: settings.w,
            variant: settings.variant.unwrap_or_default(),
            stride,
            exceptions_only: settings.exceptions_only.unwrap_or(false),
        })
    }

    /// The configuration as `key = value` lines, in file syntax.
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("x_min = {}", self.x_min),
            format!("x_max = {}", self.x_max),
            format!("y_max = {}", self.y_max),
        ];
        if let Some(w) = self.w {
            lines.push(format!("w = {w:?}"));
        }
        lines.push(format!("variant = \"{}\"", self.variant));
        lines.push(format!("stride = {}", self.stride));
        lines.push(format!("exceptions_only = {}", self.exceptions_only));
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let file = ScanSettings::parse(
            "# campaign\nx_max = 1000 # top\ny_max = 5\nvariant = \"four\"\nw = 10\n",
        )
        .unwrap();
        let flags = ScanSettings {
            y_max: Some(7),
            ..Default::default()
        };
        let cfg = ScanConfig::resolve(flags.over(file)).unwrap();
        assert_eq!(cfg.x_min, 501);
        assert_eq!(cfg.y_max, 7);
        assert_eq!(cfg.variant, Variant::Four);
        assert_eq!(cfg.w, Some(10.0));
    }

    #[test]
    fn header_reparses_to_same_config() {
        let cfg = ScanConfig::resolve(ScanSettings::parse("x_max = 99\ny_max = 3\nw = 2.5\n").unwrap()).unwrap();
        let text = cfg.header_lines().join("\n");
        assert_eq!(ScanConfig::resolve(ScanSettings::parse(&text).unwrap()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ScanSettings::parse("x_maxx = 3").is_err());
        assert!(ScanSettings::parse("variant = \"five\"").is_err());
        assert!(ScanConfig::resolve(ScanSettings::default()).is_err());
        assert!(ScanConfig::resolve(ScanSettings::parse("x_max = 9\ny_max = 1\nx_min = 10").unwrap()).is_err());
    }
}

//! Run configuration: defaults, a `key = value` file, the cache-directory
//! environment variable, then command-line overrides.

use std::path::{Path, PathBuf};

use halfint_core::arith::DiscriminantFilter;
use serde_json::{json, Value};

/// The only setting read from the environment.
pub const CACHE_DIR_ENV: &str = "HALFINT_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// None disables the cache.
    pub cache_dir: Option<PathBuf>,
    /// Absolute error budget for central L-values.
    pub err_budget: f64,
    /// Tail tolerance for Kloosterman sums in the trace formulas.
    pub trace_tol: f64,
    /// Relative tolerance for numerical identities (ratios, moment routes).
    pub verify_tol: f64,
    /// B in the window Δ₁ = √(B(k - 1/2) log k) of the zero scanner.
    pub window_b: f64,
    pub filter: DiscriminantFilter,
    pub format: Format,
    /// Euler product truncation for the moment constants.
    pub p_max: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cache_dir: None,
            err_budget: 1e-8,
            trace_tol: 1e-13,
            verify_tol: 1e-6,
            window_b: 12.0,
            filter: DiscriminantFilter::Fundamental,
            format: Format::Json,
            p_max: 1_000_000,
        }
    }
}

fn positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    match value.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
        }),
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
        };
        match key {
            "cache_dir" => self.cache_dir = (!value.is_empty()).then(|| PathBuf::from(value)),
            "err_budget" => self.err_budget = positive(key, value)?,
            "trace_tol" => self.trace_tol = positive(key, value)?,
            "verify_tol" => self.verify_tol = positive(key, value)?,
            "window_b" => self.window_b = positive(key, value)?,
            "filter" => {
                self.filter = match value {
                    "fundamental" => DiscriminantFilter::Fundamental,
                    "flat" => DiscriminantFilter::Flat,
                    _ => return Err(bad()),
                }
            }
            "format" => {
                self.format = match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(bad()),
                }
            }
            "p_max" => self.p_max = value.parse().ok().filter(|&p| p >= 3).ok_or_else(bad)?,
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Apply a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    /// Every setting, for report headers.
    pub fn to_json(&self) -> Value {
        json!({
            "cache_dir": self.cache_dir.as_ref().map(|p| p.display().to_string()),
            "err_budget": self.err_budget,
            "trace_tol": self.trace_tol,
            "verify_tol": self.verify_tol,
            "window_b": self.window_b,
            "filter": self.filter.name(),
            "format": match self.format { Format::Json => "json", Format::Csv => "csv" },
            "p_max": self.p_max,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_syntax() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\n\n err_budget = 1e-9 \nfilter=flat # trailing\nformat = csv\n")
            .unwrap();
        assert_eq!(c.err_budget, 1e-9);
        assert_eq!(c.filter, DiscriminantFilter::Flat);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.apply_text("oops"), Err(ConfigError::Syntax { line: 1 }));
        assert!(matches!(
            c.apply_text("colour = red"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            c.apply_text("err_budget = -1"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            c.apply_text("p_max = 2"),
            Err(ConfigError::BadValue { .. })
        ));
        c.set("cache_dir", "").unwrap();
        assert_eq!(c.cache_dir, None);
    }
}

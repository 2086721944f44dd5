//! Experiment parameters: a `key = value` file, overridden by flags of the
//! same name.

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{field}`: {reason}")]
    Invalid { field: String, value: String, reason: String },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Every field is optional; experiments supply their own defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    /// Dyadic ladder `2^-A ..= 2^-B`.
    pub delta_exps: Option<(u32, u32)>,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub mu: Option<usize>,
    pub nu: Option<usize>,
    pub n: Option<usize>,
    pub t: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub grid_res: Option<f64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub const KEYS: [&str; 13] =
    ["delta-exps", "rho", "alpha", "p", "mu", "nu", "n", "t", "seed", "samples", "grid-res", "out", "workers"];

fn invalid(field: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), value: value.to_string(), reason: reason.into() }
}

fn positive_f64(field: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value.parse().map_err(|_| invalid(field, value, "not a number"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(field, value, "must be a positive finite number"));
    }
    Ok(v)
}

fn count(field: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| invalid(field, value, "not a non-negative integer"))
}

/// `A..B` (inclusive, `A ≤ B`) or a single `A`.
pub fn parse_ladder(value: &str) -> Result<(u32, u32), ConfigError> {
    let field = "delta-exps";
    let (a, b) = match value.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (value, value),
    };
    let parse = |s: &str| s.trim().parse::<u32>().map_err(|_| invalid(field, value, "expected A..B with integers"));
    let (a, b) = (parse(a)?, parse(b)?);
    if a == 0 || a > b || b > 30 {
        return Err(invalid(field, value, "need 1 <= A <= B <= 30"));
    }
    Ok((a, b))
}

impl Config {
    /// Sets one field from its textual form; `_` and `-` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "delta-exps" => self.delta_exps = Some(parse_ladder(value)?),
            "rho" => self.rho = Some(positive_f64(&key, value)?),
            "alpha" => self.alpha = Some(positive_f64(&key, value)?),
            "p" => self.p = Some(positive_f64(&key, value)?),
            "t" => {
                let t = positive_f64(&key, value)?;
                if t > 1.0 {
                    return Err(invalid(&key, value, "must lie in (0, 1]"));
                }
                self.t = Some(t)
            }
            "grid-res" => self.grid_res = Some(positive_f64(&key, value)?),
            "mu" => self.mu = Some(count(&key, value)?),
            "nu" => self.nu = Some(count(&key, value)?),
            "n" => self.n = Some(count(&key, value)?),
            "workers" => self.workers = Some(count(&key, value)?),
            "seed" => self.seed = Some(value.parse().map_err(|_| invalid(&key, value, "not a 64-bit unsigned integer"))?),
            "samples" => {
                let s: u64 = value.parse().map_err(|_| invalid(&key, value, "not a positive integer"))?;
                if s == 0 {
                    return Err(invalid(&key, value, "must be positive"));
                }
                self.samples = Some(s)
            }
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        Self::parse(&text)
    }

    /// `(key, value)` pairs of the fields that are set, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        push("delta-exps", self.delta_exps.map(|(a, b)| format!("{a}..{b}")));
        push("rho", self.rho.map(|v| v.to_string()));
        push("alpha", self.alpha.map(|v| v.to_string()));
        push("p", self.p.map(|v| v.to_string()));
        push("mu", self.mu.map(|v| v.to_string()));
        push("nu", self.nu.map(|v| v.to_string()));
        push("n", self.n.map(|v| v.to_string()));
        push("t", self.t.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("samples", self.samples.map(|v| v.to_string()));
        push("grid-res", self.grid_res.map(|v| v.to_string()));
        push("out", self.out.as_ref().map(|v| v.display().to_string()));
        push("workers", self.workers.map(|v| v.to_string()));
        out
    }

    /// The ladder `2^-A, …, 2^-B` with the given fallback.
    pub fn ladder(&self, default: (u32, u32)) -> Vec<f64> {
        let (a, b) = self.delta_exps.unwrap_or(default);
        (a..=b).map(|k| 0.5f64.powi(k as i32)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_with_comments() {
        let cfg = Config::parse("# ladder\ndelta-exps = 4..6\nrho=0.25  # quarter\n\nseed = 9\ngrid_res = 0.001\n").unwrap();
        assert_eq!(cfg.delta_exps, Some((4, 6)));
        assert_eq!(cfg.rho, Some(0.25));
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.grid_res, Some(0.001));
        assert_eq!(cfg.ladder((1, 1)), vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]);
    }

    #[test]
    fn errors_name_the_field() {
        let err = Config::parse("rho = -1").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "rho"));
        assert!(err.to_string().contains("rho"));
        assert_eq!(Config::parse("colour = red").unwrap_err(), ConfigError::UnknownKey("colour".into()));
        assert!(matches!(Config::parse("delta-exps = 8..4"), Err(ConfigError::Invalid { .. })));
        assert!(matches!(Config::parse("just words"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(Config::parse("t = 2"), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn ladder_forms() {
        assert_eq!(parse_ladder("5").unwrap(), (5, 5));
        assert_eq!(parse_ladder("4..=8").unwrap(), (4, 8));
        assert!(parse_ladder("0..3").is_err());
    }

    #[test]
    fn entries_round_trip() {
        let mut cfg = Config::default();
        for (k, v) in [("delta-exps", "4..8"), ("mu", "16"), ("t", "0.0625"), ("out", "x.csv")] {
            cfg.set(k, v).unwrap();
        }
        let text: String = cfg.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        assert_eq!(Config::parse(&text).unwrap(), cfg);
    }
}

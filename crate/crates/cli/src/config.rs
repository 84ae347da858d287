//! `key = value` configuration files and flag/file/environment resolution.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "FRACHARDY_SEED";

/// Keys accepted in a configuration file.
const KNOWN_KEYS: &[&str] = &[
    "d",
    "k",
    "s",
    "p",
    "alpha",
    "beta",
    "q",
    "seed",
    "samples",
    "rel_tol",
    "engine",
    "format",
    "output",
    "theorem",
    "wr",
    "log_radius",
    "count",
    "center",
    "radius",
    "m",
    "radial",
    "eps",
    "n_list",
    "phi_radius",
    "phi_m",
    "filter",
];

/// Values read from a configuration file. Flags take precedence.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// ignored, `-` in keys is read as `_`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!("config line {}: expected key = value", n + 1)));
            };
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("config line {}: unknown key '{key}'", n + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `flag`, else the file value for `key`.
    pub fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Config(format!("invalid value '{v}' for {key}"))))
            .transpose()
    }

    /// A comma-separated list.
    pub fn get_list(&self, flag: Option<Vec<f64>>, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key).map(|v| parse_list(v, key)).transpose()
    }

    pub fn get_bool(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        match self.raw(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(CliError::Config(format!("invalid value '{v}' for {key}"))),
        }
    }
}

pub fn parse_list(v: &str, key: &str) -> Result<Vec<f64>, CliError> {
    v.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("invalid value '{t}' in {key}"))))
        .collect()
}

/// Seed precedence: flag, config file, `FRACHARDY_SEED`, built-in default.
pub fn resolve_seed(flag: Option<u64>, file: &ConfigFile, env: Option<&str>, default: u64) -> Result<u64, CliError> {
    if let Some(s) = file.get(flag, "seed")? {
        return Ok(s);
    }
    match env {
        Some(v) => v.trim().parse().map_err(|_| CliError::Config(format!("invalid {SEED_ENV} value '{v}'"))),
        None => Ok(default),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_dashes() {
        let c = ConfigFile::parse("# run\nd = 2\nrel-tol = 1e-6  # tight\n\neps = 0.2, 0.1\n").unwrap();
        assert_eq!(c.get::<usize>(None, "d").unwrap(), Some(2));
        assert_eq!(c.get::<f64>(None, "rel_tol").unwrap(), Some(1e-6));
        assert_eq!(c.get_list(None, "eps").unwrap(), Some(vec![0.2, 0.1]));
        assert_eq!(c.get::<usize>(Some(3), "d").unwrap(), Some(3));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(ConfigFile::parse("dd = 2").is_err());
        assert!(ConfigFile::parse("d 2").is_err());
        assert!(ConfigFile::parse("d = two").unwrap().get::<usize>(None, "d").is_err());
    }

    #[test]
    fn seed_precedence() {
        let file = ConfigFile::parse("seed = 5").unwrap();
        let empty = ConfigFile::default();
        assert_eq!(resolve_seed(Some(1), &file, Some("9"), 0).unwrap(), 1);
        assert_eq!(resolve_seed(None, &file, Some("9"), 0).unwrap(), 5);
        assert_eq!(resolve_seed(None, &empty, Some("9"), 0).unwrap(), 9);
        assert_eq!(resolve_seed(None, &empty, None, 7).unwrap(), 7);
        assert!(resolve_seed(None, &empty, Some("x"), 7).is_err());
    }
}

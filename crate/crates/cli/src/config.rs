//! Flat key=value config files and the flag/file/default resolution order.
//!
//! Keys mirror the long flag names. Unknown keys are rejected so a typo in a
//! reproducibility config cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

pub const ENV_CONFIG: &str = "TOEPLITZ_HV_CONFIG";

const KNOWN_KEYS: &[&str] = &[
    "weight",
    "symbol",
    "blocks-builder",
    "b",
    "count",
    "n-min",
    "n-max",
    "rel-tol",
    "grid-mult",
    "out",
    "format",
    "seed",
    "alpha",
    "beta",
    "k",
    "b1",
    "epsilon",
    "coeffs",
    "trials",
    "symbols",
];

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let path: Option<PathBuf> = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(ENV_CONFIG).map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(&path).map_err(|e| {
            CliError::usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    i + 1
                )));
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::usage(format!(
                    "{}:{}: unknown config key `{key}`",
                    path.display(),
                    i + 1
                )));
            }
            if values.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(CliError::usage(format!(
                    "{}:{}: duplicate key `{key}`",
                    path.display(),
                    i + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn get_str(&self, key: &str) -> Option<String> {
        self.values.get(key).cloned()
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::usage(format!("config key `{key}`: cannot parse `{raw}`"))
            }),
        }
    }
}

/// flag value > config file > default
pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn resolve_opt<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

//! Flat `key=value` configuration files layered under command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// Parsed config file; empty when no file was given.
#[derive(Debug, Default)]
pub struct Layer {
    values: BTreeMap<String, String>,
    source: String,
}

impl Layer {
    /// Reads `path`, rejecting keys outside `allowed`.
    pub fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("{}:{}: expected key=value", path.display(), i + 1);
            };
            let key = k.trim().trim_start_matches("--").to_string();
            if !allowed.contains(&key.as_str()) {
                bail!(
                    "{}:{}: unknown key `{key}` (expected one of: {})",
                    path.display(),
                    i + 1,
                    allowed.join(", ")
                );
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self {
            values,
            source: path.display().to_string(),
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value, else config value, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(s) => s.parse().map_err(|e| {
                anyhow::anyhow!("{}: invalid value `{s}` for `{key}`: {e}", self.source)
            }),
            None => Ok(default),
        }
    }

    /// Boolean switch: set by the flag or by a truthy config value.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.raw(key) {
            None => Ok(false),
            Some(s) => match s.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => bail!("{}: invalid boolean `{s}` for `{key}`", self.source),
            },
        }
    }

    /// Optional value with no default.
    pub fn maybe<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|s| {
                s.parse().map_err(|e| {
                    anyhow::anyhow!("{}: invalid value `{s}` for `{key}`: {e}", self.source)
                })
            })
            .transpose()
    }
}

/// Comma-separated list.
pub fn parse_list<T>(s: &str, what: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    let items: Result<Vec<T>> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|e| anyhow::anyhow!("invalid {what} `{p}`: {e}"))
        })
        .collect();
    let items = items?;
    if items.is_empty() {
        bail!("empty {what} list");
    }
    Ok(items)
}

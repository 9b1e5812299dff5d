//! Flat key-value experiment configuration.
//!
//! The on-disk format is line oriented and diff friendly: one `key = value`
//! pair per line, dotted keys for grouping (`volume.radius = 10`), `#` starts
//! a comment, blank lines are ignored. Every key an experiment does not
//! understand is rejected with its line number, so typos fail loudly instead
//! of silently falling back to a default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed configuration plus the raw text it came from (hashed into run ids).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, Entry>,
    text: String,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {line}: expected `key = value`, got {content:?}")))?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || ".-_".contains(c)) {
                return Err(CliError::config(format!("line {line}: invalid key {key:?}")));
            }
            if entries.insert(key.to_string(), Entry { value: value.to_string(), line }).is_some() {
                return Err(CliError::config(format!("line {line}: duplicate key `{key}`")));
            }
        }
        Ok(Self { entries, text: text.to_string() })
    }

    /// Raw text, hashed into the run id so any edit produces a fresh id.
    pub fn text(&self) -> &str {
        &self.text
    }

    /// Key/value echo in sorted order, embedded verbatim in run records.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect()
    }

    /// Rejects any key outside `allowed`, reporting key and line number.
    pub fn ensure_known(&self, allowed: &[&str]) -> Result<(), CliError> {
        for (key, entry) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::config(format!(
                    "line {}: unknown config key `{key}`",
                    entry.line
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key).ok_or_else(|| CliError::config(format!("missing config key `{key}`")))
    }

    pub fn parse_required<T>(&self, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        parse_value(key, self.require(key)?)
    }

    pub fn parse_or<T>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.get(key) {
            Some(v) => parse_value(key, v),
            None => Ok(default),
        }
    }

    pub fn parse_optional<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key).map(|v| parse_value(key, v)).transpose()
    }
}

fn parse_value<T>(key: &str, value: &str) -> Result<T, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| CliError::config(format!("config key `{key}`: invalid value {value:?} ({e})")))
}

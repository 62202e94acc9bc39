//! Flat `key = value` text configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are skipped.
//! Keys are dotted paths (`grid.k_min = 0.1`); values are scalars or
//! comma-separated lists. Duplicate keys are rejected so that a typo cannot
//! silently shadow an earlier setting.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{}`", lineno + 1, line))
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(Error::Config(format!("line {}: duplicate key `{}`", lineno + 1, key)));
            }
            entries.push((key.to_string(), value.to_string()));
        }
        Ok(KeyValues { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Config(format!("missing key `{}`", key)))
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("key `{}`: `{}` is not a number", key, v)))
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.get_f64(key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.get_f64(key)?.ok_or_else(|| Error::Config(format!("missing key `{}`", key)))
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Config(format!("key `{}`: `{}` is not a non-negative integer", key, v)))
            })
            .transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.get_usize(key)?.unwrap_or(default))
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::Config(format!("key `{}`: `{}` is not a non-negative integer", key, v)))
            })
            .transpose()
    }

    /// Comma-separated list of numbers; an empty value is an empty list.
    pub fn get_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                if v.is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',')
                    .map(|item| {
                        item.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("key `{}`: `{}` is not a number", key, item.trim())))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn get_usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.get(key)
            .map(|v| {
                if v.is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',')
                    .map(|item| {
                        item.trim().parse::<usize>().map_err(|_| {
                            Error::Config(format!("key `{}`: `{}` is not a non-negative integer", key, item.trim()))
                        })
                    })
                    .collect()
            })
            .transpose()
    }
}

//! Flat key=value experiment configuration.
//!
//! One key per line, `#` comments, later keys override earlier ones;
//! command-line flags override the file. The format is deliberately flat so
//! experiment records diff cleanly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed key=value map with typed accessors.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                ConfigError(format!("key {key}: cannot parse {v:?}"))
            }),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32, ConfigError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.values
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }

    /// Comma-separated integer list; errors on empty lists so sweeps cannot
    /// silently degenerate.
    pub fn i64_list(&self, key: &str, default: &[i64]) -> Result<Vec<i64>, ConfigError> {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => {
                let items: Result<Vec<i64>, _> = v
                    .split(',')
                    .map(|s| s.trim().parse::<i64>())
                    .collect();
                let items =
                    items.map_err(|_| ConfigError(format!("key {key}: bad integer list {v:?}")))?;
                if items.is_empty() {
                    return Err(ConfigError(format!("key {key}: empty list")));
                }
                Ok(items)
            }
        }
    }

    pub fn u32_list(&self, key: &str, default: &[u32]) -> Result<Vec<u32>, ConfigError> {
        let as_i64: Vec<i64> = default.iter().map(|&x| x as i64).collect();
        let items = self.i64_list(key, &as_i64)?;
        items
            .into_iter()
            .map(|x| {
                u32::try_from(x).map_err(|_| ConfigError(format!("key {key}: negative value {x}")))
            })
            .collect()
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => {
                let items: Result<Vec<f64>, _> =
                    v.split(',').map(|s| s.trim().parse::<f64>()).collect();
                let items =
                    items.map_err(|_| ConfigError(format!("key {key}: bad number list {v:?}")))?;
                if items.is_empty() {
                    return Err(ConfigError(format!("key {key}: empty list")));
                }
                Ok(items)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs_with_comments() {
        let c = Config::from_str("n = 8\n# comment\ndelta=0.5 # trailing\ntimes=1,2,3\n").unwrap();
        assert_eq!(c.u32_or("n", 0).unwrap(), 8);
        assert!((c.f64_or("delta", 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(c.i64_list("times", &[]).unwrap(), vec![1, 2, 3]);
        assert_eq!(c.u32_or("missing", 7).unwrap(), 7);
    }

    #[test]
    fn rejects_malformed_lines_and_values() {
        assert!(Config::from_str("just words\n").is_err());
        let c = Config::from_str("n=abc\n").unwrap();
        assert!(c.u32_or("n", 0).is_err());
        let c = Config::from_str("times=\n").unwrap();
        assert!(c.i64_list("times", &[1]).is_err());
    }

    #[test]
    fn overrides_take_effect() {
        let mut c = Config::from_str("seed=1\n").unwrap();
        c.set("seed", "42".to_string());
        assert_eq!(c.u64_or("seed", 0).unwrap(), 42);
    }
}

//! Plain `key = value` config files. Flags given on the command line take
//! precedence over values read here, which take precedence over defaults.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use bhq::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", n + 1)))?;
            // keys are matched without leading dashes, so `--seed` and `seed` both work
            values.insert(k.trim().trim_start_matches('-').to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| Error::Parse(format!("config key {key} = {v}: {e}"))),
        }
    }

    /// `flag`, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.resolve(flag, key)?.unwrap_or(default))
    }

    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let c = ConfigFile::parse("# run\nseed = 7\n--qubits=6\n\n").unwrap();
        assert_eq!(c.pick(Some(1u64), "seed", 42).unwrap(), 1);
        assert_eq!(c.pick(None, "seed", 42u64).unwrap(), 7);
        assert_eq!(c.pick(None, "qubits", 4usize).unwrap(), 6);
        assert_eq!(c.pick(None, "depth", 3usize).unwrap(), 3);
    }

    #[test]
    fn bad_lines() {
        assert!(ConfigFile::parse("seed 7").is_err());
        let c = ConfigFile::parse("seed = x").unwrap();
        assert!(c.get::<u64>("seed").is_err());
    }
}

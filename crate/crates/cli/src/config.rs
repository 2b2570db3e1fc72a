//! Key=value config files merged under explicit flags (flags win).
//!
//! Format: one `key = value` pair per line, `#` comments, keys spelled like
//! the long flags with `-` or `_` interchangeable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Context;

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().to_lowercase().replace('-', "_")
}

impl ConfigFile {
    pub fn empty() -> ConfigFile {
        ConfigFile::default()
    }

    pub fn load(path: &Path) -> anyhow::Result<ConfigFile> {
        let contents = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (idx, line) in contents.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected key=value", path.display(), idx + 1))?;
            values.insert(normalize(key), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// Typed lookup; `Err` on unparsable values, `Ok(None)` when absent.
    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(&normalize(key)) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key}: bad value {raw:?}: {e}")),
        }
    }

    pub fn get_path(&self, key: &str) -> Option<PathBuf> {
        self.values.get(&normalize(key)).map(PathBuf::from)
    }
}

/// Flag > config > default resolution for an optional setting.
pub fn resolve<T: FromStr + Copy>(
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
    default: T,
) -> anyhow::Result<T>
where
    T::Err: std::fmt::Display,
{
    Ok(flag.or(config.get(key)?).unwrap_or(default))
}

/// Like [`resolve`] but with no default (stays optional).
pub fn resolve_opt<T: FromStr + Copy>(
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
) -> anyhow::Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    Ok(flag.or(config.get(key)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_and_normalizes_keys() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment\nn-trees = 25\ntest_fraction=0.3\n").unwrap();
        file.flush().unwrap();
        let config = ConfigFile::load(file.path()).unwrap();
        assert_eq!(config.get::<usize>("n_trees").unwrap(), Some(25));
        assert_eq!(config.get::<f64>("test-fraction").unwrap(), Some(0.3));
        assert_eq!(config.get::<u64>("missing").unwrap(), None);
    }

    #[test]
    fn flags_win_over_config() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "n-trees = 25").unwrap();
        file.flush().unwrap();
        let config = ConfigFile::load(file.path()).unwrap();
        assert_eq!(resolve(Some(7usize), &config, "n-trees", 100).unwrap(), 7);
        assert_eq!(resolve(None, &config, "n-trees", 100).unwrap(), 25);
        assert_eq!(resolve::<usize>(None, &config, "other", 100).unwrap(), 100);
    }
}

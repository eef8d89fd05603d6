//! Key-value run configuration: file parsing, flag overrides, typed access
//! with violation collection, and the configuration hash.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

/// Keys that steer where or how fast a run happens but not what it computes.
pub const UNHASHED_KEYS: [&str; 3] = ["output_dir", "threads", "config"];

/// Canonical form of a key: lower case, `-` folded to `_`.
pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// Flat settings after merging the config file with flag overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, Vec<String>> {
        let mut values = BTreeMap::new();
        let mut errors = Vec::new();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => {
                    let key = normalize_key(k);
                    if values.insert(key.clone(), v.trim().to_string()).is_some() {
                        errors.push(format!("line {}: duplicate key `{key}`", number + 1));
                    }
                }
                _ => errors.push(format!("line {}: expected `key = value`, got `{}`", number + 1, raw.trim())),
            }
        }
        if errors.is_empty() {
            Ok(Self { values })
        } else {
            Err(errors)
        }
    }

    pub fn load(path: &Path) -> Result<Self, Vec<String>> {
        let text = std::fs::read_to_string(path).map_err(|e| vec![format!("cannot read config {}: {e}", path.display())])?;
        Self::parse(&text)
    }

    /// Sets `key` to `value`, replacing any file value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(normalize_key(key), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// SHA-256 over the command name, the tool version and every setting
    /// except [`UNHASHED_KEYS`], in key order.
    pub fn hash(&self, command: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("command={command}\nversion={}\n", env!("CARGO_PKG_VERSION")));
        for (k, v) in &self.values {
            if !UNHASHED_KEYS.contains(&k.as_str()) {
                hasher.update(format!("{k}={v}\n"));
            }
        }
        hex::encode(hasher.finalize())
    }
}

/// A grid of real values: `lo:hi:step`, a comma list, or one number.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let number = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", t.trim()));
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [lo, hi, step] = parts.as_slice() else {
                return Err(format!("range `{s}` must be lo:hi:step"));
            };
            let (lo, hi, step) = (number(lo)?, number(hi)?, number(step)?);
            if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(format!("range `{s}` needs lo <= hi and step > 0"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(format!("range `{s}` has too many points"));
            }
            return Ok(Grid((0..count).map(|k| lo + step * k as f64).collect()));
        }
        let values = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("empty grid".into());
        }
        Ok(Grid(values))
    }
}

/// Typed reads from [`Settings`] that collect every problem instead of
/// stopping at the first.
pub struct Reader<'a> {
    settings: &'a Settings,
    allowed: Vec<&'static str>,
    pub violations: Vec<String>,
}

impl<'a> Reader<'a> {
    pub fn new(settings: &'a Settings) -> Self {
        Self { settings, allowed: UNHASHED_KEYS.to_vec(), violations: Vec::new() }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a str> {
        self.allowed.push(key);
        self.settings.get(key)
    }

    pub fn violation(&mut self, message: impl fmt::Display) {
        self.violations.push(message.to_string());
    }

    /// Parsed value or `default` when absent.
    pub fn or<T>(&mut self, key: &'static str, default: T) -> T
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => default,
            Some(text) => text.parse().unwrap_or_else(|e| {
                self.violation(format!("`{key}`: cannot parse `{text}`: {e}"));
                default
            }),
        }
    }

    /// Parsed value, `None` when absent.
    pub fn optional<T>(&mut self, key: &'static str) -> Option<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let text = self.raw(key)?;
        match text.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                self.violation(format!("`{key}`: cannot parse `{text}`: {e}"));
                None
            }
        }
    }

    /// Parsed value; a violation when absent.
    pub fn required<T>(&mut self, key: &'static str, why: &str) -> Option<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        if self.settings.get(key).is_none() {
            self.allowed.push(key);
            self.violation(format!("missing `{key}`: {why}"));
            return None;
        }
        self.optional(key)
    }

    /// Flags keys no command reads, so typos do not pass silently.
    pub fn finish(mut self) -> Vec<String> {
        let unknown: Vec<String> = self
            .settings
            .keys()
            .filter(|k| !self.allowed.contains(k))
            .map(|k| format!("unknown key `{k}`"))
            .collect();
        self.violations.extend(unknown);
        self.violations
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_text() {
        let s = Settings::parse("# run\nseed = 7\nn-grid = 0:1:0.5  # inline\n\n").unwrap();
        assert_eq!(s.get("seed"), Some("7"));
        assert_eq!(s.get("n_grid"), Some("0:1:0.5"));
        let errors = Settings::parse("seed 7\nseed=1\nseed=2\n").unwrap_err();
        assert_eq!(errors.len(), 2);
    }

    #[test]
    fn grid_forms() {
        assert_eq!("0:1:0.5".parse::<Grid>().unwrap().0, vec![0.0, 0.5, 1.0]);
        assert_eq!("0:8:0.5".parse::<Grid>().unwrap().0.len(), 17);
        assert_eq!("1, 2,4".parse::<Grid>().unwrap().0, vec![1.0, 2.0, 4.0]);
        assert_eq!("0.2".parse::<Grid>().unwrap().0, vec![0.2]);
        assert!("1:0:1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a,b".parse::<Grid>().is_err());
    }

    #[test]
    fn hash_ignores_output_location_and_threads() {
        let mut a = Settings::parse("seed = 1\n").unwrap();
        let base = a.hash("snr");
        a.set("output-dir", "/tmp/x");
        a.set("threads", "8");
        assert_eq!(a.hash("snr"), base);
        a.set("seed", "2");
        assert_ne!(a.hash("snr"), base);
        assert_ne!(Settings::default().hash("snr"), Settings::default().hash("thermo"));
        assert_eq!(base.len(), 64);
    }

    #[test]
    fn reader_collects_all_violations() {
        let s = Settings::parse("shots = many\ntypo = 1\n").unwrap();
        let mut r = Reader::new(&s);
        let shots: usize = r.or("shots", 10);
        let seed: Option<u64> = r.required("seed", "Monte-Carlo runs need an explicit seed");
        assert_eq!(shots, 10);
        assert!(seed.is_none());
        let v = r.finish();
        assert_eq!(v.len(), 3, "{v:?}");
    }
}

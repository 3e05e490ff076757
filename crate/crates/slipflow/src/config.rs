//! Flat key-value configuration files.
//!
//! Format: one `key = value` pair per line, `#` starts a comment, blank
//! lines ignored. Keys are snake_case with units spelled out in the name
//! (`target_h`, `flux_phi`). Every lookup — including defaults that were
//! never written in the file — is recorded, so a run manifest can echo the
//! fully resolved configuration with no silent defaults.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::roughness::{RoughnessKind, RoughnessSpec};

#[derive(Debug)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
    /// Every key consulted, with the value actually used (file or default).
    resolved: RefCell<BTreeMap<String, String>>,
    pub source: String,
}

impl KvConfig {
    pub fn parse(text: &str, source: &str) -> Result<KvConfig> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "{source}:{}: expected 'key = value', got '{raw}'",
                    lineno + 1
                )));
            };
            let key = k.trim().to_string();
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::config(format!(
                    "{source}:{}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
        }
        Ok(KvConfig {
            entries,
            resolved: RefCell::new(BTreeMap::new()),
            source: source.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<KvConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    fn record(&self, key: &str, value: &str) {
        self.resolved
            .borrow_mut()
            .insert(key.to_string(), value.to_string());
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        let v = self
            .entries
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string());
        self.record(key, &v);
        v
    }

    pub fn require_str(&self, key: &str) -> Result<String> {
        match self.entries.get(key) {
            Some(v) => {
                self.record(key, v);
                Ok(v.clone())
            }
            None => Err(Error::config(format!(
                "{}: missing required key '{key}'",
                self.source
            ))),
        }
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            Some(v) => {
                let x: f64 = v.parse().map_err(|_| {
                    Error::config(format!("{}: key '{key}': '{v}' is not a number", self.source))
                })?;
                self.record(key, v);
                Ok(x)
            }
            None => {
                self.record(key, &format!("{default}"));
                Ok(default)
            }
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.entries.get(key) {
            Some(v) => {
                let x: usize = v.parse().map_err(|_| {
                    Error::config(format!(
                        "{}: key '{key}': '{v}' is not a nonnegative integer",
                        self.source
                    ))
                })?;
                self.record(key, v);
                Ok(x)
            }
            None => {
                self.record(key, &format!("{default}"));
                Ok(default)
            }
        }
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.entries.get(key) {
            Some(v) => match v.as_str() {
                "true" | "yes" | "1" => {
                    self.record(key, v);
                    Ok(true)
                }
                "false" | "no" | "0" => {
                    self.record(key, v);
                    Ok(false)
                }
                _ => Err(Error::config(format!(
                    "{}: key '{key}': '{v}' is not a boolean",
                    self.source
                ))),
            },
            None => {
                self.record(key, &format!("{default}"));
                Ok(default)
            }
        }
    }

    /// Comma-separated float list.
    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.entries.get(key) {
            Some(v) => {
                let xs: Result<Vec<f64>> = v
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|_| {
                            Error::config(format!(
                                "{}: key '{key}': '{s}' is not a number",
                                self.source
                            ))
                        })
                    })
                    .collect();
                self.record(key, v);
                xs
            }
            None => {
                let rendered = default
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                self.record(key, &rendered);
                Ok(default.to_vec())
            }
        }
    }

    /// Seed list: either comma-separated integers or an inclusive-exclusive
    /// range `a..b`.
    pub fn get_seed_list(&self, key: &str, default: &[u64]) -> Result<Vec<u64>> {
        match self.entries.get(key) {
            Some(v) => {
                self.record(key, v);
                parse_seed_list(v)
                    .map_err(|e| Error::config(format!("{}: key '{key}': {e}", self.source)))
            }
            None => {
                let rendered = default
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                self.record(key, &rendered);
                Ok(default.to_vec())
            }
        }
    }

    /// All keys consulted so far with the values actually used.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        self.resolved.borrow().clone()
    }

    /// Keys present in the file that nothing ever consulted; surfaced as a
    /// configuration error so typos do not pass silently.
    pub fn check_unused(&self) -> Result<()> {
        let resolved = self.resolved.borrow();
        let unused: Vec<&String> = self
            .entries
            .keys()
            .filter(|k| !resolved.contains_key(*k))
            .collect();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "{}: unrecognized keys: {}",
                self.source,
                unused
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    }
}

pub fn parse_seed_list(v: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = v.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad range start '{a}'")))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad range end '{b}'")))?;
        if b <= a {
            return Err(Error::config(format!("empty seed range {a}..{b}")));
        }
        Ok((a..b).collect())
    } else {
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::config(format!("bad seed '{s}'")))
            })
            .collect()
    }
}

/// Load a roughness spec from a flat key-value file.
///
/// Documented keys: `kind`, `modes`, `amplitude`, `delta`, `K`, `period`.
pub fn load_roughness_spec(path: &Path) -> Result<RoughnessSpec> {
    let cfg = KvConfig::load(path)?;
    let spec = roughness_spec_from_kv(&cfg)?;
    cfg.check_unused()?;
    Ok(spec)
}

pub fn roughness_spec_from_kv(cfg: &KvConfig) -> Result<RoughnessSpec> {
    let kind: RoughnessKind = cfg.require_str("kind")?.parse()?;
    let spec = RoughnessSpec {
        kind,
        mode_count: cfg.get_usize("modes", 1)?,
        amplitude: cfg.get_f64("amplitude", 0.2)?,
        clamp_margin: cfg.get_f64("delta", 0.1)?,
        lipschitz_cap: cfg.get_f64("K", 2.0)?,
        period_hint: if cfg.has("period") {
            Some(cfg.get_f64("period", 1.0)?)
        } else {
            None
        },
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_records_defaults() {
        let cfg = KvConfig::parse("a = 1.5\n# note\nb = hello\n", "test").unwrap();
        assert_eq!(cfg.get_f64("a", 0.0).unwrap(), 1.5);
        assert_eq!(cfg.get_str("b", "x"), "hello");
        assert_eq!(cfg.get_f64("missing", 2.5).unwrap(), 2.5);
        let resolved = cfg.resolved();
        assert_eq!(resolved["missing"], "2.5");
        assert_eq!(resolved["a"], "1.5");
    }

    #[test]
    fn rejects_malformed_lines_and_duplicates() {
        assert!(KvConfig::parse("novalue\n", "t").is_err());
        assert!(KvConfig::parse("a = 1\na = 2\n", "t").is_err());
    }

    #[test]
    fn unused_keys_are_reported() {
        let cfg = KvConfig::parse("a = 1\ntypo_key = 2\n", "t").unwrap();
        let _ = cfg.get_f64("a", 0.0).unwrap();
        assert!(cfg.check_unused().is_err());
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seed_list("3..6").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_seed_list("1, 5, 9").unwrap(), vec![1, 5, 9]);
        assert!(parse_seed_list("5..5").is_err());
    }

    #[test]
    fn roughness_spec_roundtrip() {
        let cfg = KvConfig::parse(
            "kind = shifted-periodic\nmodes = 1\namplitude = 0.2\ndelta = 0.1\nK = 2.0\nperiod = 1.0\n",
            "t",
        )
        .unwrap();
        let spec = roughness_spec_from_kv(&cfg).unwrap();
        assert_eq!(spec.kind, RoughnessKind::ShiftedPeriodic);
        assert_eq!(spec.period_hint, Some(1.0));
        cfg.check_unused().unwrap();
    }
}

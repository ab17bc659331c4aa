//! `key=value` run configuration files.
//!
//! One entry per line, `#` starts a comment line, blank lines are ignored.
//! Keys mirror the long command-line flags; flags given on the command line
//! override values from the file. Unknown keys, duplicates and values of the
//! wrong type are rejected while parsing.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use pingpong_core::attacks::EveStrategy;
use pingpong_core::quantum::NoiseModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Count,
    Real,
    Eve,
    Noise,
    Path,
    Flag,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigValue {
    Count(u64),
    Real(f64),
    Eve(EveStrategy),
    Noise(NoiseModel),
    Path(PathBuf),
    Flag(bool),
}

pub const PINGPONG_KEYS: &[(&str, ValueKind)] = &[
    ("rounds", ValueKind::Count),
    ("control-prob", ValueKind::Real),
    ("eve", ValueKind::Eve),
    ("noise", ValueKind::Noise),
    ("seed", ValueKind::Count),
    ("out", ValueKind::Path),
];

pub const QKD_KEYS: &[(&str, ValueKind)] = &[
    ("c1", ValueKind::Path),
    ("c2", ValueKind::Path),
    ("m", ValueKind::Count),
    ("l", ValueKind::Count),
    ("t", ValueKind::Count),
    ("tprime", ValueKind::Count),
    ("blocks", ValueKind::Count),
    ("eve", ValueKind::Eve),
    ("noise", ValueKind::Noise),
    ("seed", ValueKind::Count),
    ("out", ValueKind::Path),
    ("reveal-keys", ValueKind::Flag),
];

fn parse_value(kind: ValueKind, raw: &str) -> Result<ConfigValue> {
    Ok(match kind {
        ValueKind::Count => ConfigValue::Count(
            raw.parse()
                .map_err(|_| anyhow!("`{raw}` is not a non-negative integer"))?,
        ),
        ValueKind::Real => {
            let v: f64 = raw
                .parse()
                .map_err(|_| anyhow!("`{raw}` is not a number"))?;
            if !v.is_finite() {
                bail!("`{raw}` is not finite");
            }
            ConfigValue::Real(v)
        }
        ValueKind::Eve => ConfigValue::Eve(raw.parse()?),
        ValueKind::Noise => ConfigValue::Noise(raw.parse()?),
        ValueKind::Path => {
            if raw.is_empty() {
                bail!("empty path");
            }
            ConfigValue::Path(PathBuf::from(raw))
        }
        ValueKind::Flag => ConfigValue::Flag(match raw {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            other => bail!("`{other}` is not a boolean"),
        }),
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfigFile {
    entries: BTreeMap<String, ConfigValue>,
}

impl RunConfigFile {
    pub fn parse(text: &str, keys: &[(&str, ValueKind)]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {lineno}: expected key=value"))?;
            let key = key.trim();
            let kind = keys
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, kind)| *kind)
                .ok_or_else(|| anyhow!("line {lineno}: unknown key `{key}`"))?;
            let value = parse_value(kind, raw.trim())
                .with_context(|| format!("line {lineno}: key `{key}`"))?;
            if entries.insert(key.to_string(), value).is_some() {
                bail!("line {lineno}: duplicate key `{key}`");
            }
        }
        Ok(RunConfigFile { entries })
    }

    pub fn load(path: &std::path::Path, keys: &[(&str, ValueKind)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text, keys).with_context(|| format!("in config {}", path.display()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, key: &str) -> Option<u64> {
        match self.entries.get(key) {
            Some(ConfigValue::Count(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.entries.get(key) {
            Some(ConfigValue::Real(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn eve(&self, key: &str) -> Option<EveStrategy> {
        match self.entries.get(key) {
            Some(ConfigValue::Eve(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn noise(&self, key: &str) -> Option<NoiseModel> {
        match self.entries.get(key) {
            Some(ConfigValue::Noise(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        match self.entries.get(key) {
            Some(ConfigValue::Path(v)) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn flag(&self, key: &str) -> Option<bool> {
        match self.entries.get(key) {
            Some(ConfigValue::Flag(v)) => Some(*v),
            _ => None,
        }
    }
}

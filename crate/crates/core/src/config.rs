//! Pipeline configuration: every tunable in one place, loadable from a
//! TOML file with `key=value` overrides. Unknown keys are rejected so a
//! typo never silently falls back to a default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interact::{Limits, LinkLexicon};
use crate::miner::{DEFAULT_MIN_CLUSTER_SIZE, DEFAULT_TAG_FILTER};
use crate::similarity::PenaltyConfig;
use crate::taghash::DEFAULT_CANOPY_DEPTH;
use crate::typing::TypeThresholds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinerConfig {
    /// Anchor tags considered when building the tag-hash list; empty means
    /// every tag.
    pub tag_filter: Vec<String>,
    pub canopy_depth: usize,
    pub min_cluster_size: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            tag_filter: DEFAULT_TAG_FILTER.iter().map(|s| s.to_string()).collect(),
            canopy_depth: DEFAULT_CANOPY_DEPTH,
            min_cluster_size: DEFAULT_MIN_CLUSTER_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub similarity: PenaltyConfig,
    pub typing: TypeThresholds,
    pub miner: MinerConfig,
    pub lexicon: LinkLexicon,
    pub limits: Limits,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        Config::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Apply `dotted.key=value` overrides on top of this config. Values
    /// parse as TOML scalars/arrays first and fall back to plain strings.
    pub fn with_overrides(&self, sets: &[(String, String)]) -> Result<Config> {
        let mut value =
            toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        for (key, raw) in sets {
            let parsed: toml::Value = match format!("v = {raw}").parse::<toml::Table>() {
                Ok(table) => table["v"].clone(),
                Err(_) => toml::Value::String(raw.clone()),
            };
            set_path(&mut value, key, parsed)?;
        }
        value.try_into().map_err(|e| Error::Config(e.to_string()))
    }
}

fn set_path(root: &mut toml::Value, dotted: &str, new_value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = dotted.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key {dotted:?}")));
    }
    let mut cur = root;
    for part in &parts[..parts.len() - 1] {
        cur = cur
            .as_table_mut()
            .and_then(|t| t.get_mut(*part))
            .ok_or_else(|| Error::Config(format!("unknown config key {dotted:?}")))?;
    }
    let table = cur
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("unknown config key {dotted:?}")))?;
    let last = parts[parts.len() - 1];
    if !table.contains_key(last) {
        return Err(Error::Config(format!("unknown config key {dotted:?}")));
    }
    table.insert(last.to_string(), new_value);
    Ok(())
}

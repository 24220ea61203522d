//! TOML run configuration.
//!
//! ```toml
//! input = "people.csv"          # relative to this file
//! output = "report.json"        # optional, `--output` wins
//! subsets = [["age"], ["age", "city"]]
//! measures = ["nonspecificity", "pignistic_entropy", "compatibility"]
//!
//! [scheme.age]
//! intervals = [[15, 19], [20, 25]]
//!
//! [scheme.city]
//! groups = [
//!   { label = "north", members = ["oslo", "bergen"] },
//!   { label = "south", members = ["rome"] },
//! ]
//!
//! [scheme.zip]
//! identity = true
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use reid_core::reident::{AttributeSubset, CategoryGroup, GeneralizationScheme, Generalizer, Interval, Table};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Nonspecificity,
    PignisticEntropy,
    Compatibility,
}

fn all_measures() -> Vec<Measure> {
    vec![Measure::Nonspecificity, Measure::PignisticEntropy, Measure::Compatibility]
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntry {
    pub intervals: Option<Vec<[i64; 2]>>,
    pub groups: Option<Vec<CategoryGroup>>,
    #[serde(default)]
    pub identity: bool,
}

impl SchemeEntry {
    fn generalizer(&self, attribute: &str) -> Result<Generalizer, CliError> {
        match (&self.intervals, &self.groups, self.identity) {
            (Some(ivs), None, false) => Ok(Generalizer::Intervals(
                ivs.iter().map(|&[lo, hi]| Interval::new(lo, hi)).collect(),
            )),
            (None, Some(groups), false) => Ok(Generalizer::Groups(groups.clone())),
            (None, None, true) => Ok(Generalizer::Identity),
            (None, None, false) => Err(CliError::Config(format!(
                "scheme entry for `{attribute}` is empty; give intervals, groups or identity = true"
            ))),
            _ => Err(CliError::Config(format!(
                "scheme entry for `{attribute}` mixes intervals, groups and identity"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub scheme: BTreeMap<String, SchemeEntry>,
    pub subsets: Option<Vec<Vec<String>>>,
    #[serde(default = "all_measures")]
    pub measures: Vec<Measure>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let mut config: RunConfig = toml::from_str(text).map_err(|e| CliError::parse(origin, e))?;
        if let Some(dir) = origin.parent() {
            if config.input.is_relative() {
                config.input = dir.join(&config.input);
            }
            if let Some(out) = &config.output {
                if out.is_relative() {
                    config.output = Some(dir.join(out));
                }
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Generalization scheme, checked against the table's attributes.
    pub fn scheme(&self, table: &Table) -> Result<GeneralizationScheme, CliError> {
        for name in self.scheme.keys() {
            if table.attribute_index(name).is_none() {
                return Err(CliError::Config(format!("scheme names unknown attribute `{name}`")));
            }
        }
        let mut entries = Vec::with_capacity(table.n_attributes());
        for name in table.attributes() {
            let entry = self
                .scheme
                .get(name)
                .ok_or_else(|| CliError::Config(format!("no scheme entry for attribute `{name}`")))?;
            entries.push((name.clone(), entry.generalizer(name)?));
        }
        GeneralizationScheme::new(entries).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Attribute subsets to evaluate: as configured, or each single attribute
    /// followed by the full set.
    pub fn attribute_subsets(&self, table: &Table) -> Result<Vec<AttributeSubset>, CliError> {
        let m = table.n_attributes();
        let mut out = Vec::new();
        match &self.subsets {
            Some(lists) => {
                for names in lists {
                    let s = AttributeSubset::from_names(table.attributes(), names)
                        .map_err(|e| CliError::Config(e.to_string()))?;
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
            None => {
                out.extend((0..m).map(AttributeSubset::single));
                let full = AttributeSubset::full(m);
                if !out.contains(&full) {
                    out.push(full);
                }
            }
        }
        if out.is_empty() {
            return Err(CliError::Config("no attribute subsets to evaluate".into()));
        }
        Ok(out)
    }

    pub fn wants(&self, measure: Measure) -> bool {
        self.measures.contains(&measure)
    }
}

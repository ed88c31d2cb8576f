//! TOML configuration shared by the command-line tools.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::catalog::CatalogSpec;
use super::HarnessError;
use crate::procedures::DensityThreshold;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

/// Everything is optional; command-line flags take precedence.
///
/// ```toml
/// budget = 100000
/// format = "text"
///
/// [density_threshold]
/// alpha = "7/2"
/// provenance = "my estimate"
///
/// [catalog.small-gf5]
/// generator = "random_linear"
/// q = 5
/// max_rank = 4
/// max_size = 9
/// count = 20
/// seed = 3
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub budget: Option<u64>,
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub cache_dir: Option<PathBuf>,
    pub iso_reduce: Option<bool>,
    /// The constant in the rank threshold of the density bound. Unset by
    /// default; no value is assumed.
    pub density_threshold: Option<DensityThreshold>,
    #[serde(default)]
    pub catalog: BTreeMap<String, CatalogSpec>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: Config = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(t) = &config.density_threshold {
            DensityThreshold::new(t.alpha.clone(), t.provenance.clone())?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// A catalog by name: a custom entry first, then the built-in names.
    pub fn catalog_spec(&self, name: &str) -> Result<CatalogSpec, HarnessError> {
        match self.catalog.get(name) {
            Some(spec) => Ok(spec.clone()),
            None => name.parse(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let c = Config::from_toml(
            r#"
budget = 1000
format = "csv"
iso_reduce = true

[density_threshold]
alpha = "7/2"
provenance = "test"

[catalog.mine]
generator = "named"
names = ["fano"]
"#,
        )
        .unwrap();
        assert_eq!(c.budget, Some(1000));
        assert_eq!(c.format, Some(OutputFormat::Csv));
        assert_eq!(c.density_threshold.as_ref().unwrap().alpha.to_string(), "7/2");
        assert_eq!(c.catalog_spec("mine").unwrap(), CatalogSpec::Named { names: vec!["fano".into()] });
        assert!(c.catalog_spec("pg3q2-all").is_ok());
        assert!(c.catalog_spec("nope").is_err());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(Config::from_toml("bugdet = 3").is_err());
        assert!(Config::from_toml("[density_threshold]\nalpha = \"1/2\"\nprovenance = \"x\"").is_err());
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }
}

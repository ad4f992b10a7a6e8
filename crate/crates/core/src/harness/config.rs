//! Scenario configuration, read from a TOML document.
//!
//! ```toml
//! schema_version = 1
//! budgets = [5, 10, 15, 20, 25, 30]
//! compression = "both"                 # "on" | "off" | "both"
//! payment_rules = ["clarke-pivot"]     # plus "paper-literal", "clearing"
//! clearing_variant = "lowest-winning-bid"
//! ssp_cost = 0.0
//! output = "results.csv"
//!
//! [replications]
//! count = 100
//! base_seed = 1
//!
//! [valuation]
//! normalize_gain = false
//! literal_raw_gain = false
//!
//! [compression_model]
//! ratio = 0.1
//! cost_coefficient = 1e-3
//! curve = { anchors = [[0.05, 0.90], [0.1, 0.95], [0.5, 0.99], [1.0, 1.0]] }
//!
//! [population]
//! device_count = 20
//! raw_size_bits = { shape = "uniform", low = 2e6, high = 8e6 }
//! # ... one distribution per device field, see `PopulationConfig`
//! ```
//!
//! Every section except `schema_version` may be omitted and falls back to
//! the defaults in [`ScenarioConfig::default`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::auction::{ClearingVariant, PaymentRule};
use crate::compression::RateAccuracyCurve;
use crate::device::PopulationConfig;
use crate::error::{Error, Result};
use crate::valuation::ValuationOptions;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompressionSetting {
    On,
    Off,
    Both,
}

impl CompressionSetting {
    /// Compression flags to run, raw first.
    pub fn flags(self) -> &'static [bool] {
        match self {
            CompressionSetting::On => &[true],
            CompressionSetting::Off => &[false],
            CompressionSetting::Both => &[false, true],
        }
    }
}

impl FromStr for CompressionSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(CompressionSetting::On),
            "off" => Ok(CompressionSetting::Off),
            "both" => Ok(CompressionSetting::Both),
            other => Err(Error::Config(format!(
                "unknown compression setting `{other}`"
            ))),
        }
    }
}

/// Payment rule as named in configs and on the command line; `clearing` is
/// resolved against `clearing_variant`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    ClarkePivot,
    PaperLiteral,
    Clearing,
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleName::ClarkePivot => "clarke-pivot",
            RuleName::PaperLiteral => "paper-literal",
            RuleName::Clearing => "clearing",
        })
    }
}

impl FromStr for RuleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clarke-pivot" => Ok(RuleName::ClarkePivot),
            "paper-literal" => Ok(RuleName::PaperLiteral),
            "clearing" => Ok(RuleName::Clearing),
            other => Err(Error::Config(format!("unknown payment rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Replications {
    pub count: u32,
    pub base_seed: u64,
}

impl Replications {
    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..u64::from(self.count)).map(move |i| self.base_seed.wrapping_add(i))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressionModelConfig {
    /// Latent-to-raw size ratio every compressing device uses.
    pub ratio: f64,
    /// Encoder cost per raw bit removed.
    pub cost_coefficient: f64,
    #[serde(default)]
    pub curve: RateAccuracyCurve,
}

impl Default for CompressionModelConfig {
    fn default() -> Self {
        CompressionModelConfig {
            ratio: 0.1,
            cost_coefficient: 1e-3,
            curve: RateAccuracyCurve::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub population: PopulationConfig,
    pub budgets: Vec<u32>,
    pub compression: CompressionSetting,
    pub compression_model: CompressionModelConfig,
    pub payment_rules: Vec<RuleName>,
    pub clearing_variant: Option<ClearingVariant>,
    pub valuation: ValuationOptions,
    pub ssp_cost: f64,
    pub output: Option<PathBuf>,
    pub replications: Replications,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            population: PopulationConfig::default(),
            budgets: vec![5, 10, 15, 20, 25, 30],
            compression: CompressionSetting::Both,
            compression_model: CompressionModelConfig::default(),
            payment_rules: vec![RuleName::ClarkePivot],
            clearing_variant: Some(ClearingVariant::LowestWinningBid),
            valuation: ValuationOptions::default(),
            ssp_cost: 0.0,
            output: None,
            replications: Replications {
                count: 100,
                base_seed: 1,
            },
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        ScenarioConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config always serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        self.population.validate()?;
        if self.budgets.is_empty() {
            return Err(Error::Config("budgets must not be empty".into()));
        }
        if self.replications.count == 0 {
            return Err(Error::Config(
                "replications.count must be at least 1".into(),
            ));
        }
        if self.payment_rules.is_empty() {
            return Err(Error::Config("payment_rules must not be empty".into()));
        }
        if !(self.ssp_cost.is_finite() && self.ssp_cost >= 0.0) {
            return Err(Error::Config(format!(
                "ssp_cost {} must be finite and non-negative",
                self.ssp_cost
            )));
        }
        let cm = &self.compression_model;
        if !(cm.cost_coefficient.is_finite() && cm.cost_coefficient >= 0.0) {
            return Err(Error::Config(
                "compression_model.cost_coefficient must be non-negative".into(),
            ));
        }
        cm.curve
            .accuracy_at(cm.ratio)
            .map_err(|e| Error::Config(format!("compression_model.ratio: {e}")))?;
        self.resolved_rules()?;
        Ok(())
    }

    /// Concrete payment rules in config order, without duplicates.
    pub fn resolved_rules(&self) -> Result<Vec<PaymentRule>> {
        let mut rules = Vec::new();
        for name in &self.payment_rules {
            let rule = match name {
                RuleName::ClarkePivot => PaymentRule::ClarkePivot,
                RuleName::PaperLiteral => PaymentRule::PaperLiteral,
                RuleName::Clearing => {
                    PaymentRule::Clearing(self.clearing_variant.ok_or_else(|| {
                        Error::Config("payment rule `clearing` requires clearing_variant".into())
                    })?)
                }
            };
            if !rules.contains(&rule) {
                rules.push(rule);
            }
        }
        Ok(rules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_validates_and_round_trips() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn minimal_document() {
        let cfg = ScenarioConfig::from_toml_str("schema_version = 1\nbudgets = [4]\n").unwrap();
        assert_eq!(cfg.budgets, vec![4]);
        assert_eq!(cfg.population, PopulationConfig::default());
    }

    #[test]
    fn rejects_bad_documents() {
        for doc in [
            "schema_version = 2",
            "schema_version = 1\nbudgets = []",
            "schema_version = 1\n[replications]\ncount = 0\nbase_seed = 1",
            "schema_version = 1\npayment_rules = [\"clearing\"]\nclearing_variant = \"median\"",
            "schema_version = 1\nunknown_key = 3",
            "schema_version = 1\n[compression_model]\nratio = 0.01\ncost_coefficient = 0.0",
        ] {
            assert!(ScenarioConfig::from_toml_str(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn clearing_needs_variant() {
        let mut cfg = ScenarioConfig::default();
        cfg.payment_rules = vec![RuleName::Clearing];
        cfg.clearing_variant = None;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.clearing_variant = Some(ClearingVariant::HighestLosingBid);
        assert_eq!(
            cfg.resolved_rules().unwrap(),
            vec![PaymentRule::Clearing(ClearingVariant::HighestLosingBid)]
        );
    }
}

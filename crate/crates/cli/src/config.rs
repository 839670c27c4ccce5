//! Versioned TOML run configuration. See `docs/config.md` for the schema.

use std::path::Path;

use anyhow::{bail, Context};
use kpicast::hpo::SearchSpace;
use kpicast::{MonthIndex, PipelineConfig};
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    /// Seeds both the synthetic generator and weight initialisation.
    /// Overridden by `--seed`; falls back to `pipeline.training.seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub synth: SynthConfig,
    #[serde(default)]
    pub hpo: HpoConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: None,
            pipeline: PipelineConfig::default(),
            synth: SynthConfig::default(),
            hpo: HpoConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub months: usize,
    /// First month, `YYYY-MM`.
    pub start: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            months: 85,
            start: "2018-01".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HpoMethod {
    Grid,
    Bayes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HpoConfig {
    pub method: HpoMethod,
    pub budget: usize,
    pub space: SearchSpace,
}

impl Default for HpoConfig {
    fn default() -> Self {
        Self {
            method: HpoMethod::Grid,
            budget: 20,
            space: SearchSpace::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        if cfg.version != CONFIG_VERSION {
            bail!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            );
        }
        cfg.pipeline.validate()?;
        cfg.hpo.space.validate()?;
        cfg.start_month()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn start_month(&self) -> anyhow::Result<MonthIndex> {
        self.synth
            .start
            .parse()
            .map_err(|e| anyhow::anyhow!("synth.start: {e}"))
    }

    /// Applies the effective seed to the training config and returns it.
    pub fn resolve_seed(&mut self, flag: Option<u64>) -> u64 {
        let seed = flag.or(self.seed).unwrap_or(self.pipeline.training.seed);
        self.seed = Some(seed);
        self.pipeline.training.seed = seed;
        seed
    }
}

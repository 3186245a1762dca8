//! Run configuration, loaded from a TOML file. Every key is optional.
//!
//! Stage seeds (split, synthetic cohort, baseline SGD) are derived from the
//! single top-level `seed`; stage-level seed keys are overwritten.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baseline::BaselineConfig;
use crate::corpus::{DEFAULT_MIN_ENGLISH, DEFAULT_MIN_TWEETS};
use crate::dictionary::BuilderParams;
use crate::evaluation::{derive_seed, SurveyRunnerConfig, SyntheticCohortSpec};
use crate::scoring::{AlphaMode, Tool, ToolDemographics};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Line-delimited JSON post stream.
    pub input: Option<PathBuf>,
    /// Labels table (CSV).
    pub labels: Option<PathBuf>,
    /// Dictionary file; defaults to the one `build-dict` writes.
    pub dictionary: Option<PathBuf>,
    /// Category lexicon file; defaults to the bundled lists.
    pub lexicons: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub min_tweets: usize,
    pub min_english: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            min_tweets: DEFAULT_MIN_TWEETS,
            min_english: DEFAULT_MIN_ENGLISH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub mode: AlphaMode,
    pub calibration: bool,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            mode: AlphaMode::Binary,
            calibration: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub train_fraction: f64,
    pub fractions: Vec<f64>,
    pub offsets: Vec<usize>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.5,
            fractions: vec![0.2, 0.4, 0.6, 0.8],
            offsets: vec![0, 1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemographicsEntry {
    pub chosen_questions: u8,
    pub total_points: u32,
    pub threshold: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub paths: PathsConfig,
    pub ingest: IngestConfig,
    pub builder: BuilderParams,
    pub scoring: ScoringConfig,
    pub baseline: BaselineConfig,
    pub evaluation: EvaluationConfig,
    pub synth: SyntheticCohortSpec,
    /// Survey table keyed by tool name. Values must match the fixed table.
    pub demographics: BTreeMap<String, DemographicsEntry>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            paths: PathsConfig::default(),
            ingest: IngestConfig::default(),
            builder: BuilderParams::default(),
            scoring: ScoringConfig::default(),
            baseline: BaselineConfig::default(),
            evaluation: EvaluationConfig::default(),
            synth: SyntheticCohortSpec::default(),
            demographics: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.demographics()?;
        let f = self.evaluation.train_fraction;
        if !(f > 0.0 && f < 1.0)
            || self
                .evaluation
                .fractions
                .iter()
                .any(|&f| !(f > 0.0 && f < 1.0))
        {
            return Err(Error::Config(
                "training fractions must lie in (0, 1)".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.ingest.min_english) {
            return Err(Error::Config(
                "ingest.min_english must lie in [0, 1]".into(),
            ));
        }
        self.synth.validate()
    }

    /// The survey table, checked entry by entry against the fixed values.
    /// Tools absent from the file take the fixed values.
    pub fn demographics(&self) -> Result<[ToolDemographics; 3]> {
        for name in self.demographics.keys() {
            name.parse::<Tool>()
                .map_err(|_| Error::Config(format!("unknown survey {name:?} in [demographics]")))?;
        }
        let mut out = [ToolDemographics::DOSPERT; 3];
        for tool in Tool::ALL {
            let fixed = tool.demographics();
            if let Some(e) = self.demographics.get(tool.name()) {
                let loaded = ToolDemographics {
                    tool,
                    chosen_questions: e.chosen_questions,
                    total_points: e.total_points,
                    threshold: e.threshold,
                };
                if loaded != fixed {
                    return Err(Error::Config(format!(
                        "{tool} demographics ({}, {}, {}) differ from the survey table ({}, {}, {})",
                        e.chosen_questions,
                        e.total_points,
                        e.threshold,
                        fixed.chosen_questions,
                        fixed.total_points,
                        fixed.threshold
                    )));
                }
            }
            out[tool.ordinal()] = fixed;
        }
        Ok(out)
    }

    pub fn split_seed(&self) -> u64 {
        derive_seed(self.seed, "split")
    }

    pub fn synth_spec(&self) -> SyntheticCohortSpec {
        SyntheticCohortSpec {
            seed: derive_seed(self.seed, "synth"),
            ..self.synth.clone()
        }
    }

    pub fn baseline_config(&self) -> BaselineConfig {
        let mut b = self.baseline;
        b.loglinear.seed = derive_seed(self.seed, "baseline");
        b
    }

    pub fn survey_config(&self) -> SurveyRunnerConfig {
        SurveyRunnerConfig {
            builder: self.builder,
            mode: self.scoring.mode,
            calibration: self.scoring.calibration,
        }
    }
}

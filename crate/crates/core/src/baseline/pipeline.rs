//! The complete baseline classifier: LM-pair and category-proportion
//! features feeding the loglinear model, plus per-level character models for
//! intensity.

use serde::{Deserialize, Serialize};

use super::features::category_proportions;
use super::lexicon::{CategoryLexicon, CATEGORY_NAMES};
use super::lm::{classify_multiclass, train_lm, LanguageModel, LmKind, LmPair};
use super::loglinear::{train_loglinear, LoglinearConfig, LoglinearModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Add-k constant for both language models.
    pub smoothing: f64,
    pub char_order: usize,
    /// Folds used to compute out-of-fold LM features for training users.
    pub folds: usize,
    pub loglinear: LoglinearConfig,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            smoothing: 0.1,
            char_order: 3,
            folds: 3,
            loglinear: LoglinearConfig::default(),
        }
    }
}

/// One training user: their texts and true intensity level (0 = no PTSD).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineExample {
    pub texts: Vec<String>,
    pub intensity: u8,
}

pub const FEATURE_COUNT: usize = CATEGORY_NAMES.len() + 2;

pub fn feature_names() -> Vec<String> {
    CATEGORY_NAMES
        .iter()
        .map(|s| s.to_string())
        .chain(["ulm-positive".into(), "clm-positive".into()])
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmPairs {
    pub unigram: LmPair,
    pub char: LmPair,
}

impl LmPairs {
    fn train(pos: &[&str], neg: &[&str], cfg: &BaselineConfig) -> Result<Self> {
        let pair = |kind, order| -> Result<LmPair> {
            LmPair::new(
                train_lm(pos, kind, order, cfg.smoothing)?,
                train_lm(neg, kind, order, cfg.smoothing)?,
            )
        };
        Ok(Self {
            unigram: pair(LmKind::UnigramWord, 1)?,
            char: pair(LmKind::CharNgram, cfg.char_order)?,
        })
    }

    /// Share of texts each pair scores positive.
    fn proportions(&self, texts: &[String]) -> [f64; 2] {
        if texts.is_empty() {
            return [0.0; 2];
        }
        let share = |p: &LmPair| {
            texts.iter().filter(|t| p.is_positive(t)).count() as f64 / texts.len() as f64
        };
        [share(&self.unigram), share(&self.char)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselinePrediction {
    pub positive: bool,
    pub probability: f64,
    /// 0 when negative, otherwise the best-scoring level model.
    pub intensity: u8,
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel {
    pub config: BaselineConfig,
    pub lexicons: Vec<CategoryLexicon>,
    pub lms: LmPairs,
    /// Character models for levels 1..=3 with at least one training user.
    pub level_models: Vec<(u8, LanguageModel)>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub classifier: LoglinearModel,
    /// Raw (unstandardized) training features, cross-fitted for the LM columns.
    pub train_features: Vec<Vec<f64>>,
}

fn texts_of<'a>(users: impl Iterator<Item = &'a BaselineExample>) -> Vec<&'a str> {
    users
        .flat_map(|u| u.texts.iter().map(String::as_str))
        .collect()
}

fn category_features(texts: &[String], lexicons: &[CategoryLexicon]) -> Result<Vec<f64>> {
    if texts.is_empty() {
        return Ok(vec![0.0; lexicons.len()]);
    }
    category_proportions(texts, lexicons)
}

impl BaselineModel {
    pub fn train(
        users: &[BaselineExample],
        lexicons: Vec<CategoryLexicon>,
        config: BaselineConfig,
    ) -> Result<Self> {
        let n_pos = users.iter().filter(|u| u.intensity > 0).count();
        if n_pos == 0 || n_pos == users.len() {
            return Err(Error::Training(
                "baseline needs both PTSD and control users".into(),
            ));
        }
        let pos = texts_of(users.iter().filter(|u| u.intensity > 0));
        let neg = texts_of(users.iter().filter(|u| u.intensity == 0));
        let lms = LmPairs::train(&pos, &neg, &config)?;

        // Out-of-fold LM proportions: round-robin within each class.
        let folds = config.folds.max(2);
        let mut fold_of = vec![0usize; users.len()];
        let (mut next_pos, mut next_neg) = (0, 0);
        for (i, u) in users.iter().enumerate() {
            let counter = if u.intensity > 0 {
                &mut next_pos
            } else {
                &mut next_neg
            };
            fold_of[i] = *counter % folds;
            *counter += 1;
        }
        let mut lm_feats = vec![[0.0; 2]; users.len()];
        for f in 0..folds {
            let rest = || {
                users
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| fold_of[*i] != f)
                    .map(|(_, u)| u)
            };
            let p = texts_of(rest().filter(|u| u.intensity > 0));
            let q = texts_of(rest().filter(|u| u.intensity == 0));
            let fold_lms = if p.is_empty() || q.is_empty() {
                None
            } else {
                LmPairs::train(&p, &q, &config).ok()
            };
            let fold_lms = fold_lms.as_ref().unwrap_or(&lms);
            for (i, u) in users.iter().enumerate().filter(|(i, _)| fold_of[*i] == f) {
                lm_feats[i] = fold_lms.proportions(&u.texts);
            }
        }

        let mut train_features = Vec::with_capacity(users.len());
        for (u, lm) in users.iter().zip(&lm_feats) {
            let mut f = category_features(&u.texts, &lexicons)?;
            f.extend_from_slice(lm);
            train_features.push(f);
        }
        let dim = FEATURE_COUNT;
        let n = users.len() as f64;
        let means: Vec<f64> = (0..dim)
            .map(|j| train_features.iter().map(|f| f[j]).sum::<f64>() / n)
            .collect();
        let scales: Vec<f64> = (0..dim)
            .map(|j| {
                let var = train_features
                    .iter()
                    .map(|f| (f[j] - means[j]).powi(2))
                    .sum::<f64>()
                    / n;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let standardized: Vec<Vec<f64>> = train_features
            .iter()
            .map(|f| {
                f.iter()
                    .zip(&means)
                    .zip(&scales)
                    .map(|((x, m), s)| (x - m) / s)
                    .collect()
            })
            .collect();
        let labels: Vec<bool> = users.iter().map(|u| u.intensity > 0).collect();
        let classifier = train_loglinear(&standardized, &labels, &config.loglinear)?;

        let mut level_models = Vec::new();
        for level in 1..=3u8 {
            let texts = texts_of(users.iter().filter(|u| u.intensity == level));
            if !texts.is_empty() {
                level_models.push((
                    level,
                    train_lm(
                        &texts,
                        LmKind::CharNgram,
                        config.char_order,
                        config.smoothing,
                    )?,
                ));
            }
        }

        Ok(Self {
            config,
            lexicons,
            lms,
            level_models,
            means,
            scales,
            classifier,
            train_features,
        })
    }

    pub fn features(&self, texts: &[String]) -> Result<Vec<f64>> {
        let mut f = category_features(texts, &self.lexicons)?;
        f.extend_from_slice(&self.lms.proportions(texts));
        Ok(f)
    }

    fn standardize(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .zip(&self.means)
            .zip(&self.scales)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }

    pub fn predict(&self, texts: &[String]) -> Result<BaselinePrediction> {
        let features = self.features(texts)?;
        let z = self.standardize(&features);
        let positive = self.classifier.predict(&z);
        let intensity = if !positive {
            0
        } else if self.level_models.len() < 2 {
            self.level_models.first().map_or(1, |(l, _)| *l)
        } else {
            let joined = texts.join("\n");
            let models: Vec<LanguageModel> =
                self.level_models.iter().map(|(_, m)| m.clone()).collect();
            self.level_models[classify_multiclass(&models, &joined)?].0
        };
        Ok(BaselinePrediction {
            positive,
            probability: self.classifier.probability(&z),
            intensity,
            features,
        })
    }
}

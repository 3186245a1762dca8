//! Accuracy, intensity MSE, per-survey accuracy, and confusion tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scoring::Tool;
use crate::{Error, Result};

/// A predicted outcome for one user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub user_id: String,
    /// 0..=3
    pub intensity: u8,
    /// Per-tool over-threshold flags, when the predictor fills surveys.
    pub over_flags: Option<[bool; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    pub user_id: String,
    pub intensity: u8,
    pub over_flags: [bool; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub n: usize,
    /// Binary PTSD accuracy (intensity >= 1 vs 0).
    pub accuracy: f64,
    /// Mean squared error of the 0-3 intensity scores.
    pub mse: f64,
    /// Over-threshold accuracy per tool; empty when predictions carry no flags.
    pub per_survey_accuracy: BTreeMap<Tool, f64>,
    /// `confusion[truth][predicted]` over intensity levels.
    pub confusion: [[usize; 4]; 4],
    /// Echo of the configuration that produced the run.
    #[serde(default)]
    pub config: serde_json::Value,
}

/// Score predictions against truths, matched by user id.
pub fn evaluate(predictions: &[Prediction], truths: &[Truth]) -> Result<EvalResult> {
    if truths.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let by_user: BTreeMap<&str, &Prediction> = predictions
        .iter()
        .map(|p| (p.user_id.as_str(), p))
        .collect();
    if by_user.len() != predictions.len() || predictions.len() != truths.len() {
        return Err(Error::Training(
            "predictions and truths are not aligned one-to-one".into(),
        ));
    }
    let mut correct = 0usize;
    let mut sq = 0.0;
    let mut confusion = [[0usize; 4]; 4];
    let mut survey_hits = [0usize; 3];
    let mut with_flags = 0usize;
    for t in truths {
        let p = by_user
            .get(t.user_id.as_str())
            .ok_or_else(|| Error::Training(format!("no prediction for user {}", t.user_id)))?;
        if p.intensity > 3 || t.intensity > 3 {
            return Err(Error::Training(format!(
                "intensity out of range for user {}",
                t.user_id
            )));
        }
        correct += usize::from((p.intensity >= 1) == (t.intensity >= 1));
        sq += (f64::from(p.intensity) - f64::from(t.intensity)).powi(2);
        confusion[t.intensity as usize][p.intensity as usize] += 1;
        if let Some(flags) = p.over_flags {
            with_flags += 1;
            for k in 0..3 {
                survey_hits[k] += usize::from(flags[k] == t.over_flags[k]);
            }
        }
    }
    let n = truths.len();
    let per_survey_accuracy = if with_flags == n {
        Tool::ALL
            .iter()
            .map(|&tool| (tool, survey_hits[tool.ordinal()] as f64 / n as f64))
            .collect()
    } else {
        BTreeMap::new()
    };
    Ok(EvalResult {
        n,
        accuracy: correct as f64 / n as f64,
        mse: sq / n as f64,
        per_survey_accuracy,
        confusion,
        config: serde_json::Value::Null,
    })
}

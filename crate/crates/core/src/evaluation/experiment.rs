//! Train/predict runners and the split, learning-curve, and weekly
//! experiments built on them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::metrics::{evaluate, EvalResult, Prediction, Truth};
use super::split::{stratified_split, SplitSpec};
use crate::baseline::{
    default_lexicons, BaselineConfig, BaselineExample, BaselineModel, CategoryLexicon,
};
use crate::corpus::CohortUser;
use crate::dictionary::{build_dictionary, BuilderParams, PtsdDictionary};
use crate::scoring::{alpha_score_matrix, calibrate, score_week, AlphaMode, Calibration, Tool};
use crate::{Error, Result};

/// A model that trains on labeled users and predicts one user-week.
pub trait Runner {
    fn name(&self) -> &'static str;
    fn fit(&mut self, train: &[CohortUser]) -> Result<()>;
    /// `None` when the user has no week at that offset.
    fn predict(&self, user: &CohortUser, week_offset: usize) -> Result<Option<Prediction>>;
    fn config_echo(&self) -> serde_json::Value;
}

pub fn truth_of(user: &CohortUser) -> Result<Truth> {
    let over_flags = user
        .true_over_flags()
        .ok_or_else(|| Error::Training(format!("user {} has no survey labels", user.user_id)))?;
    Ok(Truth {
        user_id: user.user_id.clone(),
        intensity: over_flags.iter().filter(|&&b| b).count() as u8,
        over_flags,
    })
}

fn is_positive(user: &CohortUser) -> bool {
    user.true_intensity().unwrap_or(0) >= 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurveyRunnerConfig {
    pub builder: BuilderParams,
    pub mode: AlphaMode,
    /// Fit isotonic alpha-to-answer maps on the training users.
    pub calibration: bool,
}

impl Default for SurveyRunnerConfig {
    fn default() -> Self {
        Self {
            builder: BuilderParams::default(),
            mode: AlphaMode::Binary,
            calibration: true,
        }
    }
}

/// Dictionary, alpha scores, filled surveys, threshold rule.
#[derive(Debug, Clone, Default)]
pub struct SurveyRunner {
    pub config: SurveyRunnerConfig,
    pub dictionary: Option<PtsdDictionary>,
    pub calibration: Calibration,
}

impl SurveyRunner {
    pub fn new(config: SurveyRunnerConfig) -> Self {
        Self {
            config,
            dictionary: None,
            calibration: Calibration::identity(),
        }
    }
}

/// Fit calibration maps from each training user's latest week.
pub fn fit_calibration(
    dict: &PtsdDictionary,
    train: &[CohortUser],
    mode: AlphaMode,
) -> Calibration {
    let pairs: Vec<_> = train
        .iter()
        .filter_map(|u| {
            Some((
                alpha_score_matrix(u.latest_week()?, dict, mode),
                u.survey_responses.as_ref()?,
            ))
        })
        .flat_map(|(alpha, responses)| responses.iter().map(move |r| (alpha.clone(), r.clone())))
        .collect();
    calibrate(&pairs)
}

impl Runner for SurveyRunner {
    fn name(&self) -> &'static str {
        "survey"
    }

    fn fit(&mut self, train: &[CohortUser]) -> Result<()> {
        let dict = build_dictionary(train, &self.config.builder)?;
        self.calibration = if self.config.calibration {
            fit_calibration(&dict, train, self.config.mode)
        } else {
            Calibration::identity()
        };
        self.dictionary = Some(dict);
        Ok(())
    }

    fn predict(&self, user: &CohortUser, week_offset: usize) -> Result<Option<Prediction>> {
        let dict = self
            .dictionary
            .as_ref()
            .ok_or_else(|| Error::Training("runner is not fitted".into()))?;
        let Some(week) = user.week_back(week_offset) else {
            return Ok(None);
        };
        let scored = score_week(week, dict, self.config.mode, &self.calibration);
        let mut flags = [false; 3];
        for s in &scored.surveys {
            flags[s.tool.ordinal()] = s.over_threshold;
        }
        Ok(Some(Prediction {
            user_id: user.user_id.clone(),
            intensity: scored.label.surveys_over,
            over_flags: Some(flags),
        }))
    }

    fn config_echo(&self) -> serde_json::Value {
        json!({ "runner": self.name(), "survey": self.config })
    }
}

/// Language-model and category-proportion baseline.
#[derive(Debug, Clone)]
pub struct BaselineRunner {
    pub config: BaselineConfig,
    pub lexicons: Vec<CategoryLexicon>,
    pub model: Option<BaselineModel>,
}

impl BaselineRunner {
    pub fn new(config: BaselineConfig) -> Self {
        Self {
            config,
            lexicons: default_lexicons(),
            model: None,
        }
    }
}

impl Runner for BaselineRunner {
    fn name(&self) -> &'static str {
        "baseline"
    }

    fn fit(&mut self, train: &[CohortUser]) -> Result<()> {
        let examples: Vec<BaselineExample> = train
            .iter()
            .map(|u| BaselineExample {
                texts: u
                    .latest_week()
                    .map(|w| w.normalized_texts.clone())
                    .unwrap_or_default(),
                intensity: u.true_intensity().unwrap_or(0),
            })
            .collect();
        self.model = Some(BaselineModel::train(
            &examples,
            self.lexicons.clone(),
            self.config,
        )?);
        Ok(())
    }

    fn predict(&self, user: &CohortUser, week_offset: usize) -> Result<Option<Prediction>> {
        let model = self
            .model
            .as_ref()
            .ok_or_else(|| Error::Training("runner is not fitted".into()))?;
        let Some(week) = user.week_back(week_offset) else {
            return Ok(None);
        };
        let p = model.predict(&week.normalized_texts)?;
        Ok(Some(Prediction {
            user_id: user.user_id.clone(),
            intensity: p.intensity,
            over_flags: None,
        }))
    }

    fn config_echo(&self) -> serde_json::Value {
        json!({ "runner": self.name(), "baseline": self.config })
    }
}

fn labeled(users: &[CohortUser]) -> Vec<CohortUser> {
    users
        .iter()
        .filter(|u| u.true_over_flags().is_some())
        .cloned()
        .collect()
}

/// Predict every test user at one offset; users without that week are skipped.
pub fn evaluate_at(
    runner: &dyn Runner,
    test: &[CohortUser],
    offset: usize,
) -> Result<Option<EvalResult>> {
    let mut preds = Vec::new();
    let mut truths = Vec::new();
    for u in test {
        if let Some(p) = runner.predict(u, offset)? {
            preds.push(p);
            truths.push(truth_of(u)?);
        }
    }
    if truths.is_empty() {
        return Ok(None);
    }
    evaluate(&preds, &truths).map(Some)
}

/// Split, fit on the train side, evaluate the latest week of the test side.
pub fn run_split(
    users: &[CohortUser],
    runner: &mut dyn Runner,
    spec: &SplitSpec,
) -> Result<EvalResult> {
    let users = labeled(users);
    let (train, test) = stratified_split(&users, is_positive, spec)?;
    runner.fit(&train)?;
    let mut result = evaluate_at(runner, &test, 0)?.ok_or(Error::EmptyTestSet)?;
    result.config = json!({
        "train_fraction": spec.train_fraction,
        "split_seed": spec.seed,
        "n_train": train.len(),
        "model": runner.config_echo(),
    });
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub result: EvalResult,
}

/// One split-fit-evaluate run per training fraction, all with the same seed.
pub fn learning_curve(
    users: &[CohortUser],
    fractions: &[f64],
    runner: &mut dyn Runner,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    fractions
        .iter()
        .map(|&fraction| {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(Error::Split(format!("fraction {fraction} outside (0, 1)")));
            }
            let result = run_split(
                users,
                runner,
                &SplitSpec {
                    train_fraction: fraction,
                    seed,
                },
            )?;
            Ok(CurvePoint { fraction, result })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyPoint {
    pub offset: usize,
    /// `None` when no test user has a week at this offset.
    pub result: Option<EvalResult>,
}

/// Fit once on the latest weeks of the train side, then evaluate the test
/// side on the week `offset` weeks before its latest.
pub fn weekly_backtest(
    users: &[CohortUser],
    runner: &mut dyn Runner,
    offsets: &[usize],
    spec: &SplitSpec,
) -> Result<Vec<WeeklyPoint>> {
    let users = labeled(users);
    let (train, test) = stratified_split(&users, is_positive, spec)?;
    runner.fit(&train)?;
    offsets
        .iter()
        .map(|&offset| {
            Ok(WeeklyPoint {
                offset,
                result: evaluate_at(runner, &test, offset)?,
            })
        })
        .collect()
}

pub fn learning_curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("fraction,accuracy,mse\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.fraction, p.result.accuracy, p.result.mse);
    }
    out
}

pub fn weekly_csv(points: &[WeeklyPoint]) -> String {
    let mut out = String::from("offset,accuracy\n");
    for p in points {
        match &p.result {
            Some(r) => writeln!(out, "{},{}", p.offset, r.accuracy),
            None => writeln!(out, "{},NA", p.offset),
        }
        .expect("write to string");
    }
    out
}

/// Per-survey accuracy table.
pub fn per_survey_csv(result: &EvalResult) -> String {
    let mut out = String::from("tool,accuracy\n");
    for tool in Tool::ALL {
        if let Some(a) = result.per_survey_accuracy.get(&tool) {
            let _ = writeln!(out, "{tool},{a}");
        }
    }
    out
}

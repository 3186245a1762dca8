//! Splits, metrics, experiments, and the synthetic cohort generator.

mod experiment;
mod metrics;
mod seed;
mod split;
mod synth;

pub use experiment::{
    evaluate_at, fit_calibration, learning_curve, learning_curve_csv, per_survey_csv, run_split,
    truth_of, weekly_backtest, weekly_csv, BaselineRunner, CurvePoint, Runner, SurveyRunner,
    SurveyRunnerConfig, WeeklyPoint,
};
pub use metrics::{evaluate, EvalResult, Prediction, Truth};
pub use seed::derive_seed;
pub use split::{stratified_split, SplitSpec};
pub use synth::{
    attach_labels, default_pools, generate_synthetic_cohort, noise_vocabulary, signal_shape,
    write_post_stream, SyntheticCohort, SyntheticCohortSpec, COHORT_EPOCH,
};

//! Alpha scores, survey filling, threshold rules, and the per-question report.

mod alpha;
mod calibration;
mod report;
mod survey;

pub use alpha::{
    alpha_score_matrix, cronbach_alpha, dimension_evidence, dimension_observations, AlphaEntry,
    AlphaMode, AlphaScoreMatrix, Degenerate, Evidence, Observations,
};
pub use calibration::{calibrate, Calibration, MonotoneMap, MIN_CALIBRATION_PAIRS};
pub use report::{
    explain_report, report_rows_csv, Explanation, QuestionExplanation, ReportRow,
    SurveyExplanation, NO_EVIDENCE,
};
pub use survey::{
    all_questions, classify_intensity, fill_survey, intensity_score, over_flags, question_label,
    FilledSurvey, IntensityLabel, IntensityLevel, QuestionId, SurveyResponse, Tool,
    ToolDemographics, QUESTION_COUNT,
};

use crate::corpus::UserWeek;
use crate::dictionary::PtsdDictionary;

/// Everything computed for one user-week.
#[derive(Debug, Clone, PartialEq)]
pub struct WeekScore {
    pub alpha: AlphaScoreMatrix,
    pub surveys: Vec<FilledSurvey>,
    pub label: IntensityLabel,
}

pub fn score_week(
    week: &UserWeek,
    dict: &PtsdDictionary,
    mode: AlphaMode,
    calibration: &Calibration,
) -> WeekScore {
    let alpha = alpha_score_matrix(week, dict, mode);
    let surveys: Vec<FilledSurvey> = Tool::ALL
        .iter()
        .map(|t| fill_survey(&alpha, &t.demographics(), calibration))
        .collect();
    let label = classify_intensity(&surveys).expect("one survey per tool");
    WeekScore {
        alpha,
        surveys,
        label,
    }
}

//! Survey tools, their fixed demographics, and the threshold rules that turn
//! filled surveys into an intensity label.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::alpha::AlphaScoreMatrix;
use super::calibration::Calibration;
use crate::{Error, Result};

/// One of the three assessment surveys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tool {
    Dospert,
    Bsss,
    Vias,
}

impl Tool {
    pub const ALL: [Tool; 3] = [Tool::Dospert, Tool::Bsss, Tool::Vias];

    pub fn name(self) -> &'static str {
        match self {
            Tool::Dospert => "DOSPERT",
            Tool::Bsss => "BSSS",
            Tool::Vias => "VIAS",
        }
    }

    /// Position in [`Tool::ALL`].
    pub fn ordinal(self) -> usize {
        match self {
            Tool::Dospert => 0,
            Tool::Bsss => 1,
            Tool::Vias => 2,
        }
    }

    pub fn demographics(self) -> ToolDemographics {
        match self {
            Tool::Dospert => ToolDemographics::DOSPERT,
            Tool::Bsss => ToolDemographics::BSSS,
            Tool::Vias => ToolDemographics::VIAS,
        }
    }

    pub fn questions(self) -> impl Iterator<Item = QuestionId> {
        (1..=self.demographics().chosen_questions)
            .map(move |index| QuestionId { tool: self, index })
    }
}

impl fmt::Display for Tool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tool {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "DOSPERT" => Ok(Tool::Dospert),
            "BSSS" => Ok(Tool::Bsss),
            "VIAS" => Ok(Tool::Vias),
            _ => Err(format!("unknown tool {s:?}")),
        }
    }
}

/// A chosen question: survey plus 1-based index within the chosen subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuestionId {
    pub tool: Tool,
    pub index: u8,
}

impl QuestionId {
    pub fn new(tool: Tool, index: u8) -> Self {
        Self { tool, index }
    }

    pub fn label(self) -> &'static str {
        question_label(self)
    }

    /// Position in the canonical 16-question order.
    pub fn ordinal(self) -> usize {
        let offset: usize = Tool::ALL[..self.tool.ordinal()]
            .iter()
            .map(|t| t.demographics().chosen_questions as usize)
            .sum();
        offset + self.index as usize - 1
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tool, self.index)
    }
}

/// All 16 chosen questions in canonical order (DOSPERT, BSSS, VIAS).
pub fn all_questions() -> Vec<QuestionId> {
    Tool::ALL.iter().flat_map(|t| t.questions()).collect()
}

pub const QUESTION_COUNT: usize = 16;

const DOSPERT_LABELS: [&str; 5] = [
    "Betting a day's income at the horse races",
    "Drinking heavily at a social function",
    "Disagreeing with an authority figure on a major issue",
    "Engaging in unprotected sex",
    "Leaving your young children alone at home while running an errand",
];

const BSSS_LABELS: [&str; 6] = [
    "Feeling isolated from trusted companions",
    "Lacking anyone dependable during a crisis",
    "Receiving little emotional encouragement",
    "Withdrawing from supportive relationships",
    "Rejecting practical assistance offered by others",
    "Missing comfort after stressful events",
];

const VIAS_LABELS: [&str; 5] = [
    "Losing hope about the future",
    "Struggling with self-control and impulses",
    "Doubting personal bravery when facing fears",
    "Abandoning persistence on daily goals",
    "Losing gratitude for everyday blessings",
];

pub fn question_label(q: QuestionId) -> &'static str {
    let labels: &[&str] = match q.tool {
        Tool::Dospert => &DOSPERT_LABELS,
        Tool::Bsss => &BSSS_LABELS,
        Tool::Vias => &VIAS_LABELS,
    };
    labels[q.index as usize - 1]
}

/// Chosen-question count, point total, and risk threshold for one survey.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolDemographics {
    pub tool: Tool,
    pub chosen_questions: u8,
    pub total_points: u32,
    pub threshold: u32,
}

impl ToolDemographics {
    pub const DOSPERT: ToolDemographics = ToolDemographics {
        tool: Tool::Dospert,
        chosen_questions: 5,
        total_points: 35,
        threshold: 28,
    };
    pub const BSSS: ToolDemographics = ToolDemographics {
        tool: Tool::Bsss,
        chosen_questions: 6,
        total_points: 18,
        threshold: 13,
    };
    pub const VIAS: ToolDemographics = ToolDemographics {
        tool: Tool::Vias,
        chosen_questions: 5,
        total_points: 25,
        threshold: 15,
    };

    pub fn per_question_max(&self) -> u8 {
        (self.total_points / self.chosen_questions as u32) as u8
    }

    /// Strict: a total equal to the threshold is not over.
    pub fn is_over(&self, total: u32) -> bool {
        total > self.threshold
    }

    /// Answers at or above the scale midpoint count as "high".
    pub fn is_high_answer(&self, answer: u8) -> bool {
        2 * answer as u32 >= self.per_question_max() as u32
    }
}

/// A ground-truth survey response; answer 0 means the question was skipped
/// and counts as 0 toward the total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub tool: Tool,
    pub answers: Vec<u8>,
}

impl SurveyResponse {
    pub fn new(tool: Tool, answers: Vec<u8>) -> Result<Self> {
        let demo = tool.demographics();
        if answers.len() != demo.chosen_questions as usize {
            return Err(Error::InvalidResponse(format!(
                "{tool} expects {} answers, got {}",
                demo.chosen_questions,
                answers.len()
            )));
        }
        if let Some(a) = answers.iter().find(|&&a| a > demo.per_question_max()) {
            return Err(Error::InvalidResponse(format!(
                "{tool} answer {a} exceeds per-question max {}",
                demo.per_question_max()
            )));
        }
        Ok(Self { tool, answers })
    }

    pub fn total(&self) -> u32 {
        self.answers.iter().map(|&a| a as u32).sum()
    }

    pub fn over_threshold(&self) -> bool {
        self.tool.demographics().is_over(self.total())
    }

    pub fn answer(&self, q: QuestionId) -> Option<u8> {
        if q.tool != self.tool {
            return None;
        }
        self.answers.get(q.index as usize - 1).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilledSurvey {
    pub tool: Tool,
    pub answers: Vec<u8>,
    pub total: u32,
    pub threshold: u32,
    pub over_threshold: bool,
}

/// Fill one survey from alpha scores: each answer is the calibrated score
/// scaled to the per-question maximum and rounded.
pub fn fill_survey(
    alpha: &AlphaScoreMatrix,
    demo: &ToolDemographics,
    calibration: &Calibration,
) -> FilledSurvey {
    let max = demo.per_question_max();
    let answers: Vec<u8> = demo
        .tool
        .questions()
        .map(|q| {
            let normalized = calibration.apply(q, alpha.score(q));
            (normalized * max as f64).round().clamp(0.0, max as f64) as u8
        })
        .collect();
    let total = answers.iter().map(|&a| a as u32).sum();
    FilledSurvey {
        tool: demo.tool,
        answers,
        total,
        threshold: demo.threshold,
        over_threshold: demo.is_over(total),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntensityLevel {
    NoPtsd = 0,
    Low = 1,
    Moderate = 2,
    High = 3,
}

impl IntensityLevel {
    pub fn from_surveys_over(count: u8) -> Self {
        match count {
            0 => IntensityLevel::NoPtsd,
            1 => IntensityLevel::Low,
            2 => IntensityLevel::Moderate,
            _ => IntensityLevel::High,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IntensityLevel::NoPtsd => "No PTSD",
            IntensityLevel::Low => "Low risk",
            IntensityLevel::Moderate => "Moderate risk",
            IntensityLevel::High => "High risk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntensityLabel {
    pub level: IntensityLevel,
    pub surveys_over: u8,
}

impl IntensityLabel {
    pub fn from_over_flags(flags: [bool; 3]) -> Self {
        let surveys_over = flags.iter().filter(|&&f| f).count() as u8;
        Self {
            level: IntensityLevel::from_surveys_over(surveys_over),
            surveys_over,
        }
    }
}

/// Count the surveys over threshold; the count is the intensity level.
pub fn classify_intensity(surveys: &[FilledSurvey]) -> Result<IntensityLabel> {
    Ok(IntensityLabel::from_over_flags(over_flags(
        surveys.iter().map(|s| (s.tool, s.over_threshold)),
    )?))
}

/// Collect exactly one over-threshold flag per tool, in [`Tool::ALL`] order.
pub fn over_flags(items: impl IntoIterator<Item = (Tool, bool)>) -> Result<[bool; 3]> {
    let mut seen = [None; 3];
    for (tool, over) in items {
        let slot = &mut seen[tool.ordinal()];
        if slot.is_some() {
            return Err(Error::DuplicateTool(tool));
        }
        *slot = Some(over);
    }
    let mut flags = [false; 3];
    for (i, tool) in Tool::ALL.iter().enumerate() {
        flags[i] = seen[i].ok_or(Error::MissingTool(*tool))?;
    }
    Ok(flags)
}

pub fn intensity_score(label: &IntensityLabel) -> u8 {
    label.level as u8
}

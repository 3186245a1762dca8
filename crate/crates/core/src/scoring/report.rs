//! Per-question explanation of a filled survey set.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::alpha::{dimension_evidence, AlphaScoreMatrix, Degenerate};
use super::survey::{FilledSurvey, IntensityLabel, IntensityLevel, Tool};
use crate::corpus::UserWeek;
use crate::dictionary::PtsdDictionary;

pub const NO_EVIDENCE: &str = "no first-person evidence";

/// Example segments kept per question.
const MAX_EXAMPLES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionExplanation {
    pub tool: Tool,
    pub question_index: u8,
    pub label: String,
    pub alpha: f64,
    pub raw_alpha: Option<f64>,
    pub answer: u8,
    pub max: u8,
    pub degenerate: Option<Degenerate>,
    pub evidence_words: Vec<(String, usize)>,
    pub examples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyExplanation {
    pub tool: Tool,
    pub answers: Vec<u8>,
    pub total: u32,
    pub threshold: u32,
    pub over: bool,
    pub questions: Vec<QuestionExplanation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub user_id: String,
    pub week_start: String,
    pub level: IntensityLevel,
    pub surveys_over: u8,
    pub surveys: Vec<SurveyExplanation>,
}

/// One flat row per question, for tabular output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub user_id: String,
    pub week_start: String,
    pub tool: Tool,
    pub question_index: u8,
    pub alpha: f64,
    pub answer: u8,
    pub total: u32,
    pub threshold: u32,
    pub over: bool,
    pub level: u8,
    pub evidence_words: String,
}

pub fn explain_report(
    week: &UserWeek,
    dict: &PtsdDictionary,
    alpha: &AlphaScoreMatrix,
    surveys: &[FilledSurvey],
    label: &IntensityLabel,
) -> Explanation {
    let surveys = surveys
        .iter()
        .map(|s| {
            let demo = s.tool.demographics();
            let questions = s
                .tool
                .questions()
                .zip(&s.answers)
                .map(|(q, &answer)| {
                    let entry = alpha.entry(q);
                    let evidence = dict
                        .dimension(q)
                        .map(|d| dimension_evidence(week, d, &dict.pronoun_filter, MAX_EXAMPLES))
                        .unwrap_or_default();
                    QuestionExplanation {
                        tool: q.tool,
                        question_index: q.index,
                        label: dict
                            .dimension(q)
                            .map_or_else(|| q.label().to_string(), |d| d.label.clone()),
                        alpha: alpha.score(q),
                        raw_alpha: entry.and_then(|e| e.raw_alpha),
                        answer,
                        max: demo.per_question_max(),
                        degenerate: entry.and_then(|e| e.degenerate),
                        evidence_words: evidence.words,
                        examples: evidence.segments,
                    }
                })
                .collect();
            SurveyExplanation {
                tool: s.tool,
                answers: s.answers.clone(),
                total: s.total,
                threshold: s.threshold,
                over: s.over_threshold,
                questions,
            }
        })
        .collect();
    Explanation {
        user_id: week.user_id.clone(),
        week_start: week.week_start.format("%Y-%m-%d").to_string(),
        level: label.level,
        surveys_over: label.surveys_over,
        surveys,
    }
}

impl Explanation {
    pub fn rows(&self) -> Vec<ReportRow> {
        self.surveys
            .iter()
            .flat_map(|s| {
                s.questions.iter().map(move |q| ReportRow {
                    user_id: self.user_id.clone(),
                    week_start: self.week_start.clone(),
                    tool: s.tool,
                    question_index: q.question_index,
                    alpha: q.alpha,
                    answer: q.answer,
                    total: s.total,
                    threshold: s.threshold,
                    over: s.over,
                    level: self.level as u8,
                    evidence_words: q
                        .evidence_words
                        .iter()
                        .map(|(w, _)| w.as_str())
                        .collect::<Vec<_>>()
                        .join(" "),
                })
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "user {} week of {}", self.user_id, self.week_start);
        let _ = writeln!(
            out,
            "intensity: {} (level {}, {} of 3 surveys over threshold)",
            self.level.name(),
            self.level as u8,
            self.surveys_over
        );
        for s in &self.surveys {
            let sum = s
                .answers
                .iter()
                .map(u8::to_string)
                .collect::<Vec<_>>()
                .join(" + ");
            let cmp = if s.over { ">" } else { "<=" };
            let verdict = if s.over { "over" } else { "not over" };
            let _ = writeln!(
                out,
                "\n{}: {sum} = {} {cmp} {} -> {verdict}",
                s.tool, s.total, s.threshold
            );
            for q in &s.questions {
                let _ = writeln!(
                    out,
                    "  Q{} {:<48} alpha {:.3} -> {}/{}",
                    q.question_index, q.label, q.alpha, q.answer, q.max
                );
                if q.alpha == 0.0 && q.evidence_words.is_empty() {
                    let _ = writeln!(out, "     {NO_EVIDENCE}");
                    continue;
                }
                if let Some(d) = q.degenerate {
                    let raw = q
                        .raw_alpha
                        .map(|a| format!(" (raw alpha {a:.3})"))
                        .unwrap_or_default();
                    let _ = writeln!(out, "     note: {}{raw}", d.describe());
                }
                if q.evidence_words.is_empty() {
                    let _ = writeln!(out, "     {NO_EVIDENCE}");
                } else {
                    let words: Vec<String> = q
                        .evidence_words
                        .iter()
                        .map(|(w, n)| format!("{w}({n})"))
                        .collect();
                    let _ = writeln!(out, "     words: {}", words.join(", "));
                    for ex in &q.examples {
                        let _ = writeln!(out, "     e.g. \"{ex}\"");
                    }
                }
            }
        }
        out
    }
}

/// Report rows as a CSV table with a header line.
pub fn report_rows_csv(rows: &[ReportRow]) -> crate::Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row)?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| crate::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

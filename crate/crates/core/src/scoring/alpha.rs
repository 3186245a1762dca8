//! Cronbach-alpha scores over dimension word occurrence.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::survey::{all_questions, QuestionId, QUESTION_COUNT};
use crate::corpus::{words, UserWeek};
use crate::dictionary::{first_person_segments, Dimension, PtsdDictionary, WordPattern};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaMode {
    /// Occurrence (1) / non-occurrence (0) of each word per segment.
    #[default]
    Binary,
    /// Share of the segment's tokens matched by each word.
    Raw,
}

impl std::str::FromStr for AlphaMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "binary" => Ok(AlphaMode::Binary),
            "raw" => Ok(AlphaMode::Raw),
            _ => Err(format!("unknown alpha mode {s:?} (binary|raw)")),
        }
    }
}

fn population_variance(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Cronbach's alpha of an item-by-observation matrix (rows are items).
///
/// Returns 0 when the variance of the per-observation totals is zero.
pub fn cronbach_alpha(items: &[Vec<f64>], mode: AlphaMode) -> Result<f64> {
    let k = items.len();
    if k < 2 {
        return Err(Error::AlphaUndefined(format!(
            "need at least 2 items, got {k}"
        )));
    }
    let n = items[0].len();
    if n < 2 {
        return Err(Error::AlphaUndefined(format!(
            "need at least 2 observations, got {n}"
        )));
    }
    if items.iter().any(|row| row.len() != n) {
        return Err(Error::AlphaUndefined("ragged item matrix".into()));
    }
    for v in items.iter().flatten() {
        let ok = match mode {
            AlphaMode::Binary => *v == 0.0 || *v == 1.0,
            AlphaMode::Raw => v.is_finite() && *v >= 0.0,
        };
        if !ok {
            return Err(Error::AlphaUndefined(format!(
                "entry {v} not valid in {mode:?} mode"
            )));
        }
    }
    let item_var: f64 = items
        .iter()
        .map(|row| population_variance(row.iter().copied()))
        .sum();
    let totals: Vec<f64> = (0..n)
        .map(|j| items.iter().map(|row| row[j]).sum())
        .collect();
    let total_var = population_variance(totals.iter().copied());
    if total_var <= 1e-15 {
        return Ok(0.0);
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var / total_var))
}

/// Dimension patterns × first-person segments of one week.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub patterns: Vec<WordPattern>,
    /// Sorted, so results do not depend on tweet order.
    pub segments: Vec<String>,
    pub binary: Vec<Vec<f64>>,
    pub raw: Vec<Vec<f64>>,
}

impl Observations {
    pub fn matrix(&self, mode: AlphaMode) -> &[Vec<f64>] {
        match mode {
            AlphaMode::Binary => &self.binary,
            AlphaMode::Raw => &self.raw,
        }
    }

    /// Segments with at least one dimension hit.
    pub fn hit_segments(&self) -> usize {
        (0..self.segments.len())
            .filter(|&j| self.binary.iter().any(|row| row[j] > 0.0))
            .count()
    }
}

pub(crate) fn week_segments(week: &UserWeek, pronouns: &[WordPattern]) -> Vec<String> {
    let mut segs: Vec<String> = week
        .normalized_texts
        .iter()
        .flat_map(|t| first_person_segments(t, pronouns))
        .map(str::to_string)
        .collect();
    segs.sort();
    segs
}

/// Occurrence matrices for one dimension, or `None` when the week has no
/// first-person segments.
pub fn dimension_observations(
    week: &UserWeek,
    dim: &Dimension,
    pronouns: &[WordPattern],
) -> Option<Observations> {
    observations_for_segments(week_segments(week, pronouns), dim)
}

fn observations_for_segments(segments: Vec<String>, dim: &Dimension) -> Option<Observations> {
    if segments.is_empty() {
        return None;
    }
    let patterns = dim.patterns().to_vec();
    let mut binary = vec![vec![0.0; segments.len()]; patterns.len()];
    let mut raw = vec![vec![0.0; segments.len()]; patterns.len()];
    for (j, seg) in segments.iter().enumerate() {
        let toks: Vec<String> = words(seg).into_iter().map(str::to_lowercase).collect();
        for (i, p) in patterns.iter().enumerate() {
            let hits = toks.iter().filter(|t| p.matches(t)).count();
            if hits > 0 {
                binary[i][j] = 1.0;
                raw[i][j] = hits as f64 / toks.len() as f64;
            }
        }
    }
    Some(Observations {
        patterns,
        segments,
        binary,
        raw,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degenerate {
    NoSegments,
    TooFewPatterns,
    TooFewSegments,
    ZeroVariance,
    Negative,
}

impl Degenerate {
    pub fn describe(self) -> &'static str {
        match self {
            Degenerate::NoSegments => "no first-person segments this week",
            Degenerate::TooFewPatterns => "fewer than 2 dictionary words",
            Degenerate::TooFewSegments => "fewer than 2 first-person segments",
            Degenerate::ZeroVariance => "word usage shows no variance across segments",
            Degenerate::Negative => "negative alpha clamped to 0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEntry {
    pub question: QuestionId,
    /// Clamped to [0, 1].
    pub score: f64,
    /// Unclamped alpha when it was computable.
    pub raw_alpha: Option<f64>,
    /// First-person segments containing at least one dimension word.
    pub occurrences: usize,
    pub segments: usize,
    pub degenerate: Option<Degenerate>,
}

/// The 16 per-question scores of one user-week, in canonical question order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaScoreMatrix {
    pub entries: Vec<AlphaEntry>,
}

impl AlphaScoreMatrix {
    /// All-zero matrix; questions flagged with `reason`.
    pub fn zeros(reason: Degenerate) -> Self {
        Self {
            entries: all_questions()
                .into_iter()
                .map(|question| AlphaEntry {
                    question,
                    score: 0.0,
                    raw_alpha: None,
                    occurrences: 0,
                    segments: 0,
                    degenerate: Some(reason),
                })
                .collect(),
        }
    }

    /// Build from explicit scores in canonical order (clamped).
    pub fn from_scores(scores: [f64; QUESTION_COUNT]) -> Self {
        Self {
            entries: all_questions()
                .into_iter()
                .zip(scores)
                .map(|(question, s)| AlphaEntry {
                    question,
                    score: s.clamp(0.0, 1.0),
                    raw_alpha: Some(s),
                    occurrences: 0,
                    segments: 0,
                    degenerate: None,
                })
                .collect(),
        }
    }

    pub fn score(&self, q: QuestionId) -> f64 {
        self.entry(q).map_or(0.0, |e| e.score)
    }

    pub fn entry(&self, q: QuestionId) -> Option<&AlphaEntry> {
        self.entries.get(q.ordinal()).filter(|e| e.question == q)
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }

    pub fn by_question(&self) -> BTreeMap<QuestionId, f64> {
        self.entries.iter().map(|e| (e.question, e.score)).collect()
    }
}

/// Score every dimension of `dict` on one week. Degenerate dimensions score 0
/// and are flagged.
pub fn alpha_score_matrix(
    week: &UserWeek,
    dict: &PtsdDictionary,
    mode: AlphaMode,
) -> AlphaScoreMatrix {
    let segments = week_segments(week, &dict.pronoun_filter);
    if segments.is_empty() {
        return AlphaScoreMatrix::zeros(Degenerate::NoSegments);
    }
    let entries = dict
        .dimensions()
        .map(|dim| {
            let obs =
                observations_for_segments(segments.clone(), dim).expect("segments are non-empty");
            let occurrences = obs.hit_segments();
            let (raw_alpha, degenerate) = if obs.patterns.len() < 2 {
                (None, Some(Degenerate::TooFewPatterns))
            } else if obs.segments.len() < 2 {
                (None, Some(Degenerate::TooFewSegments))
            } else {
                match cronbach_alpha(obs.matrix(mode), mode) {
                    Ok(a) if a == 0.0 && is_flat(obs.matrix(mode)) => {
                        (Some(a), Some(Degenerate::ZeroVariance))
                    }
                    Ok(a) if a < 0.0 => (Some(a), Some(Degenerate::Negative)),
                    Ok(a) => (Some(a), None),
                    Err(_) => (None, Some(Degenerate::ZeroVariance)),
                }
            };
            AlphaEntry {
                question: dim.id,
                score: raw_alpha.unwrap_or(0.0).clamp(0.0, 1.0),
                raw_alpha,
                occurrences,
                segments: obs.segments.len(),
                degenerate,
            }
        })
        .collect();
    AlphaScoreMatrix { entries }
}

fn is_flat(items: &[Vec<f64>]) -> bool {
    let n = items.first().map_or(0, Vec::len);
    let totals: Vec<f64> = (0..n).map(|j| items.iter().map(|r| r[j]).sum()).collect();
    totals.windows(2).all(|w| w[0] == w[1])
}

/// Words and example segments behind one dimension's score.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    /// Matched tokens with counts, most frequent first.
    pub words: Vec<(String, usize)>,
    pub segments: Vec<String>,
}

pub fn dimension_evidence(
    week: &UserWeek,
    dim: &Dimension,
    pronouns: &[WordPattern],
    max_segments: usize,
) -> Evidence {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut segments = Vec::new();
    for text in &week.normalized_texts {
        for seg in first_person_segments(text, pronouns) {
            let mut hit = false;
            for w in words(seg) {
                let w = w.to_lowercase();
                if dim.patterns().iter().any(|p| p.matches(&w)) {
                    *counts.entry(w).or_default() += 1;
                    hit = true;
                }
            }
            if hit && segments.len() < max_segments {
                segments.push(seg.to_string());
            }
        }
    }
    let mut words: Vec<(String, usize)> = counts.into_iter().collect();
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Evidence { words, segments }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{default_pronoun_filter, WordPattern};
    use crate::scoring::Tool;
    use chrono::NaiveDate;

    fn week(texts: &[&str]) -> UserWeek {
        UserWeek::from_normalized(
            "u",
            NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
            texts.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn dim(patterns: &[&str]) -> Dimension {
        let mut d = Dimension::new(QuestionId::new(Tool::Dospert, 2), "test");
        for p in patterns {
            d.insert(WordPattern::parse(p).unwrap());
        }
        d
    }

    #[test]
    fn alpha_examples() {
        let same = vec![vec![1.0, 0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0, 0.0]];
        assert!((cronbach_alpha(&same, AlphaMode::Binary).unwrap() - 1.0).abs() < 1e-12);
        let anti = vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]];
        assert_eq!(cronbach_alpha(&anti, AlphaMode::Binary).unwrap(), 0.0);
    }

    #[test]
    fn alpha_errors() {
        assert!(cronbach_alpha(&[vec![1.0, 0.0]], AlphaMode::Binary).is_err());
        assert!(cronbach_alpha(&[vec![1.0], vec![0.0]], AlphaMode::Binary).is_err());
        assert!(cronbach_alpha(&[vec![0.5, 0.0], vec![1.0, 0.0]], AlphaMode::Binary).is_err());
        assert!(cronbach_alpha(&[vec![0.5, 0.0], vec![1.0, 0.0]], AlphaMode::Raw).is_ok());
        assert!(cronbach_alpha(&[vec![-0.5, 0.0], vec![1.0, 0.0]], AlphaMode::Raw).is_err());
    }

    #[test]
    fn observation_single_segment() {
        let obs = dimension_observations(
            &week(&["i was drinking all night"]),
            &dim(&["drink*"]),
            &default_pronoun_filter(),
        )
        .unwrap();
        assert_eq!(obs.binary, vec![vec![1.0]]);
        assert!((obs.raw[0][0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn observation_no_first_person() {
        assert!(dimension_observations(
            &week(&["she left. they stayed"]),
            &dim(&["drink*"]),
            &default_pronoun_filter()
        )
        .is_none());
        assert!(
            dimension_observations(&week(&[]), &dim(&["drink*"]), &default_pronoun_filter())
                .is_none()
        );
    }

    #[test]
    fn observation_two_by_three() {
        // segments sort to: "i drank beer", "i got wasted wasted", "my beer is warm"
        let w = week(&["my beer is warm. i got wasted wasted", "i drank beer"]);
        let obs = dimension_observations(&w, &dim(&["beer", "wasted"]), &default_pronoun_filter())
            .unwrap();
        assert_eq!(
            obs.segments,
            vec!["i drank beer", "i got wasted wasted", "my beer is warm"]
        );
        assert_eq!(obs.binary, vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]);
        assert_eq!(
            obs.raw,
            vec![vec![1.0 / 3.0, 0.0, 0.25], vec![0.0, 0.5, 0.0]]
        );
    }

    #[test]
    fn empty_week_scores_zero() {
        let d = crate::dictionary::parse_dictionary(
            &crate::scoring::tests_support::sixteen_dimension_fixture(),
        )
        .unwrap();
        let m = alpha_score_matrix(&week(&[]), &d, AlphaMode::Binary);
        assert_eq!(m.entries.len(), 16);
        assert!(m.scores().iter().all(|&s| s == 0.0));
        assert!(m
            .entries
            .iter()
            .all(|e| e.degenerate == Some(Degenerate::NoSegments)));
    }
}

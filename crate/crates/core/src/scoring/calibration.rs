//! Monotone maps from alpha scores to normalized survey answers.

use serde::{Deserialize, Serialize};

use super::alpha::AlphaScoreMatrix;
use super::survey::{all_questions, QuestionId, SurveyResponse, Tool, QUESTION_COUNT};

/// Fewer training pairs than this for a tool leaves its questions on identity.
pub const MIN_CALIBRATION_PAIRS: usize = 5;

/// Non-decreasing step function. `apply(x)` is the value of the last knot at
/// or below `x` (the first knot's value below the range).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneMap {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl MonotoneMap {
    pub fn apply(&self, x: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k <= x);
        self.values[i.saturating_sub(1)]
    }

    /// Least-squares non-decreasing fit by pool-adjacent-violators. Points
    /// sharing an x are averaged first. `None` on empty input.
    pub fn fit(points: &[(f64, f64)]) -> Option<Self> {
        let mut pts: Vec<(f64, f64)> = points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if pts.is_empty() {
            return None;
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        // (first x, sum y, weight)
        let mut blocks: Vec<(f64, f64, f64)> = Vec::new();
        let mut i = 0;
        while i < pts.len() {
            let x = pts[i].0;
            let (mut sum, mut w) = (0.0, 0.0);
            while i < pts.len() && pts[i].0 == x {
                sum += pts[i].1;
                w += 1.0;
                i += 1;
            }
            blocks.push((x, sum, w));
            while blocks.len() > 1 {
                let (_, s1, w1) = blocks[blocks.len() - 1];
                let (_, s0, w0) = blocks[blocks.len() - 2];
                if s0 / w0 <= s1 / w1 {
                    break;
                }
                blocks.pop();
                let last = blocks.last_mut().expect("len > 1");
                last.1 += s1;
                last.2 += w1;
            }
        }
        Some(Self {
            knots: blocks.iter().map(|b| b.0).collect(),
            values: blocks.iter().map(|b| b.1 / b.2).collect(),
        })
    }
}

/// Per-question calibration; `None` entries are the identity map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub maps: Vec<Option<MonotoneMap>>,
}

impl Default for Calibration {
    fn default() -> Self {
        Self::identity()
    }
}

impl Calibration {
    pub fn identity() -> Self {
        Self {
            maps: vec![None; QUESTION_COUNT],
        }
    }

    pub fn is_identity(&self, q: QuestionId) -> bool {
        self.maps.get(q.ordinal()).is_none_or(Option::is_none)
    }

    /// Calibrated value in [0, 1].
    pub fn apply(&self, q: QuestionId, alpha: f64) -> f64 {
        let v = match self.maps.get(q.ordinal()).and_then(Option::as_ref) {
            Some(m) => m.apply(alpha),
            None => alpha,
        };
        v.clamp(0.0, 1.0)
    }
}

/// Fit one isotonic map per question from (alpha, answer / max) pairs.
/// Tools with fewer than [`MIN_CALIBRATION_PAIRS`] pairs stay on identity.
pub fn calibrate(train: &[(AlphaScoreMatrix, SurveyResponse)]) -> Calibration {
    let mut cal = Calibration::identity();
    for tool in Tool::ALL {
        let pairs: Vec<_> = train.iter().filter(|(_, r)| r.tool == tool).collect();
        if pairs.len() < MIN_CALIBRATION_PAIRS {
            continue;
        }
        let max = f64::from(tool.demographics().per_question_max());
        for q in tool.questions() {
            let points: Vec<(f64, f64)> = pairs
                .iter()
                .map(|(a, r)| (a.score(q), f64::from(r.answer(q).unwrap_or(0)) / max))
                .collect();
            cal.maps[q.ordinal()] = MonotoneMap::fit(&points);
        }
    }
    debug_assert_eq!(cal.maps.len(), all_questions().len());
    cal
}

//! Learn per-question word lists from labeled weeks.
//!
//! Every dimension starts from wildcarded stems of its question's content
//! words. Learned words are the tokens whose presence in a user's
//! first-person segments correlates most strongly (absolute point-biserial
//! correlation) with that user's answer being at or above the scale midpoint.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    default_pronoun_filter, first_person_segments, is_stopword, matches_any, Category, Dimension,
    PtsdDictionary, WordPattern,
};
use crate::corpus::{text::USER_TOKEN, words, CohortUser};
use crate::scoring::{QuestionId, Tool};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuilderParams {
    /// Learned words per dimension.
    pub top_k: usize,
    /// Minimum number of training users whose first-person text contains a word.
    pub min_df: usize,
}

impl Default for BuilderParams {
    fn default() -> Self {
        Self {
            top_k: 15,
            min_df: 2,
        }
    }
}

/// Light suffix stripping for question words: possessive, plural, then one
/// of -ing / -ed / -ly, never leaving fewer than four letters.
pub fn seed_stem(word: &str) -> String {
    let mut w = word.trim_end_matches("'s").to_string();
    if w.len() > 4
        && w.ends_with('s')
        && !(w.ends_with("ss") || w.ends_with("is") || w.ends_with("us"))
    {
        w.pop();
    }
    for suffix in ["ing", "ed", "ly"] {
        if w.len() >= suffix.len() + 4 && w.ends_with(suffix) {
            w.truncate(w.len() - suffix.len());
            break;
        }
    }
    w
}

/// Wildcarded stems of the content words of a question label.
pub fn seed_patterns(label: &str) -> Vec<WordPattern> {
    let mut seen = BTreeSet::new();
    words(&label.to_lowercase())
        .into_iter()
        .filter(|w| !is_stopword(w) && w.len() > 2)
        .filter_map(|w| {
            let stem = seed_stem(w);
            seen.insert(stem.clone())
                .then(|| WordPattern::prefix(stem).ok())
                .flatten()
        })
        .collect()
}

/// Pearson r of two binary vectors (the phi coefficient), computed from the
/// integer 2x2 table so that uncorrelated words score exactly 0.
fn phi(x: &[bool], y: &[bool]) -> Option<f64> {
    let n = x.len() as i128;
    let nx = x.iter().filter(|&&v| v).count() as i128;
    let ny = y.iter().filter(|&&v| v).count() as i128;
    let nxy = x.iter().zip(y).filter(|(&a, &b)| a && b).count() as i128;
    let den = nx * (n - nx) * ny * (n - ny);
    (den > 0).then(|| (n * nxy - nx * ny) as f64 / (den as f64).sqrt())
}

/// Dictionary-view tokens of the first-person segments of a user's latest week.
fn user_document(user: &CohortUser, pronouns: &[WordPattern]) -> BTreeSet<String> {
    let mut doc = BTreeSet::new();
    if let Some(week) = user.latest_week() {
        for text in &week.normalized_texts {
            for seg in first_person_segments(text, pronouns) {
                doc.extend(words(seg).into_iter().map(str::to_lowercase));
            }
        }
    }
    doc
}

fn is_candidate(word: &str, pronouns: &[WordPattern]) -> bool {
    word != USER_TOKEN.to_lowercase()
        && word.chars().any(char::is_alphabetic)
        && !is_stopword(word)
        && !matches_any(pronouns, word)
}

pub fn build_dictionary(train: &[CohortUser], params: &BuilderParams) -> Result<PtsdDictionary> {
    if train.len() < 2 {
        return Err(Error::Training(format!(
            "need at least 2 training users, got {}",
            train.len()
        )));
    }
    for u in train {
        u.validate()?;
        for tool in Tool::ALL {
            if u.response(tool).is_none() {
                return Err(Error::Training(format!(
                    "user {} lacks a {tool} response",
                    u.user_id
                )));
            }
        }
    }
    let pronouns = default_pronoun_filter();
    let docs: Vec<BTreeSet<String>> = train.iter().map(|u| user_document(u, &pronouns)).collect();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in &docs {
        for w in doc {
            *df.entry(w.as_str()).or_default() += 1;
        }
    }
    let candidates: Vec<(&str, Vec<bool>)> = df
        .iter()
        .filter(|(w, &n)| n >= params.min_df && n < docs.len() && is_candidate(w, &pronouns))
        .map(|(&w, _)| {
            (
                w,
                docs.iter().map(|d| d.contains(w)).collect(),
            )
        })
        .collect();

    let mut categories = Vec::with_capacity(3);
    for tool in Tool::ALL {
        let demo = tool.demographics();
        let mut dimensions = Vec::new();
        for q in tool.questions() {
            let high: Vec<bool> = train
                .iter()
                .map(|u| {
                    let answer = u.response(tool).and_then(|r| r.answer(q)).unwrap_or(0);
                    demo.is_high_answer(answer)
                })
                .collect();
            let dim = build_dimension(q, &candidates, &high, params.top_k);
            if dim.patterns().is_empty() {
                return Err(Error::EmptyDimension(format!("{q} ({})", q.label())));
            }
            dimensions.push(dim);
        }
        categories.push(Category { tool, dimensions });
    }

    Ok(PtsdDictionary {
        version: "1".to_string(),
        pronoun_filter: pronouns,
        categories,
        header_comments: vec![format!(
            " built from {} users, top_k={}, min_df={}",
            train.len(),
            params.top_k,
            params.min_df
        )],
        pronoun_comments: Vec::new(),
    })
}

fn build_dimension(
    q: QuestionId,
    candidates: &[(&str, Vec<bool>)],
    high: &[bool],
    top_k: usize,
) -> Dimension {
    let mut dim = Dimension::new(q, q.label());
    let seeds = seed_patterns(q.label());
    for s in &seeds {
        dim.insert(s.clone());
    }
    let mut scored: Vec<(f64, &str)> = candidates
        .iter()
        .filter(|(w, _)| !matches_any(&seeds, w))
        .filter_map(|(w, presence)| phi(presence, high).map(|r| (r.abs(), *w)))
        .filter(|(r, _)| *r > 0.0)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    for (_, w) in scored.into_iter().take(top_k) {
        if let Ok(p) = WordPattern::literal(w) {
            dim.insert(p);
        }
    }
    dim
}

//! Category-proportion features, Fisher-ratio ranking, and the two-group
//! category comparison.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::lexicon::CategoryLexicon;
use crate::corpus::words;
use crate::{Error, Result};

/// Share of texts containing at least one word of each category.
pub fn category_proportions<S: AsRef<str>>(
    texts: &[S],
    lexicons: &[CategoryLexicon],
) -> Result<Vec<f64>> {
    if texts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut hits = vec![0usize; lexicons.len()];
    for text in texts {
        let toks: Vec<String> = words(text.as_ref())
            .into_iter()
            .map(str::to_lowercase)
            .collect();
        for (h, lex) in hits.iter_mut().zip(lexicons) {
            if toks.iter().any(|t| lex.matches(t)) {
                *h += 1;
            }
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| h as f64 / texts.len() as f64)
        .collect())
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n)
}

/// Between-class over pooled within-class variance (population moments,
/// class-size weighted). Zero within-class variance scores infinity unless
/// the class means also coincide.
pub fn fisher_ratio(pos: &[f64], neg: &[f64]) -> f64 {
    let (n1, n0) = (pos.len() as f64, neg.len() as f64);
    let n = n1 + n0;
    let (m1, v1) = mean_var(pos);
    let (m0, v0) = mean_var(neg);
    let m = (n1 * m1 + n0 * m0) / n;
    let between = (n1 * (m1 - m).powi(2) + n0 * (m0 - m).powi(2)) / n;
    let within = (n1 * v1 + n0 * v0) / n;
    let scale = m1.abs().max(m0.abs()).max(1.0);
    if within <= 1e-24 * scale * scale {
        return if between > 1e-24 * scale * scale {
            f64::INFINITY
        } else {
            0.0
        };
    }
    between / within
}

/// Feature indices by descending Fisher ratio, ties by index.
pub fn rank_features(features: &[Vec<f64>], labels: &[bool]) -> Result<Vec<(usize, f64)>> {
    if features.len() != labels.len() {
        return Err(Error::Training(
            "features and labels differ in length".into(),
        ));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos < 2 || labels.len() - n_pos < 2 {
        return Err(Error::Training("need at least 2 examples per class".into()));
    }
    let dim = features[0].len();
    let mut scored: Vec<(usize, f64)> = (0..dim)
        .map(|j| {
            let col = |want: bool| -> Vec<f64> {
                features
                    .iter()
                    .zip(labels)
                    .filter(|(_, &l)| l == want)
                    .map(|(f, _)| f[j])
                    .collect()
            };
            (j, fisher_ratio(&col(true), &col(false)))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scored)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub p_value: f64,
}

/// Two-sided Mann-Whitney U test, normal approximation with tie and
/// continuity correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> MannWhitney {
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut all: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = all.len();
    let (mut rank_sum_a, mut tie_term) = (0.0, 0.0);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && all[j].0 == all[i].0 {
            j += 1;
        }
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        rank_sum_a += mid_rank * all[i..j].iter().filter(|x| x.1).count() as f64;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let nf = n as f64;
    let var = n1 * n2 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if !(var > 0.0) {
        return MannWhitney { u, p_value: 1.0 };
    }
    let z = (((u - n1 * n2 / 2.0).abs() - 0.5) / var.sqrt()).max(0.0);
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    MannWhitney {
        u,
        p_value: (2.0 * (1.0 - normal.cdf(z))).min(1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryComparison {
    pub category: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub u: f64,
    pub p_value: f64,
    pub significant: bool,
}

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Per-category usage of two user groups; each user is a list of texts.
pub fn group_comparison<S: AsRef<str>>(
    group_a: &[Vec<S>],
    group_b: &[Vec<S>],
    lexicons: &[CategoryLexicon],
) -> Result<Vec<CategoryComparison>> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::Training("both groups must be non-empty".into()));
    }
    let props = |g: &[Vec<S>]| {
        g.iter()
            .map(|u| category_proportions(u, lexicons))
            .collect::<Result<Vec<_>>>()
    };
    let (pa, pb) = (props(group_a)?, props(group_b)?);
    Ok(lexicons
        .iter()
        .enumerate()
        .map(|(j, lex)| {
            let xa: Vec<f64> = pa.iter().map(|p| p[j]).collect();
            let xb: Vec<f64> = pb.iter().map(|p| p[j]).collect();
            let mw = mann_whitney_u(&xa, &xb);
            CategoryComparison {
                category: lex.name.clone(),
                mean_a: mean_var(&xa).0,
                mean_b: mean_var(&xb).0,
                u: mw.u,
                p_value: mw.p_value,
                significant: mw.p_value < SIGNIFICANCE_LEVEL,
            }
        })
        .collect())
}

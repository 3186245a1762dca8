use std::ops::Range;

use regex::{Regex, RegexBuilder};

use super::Tweet;
use crate::{Error, Result};

/// First-person diagnosis statements. Matching is case-insensitive.
pub const DEFAULT_SELF_ID_PATTERNS: [&str; 3] = [
    r"diagnosed\s+(?:me\s+)?with\b.{0,40}?(?:ptsd|p\.t\.s\.d|post[- ]?traumatic)",
    r"\bi\s+have\s+(?:ptsd|p\.t\.s\.d)",
    r"post[- ]?traumatic stress",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfIdMatch<'a> {
    pub tweet: &'a Tweet,
    /// Byte span in `tweet.text`.
    pub span: Range<usize>,
    pub pattern: usize,
}

/// Every tweet matching any pattern, with the span of the first matching
/// pattern. All patterns compile before any tweet is scanned.
pub fn find_self_identification<'a, S: AsRef<str>>(
    tweets: &'a [Tweet],
    patterns: &[S],
) -> Result<Vec<SelfIdMatch<'a>>> {
    let compiled: Vec<Regex> = patterns
        .iter()
        .map(|p| {
            RegexBuilder::new(p.as_ref())
                .case_insensitive(true)
                .build()
                .map_err(|source| Error::Regex {
                    pattern: p.as_ref().to_string(),
                    source,
                })
        })
        .collect::<Result<_>>()?;
    Ok(tweets
        .iter()
        .filter_map(|tweet| {
            compiled.iter().enumerate().find_map(|(pattern, re)| {
                re.find(&tweet.text).map(|m| SelfIdMatch {
                    tweet,
                    span: m.range(),
                    pattern,
                })
            })
        })
        .collect())
}

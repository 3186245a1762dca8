use super::{matches_any, WordPattern};
use crate::corpus::words;

/// Split on `.`, `!`, `?`; segments are trimmed substrings, empty ones dropped.
pub fn split_sentences(text: &str) -> impl Iterator<Item = &str> {
    text.split(['.', '!', '?'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
}

/// Sentence segments holding at least one token matched by the pronoun filter,
/// in input order.
pub fn first_person_segments<'a>(text: &'a str, filter: &[WordPattern]) -> Vec<&'a str> {
    split_sentences(text)
        .filter(|seg| words(seg).iter().any(|w| matches_any(filter, w)))
        .collect()
}

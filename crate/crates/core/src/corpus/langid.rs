//! Pluggable language identification.

use super::text::tokenize;

pub trait LanguageId: Send + Sync {
    fn is_english(&self, text: &str) -> bool;
}

/// The 50 most frequent English words.
pub const COMMON_ENGLISH: [&str; 50] = [
    "the", "be", "to", "of", "and", "a", "in", "that", "have", "i", "it", "for", "not", "on",
    "with", "he", "as", "you", "do", "at", "this", "but", "his", "by", "from", "they", "we", "say",
    "her", "she", "or", "an", "will", "my", "one", "all", "would", "there", "their", "what", "so",
    "up", "out", "if", "about", "who", "get", "which", "go", "me",
];

/// English iff at least 2 in every 10 tokens are common English words.
#[derive(Debug, Clone, Copy, Default)]
pub struct StopwordLanguageId;

impl LanguageId for StopwordLanguageId {
    fn is_english(&self, text: &str) -> bool {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return false;
        }
        let hits = tokens
            .iter()
            .filter(|t| {
                let w = t.word.to_lowercase();
                COMMON_ENGLISH.contains(&w.as_str())
            })
            .count();
        hits * 10 >= 2 * tokens.len()
    }
}

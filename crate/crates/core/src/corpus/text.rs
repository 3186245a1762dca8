//! Tweet normalization and tokenization.

use std::sync::OnceLock;

use regex::Regex;

/// Placeholder that replaces every `@handle`.
pub const USER_TOKEN: &str = "USER";

fn handle_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^([^\p{L}\p{N}_@]*)@[\p{L}\p{N}_]+").expect("static regex"))
}

fn user_prefix_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^([^\p{L}\p{N}_]*)USER([^\p{L}\p{N}_].*)?$").expect("static regex")
    })
}

/// True if the text carries a link: an `http://` / `https://` scheme anywhere,
/// or a whitespace token starting with `www.` (after leading punctuation).
pub fn contains_url(text: &str) -> bool {
    let lower = text.to_lowercase();
    if lower.contains("http://") || lower.contains("https://") {
        return true;
    }
    lower.split_whitespace().any(|tok| {
        tok.trim_start_matches(|c: char| !c.is_alphanumeric())
            .starts_with("www.")
    })
}

/// Normalize one tweet, or `None` when it is excluded for carrying a URL.
///
/// Lowercases, rewrites `@handle` tokens to [`USER_TOKEN`], and collapses
/// whitespace. An existing `USER` placeholder survives, so the function is
/// idempotent.
pub fn preprocess_text(text: &str) -> Option<String> {
    if contains_url(text) {
        return None;
    }
    let tokens: Vec<String> = text.split_whitespace().map(normalize_token).collect();
    Some(tokens.join(" "))
}

fn normalize_token(tok: &str) -> String {
    if let Some(caps) = user_prefix_regex().captures(tok) {
        let lead = caps.get(1).map_or("", |m| m.as_str()).to_lowercase();
        let rest = caps.get(2).map_or("", |m| m.as_str()).to_lowercase();
        return format!("{lead}{USER_TOKEN}{rest}");
    }
    let lower = tok.to_lowercase();
    handle_regex()
        .replace(&lower, format!("${{1}}{USER_TOKEN}"))
        .into_owned()
}

/// A whitespace token: `raw` as it appears in the normalized text (used by
/// language models) and `word`, the same token with leading and trailing
/// punctuation stripped (used for dictionary matching).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub raw: &'a str,
    pub word: &'a str,
}

/// Split on whitespace. Apostrophes and hyphens inside a word are kept;
/// tokens that are pure punctuation are dropped.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    text.split_whitespace()
        .filter_map(|raw| {
            let word = strip_punctuation(raw);
            (!word.is_empty()).then_some(Token { raw, word })
        })
        .collect()
}

/// Dictionary view of [`tokenize`].
pub fn words(text: &str) -> Vec<&str> {
    tokenize(text).into_iter().map(|t| t.word).collect()
}

pub fn strip_punctuation(raw: &str) -> &str {
    raw.trim_matches(|c: char| !c.is_alphanumeric())
}

/// Work-related iff some token starts with `work` or `job` (case-insensitive).
pub fn classify_work_related(text: &str) -> bool {
    tokenize(text).iter().any(|t| {
        let w = t.word.to_lowercase();
        w.starts_with("work") || w.starts_with("job")
    })
}

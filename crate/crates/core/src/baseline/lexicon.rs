//! The nine word categories used by the baseline features.

use crate::dictionary::format::{parse_raw, section_header, write_section};
use crate::dictionary::WordPattern;
use crate::{Error, Result};

pub const CATEGORY_NAMES: [&str; 9] = [
    "pronoun-1st",
    "pronoun-2nd",
    "pronoun-3rd",
    "swear",
    "anger",
    "posemo",
    "negemo",
    "death",
    "anxiety",
];

/// Bundled default lists.
pub const DEFAULT_LEXICONS: &str = include_str!("../../data/lexicons.dic");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryLexicon {
    pub name: String,
    pub patterns: Vec<WordPattern>,
}

impl CategoryLexicon {
    pub fn matches(&self, token: &str) -> bool {
        self.patterns.iter().any(|p| p.matches(token))
    }
}

/// Parse `[LEXICON:<name>]` sections. All nine categories must be present
/// and non-empty; the result is in [`CATEGORY_NAMES`] order.
pub fn parse_lexicons(text: &str) -> Result<Vec<CategoryLexicon>> {
    let raw = parse_raw(text)?;
    let mut found: Vec<Option<CategoryLexicon>> = vec![None; CATEGORY_NAMES.len()];
    for section in raw.sections {
        let err = |m: String| Error::DictionaryFormat {
            line: section.line,
            message: m,
        };
        let name = section
            .name
            .strip_prefix("LEXICON:")
            .ok_or_else(|| err(format!("expected [LEXICON:<name>], got [{}]", section.name)))?;
        let idx = CATEGORY_NAMES
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| err(format!("unknown lexicon category {name:?}")))?;
        if found[idx].is_some() {
            return Err(err(format!("duplicate lexicon {name}")));
        }
        if section.patterns.is_empty() {
            return Err(err(format!("lexicon {name} is empty")));
        }
        let mut patterns: Vec<WordPattern> = section.patterns.into_iter().map(|(_, p)| p).collect();
        patterns.sort();
        found[idx] = Some(CategoryLexicon {
            name: name.to_string(),
            patterns,
        });
    }
    found
        .into_iter()
        .zip(CATEGORY_NAMES)
        .map(|(l, name)| {
            l.ok_or_else(|| Error::DictionaryFormat {
                line: 0,
                message: format!("missing lexicon {name}"),
            })
        })
        .collect()
}

pub fn default_lexicons() -> Vec<CategoryLexicon> {
    parse_lexicons(DEFAULT_LEXICONS).expect("bundled lexicons are valid")
}

pub fn serialize_lexicons(lexicons: &[CategoryLexicon]) -> String {
    let mut out = String::from("@version 1\n");
    for lex in lexicons {
        write_section(
            &mut out,
            &section_header(&format!("LEXICON:{}", lex.name), ""),
            &[],
            &lex.patterns,
        );
    }
    out
}

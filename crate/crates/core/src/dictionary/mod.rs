//! The per-question word dictionary: data model, file format, first-person
//! segmentation, and construction from labeled weeks.

mod builder;
pub mod format;
mod segments;
mod stopwords;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scoring::{QuestionId, Tool};
use crate::{Error, Result};

pub use builder::{build_dictionary, seed_patterns, seed_stem, BuilderParams};
pub use format::{parse_dictionary, serialize_dictionary};
pub use segments::{first_person_segments, split_sentences};
pub use stopwords::is_stopword;

/// A dictionary word: literal (`drink`) or prefix wildcard (`drink*`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WordPattern {
    stem: String,
    wildcard: bool,
}

impl WordPattern {
    pub fn new(stem: impl Into<String>, wildcard: bool) -> Result<Self> {
        let stem = stem.into();
        if stem.is_empty() || stem.contains('*') || stem.chars().any(char::is_whitespace) {
            return Err(Error::InvalidPattern(stem));
        }
        Ok(Self {
            stem: stem.to_lowercase(),
            wildcard,
        })
    }

    pub fn literal(stem: impl Into<String>) -> Result<Self> {
        Self::new(stem, false)
    }

    pub fn prefix(stem: impl Into<String>) -> Result<Self> {
        Self::new(stem, true)
    }

    /// Parse `stem` or `stem*`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.strip_suffix('*') {
            Some(stem) => Self::new(stem, true),
            None => Self::new(s, false),
        }
    }

    pub fn stem(&self) -> &str {
        &self.stem
    }

    pub fn is_wildcard(&self) -> bool {
        self.wildcard
    }

    pub fn matches(&self, token: &str) -> bool {
        match_pattern(self, token)
    }
}

impl fmt::Display for WordPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.wildcard {
            write!(f, "{}*", self.stem)
        } else {
            f.write_str(&self.stem)
        }
    }
}

/// `token` is expected lowercase.
pub fn match_pattern(p: &WordPattern, token: &str) -> bool {
    if p.wildcard {
        token.starts_with(p.stem.as_str())
    } else {
        token == p.stem
    }
}

pub fn matches_any(patterns: &[WordPattern], token: &str) -> bool {
    patterns.iter().any(|p| p.matches(token))
}

/// The word set attached to one survey question. Patterns are kept sorted
/// by stem with unique stems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub id: QuestionId,
    pub label: String,
    patterns: Vec<WordPattern>,
    /// Comment lines kept for lossless round-trips.
    pub comments: Vec<String>,
}

impl Dimension {
    pub fn new(id: QuestionId, label: impl Into<String>) -> Self {
        Self {
            id,
            label: label.into(),
            patterns: Vec::new(),
            comments: Vec::new(),
        }
    }

    pub fn patterns(&self) -> &[WordPattern] {
        &self.patterns
    }

    /// Insert keeping stems unique; returns false if the stem is already present.
    pub fn insert(&mut self, pattern: WordPattern) -> bool {
        match self
            .patterns
            .binary_search_by(|p| p.stem.cmp(&pattern.stem))
        {
            Ok(_) => false,
            Err(pos) => {
                self.patterns.insert(pos, pattern);
                true
            }
        }
    }

    pub fn contains_stem(&self, stem: &str) -> bool {
        self.patterns
            .binary_search_by(|p| p.stem.as_str().cmp(stem))
            .is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub tool: Tool,
    pub dimensions: Vec<Dimension>,
}

pub const DEFAULT_PRONOUNS: [&str; 9] = [
    "i", "me", "my", "mine", "myself", "i'm", "i've", "i'll", "i'd",
];

pub fn default_pronoun_filter() -> Vec<WordPattern> {
    let mut v: Vec<_> = DEFAULT_PRONOUNS
        .iter()
        .map(|p| WordPattern::literal(*p).expect("static pattern"))
        .collect();
    v.sort();
    v
}

/// Three survey categories with 5 / 6 / 5 dimensions, plus the first-person
/// pronoun filter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PtsdDictionary {
    pub version: String,
    /// Sorted, unique stems.
    pub pronoun_filter: Vec<WordPattern>,
    pub categories: Vec<Category>,
    pub header_comments: Vec<String>,
    pub pronoun_comments: Vec<String>,
}

impl PtsdDictionary {
    /// Check the structural invariants: one category per tool in order, the
    /// chosen-question count of dimensions each, non-empty unique patterns.
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| {
            Err(Error::DictionaryFormat {
                line: 0,
                message: m,
            })
        };
        if self.categories.len() != 3 {
            return invalid(format!(
                "expected 3 categories, got {}",
                self.categories.len()
            ));
        }
        for (cat, tool) in self.categories.iter().zip(Tool::ALL) {
            if cat.tool != tool {
                return invalid(format!("category {} out of order", cat.tool));
            }
            let expected = tool.demographics().chosen_questions as usize;
            if cat.dimensions.len() != expected {
                return invalid(format!(
                    "dimension count mismatch for {tool}: expected {expected}, got {}",
                    cat.dimensions.len()
                ));
            }
            for (i, dim) in cat.dimensions.iter().enumerate() {
                if dim.id != QuestionId::new(tool, i as u8 + 1) {
                    return invalid(format!("dimension {} out of order", dim.id));
                }
                if dim.patterns.is_empty() {
                    return invalid(format!("dimension {} is empty", dim.id));
                }
                if dim.patterns.windows(2).any(|w| w[0].stem >= w[1].stem) {
                    return invalid(format!(
                        "dimension {} has unsorted or duplicate stems",
                        dim.id
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dimensions(&self) -> impl Iterator<Item = &Dimension> {
        self.categories.iter().flat_map(|c| c.dimensions.iter())
    }

    pub fn dimension(&self, q: QuestionId) -> Option<&Dimension> {
        self.categories
            .get(q.tool.ordinal())?
            .dimensions
            .get(q.index as usize - 1)
    }
}

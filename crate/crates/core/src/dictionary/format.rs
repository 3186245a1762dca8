//! Line-oriented dictionary file format.
//!
//! ```text
//! # file comment
//! @version 1
//!
//! [PRONOUNS]
//! i
//! me
//!
//! [DOSPERT:2] Drinking heavily at a social function
//! # section comment
//! drink*
//! wasted
//! ```
//!
//! One pattern per line, `stem*` for prefix matches. Lines starting with `#`
//! are comments; blank lines are ignored. The canonical serialization (sorted
//! stems, section comments right after the header, one blank line between
//! sections) parses back to the same value.

use std::collections::BTreeMap;

use super::{default_pronoun_filter, Category, Dimension, PtsdDictionary, WordPattern};
use crate::scoring::{QuestionId, Tool};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct RawSection {
    pub line: usize,
    /// Header text between the brackets, e.g. `DOSPERT:1` or `PRONOUNS`.
    pub name: String,
    pub label: String,
    pub comments: Vec<String>,
    pub patterns: Vec<(usize, WordPattern)>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RawFile {
    pub header_comments: Vec<String>,
    pub version: Option<String>,
    pub sections: Vec<RawSection>,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::DictionaryFormat {
        line,
        message: message.into(),
    }
}

pub(crate) fn parse_raw(text: &str) -> Result<RawFile> {
    let mut file = RawFile::default();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let untrimmed = raw_line.trim_start();
        let trimmed = untrimmed.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        // Comment text is kept verbatim, trailing whitespace included.
        if let Some(comment) = untrimmed.strip_prefix('#') {
            let comment = comment.strip_suffix('\r').unwrap_or(comment);
            match file.sections.last_mut() {
                Some(section) => section.comments.push(comment.to_string()),
                None => file.header_comments.push(comment.to_string()),
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("@version") {
            if !file.sections.is_empty() {
                return Err(format_err(line_no, "@version must precede all sections"));
            }
            if file.version.is_some() {
                return Err(format_err(line_no, "duplicate @version"));
            }
            let v = rest.trim();
            if v.is_empty() {
                return Err(format_err(line_no, "empty @version"));
            }
            file.version = Some(v.to_string());
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(close) = rest.find(']') else {
                return Err(format_err(line_no, "unterminated section header"));
            };
            let name = rest[..close].trim().to_string();
            if name.is_empty() {
                return Err(format_err(line_no, "empty section name"));
            }
            file.sections.push(RawSection {
                line: line_no,
                name,
                label: rest[close + 1..].trim().to_string(),
                comments: Vec::new(),
                patterns: Vec::new(),
            });
            continue;
        }
        let Some(section) = file.sections.last_mut() else {
            return Err(format_err(line_no, "pattern outside of any section"));
        };
        let pattern = WordPattern::parse(trimmed)
            .map_err(|_| format_err(line_no, format!("invalid pattern {trimmed:?}")))?;
        if let Some((first, _)) = section
            .patterns
            .iter()
            .find(|(_, p)| p.stem() == pattern.stem())
        {
            return Err(format_err(
                line_no,
                format!(
                    "duplicate stem {:?} in [{}] (first on line {first})",
                    pattern.stem(),
                    section.name
                ),
            ));
        }
        section.patterns.push((line_no, pattern));
    }
    Ok(file)
}

fn sorted_patterns(section: &RawSection) -> Vec<WordPattern> {
    let mut v: Vec<_> = section.patterns.iter().map(|(_, p)| p.clone()).collect();
    v.sort();
    v
}

/// Parse a dictionary file. Errors carry the offending line number
/// (0 when the problem is a missing section).
pub fn parse_dictionary(text: &str) -> Result<PtsdDictionary> {
    let raw = parse_raw(text)?;
    let mut pronouns: Option<(Vec<WordPattern>, Vec<String>)> = None;
    let mut dims: BTreeMap<QuestionId, (usize, Dimension)> = BTreeMap::new();
    let mut first_line: BTreeMap<Tool, usize> = BTreeMap::new();

    for section in &raw.sections {
        if section.name == "PRONOUNS" {
            if !section.label.is_empty() {
                return Err(format_err(section.line, "[PRONOUNS] takes no label"));
            }
            if pronouns.is_some() {
                return Err(format_err(section.line, "duplicate [PRONOUNS] section"));
            }
            pronouns = Some((sorted_patterns(section), section.comments.clone()));
            continue;
        }
        let (tool_name, index) = section.name.split_once(':').ok_or_else(|| {
            format_err(
                section.line,
                format!("section [{}] is not TOOL:index", section.name),
            )
        })?;
        let tool: Tool = tool_name
            .parse()
            .map_err(|_| format_err(section.line, format!("unknown tool {tool_name:?}")))?;
        let index: u8 = index
            .trim()
            .parse()
            .map_err(|_| format_err(section.line, format!("bad question index {index:?}")))?;
        let chosen = tool.demographics().chosen_questions;
        if index == 0 || index > chosen {
            return Err(format_err(
                section.line,
                format!("question index {index} out of range 1..={chosen} for {tool}"),
            ));
        }
        let id = QuestionId::new(tool, index);
        if let Some((line, _)) = dims.get(&id) {
            return Err(format_err(
                section.line,
                format!("duplicate section [{id}] (first on line {line})"),
            ));
        }
        if section.patterns.is_empty() {
            return Err(format_err(
                section.line,
                format!("dimension [{id}] has no patterns"),
            ));
        }
        let mut dim = Dimension::new(id, section.label.clone());
        dim.patterns = sorted_patterns(section);
        dim.comments = section.comments.clone();
        first_line.entry(tool).or_insert(section.line);
        dims.insert(id, (section.line, dim));
    }

    let mut categories = Vec::with_capacity(3);
    for tool in Tool::ALL {
        let dimensions: Vec<Dimension> = dims
            .iter()
            .filter(|(q, _)| q.tool == tool)
            .map(|(_, (_, d))| d.clone())
            .collect();
        let expected = tool.demographics().chosen_questions as usize;
        if dimensions.len() != expected {
            return Err(format_err(
                first_line.get(&tool).copied().unwrap_or(0),
                format!(
                    "dimension count mismatch for {tool}: expected {expected}, found {}",
                    dimensions.len()
                ),
            ));
        }
        categories.push(Category { tool, dimensions });
    }

    let (pronoun_filter, pronoun_comments) =
        pronouns.unwrap_or_else(|| (default_pronoun_filter(), Vec::new()));
    Ok(PtsdDictionary {
        version: raw.version.unwrap_or_else(|| "1".to_string()),
        pronoun_filter,
        categories,
        header_comments: raw.header_comments,
        pronoun_comments,
    })
}

pub(crate) fn write_section(
    out: &mut String,
    header: &str,
    comments: &[String],
    patterns: &[WordPattern],
) {
    out.push('\n');
    out.push_str(header);
    out.push('\n');
    for c in comments {
        out.push('#');
        out.push_str(c);
        out.push('\n');
    }
    let mut sorted: Vec<&WordPattern> = patterns.iter().collect();
    sorted.sort();
    for p in sorted {
        out.push_str(&p.to_string());
        out.push('\n');
    }
}

pub(crate) fn section_header(name: &str, label: &str) -> String {
    if label.is_empty() {
        format!("[{name}]")
    } else {
        format!("[{name}] {label}")
    }
}

/// Canonical, deterministic text form.
pub fn serialize_dictionary(dict: &PtsdDictionary) -> String {
    let mut out = String::new();
    for c in &dict.header_comments {
        out.push('#');
        out.push_str(c);
        out.push('\n');
    }
    out.push_str("@version ");
    out.push_str(&dict.version);
    out.push('\n');
    write_section(
        &mut out,
        "[PRONOUNS]",
        &dict.pronoun_comments,
        &dict.pronoun_filter,
    );
    for dim in dict.dimensions() {
        let name = format!("{}:{}", dim.id.tool, dim.id.index);
        write_section(
            &mut out,
            &section_header(&name, &dim.label),
            &dim.comments,
            dim.patterns(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(dospert: usize) -> String {
        let mut s = String::from("@version 1\n");
        let mut n = 0;
        for (tool, count) in [("DOSPERT", dospert), ("BSSS", 6), ("VIAS", 5)] {
            for i in 1..=count {
                n += 1;
                s.push_str(&format!("\n[{tool}:{i}] question {n}\nword{n}\n"));
            }
        }
        s
    }

    #[test]
    fn minimal_file_parses() {
        let d = parse_dictionary(&minimal(5)).unwrap();
        d.validate().unwrap();
        assert_eq!(d.dimensions().count(), 16);
        assert_eq!(d.pronoun_filter, default_pronoun_filter());
    }

    #[test]
    fn dimension_count_mismatch() {
        let err = parse_dictionary(&minimal(4)).unwrap_err().to_string();
        assert!(err.contains("dimension count mismatch"), "{err}");
    }

    #[test]
    fn wildcard_line() {
        let text = minimal(5).replace("word1\n", "drink*\n");
        let d = parse_dictionary(&text).unwrap();
        let p = &d.categories[0].dimensions[0].patterns()[0];
        assert_eq!((p.stem(), p.is_wildcard()), ("drink", true));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let unknown = "@version 1\n\n[PHQ9:1] x\nfoo\n";
        assert_eq!(
            parse_dictionary(unknown).unwrap_err().to_string(),
            "line 3: unknown tool \"PHQ9\""
        );
        let dup = minimal(5).replace("word1\n", "drink*\ndrink\n");
        let err = parse_dictionary(&dup).unwrap_err();
        assert!(
            matches!(err, Error::DictionaryFormat { line: 5, .. }),
            "{err}"
        );
        let outside = "drink\n";
        assert!(matches!(
            parse_dictionary(outside),
            Err(Error::DictionaryFormat { line: 1, .. })
        ));
        let range = minimal(5).replace("[DOSPERT:5]", "[DOSPERT:6]");
        assert!(parse_dictionary(&range)
            .unwrap_err()
            .to_string()
            .contains("out of range"));
    }

    #[test]
    fn both_pattern_syntaxes_emitted() {
        let mut d = parse_dictionary(&minimal(5)).unwrap();
        let dim = &mut d.categories[0].dimensions[0];
        dim.insert(WordPattern::prefix("drink").unwrap());
        dim.insert(WordPattern::literal("wasted").unwrap());
        let text = serialize_dictionary(&d);
        assert!(text.contains("\ndrink*\n") && text.contains("\nwasted\n"));
        assert_eq!(parse_dictionary(&text).unwrap(), d);
    }
}

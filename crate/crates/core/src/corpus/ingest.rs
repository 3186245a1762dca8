use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{LanguageId, Tweet};

#[derive(Debug, Deserialize)]
struct Record {
    id: String,
    user_id: String,
    timestamp: i64,
    text: String,
    #[serde(default)]
    lang: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    /// 1-based.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ingested {
    pub tweets: Vec<Tweet>,
    pub rejects: Vec<Reject>,
}

impl Ingested {
    /// Append another worker's output, renumbering nothing: line numbers stay
    /// relative to their own stream.
    pub fn merge(&mut self, other: Ingested) {
        self.tweets.extend(other.tweets);
        self.rejects.extend(other.rejects);
    }
}

/// Read line-delimited JSON records. Malformed lines land in `rejects` and
/// never stop the stream; blank lines are skipped. A record's `lang` field,
/// when present, overrides the language-ID hook.
pub fn parse_post_stream<R: BufRead>(
    reader: R,
    lang_id: &dyn LanguageId,
) -> std::io::Result<Ingested> {
    let mut out = Ingested::default();
    for (i, line) in reader.split(b'\n').enumerate() {
        let line_no = i + 1;
        let bytes = line?;
        let Ok(line) = std::str::from_utf8(&bytes) else {
            out.rejects.push(Reject {
                line: line_no,
                reason: "invalid UTF-8".into(),
            });
            continue;
        };
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(line, lang_id) {
            Ok(t) => out.tweets.push(t),
            Err(reason) => out.rejects.push(Reject {
                line: line_no,
                reason,
            }),
        }
    }
    Ok(out)
}

fn parse_record(line: &str, lang_id: &dyn LanguageId) -> Result<Tweet, String> {
    let rec: Record = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if rec.id.is_empty() {
        return Err("empty id".into());
    }
    if rec.user_id.is_empty() {
        return Err("empty user_id".into());
    }
    if rec.timestamp < 0 {
        return Err(format!("negative timestamp {}", rec.timestamp));
    }
    let is_english = match &rec.lang {
        Some(lang) => lang.to_ascii_lowercase().starts_with("en"),
        None => lang_id.is_english(&rec.text),
    };
    Ok(Tweet {
        id: rec.id,
        user_id: rec.user_id,
        timestamp: rec.timestamp,
        text: rec.text,
        is_english,
    })
}

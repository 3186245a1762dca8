//! Output directory layout and small I/O helpers.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use lexsurvey::corpus::CohortUser;

pub const POSTS: &str = "posts.jsonl";
pub const LABELS: &str = "labels.csv";
pub const CORPUS: &str = "corpus.jsonl";
pub const CORPUS_DIR: &str = "corpus";
pub const REJECTS: &str = "rejects.jsonl";
pub const INGEST_SUMMARY: &str = "ingest_summary.json";
pub const DICTIONARY: &str = "dictionary.dic";
pub const ALPHA_SCORES: &str = "alpha_scores.jsonl";
pub const SURVEYS_JSONL: &str = "surveys.jsonl";
pub const SURVEYS_CSV: &str = "surveys.csv";
pub const CALIBRATION: &str = "calibration.json";
pub const REPORTS_DIR: &str = "reports";
pub const BASELINE_DIR: &str = "baseline";
pub const EVAL: &str = "eval.json";
pub const BASELINE_EVAL: &str = "baseline_eval.json";
pub const LEARNING_CURVE: &str = "learning_curve.csv";
pub const BASELINE_CURVE: &str = "baseline_curve.csv";
pub const WEEKLY: &str = "weekly.csv";
pub const PER_SURVEY: &str = "per_survey.csv";

/// Fail with a pointer to the command that produces `path` when it is absent.
pub fn require(path: &Path, producer: &str) -> Result<()> {
    if !path.exists() {
        bail!(
            "{} not found; run `lexsurvey {producer}` first",
            path.display()
        );
    }
    Ok(())
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Remove and recreate a directory this tool owns, so reruns leave no stale files.
pub fn fresh_dir(path: &Path) -> Result<PathBuf> {
    if path.exists() {
        fs::remove_dir_all(path).with_context(|| format!("clearing {}", path.display()))?;
    }
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(path.to_path_buf())
}

pub fn json_lines<T: Serialize>(records: impl IntoIterator<Item = T>) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn read_corpus(out: &Path) -> Result<Vec<CohortUser>> {
    let path = out.join(CORPUS);
    require(&path, "ingest")?;
    read(&path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .with_context(|| format!("{}:{}: bad corpus record", path.display(), i + 1))
        })
        .collect()
}

//! On-disk artifacts: per-user-week text files and the ground-truth labels table.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::UserWeek;
use crate::scoring::{SurveyResponse, Tool};
use crate::{Error, Result};

/// Make a user id safe as a single path component (reversible).
pub fn escape_component(id: &str) -> String {
    let mut out = String::with_capacity(id.len());
    for (i, b) in id.bytes().enumerate() {
        let safe = b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || (b == b'.' && i > 0);
        if safe {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

pub fn unescape_component(name: &str) -> Option<String> {
    let bytes = name.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = name.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

fn write_lines<'a>(path: &Path, lines: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut buf = String::new();
    for line in lines {
        buf.push_str(line);
        buf.push('\n');
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Write `<dir>/<user_id>/<week_start>_{all|work|nonwork}.txt`, one tweet per line.
pub fn write_week_files(dir: &Path, week: &UserWeek) -> Result<()> {
    let user_dir = dir.join(escape_component(&week.user_id));
    fs::create_dir_all(&user_dir)?;
    let stem = week.week_start.format("%Y-%m-%d").to_string();
    write_lines(
        &user_dir.join(format!("{stem}_all.txt")),
        week.normalized_texts.iter().map(String::as_str),
    )?;
    write_lines(
        &user_dir.join(format!("{stem}_work.txt")),
        week.work_texts(),
    )?;
    write_lines(
        &user_dir.join(format!("{stem}_nonwork.txt")),
        week.nonwork_texts(),
    )?;
    Ok(())
}

/// Reload weeks written by [`write_week_files`], keyed by user id, each user's
/// weeks in date order.
pub fn read_week_files(dir: &Path) -> Result<BTreeMap<String, Vec<UserWeek>>> {
    let mut users = BTreeMap::new();
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        if !entry.file_type()?.is_dir() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(user_id) = unescape_component(&name) else {
            continue;
        };
        let mut weeks = Vec::new();
        let mut files: Vec<_> = fs::read_dir(entry.path())?.collect::<std::io::Result<_>>()?;
        files.sort_by_key(|e| e.file_name());
        for file in files {
            let fname = file.file_name().to_string_lossy().into_owned();
            let Some(date) = fname.strip_suffix("_all.txt") else {
                continue;
            };
            let Ok(week_start) = NaiveDate::parse_from_str(date, "%Y-%m-%d") else {
                continue;
            };
            let mut content = String::new();
            fs::File::open(file.path())?.read_to_string(&mut content)?;
            let texts = content.lines().map(str::to_string).collect();
            weeks.push(UserWeek::from_normalized(
                user_id.clone(),
                week_start,
                texts,
            ));
        }
        weeks.sort_by_key(|w| w.week_start);
        users.insert(user_id, weeks);
    }
    Ok(users)
}

/// One row of the labels table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRow {
    pub user_id: String,
    pub responses: Vec<SurveyResponse>,
    pub self_identified: bool,
}

fn question_column(tool: Tool, index: u8) -> String {
    format!("{}_q{index}", tool.name().to_ascii_lowercase())
}

fn total_column(tool: Tool) -> String {
    format!("{}_total", tool.name().to_ascii_lowercase())
}

/// Spread a total over the chosen questions as evenly as possible.
fn spread_total(tool: Tool, total: u32) -> Vec<u8> {
    let n = tool.demographics().chosen_questions as u32;
    (0..n)
        .map(|i| (total / n + u32::from(i < total % n)) as u8)
        .collect()
}

/// Read the labels table. Required columns are `user_id`, the three
/// `<tool>_total` columns, and `self_identified` (0/1). Optional
/// `<tool>_q<i>` columns carry per-question answers; without them each total
/// is spread evenly across the tool's questions.
pub fn read_labels<R: Read>(reader: R) -> Result<Vec<LabelRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| {
        col(name).ok_or_else(|| Error::Labels {
            line: 1,
            message: format!("missing column {name}"),
        })
    };
    let user_col = need("user_id")?;
    let self_col = need("self_identified")?;
    let total_cols: Vec<usize> = Tool::ALL
        .iter()
        .map(|&t| need(&total_column(t)))
        .collect::<Result<_>>()?;
    let question_cols: Vec<Option<Vec<usize>>> = Tool::ALL
        .iter()
        .map(|&t| {
            t.questions()
                .map(|q| col(&question_column(t, q.index)))
                .collect::<Option<Vec<_>>>()
        })
        .collect();

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record?;
        let err = |message: String| Error::Labels { line, message };
        let field = |c: usize| record.get(c).unwrap_or("");
        let parse_u32 = |c: usize| {
            field(c)
                .parse::<u32>()
                .map_err(|_| err(format!("bad integer {:?}", field(c))))
        };
        let self_identified = match field(self_col) {
            "0" => false,
            "1" => true,
            other => {
                return Err(err(format!(
                    "self_identified must be 0 or 1, got {other:?}"
                )))
            }
        };
        let mut responses = Vec::new();
        for (k, &tool) in Tool::ALL.iter().enumerate() {
            let total = parse_u32(total_cols[k])?;
            if total > tool.demographics().total_points {
                return Err(err(format!(
                    "{tool} total {total} exceeds {}",
                    tool.demographics().total_points
                )));
            }
            let answers = match &question_cols[k] {
                Some(cols) => {
                    let answers = cols
                        .iter()
                        .map(|&c| {
                            parse_u32(c).and_then(|v| {
                                u8::try_from(v).map_err(|_| err(format!("answer {v} too large")))
                            })
                        })
                        .collect::<Result<Vec<u8>>>()?;
                    let sum: u32 = answers.iter().map(|&a| a as u32).sum();
                    if sum != total {
                        return Err(err(format!(
                            "{tool} answers sum to {sum} but total is {total}"
                        )));
                    }
                    answers
                }
                None => spread_total(tool, total),
            };
            responses.push(SurveyResponse::new(tool, answers).map_err(|e| err(e.to_string()))?);
        }
        rows.push(LabelRow {
            user_id: field(user_col).to_string(),
            responses,
            self_identified,
        });
    }
    Ok(rows)
}

/// Write the labels table with per-question columns.
pub fn write_labels<W: Write>(writer: W, rows: &[LabelRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["user_id".to_string()];
    header.extend(Tool::ALL.iter().map(|&t| total_column(t)));
    header.push("self_identified".into());
    for &tool in &Tool::ALL {
        header.extend(tool.questions().map(|q| question_column(tool, q.index)));
    }
    wtr.write_record(&header)?;
    for row in rows {
        let by_tool = |tool: Tool| {
            row.responses
                .iter()
                .find(|r| r.tool == tool)
                .ok_or(Error::MissingTool(tool))
        };
        let mut rec = vec![row.user_id.clone()];
        for &tool in &Tool::ALL {
            rec.push(by_tool(tool)?.total().to_string());
        }
        rec.push(if row.self_identified { "1" } else { "0" }.into());
        for &tool in &Tool::ALL {
            rec.extend(by_tool(tool)?.answers.iter().map(|a| a.to_string()));
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

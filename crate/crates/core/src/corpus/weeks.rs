use std::collections::BTreeMap;

use chrono::{DateTime, Datelike, Duration, NaiveDate};

use super::{classify_work_related, preprocess_text, CohortUser, Tweet, UserWeek};

pub const DEFAULT_MIN_TWEETS: usize = 25;
pub const DEFAULT_MIN_ENGLISH: f64 = 0.75;

/// Monday (UTC) of the ISO week containing `timestamp`.
pub fn week_start_of(timestamp: i64) -> NaiveDate {
    let date = DateTime::from_timestamp(timestamp, 0)
        .unwrap_or(DateTime::UNIX_EPOCH)
        .date_naive();
    date - Duration::days(date.weekday().num_days_from_monday() as i64)
}

/// Partition tweets into (user, week) buckets ordered by user then week.
/// Within a week tweets are ordered by timestamp (stable for ties); URL
/// tweets stay in `raw_tweets` but get no normalized text.
pub fn bucket_weekly(tweets: &[Tweet]) -> Vec<UserWeek> {
    let mut buckets: BTreeMap<(&str, NaiveDate), Vec<&Tweet>> = BTreeMap::new();
    for t in tweets {
        buckets
            .entry((t.user_id.as_str(), week_start_of(t.timestamp)))
            .or_default()
            .push(t);
    }
    buckets
        .into_iter()
        .map(|((user_id, week_start), mut ts)| {
            ts.sort_by_key(|t| t.timestamp);
            let mut normalized_texts = Vec::new();
            let mut work_related = Vec::new();
            for t in &ts {
                if let Some(norm) = preprocess_text(&t.text) {
                    work_related.push(classify_work_related(&norm));
                    normalized_texts.push(norm);
                }
            }
            UserWeek {
                user_id: user_id.to_string(),
                week_start,
                raw_tweets: ts.into_iter().cloned().collect(),
                normalized_texts,
                work_related,
            }
        })
        .collect()
}

/// Bucket a mixed stream into per-user week lists.
pub fn bucket_by_user(tweets: &[Tweet]) -> BTreeMap<String, Vec<UserWeek>> {
    let mut by_user: BTreeMap<String, Vec<UserWeek>> = BTreeMap::new();
    for week in bucket_weekly(tweets) {
        by_user.entry(week.user_id.clone()).or_default().push(week);
    }
    by_user
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eligibility {
    Eligible,
    TooFewTweets,
    NotEnglish,
}

/// Judge a user on the week holding their latest tweet.
pub fn eligibility(user: &CohortUser, min_tweets: usize, min_english: f64) -> Eligibility {
    let Some(week) = user.weeks.iter().max_by_key(|w| w.week_start) else {
        return Eligibility::TooFewTweets;
    };
    let n = week.raw_tweets.len();
    if n < min_tweets || n == 0 {
        return Eligibility::TooFewTweets;
    }
    let english = week.raw_tweets.iter().filter(|t| t.is_english).count();
    if (english as f64) < min_english * n as f64 {
        return Eligibility::NotEnglish;
    }
    Eligibility::Eligible
}

pub fn filter_eligible_users(
    users: &[CohortUser],
    min_tweets: usize,
    min_english: f64,
) -> Vec<CohortUser> {
    users
        .iter()
        .filter(|u| eligibility(u, min_tweets, min_english) == Eligibility::Eligible)
        .cloned()
        .collect()
}

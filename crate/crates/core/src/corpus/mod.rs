//! Post ingestion, normalization, work tagging, and weekly bucketing.

mod ingest;
pub mod langid;
mod selfid;
pub mod store;
pub mod text;
mod weeks;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::scoring::{SurveyResponse, Tool};
use crate::{Error, Result};

pub use ingest::{parse_post_stream, Ingested, Reject};
pub use langid::{LanguageId, StopwordLanguageId};
pub use selfid::{find_self_identification, SelfIdMatch, DEFAULT_SELF_ID_PATTERNS};
pub use text::{classify_work_related, preprocess_text, tokenize, words, Token};
pub use weeks::{
    bucket_by_user, bucket_weekly, eligibility, filter_eligible_users, week_start_of, Eligibility,
    DEFAULT_MIN_ENGLISH, DEFAULT_MIN_TWEETS,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub user_id: String,
    /// UTC seconds.
    pub timestamp: i64,
    pub text: String,
    pub is_english: bool,
}

/// One user's posts for one Monday-based UTC week.
///
/// `normalized_texts` holds the non-excluded tweets after preprocessing, and
/// `work_related` runs parallel to it. Weeks reloaded from ingest artifacts
/// carry no `raw_tweets`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserWeek {
    pub user_id: String,
    pub week_start: NaiveDate,
    pub raw_tweets: Vec<Tweet>,
    pub normalized_texts: Vec<String>,
    pub work_related: Vec<bool>,
}

impl UserWeek {
    /// Build from already-normalized texts, tagging work-related ones.
    pub fn from_normalized(
        user_id: impl Into<String>,
        week_start: NaiveDate,
        texts: Vec<String>,
    ) -> Self {
        let work_related = texts.iter().map(|t| classify_work_related(t)).collect();
        Self {
            user_id: user_id.into(),
            week_start,
            raw_tweets: Vec::new(),
            normalized_texts: texts,
            work_related,
        }
    }

    pub fn work_texts(&self) -> impl Iterator<Item = &str> {
        self.view(true)
    }

    pub fn nonwork_texts(&self) -> impl Iterator<Item = &str> {
        self.view(false)
    }

    fn view(&self, work: bool) -> impl Iterator<Item = &str> {
        self.normalized_texts
            .iter()
            .zip(&self.work_related)
            .filter(move |(_, &w)| w == work)
            .map(|(t, _)| t.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortUser {
    pub user_id: String,
    pub is_veteran: bool,
    pub self_identified_ptsd: bool,
    pub survey_responses: Option<Vec<SurveyResponse>>,
    /// Ordered by `week_start`.
    pub weeks: Vec<UserWeek>,
}

impl CohortUser {
    pub fn response(&self, tool: Tool) -> Option<&SurveyResponse> {
        self.survey_responses
            .as_ref()?
            .iter()
            .find(|r| r.tool == tool)
    }

    /// Ground-truth over-threshold flags in tool order, if labeled.
    pub fn true_over_flags(&self) -> Option<[bool; 3]> {
        let responses = self.survey_responses.as_ref()?;
        crate::scoring::over_flags(responses.iter().map(|r| (r.tool, r.over_threshold()))).ok()
    }

    pub fn true_intensity(&self) -> Option<u8> {
        self.true_over_flags()
            .map(|f| f.iter().filter(|&&b| b).count() as u8)
    }

    /// The week `offset` weeks before the most recent one.
    pub fn week_back(&self, offset: usize) -> Option<&UserWeek> {
        self.weeks
            .len()
            .checked_sub(offset + 1)
            .map(|i| &self.weeks[i])
    }

    pub fn latest_week(&self) -> Option<&UserWeek> {
        self.week_back(0)
    }

    /// Check the one-response-per-tool invariant.
    pub fn validate(&self) -> Result<()> {
        if let Some(responses) = &self.survey_responses {
            crate::scoring::over_flags(responses.iter().map(|r| (r.tool, false)))?;
        }
        if self
            .weeks
            .windows(2)
            .any(|w| w[0].week_start >= w[1].week_start)
        {
            return Err(Error::Training(format!(
                "user {} weeks are not strictly ordered",
                self.user_id
            )));
        }
        Ok(())
    }
}

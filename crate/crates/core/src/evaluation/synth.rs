//! Seeded synthetic cohorts with planted, question-specific word signal.
//!
//! Each user gets an intensity level, survey answers that realize it under
//! the threshold rule, and weekly tweets. For every question the user writes
//! `1 + round(2f)` first-person signal sentences, each holding
//! `round(1 / (1 - 0.9 f))` distinct words from that question's pool, where
//! `f` is the answer as a fraction of the scale maximum. Words that co-occur
//! within sentences raise the dimension's alpha, so alpha grows with the
//! answer. The rest of each week is first- and third-person filler.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::store::LabelRow;
use crate::corpus::{bucket_by_user, CohortUser, Tweet};
use crate::dictionary::{default_pronoun_filter, is_stopword, matches_any, seed_patterns};
use crate::scoring::{all_questions, SurveyResponse, Tool, QUESTION_COUNT};
use crate::{Error, Result};

/// 2024-01-01 00:00:00 UTC, a Monday.
pub const COHORT_EPOCH: i64 = 1_704_067_200;
const WEEK: i64 = 7 * 86_400;

const POOLS: [[&str; 12]; QUESTION_COUNT] = [
    [
        "wager", "jackpot", "casino", "poker", "lottery", "odds", "bookie", "payout", "gamble",
        "slots", "roulette", "parlay",
    ],
    [
        "whiskey",
        "vodka",
        "tequila",
        "hangover",
        "shots",
        "beers",
        "bourbon",
        "bartender",
        "blackout",
        "wasted",
        "liquor",
        "pints",
    ],
    [
        "boss",
        "sergeant",
        "argued",
        "confronted",
        "defied",
        "protest",
        "complained",
        "refused",
        "objected",
        "challenged",
        "superiors",
        "commander",
    ],
    [
        "hookup", "stranger", "condom", "onenight", "fling", "tinder", "reckless", "motel",
        "flirted", "casual", "lust", "bedroom",
    ],
    [
        "kids",
        "toddler",
        "babysitter",
        "unattended",
        "nap",
        "stroller",
        "crib",
        "playpen",
        "neighbor",
        "latchkey",
        "grocery",
        "sitter",
    ],
    [
        "lonely",
        "secluded",
        "estranged",
        "solitary",
        "disconnected",
        "shutin",
        "recluse",
        "distant",
        "unreachable",
        "ignored",
        "outcast",
        "hermit",
    ],
    [
        "stranded",
        "unreliable",
        "helpless",
        "emergency",
        "flaked",
        "ghosted",
        "letdown",
        "unanswered",
        "voicemail",
        "bailed",
        "deserted",
        "noshow",
    ],
    [
        "unsupported",
        "dismissed",
        "belittled",
        "unheard",
        "criticized",
        "invalidated",
        "mocked",
        "unappreciated",
        "overlooked",
        "cold",
        "neglected",
        "scolded",
    ],
    [
        "avoiding",
        "cancelled",
        "declined",
        "hiding",
        "retreated",
        "skipped",
        "silent",
        "muted",
        "unfollowed",
        "blocked",
        "ducked",
        "ghosting",
    ],
    [
        "stubborn",
        "insisted",
        "solo",
        "diy",
        "unassisted",
        "independently",
        "shrugged",
        "waved",
        "refusal",
        "handled",
        "pridefully",
        "stonewalled",
    ],
    [
        "nightmares",
        "flashbacks",
        "triggered",
        "sleepless",
        "shaking",
        "sweating",
        "jumpy",
        "startled",
        "insomnia",
        "tossing",
        "pounding",
        "trembling",
    ],
    [
        "pointless",
        "bleak",
        "doomed",
        "meaningless",
        "empty",
        "despair",
        "grim",
        "dark",
        "futile",
        "dread",
        "worthless",
        "gloomy",
    ],
    [
        "snapped",
        "outburst",
        "tantrum",
        "binge",
        "splurge",
        "rage",
        "lashed",
        "smashed",
        "punched",
        "temper",
        "erratic",
        "overboard",
    ],
    [
        "coward",
        "timid",
        "froze",
        "flinched",
        "chickened",
        "spineless",
        "weak",
        "paralyzed",
        "hesitated",
        "cowered",
        "shrank",
        "quailed",
    ],
    [
        "quit",
        "gaveup",
        "procrastinated",
        "slacking",
        "unmotivated",
        "lazy",
        "stalled",
        "dropped",
        "bedridden",
        "unfinished",
        "postponed",
        "idle",
    ],
    [
        "ungrateful",
        "bitter",
        "entitled",
        "resentful",
        "jaded",
        "thankless",
        "cynical",
        "spoiled",
        "envious",
        "sour",
        "greedy",
        "unappreciative",
    ],
];

const VERBS: [&str; 20] = [
    "cooked", "watched", "painted", "washed", "cleaned", "fixed", "ordered", "bought", "planted",
    "walked", "read", "visited", "called", "texted", "parked", "built", "sold", "tried", "carried",
    "moved",
];
const NOUNS: [&str; 20] = [
    "car", "dog", "garden", "kitchen", "fence", "truck", "movie", "book", "pizza", "coffee",
    "yard", "bike", "laptop", "game", "lawn", "porch", "garage", "shirt", "couch", "window",
];
const TIMES: [&str; 8] = [
    "today",
    "tonight",
    "yesterday",
    "early",
    "later",
    "outside",
    "downtown",
    "again",
];
const THIRD: [&str; 3] = ["he", "she", "they"];
const WORK_NOUNS: [&str; 3] = ["shift", "schedule", "paperwork"];

pub fn default_pools() -> Vec<Vec<String>> {
    POOLS
        .iter()
        .map(|p| p.iter().map(|w| w.to_string()).collect())
        .collect()
}

/// Every word the filler sentences can produce.
pub fn noise_vocabulary() -> BTreeSet<String> {
    VERBS
        .iter()
        .chain(&NOUNS)
        .chain(&TIMES)
        .chain(&WORK_NOUNS)
        .chain(&[
            "work",
            "check",
            "this",
            "out",
            "diagnosed",
            "ptsd",
            "after",
            "tour",
            "the",
            "and",
            "was",
            "at",
        ])
        .map(|w| w.to_string())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticCohortSpec {
    pub n_users: usize,
    /// Probabilities of intensity levels 0..=3.
    pub intensity_distribution: [f64; 4],
    /// One word pool per question, in canonical question order.
    pub pools: Vec<Vec<String>>,
    /// Chance that a filler word is replaced by a random pool word.
    pub noise_rate: f64,
    /// Inclusive range of tweets per week.
    pub tweets_per_week: (usize, usize),
    pub weeks: usize,
    /// When set, only the latest week carries the user's own signal; earlier
    /// weeks are written from an independently drawn profile.
    pub week_local_signal: bool,
    pub seed: u64,
}

impl Default for SyntheticCohortSpec {
    fn default() -> Self {
        Self {
            n_users: 200,
            intensity_distribution: [0.55, 0.15, 0.15, 0.15],
            pools: default_pools(),
            noise_rate: 0.02,
            tweets_per_week: (28, 40),
            weeks: 4,
            week_local_signal: false,
            seed: 0,
        }
    }
}

impl SyntheticCohortSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let sum: f64 = self.intensity_distribution.iter().sum();
        if self.intensity_distribution.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return bad(format!(
                "intensity distribution must be non-negative and sum to 1, got {sum}"
            ));
        }
        if self.pools.len() != QUESTION_COUNT {
            return bad(format!(
                "need {QUESTION_COUNT} word pools, got {}",
                self.pools.len()
            ));
        }
        let noise = noise_vocabulary();
        let pronouns = default_pronoun_filter();
        let seeds: Vec<_> = all_questions()
            .into_iter()
            .flat_map(|q| seed_patterns(q.label()))
            .collect();
        let mut seen = BTreeSet::new();
        for (q, pool) in all_questions().into_iter().zip(&self.pools) {
            if pool.len() < 2 {
                return bad(format!("pool for {q} needs at least 2 words"));
            }
            for w in pool {
                if w.is_empty() || w.chars().any(|c| !c.is_alphanumeric()) || w.to_lowercase() != *w
                {
                    return bad(format!("pool word {w:?} must be lowercase alphanumeric"));
                }
                if noise.contains(w) || !seen.insert(w.clone()) {
                    return bad(format!(
                        "pool word {w:?} is not unique across pools and filler"
                    ));
                }
                if is_stopword(w) || matches_any(&pronouns, w) || matches_any(&seeds, w) {
                    return bad(format!(
                        "pool word {w:?} collides with a stopword, pronoun, or question seed"
                    ));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return bad("noise rate must be in [0, 1]".into());
        }
        let (lo, hi) = self.tweets_per_week;
        if lo == 0 || lo > hi {
            return bad(format!("bad tweets-per-week range ({lo}, {hi})"));
        }
        if self.weeks == 0 {
            return bad("need at least one week".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCohort {
    /// Raw post stream, ordered by user then timestamp.
    pub tweets: Vec<Tweet>,
    pub labels: Vec<LabelRow>,
    /// Bucketed users with survey responses attached.
    pub users: Vec<CohortUser>,
}

fn sample_level(rng: &mut ChaCha8Rng, dist: &[f64; 4]) -> u8 {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    for (level, p) in dist.iter().enumerate() {
        acc += p;
        if x < acc {
            return level as u8;
        }
    }
    3
}

/// Answers whose total lands strictly over (or at most at) the threshold.
fn sample_answers(rng: &mut ChaCha8Rng, tool: Tool, over: bool) -> Vec<u8> {
    let demo = tool.demographics();
    let n = u32::from(demo.chosen_questions);
    let max = demo.per_question_max();
    let (lo, hi) = if over {
        (((demo.threshold + 1).div_ceil(n)) as u8, max)
    } else {
        (0, (demo.threshold / n) as u8)
    };
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

fn sample_profile(rng: &mut ChaCha8Rng, dist: &[f64; 4]) -> Vec<SurveyResponse> {
    let level = sample_level(rng, dist);
    let mut tools = Tool::ALL.to_vec();
    tools.shuffle(rng);
    let over: Vec<Tool> = tools[..level as usize].to_vec();
    Tool::ALL
        .iter()
        .map(|&t| {
            SurveyResponse::new(t, sample_answers(rng, t, over.contains(&t)))
                .expect("answers within scale")
        })
        .collect()
}

/// Signal sentence count and words per sentence for a normalized answer.
pub fn signal_shape(fraction: f64) -> (usize, usize) {
    let sentences = 1 + (2.0 * fraction).round() as usize;
    let words = (1.0 / (1.0 - 0.9 * fraction)).round() as usize;
    (sentences, words.max(1))
}

struct Writer<'a> {
    spec: &'a SyntheticCohortSpec,
    rng: ChaCha8Rng,
}

impl Writer<'_> {
    fn filler_word(&mut self, words: &[&str]) -> String {
        let word = words[self.rng.gen_range(0..words.len())];
        if self.rng.gen_bool(self.spec.noise_rate) {
            let pool = &self.spec.pools[self.rng.gen_range(0..self.spec.pools.len())];
            pool[self.rng.gen_range(0..pool.len())].clone()
        } else {
            word.to_string()
        }
    }

    fn filler_sentence(&mut self) -> String {
        let subject = if self.rng.gen_bool(0.5) {
            "i".to_string()
        } else {
            THIRD[self.rng.gen_range(0..3)].to_string()
        };
        if self.rng.gen_bool(0.08) {
            let noun = WORK_NOUNS[self.rng.gen_range(0..WORK_NOUNS.len())];
            return format!("{subject} was at work for the {noun}");
        }
        let verb = self.filler_word(&VERBS);
        let noun = self.filler_word(&NOUNS);
        let time = self.filler_word(&TIMES);
        format!("{subject} {verb} the {noun} {time}")
    }

    fn signal_sentences(&mut self, responses: &[SurveyResponse]) -> Vec<String> {
        let mut out = Vec::new();
        for (qi, q) in all_questions().into_iter().enumerate() {
            let resp = responses
                .iter()
                .find(|r| r.tool == q.tool)
                .expect("profile covers all tools");
            let max = f64::from(q.tool.demographics().per_question_max());
            let f = f64::from(resp.answer(q).unwrap_or(0)) / max;
            let (sentences, words) = signal_shape(f);
            let pool = &self.spec.pools[qi];
            for _ in 0..sentences {
                let picked: Vec<&String> = pool
                    .choose_multiple(&mut self.rng, words.min(pool.len()))
                    .collect();
                let body = picked
                    .iter()
                    .map(|w| w.as_str())
                    .collect::<Vec<_>>()
                    .join(" and ");
                out.push(format!("i {body}"));
            }
        }
        out
    }

    fn week_texts(&mut self, responses: &[SurveyResponse], self_id: bool) -> Vec<String> {
        let (lo, hi) = self.spec.tweets_per_week;
        let n = self.rng.gen_range(lo..=hi);
        let mut tweets: Vec<Vec<String>> = (0..n).map(|_| Vec::new()).collect();
        for s in self.signal_sentences(responses) {
            let i = self.rng.gen_range(0..n);
            tweets[i].push(s);
        }
        let mut texts = Vec::with_capacity(n + 1);
        for mut sentences in tweets {
            let fillers = if sentences.is_empty() {
                1 + usize::from(self.rng.gen_bool(0.5))
            } else {
                usize::from(self.rng.gen_bool(0.3))
            };
            for _ in 0..fillers {
                sentences.push(self.filler_sentence());
            }
            sentences.shuffle(&mut self.rng);
            let mut text = sentences.join(". ");
            if self.rng.gen_bool(0.1) {
                text = format!("@buddy{} {text}", self.rng.gen_range(1..50));
            }
            if self.rng.gen_bool(0.03) {
                text = format!(
                    "check this out https://example.com/{}",
                    self.rng.gen_range(1..1000)
                );
            }
            texts.push(text);
        }
        if self_id {
            texts.push("i was diagnosed with ptsd after the tour".to_string());
        }
        texts
    }
}

pub fn generate_synthetic_cohort(spec: &SyntheticCohortSpec) -> Result<SyntheticCohort> {
    spec.validate()?;
    let mut w = Writer {
        spec,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
    };
    let mut tweets = Vec::new();
    let mut labels = Vec::new();
    for u in 0..spec.n_users {
        let user_id = format!("user{:04}", u + 1);
        let responses = sample_profile(&mut w.rng, &spec.intensity_distribution);
        let positive = responses.iter().any(SurveyResponse::over_threshold);
        for week in 0..spec.weeks {
            let latest = week + 1 == spec.weeks;
            let profile = if spec.week_local_signal && !latest {
                sample_profile(&mut w.rng, &spec.intensity_distribution)
            } else {
                responses.clone()
            };
            let texts = w.week_texts(&profile, positive && week == 0);
            let start = COHORT_EPOCH + week as i64 * WEEK;
            let mut stamps: Vec<i64> = texts
                .iter()
                .map(|_| start + w.rng.gen_range(0..WEEK))
                .collect();
            stamps.sort_unstable();
            for (i, (text, ts)) in texts.into_iter().zip(stamps).enumerate() {
                tweets.push(Tweet {
                    id: format!("{user_id}-{week}-{i:03}"),
                    user_id: user_id.clone(),
                    timestamp: ts,
                    text,
                    is_english: true,
                });
            }
        }
        labels.push(LabelRow {
            user_id,
            responses,
            self_identified: positive,
        });
    }
    let users = attach_labels(&tweets, &labels);
    Ok(SyntheticCohort {
        tweets,
        labels,
        users,
    })
}

/// Bucket tweets by user and attach label rows; users without a label row
/// are kept unlabeled.
pub fn attach_labels(tweets: &[Tweet], labels: &[LabelRow]) -> Vec<CohortUser> {
    bucket_by_user(tweets)
        .into_iter()
        .map(|(user_id, weeks)| {
            let row = labels.iter().find(|l| l.user_id == user_id);
            CohortUser {
                user_id,
                is_veteran: true,
                self_identified_ptsd: row.is_some_and(|r| r.self_identified),
                survey_responses: row.map(|r| r.responses.clone()),
                weeks,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct PostRecord<'a> {
    id: &'a str,
    user_id: &'a str,
    timestamp: i64,
    text: &'a str,
    lang: &'a str,
}

/// Write the post stream as line-delimited JSON.
pub fn write_post_stream<W: Write>(mut out: W, tweets: &[Tweet]) -> Result<()> {
    for t in tweets {
        let rec = PostRecord {
            id: &t.id,
            user_id: &t.user_id,
            timestamp: t.timestamp,
            text: &t.text,
            lang: if t.is_english { "en" } else { "und" },
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

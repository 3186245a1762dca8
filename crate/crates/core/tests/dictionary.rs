use std::collections::BTreeSet;

use chrono::NaiveDate;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lexsurvey::corpus::{CohortUser, UserWeek};
use lexsurvey::dictionary::{
    build_dictionary, default_pronoun_filter, is_stopword, matches_any, parse_dictionary,
    seed_patterns, serialize_dictionary, BuilderParams, Category, Dimension, PtsdDictionary,
    WordPattern,
};
use lexsurvey::scoring::{
    alpha_score_matrix, explain_report, score_week, AlphaMode, Calibration, QuestionId,
    SurveyResponse, Tool,
};

fn canonical_fixture() -> String {
    let mut s = String::from("# survey dictionary fixture\n#  second header line\n@version 2\n");
    s.push_str("\n[PRONOUNS]\n# singular only\ni\nme\nmy\n");
    let mut n = 0;
    for (tool, count) in [("DOSPERT", 5), ("BSSS", 6), ("VIAS", 5)] {
        for i in 1..=count {
            n += 1;
            s.push_str(&format!("\n[{tool}:{i}] question {n}\n"));
            if n % 3 == 0 {
                s.push_str(&format!("# note for {tool} {i}\n"));
            }
            s.push_str(&format!("alpha{n}\nbeta{n}*\n"));
            if n % 2 == 0 {
                s.push_str(&format!("gamma{n}\n"));
            }
        }
    }
    s
}

#[test]
fn canonical_fixture_is_a_fixed_point() {
    let text = canonical_fixture();
    let dict = parse_dictionary(&text).unwrap();
    assert_eq!(dict.dimensions().count(), 16);
    assert_eq!(dict.header_comments.len(), 2);
    assert_eq!(dict.pronoun_comments, vec![" singular only".to_string()]);
    let d3 = dict.dimension(QuestionId::new(Tool::Dospert, 3)).unwrap();
    assert_eq!(d3.comments, vec![" note for DOSPERT 3".to_string()]);
    assert!(d3.patterns().iter().any(|p| p.is_wildcard() && p.stem() == "beta3"));

    assert_eq!(serialize_dictionary(&dict), text);
    assert_eq!(parse_dictionary(&serialize_dictionary(&dict)).unwrap(), dict);
}

#[test]
fn pronoun_section_rejects_a_label() {
    let text = canonical_fixture().replace("[PRONOUNS]\n", "[PRONOUNS] first person\n");
    assert!(parse_dictionary(&text).is_err());
}

#[test]
fn comment_whitespace_is_preserved() {
    let text = canonical_fixture().replace("# singular only\n", "#  singular only  \r\n");
    let dict = parse_dictionary(&text).unwrap();
    assert_eq!(dict.pronoun_comments, vec!["  singular only  ".to_string()]);
}

#[test]
fn untidy_input_normalizes_to_canonical_form() {
    let messy = canonical_fixture()
        .replace("alpha1\nbeta1*\n", "beta1*\n\n   alpha1\n")
        .replace("\n[BSSS:1]", "\n\n\n[BSSS:1]");
    let dict = parse_dictionary(&messy).unwrap();
    assert_eq!(serialize_dictionary(&dict), canonical_fixture());
}

fn stem() -> impl Strategy<Value = String> {
    "[a-z][a-z']{0,7}"
}

fn arb_dictionary() -> impl Strategy<Value = PtsdDictionary> {
    let dims = proptest::collection::vec(
        (
            proptest::collection::btree_map(stem(), any::<bool>(), 1..6),
            proptest::collection::vec("[ -~]{0,12}", 0..3),
            "[A-Za-z][A-Za-z ]{0,20}[A-Za-z]",
        ),
        16,
    );
    (
        dims,
        proptest::collection::vec("[ -~]{0,12}", 0..3),
        "[0-9]{1,3}",
    )
        .prop_map(|(dims, header, version)| {
            let mut it = dims.into_iter();
            let categories = Tool::ALL
                .iter()
                .map(|&tool| Category {
                    tool,
                    dimensions: tool
                        .questions()
                        .map(|q| {
                            let (patterns, comments, label) = it.next().unwrap();
                            let mut d = Dimension::new(q, label);
                            for (s, wild) in patterns {
                                d.insert(WordPattern::new(s, wild).unwrap());
                            }
                            d.comments = comments;
                            d
                        })
                        .collect(),
                })
                .collect();
            PtsdDictionary {
                version,
                pronoun_filter: default_pronoun_filter(),
                categories,
                header_comments: header,
                pronoun_comments: vec![],
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_laws(dict in arb_dictionary()) {
        let text = serialize_dictionary(&dict);
        let parsed = parse_dictionary(&text).unwrap();
        prop_assert_eq!(&parsed, &dict);
        prop_assert_eq!(serialize_dictionary(&parsed), text);
    }
}

const NEUTRAL: [&str; 10] = [
    "garden", "movie", "coffee", "bicycle", "weather", "guitar", "pizza", "puppy", "sunset", "novel",
];
const N_USERS: usize = 24;

fn planted_user(i: usize, rng: &mut ChaCha8Rng) -> CohortUser {
    let high = i < N_USERS / 2;
    let mut texts = Vec::new();
    if high && i % 6 != 5 {
        texts.push("i was wasted".to_string());
    }
    if high && i % 4 != 3 {
        texts.push("i am hungover".to_string());
    }
    if !high && i % 7 == 0 {
        texts.push("i was wasted".to_string());
    }
    for w in NEUTRAL.choose_multiple(rng, 3) {
        texts.push(format!("i like my {w}"));
    }
    texts.push("she went out".to_string());
    let response = |tool: Tool| {
        let answers = tool
            .questions()
            .map(|q| match (tool, q.index) {
                (Tool::Bsss, 2) => {
                    if high {
                        3
                    } else {
                        0
                    }
                }
                (Tool::Bsss, _) => 1,
                _ => 0,
            })
            .collect();
        SurveyResponse::new(tool, answers).unwrap()
    };
    CohortUser {
        user_id: format!("u{i:02}"),
        is_veteran: true,
        self_identified_ptsd: false,
        survey_responses: Some(Tool::ALL.iter().map(|&t| response(t)).collect()),
        weeks: vec![UserWeek::from_normalized(
            format!("u{i:02}"),
            NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
            texts,
        )],
    }
}

fn planted_cohort(seed: u64) -> Vec<CohortUser> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..N_USERS).map(|i| planted_user(i, &mut rng)).collect()
}

/// Phi coefficient from the 2x2 table of (word present, answer high).
fn phi(present: &[bool], high: &[bool]) -> Option<f64> {
    let mut t = [[0f64; 2]; 2];
    for (&p, &h) in present.iter().zip(high) {
        t[usize::from(p)][usize::from(h)] += 1.0;
    }
    let rows = [t[0][0] + t[0][1], t[1][0] + t[1][1]];
    let cols = [t[0][0] + t[1][0], t[0][1] + t[1][1]];
    let denom = (rows[0] * rows[1] * cols[0] * cols[1]).sqrt();
    (denom > 0.0).then(|| (t[1][1] * t[0][0] - t[1][0] * t[0][1]) / denom)
}

/// Brute-force top-k learned words for BSSS question 2.
fn oracle_top_k(users: &[CohortUser], top_k: usize, min_df: usize) -> Vec<String> {
    let pronouns = default_pronoun_filter();
    let q = QuestionId::new(Tool::Bsss, 2);
    let seeds = seed_patterns(q.label());
    let docs: Vec<BTreeSet<String>> = users
        .iter()
        .map(|u| {
            u.weeks[0]
                .normalized_texts
                .iter()
                .filter(|t| t.split(' ').any(|w| matches_any(&pronouns, w)))
                .flat_map(|t| t.split(' ').map(str::to_string))
                .collect()
        })
        .collect();
    let high: Vec<bool> = users
        .iter()
        .map(|u| u.response(Tool::Bsss).unwrap().answers[1] >= 2)
        .collect();
    let vocab: BTreeSet<&String> = docs.iter().flatten().collect();
    let mut scored: Vec<(f64, String)> = vocab
        .into_iter()
        .filter(|w| !is_stopword(w) && !matches_any(&pronouns, w) && !matches_any(&seeds, w))
        .filter_map(|w| {
            let present: Vec<bool> = docs.iter().map(|d| d.contains(w)).collect();
            let df = present.iter().filter(|&&p| p).count();
            if df < min_df || df == docs.len() {
                return None;
            }
            phi(&present, &high).map(|r| (r.abs(), w.clone()))
        })
        .filter(|(r, _)| *r > 0.0)
        .collect();
    scored.sort_by(|a, b| {
        if (a.0 - b.0).abs() < 1e-12 {
            a.1.cmp(&b.1)
        } else {
            b.0.total_cmp(&a.0)
        }
    });
    scored.into_iter().take(top_k).map(|(_, w)| w).collect()
}

#[test]
fn builder_recovers_planted_words_like_the_oracle() {
    for seed in 0..5 {
        let users = planted_cohort(seed);
        for top_k in [2, 4, 15] {
            let params = BuilderParams { top_k, min_df: 2 };
            let dict = build_dictionary(&users, &params).unwrap();
            let q = QuestionId::new(Tool::Bsss, 2);
            let dim = dict.dimension(q).unwrap();
            let seeds = seed_patterns(q.label());
            let learned: BTreeSet<String> = dim
                .patterns()
                .iter()
                .filter(|p| !seeds.contains(p))
                .map(|p| p.stem().to_string())
                .collect();
            let oracle: BTreeSet<String> = oracle_top_k(&users, top_k, 2).into_iter().collect();
            assert_eq!(learned, oracle, "seed {seed}, top_k {top_k}");
            // With two slots a chance anti-correlated neutral word can outrank
            // "wasted"; the oracle check above still covers that case.
            assert!(
                top_k < 4 || (learned.contains("wasted") && learned.contains("hungover")),
                "seed {seed}, top_k {top_k}: {learned:?}"
            );
            assert_eq!(build_dictionary(&users, &params).unwrap(), dict);
        }
    }
}

#[test]
fn every_dimension_keeps_its_seeds() {
    let dict = build_dictionary(&planted_cohort(9), &BuilderParams::default()).unwrap();
    for dim in dict.dimensions() {
        for s in seed_patterns(dim.id.label()) {
            assert!(dim.patterns().contains(&s), "{} lacks {s}", dim.id);
        }
    }
}

#[test]
fn report_for_planted_user_names_planted_words() {
    let users = planted_cohort(1);
    let dict = build_dictionary(&users, &BuilderParams::default()).unwrap();
    let week = &users[0].weeks[0];
    let scored = score_week(week, &dict, AlphaMode::Binary, &Calibration::identity());
    let report = explain_report(week, &dict, &scored.alpha, &scored.surveys, &scored.label);
    let q = &report.surveys[Tool::Bsss.ordinal()].questions[1];
    let words: Vec<&str> = q.evidence_words.iter().map(|(w, _)| w.as_str()).collect();
    assert!(words.contains(&"wasted") && words.contains(&"hungover"), "{words:?}");
    assert_eq!(
        alpha_score_matrix(week, &dict, AlphaMode::Binary),
        scored.alpha
    );
}

#[test]
fn wildcard_and_literal_patterns_both_survive_building() {
    let users = planted_cohort(2);
    let dict = build_dictionary(&users, &BuilderParams::default()).unwrap();
    let text = serialize_dictionary(&dict);
    assert!(text.contains("\nwasted\n"));
    assert!(text.contains("\ndrink*\n"));
    assert_eq!(parse_dictionary(&text).unwrap(), dict);
}

use chrono::NaiveDate;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lexsurvey::corpus::UserWeek;
use lexsurvey::dictionary::{parse_dictionary, PtsdDictionary};
use lexsurvey::scoring::{
    alpha_score_matrix, all_questions, calibrate, classify_intensity, cronbach_alpha, fill_survey,
    intensity_score, AlphaMode, AlphaScoreMatrix, Calibration, FilledSurvey, IntensityLevel,
    SurveyResponse, Tool, QUESTION_COUNT,
};

/// Alpha from the population covariance matrix of the items:
/// k/(k-1) * (1 - trace(C) / sum(C)).
fn covariance_alpha(items: &[Vec<f64>]) -> f64 {
    let k = items.len();
    let n = items[0].len() as f64;
    let means: Vec<f64> = items.iter().map(|r| r.iter().sum::<f64>() / n).collect();
    let mut trace = 0.0;
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..k {
            let c = items[i]
                .iter()
                .zip(&items[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum::<f64>()
                / n;
            total += c;
            if i == j {
                trace += c;
            }
        }
    }
    if total.abs() < 1e-15 {
        return 0.0;
    }
    k as f64 / (k as f64 - 1.0) * (1.0 - trace / total)
}

fn random_matrix(rng: &mut ChaCha8Rng, binary: bool) -> Vec<Vec<f64>> {
    let k = rng.gen_range(2..=8);
    let n = rng.gen_range(5..=50);
    (0..k)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if binary {
                        f64::from(u8::from(rng.gen_bool(0.4)))
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn alpha_matches_covariance_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let binary = case % 2 == 0;
        let m = random_matrix(&mut rng, binary);
        let mode = if binary {
            AlphaMode::Binary
        } else {
            AlphaMode::Raw
        };
        let got = cronbach_alpha(&m, mode).unwrap();
        let want = covariance_alpha(&m);
        assert!((got - want).abs() < 1e-9, "case {case}: {got} vs {want}");
    }
}

#[test]
fn alpha_documented_cases() {
    let a = vec![1.0, 0.0, 1.0, 0.0];
    let b = vec![0.0, 1.0, 0.0, 1.0];
    assert_eq!(
        cronbach_alpha(&[a.clone(), a.clone()], AlphaMode::Binary).unwrap(),
        1.0
    );
    assert_eq!(cronbach_alpha(&[a, b], AlphaMode::Binary).unwrap(), 0.0);
}

fn binary_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..7, 2usize..25).prop_flat_map(|(k, n)| {
        proptest::collection::vec(
            proptest::collection::vec(prop_oneof![Just(0.0), Just(1.0)], n),
            k,
        )
    })
}

proptest! {
    #[test]
    fn alpha_invariant_under_row_and_column_permutation(m in binary_matrix(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = m.clone();
        rows.shuffle(&mut rng);
        let mut cols: Vec<usize> = (0..m[0].len()).collect();
        cols.shuffle(&mut rng);
        let permuted: Vec<Vec<f64>> = rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        let a = cronbach_alpha(&m, AlphaMode::Binary).unwrap();
        let b = cronbach_alpha(&permuted, AlphaMode::Binary).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn identical_nonconstant_items_give_one(
        item in proptest::collection::vec(prop_oneof![Just(0.0), Just(1.0)], 2..30),
        k in 2usize..8,
    ) {
        prop_assume!(item.iter().any(|&v| v == 1.0) && item.iter().any(|&v| v == 0.0));
        let m = vec![item; k];
        prop_assert!((cronbach_alpha(&m, AlphaMode::Binary).unwrap() - 1.0).abs() < 1e-12);
    }
}

/// Dimension `n` (1-based, canonical order) holds the words `qNa`, `qNb`, `qNc`.
fn three_word_dictionary() -> PtsdDictionary {
    let mut s = String::from("@version 1\n");
    let mut n = 0;
    for (tool, count) in [("DOSPERT", 5), ("BSSS", 6), ("VIAS", 5)] {
        for i in 1..=count {
            n += 1;
            s.push_str(&format!("\n[{tool}:{i}] question {n}\nq{n}a\nq{n}b\nq{n}c\n"));
        }
    }
    parse_dictionary(&s).unwrap()
}

fn week(texts: Vec<String>) -> UserWeek {
    UserWeek::from_normalized("u", NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(), texts)
}

/// Half the segments use all of the planted dimension's words; every segment
/// also carries one random word from another dimension.
fn planted_week(planted: usize, rng: &mut ChaCha8Rng) -> UserWeek {
    let texts = (0..20)
        .map(|s| {
            let mut other = rng.gen_range(1..=QUESTION_COUNT);
            if other == planted {
                other = planted % QUESTION_COUNT + 1;
            }
            let letter = ['a', 'b', 'c'][rng.gen_range(0..3)];
            if s % 2 == 0 {
                format!("i said q{planted}a q{planted}b q{planted}c and q{other}{letter}")
            } else {
                format!("i said q{other}{letter} today")
            }
        })
        .collect();
    week(texts)
}

#[test]
fn planted_dimension_has_the_highest_alpha() {
    let dict = three_word_dictionary();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for planted in 1..=QUESTION_COUNT {
        let w = planted_week(planted, &mut rng);
        for mode in [AlphaMode::Binary, AlphaMode::Raw] {
            let scores = alpha_score_matrix(&w, &dict, mode).scores();
            assert_eq!(scores.len(), QUESTION_COUNT);
            let best = scores
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            assert_eq!(best + 1, planted, "{mode:?}: {scores:?}");
            let runner_up = scores
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != best)
                .map(|(_, s)| *s)
                .fold(0.0, f64::max);
            assert!(scores[best] > runner_up);
        }
    }
}

#[test]
fn empty_week_scores_all_zero() {
    let m = alpha_score_matrix(&week(vec![]), &three_word_dictionary(), AlphaMode::Binary);
    assert_eq!(m.scores(), vec![0.0; QUESTION_COUNT]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_matrix_invariant_under_tweet_reordering(seed in any::<u64>(), planted in 1usize..=QUESTION_COUNT) {
        let dict = three_word_dictionary();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = planted_week(planted, &mut rng);
        let mut shuffled = w.normalized_texts.clone();
        shuffled.shuffle(&mut rng);
        let w2 = week(shuffled);
        for mode in [AlphaMode::Binary, AlphaMode::Raw] {
            prop_assert_eq!(alpha_score_matrix(&w, &dict, mode), alpha_score_matrix(&w2, &dict, mode));
        }
    }
}

fn dospert_scores(first: [f64; 5]) -> AlphaScoreMatrix {
    let mut s = [0.0; QUESTION_COUNT];
    s[..5].copy_from_slice(&first);
    AlphaScoreMatrix::from_scores(s)
}

#[test]
fn fill_survey_examples() {
    let id = Calibration::identity();
    let demo = Tool::Dospert.demographics();

    let full = fill_survey(&dospert_scores([1.0; 5]), &demo, &id);
    assert_eq!((full.answers.clone(), full.total, full.over_threshold), (vec![7; 5], 35, true));

    let none = fill_survey(&dospert_scores([0.0; 5]), &demo, &id);
    assert_eq!((none.total, none.over_threshold), (0, false));

    let edge = fill_survey(&dospert_scores([0.9, 0.9, 0.9, 0.9, 0.5]), &demo, &id);
    assert_eq!(edge.answers, vec![6, 6, 6, 6, 4]);
    assert_eq!(edge.total, 28);
    assert!(!edge.over_threshold);
}

fn fitted_calibration(seed: u64) -> Calibration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..30)
        .flat_map(|_| {
            let scores: [f64; QUESTION_COUNT] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
            let alpha = AlphaScoreMatrix::from_scores(scores);
            Tool::ALL
                .iter()
                .map(|&tool| {
                    let max = tool.demographics().per_question_max();
                    let answers = tool
                        .questions()
                        .map(|q| {
                            let noisy = scores[q.ordinal()] + rng.gen_range(-0.2..0.2);
                            (noisy.clamp(0.0, 1.0) * f64::from(max)).round() as u8
                        })
                        .collect();
                    (alpha.clone(), SurveyResponse::new(tool, answers).unwrap())
                })
                .collect::<Vec<_>>()
        })
        .collect();
    calibrate(&pairs)
}

proptest! {
    #[test]
    fn fill_survey_is_monotone(
        scores in proptest::array::uniform16(0.0f64..=1.0),
        q in 0usize..QUESTION_COUNT,
        bump in 0.0f64..=1.0,
        fitted in any::<bool>(),
    ) {
        let calibration = if fitted { fitted_calibration(3) } else { Calibration::identity() };
        let mut raised = scores;
        raised[q] = (raised[q] + bump).min(1.0);
        let question = all_questions()[q];
        let demo = question.tool.demographics();
        let before = fill_survey(&AlphaScoreMatrix::from_scores(scores), &demo, &calibration);
        let after = fill_survey(&AlphaScoreMatrix::from_scores(raised), &demo, &calibration);
        let i = question.index as usize - 1;
        prop_assert!(after.answers[i] >= before.answers[i]);
        prop_assert!(after.total >= before.total);
        prop_assert_eq!(before.total, before.answers.iter().map(|&a| u32::from(a)).sum::<u32>());
        prop_assert_eq!(before.over_threshold, before.total > demo.threshold);
    }
}

#[test]
fn intensity_truth_table() {
    for mask in 0u8..8 {
        let surveys: Vec<FilledSurvey> = Tool::ALL
            .iter()
            .map(|&tool| {
                let demo = tool.demographics();
                let over = mask & (1 << tool.ordinal()) != 0;
                let total = if over { demo.threshold + 1 } else { demo.threshold };
                FilledSurvey {
                    tool,
                    answers: vec![],
                    total,
                    threshold: demo.threshold,
                    over_threshold: demo.is_over(total),
                }
            })
            .collect();
        let label = classify_intensity(&surveys).unwrap();
        let count = mask.count_ones() as u8;
        let expected = match count {
            0 => IntensityLevel::NoPtsd,
            1 => IntensityLevel::Low,
            2 => IntensityLevel::Moderate,
            _ => IntensityLevel::High,
        };
        assert_eq!(label.level, expected, "mask {mask:03b}");
        assert_eq!(label.surveys_over, count);
        assert_eq!(intensity_score(&label), count);
    }
}

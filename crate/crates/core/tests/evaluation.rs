use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lexsurvey::evaluation::{
    evaluate, generate_synthetic_cohort, learning_curve, run_split, stratified_split,
    write_post_stream, Prediction, SplitSpec, SurveyRunner, SyntheticCohortSpec, Truth,
};
use lexsurvey::scoring::{classify_intensity, FilledSurvey, SurveyResponse, Tool};

fn as_filled(r: &SurveyResponse) -> FilledSurvey {
    let demo = r.tool.demographics();
    FilledSurvey {
        tool: r.tool,
        answers: r.answers.clone(),
        total: r.total(),
        threshold: demo.threshold,
        over_threshold: r.total() > demo.threshold,
    }
}

fn flags(level: u8) -> [bool; 3] {
    [level >= 1, level >= 2, level >= 3]
}

fn aligned(cases: &[(u8, u8)]) -> (Vec<Prediction>, Vec<Truth>) {
    cases
        .iter()
        .enumerate()
        .map(|(i, &(truth, pred))| {
            (
                Prediction {
                    user_id: format!("u{i}"),
                    intensity: pred,
                    over_flags: Some(flags(pred)),
                },
                Truth {
                    user_id: format!("u{i}"),
                    intensity: truth,
                    over_flags: flags(truth),
                },
            )
        })
        .unzip()
}

fn cases() -> impl Strategy<Value = Vec<(u8, u8)>> {
    proptest::collection::vec((0u8..=3, 0u8..=3), 1..40)
}

proptest! {
    #[test]
    fn metrics_match_direct_count(cases in cases()) {
        let (p, t) = aligned(&cases);
        let r = evaluate(&p, &t).unwrap();
        let n = cases.len() as f64;
        let correct = cases.iter().filter(|(a, b)| (*a == 0) == (*b == 0)).count() as f64;
        let sq: f64 = cases.iter().map(|&(a, b)| (f64::from(a) - f64::from(b)).powi(2)).sum();
        prop_assert_eq!(r.n, cases.len());
        prop_assert!((r.accuracy - correct / n).abs() < 1e-12);
        prop_assert!((r.mse - sq / n).abs() < 1e-12);
        prop_assert_eq!(r.mse == 0.0, cases.iter().all(|(a, b)| a == b));
        prop_assert_eq!(r.confusion.iter().flatten().sum::<usize>(), cases.len());
    }

    #[test]
    fn metrics_ignore_user_order(cases in cases(), seed in any::<u64>()) {
        let (p, t) = aligned(&cases);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p2 = p.clone();
        p2.shuffle(&mut rng);
        let mut t2 = t.clone();
        t2.shuffle(&mut rng);
        prop_assert_eq!(evaluate(&p, &t).unwrap(), evaluate(&p2, &t2).unwrap());
    }

    #[test]
    fn accuracy_ignores_which_positive_level_was_predicted(cases in cases(), bump in 1u8..=3) {
        let moved: Vec<(u8, u8)> = cases
            .iter()
            .map(|&(t, p)| (t, if p > 0 { bump } else { 0 }))
            .collect();
        let (p1, t1) = aligned(&cases);
        let (p2, t2) = aligned(&moved);
        prop_assert_eq!(evaluate(&p1, &t1).unwrap().accuracy, evaluate(&p2, &t2).unwrap().accuracy);
    }

    #[test]
    fn split_is_stratified_and_partitions(
        pos in 2usize..60,
        neg in 2usize..60,
        fraction in 0.05f64..0.95,
        seed in any::<u64>(),
    ) {
        let items: Vec<(usize, bool)> = (0..pos + neg).map(|i| (i, i < pos)).collect();
        let spec = SplitSpec { train_fraction: fraction, seed };
        let (train, test) = stratified_split(&items, |x| x.1, &spec).unwrap();
        prop_assert_eq!(train.len() + test.len(), items.len());
        let mut all: Vec<usize> = train.iter().chain(&test).map(|x| x.0).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..pos + neg).collect::<Vec<_>>());
        for (class, count) in [(true, pos), (false, neg)] {
            let k = train.iter().filter(|x| x.1 == class).count();
            prop_assert!(k >= 1 && k < count);
            prop_assert!((k as f64 - count as f64 * fraction).abs() <= 1.0);
        }
        prop_assert!(train.windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(test.windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert_eq!(stratified_split(&items, |x| x.1, &spec).unwrap(), (train, test));
    }
}

#[test]
fn split_of_92_and_118_halves_each_class() {
    let items: Vec<bool> = (0..210).map(|i| i < 92).collect();
    let spec = SplitSpec {
        train_fraction: 0.5,
        seed: 1,
    };
    let (train, _) = stratified_split(&items, |&b| b, &spec).unwrap();
    assert_eq!(train.iter().filter(|&&b| b).count(), 46);
    assert_eq!(train.iter().filter(|&&b| !b).count(), 59);
}

#[test]
fn cohort_is_reproducible_and_self_consistent() {
    let spec = SyntheticCohortSpec {
        n_users: 40,
        seed: 5,
        ..Default::default()
    };
    let stream = |spec: &SyntheticCohortSpec| {
        let mut buf = Vec::new();
        write_post_stream(&mut buf, &generate_synthetic_cohort(spec).unwrap().tweets).unwrap();
        buf
    };
    assert_eq!(stream(&spec), stream(&spec));

    let cohort = generate_synthetic_cohort(&spec).unwrap();
    for user in &cohort.users {
        let surveys: Vec<_> = Tool::ALL
            .iter()
            .map(|&t| as_filled(user.response(t).unwrap()))
            .collect();
        let level = classify_intensity(&surveys).unwrap();
        assert_eq!(Some(level.surveys_over), user.true_intensity());
    }
}

#[test]
fn more_training_data_does_not_hurt_much() {
    let mut report = Vec::new();
    for seed in 0..10 {
        let users = generate_synthetic_cohort(&SyntheticCohortSpec {
            seed: 100 + seed,
            ..Default::default()
        })
        .unwrap()
        .users;
        let curve = learning_curve(&users, &[0.2, 0.8], &mut SurveyRunner::default(), seed).unwrap();
        let (small, large) = (curve[0].result.accuracy, curve[1].result.accuracy);
        report.push((seed, small, large));
        assert!(large >= small - 0.05, "seed {seed}: {small} -> {large}");
    }
    println!("{report:?}");
}

#[test]
fn half_split_curve_point_is_the_single_split() {
    let users = generate_synthetic_cohort(&SyntheticCohortSpec {
        n_users: 50,
        seed: 2,
        ..Default::default()
    })
    .unwrap()
    .users;
    let spec = SplitSpec {
        train_fraction: 0.5,
        seed: 8,
    };
    let single = run_split(&users, &mut SurveyRunner::default(), &spec).unwrap();
    let curve = learning_curve(&users, &[0.5], &mut SurveyRunner::default(), 8).unwrap();
    assert_eq!(curve.len(), 1);
    assert_eq!(curve[0].result, single);
}

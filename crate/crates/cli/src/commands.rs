use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use lexsurvey::baseline::{
    default_lexicons, feature_names, group_comparison, parse_lexicons, rank_features,
    BaselineExample, BaselineModel, CategoryLexicon,
};
use lexsurvey::config::RunConfig;
use lexsurvey::corpus::store::{read_labels, write_labels, write_week_files};
use lexsurvey::corpus::{
    bucket_by_user, eligibility, find_self_identification, parse_post_stream, CohortUser,
    Eligibility, StopwordLanguageId, DEFAULT_SELF_ID_PATTERNS,
};
use lexsurvey::dictionary::{
    build_dictionary, parse_dictionary, serialize_dictionary, PtsdDictionary,
};
use lexsurvey::evaluation::{
    fit_calibration, generate_synthetic_cohort, learning_curve, learning_curve_csv, per_survey_csv,
    run_split, stratified_split, weekly_backtest, weekly_csv, write_post_stream, BaselineRunner,
    SplitSpec, SurveyRunner,
};
use lexsurvey::scoring::{
    alpha_score_matrix, explain_report, report_rows_csv, score_week, AlphaMode, Calibration,
};

use crate::artifacts as art;

/// Resolved configuration plus the output directory.
pub struct Ctx {
    pub cfg: RunConfig,
    pub out: PathBuf,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.cfg.evaluation.train_fraction,
            seed: self.cfg.split_seed(),
        }
    }

    /// Labeled users divided into train and test sides.
    fn split(&self, users: &[CohortUser]) -> Result<(Vec<CohortUser>, Vec<CohortUser>)> {
        let labeled: Vec<CohortUser> = users
            .iter()
            .filter(|u| u.true_over_flags().is_some())
            .cloned()
            .collect();
        if labeled.is_empty() {
            bail!("the corpus has no labeled users; rerun `lexsurvey ingest --labels <file>`");
        }
        Ok(stratified_split(
            &labeled,
            |u| u.true_intensity().unwrap_or(0) > 0,
            &self.split_spec(),
        )?)
    }

    fn dictionary(&self, explicit: Option<&Path>) -> Result<PtsdDictionary> {
        let path = explicit
            .map(Path::to_path_buf)
            .or_else(|| self.cfg.paths.dictionary.clone());
        let path = path.unwrap_or_else(|| self.path(art::DICTIONARY));
        if !path.exists() {
            bail!(
                "{} not found; run `lexsurvey build-dict` first or pass --dict",
                path.display()
            );
        }
        parse_dictionary(&art::read(&path)?).with_context(|| format!("parsing {}", path.display()))
    }

    fn lexicons(&self) -> Result<Vec<CategoryLexicon>> {
        match &self.cfg.paths.lexicons {
            Some(p) => {
                parse_lexicons(&art::read(p)?).with_context(|| format!("parsing {}", p.display()))
            }
            None => Ok(default_lexicons()),
        }
    }
}

pub fn synth(ctx: &Ctx) -> Result<()> {
    let spec = ctx.cfg.synth_spec();
    let cohort = generate_synthetic_cohort(&spec)?;
    let mut posts = Vec::new();
    write_post_stream(&mut posts, &cohort.tweets)?;
    art::write(&ctx.path(art::POSTS), posts)?;
    let mut labels = Vec::new();
    write_labels(&mut labels, &cohort.labels)?;
    art::write(&ctx.path(art::LABELS), labels)?;
    println!("users: {}", cohort.labels.len());
    println!("posts: {}", cohort.tweets.len());
    println!(
        "wrote {} and {}",
        ctx.path(art::POSTS).display(),
        ctx.path(art::LABELS).display()
    );
    Ok(())
}

pub fn ingest(ctx: &Ctx, input: Option<PathBuf>, labels: Option<PathBuf>) -> Result<()> {
    let input = input
        .or_else(|| ctx.cfg.paths.input.clone())
        .unwrap_or_else(|| ctx.path(art::POSTS));
    if !input.is_file() {
        bail!(
            "input {} not found (pass --input, set paths.input, or run `lexsurvey synth`)",
            input.display()
        );
    }
    let labels = labels.or_else(|| ctx.cfg.paths.labels.clone()).or_else(|| {
        let default = ctx.path(art::LABELS);
        default.is_file().then_some(default)
    });
    let label_rows = match &labels {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening labels {}", p.display()))?;
            read_labels(f).with_context(|| format!("reading labels {}", p.display()))?
        }
        None => Vec::new(),
    };

    let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
    let ingested = parse_post_stream(BufReader::new(file), &StopwordLanguageId)
        .with_context(|| format!("reading {}", input.display()))?;

    let (min_tweets, min_english) = (ctx.cfg.ingest.min_tweets, ctx.cfg.ingest.min_english);
    let mut kept = Vec::new();
    let (mut total, mut few, mut foreign, mut self_identified) = (0, 0, 0, 0);
    for (user_id, weeks) in bucket_by_user(&ingested.tweets) {
        total += 1;
        let row = label_rows.iter().find(|r| r.user_id == user_id);
        let raw: Vec<_> = weeks
            .iter()
            .flat_map(|w| w.raw_tweets.iter().cloned())
            .collect();
        let self_id = !find_self_identification(&raw, &DEFAULT_SELF_ID_PATTERNS)?.is_empty();
        let mut user = CohortUser {
            user_id,
            is_veteran: true,
            self_identified_ptsd: self_id || row.is_some_and(|r| r.self_identified),
            survey_responses: row.map(|r| r.responses.clone()),
            weeks,
        };
        match eligibility(&user, min_tweets, min_english) {
            Eligibility::TooFewTweets => few += 1,
            Eligibility::NotEnglish => foreign += 1,
            Eligibility::Eligible => {
                self_identified += usize::from(user.self_identified_ptsd);
                for w in &mut user.weeks {
                    w.raw_tweets.clear();
                }
                kept.push(user);
            }
        }
    }

    let corpus_dir = art::fresh_dir(&ctx.path(art::CORPUS_DIR))?;
    for u in &kept {
        for w in &u.weeks {
            write_week_files(&corpus_dir, w)?;
        }
    }
    art::write(&ctx.path(art::CORPUS), art::json_lines(&kept)?)?;
    art::write(&ctx.path(art::REJECTS), art::json_lines(&ingested.rejects)?)?;
    let labeled = kept.iter().filter(|u| u.survey_responses.is_some()).count();
    let summary = json!({
        "records": ingested.tweets.len(),
        "rejected_lines": ingested.rejects.len(),
        "users": total,
        "kept": kept.len(),
        "labeled": labeled,
        "self_identified": self_identified,
        "dropped": { "min_tweets": few, "min_english": foreign },
        "min_tweets": min_tweets,
        "min_english": min_english,
    });
    art::write(&ctx.path(art::INGEST_SUMMARY), art::json_pretty(&summary)?)?;

    println!("records: {}", ingested.tweets.len());
    println!("rejected lines: {}", ingested.rejects.len());
    println!("users: {total}");
    println!(
        "kept: {} ({labeled} labeled, {self_identified} self-identified)",
        kept.len()
    );
    println!("dropped: {few} (min_tweets)");
    println!("dropped: {foreign} (min_english)");
    Ok(())
}

pub fn build_dict(ctx: &Ctx) -> Result<()> {
    let users = art::read_corpus(&ctx.out)?;
    let (train, _) = ctx.split(&users)?;
    let dict = build_dictionary(&train, &ctx.cfg.builder)?;
    art::write(&ctx.path(art::DICTIONARY), serialize_dictionary(&dict))?;
    let words: usize = dict.dimensions().map(|d| d.patterns().len()).sum();
    println!(
        "trained on {} users; {words} patterns over 16 questions",
        train.len()
    );
    println!("wrote {}", ctx.path(art::DICTIONARY).display());
    Ok(())
}

pub fn score(ctx: &Ctx, dict: Option<&Path>) -> Result<()> {
    let users = art::read_corpus(&ctx.out)?;
    let dict = ctx.dictionary(dict)?;
    let mode = ctx.cfg.scoring.mode;
    let mut records = Vec::new();
    for u in &users {
        for w in &u.weeks {
            let alpha = alpha_score_matrix(w, &dict, mode);
            records.push(json!({
                "user_id": u.user_id,
                "week_start": w.week_start,
                "mode": mode,
                "entries": alpha.entries,
            }));
        }
    }
    art::write(&ctx.path(art::ALPHA_SCORES), art::json_lines(&records)?)?;
    println!("scored {} user-weeks", records.len());
    Ok(())
}

pub fn fill(ctx: &Ctx, dict: Option<&Path>, explain: bool) -> Result<()> {
    let users = art::read_corpus(&ctx.out)?;
    let dict = ctx.dictionary(dict)?;
    let mode: AlphaMode = ctx.cfg.scoring.mode;
    let calibration = if ctx.cfg.scoring.calibration {
        let (train, _) = ctx.split(&users)?;
        fit_calibration(&dict, &train, mode)
    } else {
        Calibration::identity()
    };
    let reports_dir = ctx.path(art::REPORTS_DIR);
    if explain {
        art::fresh_dir(&reports_dir)?;
    }
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for u in &users {
        for w in &u.weeks {
            let scored = score_week(w, &dict, mode, &calibration);
            let report = explain_report(w, &dict, &scored.alpha, &scored.surveys, &scored.label);
            records.push(json!({
                "user_id": u.user_id,
                "week_start": w.week_start,
                "level": scored.label.level,
                "surveys_over": scored.label.surveys_over,
                "surveys": scored.surveys,
            }));
            rows.extend(report.rows());
            if explain {
                let name = format!(
                    "{}_{}.txt",
                    lexsurvey::corpus::store::escape_component(&u.user_id),
                    w.week_start.format("%Y-%m-%d")
                );
                art::write(&reports_dir.join(name), report.to_text())?;
            }
        }
    }
    art::write(&ctx.path(art::CALIBRATION), art::json_pretty(&calibration)?)?;
    art::write(&ctx.path(art::SURVEYS_JSONL), art::json_lines(&records)?)?;
    art::write(&ctx.path(art::SURVEYS_CSV), report_rows_csv(&rows)?)?;
    println!("filled surveys for {} user-weeks", records.len());
    if explain {
        println!(
            "wrote {} reports to {}",
            records.len(),
            reports_dir.display()
        );
    }
    Ok(())
}

fn example(u: &CohortUser) -> BaselineExample {
    BaselineExample {
        texts: u
            .latest_week()
            .map(|w| w.normalized_texts.clone())
            .unwrap_or_default(),
        intensity: u.true_intensity().unwrap_or(0),
    }
}

pub fn baseline(ctx: &Ctx) -> Result<()> {
    let users = art::read_corpus(&ctx.out)?;
    let (train, test) = ctx.split(&users)?;
    let lexicons = ctx.lexicons()?;
    let examples: Vec<BaselineExample> = train.iter().map(example).collect();
    let model = BaselineModel::train(&examples, lexicons.clone(), ctx.cfg.baseline_config())?;
    let dir = art::fresh_dir(&ctx.path(art::BASELINE_DIR))?;

    let mut preds = Vec::new();
    for u in &test {
        let Some(w) = u.latest_week() else { continue };
        let p = model.predict(&w.normalized_texts)?;
        preds.push(json!({
            "user_id": u.user_id,
            "week_start": w.week_start,
            "positive": p.positive,
            "probability": p.probability,
            "intensity": p.intensity,
            "true_intensity": u.true_intensity(),
        }));
    }
    art::write(&dir.join("predictions.jsonl"), art::json_lines(&preds)?)?;

    let labeled: Vec<&CohortUser> = train.iter().chain(&test).collect();
    let texts = |positive: bool| -> Vec<Vec<String>> {
        labeled
            .iter()
            .filter(|u| (u.true_intensity().unwrap_or(0) > 0) == positive)
            .filter_map(|u| u.latest_week().map(|w| w.normalized_texts.clone()))
            .filter(|t| !t.is_empty())
            .collect()
    };
    let comparison = group_comparison(&texts(true), &texts(false), &lexicons)?;
    let mut csv = String::from("category,mean_ptsd,mean_control,u,p_value,significant\n");
    for c in &comparison {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            c.category, c.mean_a, c.mean_b, c.u, c.p_value, c.significant
        );
    }
    art::write(&dir.join("group_comparison.csv"), csv)?;

    let labels: Vec<bool> = examples.iter().map(|e| e.intensity > 0).collect();
    let names = feature_names();
    let mut csv = String::from("rank,feature,fisher_ratio\n");
    for (rank, (j, score)) in rank_features(&model.train_features, &labels)?
        .into_iter()
        .enumerate()
    {
        let _ = writeln!(csv, "{},{},{}", rank + 1, names[j], score);
    }
    art::write(&dir.join("feature_ranking.csv"), csv)?;

    for (name, lm) in [
        ("unigram_positive", &model.lms.unigram.positive),
        ("unigram_negative", &model.lms.unigram.negative),
        ("char_positive", &model.lms.char.positive),
        ("char_negative", &model.lms.char.negative),
    ] {
        art::write(&dir.join("lm").join(format!("{name}.lm")), lm.dump())?;
    }
    for (level, lm) in &model.level_models {
        art::write(
            &dir.join("lm").join(format!("char_level{level}.lm")),
            lm.dump(),
        )?;
    }
    let correct = preds
        .iter()
        .filter(|p| p["positive"].as_bool() == p["true_intensity"].as_u64().map(|t| t > 0))
        .count();
    println!(
        "trained on {} users; {correct}/{} test users classified correctly",
        train.len(),
        preds.len()
    );
    println!("wrote {}", dir.display());
    Ok(())
}

pub fn eval(ctx: &Ctx) -> Result<()> {
    let users = art::read_corpus(&ctx.out)?;
    let spec = ctx.split_spec();
    let fractions = &ctx.cfg.evaluation.fractions;
    let mut survey = SurveyRunner::new(ctx.cfg.survey_config());
    let mut base = BaselineRunner::new(ctx.cfg.baseline_config());
    base.lexicons = ctx.lexicons()?;

    let survey_result = run_split(&users, &mut survey, &spec)?;
    let baseline_result = run_split(&users, &mut base, &spec)?;
    let survey_curve = learning_curve(&users, fractions, &mut survey, spec.seed)?;
    let baseline_curve = learning_curve(&users, fractions, &mut base, spec.seed)?;
    let weekly = weekly_backtest(&users, &mut survey, &ctx.cfg.evaluation.offsets, &spec)?;

    art::write(&ctx.path(art::EVAL), art::json_pretty(&survey_result)?)?;
    art::write(
        &ctx.path(art::BASELINE_EVAL),
        art::json_pretty(&baseline_result)?,
    )?;
    art::write(
        &ctx.path(art::LEARNING_CURVE),
        learning_curve_csv(&survey_curve),
    )?;
    art::write(
        &ctx.path(art::BASELINE_CURVE),
        learning_curve_csv(&baseline_curve),
    )?;
    art::write(&ctx.path(art::WEEKLY), weekly_csv(&weekly))?;
    art::write(&ctx.path(art::PER_SURVEY), per_survey_csv(&survey_result))?;

    println!(
        "survey pipeline: accuracy {:.3}, mse {:.3} (n = {})",
        survey_result.accuracy, survey_result.mse, survey_result.n
    );
    println!(
        "baseline:        accuracy {:.3}, mse {:.3}",
        baseline_result.accuracy, baseline_result.mse
    );
    for (tool, acc) in &survey_result.per_survey_accuracy {
        println!("  {tool} over-threshold accuracy {acc:.3}");
    }
    println!("wrote {}", ctx.path(art::EVAL).display());
    Ok(())
}

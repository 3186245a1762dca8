//! Add-k smoothed unigram-word and character n-gram language models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::words;
use crate::{Error, Result};

pub const BOS: char = '\u{2}';
pub const EOS: char = '\u{3}';
pub const MAX_CHAR_ORDER: usize = 5;
const DUMP_MAGIC: &str = "lexsurvey-lm 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LmKind {
    UnigramWord,
    CharNgram,
}

impl LmKind {
    fn tag(self) -> &'static str {
        match self {
            LmKind::UnigramWord => "unigram",
            LmKind::CharNgram => "char",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    pub kind: LmKind,
    /// 1 for word models.
    pub order: usize,
    pub smoothing: f64,
    /// context -> symbol -> count
    counts: BTreeMap<String, BTreeMap<String, u64>>,
    context_totals: BTreeMap<String, u64>,
    symbols: BTreeSet<String>,
}

/// (context, symbol) events of one text.
fn events(kind: LmKind, order: usize, text: &str) -> Vec<(String, String)> {
    match kind {
        LmKind::UnigramWord => words(text)
            .into_iter()
            .map(|w| (String::new(), w.to_lowercase()))
            .collect(),
        LmKind::CharNgram => {
            let mut chars: Vec<char> = vec![BOS; order - 1];
            chars.extend(text.to_lowercase().chars());
            chars.push(EOS);
            (order - 1..chars.len())
                .map(|i| {
                    (
                        chars[i + 1 - order..i].iter().collect(),
                        chars[i].to_string(),
                    )
                })
                .collect()
        }
    }
}

pub fn train_lm<S: AsRef<str>>(
    corpus: &[S],
    kind: LmKind,
    order: usize,
    smoothing: f64,
) -> Result<LanguageModel> {
    let order = match kind {
        LmKind::UnigramWord => 1,
        LmKind::CharNgram if (1..=MAX_CHAR_ORDER).contains(&order) => order,
        LmKind::CharNgram => {
            return Err(Error::InvalidModel(format!(
                "char order {order} outside 1..={MAX_CHAR_ORDER}"
            )))
        }
    };
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::InvalidModel(format!(
            "smoothing {smoothing} must be finite and >= 0"
        )));
    }
    let mut lm = LanguageModel {
        kind,
        order,
        smoothing,
        counts: BTreeMap::new(),
        context_totals: BTreeMap::new(),
        symbols: BTreeSet::new(),
    };
    for text in corpus {
        for (ctx, sym) in events(kind, order, text.as_ref()) {
            *lm.context_totals.entry(ctx.clone()).or_default() += 1;
            lm.symbols.insert(sym.clone());
            *lm.counts.entry(ctx).or_default().entry(sym).or_default() += 1;
        }
    }
    if lm.symbols.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(lm)
}

impl LanguageModel {
    /// Distinct training symbols plus one unknown-symbol slot.
    pub fn vocab_size(&self) -> usize {
        self.symbols.len() + 1
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(String::as_str)
    }

    /// P(symbol | context); unseen symbols share the unknown slot's mass.
    pub fn prob(&self, context: &str, symbol: &str) -> f64 {
        let c = self
            .counts
            .get(context)
            .and_then(|m| m.get(symbol))
            .copied()
            .unwrap_or(0) as f64;
        let total = self.context_totals.get(context).copied().unwrap_or(0) as f64;
        let v = self.vocab_size() as f64;
        let denom = total + self.smoothing * v;
        if denom == 0.0 {
            return 1.0 / v;
        }
        (c + self.smoothing) / denom
    }

    pub fn log_prob(&self, text: &str) -> f64 {
        events(self.kind, self.order, text)
            .iter()
            .map(|(ctx, sym)| self.prob(ctx, sym).ln())
            .sum()
    }

    /// Text dump with sorted, JSON-escaped keys. [`LanguageModel::load`]
    /// reproduces the model exactly.
    pub fn dump(&self) -> String {
        let q = |s: &str| serde_json::to_string(s).expect("string serializes");
        let mut out = String::new();
        let _ = writeln!(out, "{DUMP_MAGIC}");
        let _ = writeln!(out, "kind {}", self.kind.tag());
        let _ = writeln!(out, "order {}", self.order);
        let _ = writeln!(out, "smoothing {:?}", self.smoothing);
        let _ = writeln!(out, "symbols {}", self.symbols.len());
        for s in &self.symbols {
            let _ = writeln!(out, "{}", q(s));
        }
        let n: usize = self.counts.values().map(BTreeMap::len).sum();
        let _ = writeln!(out, "counts {n}");
        for (ctx, m) in &self.counts {
            for (sym, c) in m {
                let _ = writeln!(out, "{}\t{}\t{c}", q(ctx), q(sym));
            }
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidModel(m.to_string());
        let mut lines = text.lines();
        let mut next = || lines.next().ok_or_else(|| bad("truncated model dump"));
        if next()? != DUMP_MAGIC {
            return Err(bad("not a model dump"));
        }
        let field = |line: &str, key: &str| -> Result<String> {
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidModel(format!("expected {key}")))
        };
        let kind = match field(next()?, "kind")?.as_str() {
            "unigram" => LmKind::UnigramWord,
            "char" => LmKind::CharNgram,
            other => return Err(Error::InvalidModel(format!("unknown kind {other}"))),
        };
        let order: usize = field(next()?, "order")?
            .parse()
            .map_err(|_| bad("bad order"))?;
        let smoothing: f64 = field(next()?, "smoothing")?
            .parse()
            .map_err(|_| bad("bad smoothing"))?;
        let n_sym: usize = field(next()?, "symbols")?
            .parse()
            .map_err(|_| bad("bad symbol count"))?;
        let unq = |s: &str| {
            serde_json::from_str::<String>(s)
                .map_err(|_| Error::InvalidModel(format!("bad key {s}")))
        };
        let mut symbols = BTreeSet::new();
        for _ in 0..n_sym {
            symbols.insert(unq(next()?)?);
        }
        let n_counts: usize = field(next()?, "counts")?
            .parse()
            .map_err(|_| bad("bad count total"))?;
        let mut counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        let mut context_totals: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..n_counts {
            let line = next()?;
            let mut parts = line.split('\t');
            let (Some(ctx), Some(sym), Some(c), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad("bad count line"));
            };
            let (ctx, sym) = (unq(ctx)?, unq(sym)?);
            let c: u64 = c.parse().map_err(|_| bad("bad count"))?;
            *context_totals.entry(ctx.clone()).or_default() += c;
            counts.entry(ctx).or_default().insert(sym, c);
        }
        Ok(Self {
            kind,
            order,
            smoothing,
            counts,
            context_totals,
            symbols,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmPair {
    pub positive: LanguageModel,
    pub negative: LanguageModel,
}

impl LmPair {
    pub fn new(positive: LanguageModel, negative: LanguageModel) -> Result<Self> {
        if positive.kind != negative.kind || positive.order != negative.order {
            return Err(Error::InvalidModel(
                "paired models differ in kind or order".into(),
            ));
        }
        Ok(Self { positive, negative })
    }

    pub fn log_ratio(&self, text: &str) -> f64 {
        self.positive.log_prob(text) - self.negative.log_prob(text)
    }

    /// Positive iff the ratio exceeds 1.
    pub fn is_positive(&self, text: &str) -> bool {
        self.log_ratio(text) > 0.0
    }
}

/// lm+(t) / lm-(t), computed in log space.
pub fn score_ratio(pair: &LmPair, text: &str) -> f64 {
    pair.log_ratio(text).exp()
}

/// Index of the model with the highest log-probability; lowest index on ties.
pub fn classify_multiclass(models: &[LanguageModel], text: &str) -> Result<usize> {
    if models.len() < 2 {
        return Err(Error::InvalidModel(format!(
            "need at least 2 models, got {}",
            models.len()
        )));
    }
    if models
        .iter()
        .any(|m| m.kind != models[0].kind || m.order != models[0].order)
    {
        return Err(Error::InvalidModel("models differ in kind or order".into()));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, m) in models.iter().enumerate() {
        let lp = m.log_prob(text);
        if lp > best.1 {
            best = (i, lp);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn char_bigram_hand_count() {
        let lm = train_lm(&["ab"], LmKind::CharNgram, 2, 1.0).unwrap();
        // predicted symbols a, b, EOS plus the unknown slot
        assert_eq!(lm.vocab_size(), 4);
        assert!((lm.prob("a", "b") - 2.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn unigram_unsmoothed() {
        let lm = train_lm(&["a a b"], LmKind::UnigramWord, 1, 0.0).unwrap();
        assert!((lm.prob("", "a") - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn distributions_normalize() {
        let lm = train_lm(&["the cat sat", "on the mat"], LmKind::CharNgram, 3, 0.1).unwrap();
        for ctx in ["th", "at", "zz", "\u{2}\u{2}"] {
            let sum: f64 =
                lm.symbols().map(|s| lm.prob(ctx, s)).sum::<f64>() + lm.prob(ctx, "\u{1F600}");
            assert!((sum - 1.0).abs() < 1e-9, "{ctx:?}: {sum}");
        }
        let uni = train_lm(&["a a b c"], LmKind::UnigramWord, 1, 0.1).unwrap();
        let sum: f64 = uni.symbols().map(|s| uni.prob("", s)).sum::<f64>() + uni.prob("", "unseen");
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            train_lm::<&str>(&[], LmKind::UnigramWord, 1, 0.1),
            Err(Error::EmptyCorpus)
        ));
        assert!(train_lm(&["x"], LmKind::CharNgram, 6, 0.1).is_err());
        assert!(train_lm(&["x"], LmKind::CharNgram, 0, 0.1).is_err());
    }

    #[test]
    fn identical_models_ratio_one() {
        let lm = train_lm(&["some text here"], LmKind::CharNgram, 3, 0.1).unwrap();
        let pair = LmPair::new(lm.clone(), lm).unwrap();
        for t in ["anything", "some text", "zzz"] {
            assert_eq!(score_ratio(&pair, t), 1.0);
        }
    }

    #[test]
    fn disjoint_vocab_ratio() {
        let pos = train_lm(&["apple banana cherry"], LmKind::UnigramWord, 1, 0.1).unwrap();
        let neg = train_lm(&["river stone cloud"], LmKind::UnigramWord, 1, 0.1).unwrap();
        let pair = LmPair::new(pos, neg).unwrap();
        assert!(score_ratio(&pair, "banana apple") > 1.0);
        assert!(score_ratio(&pair, "stone") < 1.0);
    }

    #[test]
    fn multiclass() {
        let a = train_lm(&["red green blue"], LmKind::UnigramWord, 1, 0.1).unwrap();
        let b = train_lm(&["cat dog bird"], LmKind::UnigramWord, 1, 0.1).unwrap();
        let c = train_lm(&["oak pine elm"], LmKind::UnigramWord, 1, 0.1).unwrap();
        assert_eq!(
            classify_multiclass(&[a.clone(), b.clone(), c.clone()], "pine elm oak").unwrap(),
            2
        );
        assert_eq!(
            classify_multiclass(&[a.clone(), a.clone()], "cat").unwrap(),
            0
        );
        assert_eq!(classify_multiclass(&[a.clone(), b], "dog").unwrap(), 1);
        assert!(classify_multiclass(&[a], "x").is_err());
    }

    #[test]
    fn long_text_no_overflow() {
        let pos = train_lm(&["aaaa"], LmKind::CharNgram, 3, 0.1).unwrap();
        let neg = train_lm(&["bbbb"], LmKind::CharNgram, 3, 0.1).unwrap();
        let pair = LmPair::new(pos, neg).unwrap();
        let text = "a".repeat(10_000);
        assert!(pair.log_ratio(&text).is_finite());
        assert!(pair.is_positive(&text));
    }

    #[test]
    fn dump_roundtrip() {
        let lm = train_lm(&["tab\there \"q\"", "ünï\ncode"], LmKind::CharNgram, 3, 0.1).unwrap();
        let text = lm.dump();
        let back = LanguageModel::load(&text).unwrap();
        assert_eq!(back, lm);
        assert_eq!(back.dump(), text);
    }

    proptest! {
        #[test]
        fn ratio_sign_matches_log_space(t in "[a-e ]{1,40}") {
            let pos = train_lm(&["abc abc ab"], LmKind::CharNgram, 3, 0.1).unwrap();
            let neg = train_lm(&["de ed dee"], LmKind::CharNgram, 3, 0.1).unwrap();
            let pair = LmPair::new(pos.clone(), neg.clone()).unwrap();
            let positive = score_ratio(&pair, &t) > 1.0;
            prop_assert_eq!(positive, pos.log_prob(&t) > neg.log_prob(&t));
            let idx = classify_multiclass(&[neg, pos], &t).unwrap();
            prop_assert_eq!(idx == 1, positive);
        }
    }
}

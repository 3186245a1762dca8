//! The language-model and category-proportion baseline classifier.

mod features;
mod lexicon;
mod lm;
mod loglinear;
mod pipeline;

pub use features::{
    category_proportions, fisher_ratio, group_comparison, mann_whitney_u, rank_features,
    CategoryComparison, MannWhitney, SIGNIFICANCE_LEVEL,
};
pub use lexicon::{
    default_lexicons, parse_lexicons, serialize_lexicons, CategoryLexicon, CATEGORY_NAMES,
    DEFAULT_LEXICONS,
};
pub use lm::{
    classify_multiclass, score_ratio, train_lm, LanguageModel, LmKind, LmPair, BOS, EOS,
    MAX_CHAR_ORDER,
};
pub use loglinear::{
    loss_and_gradient, train_loglinear, train_loglinear_with_history, LoglinearConfig,
    LoglinearModel,
};
pub use pipeline::{
    feature_names, BaselineConfig, BaselineExample, BaselineModel, BaselinePrediction, LmPairs,
    FEATURE_COUNT,
};

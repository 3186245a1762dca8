//! Stratified train/test splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

/// Split so each class contributes `round(n_c * fraction)` items to train,
/// keeping at least one per class on each side. Both halves keep the input
/// order.
pub fn stratified_split<T: Clone>(
    items: &[T],
    label: impl Fn(&T) -> bool,
    spec: &SplitSpec,
) -> Result<(Vec<T>, Vec<T>)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Split(format!(
            "train fraction {} outside (0, 1)",
            spec.train_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut in_train = vec![false; items.len()];
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..items.len())
            .filter(|&i| label(&items[i]) == class)
            .collect();
        if idx.len() < 2 {
            return Err(Error::Split(format!(
                "class {} has {} item(s); need at least 2",
                if class { "positive" } else { "negative" },
                idx.len()
            )));
        }
        let k = ((idx.len() as f64 * spec.train_fraction).round() as usize).clamp(1, idx.len() - 1);
        idx.shuffle(&mut rng);
        for &i in &idx[..k] {
            in_train[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (item, &t) in items.iter().zip(&in_train) {
        if t {
            train.push(item.clone())
        } else {
            test.push(item.clone())
        }
    }
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cohort(pos: usize, neg: usize) -> Vec<(usize, bool)> {
        (0..pos)
            .map(|i| (i, true))
            .chain((0..neg).map(|i| (pos + i, false)))
            .collect()
    }

    #[test]
    fn ten_and_ten() {
        let (train, test) = stratified_split(
            &cohort(10, 10),
            |x| x.1,
            &SplitSpec {
                train_fraction: 0.5,
                seed: 1,
            },
        )
        .unwrap();
        assert_eq!(train.iter().filter(|x| x.1).count(), 5);
        assert_eq!(train.len(), 10);
        assert_eq!(test.len(), 10);
    }

    #[test]
    fn class_counts_92_118() {
        let (train, _) = stratified_split(
            &cohort(92, 118),
            |x| x.1,
            &SplitSpec {
                train_fraction: 0.5,
                seed: 9,
            },
        )
        .unwrap();
        assert_eq!(train.iter().filter(|x| x.1).count(), 46);
        assert_eq!(train.iter().filter(|x| !x.1).count(), 59);
    }

    #[test]
    fn deterministic_and_errors() {
        let items = cohort(7, 9);
        let spec = SplitSpec {
            train_fraction: 0.3,
            seed: 5,
        };
        assert_eq!(
            stratified_split(&items, |x| x.1, &spec).unwrap(),
            stratified_split(&items, |x| x.1, &spec).unwrap()
        );
        assert!(stratified_split(&cohort(1, 9), |x| x.1, &spec).is_err());
        assert!(stratified_split(
            &items,
            |x| x.1,
            &SplitSpec {
                train_fraction: 1.0,
                seed: 0
            }
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn proportions_within_one(pos in 2usize..60, neg in 2usize..60, f in 0.05f64..0.95, seed in any::<u64>()) {
            let items = cohort(pos, neg);
            let (train, test) = stratified_split(&items, |x| x.1, &SplitSpec { train_fraction: f, seed }).unwrap();
            prop_assert_eq!(train.len() + test.len(), items.len());
            let tp = train.iter().filter(|x| x.1).count() as f64;
            prop_assert!((tp - pos as f64 * f).abs() <= 1.0);
            prop_assert!(train.iter().any(|x| x.1) && train.iter().any(|x| !x.1));
            prop_assert!(test.iter().any(|x| x.1) && test.iter().any(|x| !x.1));
            prop_assert!(train.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}

//! L2-regularized binary logistic regression trained by stochastic
//! variance-reduced gradient descent (SVRG).
//!
//! SVRG converges to the exact regularized optimum rather than a noise ball,
//! so the fitted model depends on the data distribution and not on how many
//! copies of each example there are or which seed drew the minibatches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoglinearConfig {
    pub learning_rate: f64,
    /// Outer SVRG iterations (one full-gradient snapshot each).
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for LoglinearConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            epochs: 100,
            l2: 1e-2,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoglinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LoglinearModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision(x) > 0.0
    }
}

/// Mean logistic loss plus `l2/2 * |w|^2` (bias unpenalized), and its
/// gradient with respect to the weights and the bias.
pub fn loss_and_gradient(
    model: &LoglinearModel,
    x: &[Vec<f64>],
    y: &[bool],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; model.weights.len()];
    let mut gb = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z = model.decision(xi);
        loss += softplus(z) - if yi { z } else { 0.0 };
        let r = sigmoid(z) - f64::from(u8::from(yi));
        for (g, v) in gw.iter_mut().zip(xi) {
            *g += r * v;
        }
        gb += r;
    }
    loss /= n;
    gb /= n;
    for (g, w) in gw.iter_mut().zip(&model.weights) {
        *g = *g / n + l2 * w;
    }
    loss += 0.5 * l2 * dot(&model.weights, &model.weights);
    (loss, gw, gb)
}

fn check_inputs(x: &[Vec<f64>], y: &[bool]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Training(
            "features and labels differ in length".into(),
        ));
    }
    if x.len() < 2 {
        return Err(Error::Training(format!(
            "need at least 2 examples, got {}",
            x.len()
        )));
    }
    let dim = x[0].len();
    if x.iter()
        .any(|r| r.len() != dim || r.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::Training("ragged or non-finite feature rows".into()));
    }
    if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
        return Err(Error::Training("single-class training data".into()));
    }
    Ok(dim)
}

pub fn train_loglinear(
    x: &[Vec<f64>],
    y: &[bool],
    config: &LoglinearConfig,
) -> Result<LoglinearModel> {
    train_loglinear_with_history(x, y, config).map(|(m, _)| m)
}

/// Train and return the training loss after each epoch. The loss sequence is
/// non-increasing: an epoch that would raise it is discarded.
pub fn train_loglinear_with_history(
    x: &[Vec<f64>],
    y: &[bool],
    config: &LoglinearConfig,
) -> Result<(LoglinearModel, Vec<f64>)> {
    let dim = check_inputs(x, y)?;
    if !(config.learning_rate > 0.0 && config.l2 >= 0.0) {
        return Err(Error::Training(
            "learning rate must be > 0 and l2 >= 0".into(),
        ));
    }
    let n = x.len();
    // Keep the step below 1/(4L) for the per-example smoothness constant L.
    let max_sq = x.iter().map(|r| dot(r, r) + 1.0).fold(0.0, f64::max);
    let smooth = 0.25 * max_sq + config.l2;
    let eta = config.learning_rate.min(0.25 / smooth);
    let inner = if config.l2 > 0.0 {
        ((1.0 / (eta * config.l2)).ceil() as usize).max(2 * n)
    } else {
        2 * n
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = LoglinearModel {
        weights: vec![0.0; dim],
        bias: 0.0,
    };
    let (mut loss, mut full_w, mut full_b) = loss_and_gradient(&model, x, y, config.l2);
    let mut history = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let snapshot = model.clone();
        let mut w = model.clone();
        for _ in 0..inner {
            let i = rng.gen_range(0..n);
            let label = f64::from(u8::from(y[i]));
            let r_now = sigmoid(w.decision(&x[i])) - label;
            let r_snap = sigmoid(snapshot.decision(&x[i])) - label;
            let dr = r_now - r_snap;
            for j in 0..dim {
                let g = dr * x[i][j] + config.l2 * (w.weights[j] - snapshot.weights[j]) + full_w[j];
                w.weights[j] -= eta * g;
            }
            w.bias -= eta * (dr + full_b);
        }
        let (new_loss, gw, gb) = loss_and_gradient(&w, x, y, config.l2);
        if new_loss.is_finite() && new_loss <= loss {
            model = w;
            loss = new_loss;
            full_w = gw;
            full_b = gb;
        }
        history.push(loss);
    }
    if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
        return Err(Error::Training("training diverged".into()));
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..10 {
            let t = i as f64 / 10.0;
            x.push(vec![1.0 + t, 1.0 - t]);
            y.push(true);
            x.push(vec![-1.0 - t, -0.5 + t]);
            y.push(false);
        }
        (x, y)
    }

    #[test]
    fn separable_fixture_fits() {
        let (x, y) = separable();
        let m = train_loglinear(&x, &y, &LoglinearConfig::default()).unwrap();
        assert!(x.iter().zip(&y).all(|(xi, &yi)| m.predict(xi) == yi));
    }

    #[test]
    fn loss_non_increasing() {
        let (x, y) = separable();
        let (_, hist) = train_loglinear_with_history(&x, &y, &LoglinearConfig::default()).unwrap();
        assert!(hist.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(train_loglinear(&x, &[true, true], &LoglinearConfig::default()).is_err());
        assert!(train_loglinear(&x[..1], &[true], &LoglinearConfig::default()).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let (x, y) = separable();
        let cfg = LoglinearConfig::default();
        assert_eq!(
            train_loglinear(&x, &y, &cfg).unwrap(),
            train_loglinear(&x, &y, &cfg).unwrap()
        );
    }

    #[test]
    fn duplicated_data_same_direction() {
        // overlapping classes so the optimum is interior
        let x: Vec<Vec<f64>> = (0..24)
            .map(|i| vec![(i % 7) as f64 / 3.0 - 1.0, (i % 5) as f64 / 2.0 - 1.0])
            .collect();
        let y: Vec<bool> = (0..24).map(|i| (i * 7 + 3) % 11 < 5).collect();
        let cfg = LoglinearConfig::default();
        let a = train_loglinear(&x, &y, &cfg).unwrap();
        let xx: Vec<Vec<f64>> = x.iter().chain(&x).cloned().collect();
        let yy: Vec<bool> = y.iter().chain(&y).copied().collect();
        let b = train_loglinear(&xx, &yy, &cfg).unwrap();
        let unit = |m: &LoglinearModel| {
            let norm = dot(&m.weights, &m.weights).sqrt();
            m.weights.iter().map(|w| w / norm).collect::<Vec<_>>()
        };
        for (p, q) in unit(&a).iter().zip(unit(&b)) {
            assert!((p - q).abs() < 1e-6, "{a:?} vs {b:?}");
        }
    }
}

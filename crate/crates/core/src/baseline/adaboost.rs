use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::tree::{check_both_classes, check_xy, grow, TreeConfig, TreeNode};
use crate::error::{Error, Result};

/// Vote weight given to a stump with zero weighted error.
const PERFECT_ALPHA: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub tree: TreeNode,
    pub alpha: f64,
    /// Weighted training error under the round's sample weights.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    pub stumps: Vec<Stump>,
    /// Sum of the sample weights after each round.
    pub weight_sums: Vec<f64>,
}

impl AdaBoost {
    /// Sign of the weighted vote; a zero score goes to class 0.
    pub fn predict(&self, x: &Array2<f64>) -> Vec<usize> {
        let mut score = vec![0.0; x.nrows()];
        for s in &self.stumps {
            for (acc, p) in score.iter_mut().zip(s.tree.predict(x)) {
                *acc += if p == 1 { s.alpha } else { -s.alpha };
            }
        }
        score.into_iter().map(|v| usize::from(v > 0.0)).collect()
    }
}

/// Discrete two-class boosting over depth-1 trees. Stops early once a
/// round's best stump is perfect or no better than chance.
pub fn train_adaboost(x: &Array2<f64>, y: &[usize], n_rounds: usize) -> Result<AdaBoost> {
    if n_rounds == 0 {
        return Err(Error::EmptyEnsemble);
    }
    check_xy(x, y)?;
    check_both_classes(y)?;
    let n = y.len();
    let rows: Vec<usize> = (0..n).collect();
    let cfg = TreeConfig {
        max_depth: Some(1),
        min_leaf: 1,
        features_per_split: None,
    };
    let mut w = vec![1.0 / n as f64; n];
    let mut model = AdaBoost {
        stumps: Vec::new(),
        weight_sums: Vec::new(),
    };
    for _ in 0..n_rounds {
        let tree = grow(x, y, &w, &rows, &cfg, None);
        let pred = tree.predict(x);
        let error: f64 = (0..n).filter(|&i| pred[i] != y[i]).map(|i| w[i]).sum();
        if error >= 0.5 {
            break;
        }
        if error <= 0.0 {
            model.stumps.push(Stump {
                tree,
                alpha: PERFECT_ALPHA,
                error,
            });
            model.weight_sums.push(w.iter().sum());
            break;
        }
        let alpha = 0.5 * ((1.0 - error) / error).ln();
        for i in 0..n {
            let agree = if pred[i] == y[i] { 1.0 } else { -1.0 };
            w[i] *= (-alpha * agree).exp();
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        model.stumps.push(Stump { tree, alpha, error });
        model.weight_sums.push(w.iter().sum());
    }
    if model.stumps.is_empty() {
        return Err(Error::DegenerateInput("no stump beats chance".into()));
    }
    Ok(model)
}

use ndarray::Array2;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{check_both_classes, check_xy, grow, TreeConfig, TreeNode};
use crate::error::{Error, Result};
use crate::rng::{derive, seeded};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features examined per split; `None` means `ceil(sqrt(p))`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            features_per_split: None,
            bootstrap: true,
            max_depth: None,
            min_leaf: 1,
            seed: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<TreeNode>,
}

impl RandomForest {
    /// Majority vote; an even split goes to class 0.
    pub fn predict(&self, x: &Array2<f64>) -> Vec<usize> {
        let mut votes = vec![0usize; x.nrows()];
        for tree in &self.trees {
            for (v, p) in votes.iter_mut().zip(tree.predict(x)) {
                *v += p;
            }
        }
        votes.into_iter().map(|v| usize::from(2 * v > self.trees.len())).collect()
    }
}

pub fn train_random_forest(x: &Array2<f64>, y: &[usize], cfg: &ForestConfig) -> Result<RandomForest> {
    check_xy(x, y)?;
    check_both_classes(y)?;
    if cfg.n_trees == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let p = x.ncols();
    let per_split = cfg
        .features_per_split
        .unwrap_or_else(|| ((p as f64).sqrt().ceil() as usize).max(1))
        .min(p);
    let tree_cfg = TreeConfig {
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf.max(1),
        features_per_split: Some(per_split),
    };
    let n = y.len();
    let weights = vec![1.0; n];
    let trees = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(derive(cfg.seed, t as u64));
            let rows: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(x, y, &weights, &rows, &tree_cfg, Some(&mut rng))
        })
        .collect();
    Ok(RandomForest { trees })
}

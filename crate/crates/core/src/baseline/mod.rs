//! Feature-only classifiers that ignore graph structure: each occupation is
//! its document vector followed by its skills' vectors, zero-padded.

mod adaboost;
mod forest;
mod tree;

use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{self, MetricsRow};
use crate::graph::BipartiteGraph;

pub use adaboost::{train_adaboost, AdaBoost, Stump};
pub use forest::{train_random_forest, ForestConfig, RandomForest};
pub use tree::{gini, train_decision_tree, TreeConfig, TreeNode};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    /// Occupation index of each row.
    pub occupations: Vec<usize>,
    pub rows: Array2<f64>,
    pub dim: usize,
    pub max_skills: usize,
}

/// One row per entry of `occupations`: `docs[o]`, then the feature vector of
/// each linked skill in ascending skill id order, then zeros up to
/// `dim · (1 + max_skills)` where `max_skills` is the largest occupation
/// degree in the graph.
pub fn build_feature_matrix(
    graph: &BipartiteGraph,
    docs: &Array2<f64>,
    skills: &Array2<f64>,
    occupations: &[usize],
) -> Result<FeatureMatrix> {
    let dim = docs.ncols();
    if skills.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: skills.ncols(),
        });
    }
    if docs.nrows() != graph.num_occupations() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_occupations(),
            found: docs.nrows(),
        });
    }
    if skills.nrows() != graph.num_skills() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_skills(),
            found: skills.nrows(),
        });
    }
    let max_skills = (0..graph.num_occupations())
        .map(|o| graph.occupation_skills(o).len())
        .max()
        .unwrap_or(0);
    let mut rows = Array2::zeros((occupations.len(), dim * (1 + max_skills)));
    for (i, &o) in occupations.iter().enumerate() {
        if o >= graph.num_occupations() {
            return Err(Error::InvalidNode(format!("occupation {o}")));
        }
        rows.slice_mut(s![i, ..dim]).assign(&docs.row(o));
        // Skill indices are already in ascending skill id order.
        for (k, &sk) in graph.occupation_skills(o).iter().enumerate() {
            let start = dim * (1 + k);
            rows.slice_mut(s![i, start..start + dim]).assign(&skills.row(sk));
        }
    }
    Ok(FeatureMatrix {
        occupations: occupations.to_vec(),
        rows,
        dim,
        max_skills,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub tree_max_depth: usize,
    pub forest_trees: usize,
    pub adaboost_rounds: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            tree_max_depth: 10,
            forest_trees: 100,
            adaboost_rounds: 100,
        }
    }
}

pub const DECISION_TREE: &str = "DecisionTree";
pub const RANDOM_FOREST: &str = "RandomForest";
pub const ADABOOST: &str = "AdaBoost";

/// Fits all three baselines on the training rows and scores them on the test rows.
pub fn run_baselines(
    train_x: &Array2<f64>,
    train_y: &[usize],
    test_x: &Array2<f64>,
    test_y: &[usize],
    cfg: &BaselineConfig,
    seed: u64,
) -> Result<Vec<MetricsRow>> {
    let score = |model: &str, preds: Vec<usize>| -> Result<MetricsRow> {
        Ok(MetricsRow {
            model: model.to_string(),
            metrics: eval::metrics(&eval::confusion(&preds, test_y)?),
            seed,
        })
    };
    let tree = train_decision_tree(train_x, train_y, Some(cfg.tree_max_depth), 1)?;
    let forest = train_random_forest(
        train_x,
        train_y,
        &ForestConfig {
            n_trees: cfg.forest_trees,
            seed,
            ..ForestConfig::default()
        },
    )?;
    let boost = train_adaboost(train_x, train_y, cfg.adaboost_rounds)?;
    Ok(vec![
        score(DECISION_TREE, tree.predict(test_x))?,
        score(RANDOM_FOREST, forest.predict(test_x))?,
        score(ADABOOST, boost.predict(test_x))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    /// Occupation 0 links 3 skills, occupation 1 links all 35.
    fn graph() -> BipartiteGraph {
        let mut edges = vec![(0, 4), (0, 9), (0, 20)];
        edges.extend((0..35).map(|s| (1, s)));
        BipartiteGraph::from_parts(
            vec!["11-0000.00".into(), "11-0001.00".into()],
            (0..35).map(|i| format!("s{i:02}")).collect(),
            edges,
            Array2::zeros((2, 1)),
            Array2::zeros((35, 1)),
        )
        .unwrap()
    }

    #[test]
    fn padding_width_and_layout() {
        let g = graph();
        let d = 200;
        let docs = Array2::from_shape_fn((2, d), |(i, j)| 1.0 + i as f64 + j as f64);
        let skills = Array2::from_shape_fn((35, d), |(i, _)| 100.0 + i as f64);
        let fm = build_feature_matrix(&g, &docs, &skills, &[0, 1]).unwrap();
        assert_eq!(fm.max_skills, 35);
        assert_eq!(fm.rows.ncols(), 7200);
        let row0 = fm.rows.row(0);
        assert_eq!(row0.slice(s![..d]), docs.row(0));
        assert!(row0.slice(s![d..2 * d]).iter().all(|&v| v == 104.0));
        assert!(row0.slice(s![2 * d..3 * d]).iter().all(|&v| v == 109.0));
        assert!(row0.slice(s![3 * d..4 * d]).iter().all(|&v| v == 120.0));
        let trailing = row0.slice(s![4 * d..]);
        assert_eq!(trailing.len(), 200 * 32);
        assert!(trailing.iter().all(|&v| v == 0.0));
        // The fully linked occupation has no padding.
        assert!(fm.rows.row(1).iter().all(|&v| v != 0.0));
    }

    #[test]
    fn identical_inputs_give_identical_rows() {
        let g = BipartiteGraph::from_parts(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![(0, 0), (1, 0), (1, 1), (0, 1)],
            Array2::zeros((2, 1)),
            Array2::zeros((2, 1)),
        )
        .unwrap();
        let docs = Array2::ones((2, 3));
        let skills = Array2::from_shape_fn((2, 3), |(i, j)| (i * 3 + j) as f64);
        let fm = build_feature_matrix(&g, &docs, &skills, &[0, 1]).unwrap();
        assert_eq!(fm.rows.row(0), fm.rows.row(1));
    }

    #[test]
    fn dimension_mismatch() {
        let g = graph();
        let docs = Array2::zeros((2, 4));
        let skills = Array2::zeros((35, 3));
        assert!(matches!(
            build_feature_matrix(&g, &docs, &skills, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}

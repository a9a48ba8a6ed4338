use ndarray::{Array2, ArrayView1};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        class: usize,
        /// Normalized class weights `[p(0), p(1)]` of the training rows here.
        distribution: [f64; 2],
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { class, .. } => return *class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if row[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn predict(&self, x: &Array2<f64>) -> Vec<usize> {
        x.rows().into_iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn num_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.num_leaves() + right.num_leaves(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features examined per split; `None` examines all of them.
    pub features_per_split: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: Some(10),
            min_leaf: 1,
            features_per_split: None,
        }
    }
}

pub fn gini(w0: f64, w1: f64) -> f64 {
    let total = w0 + w1;
    if total <= 0.0 {
        return 0.0;
    }
    let (p0, p1) = (w0 / total, w1 / total);
    1.0 - p0 * p0 - p1 * p1
}

pub(crate) fn check_xy(x: &Array2<f64>, y: &[usize]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch(x.nrows(), y.len()));
    }
    if y.iter().any(|&c| c > 1) {
        return Err(Error::DegenerateInput("classes must be 0 or 1".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("features must be finite".into()));
    }
    Ok(())
}

pub(crate) fn check_both_classes(y: &[usize]) -> Result<()> {
    if y.len() < 2 {
        return Err(Error::DegenerateInput(format!("need at least 2 rows, got {}", y.len())));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(Error::DegenerateInput("only one class present".into()));
    }
    Ok(())
}

/// CART with Gini impurity over unweighted rows.
pub fn train_decision_tree(x: &Array2<f64>, y: &[usize], max_depth: Option<usize>, min_leaf: usize) -> Result<TreeNode> {
    check_xy(x, y)?;
    check_both_classes(y)?;
    let cfg = TreeConfig {
        max_depth,
        min_leaf: min_leaf.max(1),
        features_per_split: None,
    };
    let weights = vec![1.0; y.len()];
    let rows: Vec<usize> = (0..y.len()).collect();
    Ok(grow(x, y, &weights, &rows, &cfg, None))
}

/// Grows a tree on `rows` (repeats allowed) with per-row weights.
/// Feature subsampling draws from `rng` when `cfg.features_per_split` is set.
pub(crate) fn grow(
    x: &Array2<f64>,
    y: &[usize],
    weights: &[f64],
    rows: &[usize],
    cfg: &TreeConfig,
    mut rng: Option<&mut Rng>,
) -> TreeNode {
    let mut builder = Builder {
        x,
        y,
        weights,
        cfg,
        order: (0..x.ncols()).collect(),
    };
    builder.node(rows.to_vec(), 0, &mut rng)
}

struct Builder<'a> {
    x: &'a Array2<f64>,
    y: &'a [usize],
    weights: &'a [f64],
    cfg: &'a TreeConfig,
    order: Vec<usize>,
}

struct Candidate {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn class_weights(&self, rows: &[usize]) -> [f64; 2] {
        let mut w = [0.0; 2];
        for &r in rows {
            w[self.y[r]] += self.weights[r];
        }
        w
    }

    fn leaf(&self, w: [f64; 2]) -> TreeNode {
        let total = w[0] + w[1];
        let distribution = if total > 0.0 {
            [w[0] / total, w[1] / total]
        } else {
            [0.5, 0.5]
        };
        TreeNode::Leaf {
            class: usize::from(w[1] > w[0]),
            distribution,
        }
    }

    fn node(&mut self, rows: Vec<usize>, depth: usize, rng: &mut Option<&mut Rng>) -> TreeNode {
        let w = self.class_weights(&rows);
        let pure = w[0] <= 0.0 || w[1] <= 0.0;
        let depth_left = self.cfg.max_depth.is_none_or(|d| depth < d);
        if pure || !depth_left || rows.len() < 2 * self.cfg.min_leaf {
            return self.leaf(w);
        }
        let Some(best) = self.best_split(&rows, w, rng) else {
            return self.leaf(w);
        };
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x[[r, best.feature]] <= best.threshold);
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.node(left, depth + 1, rng)),
            right: Box::new(self.node(right, depth + 1, rng)),
        }
    }

    /// Lowest weighted child impurity; ties go to the lower feature index,
    /// then the lower threshold. With feature subsampling, features are
    /// visited in random order until the quota of non-constant features is
    /// met.
    fn best_split(&mut self, rows: &[usize], parent: [f64; 2], rng: &mut Option<&mut Rng>) -> Option<Candidate> {
        let quota = self.cfg.features_per_split.unwrap_or(usize::MAX);
        if let Some(r) = rng.as_deref_mut() {
            if quota < self.order.len() {
                self.order.shuffle(r);
            }
        }
        let total = parent[0] + parent[1];
        let mut best: Option<Candidate> = None;
        let mut examined = 0;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        let order = std::mem::take(&mut self.order);
        for &feature in &order {
            if examined >= quota {
                break;
            }
            sorted.clear();
            sorted.extend(rows.iter().map(|&r| (self.x[[r, feature]], r)));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            if sorted[0].0 == sorted[sorted.len() - 1].0 {
                continue;
            }
            examined += 1;
            let mut left = [0.0; 2];
            for i in 0..sorted.len() - 1 {
                let r = sorted[i].1;
                left[self.y[r]] += self.weights[r];
                let (a, b) = (sorted[i].0, sorted[i + 1].0);
                if a == b {
                    continue;
                }
                let n_left = i + 1;
                if n_left < self.cfg.min_leaf || sorted.len() - n_left < self.cfg.min_leaf {
                    continue;
                }
                let right = [parent[0] - left[0], parent[1] - left[1]];
                let wl = left[0] + left[1];
                let wr = total - wl;
                let impurity = (wl * gini(left[0], left[1]) + wr * gini(right[0].max(0.0), right[1].max(0.0))) / total;
                let mut threshold = a + (b - a) / 2.0;
                if threshold >= b {
                    threshold = a;
                }
                let better = match &best {
                    None => true,
                    Some(c) => {
                        impurity < c.impurity
                            || (impurity == c.impurity
                                && (feature < c.feature || (feature == c.feature && threshold < c.threshold)))
                    }
                };
                if better {
                    best = Some(Candidate {
                        impurity,
                        feature,
                        threshold,
                    });
                }
            }
        }
        self.order = order;
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn accuracy(tree: &TreeNode, x: &Array2<f64>, y: &[usize]) -> f64 {
        let p = tree.predict(x);
        p.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
    }

    #[test]
    fn separable_one_dimensional() {
        let x = array![[0.0], [1.0]];
        let tree = train_decision_tree(&x, &[0, 1], None, 1).unwrap();
        assert_eq!(tree.num_leaves(), 2);
        match &tree {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 0.5);
            }
            _ => panic!("expected a split"),
        }
        assert_eq!(accuracy(&tree, &x, &[0, 1]), 1.0);
    }

    #[test]
    fn identical_rows_make_one_leaf_with_tie_to_zero() {
        let x = array![[1.0, 2.0], [1.0, 2.0], [1.0, 2.0], [1.0, 2.0]];
        let tree = train_decision_tree(&x, &[0, 1, 1, 0], None, 1).unwrap();
        assert_eq!(
            tree,
            TreeNode::Leaf {
                class: 0,
                distribution: [0.5, 0.5]
            }
        );
        let tree = train_decision_tree(&x, &[1, 1, 1, 0], None, 1).unwrap();
        assert!(matches!(tree, TreeNode::Leaf { class: 1, .. }));
    }

    #[test]
    fn xor_needs_depth_two() {
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [0, 1, 1, 0];
        let tree = train_decision_tree(&x, &y, Some(2), 1).unwrap();
        assert_eq!(tree.depth(), 2);
        assert_eq!(accuracy(&tree, &x, &y), 1.0);
        // Every first split ties; the rule picks feature 0.
        assert!(matches!(tree, TreeNode::Split { feature: 0, .. }));
    }

    #[test]
    fn single_class_is_degenerate() {
        let x = array![[0.0], [1.0]];
        assert!(matches!(
            train_decision_tree(&x, &[1, 1], None, 1),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn min_leaf_is_respected() {
        let x = array![[0.0], [1.0], [2.0], [3.0], [4.0]];
        let y = [1, 0, 0, 0, 0];
        // Isolating the lone positive would need a one-row leaf.
        let tree = train_decision_tree(&x, &y, None, 2).unwrap();
        assert!(accuracy(&tree, &x, &y) < 1.0);
        assert_eq!(accuracy(&train_decision_tree(&x, &y, None, 1).unwrap(), &x, &y), 1.0);
    }

    /// Weighted child impurity of every split node, computed from scratch.
    fn check_impurity(node: &TreeNode, x: &Array2<f64>, y: &[usize], rows: &[usize]) {
        if let TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } = node
        {
            let count = |rs: &[usize]| {
                let ones = rs.iter().filter(|&&r| y[r] == 1).count() as f64;
                (rs.len() as f64 - ones, ones)
            };
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[[i, *feature]] <= *threshold);
            assert!(!l.is_empty() && !r.is_empty());
            let (p0, p1) = count(rows);
            let (l0, l1) = count(&l);
            let (r0, r1) = count(&r);
            let n = rows.len() as f64;
            let children = (l.len() as f64 * gini(l0, l1) + r.len() as f64 * gini(r0, r1)) / n;
            assert!(children <= gini(p0, p1) + 1e-12);
            check_impurity(left, x, y, &l);
            check_impurity(right, x, y, &r);
        }
    }

    proptest! {
        #[test]
        fn full_tree_fits_distinct_rows(
            vals in proptest::collection::vec((0i32..6, 0i32..6, 0usize..2), 2..40)
        ) {
            let mut seen = std::collections::BTreeMap::new();
            for (a, b, c) in vals {
                seen.entry((a, b)).or_insert(c);
            }
            let rows: Vec<_> = seen.into_iter().collect();
            let y: Vec<usize> = rows.iter().map(|r| r.1).collect();
            prop_assume!(y.contains(&0) && y.contains(&1));
            let x = Array2::from_shape_fn((rows.len(), 2), |(i, j)| {
                let (a, b) = rows[i].0;
                f64::from(if j == 0 { a } else { b })
            });
            let tree = train_decision_tree(&x, &y, None, 1).unwrap();
            prop_assert_eq!(accuracy(&tree, &x, &y), 1.0);
            let all: Vec<usize> = (0..y.len()).collect();
            check_impurity(&tree, &x, &y, &all);
        }
    }
}

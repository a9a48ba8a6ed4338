use ndarray::{s, Array1, Array2, Axis};

use super::{GcnLayerParams, GcnModel, Supervision, Topology};
use crate::error::{Error, Result};

/// Row `v` is the mean of the rows of `v`'s neighbors.
pub fn aggregate(features: &Array2<f64>, topo: &Topology) -> Result<Array2<f64>> {
    let n = topo.num_nodes();
    if features.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} feature rows for {} nodes",
            features.nrows(),
            n
        )));
    }
    let mut out = Array2::zeros(features.raw_dim());
    for v in 0..n {
        let nbrs = topo.csr.neighbors(v);
        let mut row = out.row_mut(v);
        for &u in nbrs {
            row += &features.row(u);
        }
        if !nbrs.is_empty() {
            row /= nbrs.len() as f64;
        }
    }
    Ok(out)
}

/// Adjoint of [`aggregate`]: row `u` collects `g[v] / deg(v)` over its neighbors `v`.
pub(crate) fn aggregate_transpose(grad: &Array2<f64>, topo: &Topology) -> Array2<f64> {
    let mut out = Array2::zeros(grad.raw_dim());
    for v in 0..topo.num_nodes() {
        let nbrs = topo.csr.neighbors(v);
        if nbrs.is_empty() {
            continue;
        }
        let scaled = &grad.row(v) / nbrs.len() as f64;
        for &u in nbrs {
            let mut row = out.row_mut(u);
            row += &scaled;
        }
    }
    out
}

pub(crate) struct LayerCache {
    pub agg: Array2<f64>,
    pub pre: Array2<f64>,
    pub out: Array2<f64>,
}

fn add_bias(m: &mut Array2<f64>, bias: &Option<Array1<f64>>) {
    if let Some(b) = bias {
        *m += b;
    }
}

pub(crate) fn layer_forward_cached(
    h_prev: &Array2<f64>,
    layer: &GcnLayerParams,
    topo: &Topology,
) -> Result<LayerCache> {
    if h_prev.ncols() != layer.input_dim() {
        return Err(Error::ShapeMismatch(format!(
            "layer expects {} input columns, got {}",
            layer.input_dim(),
            h_prev.ncols()
        )));
    }
    let agg = aggregate(h_prev, topo)?;
    let mut pre = agg.dot(&layer.neighbor);
    add_bias(&mut pre, &layer.neighbor_bias);
    let mut own = h_prev.dot(&layer.self_weight);
    add_bias(&mut own, &layer.self_bias);
    let half = own.ncols();
    let mut out = Array2::zeros((h_prev.nrows(), half + pre.ncols()));
    out.slice_mut(s![.., ..half]).assign(&own);
    out.slice_mut(s![.., half..])
        .assign(&pre.mapv(|x| x.max(0.0)));
    Ok(LayerCache { agg, pre, out })
}

/// `concat(h·V + b_V, relu(mean_neighbors(h)·W + b_W))` for every node.
pub fn layer_forward(h_prev: &Array2<f64>, layer: &GcnLayerParams, topo: &Topology) -> Result<Array2<f64>> {
    Ok(layer_forward_cached(h_prev, layer, topo)?.out)
}

/// Per-occupation classifier input: the occupation's own final embedding
/// followed by the mean final embedding of its neighbors.
pub fn readout(last: &Array2<f64>, topo: &Topology) -> Result<Array2<f64>> {
    if last.nrows() != topo.num_nodes() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows for {} nodes",
            last.nrows(),
            topo.num_nodes()
        )));
    }
    let d = last.ncols();
    let mut out = Array2::zeros((topo.num_occupations(), 2 * d));
    for (row, &o) in topo.occupations.iter().enumerate() {
        out.slice_mut(s![row, ..d]).assign(&last.row(o));
        let nbrs = topo.csr.neighbors(o);
        let mut tail = out.slice_mut(s![row, d..]);
        for &u in nbrs {
            tail += &last.row(u);
        }
        if !nbrs.is_empty() {
            tail /= nbrs.len() as f64;
        }
    }
    Ok(out)
}

fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut probs = logits.clone();
    for mut row in probs.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        row.mapv_inplace(|x| (x - max).exp());
        let sum = row.sum();
        row /= sum;
    }
    probs
}

pub(crate) fn logits(rows: &Array2<f64>, head: &Array2<f64>, bias: &Array1<f64>) -> Result<Array2<f64>> {
    if rows.ncols() != head.nrows() || head.ncols() != bias.len() {
        return Err(Error::ShapeMismatch(format!(
            "readout width {} vs head {:?}",
            rows.ncols(),
            head.dim()
        )));
    }
    Ok(rows.dot(head) + bias)
}

/// Softmax over the affine head; column 1 is the automated class.
pub fn classify(rows: &Array2<f64>, head: &Array2<f64>, bias: &Array1<f64>) -> Result<Array2<f64>> {
    Ok(softmax_rows(&logits(rows, head, bias)?))
}

/// Mean negative log-likelihood of the supervised rows.
pub fn data_loss(probs: &Array2<f64>, sup: &Supervision) -> Result<f64> {
    if sup.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut total = 0.0;
    for (&r, &c) in sup.rows.iter().zip(&sup.classes) {
        if r >= probs.nrows() {
            return Err(Error::ShapeMismatch(format!("row {r} out of range")));
        }
        total -= probs[[r, c]].ln();
    }
    Ok(total / sup.len() as f64)
}

pub(crate) fn decay_term(model: &GcnModel, weight_decay: f64) -> f64 {
    let sq: f64 = model
        .params()
        .iter()
        .filter(|p| p.decayed)
        .map(|p| p.data.iter().map(|w| w * w).sum::<f64>())
        .sum();
    0.5 * weight_decay * sq
}

/// Data term plus `weight_decay / 2 · Σ w²` over layer and head weights.
pub fn total_loss(model: &GcnModel, probs: &Array2<f64>, sup: &Supervision, weight_decay: f64) -> Result<f64> {
    Ok(data_loss(probs, sup)? + decay_term(model, weight_decay))
}

/// Everything the backward pass needs.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input of each layer; `inputs[0]` is the node feature matrix.
    pub inputs: Vec<Array2<f64>>,
    pub aggregates: Vec<Array2<f64>>,
    /// Neighbor-branch pre-activations.
    pub pre_activations: Vec<Array2<f64>>,
    /// Final-layer node embeddings.
    pub last: Array2<f64>,
    pub readout: Array2<f64>,
    pub logits: Array2<f64>,
    pub probs: Array2<f64>,
}

impl ForwardCache {
    /// Mean NLL computed from logits (log-sum-exp form).
    pub fn data_loss(&self, sup: &Supervision) -> Result<f64> {
        if sup.is_empty() {
            return Err(Error::EmptyMask);
        }
        let mut total = 0.0;
        for (&r, &c) in sup.rows.iter().zip(&sup.classes) {
            let row = self.logits.row(r);
            let max = row.fold(f64::NEG_INFINITY, |m, &x| m.max(x));
            let lse = max + row.iter().map(|&x| (x - max).exp()).sum::<f64>().ln();
            total += lse - row[c];
        }
        Ok(total / sup.len() as f64)
    }

    /// Automated-class probability per occupation.
    pub fn automated(&self) -> Vec<f64> {
        self.probs.index_axis(Axis(1), 1).to_vec()
    }
}

pub fn forward(model: &GcnModel, topo: &Topology) -> Result<ForwardCache> {
    model.check_shapes()?;
    if model.features.nrows() != topo.num_nodes() {
        return Err(Error::ShapeMismatch(format!(
            "{} feature rows for {} nodes",
            model.features.nrows(),
            topo.num_nodes()
        )));
    }
    let mut inputs = Vec::with_capacity(model.layers.len());
    let mut aggregates = Vec::with_capacity(model.layers.len());
    let mut pre_activations = Vec::with_capacity(model.layers.len());
    let mut h = model.features.clone();
    for layer in &model.layers {
        let cache = layer_forward_cached(&h, layer, topo)?;
        inputs.push(std::mem::replace(&mut h, cache.out));
        aggregates.push(cache.agg);
        pre_activations.push(cache.pre);
    }
    let readout = readout(&h, topo)?;
    let logits = logits(&readout, &model.head, &model.head_bias)?;
    let probs = softmax_rows(&logits);
    Ok(ForwardCache {
        inputs,
        aggregates,
        pre_activations,
        last: h,
        readout,
        logits,
        probs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcn::check::{random_model, random_topology};
    use crate::graph::{BipartiteGraph, Csr};
    use crate::rng::seeded;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn one_one() -> Topology {
        Topology::new(
            Csr {
                offsets: vec![0, 1, 2],
                targets: vec![1, 0],
            },
            vec![0],
        )
        .unwrap()
    }

    fn toy_3x2() -> Topology {
        let g = BipartiteGraph::from_parts(
            vec!["o1".into(), "o2".into(), "o3".into()],
            vec!["s1".into(), "s2".into()],
            vec![(0, 0), (0, 1), (1, 0), (2, 1)],
            Array2::zeros((3, 1)),
            Array2::zeros((2, 1)),
        )
        .unwrap();
        Topology::from_graph(&g)
    }

    fn layer(v: Array2<f64>, w: Array2<f64>) -> GcnLayerParams {
        GcnLayerParams {
            neighbor: w,
            neighbor_bias: None,
            self_weight: v,
            self_bias: None,
        }
    }

    #[test]
    fn aggregate_examples() {
        let agg = aggregate(&array![[2.0, 0.0], [0.0, 4.0]], &one_one()).unwrap();
        assert_eq!(agg, array![[0.0, 4.0], [2.0, 0.0]]);

        // o1 neighbors s1 (row 3) and s2 (row 4).
        let feats = array![[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [3.0, 3.0]];
        let agg = aggregate(&feats, &toy_3x2()).unwrap();
        assert_eq!(agg.row(0).to_vec(), vec![2.0, 2.0]);

        let c = Array2::from_elem((5, 3), 1.25);
        assert_eq!(aggregate(&c, &toy_3x2()).unwrap(), c);
        assert!(matches!(
            aggregate(&Array2::zeros((4, 1)), &toy_3x2()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn layer_with_identity_weights_concatenates() {
        let topo = toy_3x2();
        let h = array![[1.0, 2.0], [0.5, 0.0], [3.0, 1.0], [1.0, 1.0], [2.0, 0.0]];
        let eye = Array2::eye(2);
        let out = layer_forward(&h, &layer(eye.clone(), eye), &topo).unwrap();
        let agg = aggregate(&h, &topo).unwrap();
        for v in 0..5 {
            let mut expected = h.row(v).to_vec();
            expected.extend(agg.row(v).iter());
            assert_eq!(out.row(v).to_vec(), expected);
        }
    }

    #[test]
    fn relu_clamps_negative_neighbor_branch() {
        let topo = toy_3x2();
        let h = Array2::from_elem((5, 2), 1.0);
        let w = Array2::from_elem((2, 1), -1.0);
        let out = layer_forward(&h, &layer(Array2::from_elem((2, 1), 1.0), w), &topo).unwrap();
        assert!(out.column(1).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn hand_computed_minimal_layer() {
        let out = layer_forward(
            &array![[1.0], [-1.0]],
            &layer(array![[2.0]], array![[3.0]]),
            &one_one(),
        )
        .unwrap();
        assert_eq!(out, array![[2.0, 0.0], [-2.0, 3.0]]);
    }

    #[test]
    fn readout_examples() {
        let topo = toy_3x2();
        let z = array![[1.0], [2.0], [2.0], [10.0], [20.0]];
        let r = readout(&z, &topo).unwrap();
        assert_eq!(r.row(0).to_vec(), vec![1.0, 15.0]);
        // o2 has the single neighbor s1.
        assert_eq!(r.row(1).to_vec(), vec![2.0, 10.0]);
        // o2 and o3 share z but not skills.
        assert_ne!(r.row(1), r.row(2));
    }

    #[test]
    fn identical_occupations_share_readout() {
        let g = BipartiteGraph::from_parts(
            vec!["a".into(), "b".into()],
            vec!["s".into(), "t".into()],
            vec![(0, 0), (0, 1), (1, 0), (1, 1)],
            Array2::zeros((2, 1)),
            Array2::zeros((2, 1)),
        )
        .unwrap();
        let topo = Topology::from_graph(&g);
        let z = array![[1.0, 2.0], [1.0, 2.0], [3.0, 0.0], [4.0, 1.0]];
        let r = readout(&z, &topo).unwrap();
        assert_eq!(r.row(0), r.row(1));
    }

    #[test]
    fn classify_examples() {
        let rows = array![[1.0, -2.0], [0.3, 0.7]];
        let p = classify(&rows, &Array2::zeros((2, 2)), &Array1::zeros(2)).unwrap();
        assert!(p.iter().all(|&x| x == 0.5));

        let p = classify(
            &array![[1.0]],
            &array![[3f64.ln(), 0.0]],
            &Array1::zeros(2),
        )
        .unwrap();
        assert!((p[[0, 0]] - 0.75).abs() < 1e-15);
        assert!((p[[0, 1]] - 0.25).abs() < 1e-15);
        assert!(matches!(
            classify(&rows, &Array2::zeros((3, 2)), &Array1::zeros(2)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn loss_examples() {
        let sup = Supervision::new(vec![0, 1], vec![1, 0]).unwrap();
        let perfect = array![[0.0, 1.0], [1.0, 0.0]];
        assert_eq!(data_loss(&perfect, &sup).unwrap(), 0.0);
        let uniform = Array2::from_elem((2, 2), 0.5);
        assert!((data_loss(&uniform, &sup).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        let p = array![[0.1, 0.9], [0.8, 0.2]];
        let expected = -(0.9f64.ln() + 0.8f64.ln()) / 2.0;
        assert!((data_loss(&p, &sup).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.1643).abs() < 5e-5);
        assert!(matches!(
            data_loss(&p, &Supervision::default()),
            Err(Error::EmptyMask)
        ));
    }

    #[test]
    fn zero_head_predicts_half() {
        let mut rng = seeded(3);
        let topo = random_topology(4, 3, &mut rng);
        let mut model = random_model(&[3, 4, 4], topo.num_nodes(), 1);
        model.head.fill(0.0);
        model.head_bias.fill(0.0);
        let cache = forward(&model, &topo).unwrap();
        assert!(cache.automated().iter().all(|&p| p == 0.5));
    }

    proptest! {
        #[test]
        fn probabilities_are_normalized(seed in 0u64..500) {
            let mut rng = seeded(seed);
            let topo = random_topology(5, 4, &mut rng);
            let model = random_model(&[3, 4, 2], topo.num_nodes(), seed);
            let cache = forward(&model, &topo).unwrap();
            for row in cache.probs.rows() {
                prop_assert!(row.iter().all(|&p| p > 0.0 && p < 1.0));
                prop_assert!((row.sum() - 1.0).abs() <= 1e-9);
            }
            let sup = Supervision::new(vec![0, 1], vec![0, 1]).unwrap();
            let a = cache.data_loss(&sup).unwrap();
            let b = data_loss(&cache.probs, &sup).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

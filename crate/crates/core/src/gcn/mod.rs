//! Graph convolution over the occupation-skill graph treated as a single
//! node type.
//!
//! Each layer maps every node `v` to
//!
//! ```text
//! h_v' = concat( h_v · V + b_V,  relu( mean_{u ∈ N(v)} h_u · W + b_W ) )
//! ```
//!
//! so a layer of width `d` holds two `d/2`-wide branches. The classifier reads
//! an occupation as `concat(z_o, mean of z_s over its skills)` from the last
//! layer and applies an affine map to two logits followed by softmax.
//! Initial node features are parameters and are trained with the weights.

mod backward;
mod bundle;
pub mod check;
mod forward;
mod train;

use ndarray::{Array1, Array2};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Csr};
use crate::rng::{seeded, Rng};

pub use backward::gradients;
pub use bundle::{ModelBundle, TensorData, BUNDLE_VERSION};
pub use forward::{
    aggregate, classify, data_loss, forward, layer_forward, readout, total_loss, ForwardCache,
};
pub use train::{predict, train, Adam, EpochRecord, History, TrainConfig};

/// Graph structure as seen by the model: adjacency over all nodes plus the
/// global index of each occupation in readout order.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub csr: Csr,
    pub occupations: Vec<usize>,
}

impl Topology {
    pub fn from_graph(graph: &BipartiteGraph) -> Topology {
        Topology {
            csr: graph.csr(),
            occupations: (0..graph.num_occupations()).collect(),
        }
    }

    pub fn new(csr: Csr, occupations: Vec<usize>) -> Result<Topology> {
        let n = csr.num_nodes();
        if let Some(&bad) = occupations.iter().find(|&&o| o >= n) {
            return Err(Error::InvalidNode(format!("node {bad}")));
        }
        if let Some(v) = (0..n).find(|&v| csr.neighbors(v).is_empty()) {
            return Err(Error::IsolatedNode(vec![format!("node {v}")]));
        }
        Ok(Topology { csr, occupations })
    }

    pub fn num_nodes(&self) -> usize {
        self.csr.num_nodes()
    }

    pub fn num_occupations(&self) -> usize {
        self.occupations.len()
    }
}

/// Weights of one propagation layer. Rows of `neighbor` and `self_weight`
/// index input dimensions; both map to half the layer width.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnLayerParams {
    pub neighbor: Array2<f64>,
    pub neighbor_bias: Option<Array1<f64>>,
    pub self_weight: Array2<f64>,
    pub self_bias: Option<Array1<f64>>,
}

impl GcnLayerParams {
    pub fn input_dim(&self) -> usize {
        self.neighbor.nrows()
    }

    /// Output width, both branches together.
    pub fn output_dim(&self) -> usize {
        self.neighbor.ncols() + self.self_weight.ncols()
    }

    fn zeros_like(&self) -> GcnLayerParams {
        GcnLayerParams {
            neighbor: Array2::zeros(self.neighbor.raw_dim()),
            neighbor_bias: self.neighbor_bias.as_ref().map(|b| Array1::zeros(b.len())),
            self_weight: Array2::zeros(self.self_weight.raw_dim()),
            self_bias: self.self_bias.as_ref().map(|b| Array1::zeros(b.len())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    /// `[d_0, d_1, ..., d_L]`.
    pub layer_plan: Vec<usize>,
    pub layers: Vec<GcnLayerParams>,
    /// `2·d_L × 2`.
    pub head: Array2<f64>,
    pub head_bias: Array1<f64>,
    /// Trainable node features, one row per node in global order.
    pub features: Array2<f64>,
}

fn glorot(rows: usize, cols: usize, rng: &mut Rng) -> Array2<f64> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || rng.gen_range(-limit..limit))
}

/// A flat view of one parameter tensor.
pub struct ParamRef<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [f64],
    pub decayed: bool,
}

pub struct ParamMut<'a> {
    pub name: String,
    pub data: &'a mut [f64],
    pub decayed: bool,
}

impl GcnModel {
    /// Glorot-uniform weights, zero biases, features copied from `features`.
    pub fn init(layer_plan: &[usize], features: Array2<f64>, bias: bool, seed: u64) -> Result<GcnModel> {
        if layer_plan.len() < 2 {
            return Err(Error::Config("layer plan needs at least one layer".into()));
        }
        if layer_plan[1..].iter().any(|&d| d == 0 || d % 2 != 0) {
            return Err(Error::Config(format!(
                "hidden widths must be even and positive: {layer_plan:?}"
            )));
        }
        if features.ncols() != layer_plan[0] {
            return Err(Error::DimensionMismatch {
                expected: layer_plan[0],
                found: features.ncols(),
            });
        }
        let mut rng = seeded(seed);
        let mut layers = Vec::with_capacity(layer_plan.len() - 1);
        for w in layer_plan.windows(2) {
            let (d_in, half) = (w[0], w[1] / 2);
            let neighbor = glorot(d_in, half, &mut rng);
            let self_weight = glorot(d_in, half, &mut rng);
            layers.push(GcnLayerParams {
                neighbor,
                neighbor_bias: bias.then(|| Array1::zeros(half)),
                self_weight,
                self_bias: bias.then(|| Array1::zeros(half)),
            });
        }
        let d_last = *layer_plan.last().expect("non-empty plan");
        let head = glorot(2 * d_last, 2, &mut rng);
        Ok(GcnModel {
            layer_plan: layer_plan.to_vec(),
            layers,
            head,
            head_bias: Array1::zeros(2),
            features,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_plan.last().expect("non-empty plan")
    }

    /// Same shapes, all zeros. Used as the gradient container.
    pub fn zeros_like(&self) -> GcnModel {
        GcnModel {
            layer_plan: self.layer_plan.clone(),
            layers: self.layers.iter().map(GcnLayerParams::zeros_like).collect(),
            head: Array2::zeros(self.head.raw_dim()),
            head_bias: Array1::zeros(self.head_bias.len()),
            features: Array2::zeros(self.features.raw_dim()),
        }
    }

    pub fn check_shapes(&self) -> Result<()> {
        let plan = &self.layer_plan;
        if plan.len() != self.layers.len() + 1 || self.layers.is_empty() {
            return Err(Error::ShapeMismatch("layer plan does not match layers".into()));
        }
        if self.features.ncols() != plan[0] {
            return Err(Error::ShapeMismatch(format!(
                "features have {} columns, plan starts at {}",
                self.features.ncols(),
                plan[0]
            )));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            let (d_in, d_out) = (plan[l], plan[l + 1]);
            let half = d_out / 2;
            if layer.neighbor.dim() != (d_in, half) || layer.self_weight.dim() != (d_in, half) {
                return Err(Error::ShapeMismatch(format!("layer {l} weights")));
            }
            let bias_ok = |b: &Option<Array1<f64>>| b.as_ref().is_none_or(|b| b.len() == half);
            if !bias_ok(&layer.neighbor_bias) || !bias_ok(&layer.self_bias) {
                return Err(Error::ShapeMismatch(format!("layer {l} biases")));
            }
        }
        if self.head.dim() != (2 * self.output_dim(), 2) || self.head_bias.len() != 2 {
            return Err(Error::ShapeMismatch("classifier head".into()));
        }
        Ok(())
    }

    /// Every parameter tensor in a fixed order.
    pub fn params(&self) -> Vec<ParamRef<'_>> {
        let mut out = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            out.push(ParamRef {
                name: format!("layer{l}.neighbor.weight"),
                shape: layer.neighbor.shape().to_vec(),
                data: view2(&layer.neighbor),
                decayed: true,
            });
            if let Some(b) = &layer.neighbor_bias {
                out.push(ParamRef {
                    name: format!("layer{l}.neighbor.bias"),
                    shape: vec![b.len()],
                    data: b.as_slice().expect("standard layout"),
                    decayed: false,
                });
            }
            out.push(ParamRef {
                name: format!("layer{l}.self.weight"),
                shape: layer.self_weight.shape().to_vec(),
                data: view2(&layer.self_weight),
                decayed: true,
            });
            if let Some(b) = &layer.self_bias {
                out.push(ParamRef {
                    name: format!("layer{l}.self.bias"),
                    shape: vec![b.len()],
                    data: b.as_slice().expect("standard layout"),
                    decayed: false,
                });
            }
        }
        out.push(ParamRef {
            name: "head.weight".into(),
            shape: self.head.shape().to_vec(),
            data: view2(&self.head),
            decayed: true,
        });
        out.push(ParamRef {
            name: "head.bias".into(),
            shape: vec![2],
            data: self.head_bias.as_slice().expect("standard layout"),
            decayed: false,
        });
        out.push(ParamRef {
            name: "features".into(),
            shape: self.features.shape().to_vec(),
            data: view2(&self.features),
            decayed: false,
        });
        out
    }

    /// Mutable counterpart of [`GcnModel::params`], same order.
    pub fn params_mut(&mut self) -> Vec<ParamMut<'_>> {
        let mut out = Vec::new();
        for (l, layer) in self.layers.iter_mut().enumerate() {
            out.push(ParamMut {
                name: format!("layer{l}.neighbor.weight"),
                data: layer.neighbor.as_slice_mut().expect("standard layout"),
                decayed: true,
            });
            if let Some(b) = &mut layer.neighbor_bias {
                out.push(ParamMut {
                    name: format!("layer{l}.neighbor.bias"),
                    data: b.as_slice_mut().expect("standard layout"),
                    decayed: false,
                });
            }
            out.push(ParamMut {
                name: format!("layer{l}.self.weight"),
                data: layer.self_weight.as_slice_mut().expect("standard layout"),
                decayed: true,
            });
            if let Some(b) = &mut layer.self_bias {
                out.push(ParamMut {
                    name: format!("layer{l}.self.bias"),
                    data: b.as_slice_mut().expect("standard layout"),
                    decayed: false,
                });
            }
        }
        out.push(ParamMut {
            name: "head.weight".into(),
            data: self.head.as_slice_mut().expect("standard layout"),
            decayed: true,
        });
        out.push(ParamMut {
            name: "head.bias".into(),
            data: self.head_bias.as_slice_mut().expect("standard layout"),
            decayed: false,
        });
        out.push(ParamMut {
            name: "features".into(),
            data: self.features.as_slice_mut().expect("standard layout"),
            decayed: false,
        });
        out
    }

    pub fn is_finite(&self) -> bool {
        self.params().iter().all(|p| p.data.iter().all(|v| v.is_finite()))
    }
}

/// Labeled occupations used by the objective: readout row and class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Supervision {
    pub rows: Vec<usize>,
    pub classes: Vec<usize>,
}

impl Supervision {
    pub fn new(rows: Vec<usize>, classes: Vec<usize>) -> Result<Supervision> {
        if rows.len() != classes.len() {
            return Err(Error::LengthMismatch(rows.len(), classes.len()));
        }
        if classes.iter().any(|&c| c > 1) {
            return Err(Error::ShapeMismatch("classes must be 0 or 1".into()));
        }
        Ok(Supervision { rows, classes })
    }

    /// Selects `rows` from per-occupation labels; unlabeled rows are an error.
    pub fn select(labels: &[Option<usize>], rows: &[usize]) -> Result<Supervision> {
        let mut classes = Vec::with_capacity(rows.len());
        for &r in rows {
            let class = labels
                .get(r)
                .copied()
                .flatten()
                .ok_or_else(|| Error::ShapeMismatch(format!("occupation {r} is not labeled")))?;
            classes.push(class);
        }
        Supervision::new(rows.to_vec(), classes)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn view2(a: &Array2<f64>) -> &[f64] {
    a.as_slice().expect("standard layout")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_shapes() {
        let model = GcnModel::init(&[4, 6, 8], Array2::zeros((5, 4)), true, 1).unwrap();
        model.check_shapes().unwrap();
        assert_eq!(model.layers[0].neighbor.dim(), (4, 3));
        assert_eq!(model.layers[1].self_weight.dim(), (6, 4));
        assert_eq!(model.head.dim(), (16, 2));
        assert!(GcnModel::init(&[4, 5], Array2::zeros((5, 4)), true, 1).is_err());
        assert!(GcnModel::init(&[4], Array2::zeros((5, 4)), true, 1).is_err());
        assert!(matches!(
            GcnModel::init(&[3, 4], Array2::zeros((5, 4)), true, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn params_round_trip_order() {
        let mut model = GcnModel::init(&[2, 4], Array2::zeros((3, 2)), true, 1).unwrap();
        let names: Vec<String> = model.params().iter().map(|p| p.name.clone()).collect();
        let names_mut: Vec<String> = model.params_mut().iter().map(|p| p.name.clone()).collect();
        assert_eq!(names, names_mut);
        assert_eq!(names.last().unwrap(), "features");
    }
}

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{GcnLayerParams, GcnModel};
use crate::error::{Error, Result};

pub const BUNDLE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorData {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl TensorData {
    pub fn from_matrix(m: &Array2<f64>) -> TensorData {
        TensorData {
            shape: vec![m.nrows(), m.ncols()],
            data: m.iter().copied().collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<Array2<f64>> {
        match self.shape[..] {
            [r, c] => Array2::from_shape_vec((r, c), self.data.clone()).map_err(|e| Error::ShapeMismatch(e.to_string())),
            _ => Err(Error::ShapeMismatch(format!("expected a matrix, got shape {:?}", self.shape))),
        }
    }
}

/// Serialized model: every named tensor plus the settings it was trained with.
/// Floats go through serde_json's shortest round-trip formatting, so a reload
/// reproduces the parameters bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub version: u32,
    pub layer_plan: Vec<usize>,
    pub bias: bool,
    pub seed: u64,
    #[serde(default)]
    pub config: serde_json::Value,
    pub tensors: BTreeMap<String, TensorData>,
}

impl ModelBundle {
    pub fn from_model(model: &GcnModel, seed: u64, config: serde_json::Value) -> ModelBundle {
        let tensors = model
            .params()
            .into_iter()
            .map(|p| {
                (
                    p.name,
                    TensorData {
                        shape: p.shape,
                        data: p.data.to_vec(),
                    },
                )
            })
            .collect();
        ModelBundle {
            version: BUNDLE_VERSION,
            layer_plan: model.layer_plan.clone(),
            bias: model.layers.first().is_some_and(|l| l.neighbor_bias.is_some()),
            seed,
            config,
            tensors,
        }
    }

    fn matrix(&self, name: &str) -> Result<Array2<f64>> {
        let t = self
            .tensors
            .get(name)
            .ok_or_else(|| Error::ShapeMismatch(format!("bundle lacks tensor {name}")))?;
        if t.shape.len() != 2 {
            return Err(Error::ShapeMismatch(format!("{name} is not a matrix")));
        }
        Array2::from_shape_vec((t.shape[0], t.shape[1]), t.data.clone())
            .map_err(|e| Error::ShapeMismatch(format!("{name}: {e}")))
    }

    fn vector(&self, name: &str) -> Result<Option<Array1<f64>>> {
        match self.tensors.get(name) {
            None => Ok(None),
            Some(t) if t.shape.len() == 1 && t.shape[0] == t.data.len() => {
                Ok(Some(Array1::from(t.data.clone())))
            }
            Some(_) => Err(Error::ShapeMismatch(format!("{name} is not a vector"))),
        }
    }

    pub fn to_model(&self) -> Result<GcnModel> {
        if self.version != BUNDLE_VERSION {
            return Err(Error::ShapeMismatch(format!(
                "unsupported bundle version {}",
                self.version
            )));
        }
        if self.layer_plan.len() < 2 {
            return Err(Error::ShapeMismatch("layer plan too short".into()));
        }
        let mut layers = Vec::new();
        for l in 0..self.layer_plan.len() - 1 {
            layers.push(GcnLayerParams {
                neighbor: self.matrix(&format!("layer{l}.neighbor.weight"))?,
                neighbor_bias: self.vector(&format!("layer{l}.neighbor.bias"))?,
                self_weight: self.matrix(&format!("layer{l}.self.weight"))?,
                self_bias: self.vector(&format!("layer{l}.self.bias"))?,
            });
        }
        let model = GcnModel {
            layer_plan: self.layer_plan.clone(),
            layers,
            head: self.matrix("head.weight")?,
            head_bias: self
                .vector("head.bias")?
                .ok_or_else(|| Error::ShapeMismatch("bundle lacks head.bias".into()))?,
            features: self.matrix("features")?,
        };
        model.check_shapes()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<ModelBundle> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

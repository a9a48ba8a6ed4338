use serde::{Deserialize, Serialize};

use super::backward::gradients;
use super::forward::forward;
use super::{GcnModel, Supervision, Topology};
use crate::error::{Error, Result};
use crate::eval::{self, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub seed: u64,
    /// Stop after this many epochs without a validation F1 improvement.
    pub patience: usize,
    /// Validate every `eval_every` epochs.
    pub eval_every: usize,
    /// Update node features along with the weights.
    pub train_features: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 300,
            learning_rate: 0.01,
            weight_decay: 5e-4,
            seed: 7,
            patience: 30,
            eval_every: 1,
            train_features: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.weight_decay < 0.0 {
            return Err(Error::Config("weight decay must be non-negative".into()));
        }
        if self.eval_every == 0 || self.patience == 0 {
            return Err(Error::Config("patience and eval_every must be positive".into()));
        }
        Ok(())
    }
}

/// Adaptive-moment optimizer state over the model's parameter list.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: i32,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(model: &GcnModel, learning_rate: f64) -> Adam {
        let sizes: Vec<usize> = model.params().iter().map(|p| p.data.len()).collect();
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            second: sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// Applies one update. Parameters named in `frozen` are left untouched.
    pub fn update(&mut self, model: &mut GcnModel, grad: &GcnModel, frozen: &[&str]) {
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step);
        let bc2 = 1.0 - self.beta2.powi(self.step);
        let grads = grad.params();
        for (k, (param, g)) in model.params_mut().into_iter().zip(&grads).enumerate() {
            if frozen.contains(&param.name.as_str()) {
                continue;
            }
            let m = &mut self.first[k];
            let v = &mut self.second[k];
            for i in 0..param.data.len() {
                let gi = g.data[i];
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * gi;
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * gi * gi;
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                param.data[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_accuracy: Option<f64>,
    pub val_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct History {
    pub records: Vec<EpochRecord>,
    /// Epoch whose parameters were returned; 0 when no epoch ran.
    pub best_epoch: usize,
    pub best_val_f1: Option<f64>,
    pub stopped_early: bool,
}

impl History {
    pub const CSV_HEADER: &'static str = "epoch,train_loss,train_accuracy,val_accuracy,val_f1";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.10},{:.6},{},{}\n",
                r.epoch,
                r.train_loss,
                r.train_accuracy,
                opt(r.val_accuracy),
                opt(r.val_f1)
            ));
        }
        out
    }
}

/// Full-batch semi-supervised training. `labels` holds one optional class per
/// occupation; the split selects which labeled occupations train and validate.
///
/// Returns the parameters of the epoch with the highest validation F1,
/// the earliest such epoch on ties.
pub fn train(
    model: &GcnModel,
    topo: &Topology,
    labels: &[Option<usize>],
    split: &Split,
    cfg: &TrainConfig,
) -> Result<(GcnModel, History)> {
    cfg.validate()?;
    if labels.len() != topo.num_occupations() {
        return Err(Error::LengthMismatch(labels.len(), topo.num_occupations()));
    }
    let train_sup = Supervision::select(labels, &split.train)?;
    if train_sup.is_empty() {
        return Err(Error::EmptyMask);
    }
    let val_sup = Supervision::select(labels, &split.validation)?;
    let frozen: &[&str] = if cfg.train_features { &[] } else { &["features"] };

    let mut current = model.clone();
    let mut best = model.clone();
    let mut history = History::default();
    if cfg.epochs == 0 {
        return Ok((best, history));
    }
    let mut adam = Adam::new(&current, cfg.learning_rate);
    let mut since_best = 0usize;
    for epoch in 1..=cfg.epochs {
        let (loss, grad) = gradients(&current, topo, &train_sup, cfg.weight_decay)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                detail: format!("train loss {loss}, gradient finite: {}", grad.is_finite()),
            });
        }
        let train_accuracy = accuracy_before_update(&current, topo, &train_sup)?;
        adam.update(&mut current, &grad, frozen);
        if !current.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                detail: "parameters became non-finite after update".into(),
            });
        }

        let mut record = EpochRecord {
            epoch,
            train_loss: loss,
            train_accuracy,
            val_accuracy: None,
            val_f1: None,
        };
        if epoch % cfg.eval_every == 0 && !val_sup.is_empty() {
            let probs = forward(&current, topo)?.automated();
            let scores: Vec<f64> = val_sup.rows.iter().map(|&r| probs[r]).collect();
            let m = eval::evaluate(&scores, &val_sup.classes)?;
            record.val_accuracy = Some(m.accuracy);
            record.val_f1 = Some(m.f1);
            if history.best_val_f1.is_none_or(|b| m.f1 > b) {
                history.best_val_f1 = Some(m.f1);
                history.best_epoch = epoch;
                best = current.clone();
                since_best = 0;
            } else {
                since_best += cfg.eval_every;
            }
        }
        history.records.push(record);
        if since_best >= cfg.patience {
            history.stopped_early = true;
            break;
        }
    }
    if history.best_val_f1.is_none() {
        // No validation data: keep the last epoch.
        history.best_epoch = history.records.len();
        best = current;
    }
    Ok((best, history))
}

fn accuracy_before_update(model: &GcnModel, topo: &Topology, sup: &Supervision) -> Result<f64> {
    let probs = forward(model, topo)?.automated();
    let correct = sup
        .rows
        .iter()
        .zip(&sup.classes)
        .filter(|&(&r, &c)| eval::predicted_class(probs[r]) == c)
        .count();
    Ok(correct as f64 / sup.len() as f64)
}

/// Automated-class probability for every occupation.
pub fn predict(model: &GcnModel, topo: &Topology) -> Result<Vec<f64>> {
    Ok(forward(model, topo)?.automated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BipartiteGraph;
    use ndarray::{array, Array2};

    /// Two communities: automated occupations o0..o2 share skills s0,s1;
    /// the others share s2,s3.
    fn separable() -> (Topology, Array2<f64>, Vec<Option<usize>>) {
        let edges = vec![(0, 0), (0, 1), (1, 0), (2, 1), (3, 2), (3, 3), (4, 2), (5, 3)];
        let g = BipartiteGraph::from_parts(
            (0..6).map(|i| format!("o{i}")).collect(),
            (0..4).map(|i| format!("s{i}")).collect(),
            edges,
            Array2::zeros((6, 2)),
            Array2::zeros((4, 2)),
        )
        .unwrap();
        let features = array![
            [1.0, 0.2],
            [0.8, 0.1],
            [0.9, 0.3],
            [0.1, 0.9],
            [0.2, 1.0],
            [0.3, 0.8],
            [1.0, 0.0],
            [0.9, 0.1],
            [0.0, 1.0],
            [0.1, 0.9]
        ];
        let labels = vec![Some(1), Some(1), Some(1), Some(0), Some(0), Some(0)];
        (Topology::from_graph(&g), features, labels)
    }

    fn all_train() -> Split {
        Split {
            seed: 0,
            train: (0..6).collect(),
            validation: vec![0, 3],
            test: vec![],
        }
    }

    #[test]
    fn separable_toy_reaches_full_training_accuracy() {
        let (topo, features, labels) = separable();
        let model = GcnModel::init(&[2, 4, 4], features, true, 3).unwrap();
        let cfg = TrainConfig {
            epochs: 200,
            patience: 200,
            ..TrainConfig::default()
        };
        let (trained, history) = train(&model, &topo, &labels, &all_train(), &cfg).unwrap();
        let probs = predict(&trained, &topo).unwrap();
        let acc = labels
            .iter()
            .zip(&probs)
            .filter(|(l, &p)| l.unwrap() == eval::predicted_class(p))
            .count();
        assert_eq!(acc, 6);
        assert!(history.records.len() <= 200);
        assert!(history.records.iter().all(|r| r.train_loss.is_finite()));
    }

    #[test]
    fn zero_epochs_returns_input() {
        let (topo, features, labels) = separable();
        let model = GcnModel::init(&[2, 4], features, true, 3).unwrap();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let (trained, history) = train(&model, &topo, &labels, &all_train(), &cfg).unwrap();
        assert_eq!(trained, model);
        assert!(history.records.is_empty());
    }

    #[test]
    fn training_is_deterministic_and_returns_earliest_best() {
        let (topo, features, labels) = separable();
        let model = GcnModel::init(&[2, 4, 4], features, true, 5).unwrap();
        let cfg = TrainConfig {
            epochs: 40,
            ..TrainConfig::default()
        };
        let (a, ha) = train(&model, &topo, &labels, &all_train(), &cfg).unwrap();
        let (b, hb) = train(&model, &topo, &labels, &all_train(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha, hb);
        assert_eq!(ha.to_csv(), hb.to_csv());
        let best = ha.best_val_f1.unwrap();
        let first = ha
            .records
            .iter()
            .find(|r| r.val_f1 == Some(best))
            .unwrap()
            .epoch;
        assert_eq!(first, ha.best_epoch);
        assert!(ha.records.iter().all(|r| r.val_f1.unwrap() <= best));
    }

    #[test]
    fn frozen_features_stay_fixed() {
        let (topo, features, labels) = separable();
        let model = GcnModel::init(&[2, 4], features.clone(), true, 3).unwrap();
        let cfg = TrainConfig {
            epochs: 5,
            train_features: false,
            patience: 100,
            ..TrainConfig::default()
        };
        let (trained, _) = train(&model, &topo, &labels, &all_train(), &cfg).unwrap();
        assert_eq!(trained.features, features);
    }

    #[test]
    fn empty_train_mask_is_rejected() {
        let (topo, features, labels) = separable();
        let model = GcnModel::init(&[2, 4], features, true, 3).unwrap();
        let split = Split {
            seed: 0,
            train: vec![],
            validation: vec![0],
            test: vec![],
        };
        assert!(matches!(
            train(&model, &topo, &labels, &split, &TrainConfig::default()),
            Err(Error::EmptyMask)
        ));
    }
}

//! Run configuration read from a TOML file.
//!
//! Every key is optional; missing keys take the defaults below. Relative
//! paths resolve against the directory holding the config file.
//!
//! ```toml
//! seed = 7
//! deterministic = true
//!
//! [paths]
//! data_dir = "data/fixture"
//! out_dir = "runs/default"
//!
//! [embed]
//! dim = 200
//! doc_epochs = 20
//!
//! [gcn]
//! hidden = [256, 256]
//! epochs = 300
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baseline::BaselineConfig;
use crate::embed::{EmbedConfig, Fusion};
use crate::error::{Error, Result};
use crate::gcn::TrainConfig;
use crate::risk::{DEFAULT_CUTOFF, DEFAULT_DECLINE_THRESHOLD};
use crate::rng::derive;
use crate::viz::TsneConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every stage seed not set explicitly derives from it.
    pub seed: u64,
    /// Worker threads for parallel sections; 0 lets the runtime decide.
    pub threads: usize,
    /// Recorded in the manifest. All code paths are deterministic, so this
    /// only documents the intent of the run.
    pub deterministic: bool,
    pub paths: PathsConfig,
    pub embed: EmbedSettings,
    pub gcn: GcnSettings,
    pub split: SplitSettings,
    pub baseline: BaselineConfig,
    pub risk: RiskSettings,
    pub sweep: SweepSettings,
    pub viz: VizSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            threads: 0,
            deterministic: true,
            paths: PathsConfig::default(),
            embed: EmbedSettings::default(),
            gcn: GcnSettings::default(),
            split: SplitSettings::default(),
            baseline: BaselineConfig::default(),
            risk: RiskSettings::default(),
            sweep: SweepSettings::default(),
            viz: VizSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub data_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Optional pretrained word vectors.
    pub pretrained: Option<PathBuf>,
    /// Declining-occupation list; defaults to `declining.csv` in the data dir.
    pub declining: Option<PathBuf>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            data_dir: PathBuf::from("data/fixture"),
            out_dir: PathBuf::from("runs/default"),
            pretrained: None,
            declining: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedSettings {
    pub dim: usize,
    pub window: usize,
    pub negative: usize,
    /// Skip-gram passes.
    pub epochs: usize,
    /// Paragraph-vector passes.
    pub doc_epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub subsample: f64,
    pub min_count: u64,
    pub fusion: Fusion,
    pub seed: Option<u64>,
}

impl Default for EmbedSettings {
    fn default() -> Self {
        let e = EmbedConfig::default();
        EmbedSettings {
            dim: e.dim,
            window: e.window,
            negative: e.negative,
            epochs: e.epochs,
            doc_epochs: 20,
            learning_rate: e.learning_rate,
            min_learning_rate: e.min_learning_rate,
            subsample: e.subsample,
            min_count: 1,
            fusion: Fusion::Sum,
            seed: None,
        }
    }
}

impl EmbedSettings {
    pub fn word_config(&self, seed: u64) -> EmbedConfig {
        EmbedConfig {
            dim: self.dim,
            window: self.window,
            negative: self.negative,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            min_learning_rate: self.min_learning_rate,
            subsample: self.subsample,
            seed,
            doc_mode: false,
        }
    }

    pub fn doc_config(&self, seed: u64) -> EmbedConfig {
        EmbedConfig {
            epochs: self.doc_epochs,
            doc_mode: true,
            ..self.word_config(seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcnSettings {
    /// Widths of the propagation layers; the input width is the embedding dim.
    pub hidden: Vec<usize>,
    pub bias: bool,
    /// Scale each node's initial feature vector to unit length.
    pub normalize_features: bool,
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub patience: usize,
    pub train_features: bool,
    pub seed: Option<u64>,
}

impl Default for GcnSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        GcnSettings {
            hidden: vec![256, 256],
            bias: true,
            normalize_features: true,
            epochs: t.epochs,
            learning_rate: t.learning_rate,
            weight_decay: t.weight_decay,
            patience: t.patience,
            train_features: t.train_features,
            seed: None,
        }
    }
}

impl GcnSettings {
    pub fn layer_plan(&self, input_dim: usize) -> Vec<usize> {
        std::iter::once(input_dim).chain(self.hidden.iter().copied()).collect()
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            seed,
            patience: self.patience,
            train_features: self.train_features,
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSettings {
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiskSettings {
    pub cutoff: f64,
    pub decline_threshold: f64,
}

impl Default for RiskSettings {
    fn default() -> Self {
        RiskSettings {
            cutoff: DEFAULT_CUTOFF,
            decline_threshold: DEFAULT_DECLINE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub dims: Vec<usize>,
    pub hidden: Vec<usize>,
    /// Propagation layers per cell, each of the cell's hidden width.
    pub layers: usize,
    /// Training seeds averaged per cell.
    pub seeds: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            dims: vec![50, 100, 150, 200, 250, 300],
            hidden: vec![16, 32, 64, 128, 256, 512],
            layers: 2,
            seeds: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VizSettings {
    pub perplexity: f64,
    pub iterations: usize,
    pub kmeans_k: usize,
    pub kmeans_restarts: usize,
    pub kmeans_max_iter: usize,
    /// Project skill nodes too, not only occupations.
    pub all_nodes: bool,
}

impl Default for VizSettings {
    fn default() -> Self {
        let t = TsneConfig::default();
        VizSettings {
            perplexity: t.perplexity,
            iterations: t.iterations,
            kmeans_k: 2,
            kmeans_restarts: 10,
            kmeans_max_iter: 300,
            all_nodes: false,
        }
    }
}

/// Stream ids for seeds derived from the master seed.
pub mod stream {
    pub const EMBED: u64 = 1;
    pub const GCN: u64 = 2;
    pub const SPLIT: u64 = 3;
    pub const BASELINE: u64 = 4;
    pub const VIZ: u64 = 5;
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().replace('\n', " ")))
    }

    /// Reads `path` and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<RunConfig> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.paths.resolve_against(base);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn embed_seed(&self) -> u64 {
        self.embed.seed.unwrap_or_else(|| derive(self.seed, stream::EMBED))
    }

    pub fn gcn_seed(&self) -> u64 {
        self.gcn.seed.unwrap_or_else(|| derive(self.seed, stream::GCN))
    }

    pub fn split_seed(&self) -> u64 {
        self.split.seed.unwrap_or_else(|| derive(self.seed, stream::SPLIT))
    }

    pub fn baseline_seed(&self) -> u64 {
        derive(self.seed, stream::BASELINE)
    }

    pub fn viz_seed(&self) -> u64 {
        derive(self.seed, stream::VIZ)
    }

    pub fn declining_path(&self) -> PathBuf {
        self.paths
            .declining
            .clone()
            .unwrap_or_else(|| self.paths.data_dir.join(crate::synthetic::DECLINING_FILE))
    }

    pub fn validate(&self) -> Result<()> {
        self.embed.word_config(0).validate()?;
        if self.gcn.hidden.is_empty() {
            return Err(Error::Config("gcn.hidden needs at least one layer".into()));
        }
        self.gcn.train_config(0).validate()?;
        if !(0.0..=1.0).contains(&self.risk.cutoff) {
            return Err(Error::Config(format!("risk.cutoff {} outside [0, 1]", self.risk.cutoff)));
        }
        if self.sweep.layers == 0 || self.sweep.seeds == 0 {
            return Err(Error::Config("sweep.layers and sweep.seeds must be positive".into()));
        }
        if self.viz.kmeans_k == 0 {
            return Err(Error::Config("viz.kmeans_k must be positive".into()));
        }
        Ok(())
    }
}

impl PathsConfig {
    fn resolve_against(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.data_dir);
        fix(&mut self.out_dir);
        if let Some(p) = self.pretrained.as_mut() {
            fix(p);
        }
        if let Some(p) = self.declining.as_mut() {
            fix(p);
        }
    }
}

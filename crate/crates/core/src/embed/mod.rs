//! Word and document embeddings used as initial node features.
//!
//! Word vectors come from skip-gram with negative sampling, optionally seeded
//! from a pretrained text table. Occupation vectors come from a distributed
//! memory paragraph-vector model whose word vectors start from the skip-gram
//! table. Skill vectors are the sum of their name's word vectors.

mod doc2vec;
mod pretrained;
mod sampling;
mod word2vec;

use log::warn;
use ndarray::{Array1, Array2};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, SkillRecord, Vocabulary};
use crate::error::{Error, Result};
use crate::rng::Rng;

pub use doc2vec::{train_doc2vec, DocModel};
pub use pretrained::{load_pretrained, PretrainedLoad};
pub use word2vec::{train_word2vec, WordModel};

/// How multiple word vectors of a skill name are fused into one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Fusion {
    #[default]
    Sum,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedConfig {
    pub dim: usize,
    /// Maximum context radius; each position samples a radius in `1..=window`.
    pub window: usize,
    pub negative: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    /// Frequent-token subsampling threshold; 0 disables subsampling.
    pub subsample: f64,
    pub seed: u64,
    /// Selects paragraph-vector training; word-only training otherwise.
    pub doc_mode: bool,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            dim: 200,
            window: 5,
            negative: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 0.0001,
            subsample: 1e-3,
            seed: 1,
            doc_mode: false,
        }
    }
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("embedding dimension must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if self.negative == 0 {
            return Err(Error::Config("negative samples must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Vocabulary-indexed word vectors, one row per token.
#[derive(Debug, Clone, PartialEq)]
pub struct WordEmbeddingTable {
    pub vectors: Array2<f64>,
}

impl WordEmbeddingTable {
    /// Uniform init in `[-0.5/dim, 0.5/dim]` per component.
    pub fn random(rows: usize, dim: usize, rng: &mut Rng) -> WordEmbeddingTable {
        WordEmbeddingTable {
            vectors: uniform_rows(rows, dim, rng),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.nrows() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.vectors.iter().all(|v| v.is_finite())
    }
}

/// One row per admitted occupation, in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct DocEmbeddingTable {
    pub vectors: Array2<f64>,
}

impl DocEmbeddingTable {
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.nrows() == 0
    }
}

pub(crate) fn uniform_rows(rows: usize, dim: usize, rng: &mut Rng) -> Array2<f64> {
    let scale = 0.5 / dim as f64;
    Array2::from_shape_simple_fn((rows, dim), || rng.gen_range(-scale..scale))
}

/// Fused vector of a skill name. Out-of-vocabulary tokens are skipped; when
/// none resolve the result is all zeros and the flag is `false`.
pub fn skill_feature(
    skill: &SkillRecord,
    table: &WordEmbeddingTable,
    vocab: &Vocabulary,
    fusion: Fusion,
) -> (Array1<f64>, bool) {
    // Sorted so the floating-point sum does not depend on token order.
    let mut ids = vocab.encode(&tokenize(&skill.name));
    ids.sort_unstable();
    let mut out = Array1::zeros(table.dim());
    for &id in &ids {
        out += &table.vectors.row(id);
    }
    if fusion == Fusion::Mean && !ids.is_empty() {
        out /= ids.len() as f64;
    }
    (out, !ids.is_empty())
}

/// Skill feature matrix in skill order plus the ids whose names did not resolve.
#[derive(Debug, Clone)]
pub struct SkillFeatures {
    pub vectors: Array2<f64>,
    pub unresolved: Vec<String>,
}

pub fn skill_features(
    skills: &[SkillRecord],
    table: &WordEmbeddingTable,
    vocab: &Vocabulary,
    fusion: Fusion,
) -> SkillFeatures {
    let mut vectors = Array2::zeros((skills.len(), table.dim()));
    let mut unresolved = Vec::new();
    for (i, skill) in skills.iter().enumerate() {
        let (v, resolved) = skill_feature(skill, table, vocab, fusion);
        if !resolved {
            warn!("skill {} ({}) has no in-vocabulary token", skill.skill_id, skill.name);
            unresolved.push(skill.skill_id.clone());
        }
        vectors.row_mut(i).assign(&v);
    }
    SkillFeatures {
        vectors,
        unresolved,
    }
}

pub fn cosine(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dot(&b) / (na * nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn vocab(tokens: &[&str]) -> Vocabulary {
        Vocabulary::from_entries(tokens.iter().map(|t| (t.to_string(), 2)).collect())
    }

    fn skill(name: &str) -> SkillRecord {
        SkillRecord {
            skill_id: "2.A.1.a".into(),
            name: name.into(),
        }
    }

    #[test]
    fn skill_feature_sums_word_vectors() {
        let v = vocab(&["critical", "thinking", "programming"]);
        let table = WordEmbeddingTable {
            vectors: array![[1.0, 2.0], [0.5, -1.0], [3.0, 4.0]],
        };
        let (f, ok) = skill_feature(&skill("Critical Thinking"), &table, &v, Fusion::Sum);
        assert!(ok);
        assert_eq!(f, array![1.5, 1.0]);
        let (f, _) = skill_feature(&skill("Programming"), &table, &v, Fusion::Sum);
        assert_eq!(f, array![3.0, 4.0]);
        let (f, _) = skill_feature(&skill("Critical Thinking"), &table, &v, Fusion::Mean);
        assert_eq!(f, array![0.75, 0.5]);
    }

    #[test]
    fn unresolved_skill_is_zero_and_reported() {
        let v = vocab(&["data"]);
        let table = WordEmbeddingTable {
            vectors: array![[1.0, 2.0]],
        };
        let feats = skill_features(&[skill("Glare Sensitivity")], &table, &v, Fusion::Sum);
        assert_eq!(feats.vectors.row(0).to_vec(), vec![0.0, 0.0]);
        assert_eq!(feats.unresolved, vec!["2.A.1.a".to_string()]);
    }

    #[test]
    fn skill_feature_ignores_token_order_bitwise() {
        let v = vocab(&["alpha", "beta", "gamma"]);
        let table = WordEmbeddingTable {
            vectors: array![[0.1, 1e-17], [0.2, 1.0], [0.3, -1.0]],
        };
        let (a, _) = skill_feature(&skill("alpha beta gamma"), &table, &v, Fusion::Sum);
        let (b, _) = skill_feature(&skill("gamma beta alpha"), &table, &v, Fusion::Sum);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn config_validation() {
        assert!(EmbedConfig::default().validate().is_ok());
        let bad = EmbedConfig {
            window: 0,
            ..EmbedConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}

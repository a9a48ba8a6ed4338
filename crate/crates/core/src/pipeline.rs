//! End-to-end stages over a corpus directory, and a [`Run`] that persists
//! each stage's artifacts in an output directory.
//!
//! Stage functions are pure computations over in-memory values. [`Run`]
//! wraps them with file I/O: a stage whose inputs and settings are unchanged
//! reloads its artifact instead of recomputing it, and every command records
//! a manifest entry with the config echo, seeds, and SHA-256 digests of its
//! inputs and outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::info;
use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baseline::{build_feature_matrix, run_baselines, BaselineConfig};
use crate::config::{EmbedSettings, GcnSettings, RunConfig};
use crate::corpus::{Corpus, CorpusPaths, Exclusion, Label, Vocabulary};
use crate::embed::{load_pretrained, skill_features, train_doc2vec, train_word2vec, WordEmbeddingTable};
use crate::error::{Error, Result};
use crate::eval::{self, MetricsRow, Split};
use crate::gcn::{self, GcnModel, History, ModelBundle, TensorData, Topology};
use crate::graph::{build_graph, BipartiteGraph, BuildOptions, GraphFile, NodeKind, StructureReport};
use crate::risk::{self, ComparisonReport, RiskTable};
use crate::rng::{derive, seeded};
use crate::synthetic::{file_digest, FixtureManifest, MANIFEST_FILE as FIXTURE_MANIFEST};
use crate::viz::{self, Projection2D, TsneConfig};

pub const GCN_MODEL_NAME: &str = "AOC-GCN";

pub const INGEST_FILE: &str = "ingest_report.json";
pub const EMBEDDINGS_FILE: &str = "embeddings.json";
pub const GRAPH_FILE: &str = "graph.json";
pub const GRAPH_REPORT_FILE: &str = "graph_report.json";
pub const MODEL_FILE: &str = "model.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const SPLIT_FILE: &str = "split.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const RISK_FILE: &str = "risk_table.csv";
pub const COMPARISON_FILE: &str = "bls_comparison.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const RUN_MANIFEST_FILE: &str = "manifest.json";

const EMBEDDING_BUNDLE_VERSION: u32 = 1;

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn fingerprint<T: Serialize>(value: &T) -> String {
    sha256_hex(serde_json::to_string(value).expect("serializable").as_bytes())
}

/// Summary of a parsed corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub occupations: usize,
    pub skills: usize,
    pub links: usize,
    pub duplicate_links: usize,
    pub task_statements: usize,
    pub labels: usize,
    pub labels_automated: usize,
    pub excluded: Vec<Exclusion>,
    pub inputs: BTreeMap<String, String>,
    /// Whether input digests match a fixture manifest in the data directory;
    /// absent when there is no manifest.
    pub fixture_verified: Option<bool>,
}

pub fn ingest_report(corpus: &Corpus, inputs: BTreeMap<String, String>, fixture: Option<&FixtureManifest>) -> IngestReport {
    let fixture_verified = fixture.map(|m| {
        inputs
            .iter()
            .filter(|(name, _)| m.digests.contains_key(*name))
            .all(|(name, digest)| &m.digests[name] == digest)
    });
    IngestReport {
        occupations: corpus.occupations.len(),
        skills: corpus.skills.len(),
        links: corpus.links.len(),
        duplicate_links: corpus.duplicate_links,
        task_statements: corpus.occupations.iter().map(|o| o.task_statements.len()).sum(),
        labels: corpus.labels.len(),
        labels_automated: corpus.labels.iter().filter(|l| l.label == Label::Automated).count(),
        excluded: corpus.excluded.clone(),
        inputs,
        fixture_verified,
    }
}

/// Initial node features with the vocabulary they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    pub vocab: Vocabulary,
    pub words: Array2<f64>,
    /// Rows follow `occupation_ids`.
    pub occupation_ids: Vec<String>,
    pub docs: Array2<f64>,
    /// Rows follow `skill_ids`.
    pub skill_ids: Vec<String>,
    pub skills: Array2<f64>,
    pub stats: EmbedStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedStats {
    pub vocabulary: usize,
    pub word_initial_loss: f64,
    pub word_final_loss: f64,
    pub doc_initial_loss: f64,
    pub doc_final_loss: f64,
    pub pretrained_coverage: Option<f64>,
    /// Skills whose names have no in-vocabulary token.
    pub unresolved_skills: Vec<String>,
}

/// Skip-gram over task statements and skill profiles, then paragraph vectors
/// over each occupation's task statements, then summed skill-name vectors.
pub fn train_embeddings(corpus: &Corpus, s: &EmbedSettings, seed: u64, pretrained: Option<&Path>) -> Result<Embeddings> {
    let sequences = corpus.training_sequences();
    let vocab = Vocabulary::build(&sequences, s.min_count)?;
    let (init, coverage) = match pretrained {
        Some(path) => {
            let load = load_pretrained(path, &vocab, s.dim, derive(seed, 0))?;
            info!("pretrained vectors cover {:.1}% of the vocabulary", 100.0 * load.coverage);
            (load.table, Some(load.coverage))
        }
        None => (WordEmbeddingTable::random(vocab.len(), s.dim, &mut seeded(derive(seed, 0))), None),
    };
    let words = train_word2vec(&sequences, &vocab, &init, &s.word_config(derive(seed, 1)))?;
    let docs = train_doc2vec(&corpus.task_documents(), &vocab, &words, &s.doc_config(derive(seed, 2)))?;
    let skills = skill_features(&corpus.skills, &words.input, &vocab, s.fusion);
    Ok(Embeddings {
        stats: EmbedStats {
            vocabulary: vocab.len(),
            word_initial_loss: words.initial_loss,
            word_final_loss: words.final_loss,
            doc_initial_loss: docs.initial_loss,
            doc_final_loss: docs.final_loss,
            pretrained_coverage: coverage,
            unresolved_skills: skills.unresolved,
        },
        vocab,
        words: words.input.vectors,
        occupation_ids: corpus.occupations.iter().map(|o| o.soc_code.clone()).collect(),
        docs: docs.docs.vectors,
        skill_ids: corpus.skills.iter().map(|s| s.skill_id.clone()).collect(),
        skills: skills.vectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EmbeddingBundle {
    version: u32,
    fingerprint: String,
    vocabulary: Vec<(String, u64)>,
    occupations: Vec<String>,
    skills: Vec<String>,
    stats: EmbedStats,
    tensors: BTreeMap<String, TensorData>,
}

impl Embeddings {
    fn to_bundle(&self, fingerprint: String) -> EmbeddingBundle {
        EmbeddingBundle {
            version: EMBEDDING_BUNDLE_VERSION,
            fingerprint,
            vocabulary: self
                .vocab
                .tokens()
                .iter()
                .cloned()
                .zip(self.vocab.counts().iter().copied())
                .collect(),
            occupations: self.occupation_ids.clone(),
            skills: self.skill_ids.clone(),
            stats: self.stats.clone(),
            tensors: BTreeMap::from([
                ("words".to_string(), TensorData::from_matrix(&self.words)),
                ("documents".to_string(), TensorData::from_matrix(&self.docs)),
                ("skills".to_string(), TensorData::from_matrix(&self.skills)),
            ]),
        }
    }

    fn from_bundle(b: EmbeddingBundle) -> Result<Embeddings> {
        if b.version != EMBEDDING_BUNDLE_VERSION {
            return Err(Error::ShapeMismatch(format!("unsupported embedding bundle version {}", b.version)));
        }
        let get = |name: &str| {
            b.tensors
                .get(name)
                .ok_or_else(|| Error::ShapeMismatch(format!("embedding bundle lacks {name}")))?
                .to_matrix()
        };
        let (words, docs, skills) = (get("words")?, get("documents")?, get("skills")?);
        if docs.nrows() != b.occupations.len() || skills.nrows() != b.skills.len() || words.nrows() != b.vocabulary.len() {
            return Err(Error::ShapeMismatch("embedding bundle row counts disagree".into()));
        }
        Ok(Embeddings {
            vocab: Vocabulary::from_entries(b.vocabulary),
            words,
            occupation_ids: b.occupations,
            docs,
            skill_ids: b.skills,
            skills,
            stats: b.stats,
        })
    }

    pub fn save(&self, path: &Path, fingerprint: &str) -> Result<()> {
        let text = serde_json::to_string(&self.to_bundle(fingerprint.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Loads a saved table together with the fingerprint it was stored under.
    pub fn load(path: &Path) -> Result<(Embeddings, String)> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bundle: EmbeddingBundle = serde_json::from_str(&text)?;
        let fp = bundle.fingerprint.clone();
        Ok((Embeddings::from_bundle(bundle)?, fp))
    }

    pub fn dim(&self) -> usize {
        self.docs.ncols()
    }
}

/// Graph over the corpus with embedding rows as node features.
pub fn assemble_graph(corpus: &Corpus, emb: &Embeddings) -> Result<BipartiteGraph> {
    let same_occ = corpus.occupations.iter().map(|o| &o.soc_code).eq(emb.occupation_ids.iter());
    let same_skill = corpus.skills.iter().map(|s| &s.skill_id).eq(emb.skill_ids.iter());
    if !same_occ || !same_skill {
        return Err(Error::ShapeMismatch("embeddings were trained on a different corpus".into()));
    }
    build_graph(&corpus.occupations, &corpus.skills, &corpus.links, &emb.docs, &emb.skills, BuildOptions::default())
}

/// Class per graph occupation, `None` where unlabeled.
pub fn graph_labels(graph: &BipartiteGraph, corpus: &Corpus) -> Vec<Option<usize>> {
    let mut labels = vec![None; graph.num_occupations()];
    for l in &corpus.labels {
        if let Some(i) = graph.occupation_index(&l.soc_code) {
            labels[i] = Some(l.label.as_class());
        }
    }
    labels
}

pub fn labeled_split(labels: &[Option<usize>], seed: u64) -> Result<Split> {
    let labeled: Vec<(usize, usize)> = labels.iter().enumerate().filter_map(|(i, c)| c.map(|c| (i, c))).collect();
    eval::split(&labeled, seed)
}

/// Rows scaled to unit Euclidean norm; zero rows stay zero.
pub fn normalize_rows(x: &Array2<f64>) -> Array2<f64> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row /= norm;
        }
    }
    out
}

pub fn initial_model(graph: &BipartiteGraph, s: &GcnSettings, seed: u64) -> Result<GcnModel> {
    let features = if s.normalize_features {
        normalize_rows(&graph.features())
    } else {
        graph.features()
    };
    GcnModel::init(&s.layer_plan(graph.feature_dim()), features, s.bias, derive(seed, 0))
}

pub fn train_model(
    graph: &BipartiteGraph,
    labels: &[Option<usize>],
    split: &Split,
    s: &GcnSettings,
    seed: u64,
) -> Result<(GcnModel, History)> {
    let model = initial_model(graph, s, seed)?;
    gcn::train(&model, &Topology::from_graph(graph), labels, split, &s.train_config(derive(seed, 1)))
}

fn truths(labels: &[Option<usize>], rows: &[usize]) -> Result<Vec<usize>> {
    rows.iter()
        .map(|&r| labels[r].ok_or_else(|| Error::InvalidNode(format!("occupation {r} is unlabeled"))))
        .collect()
}

/// Test-split metrics of the graph model.
pub fn evaluate_model(
    graph: &BipartiteGraph,
    model: &GcnModel,
    labels: &[Option<usize>],
    split: &Split,
    seed: u64,
) -> Result<MetricsRow> {
    let probs = gcn::predict(model, &Topology::from_graph(graph))?;
    let test: Vec<f64> = split.test.iter().map(|&r| probs[r]).collect();
    Ok(MetricsRow {
        model: GCN_MODEL_NAME.to_string(),
        metrics: eval::evaluate(&test, &truths(labels, &split.test)?)?,
        seed,
    })
}

/// The three baselines on padded initial features. They have no use for a
/// validation set, so they train on the training and validation rows together.
pub fn evaluate_baselines(
    graph: &BipartiteGraph,
    labels: &[Option<usize>],
    split: &Split,
    cfg: &BaselineConfig,
    seed: u64,
    report_seed: u64,
) -> Result<Vec<MetricsRow>> {
    let mut fit_rows: Vec<usize> = split.train.iter().chain(&split.validation).copied().collect();
    fit_rows.sort_unstable();
    let docs = graph.occupation_features();
    let skills = graph.skill_features();
    let fit = build_feature_matrix(graph, docs, skills, &fit_rows)?;
    let test = build_feature_matrix(graph, docs, skills, &split.test)?;
    let mut rows = run_baselines(
        &fit.rows,
        &truths(labels, &fit_rows)?,
        &test.rows,
        &truths(labels, &split.test)?,
        cfg,
        seed,
    )?;
    for r in &mut rows {
        r.seed = report_seed;
    }
    Ok(rows)
}

/// Risk table over every graph occupation.
pub fn risk_table(graph: &BipartiteGraph, corpus: &Corpus, probabilities: &[f64], cutoff: f64) -> Result<RiskTable> {
    let titles: BTreeMap<&str, &str> = corpus
        .occupations
        .iter()
        .map(|o| (o.soc_code.as_str(), o.title.as_str()))
        .collect();
    let occupations: Vec<(String, String)> = graph
        .occupation_ids()
        .iter()
        .map(|id| (id.clone(), titles.get(id.as_str()).copied().unwrap_or_default().to_string()))
        .collect();
    risk::rank(probabilities, &occupations, cutoff)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub d0: usize,
    pub hidden: usize,
    pub accuracy: f64,
    pub f1: f64,
}

pub const SWEEP_HEADER: &str = "d0,hidden,accuracy,f1";

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for c in cells {
        out.push_str(&format!("{},{},{:.6},{:.6}\n", c.d0, c.hidden, c.accuracy, c.f1));
    }
    out
}

/// Trains one model per grid cell and seed on a shared split; metrics are
/// averaged over the cell's seeds. Embeddings are trained once per `d0`.
pub fn run_sweep(corpus: &Corpus, cfg: &RunConfig) -> Result<Vec<SweepCell>> {
    let mut cells = Vec::new();
    for &d0 in &cfg.sweep.dims {
        let settings = EmbedSettings { dim: d0, ..cfg.embed.clone() };
        let emb = train_embeddings(corpus, &settings, cfg.embed_seed(), cfg.paths.pretrained.as_deref())?;
        let graph = assemble_graph(corpus, &emb)?;
        let labels = graph_labels(&graph, corpus);
        let split = labeled_split(&labels, cfg.split_seed())?;
        let row: Vec<SweepCell> = cfg
            .sweep
            .hidden
            .par_iter()
            .map(|&h| -> Result<SweepCell> {
                let s = GcnSettings {
                    hidden: vec![h; cfg.sweep.layers],
                    ..cfg.gcn.clone()
                };
                let (mut acc, mut f1) = (0.0, 0.0);
                for k in 0..cfg.sweep.seeds {
                    let seed = derive(cfg.gcn_seed(), k as u64);
                    let (model, _) = train_model(&graph, &labels, &split, &s, seed)?;
                    let m = evaluate_model(&graph, &model, &labels, &split, seed)?.metrics;
                    acc += m.accuracy;
                    f1 += m.f1;
                }
                let n = cfg.sweep.seeds as f64;
                info!("sweep d0={d0} hidden={h}: f1 {:.4}", f1 / n);
                Ok(SweepCell {
                    d0,
                    hidden: h,
                    accuracy: acc / n,
                    f1: f1 / n,
                })
            })
            .collect::<Result<_>>()?;
        cells.extend(row);
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMethod {
    Pca,
    Kmeans,
    Tsne,
}

impl ProjectionMethod {
    pub fn name(self) -> &'static str {
        match self {
            ProjectionMethod::Pca => "pca",
            ProjectionMethod::Kmeans => "kmeans",
            ProjectionMethod::Tsne => "tsne",
        }
    }
}

/// Final-layer node embeddings: occupations, then skills when `all_nodes`.
/// Occupations are tagged with their predicted class, skills with `skill`.
pub fn node_embeddings(graph: &BipartiteGraph, model: &GcnModel, all_nodes: bool) -> Result<(Vec<String>, Array2<f64>, Vec<String>)> {
    let cache = gcn::forward(model, &Topology::from_graph(graph))?;
    let probs = cache.automated();
    let mut ids = Vec::new();
    let mut tags = Vec::new();
    let mut rows = Vec::new();
    for g in 0..graph.num_nodes() {
        let node = graph.node_at(g);
        match node.kind {
            NodeKind::Occupation => {
                ids.push(graph.occupation_ids()[node.index].clone());
                let class = eval::predicted_class(probs[node.index]);
                tags.push(Label::from_class(class).expect("binary class").name().to_string());
            }
            NodeKind::Skill if all_nodes => {
                ids.push(graph.skill_ids()[node.index].clone());
                tags.push("skill".to_string());
            }
            NodeKind::Skill => continue,
        }
        rows.push(g);
    }
    let x = cache.last.select(ndarray::Axis(0), &rows);
    Ok((ids, x, tags))
}

/// Two-dimensional view of `x`. K-means colors points by cluster and draws
/// them on the first two principal components.
pub fn project(
    method: ProjectionMethod,
    ids: Vec<String>,
    x: &Array2<f64>,
    tags: Vec<String>,
    cfg: &RunConfig,
) -> Result<Projection2D> {
    let seed = cfg.viz_seed();
    let v = &cfg.viz;
    match method {
        ProjectionMethod::Pca => Projection2D::new(ids, viz::pca(x, 2)?.projected, Some(tags)),
        ProjectionMethod::Kmeans => {
            let km = viz::kmeans_restarts(x, v.kmeans_k, seed, v.kmeans_restarts, v.kmeans_max_iter)?;
            let labels = km.assignments.iter().map(|c| format!("cluster {c}")).collect();
            Projection2D::new(ids, viz::pca(x, 2)?.projected, Some(labels))
        }
        ProjectionMethod::Tsne => {
            let t = viz::tsne(
                x,
                &TsneConfig {
                    perplexity: v.perplexity,
                    iterations: v.iterations,
                    seed,
                    ..TsneConfig::default()
                },
            )?;
            info!("t-SNE KL {:.4} -> {:.4}", t.initial_kl, t.final_kl);
            Projection2D::new(ids, t.coords, Some(tags))
        }
    }
}

/// One command's record in the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub command: String,
    pub version: String,
    pub deterministic: bool,
    pub seeds: BTreeMap<String, u64>,
    /// Full configuration as TOML.
    pub config: String,
    pub inputs: BTreeMap<String, String>,
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub commands: BTreeMap<String, ManifestEntry>,
}

/// A configured run writing into `cfg.paths.out_dir`.
pub struct Run {
    pub cfg: RunConfig,
}

impl Run {
    pub fn new(cfg: RunConfig) -> Result<Run> {
        cfg.validate()?;
        let data = &cfg.paths.data_dir;
        if !data.is_dir() {
            return Err(Error::MissingFile(data.clone()));
        }
        let out = &cfg.paths.out_dir;
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        Ok(Run { cfg })
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.cfg.paths.out_dir.join(name)
    }

    pub fn corpus(&self) -> Result<Corpus> {
        Corpus::load(&self.cfg.paths.data_dir)
    }

    /// Digests of the corpus files, plus the pretrained table when set.
    pub fn input_digests(&self) -> Result<BTreeMap<String, String>> {
        let paths = CorpusPaths::in_dir(&self.cfg.paths.data_dir);
        let mut out = BTreeMap::new();
        for p in paths.all() {
            out.insert(p.file_name().expect("file").to_string_lossy().into_owned(), file_digest(p)?);
        }
        if let Some(p) = &self.cfg.paths.pretrained {
            out.insert("pretrained".into(), file_digest(p)?);
        }
        Ok(out)
    }

    fn seeds(&self) -> BTreeMap<String, u64> {
        BTreeMap::from([
            ("master".into(), self.cfg.seed),
            ("embed".into(), self.cfg.embed_seed()),
            ("gcn".into(), self.cfg.gcn_seed()),
            ("split".into(), self.cfg.split_seed()),
            ("baseline".into(), self.cfg.baseline_seed()),
            ("viz".into(), self.cfg.viz_seed()),
        ])
    }

    fn embed_fingerprint(&self) -> Result<String> {
        Ok(fingerprint(&(self.input_digests()?, &self.cfg.embed, self.cfg.embed_seed())))
    }

    fn model_fingerprint(&self) -> Result<String> {
        Ok(fingerprint(&(
            self.embed_fingerprint()?,
            &self.cfg.gcn,
            self.cfg.gcn_seed(),
            self.cfg.split_seed(),
        )))
    }

    fn write(&self, name: &str, contents: &str, artifacts: &mut BTreeMap<String, String>) -> Result<()> {
        let path = self.out(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        artifacts.insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    fn record(&self, command: &str, extra_inputs: &[&Path], artifacts: BTreeMap<String, String>) -> Result<()> {
        let mut inputs = self.input_digests()?;
        for p in extra_inputs {
            inputs.insert(p.file_name().expect("file").to_string_lossy().into_owned(), file_digest(p)?);
        }
        let path = self.out(RUN_MANIFEST_FILE);
        let mut manifest: RunManifest = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).unwrap_or_default(),
            Err(_) => RunManifest::default(),
        };
        manifest.commands.insert(
            command.to_string(),
            ManifestEntry {
                command: command.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                deterministic: self.cfg.deterministic,
                seeds: self.seeds(),
                config: self.cfg.to_toml(),
                inputs,
                artifacts,
            },
        );
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    /// Cached embeddings when the stored fingerprint matches, else trains
    /// and stores them.
    pub fn embeddings(&self, corpus: &Corpus, force: bool) -> Result<Embeddings> {
        let path = self.out(EMBEDDINGS_FILE);
        let fp = self.embed_fingerprint()?;
        if !force && path.exists() {
            let (emb, stored) = Embeddings::load(&path)?;
            if stored == fp {
                return Ok(emb);
            }
        }
        info!("training embeddings (d0 = {})", self.cfg.embed.dim);
        let emb = train_embeddings(corpus, &self.cfg.embed, self.cfg.embed_seed(), self.cfg.paths.pretrained.as_deref())?;
        emb.save(&path, &fp)?;
        Ok(emb)
    }

    fn model_config_echo(&self, fp: &str) -> serde_json::Value {
        serde_json::json!({
            "fingerprint": fp,
            "embed": self.cfg.embed,
            "gcn": self.cfg.gcn,
            "split_seed": self.cfg.split_seed(),
        })
    }

    /// Cached model when current, else trains it and writes the bundle,
    /// training history and split.
    pub fn model(&self, graph: &BipartiteGraph, labels: &[Option<usize>], split: &Split, force: bool) -> Result<GcnModel> {
        let path = self.out(MODEL_FILE);
        let fp = self.model_fingerprint()?;
        if !force && path.exists() {
            let bundle = ModelBundle::load(&path)?;
            if bundle.config.get("fingerprint").and_then(|v| v.as_str()) == Some(fp.as_str()) {
                return bundle.to_model();
            }
        }
        info!("training graph model {:?}", self.cfg.gcn.layer_plan(graph.feature_dim()));
        let (model, history) = train_model(graph, labels, split, &self.cfg.gcn, self.cfg.gcn_seed())?;
        info!(
            "best epoch {} (validation F1 {:?}), early stop: {}",
            history.best_epoch, history.best_val_f1, history.stopped_early
        );
        ModelBundle::from_model(&model, self.cfg.gcn_seed(), self.model_config_echo(&fp)).save(&path)?;
        let hist = self.out(HISTORY_FILE);
        std::fs::write(&hist, history.to_csv()).map_err(|e| Error::io(&hist, e))?;
        Ok(model)
    }

    /// Corpus, embeddings, graph, labels and split: the inputs of every
    /// model-level command.
    pub fn prepared(&self) -> Result<Prepared> {
        let corpus = self.corpus()?;
        let emb = self.embeddings(&corpus, false)?;
        let graph = assemble_graph(&corpus, &emb)?;
        let labels = graph_labels(&graph, &corpus);
        let split = labeled_split(&labels, self.cfg.split_seed())?;
        Ok(Prepared {
            corpus,
            graph,
            labels,
            split,
        })
    }

    pub fn ingest(&self) -> Result<IngestReport> {
        let corpus = self.corpus()?;
        let fixture_path = self.cfg.paths.data_dir.join(FIXTURE_MANIFEST);
        let fixture: Option<FixtureManifest> = if fixture_path.exists() {
            let text = std::fs::read_to_string(&fixture_path).map_err(|e| Error::io(&fixture_path, e))?;
            Some(serde_json::from_str(&text)?)
        } else {
            None
        };
        let report = ingest_report(&corpus, self.input_digests()?, fixture.as_ref());
        let mut artifacts = BTreeMap::new();
        self.write(INGEST_FILE, &(serde_json::to_string_pretty(&report)? + "\n"), &mut artifacts)?;
        self.record("ingest", &[], artifacts)?;
        Ok(report)
    }

    pub fn embed(&self) -> Result<Embeddings> {
        let corpus = self.corpus()?;
        let emb = self.embeddings(&corpus, true)?;
        let artifacts = BTreeMap::from([(EMBEDDINGS_FILE.to_string(), file_digest(&self.out(EMBEDDINGS_FILE))?)]);
        self.record("embed", &[], artifacts)?;
        Ok(emb)
    }

    pub fn build_graph(&self) -> Result<(BipartiteGraph, StructureReport)> {
        let corpus = self.corpus()?;
        let emb = self.embeddings(&corpus, false)?;
        let graph = assemble_graph(&corpus, &emb)?;
        let report = graph.validate();
        let mut artifacts = BTreeMap::new();
        let file: GraphFile = graph.to_file();
        self.write(GRAPH_FILE, &serde_json::to_string(&file)?, &mut artifacts)?;
        self.write(GRAPH_REPORT_FILE, &(serde_json::to_string_pretty(&report)? + "\n"), &mut artifacts)?;
        self.record("build-graph", &[], artifacts)?;
        Ok((graph, report))
    }

    pub fn train(&self) -> Result<GcnModel> {
        let p = self.prepared()?;
        let model = self.model(&p.graph, &p.labels, &p.split, true)?;
        let mut artifacts = BTreeMap::new();
        self.write(SPLIT_FILE, &(serde_json::to_string_pretty(&p.split)? + "\n"), &mut artifacts)?;
        for name in [MODEL_FILE, HISTORY_FILE] {
            artifacts.insert(name.to_string(), file_digest(&self.out(name))?);
        }
        self.record("train", &[], artifacts)?;
        Ok(model)
    }

    pub fn evaluate(&self) -> Result<Vec<MetricsRow>> {
        let p = self.prepared()?;
        let model = self.model(&p.graph, &p.labels, &p.split, false)?;
        let mut rows = vec![evaluate_model(&p.graph, &model, &p.labels, &p.split, self.cfg.seed)?];
        rows.extend(evaluate_baselines(
            &p.graph,
            &p.labels,
            &p.split,
            &self.cfg.baseline,
            self.cfg.baseline_seed(),
            self.cfg.seed,
        )?);
        let mut artifacts = BTreeMap::new();
        self.write(METRICS_FILE, &eval::metrics_csv(&rows), &mut artifacts)?;
        self.record("evaluate", &[], artifacts)?;
        Ok(rows)
    }

    fn risk(&self, p: &Prepared) -> Result<RiskTable> {
        let model = self.model(&p.graph, &p.labels, &p.split, false)?;
        let probs = gcn::predict(&model, &Topology::from_graph(&p.graph))?;
        risk_table(&p.graph, &p.corpus, &probs, self.cfg.risk.cutoff)
    }

    pub fn predict(&self) -> Result<RiskTable> {
        let p = self.prepared()?;
        let table = self.risk(&p)?;
        let mut artifacts = BTreeMap::new();
        self.write(RISK_FILE, &table.to_csv()?, &mut artifacts)?;
        self.record("predict", &[], artifacts)?;
        Ok(table)
    }

    pub fn compare_bls(&self) -> Result<ComparisonReport> {
        let declining_path = self.cfg.declining_path();
        let declining = risk::parse_declining(&declining_path)?;
        let p = self.prepared()?;
        let table = self.risk(&p)?;
        let report = risk::compare_declining(&table, &declining, self.cfg.risk.decline_threshold)?;
        let mut artifacts = BTreeMap::new();
        self.write(COMPARISON_FILE, &report.to_csv()?, &mut artifacts)?;
        self.record("compare-bls", &[&declining_path], artifacts)?;
        Ok(report)
    }

    pub fn sweep(&self) -> Result<Vec<SweepCell>> {
        let corpus = self.corpus()?;
        let cells = run_sweep(&corpus, &self.cfg)?;
        let mut artifacts = BTreeMap::new();
        self.write(SWEEP_FILE, &sweep_csv(&cells), &mut artifacts)?;
        self.record("sweep", &[], artifacts)?;
        Ok(cells)
    }

    pub fn project(&self, method: ProjectionMethod) -> Result<Projection2D> {
        let p = self.prepared()?;
        let model = self.model(&p.graph, &p.labels, &p.split, false)?;
        let (ids, x, tags) = node_embeddings(&p.graph, &model, self.cfg.viz.all_nodes)?;
        let projection = project(method, ids, &x, tags, &self.cfg)?;
        let stem = format!("projection_{}", method.name());
        let mut artifacts = BTreeMap::new();
        self.write(&format!("{stem}.csv"), &projection.to_csv()?, &mut artifacts)?;
        let title = match method {
            ProjectionMethod::Pca => "PCA of graph embeddings",
            ProjectionMethod::Kmeans => "K-means clusters on principal components",
            ProjectionMethod::Tsne => "t-SNE of graph embeddings",
        };
        self.write(&format!("{stem}.svg"), &viz::render_scatter(&projection, title), &mut artifacts)?;
        self.record(&format!("project-{}", method.name()), &[], artifacts)?;
        Ok(projection)
    }
}

/// Shared inputs of the model-level commands.
pub struct Prepared {
    pub corpus: Corpus,
    pub graph: BipartiteGraph,
    pub labels: Vec<Option<usize>>,
    pub split: Split,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_csv_layout() {
        let cells = vec![SweepCell {
            d0: 50,
            hidden: 16,
            accuracy: 0.5,
            f1: 2.0 / 3.0,
        }];
        assert_eq!(sweep_csv(&cells), "d0,hidden,accuracy,f1\n50,16,0.500000,0.666667\n");
    }

    #[test]
    fn fixture_verification_detects_edits() {
        let manifest = FixtureManifest {
            generator: String::new(),
            spec: Default::default(),
            counts: BTreeMap::new(),
            skill_sources: Vec::new(),
            provenance: Vec::new(),
            digests: BTreeMap::from([("skills.csv".to_string(), "aa".to_string())]),
        };
        let corpus = Corpus {
            occupations: Vec::new(),
            skills: Vec::new(),
            links: Vec::new(),
            labels: Vec::new(),
            duplicate_links: 0,
            excluded: Vec::new(),
        };
        let good = BTreeMap::from([("skills.csv".to_string(), "aa".to_string())]);
        let bad = BTreeMap::from([("skills.csv".to_string(), "bb".to_string())]);
        assert_eq!(ingest_report(&corpus, good, Some(&manifest)).fixture_verified, Some(true));
        assert_eq!(ingest_report(&corpus, bad.clone(), Some(&manifest)).fixture_verified, Some(false));
        assert_eq!(ingest_report(&corpus, bad, None).fixture_verified, None);
    }
}

use log::warn;
use ndarray::Array2;
use rand::Rng as _;

use super::sampling::{decayed_rate, keep_probabilities, NegativeSampler};
use super::word2vec::{axpy, negative_step, Rows, WordModel};
use super::{uniform_rows, DocEmbeddingTable, EmbedConfig, WordEmbeddingTable};
use crate::corpus::{TokenSequence, Vocabulary};
use crate::error::{Error, Result};
use crate::rng::{derive, seeded};

/// Paragraph vectors trained with the distributed-memory objective.
#[derive(Debug, Clone)]
pub struct DocModel {
    pub docs: DocEmbeddingTable,
    /// Word vectors after joint training (shared with the document objective).
    pub words: WordEmbeddingTable,
    pub epoch_losses: Vec<f64>,
    pub initial_loss: f64,
    pub final_loss: f64,
}

/// One document per occupation, each a list of tokenized task statements.
/// Context windows never cross statement boundaries.
///
/// The hidden vector for a target token is the mean of the document vector
/// and the context word vectors; word input and output vectors start from
/// `words` and are updated along with the document vectors.
pub fn train_doc2vec(
    documents: &[Vec<TokenSequence>],
    vocab: &Vocabulary,
    words: &WordModel,
    cfg: &EmbedConfig,
) -> Result<DocModel> {
    cfg.validate()?;
    if words.input.dim() != cfg.dim {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim,
            found: words.input.dim(),
        });
    }
    if words.input.len() != vocab.len() {
        return Err(Error::ShapeMismatch(format!(
            "word table has {} rows for a vocabulary of {}",
            words.input.len(),
            vocab.len()
        )));
    }
    let encoded: Vec<Vec<Vec<usize>>> = documents
        .iter()
        .map(|doc| {
            doc.iter()
                .map(|s| vocab.encode(s))
                .filter(|s| !s.is_empty())
                .collect()
        })
        .collect();
    let total_tokens: usize = encoded.iter().flatten().map(Vec::len).sum();
    if documents.is_empty() || total_tokens == 0 {
        return Err(Error::EmptyCorpus);
    }
    let empty_docs = encoded.iter().filter(|d| d.is_empty()).count();
    if empty_docs > 0 {
        warn!("{empty_docs} documents have no in-vocabulary tokens and keep their initial vectors");
    }

    let dim = cfg.dim;
    let mut docs = uniform_rows(documents.len(), dim, &mut seeded(cfg.seed));
    let mut input = words.input.vectors.clone();
    let mut output = words.output.clone();
    let sampler = NegativeSampler::new(vocab.counts());
    let keep = keep_probabilities(vocab.counts(), cfg.subsample);

    let eval_seed = derive(cfg.seed, 0xD0C5);
    let mut state = State {
        docs: &mut docs,
        input: &mut input,
        output: &mut output,
    };
    let initial_loss = state.evaluate(&encoded, &sampler, cfg, eval_seed);

    let mut rng = seeded(derive(cfg.seed, 1));
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let budget = (cfg.epochs * total_tokens) as f64;
    let mut processed = 0usize;
    let mut hidden = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut kept = Vec::new();
    let mut context = Vec::new();
    for _ in 0..cfg.epochs {
        let mut loss_sum = 0.0;
        let mut steps = 0usize;
        for (doc_id, doc) in encoded.iter().enumerate() {
            for seq in doc {
                kept.clear();
                for &w in seq {
                    if keep[w] >= 1.0 || rng.gen::<f64>() < keep[w] {
                        kept.push(w);
                    }
                }
                for pos in 0..kept.len() {
                    let lr = decayed_rate(
                        cfg.learning_rate,
                        cfg.min_learning_rate,
                        processed as f64 / budget,
                    );
                    let radius = rng.gen_range(1..=cfg.window);
                    context.clear();
                    let lo = pos.saturating_sub(radius);
                    let hi = (pos + radius).min(kept.len() - 1);
                    context.extend((lo..=hi).filter(|&c| c != pos).map(|c| kept[c]));
                    loss_sum += state.step(
                        doc_id,
                        &context,
                        kept[pos],
                        &sampler,
                        cfg.negative,
                        lr,
                        &mut hidden,
                        &mut grad,
                        &mut rng,
                        true,
                    );
                    steps += 1;
                    processed += 1;
                }
                processed += seq.len() - kept.len();
            }
        }
        epoch_losses.push(if steps > 0 { loss_sum / steps as f64 } else { 0.0 });
    }
    let final_loss = state.evaluate(&encoded, &sampler, cfg, eval_seed);

    Ok(DocModel {
        docs: DocEmbeddingTable { vectors: docs },
        words: WordEmbeddingTable { vectors: input },
        epoch_losses,
        initial_loss,
        final_loss,
    })
}

struct State<'a> {
    docs: &'a mut Array2<f64>,
    input: &'a mut Array2<f64>,
    output: &'a mut Array2<f64>,
}

impl State<'_> {
    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        doc_id: usize,
        context: &[usize],
        target: usize,
        sampler: &NegativeSampler,
        negative: usize,
        lr: f64,
        hidden: &mut [f64],
        grad: &mut [f64],
        rng: &mut crate::rng::Rng,
        update: bool,
    ) -> f64 {
        let dim = hidden.len();
        let mut docs = Rows {
            data: self.docs.as_slice_mut().expect("standard layout"),
            dim,
        };
        let mut words = Rows {
            data: self.input.as_slice_mut().expect("standard layout"),
            dim,
        };
        let mut output = Rows {
            data: self.output.as_slice_mut().expect("standard layout"),
            dim,
        };
        hidden.copy_from_slice(docs.row(doc_id));
        for &w in context {
            axpy(1.0, words.row(w), hidden);
        }
        let scale = 1.0 / (1 + context.len()) as f64;
        hidden.iter_mut().for_each(|h| *h *= scale);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let loss = negative_step(hidden, target, &mut output, sampler, negative, lr, grad, rng, update);
        if update {
            axpy(1.0, grad, docs.row_mut(doc_id));
            for &w in context {
                axpy(1.0, grad, words.row_mut(w));
            }
        }
        loss
    }

    fn evaluate(
        &mut self,
        encoded: &[Vec<Vec<usize>>],
        sampler: &NegativeSampler,
        cfg: &EmbedConfig,
        seed: u64,
    ) -> f64 {
        let mut rng = seeded(seed);
        let mut hidden = vec![0.0; cfg.dim];
        let mut grad = vec![0.0; cfg.dim];
        let mut context = Vec::new();
        let mut loss = 0.0;
        let mut steps = 0usize;
        for (doc_id, doc) in encoded.iter().enumerate() {
            for seq in doc {
                for pos in 0..seq.len() {
                    context.clear();
                    let lo = pos.saturating_sub(cfg.window);
                    let hi = (pos + cfg.window).min(seq.len() - 1);
                    context.extend((lo..=hi).filter(|&c| c != pos).map(|c| seq[c]));
                    loss += self.step(
                        doc_id,
                        &context,
                        seq[pos],
                        sampler,
                        cfg.negative,
                        0.0,
                        &mut hidden,
                        &mut grad,
                        &mut rng,
                        false,
                    );
                    steps += 1;
                }
            }
        }
        if steps == 0 {
            0.0
        } else {
            loss / steps as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;
    use crate::embed::{cosine, train_word2vec};

    fn docs() -> Vec<Vec<TokenSequence>> {
        let clerk = vec![
            tokenize("file paper records in the cabinet"),
            tokenize("sort incoming mail and record invoices"),
        ];
        let surgeon = vec![
            tokenize("operate on patients under anesthesia"),
            tokenize("diagnose injuries and prescribe treatment"),
        ];
        vec![clerk.clone(), clerk, surgeon]
    }

    fn setup(dim: usize) -> (Vocabulary, WordModel) {
        let seqs: Vec<TokenSequence> = docs().into_iter().flatten().collect();
        let vocab = Vocabulary::build(&seqs, 1).unwrap();
        let cfg = EmbedConfig {
            dim,
            epochs: 50,
            subsample: 0.0,
            ..EmbedConfig::default()
        };
        let init = WordEmbeddingTable::random(vocab.len(), dim, &mut seeded(1));
        let words = train_word2vec(&seqs, &vocab, &init, &cfg).unwrap();
        (vocab, words)
    }

    #[test]
    fn identical_documents_embed_closer() {
        let (vocab, words) = setup(16);
        let cfg = EmbedConfig {
            dim: 16,
            epochs: 200,
            subsample: 0.0,
            window: 2,
            doc_mode: true,
            ..EmbedConfig::default()
        };
        let model = train_doc2vec(&docs(), &vocab, &words, &cfg).unwrap();
        let v = &model.docs.vectors;
        assert!(cosine(v.row(0), v.row(1)) > cosine(v.row(0), v.row(2)));
        assert!(model.final_loss < model.initial_loss);
    }

    #[test]
    fn zero_epochs_keeps_seeded_init() {
        let (vocab, words) = setup(8);
        let cfg = EmbedConfig {
            dim: 8,
            epochs: 0,
            seed: 11,
            ..EmbedConfig::default()
        };
        let one = vec![docs()[0].clone()];
        let model = train_doc2vec(&one, &vocab, &words, &cfg).unwrap();
        let expected = uniform_rows(1, 8, &mut seeded(11));
        assert_eq!(model.docs.vectors, expected);
    }

    #[test]
    fn empty_documents_are_rejected() {
        let (vocab, words) = setup(8);
        let cfg = EmbedConfig {
            dim: 8,
            ..EmbedConfig::default()
        };
        assert!(matches!(
            train_doc2vec(&[], &vocab, &words, &cfg),
            Err(Error::EmptyCorpus)
        ));
    }
}

use ndarray::Array2;
use rand::Rng as _;

use super::sampling::{decayed_rate, keep_probabilities, neg_log_sigmoid, sigmoid, NegativeSampler};
use super::{EmbedConfig, WordEmbeddingTable};
use crate::corpus::{TokenSequence, Vocabulary};
use crate::error::{Error, Result};
use crate::rng::{derive, seeded, Rng};

/// Skip-gram output of one training run.
#[derive(Debug, Clone)]
pub struct WordModel {
    /// Input vectors: the word embedding table.
    pub input: WordEmbeddingTable,
    /// Output (context) vectors, zero-initialized.
    pub output: Array2<f64>,
    /// Mean pair loss observed while training each epoch.
    pub epoch_losses: Vec<f64>,
    /// Mean pair loss of a fixed evaluation pass before training.
    pub initial_loss: f64,
    /// Same evaluation pass after training.
    pub final_loss: f64,
}

/// Flat row-major storage with row slices.
pub(super) struct Rows<'a> {
    pub data: &'a mut [f64],
    pub dim: usize,
}

impl Rows<'_> {
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }
}

#[inline]
pub(super) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(super) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// One negative-sampling step for hidden vector `hidden` against `target`.
/// Accumulates the hidden-side gradient into `grad` and updates output rows.
/// Returns the pair loss before the update.
#[allow(clippy::too_many_arguments)]
pub(super) fn negative_step(
    hidden: &[f64],
    target: usize,
    output: &mut Rows<'_>,
    sampler: &NegativeSampler,
    negative: usize,
    lr: f64,
    grad: &mut [f64],
    rng: &mut Rng,
    update: bool,
) -> f64 {
    let mut loss = 0.0;
    for d in 0..=negative {
        let (word, label) = if d == 0 {
            (target, 1.0)
        } else {
            let w = sampler.sample(rng);
            if w == target {
                continue;
            }
            (w, 0.0)
        };
        let f = dot(hidden, output.row(word));
        loss += if label > 0.0 {
            neg_log_sigmoid(f)
        } else {
            neg_log_sigmoid(-f)
        };
        if update {
            let g = (label - sigmoid(f)) * lr;
            axpy(g, output.row(word), grad);
            axpy(g, hidden, output.row_mut(word));
        }
    }
    loss
}

fn encode_all(sequences: &[TokenSequence], vocab: &Vocabulary) -> Vec<Vec<usize>> {
    sequences
        .iter()
        .map(|s| vocab.encode(s))
        .filter(|s| !s.is_empty())
        .collect()
}

/// Trains skip-gram with negative sampling starting from `init`.
///
/// Single-threaded and bit-reproducible for a given seed.
pub fn train_word2vec(
    sequences: &[TokenSequence],
    vocab: &Vocabulary,
    init: &WordEmbeddingTable,
    cfg: &EmbedConfig,
) -> Result<WordModel> {
    cfg.validate()?;
    if init.dim() != cfg.dim {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim,
            found: init.dim(),
        });
    }
    if init.len() != vocab.len() {
        return Err(Error::ShapeMismatch(format!(
            "embedding table has {} rows for a vocabulary of {}",
            init.len(),
            vocab.len()
        )));
    }
    let encoded = encode_all(sequences, vocab);
    let total_tokens: usize = encoded.iter().map(Vec::len).sum();
    if total_tokens == 0 {
        return Err(Error::EmptyCorpus);
    }

    let dim = cfg.dim;
    let sampler = NegativeSampler::new(vocab.counts());
    let keep = keep_probabilities(vocab.counts(), cfg.subsample);
    let mut input = init.vectors.clone();
    let mut output = Array2::<f64>::zeros((vocab.len(), dim));

    let eval_seed = derive(cfg.seed, 0xE7A1);
    let initial_loss = evaluate(&encoded, &mut input, &mut output, &sampler, cfg, eval_seed);

    let mut rng = seeded(cfg.seed);
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut grad = vec![0.0; dim];
    let mut hidden = vec![0.0; dim];
    let budget = (cfg.epochs * total_tokens) as f64;
    let mut processed = 0usize;
    {
        let mut syn0 = Rows {
            data: input.as_slice_mut().expect("standard layout"),
            dim,
        };
        let mut syn1 = Rows {
            data: output.as_slice_mut().expect("standard layout"),
            dim,
        };
        let mut kept = Vec::new();
        for _ in 0..cfg.epochs {
            let mut loss_sum = 0.0;
            let mut pairs = 0usize;
            for seq in &encoded {
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
                    let lo = pos.saturating_sub(radius);
                    let hi = (pos + radius).min(kept.len() - 1);
                    for ctx in lo..=hi {
                        if ctx == pos {
                            continue;
                        }
                        let input_word = kept[ctx];
                        grad.iter_mut().for_each(|g| *g = 0.0);
                        hidden.copy_from_slice(syn0.row(input_word));
                        loss_sum += negative_step(
                            &hidden,
                            kept[pos],
                            &mut syn1,
                            &sampler,
                            cfg.negative,
                            lr,
                            &mut grad,
                            &mut rng,
                            true,
                        );
                        pairs += 1;
                        axpy(1.0, &grad, syn0.row_mut(input_word));
                    }
                    processed += 1;
                }
                processed += seq.len() - kept.len();
            }
            epoch_losses.push(if pairs > 0 { loss_sum / pairs as f64 } else { 0.0 });
        }
    }

    let final_loss = evaluate(&encoded, &mut input, &mut output, &sampler, cfg, eval_seed);
    Ok(WordModel {
        input: WordEmbeddingTable { vectors: input },
        output,
        epoch_losses,
        initial_loss,
        final_loss,
    })
}

/// Mean pair loss over the full corpus with the widest window, no
/// subsampling and negatives drawn from a fixed seed.
fn evaluate(
    encoded: &[Vec<usize>],
    input: &mut Array2<f64>,
    output: &mut Array2<f64>,
    sampler: &NegativeSampler,
    cfg: &EmbedConfig,
    seed: u64,
) -> f64 {
    let dim = input.ncols();
    let mut rng = seeded(seed);
    let syn0 = Rows {
        data: input.as_slice_mut().expect("standard layout"),
        dim,
    };
    let mut syn1 = Rows {
        data: output.as_slice_mut().expect("standard layout"),
        dim,
    };
    let mut grad = vec![0.0; dim];
    let mut loss = 0.0;
    let mut pairs = 0usize;
    for seq in encoded {
        for pos in 0..seq.len() {
            let lo = pos.saturating_sub(cfg.window);
            let hi = (pos + cfg.window).min(seq.len() - 1);
            for ctx in lo..=hi {
                if ctx == pos {
                    continue;
                }
                loss += negative_step(
                    syn0.row(seq[ctx]),
                    seq[pos],
                    &mut syn1,
                    sampler,
                    cfg.negative,
                    0.0,
                    &mut grad,
                    &mut rng,
                    false,
                );
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        loss / pairs as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;
    use crate::embed::cosine;

    fn corpus() -> Vec<TokenSequence> {
        let mut seqs = Vec::new();
        for _ in 0..20 {
            seqs.push(tokenize("the clerk files paper records in the cabinet"));
            seqs.push(tokenize("the clerk sorts paper records in the cabinet"));
            seqs.push(tokenize("surgeons operate patients under anesthesia carefully"));
        }
        seqs
    }

    fn cfg(dim: usize, epochs: usize) -> EmbedConfig {
        EmbedConfig {
            dim,
            epochs,
            subsample: 0.0,
            window: 3,
            ..EmbedConfig::default()
        }
    }

    #[test]
    fn zero_epochs_is_identity() {
        let seqs = corpus();
        let vocab = Vocabulary::build(&seqs, 1).unwrap();
        let init = WordEmbeddingTable::random(vocab.len(), 8, &mut seeded(1));
        let model = train_word2vec(&seqs, &vocab, &init, &cfg(8, 0)).unwrap();
        assert_eq!(model.input, init);
        assert!(model.epoch_losses.is_empty());
    }

    #[test]
    fn shared_context_words_end_up_closer() {
        let seqs = corpus();
        let vocab = Vocabulary::build(&seqs, 1).unwrap();
        let init = WordEmbeddingTable::random(vocab.len(), 16, &mut seeded(2));
        let model = train_word2vec(&seqs, &vocab, &init, &cfg(16, 200)).unwrap();
        let v = &model.input.vectors;
        let files = v.row(vocab.get("files").unwrap());
        let sorts = v.row(vocab.get("sorts").unwrap());
        let anesthesia = v.row(vocab.get("anesthesia").unwrap());
        assert!(cosine(files, sorts) > cosine(files, anesthesia));
        assert!(model.final_loss < model.initial_loss);
        assert!(model.input.is_finite());
    }

    #[test]
    fn training_is_deterministic() {
        let seqs = corpus();
        let vocab = Vocabulary::build(&seqs, 1).unwrap();
        let init = WordEmbeddingTable::random(vocab.len(), 8, &mut seeded(5));
        let c = EmbedConfig {
            subsample: 1e-3,
            ..cfg(8, 3)
        };
        let a = train_word2vec(&seqs, &vocab, &init, &c).unwrap();
        let b = train_word2vec(&seqs, &vocab, &init, &c).unwrap();
        assert_eq!(a.input, b.input);
        assert_eq!(a.epoch_losses, b.epoch_losses);
    }

    #[test]
    fn rejects_bad_inputs() {
        let seqs = corpus();
        let vocab = Vocabulary::build(&seqs, 1).unwrap();
        let init = WordEmbeddingTable::random(vocab.len(), 4, &mut seeded(1));
        assert!(matches!(
            train_word2vec(&seqs, &vocab, &init, &cfg(8, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
        let empty = vec![tokenize("unknown words only")];
        assert!(matches!(
            train_word2vec(&empty, &vocab, &init, &cfg(4, 1)),
            Err(Error::EmptyCorpus)
        ));
    }
}

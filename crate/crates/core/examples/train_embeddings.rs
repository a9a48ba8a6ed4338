//! Trains word, task-document and skill embeddings and lists the nearest
//! vocabulary neighbors of a few words.
//!
//! ```text
//! cargo run --release --example train_embeddings -- [DIM]
//! ```

use std::path::PathBuf;

use ndarray::ArrayView1;
use occrisk::config::RunConfig;
use occrisk::corpus::Corpus;
use occrisk::pipeline::train_embeddings;

fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let d = a.dot(&b);
    let n = a.dot(&a).sqrt() * b.dot(&b).sqrt();
    if n > 0.0 {
        d / n
    } else {
        0.0
    }
}

fn main() -> occrisk::Result<()> {
    let mut cfg = RunConfig::default();
    if let Some(dim) = std::env::args().nth(1) {
        cfg.embed.dim = dim.parse().map_err(|_| occrisk::Error::Config(format!("bad dimension {dim}")))?;
    }
    let corpus = Corpus::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixture"))?;
    let emb = train_embeddings(&corpus, &cfg.embed, cfg.embed_seed(), None)?;
    let s = &emb.stats;
    println!("vocabulary {} at dimension {}", s.vocabulary, emb.dim());
    println!("word loss {:.4} -> {:.4}", s.word_initial_loss, s.word_final_loss);
    println!("document loss {:.4} -> {:.4}", s.doc_initial_loss, s.doc_final_loss);

    for word in ["operate", "design", "record", "analyze"] {
        let Some(i) = emb.vocab.get(word) else { continue };
        let mut scored: Vec<(f64, &str)> = (0..emb.vocab.len())
            .filter(|&j| j != i)
            .map(|j| (cosine(emb.words.row(i), emb.words.row(j)), emb.vocab.token(j)))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        let near: Vec<String> = scored.iter().take(5).map(|(c, t)| format!("{t} {c:.2}")).collect();
        println!("{word:>8}: {}", near.join(", "));
    }
    Ok(())
}

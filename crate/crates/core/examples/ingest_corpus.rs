//! Parses the bundled corpus and reports what was admitted.
//!
//! ```text
//! cargo run --example ingest_corpus -- [DATA_DIR]
//! ```

use std::path::PathBuf;

use occrisk::corpus::Corpus;

fn main() -> occrisk::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixture"));
    let corpus = Corpus::load(&dir)?;
    let tasks: usize = corpus.occupations.iter().map(|o| o.task_statements.len()).sum();
    println!("occupations      {}", corpus.occupations.len());
    println!("task statements  {tasks}");
    println!("skills           {}", corpus.skills.len());
    println!("links            {} ({} duplicates dropped)", corpus.links.len(), corpus.duplicate_links);
    println!("labels           {}", corpus.labels.len());
    for e in &corpus.excluded {
        println!("excluded {}: {}", e.soc_code, e.reason);
    }
    if let Some(o) = corpus.occupations.first() {
        println!("\n{} {}", o.soc_code, o.title);
        for t in o.task_statements.iter().take(3) {
            println!("  - {t}");
        }
    }
    Ok(())
}

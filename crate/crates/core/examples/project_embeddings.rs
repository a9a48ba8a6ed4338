//! Projects learned node embeddings with PCA, k-means and t-SNE and writes a
//! CSV and an SVG scatter for each.
//!
//! ```text
//! cargo run --release --example project_embeddings -- [--all-nodes]
//! ```

use occrisk::config::RunConfig;
use occrisk::pipeline::{ProjectionMethod, Run};

fn main() -> occrisk::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.viz.all_nodes = std::env::args().any(|a| a == "--all-nodes");
    cfg.paths.data_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture").into();
    cfg.paths.out_dir = std::env::temp_dir().join("occrisk-examples");
    let run = Run::new(cfg)?;
    for method in [ProjectionMethod::Pca, ProjectionMethod::Kmeans, ProjectionMethod::Tsne] {
        let p = run.project(method)?;
        let mut counts = std::collections::BTreeMap::new();
        for label in p.labels.iter().flatten() {
            *counts.entry(label.as_str()).or_insert(0usize) += 1;
        }
        println!("{:<7} {} points {:?}", method.name(), p.len(), counts);
        println!("        {}", run.out(&format!("projection_{}.svg", method.name())).display());
    }
    Ok(())
}

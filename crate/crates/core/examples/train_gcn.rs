//! Trains the graph model on the fixture and prints the training curve.
//!
//! ```text
//! cargo run --release --example train_gcn -- [SEED]
//! ```

use occrisk::config::RunConfig;
use occrisk::gcn::History;
use occrisk::pipeline::{Run, HISTORY_FILE};

fn main() -> occrisk::Result<()> {
    let mut cfg = RunConfig::default();
    if let Some(seed) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.seed = seed;
    }
    cfg.paths.data_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture").into();
    cfg.paths.out_dir = std::env::temp_dir().join(format!("occrisk-examples-seed{}", cfg.seed));
    let run = Run::new(cfg)?;
    let model = run.train()?;
    println!("layer plan {:?}", model.layer_plan);

    let history = std::fs::read_to_string(run.out(HISTORY_FILE)).map_err(|e| occrisk::Error::io(run.out(HISTORY_FILE), e))?;
    println!("{}", History::CSV_HEADER);
    let lines: Vec<&str> = history.lines().skip(1).collect();
    for (i, line) in lines.iter().enumerate() {
        if i < 5 || i % 10 == 9 || i + 1 == lines.len() {
            println!("{line}");
        }
    }
    println!("model written to {}", run.cfg.paths.out_dir.display());
    Ok(())
}

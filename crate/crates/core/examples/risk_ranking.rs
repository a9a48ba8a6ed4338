//! Ranks every occupation by predicted automation risk.
//!
//! ```text
//! cargo run --release --example risk_ranking -- [CUTOFF]
//! ```

use occrisk::config::RunConfig;
use occrisk::pipeline::{Run, RISK_FILE};

fn main() -> occrisk::Result<()> {
    let mut cfg = RunConfig::default();
    if let Some(c) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.risk.cutoff = c;
    }
    cfg.paths.data_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture").into();
    cfg.paths.out_dir = std::env::temp_dir().join("occrisk-examples");
    let run = Run::new(cfg)?;
    let table = run.predict()?;
    println!("highest risk:");
    for r in table.rows.iter().take(10) {
        println!("  {:>3}. {:.4}  {}", r.rank, r.probability, r.title);
    }
    println!("lowest risk:");
    for r in table.rows.iter().rev().take(5) {
        println!("  {:>3}. {:.4}  {}", r.rank, r.probability, r.title);
    }
    println!(
        "{} of {} occupations at or above {} ({:.1}%)",
        table.flagged(),
        table.rows.len(),
        table.cutoff,
        100.0 * table.flagged_fraction()
    );
    println!("full table in {}", run.out(RISK_FILE).display());
    Ok(())
}

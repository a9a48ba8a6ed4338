//! Checks how the predicted risk of occupations projected to decline compares
//! with the decision threshold.
//!
//! ```text
//! cargo run --release --example compare_declining
//! ```

use occrisk::config::RunConfig;
use occrisk::pipeline::Run;

fn main() -> occrisk::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.paths.data_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture").into();
    cfg.paths.out_dir = std::env::temp_dir().join("occrisk-examples");
    let report = Run::new(cfg)?.compare_bls()?;
    for m in &report.matched {
        println!(
            "{:>7.1}k  {:.4} {}  {}",
            m.decline,
            m.probability,
            if m.above_threshold { "above" } else { "below" },
            m.title
        );
    }
    for u in &report.unmatched {
        println!("not in the graph: {}", u.title);
    }
    match report.fraction_above {
        Some(f) => println!("{:.1}% above {}", 100.0 * f, report.threshold),
        None => println!("no declining occupation matched"),
    }
    Ok(())
}

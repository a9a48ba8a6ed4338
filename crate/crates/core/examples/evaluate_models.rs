//! Scores the graph model against the three baselines over several seeds and
//! reports per-model medians.
//!
//! ```text
//! cargo run --release --example evaluate_models -- [SEEDS]
//! ```
//! `SEEDS` is a comma-separated list, default `7,8,9,10,11`.

use std::collections::BTreeMap;

use occrisk::config::RunConfig;
use occrisk::pipeline::Run;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn main() -> occrisk::Result<()> {
    let seeds: Vec<u64> = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "7,8,9,10,11".into())
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| occrisk::Error::Config(format!("bad seed {s}"))))
        .collect::<occrisk::Result<_>>()?;
    let mut f1: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for &seed in &seeds {
        let mut cfg = RunConfig {
            seed,
            ..RunConfig::default()
        };
        cfg.paths.data_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture").into();
        cfg.paths.out_dir = std::env::temp_dir().join(format!("occrisk-examples-seed{seed}"));
        let rows = Run::new(cfg)?.evaluate()?;
        let line: Vec<String> = rows.iter().map(|r| format!("{} {:.3}", r.model, r.metrics.f1)).collect();
        println!("seed {seed:>3}: {}", line.join("  "));
        for r in rows {
            f1.entry(r.model).or_default().push(r.metrics.f1);
        }
    }
    println!();
    for (model, v) in f1 {
        println!("{model:<14} median F1 {:.4}", median(v));
    }
    Ok(())
}

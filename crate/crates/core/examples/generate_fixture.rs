//! Regenerates the bundled synthetic corpus.
//!
//! ```text
//! cargo run --example generate_fixture -- [OUT_DIR]
//! ```

use std::path::PathBuf;

use occrisk::synthetic::{generate, FixtureSpec};

fn main() -> occrisk::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixture"));
    let fixture = generate(&FixtureSpec::default())?;
    let manifest = fixture.write(&out)?;
    for (k, v) in &manifest.counts {
        println!("{k:>22} {v}");
    }
    println!("written to {}", out.display());
    Ok(())
}

//! Grid over embedding size and layer width. The default grid trains 36
//! models; pass `quick` for a 2 x 2 grid.
//!
//! ```text
//! cargo run --release --example parameter_sweep -- [quick]
//! ```

use occrisk::config::RunConfig;
use occrisk::pipeline::{Run, SWEEP_FILE};

fn main() -> occrisk::Result<()> {
    let mut cfg = RunConfig::default();
    if std::env::args().nth(1).as_deref() == Some("quick") {
        cfg.sweep.dims = vec![50, 200];
        cfg.sweep.hidden = vec![16, 256];
    }
    cfg.paths.data_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixture").into();
    cfg.paths.out_dir = std::env::temp_dir().join("occrisk-examples");
    let run = Run::new(cfg)?;
    let cells = run.sweep()?;

    let dims = &run.cfg.sweep.dims;
    let hidden = &run.cfg.sweep.hidden;
    print!("F1       ");
    for h in hidden {
        print!("{h:>8}");
    }
    println!();
    for d in dims {
        print!("d0 {d:>4}  ");
        for h in hidden {
            let f1 = cells.iter().find(|c| c.d0 == *d && c.hidden == *h).map_or(f64::NAN, |c| c.f1);
            print!("{f1:>8.4}");
        }
        println!();
    }
    println!("grid written to {}", run.out(SWEEP_FILE).display());
    Ok(())
}
